#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "foa/hungarian.hpp"
#include "foa/pipeline.hpp"
#include "foa/scenarios.hpp"
#include "foa/tracking.hpp"
#include "oracles.hpp"

using namespace foa;

namespace {

HeadDetection det(Vec2 room_pos, double axis = 0.0, double border_px = 50.0, bool partial = false) {
  HeadDetection d;
  d.center_room = room_pos;
  d.center_px = {border_px, 120.0};
  d.axis_angle_rad = axis;
  d.border_distance_px = border_px;
  d.partial = partial;
  d.ellipse_major_px = 12;
  d.ellipse_minor_px = 9;
  return d;
}

double cost_of(const std::vector<std::vector<double>>& c, const std::vector<int>& a) {
  double t = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] >= 0) t += c[i][a[i]];
  return t;
}

double greedy_cost(const std::vector<std::vector<double>>& c) {
  std::vector<char> used(c.empty() ? 0 : c[0].size(), 0);
  double t = 0;
  for (const auto& row : c) {
    int best = -1;
    for (std::size_t j = 0; j < row.size(); ++j)
      if (!used[j] && (best < 0 || row[j] < row[best])) best = static_cast<int>(j);
    if (best < 0) break;
    used[best] = 1;
    t += row[best];
  }
  return t;
}

const std::vector<DepthHistogram>& refs() {
  static const auto r = make_reference_histograms(default_setup().room, default_setup().pipeline).histograms;
  return r;
}

}  // namespace

TEST(Predict, Examples) {
  std::vector<Vec2> h = {{0, 0}, {1, 0}, {3, 0}};
  EXPECT_EQ(predict_position(h), (Vec2{6, 0}));
  h = {{2, 2}, {2, 2}, {2, 2}};
  EXPECT_EQ(predict_position(h), (Vec2{2, 2}));
  h = {{0, 0}, {1, 1}, {2, 2}};
  EXPECT_EQ(predict_position(h), (Vec2{3, 3}));
  h = {{1, 1}, {2, 3}};
  EXPECT_EQ(predict_position(h), (Vec2{3, 5}));
  EXPECT_THROW(predict_position(std::vector<Vec2>{}), PreconditionError);
}

TEST(Predict, TranslationEquivariant) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> c(-64, 64);
  for (int i = 0; i < 1000; ++i) {
    // Quarter-metre grid values keep every sum exact.
    std::vector<Vec2> h(3);
    for (auto& p : h) p = {c(rng) / 4.0, c(rng) / 4.0};
    const Vec2 t{c(rng) / 4.0, c(rng) / 4.0};
    std::vector<Vec2> moved;
    for (auto p : h) moved.push_back(p + t);
    EXPECT_EQ(predict_position(moved), predict_position(h) + t);
  }
}

TEST(Gate, Examples) {
  const std::vector<HeadDetection> d = {det({1, 0}), det({0, 3})};
  const auto g = gate({0, 0}, d, 2.0);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].detection, 0u);

  const std::vector<HeadDetection> two = {det({0, 0.4}), det({0.2, 0})};
  const auto both = gate({0, 0}, two, 0.5);
  ASSERT_EQ(both.size(), 2u);
  EXPECT_EQ(both[0].detection, 1u);
  EXPECT_LT(both[0].distance, both[1].distance);

  EXPECT_TRUE(gate({0, 0}, {}, 1.0).empty());
  EXPECT_THROW(gate({0, 0}, d, 0.0), PreconditionError);
}

TEST(Associate, NearerDetectionWins) {
  const auto a = associate(std::vector<Vec2>{{0, 0}}, {det({0.3, 0}), det({0.1, 0})}, 0.5);
  ASSERT_EQ(a.matches.size(), 1u);
  EXPECT_EQ(a.matches[0].second, 1u);
  EXPECT_EQ(a.unmatched_detections, (std::vector<std::size_t>{0}));
  EXPECT_FALSE(a.used_global_assignment);
}

TEST(Associate, GreedySuboptimalCostMatrix) {
  const std::vector<std::vector<double>> c = {{1, 2}, {1, 10}};
  const auto a = solve_assignment(c);
  EXPECT_EQ(a, (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(cost_of(c, a), 3.0);
  EXPECT_DOUBLE_EQ(oracle::brute_assignment_cost(c), 3.0);
}

TEST(Associate, GlobalAssignmentWhenGatesOverlap) {
  // Nearest-first would give t1 -> d1 (1.0) and t2 -> d2 (3.5).
  const std::vector<Vec2> tracks = {{0, 0}, {2, 0}};
  const std::vector<HeadDetection> d = {det({1, 0}), det({-1.5, 0})};
  const auto a = associate(tracks, d, 4.0);
  EXPECT_TRUE(a.used_global_assignment);
  auto m = a.matches;
  std::sort(m.begin(), m.end());
  EXPECT_EQ(m, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
}

TEST(Associate, NoDetectionsLeavesAllUnmatched) {
  const auto a = associate(std::vector<Vec2>{{0, 0}, {1, 1}}, {}, 0.5);
  EXPECT_TRUE(a.matches.empty());
  EXPECT_EQ(a.unmatched_tracks.size(), 2u);

  PipelineConfig cfg;
  Tracker t(RoomModel{}, cfg);
  t.update({det({2.5, 2.5})}, 0);
  t.update({}, 1);
  EXPECT_TRUE(t.tracks().empty());  // a tentative track dies on its first miss
}

TEST(Associate, DisjointGatesEqualNearestNeighbour) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> jitter(-0.4, 0.4);
  std::uniform_int_distribution<int> n(1, 4), k(0, 3);
  for (int trial = 0; trial < 500; ++trial) {
    // Tracks 3 m apart with detections near each: gates never overlap.
    std::vector<Vec2> tracks;
    std::vector<HeadDetection> dets;
    const int nt = n(rng);
    for (int t = 0; t < nt; ++t) {
      tracks.push_back({3.0 * t, 0.0});
      const int nd = k(rng);
      for (int j = 0; j < nd; ++j) dets.push_back(det({3.0 * t + jitter(rng), jitter(rng)}));
    }
    std::shuffle(dets.begin(), dets.end(), rng);
    const auto a = associate(tracks, dets, 0.5);
    EXPECT_FALSE(a.used_global_assignment);
    for (std::size_t t = 0; t < tracks.size(); ++t) {
      // Brute-force nearest within the gate, lower index on ties.
      int best = -1;
      for (std::size_t j = 0; j < dets.size(); ++j) {
        const double d = distance(tracks[t], dets[j].center_room);
        if (d <= 0.5 && (best < 0 || d < distance(tracks[t], dets[best].center_room))) best = static_cast<int>(j);
      }
      const auto it = std::find_if(a.matches.begin(), a.matches.end(), [&](auto m) { return m.first == t; });
      if (best < 0) {
        EXPECT_EQ(it, a.matches.end());
      } else {
        ASSERT_NE(it, a.matches.end());
        EXPECT_EQ(it->second, static_cast<std::size_t>(best));
      }
    }
  }
}

TEST(Hungarian, MatchesExhaustivePermutation) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(1, 5);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = dim(rng), c = dim(rng);
    std::vector<std::vector<double>> m(r, std::vector<double>(c));
    for (auto& row : m)
      for (auto& x : row) x = val(rng);
    const auto a = solve_assignment(m);
    int assigned = 0;
    std::vector<char> used(c, 0);
    for (int x : a) {
      if (x < 0) continue;
      ++assigned;
      EXPECT_FALSE(used[x]);
      used[x] = 1;
    }
    EXPECT_EQ(assigned, std::min(r, c));
    const double best = oracle::brute_assignment_cost(m);
    EXPECT_NEAR(cost_of(m, a), best, 1e-9) << trial;
    if (r <= c) EXPECT_LE(cost_of(m, a), greedy_cost(m) + 1e-9);
  }
}

TEST(ResolveDirection, Examples) {
  const double turn = deg2rad(45);
  EXPECT_DOUBLE_EQ(resolve_direction(std::nullopt, 0.0, 0.0, turn), 0.0);
  EXPECT_NEAR(rad2deg(resolve_direction(deg2rad(10), deg2rad(170), 0.0, turn)), 350.0, 1e-9);
  // 90 and 270 are equally far from 0; the tie goes toward trajectory_dir.
  EXPECT_NEAR(resolve_direction(0.0, kPi / 2, deg2rad(80), kPi), kPi / 2, 1e-12);
  EXPECT_NEAR(resolve_direction(0.0, kPi / 2, deg2rad(260), kPi), 3 * kPi / 2, 1e-12);
  // Rate limiting keeps the side of the tie-break.
  EXPECT_NEAR(resolve_direction(0.0, kPi / 2, deg2rad(80), turn), turn, 1e-12);
  EXPECT_NEAR(resolve_direction(0.0, kPi / 2, deg2rad(260), turn), kTwoPi - turn, 1e-12);
}

TEST(ResolveDirection, NeverFlips) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> a(0, kTwoPi);
  const double turn = deg2rad(45);
  for (int i = 0; i < 10000; ++i) {
    const double prev = a(rng);
    const double phi = resolve_direction(prev, wrap_half_turn(a(rng)), a(rng), turn);
    EXPECT_LE(angular_distance(phi, prev), turn + 1e-12);
    EXPECT_GE(phi, 0.0);
    EXPECT_LT(phi, kTwoPi);
  }
}

TEST(Tracker, StraightWalkGivesOneTrackFacingForward) {
  PipelineConfig cfg;
  Tracker t(RoomModel{}, cfg);
  for (int k = 0; k < 20; ++k) t.update({det({1.0 + 0.12 * k, 2.5}, 0.0, 30.0 + 4 * k)}, k);
  const auto c = t.confirmed_tracks();
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].history.size(), 20u);
  for (const auto& e : c[0].history) EXPECT_NEAR(angular_distance(e.phi_rad, 0.0), 0.0, 1e-12);
}

TEST(Tracker, WestwardWalkFacesWest) {
  PipelineConfig cfg;
  Tracker t(RoomModel{}, cfg);
  for (int k = 0; k < 10; ++k) t.update({det({3.5 - 0.12 * k, 2.5}, 0.0, 30.0 + 4 * k)}, k);
  const auto c = t.confirmed_tracks();
  ASSERT_EQ(c.size(), 1u);
  for (const auto& e : c[0].history) EXPECT_NEAR(e.phi_rad, kPi, 1e-12);
}

TEST(Tracker, BorderFlickerNeverConfirmed) {
  PipelineConfig cfg;
  Tracker t(RoomModel{}, cfg);
  for (int k = 0; k < 12; ++k) t.update({det({0.4 + (k % 2) * 0.01, 2.5}, 0.0, 2.0 + (k % 2), true)}, k);
  EXPECT_TRUE(t.confirmed_tracks().empty());

  cfg.inward_margin_px = -1e9;  // no inward filter
  Tracker loose(RoomModel{}, cfg);
  for (int k = 0; k < 12; ++k) loose.update({det({0.4 + (k % 2) * 0.01, 2.5}, 0.0, 2.0 + (k % 2), true)}, k);
  EXPECT_EQ(loose.confirmed_tracks().size(), 1u);
}

TEST(Tracker, ExitsAfterMisses) {
  PipelineConfig cfg;
  Tracker t(RoomModel{}, cfg);
  int k = 0;
  for (; k < 5; ++k) t.update({det({1.0 + 0.1 * k, 2.5})}, k);
  for (int m = 0; m <= cfg.max_misses; ++m) t.update({}, k++);
  ASSERT_EQ(t.tracks().size(), 1u);
  EXPECT_EQ(t.tracks()[0].status, TrackStatus::exited);
  t.update({det({1.5, 2.5})}, k++);
  EXPECT_EQ(t.tracks().size(), 2u);
  EXPECT_THROW(t.update({}, 0), PreconditionError);
}

// Random walks with random axes: the confirmed phi sequence never steps
// by more than the turn limit, so it can never come near a half turn.
TEST(Tracker, NoFlipsOnRandomSequences) {
  PipelineConfig cfg;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ax(0, kPi), step(-0.15, 0.15);
  for (int trial = 0; trial < 200; ++trial) {
    Tracker t(RoomModel{}, cfg);
    Vec2 p{2.5, 2.5};
    for (int k = 0; k < 40; ++k) {
      p = p + Vec2{step(rng), step(rng)};
      t.update({det(p, ax(rng), 40.0 + k)}, k);
    }
    for (const auto& tr : t.confirmed_tracks()) {
      for (std::size_t i = 1; i < tr.history.size(); ++i) {
        const double d = angular_distance(tr.history[i].phi_rad, tr.history[i - 1].phi_rad);
        EXPECT_LE(d, cfg.max_turn_rate_rad + 1e-12);
        EXPECT_GT(std::abs(d - kPi), cfg.max_turn_rate_rad);
      }
    }
  }
}

TEST(TrackerScenes, BorderFlickerSceneNeverConfirmed) {
  const foa::Setup s = default_setup();
  const auto result = run_scenario(border_flicker_scenario(s), s, refs());
  EXPECT_GT(result.detection_count(), 0u);
  EXPECT_TRUE(result.confirmed_tracks.empty());
}

TEST(TrackerScenes, PassingWalkersKeepIdentities) {
  const foa::Setup s = default_setup();
  const auto script = passing_scenario(s);
  const auto result = run_scenario(script, s, refs());
  const auto gt = ground_truth(script, s.room, s.signs, s.pipeline);
  const auto ev = evaluate(result, gt.records, s.pipeline);
  EXPECT_EQ(result.confirmed_tracks.size(), 2u);
  EXPECT_EQ(ev.id_switches, 0u);
  EXPECT_EQ(ev.confirmed_false_positives, 0u);
  ASSERT_EQ(ev.tracks_per_person.size(), 2u);
  for (const auto& [person, ids] : ev.tracks_per_person) EXPECT_EQ(ids.size(), 1u) << person;
  EXPECT_EQ(ev.flip_steps, 0u);
}

TEST(TrackerScenes, DefaultWalksOneTrackEach) {
  const foa::Setup s = default_setup();
  for (const auto& script : default_scenarios(s)) {
    const auto result = run_scenario(script, s, refs());
    const auto ev = evaluate(result, ground_truth(script, s.room, s.signs, s.pipeline).records, s.pipeline);
    EXPECT_EQ(result.confirmed_tracks.size(), 1u) << script.persons[0].name;
    EXPECT_EQ(ev.id_switches, 0u);
    EXPECT_EQ(ev.flip_steps, 0u);
    EXPECT_LE(ev.max_phi_step_deg, 45.0 + 1e-9);
  }
}

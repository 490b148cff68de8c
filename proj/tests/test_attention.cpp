#include <gtest/gtest.h>

#include <random>

#include "foa/attention.hpp"
#include "foa/scenarios.hpp"
#include "oracles.hpp"

using namespace foa;

namespace {

OrientedState state(Vec2 p, double phi, double psi = 0.0, double v = 0.0) {
  OrientedState s;
  s.p_prime = p;
  s.phi = phi;
  s.psi = psi;
  s.v = v;
  return s;
}

OrientedTrajectory random_trajectory(std::mt19937_64& rng, const RoomModel& room, int n) {
  std::uniform_real_distribution<double> x(0.05, room.width_m - 0.05), y(0.05, room.depth_m - 0.05),
      a(0, kTwoPi), v(0, 2.0);
  OrientedTrajectory t{1, {}};
  for (int k = 0; k < n; ++k) {
    auto s = state({x(rng), y(rng)}, a(rng), a(rng), v(rng));
    s.frame_index = k;
    t.states.push_back(s);
  }
  return t;
}

AttentionMap map_of(std::vector<double> values) {
  std::vector<WallSample> s;
  for (std::size_t i = 0; i < values.size(); ++i) s.push_back({Wall::S, 0.5 + i, {0.5 + i, 0.0}});
  return {s, std::move(values), true};
}

}  // namespace

TEST(Factors, Distance) {
  EXPECT_EQ(attention_distance(1.0), 1.0);
  EXPECT_EQ(attention_distance(2.0), 0.5);
  for (double r : {0.3, 0.7, 1.9, 4.2}) EXPECT_DOUBLE_EQ(attention_distance(2 * r), 0.5 * attention_distance(r));
  EXPECT_THROW(attention_distance(0.0), DomainError);
  EXPECT_THROW(attention_distance(-1.0), DomainError);
}

TEST(Factors, Speed) {
  EXPECT_EQ(attention_speed(0.0, 0.1), 10.0);
  EXPECT_DOUBLE_EQ(attention_speed(0.9, 0.1), 1.0);
  EXPECT_THROW(attention_speed(-0.1, 0.1), DomainError);
}

TEST(Factors, Angle) {
  EXPECT_EQ(attention_angle(1.3, 1.3, 0.5), 1.0);
  EXPECT_NEAR(attention_angle(0.0, kPi / 2, 0.5), 1.7854, 1e-4);
  EXPECT_DOUBLE_EQ(attention_angle(0.0, kPi / 2, 0.5), 1.0 + 0.25 * kPi);
  EXPECT_DOUBLE_EQ(attention_angle(deg2rad(350), deg2rad(10), 0.5), 1.0 + 0.5 * deg2rad(20));
}

TEST(Instantaneous, Examples) {
  const AttentionParams p;
  const auto s = state({1, 1}, 0.0, 0.0, 0.9);
  EXPECT_DOUBLE_EQ(instantaneous_attention(s, {3, 1}, p), 0.5);
  EXPECT_EQ(instantaneous_attention(s, {-1, 1}, p), 0.0);
  const double up = instantaneous_attention(s, Vec2{1, 1} + 2.0 * unit(0.3), p);
  const double down = instantaneous_attention(s, Vec2{1, 1} + 2.0 * unit(-0.3), p);
  EXPECT_GT(up, 0.0);
  EXPECT_DOUBLE_EQ(up, down);
  EXPECT_THROW(instantaneous_attention(s, {1, 1}, p), DomainError);
}

TEST(Instantaneous, ZeroOutsideConePositiveInside) {
  const AttentionParams p;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(0, kTwoPi), r(0.4, 5.0);
  for (int i = 0; i < 5000; ++i) {
    const auto s = state({2, 2}, a(rng), a(rng), 0.5);
    const double dir = a(rng);
    const double val = instantaneous_attention(s, Vec2{2, 2} + r(rng) * unit(dir), p);
    if (angular_distance(dir, s.phi) > p.cone_half_angle_rad + 1e-9) EXPECT_EQ(val, 0.0);
    if (angular_distance(dir, s.phi) < p.cone_half_angle_rad - 1e-9) EXPECT_GT(val, 0.0);
  }
}

TEST(Instantaneous, Monotonicity) {
  const AttentionParams p;
  const Vec2 head{1, 1};
  const Vec2 dir = unit(0.2);
  double prev = std::numeric_limits<double>::infinity();
  for (double r = 0.35; r < 5; r += 0.1) {
    const double a = instantaneous_attention(state(head, 0.2, 0.2, 0.5), head + r * dir, p);
    EXPECT_LT(a, prev);
    prev = a;
  }
  prev = std::numeric_limits<double>::infinity();
  for (double v = 0; v < 3; v += 0.1) {
    const double a = instantaneous_attention(state(head, 0.2, 0.2, v), head + 2.0 * dir, p);
    EXPECT_LT(a, prev);
    prev = a;
  }
  prev = 0.0;
  for (double d = 0; d <= kPi; d += 0.1) {
    const double a = instantaneous_attention(state(head, 0.2, 0.2 + d, 0.5), head + 2.0 * dir, p);
    EXPECT_GT(a, prev);
    prev = a;
  }
}

TEST(Accumulate, TwoSymmetricSamplesShareEqually) {
  const RoomModel room;
  AttentionParams p;
  p.cone_half_angle_rad = deg2rad(2.0);
  const auto samples = wall_samples(room, 0.05);
  OrientedTrajectory t{1, {state({2.5, 4.0}, kPi / 2, kPi / 2, 0.3)}};
  const auto m = accumulate_trajectory(t, room, samples, p);
  EXPECT_TRUE(m.normalized);
  int nonzero = 0;
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (m.values[i] == 0.0) continue;
    ++nonzero;
    EXPECT_NEAR(m.values[i], 0.5, 1e-12);
    EXPECT_EQ(m.samples[i].wall, Wall::N);
  }
  EXPECT_EQ(nonzero, 2);
}

TEST(Accumulate, EmptyConeIsUnnormalisable) {
  const RoomModel room;
  const auto samples = wall_samples(room, 0.05);
  // Standing on the south wall facing out of the room.
  OrientedTrajectory t{1, {state({2.5, 0.0}, -kPi / 2)}};
  const auto m = accumulate_trajectory(t, room, samples, AttentionParams{});
  EXPECT_FALSE(m.normalized);
  EXPECT_EQ(m.total(), 0.0);
  EXPECT_THROW(accumulate_trajectory(OrientedTrajectory{}, room, samples, AttentionParams{}), PreconditionError);
}

TEST(Accumulate, RandomTrajectoriesSumToOne) {
  const RoomModel room;
  const AttentionParams p;
  const auto samples = wall_samples(room, 0.05);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto t = random_trajectory(rng, room, 1 + i % 30);
    const auto m = accumulate_trajectory(t, room, samples, p);
    ASSERT_TRUE(m.normalized);
    EXPECT_NEAR(m.total(), 1.0, 1e-9);
    for (double v : m.values) EXPECT_GE(v, 0.0);
  }
}

TEST(Accumulate, ScalingRawAttentionChangesNothing) {
  const foa::Setup s = default_setup();
  const AttentionParams p;
  const auto samples = wall_samples(s.room, 0.05);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(1e-6, 1e6);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_trajectory(rng, s.room, 20);
    const auto raw = raw_attention(t, s.room, samples, p);
    auto scaled = raw;
    const double c = scale(rng);
    for (double& v : scaled) v *= c;
    const auto a = normalize_attention(samples, raw), b = normalize_attention(samples, scaled);
    for (std::size_t k = 0; k < raw.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
    const auto ra = sign_report(a, s.signs, s.room, {t}, p), rb = sign_report(b, s.signs, s.room, {t}, p);
    EXPECT_EQ(ra.ranking(), rb.ranking());
    for (std::size_t k = 0; k < s.signs.size(); ++k)
      EXPECT_NEAR(ra.signs[k].relative_percent, rb.signs[k].relative_percent, 1e-9);
  }
}

TEST(Accumulate, EqualsDirectDoubleSum) {
  RoomModel room;
  room.width_m = 1.0;
  room.depth_m = 1.5;
  room.camera_position = {0.5, 0.75};
  const auto samples = wall_samples(room, 0.5);
  ASSERT_EQ(samples.size(), 10u);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> half(0.1, kPi / 2), c2(-0.3, 1.0), kappa(0.01, 1.0);
  for (int i = 0; i < 2000; ++i) {
    AttentionParams p;
    p.cone_half_angle_rad = half(rng);
    p.c2 = c2(rng);
    p.kappa = kappa(rng);
    const auto t = random_trajectory(rng, room, 1 + i % 5);
    const auto got = accumulate_trajectory(t, room, samples, p);
    const auto want = oracle::accumulate(t, samples, p.cone_half_angle_rad, p.c2, p.kappa, p.r_clamp_m);
    for (std::size_t k = 0; k < samples.size(); ++k) EXPECT_NEAR(got.values[k], want[k], 1e-12) << i;
  }
}

// Every grid, cone and pose: the pruned sweep visits every in-cone sample.
TEST(Accumulate, PrunedSweepMatchesFullScanOnRealGrid) {
  const RoomModel room;
  const auto samples = wall_samples(room, 0.05);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> half(0.05, kPi / 2);
  for (int i = 0; i < 300; ++i) {
    AttentionParams p;
    p.cone_half_angle_rad = half(rng);
    const auto t = random_trajectory(rng, room, 3);
    const auto raw = raw_attention(t, room, samples, p);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      double want = 0;
      for (const auto& s : t.states)
        want += oracle::attention_at(s, samples[k].position, p.cone_half_angle_rad, p.c2, p.kappa, p.r_clamp_m);
      EXPECT_NEAR(raw[k], want, 1e-12 * std::max(1.0, want));
    }
  }
}

// A standing viewer 2 m from a sign wide enough to hold the whole cone
// footprint (2 * 2 m * tan 30 deg = 2.31 m).
TEST(Accumulate, StationaryViewerFacingSign) {
  const foa::Setup base = default_setup();
  foa::Setup s = base;
  s.signs = {{"wide", Wall::N, 2.5, 2.4, 1.5}, {"east", Wall::E, 2.5, 0.21, 1.5}};
  const AttentionParams p;
  const auto samples = wall_samples(s.room, 0.05);
  OrientedTrajectory t{1, {}};
  for (int k = 0; k < 20; ++k) {
    auto st = state({2.5, 3.0}, kPi / 2, kPi / 2, 0.0);
    st.frame_index = k;
    t.states.push_back(st);
  }
  const auto m = accumulate_trajectory(t, s.room, samples, p);
  // Closed form for one state: 1/r per in-cone sample, the rest cancels.
  double inside = 0, total = 0;
  for (const auto& w : samples) {
    const Vec2 d = w.position - Vec2{2.5, 3.0};
    if (w.wall != Wall::N || std::abs(d.x) > 2.0 * std::tan(kPi / 6)) continue;
    total += 1.0 / norm(d);
    if (sign_for_sample(w, s.signs) == std::optional<std::size_t>(0)) inside += 1.0 / norm(d);
  }
  const auto r = sign_report(m, s.signs, s.room, {t}, p);
  EXPECT_NEAR(r.signs[0].accumulated, inside / total, 1e-12);
  EXPECT_GT(r.signs[0].accumulated, 0.99);
  EXPECT_EQ(r.signs[1].accumulated, 0.0);
  EXPECT_EQ(r.signs[0].relative_percent, 100.0);
}

TEST(Aggregate, Examples) {
  const auto a = map_of({0.25, 0.75});
  const auto same = aggregate({a, a});
  EXPECT_NEAR(same.values[0], 0.25, 1e-15);
  EXPECT_NEAR(same.values[1], 0.75, 1e-15);
  const auto mix = aggregate({map_of({1, 0}), map_of({0, 1})});
  EXPECT_EQ(mix.values, (std::vector<double>{0.5, 0.5}));
  EXPECT_TRUE(mix.normalized);
  auto other = map_of({1, 0});
  other.samples[1].position.x += 0.1;
  EXPECT_THROW(aggregate({a, other}), GridMismatch);
  auto empty = map_of({0, 0});
  empty.normalized = false;
  EXPECT_EQ(aggregate({a, empty}).values, a.values);
}

TEST(Aggregate, PreservesNormalisation) {
  const RoomModel room;
  const auto samples = wall_samples(room, 0.05);
  std::mt19937_64 rng(6);
  std::vector<AttentionMap> maps;
  for (int i = 0; i < 20; ++i) maps.push_back(accumulate_trajectory(random_trajectory(rng, room, 10), room, samples, {}));
  EXPECT_NEAR(aggregate(maps).total(), 1.0, 1e-9);
}

TEST(SignReport, OneSignTakesAll) {
  const foa::Setup s = default_setup();
  const auto samples = wall_samples(s.room, 0.05);
  std::vector<double> v(samples.size(), 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (sign_for_sample(samples[i], s.signs) == std::optional<std::size_t>(1)) v[i] = 1.0;
  const auto m = normalize_attention(samples, v);
  const auto r = sign_report(m, s.signs, s.room, {}, {});
  EXPECT_EQ(r.signs[1].relative_percent, 100.0);
  EXPECT_NEAR(r.signs[1].accumulated, 1.0, 1e-12);
  for (std::size_t k : {0u, 2u, 3u}) EXPECT_EQ(r.signs[k].relative_percent, 0.0);
  EXPECT_EQ(r.ranking().front(), "green");
}

TEST(SignReport, RelativePercentagesAndJson) {
  const foa::Setup s = default_setup();
  const auto samples = wall_samples(s.room, 0.05);
  const std::vector<double> acc = {0.299, 0.124, 0.023, 0.001};
  std::vector<double> v(samples.size(), 0.0);
  std::vector<bool> placed(4, false);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto k = sign_for_sample(samples[i], s.signs);
    if (k && !placed[*k]) {
      v[i] = acc[*k];
      placed[*k] = true;
    }
  }
  const auto r = sign_report(AttentionMap{samples, v, false}, s.signs, s.room, {}, {});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(r.signs[k].relative_percent, 100.0 * acc[k] / 0.299, 1e-9);
  EXPECT_EQ(r.ranking(), (std::vector<std::string>{"orange", "green", "red", "dark_green"}));
  const auto j = to_json(r);
  EXPECT_EQ(j["signs"][0]["id"], "orange");
  EXPECT_DOUBLE_EQ(j["signs"][1]["accumulated_attention"].get<double>(), 0.124);
  const auto back = sign_report_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.ranking(), r.ranking());
}

TEST(AttentionTime, Examples) {
  const foa::Setup s = default_setup();
  const AttentionParams p;
  OrientedTrajectory facing{1, {}}, away{2, {}};
  for (int k = 0; k < 40; ++k) {
    facing.states.push_back(state({2.5, 2.5}, kPi / 2));
    away.states.push_back(state({2.5, 2.5}, -kPi / 2 + 0.7));
  }
  const auto& orange = sign_by_id(s.signs, "orange");
  EXPECT_DOUBLE_EQ(attention_time({facing}, orange, s.room, p), 10.0);
  EXPECT_EQ(attention_time({away}, orange, s.room, p), 0.0);
  EXPECT_DOUBLE_EQ(attention_time({facing, away}, orange, s.room, p), 10.0);
}

TEST(Heatmap, ScaledToPeak) {
  const auto m = map_of({0.1, 0.4, 0.0, 0.2});
  const auto img = attention_heatmap(m, 3, 2);
  EXPECT_EQ(img.width, 12);
  EXPECT_EQ(img.height, 2);
  EXPECT_EQ(img.pixels[3], 255);
  EXPECT_EQ(img.pixels[0], 64);
  EXPECT_EQ(img.pixels[6], 0);
  EXPECT_EQ(img.pixels[12 + 11], 128);
  EXPECT_THROW(attention_heatmap(m, 0), PreconditionError);
}

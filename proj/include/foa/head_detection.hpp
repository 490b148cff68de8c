#pragma once

// Per-frame head detection on top-view depth images:
// background subtraction -> 4-connected blobs -> depth-histogram person
// filter -> head/shoulder split at the histogram valley -> moment-based
// ellipse fit -> back-projection to the floor plane.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "foa/depth_io.hpp"
#include "foa/error.hpp"
#include "foa/geometry.hpp"
#include "foa/room_model.hpp"

namespace foa {

struct Pixel {
  int u = 0;
  int v = 0;
  friend bool operator==(Pixel, Pixel) = default;
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int u, int v) const { return bits[static_cast<std::size_t>(v) * width + u] != 0; }
  void set(int u, int v, bool on = true) { bits[static_cast<std::size_t>(v) * width + u] = on ? 1 : 0; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }
};

struct BoundingBox {
  int u_min = 0, v_min = 0, u_max = 0, v_max = 0;  // inclusive
};

struct BodyBlob {
  std::vector<Pixel> pixels;
  int area_px = 0;
  BoundingBox bbox;
  bool touches_border = false;
};

struct DepthHistogram {
  double lo_mm = 0.0;
  double hi_mm = 0.0;
  std::vector<std::int64_t> counts;

  int bins() const { return static_cast<int>(counts.size()); }
  double bin_width() const { return (hi_mm - lo_mm) / static_cast<double>(counts.size()); }
  double lower_edge(int bin) const { return lo_mm + bin * bin_width(); }
  std::vector<double> edges() const {
    std::vector<double> e(counts.size() + 1);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = lower_edge(static_cast<int>(i));
    return e;
  }
  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

struct EllipseFit {
  Vec2 center_px;
  double major_px = 0.0;  // semi-axes
  double minor_px = 0.0;
  double axis_angle_rad = 0.0;  // [0, pi), direction of the major axis
};

struct HeadDetection {
  Vec2 center_px;
  Vec2 center_room;
  double ellipse_major_px = 0.0;  // semi-axes
  double ellipse_minor_px = 0.0;
  double axis_angle_rad = 0.0;  // [0, pi), undirected
  double head_top_depth_mm = 0.0;
  // The body blob touches the image border: the person is entering or
  // leaving and the detection may be an artefact of the cut silhouette.
  bool partial = false;
  // Distance from the head center to the nearest image border, pixels.
  double border_distance_px = 0.0;
};

inline BinaryMask subtract_background(const DepthFrame& frame, const BackgroundModel& bg, double delta_mm) {
  if (frame.width != bg.width || frame.height != bg.height ||
      frame.depth_mm.size() != bg.depth_mm.size()) {
    throw DimensionMismatch("subtract_background: frame and background sizes differ");
  }
  if (!(delta_mm > 0.0)) throw PreconditionError("subtract_background: delta must be positive");
  BinaryMask mask(frame.width, frame.height);
  for (std::size_t i = 0; i < frame.depth_mm.size(); ++i) {
    const double f = frame.depth_mm[i];
    const double b = bg.depth_mm[i];
    mask.bits[i] = (f > 0 && b > 0 && b - f > delta_mm) ? 1 : 0;
  }
  return mask;
}

// 4-connected components with area >= min_area, largest first. Equal areas
// keep raster order of their first pixel.
inline std::vector<BodyBlob> extract_blobs(const BinaryMask& mask, int min_area) {
  std::vector<BodyBlob> blobs;
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  std::vector<Pixel> stack;
  for (int v = 0; v < mask.height; ++v) {
    for (int u = 0; u < mask.width; ++u) {
      const std::size_t idx = static_cast<std::size_t>(v) * mask.width + u;
      if (!mask.bits[idx] || seen[idx]) continue;
      BodyBlob blob;
      blob.bbox = {u, v, u, v};
      seen[idx] = 1;
      stack.push_back({u, v});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        blob.pixels.push_back(p);
        blob.bbox.u_min = std::min(blob.bbox.u_min, p.u);
        blob.bbox.u_max = std::max(blob.bbox.u_max, p.u);
        blob.bbox.v_min = std::min(blob.bbox.v_min, p.v);
        blob.bbox.v_max = std::max(blob.bbox.v_max, p.v);
        const Pixel nbrs[4] = {{p.u + 1, p.v}, {p.u - 1, p.v}, {p.u, p.v + 1}, {p.u, p.v - 1}};
        for (const Pixel& q : nbrs) {
          if (q.u < 0 || q.v < 0 || q.u >= mask.width || q.v >= mask.height) continue;
          const std::size_t qi = static_cast<std::size_t>(q.v) * mask.width + q.u;
          if (mask.bits[qi] && !seen[qi]) {
            seen[qi] = 1;
            stack.push_back(q);
          }
        }
      }
      blob.area_px = static_cast<int>(blob.pixels.size());
      if (blob.area_px < min_area) continue;
      blob.touches_border = blob.bbox.u_min == 0 || blob.bbox.v_min == 0 ||
                            blob.bbox.u_max == mask.width - 1 || blob.bbox.v_max == mask.height - 1;
      blobs.push_back(std::move(blob));
    }
  }
  std::stable_sort(blobs.begin(), blobs.end(),
                   [](const BodyBlob& a, const BodyBlob& b) { return a.area_px > b.area_px; });
  return blobs;
}

inline int histogram_bin(double depth_mm, double lo_mm, double hi_mm, int bins) {
  const double w = (hi_mm - lo_mm) / bins;
  const int b = static_cast<int>(std::floor((depth_mm - lo_mm) / w));
  return std::clamp(b, 0, bins - 1);
}

// Depths outside [lo, hi) are clamped into the edge bins.
inline DepthHistogram histogram_of(const DepthFrame& frame, const std::vector<Pixel>& pixels, int bins,
                                   double lo_mm, double hi_mm) {
  if (bins < 2) throw PreconditionError("histogram: need at least 2 bins");
  if (!(hi_mm > lo_mm)) throw PreconditionError("histogram: empty depth range");
  DepthHistogram h{lo_mm, hi_mm, std::vector<std::int64_t>(static_cast<std::size_t>(bins), 0)};
  for (const Pixel& p : pixels) ++h.counts[histogram_bin(frame.at(p.u, p.v), lo_mm, hi_mm, bins)];
  return h;
}

inline DepthHistogram blob_histogram(const DepthFrame& frame, const BodyBlob& blob, int bins, double lo_mm,
                                     double hi_mm) {
  return histogram_of(frame, blob.pixels, bins, lo_mm, hi_mm);
}

// Pearson correlation of the two count vectors (OpenCV's HISTCMP_CORREL).
inline double histogram_correlation(const DepthHistogram& a, const DepthHistogram& b) {
  if (a.counts.size() != b.counts.size()) {
    throw PreconditionError("histogram_correlation: bin counts differ");
  }
  const std::size_t n = a.counts.size();
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += static_cast<double>(a.counts[i]);
    mean_b += static_cast<double>(b.counts[i]);
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = static_cast<double>(a.counts[i]) - mean_a;
    const double db = static_cast<double>(b.counts[i]) - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw UndefinedCorrelation("histogram_correlation: zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Highest correlation against any reference; undefined correlations count as
// -1 (no match).
inline double best_reference_correlation(const DepthHistogram& h, const std::vector<DepthHistogram>& refs) {
  double best = -1.0;
  for (const auto& r : refs) {
    try {
      best = std::max(best, histogram_correlation(h, r));
    } catch (const UndefinedCorrelation&) {
    }
  }
  return best;
}

inline std::vector<BodyBlob> filter_person_blobs(const std::vector<BodyBlob>& blobs,
                                                 const std::vector<DepthHistogram>& histograms,
                                                 const std::vector<DepthHistogram>& refs, double threshold) {
  if (refs.empty()) throw PreconditionError("filter_person_blobs: no reference histograms");
  if (blobs.size() != histograms.size()) {
    throw PreconditionError("filter_person_blobs: one histogram per blob required");
  }
  std::vector<BodyBlob> kept;
  for (std::size_t i = 0; i < blobs.size(); ++i) {
    if (best_reference_correlation(histograms[i], refs) >= threshold) kept.push_back(blobs[i]);
  }
  return kept;
}

// Bin indices of local maxima: strictly above the left neighbour, not below
// the right one, and non-empty. A plateau reports its first bin.
inline std::vector<int> histogram_local_maxima(const DepthHistogram& h) {
  std::vector<int> peaks;
  const int n = h.bins();
  for (int i = 0; i < n; ++i) {
    const auto c = h.counts[i];
    if (c <= 0) continue;
    const bool left = i == 0 || c > h.counts[i - 1];
    const bool right = i == n - 1 || c >= h.counts[i + 1];
    if (left && right) peaks.push_back(i);
  }
  return peaks;
}

// Depth (mm) separating head from shoulders: lower edge of the emptiest bin
// strictly between the two highest local maxima. The first such bin wins
// ties.
inline double head_split_depth(const DepthHistogram& h) {
  auto peaks = histogram_local_maxima(h);
  if (peaks.size() < 2) throw NoHeadSplit("histogram is not bimodal");
  std::stable_sort(peaks.begin(), peaks.end(), [&](int a, int b) { return h.counts[a] > h.counts[b]; });
  const int first = std::min(peaks[0], peaks[1]);
  const int second = std::max(peaks[0], peaks[1]);
  if (second - first < 2) throw NoHeadSplit("histogram peaks are adjacent");
  int valley = first + 1;
  for (int i = first + 1; i < second; ++i) {
    if (h.counts[i] < h.counts[valley]) valley = i;
  }
  return h.lower_edge(valley);
}

inline std::vector<Pixel> split_head_mask(const DepthFrame& frame, const BodyBlob& blob,
                                          const DepthHistogram& hist) {
  const double split = head_split_depth(hist);
  std::vector<Pixel> head;
  for (const Pixel& p : blob.pixels) {
    if (frame.at(p.u, p.v) < split) head.push_back(p);
  }
  if (head.empty()) throw NoHeadSplit("no pixels above the head/shoulder valley");
  return head;
}

// Ellipse from first and second order moments. Semi-axes are 2*sqrt of the
// covariance eigenvalues, exact for a uniformly filled ellipse.
inline EllipseFit fit_ellipse(const std::vector<Pixel>& mask) {
  if (mask.size() < 5) throw DegenerateFit("fit_ellipse: fewer than 5 pixels");
  double su = 0.0, sv = 0.0;
  for (const Pixel& p : mask) {
    su += p.u;
    sv += p.v;
  }
  const double n = static_cast<double>(mask.size());
  const double cu = su / n, cv = sv / n;
  double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
  for (const Pixel& p : mask) {
    const double du = p.u - cu, dv = p.v - cv;
    mu20 += du * du;
    mu02 += dv * dv;
    mu11 += du * dv;
  }
  mu20 /= n;
  mu02 /= n;
  mu11 /= n;
  const double half_trace = 0.5 * (mu20 + mu02);
  const double disc = std::sqrt(0.25 * (mu20 - mu02) * (mu20 - mu02) + mu11 * mu11);
  const double lambda1 = half_trace + disc;
  const double lambda2 = half_trace - disc;
  if (!(lambda2 > 1e-9 * std::max(1.0, lambda1))) {
    throw DegenerateFit("fit_ellipse: collinear pixels");
  }
  EllipseFit e;
  e.center_px = {cu, cv};
  e.major_px = 2.0 * std::sqrt(lambda1);
  e.minor_px = 2.0 * std::sqrt(lambda2);
  e.axis_angle_rad = wrap_half_turn(0.5 * std::atan2(2.0 * mu11, mu20 - mu02));
  return e;
}

inline double median_depth(const DepthFrame& frame, const std::vector<Pixel>& pixels) {
  std::vector<std::uint16_t> d;
  d.reserve(pixels.size());
  for (const Pixel& p : pixels) d.push_back(frame.at(p.u, p.v));
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (d.size() % 2 == 1) return *mid;
  const auto lower = *std::max_element(d.begin(), mid);
  return 0.5 * (static_cast<double>(lower) + static_cast<double>(*mid));
}

// Drops blobs that fail any stage; only structural errors escape.
inline std::vector<HeadDetection> detect_heads(const DepthFrame& frame, const BackgroundModel& bg,
                                               const PipelineConfig& cfg,
                                               const std::vector<DepthHistogram>& refs,
                                               const RoomModel& room) {
  if (frame.width != room.image_width || frame.height != room.image_height) {
    throw DimensionMismatch("detect_heads: frame size does not match the camera model");
  }
  const auto mask = subtract_background(frame, bg, cfg.bg_delta_mm);
  const auto blobs = extract_blobs(mask, cfg.effective_min_blob_px(room));

  std::vector<HeadDetection> out;
  for (const auto& blob : blobs) {
    const auto hist = blob_histogram(frame, blob, cfg.hist_bins, cfg.hist_lo_mm, cfg.hist_hi_mm);
    if (best_reference_correlation(hist, refs) < cfg.corr_threshold) continue;
    try {
      const auto head = split_head_mask(frame, blob, hist);
      const auto fit = fit_ellipse(head);
      const double depth = median_depth(frame, head);
      HeadDetection d;
      d.center_px = fit.center_px;
      d.center_room = pixel_to_room(fit.center_px.x, fit.center_px.y, depth, room);
      d.ellipse_major_px = fit.major_px;
      d.ellipse_minor_px = fit.minor_px;
      d.axis_angle_rad = fit.axis_angle_rad;
      d.head_top_depth_mm = depth;
      d.partial = blob.touches_border;
      d.border_distance_px = std::min({fit.center_px.x, fit.center_px.y, frame.width - 1 - fit.center_px.x,
                                       frame.height - 1 - fit.center_px.y});
      out.push_back(d);
    } catch (const NoHeadSplit&) {
    } catch (const DegenerateFit&) {
    } catch (const PreconditionError&) {
    }
  }
  return out;
}

// Plain-text reference table:
//
//   # comment lines
//   edges <e0> <e1> ... <eN>
//   ref <name> <c0> ... <cN-1>      (one line per reference)
struct ReferenceSet {
  std::vector<std::string> names;
  std::vector<DepthHistogram> histograms;
};

inline void write_reference_histograms(std::ostream& out, const ReferenceSet& refs) {
  if (refs.histograms.empty()) throw PreconditionError("write_reference_histograms: empty set");
  out << "# depth histograms of reference heads, counts per bin\n";
  out << "edges";
  for (double e : refs.histograms.front().edges()) out << " " << e;
  out << "\n";
  for (std::size_t i = 0; i < refs.histograms.size(); ++i) {
    out << "ref " << refs.names[i];
    for (auto c : refs.histograms[i].counts) out << " " << c;
    out << "\n";
  }
}

inline ReferenceSet read_reference_histograms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), "cannot open");
  ReferenceSet refs;
  std::vector<double> edges;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "edges") {
      double e;
      while (ls >> e) edges.push_back(e);
      if (edges.size() < 3) throw DataError(path.string(), "need at least 3 bin edges");
      const double w = (edges.back() - edges.front()) / static_cast<double>(edges.size() - 1);
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (std::abs(edges[i] - (edges.front() + static_cast<double>(i) * w)) > 1e-6 * std::max(1.0, w)) {
          throw DataError(path.string(), "bin edges are not uniform");
        }
      }
    } else if (tag == "ref") {
      if (edges.empty()) throw DataError(path.string(), "'ref' before 'edges'");
      std::string name;
      if (!(ls >> name)) throw DataError(path.string(), "missing reference name");
      DepthHistogram h{edges.front(), edges.back(), {}};
      std::int64_t c;
      while (ls >> c) {
        if (c < 0) throw DataError(path.string(), "negative count");
        h.counts.push_back(c);
      }
      if (h.counts.size() + 1 != edges.size()) {
        throw DataError(path.string(), "reference '" + name + "' has the wrong number of bins");
      }
      refs.names.push_back(name);
      refs.histograms.push_back(std::move(h));
    } else {
      throw DataError(path.string(), "unknown record '" + tag + "'");
    }
  }
  if (refs.histograms.empty()) throw DataError(path.string(), "no reference histograms");
  return refs;
}

}  // namespace foa

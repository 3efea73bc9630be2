#pragma once

// TSP with unit-disk neighborhoods: line-sweep maximal independent set,
// tangent-arc-tangent detour curves, alternating stitching of a center tour,
// and the Minkowski-sum area packing checker.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tspn/common.hpp"
#include "tspn/geom.hpp"
#include "tspn/point_tsp.hpp"

namespace tspn {

// ---- sweep independent set ----

struct SweepIndependentSet {
  std::vector<int> selected;            // disk indices in sweep order
  std::vector<std::pair<int, int>> cover_map;  // non-selected disk -> covering selected disk
};

// Greedy maximal independent set by coordinate sweep: repeatedly select the
// least disk along the axis and drop everything it intersects. Every removed
// disk meets the selected disk's far half-boundary, which the detour curves
// below rely on.
inline SweepIndependentSet sweep_independent_set(const std::vector<Ball>& disks, int axis) {
  if (disks.empty()) throw std::invalid_argument("sweep_independent_set: empty input");
  const int d = disks[0].dim();
  if (axis < 0 || axis >= d) throw std::invalid_argument("sweep_independent_set: bad axis");
  const double r = disks[0].radius;
  for (const auto& b : disks)
    if (std::fabs(b.radius - r) > 1e-9) throw std::invalid_argument("unit radii required");

  std::vector<int> order(disks.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Point& pa = disks[a].center;
    const Point& pb = disks[b].center;
    if (pa[axis] != pb[axis]) return pa[axis] < pb[axis];
    // ties: y first, then the remaining coordinates, then input index
    for (int c : {1, 0, 2}) {
      if (c >= d || c == axis) continue;
      if (pa[c] != pb[c]) return pa[c] < pb[c];
    }
    return a < b;
  });

  SweepIndependentSet out;
  std::vector<char> removed(disks.size(), 0);
  for (int idx : order) {
    if (removed[idx]) continue;
    out.selected.push_back(idx);
    removed[idx] = 1;
    for (int other : order) {
      if (removed[other]) continue;
      if (dist(disks[idx].center, disks[other].center) <= 2.0 * r + 1e-12) {
        removed[other] = 1;
        out.cover_map.push_back({other, idx});
      }
    }
  }
  return out;
}

// ---- the detour curve around a selected disk ----

struct GammaCurve {
  Point center;
  OpenPath polyline;      // tangent segment + sampled arc + tangent segment
  Point p_low, p_high;    // trimmed endpoints, both at x = center_x + 1/2
  double chord_length;    // |p_high - p_low| = 4 - sqrt 3
  double analytic_length; // 2 (pi/6 + sqrt 3 - 1)
};

// Tangent from below, a sixth of the circle symmetric about the sweep axis,
// tangent to above, with one unit of arclength trimmed at both ends. The arc
// is sampled with circumscribed (outward-tangent) chords so that any unit
// disk the true curve meets also meets the polyline.
inline GammaCurve gamma_curve(const Point& center) {
  if (dim_of(center) != 2) throw std::invalid_argument("gamma_curve: disks live in the plane");
  GammaCurve g;
  g.center = center;
  const double s3 = std::sqrt(3.0);
  g.p_low = {center[0] + 0.5, center[1] - 2.0 + s3 / 2.0};
  g.p_high = {center[0] + 0.5, center[1] + 2.0 - s3 / 2.0};
  g.chord_length = 4.0 - s3;
  g.analytic_length = 2.0 * (kPi / 6.0 + s3 - 1.0);

  // tangent touch points at -pi/6 and +pi/6
  Point t_low = {center[0] + s3 / 2.0, center[1] - 0.5};
  Point t_high = {center[0] + s3 / 2.0, center[1] + 0.5};
  auto& vs = g.polyline.vertices;
  vs.push_back(g.p_low);
  vs.push_back(t_low);
  // circumscribed arc: edges tangent at N+1 sample angles, vertices at the
  // tangent-line intersections (radius 1/cos(step/2), outward error <= 1e-4)
  const int N = 38;
  const double step = (kPi / 3.0) / N;
  const double rv = 1.0 / std::cos(step / 2.0);
  for (int i = 0; i < N; ++i) {
    double ang = -kPi / 6.0 + (i + 0.5) * step;
    vs.push_back({center[0] + rv * std::cos(ang), center[1] + rv * std::sin(ang)});
  }
  vs.push_back(t_high);
  vs.push_back(g.p_high);
  return g;
}

// ---- solve ----

enum class PointTspBackend { automatic, exact, mst_two_opt };

struct DiskTspResult {
  Tour tour;
  SweepIndependentSet independent;
  double backbone_length = 0;  // center-tour length over the independent set
  int k = 0;
  double alpha = 1.0;          // backend tour guarantee
  std::string backend;
  double ratio_budget = 0;     // 3.5465 alpha + 3.1984
  double additive_budget = 0;  // 8 alpha + 12.32
  double lower_bound = 0;
};

namespace ddetail {

inline Tour backend_tour(const std::vector<Point>& pts, PointTspBackend backend, double& alpha,
                         std::string& name) {
  bool exact = backend == PointTspBackend::exact ||
               (backend == PointTspBackend::automatic && pts.size() <= 13);
  if (exact && pts.size() > 16) throw std::invalid_argument("exact backend limited to 16 points");
  if (exact && pts.size() >= 2) {
    alpha = 1.0;
    name = "held_karp";
    return held_karp(pts);
  }
  alpha = 2.0;
  name = "mst_double_2opt";
  return mst_double_tour(pts);
}

}  // namespace ddetail

// Stitched disk tour: backbone segments between detour-curve endpoints (odd
// segments connect the high endpoints, even segments the low ones), each
// curve traversed alternately downward and upward; an odd cycle closes by
// running the first curve down and returning along its vertical chord.
inline DiskTspResult solve_disks(const std::vector<Ball>& disks,
                                 PointTspBackend backend = PointTspBackend::automatic,
                                 uint64_t seed = 0) {
  (void)seed;  // backends are deterministic
  if (disks.empty()) throw std::invalid_argument("solve_disks: empty input");
  if (disks[0].dim() != 2) throw std::invalid_argument("solve_disks: disks live in the plane");
  DiskTspResult res;
  res.independent = sweep_independent_set(disks, 0);
  const auto& sel = res.independent.selected;
  res.k = int(sel.size());

  std::vector<GammaCurve> curves;
  curves.reserve(sel.size());

  if (res.k == 1) {
    GammaCurve g = gamma_curve(disks[sel[0]].center);
    res.tour.vertices = g.polyline.vertices;  // closes p_high -> p_low via the chord
    res.backbone_length = 0;
    res.alpha = 1.0;
    res.backend = "none";
  } else {
    std::vector<Point> centers;
    for (int idx : sel) centers.push_back(disks[idx].center);
    Tour backbone = ddetail::backend_tour(centers, backend, res.alpha, res.backend);
    res.backbone_length = backbone.length();
    // curves in backbone order
    for (const Point& c : backbone.vertices) curves.push_back(gamma_curve(c));
    const int k = res.k;
    auto append_curve = [&](const GammaCurve& g, bool downward) {
      const auto& vs = g.polyline.vertices;
      if (downward)
        for (auto it = vs.rbegin(); it != vs.rend(); ++it) res.tour.vertices.push_back(*it);
      else
        for (const auto& v : vs) res.tour.vertices.push_back(v);
    };
    // Segment i (1-based, cyclic) joins curve i-1 to curve i%k: odd segments
    // connect the high endpoints, even segments the low ones. Curve i is
    // entered at the segment-i anchor and left at the segment-(i+1) anchor,
    // so each traversal runs the full curve in alternating directions; the
    // tour's implicit closing edge realizes segment k.
    if (k % 2 == 1) {
      // circular detour at the first curve: down the curve, back up its chord
      append_curve(curves[0], true);
      res.tour.vertices.push_back(curves[0].p_high);
    } else {
      append_curve(curves[0], false);  // arrive low (segment k), leave high (segment 1)
    }
    for (int i = 1; i < k; ++i) {
      bool arrive_high = (i % 2) == 1;
      append_curve(curves[i], arrive_high);
    }
    // drop consecutive duplicates
    std::vector<Point> cleaned;
    for (const auto& v : res.tour.vertices)
      if (cleaned.empty() || dist(cleaned.back(), v) > 1e-15) cleaned.push_back(v);
    while (cleaned.size() > 1 && dist(cleaned.front(), cleaned.back()) < 1e-15) cleaned.pop_back();
    res.tour.vertices = std::move(cleaned);
  }

  res.ratio_budget = 3.5465 * res.alpha + 3.1984;
  res.additive_budget = 8.0 * res.alpha + 12.32;
  // valid lower bounds: the packing count bound, and the center tour (scaled
  // by its guarantee) shortened by one radius-detour per selected disk
  double lb = std::max(0.0, (res.k - 4) * kPi / 4.0);
  if (res.k >= 2)
    lb = std::max(lb, res.backbone_length / res.alpha - 2.0 * res.k * disks[0].radius);
  res.lower_bound = lb;
  return res;
}

// ---- packing-area checker ----

// Monte-Carlo area of the Minkowski sum of a connected geometric graph with a
// radius-x disk, compared against the sweep bound 2 L x + pi x^2.
inline bool check_area_packing(const GeomGraph& graph, double x, int samples, uint64_t seed,
                               double* estimate_out = nullptr, double* bound_out = nullptr) {
  if (!graph.connected()) throw std::invalid_argument("check_area_packing: graph must be connected");
  if (graph.vertices.empty() || graph.vertices[0].size() != 2)
    throw std::invalid_argument("check_area_packing: planar graphs only");
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const auto& v : graph.vertices) {
    lo_x = std::min(lo_x, v[0]);
    hi_x = std::max(hi_x, v[0]);
    lo_y = std::min(lo_y, v[1]);
    hi_y = std::max(hi_y, v[1]);
  }
  lo_x -= x;
  hi_x += x;
  lo_y -= x;
  hi_y += x;
  double box_area = (hi_x - lo_x) * (hi_y - lo_y);
  Rng rng(mix_seed(seed, 0xA5EA));
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    Point p = {rng.uniform(lo_x, hi_x), rng.uniform(lo_y, hi_y)};
    if (graph.dist_to(p) <= x) ++hits;
  }
  double frac = double(hits) / samples;
  double est = box_area * frac;
  double sigma = box_area * std::sqrt(std::max(frac * (1 - frac), 1e-12) / samples);
  double bound = 2.0 * graph.length() * x + kPi * x * x;
  if (estimate_out) *estimate_out = est;
  if (bound_out) *bound_out = bound;
  return est <= bound + 3.0 * sigma;
}

// Converting a point-tour bound into a disk-tour bound costs at most one
// in-and-out detour of length 2r per disk.
inline double center_detour_bound(int n, double r) { return 2.0 * n * r; }

}  // namespace tspn

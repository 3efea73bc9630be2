#pragma once

// TSP with unit-ball neighborhoods in R^3: plane-sweep independent set, the
// 28-point detour lattice with its equal-edge Hamiltonian path, stitching of
// a center tour, the lattice coverage checker, and the Minkowski-sum volume
// packing checker.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tspn/common.hpp"
#include "tspn/disks.hpp"
#include "tspn/geom.hpp"
#include "tspn/point_tsp.hpp"

namespace tspn {

// ---- the lattice ----

struct GammaSet {
  std::vector<std::array<int, 3>> grid;  // coordinates in units of a = 1/sqrt 3
  std::vector<Point> points;             // grid * a
  std::vector<int> path;                 // Hamiltonian path, edges of length 2a
  double a = 0;

  Point point_at(const Point& center, int i) const {
    return {center[0] + points[i][0], center[1] + points[i][1], center[2] + points[i][2]};
  }
};

namespace bdetail {

inline bool hamiltonian_path(const std::vector<std::vector<int>>& adj, int from, int to,
                             std::vector<int>& path, std::vector<char>& used) {
  path.push_back(from);
  if (int(path.size()) == int(adj.size())) return from == to;
  used[from] = 1;
  for (int nxt : adj[from]) {
    if (used[nxt]) continue;
    if (nxt == to && int(path.size()) + 1 < int(adj.size())) continue;  // keep the end free
    if (hamiltonian_path(adj, nxt, to, path, used)) return true;
  }
  used[from] = 0;
  path.pop_back();
  return false;
}

}  // namespace bdetail

// The 28 lattice points: the full {-3,-1,1,3}^2 grid (times a = 1/sqrt 3) in
// the plane z = a, plus the same grid minus its four corners in the plane
// z = 3a. Neighbors at squared grid distance 4 are exactly 2a apart, and a
// Hamiltonian path from (-a,-3a,a) to (-a,-3a,3a) over those edges is found
// by backtracking.
inline const GammaSet& build_gamma() {
  static const GammaSet cached = [] {
    GammaSet g;
    g.a = 1.0 / std::sqrt(3.0);
    for (int kx : {-3, -1, 1, 3})
      for (int ky : {-3, -1, 1, 3}) g.grid.push_back({kx, ky, 1});
    for (int kx : {-3, -1, 1, 3})
      for (int ky : {-3, -1, 1, 3})
        if (!(std::abs(kx) == 3 && std::abs(ky) == 3)) g.grid.push_back({kx, ky, 3});
    const int n = int(g.grid.size());
    for (const auto& k : g.grid)
      g.points.push_back({k[0] * g.a, k[1] * g.a, k[2] * g.a});

    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        int dx = g.grid[i][0] - g.grid[j][0];
        int dy = g.grid[i][1] - g.grid[j][1];
        int dz = g.grid[i][2] - g.grid[j][2];
        if (dx * dx + dy * dy + dz * dz == 4) adj[i].push_back(j);
      }
    auto index_of = [&](int kx, int ky, int kz) {
      for (int i = 0; i < n; ++i)
        if (g.grid[i][0] == kx && g.grid[i][1] == ky && g.grid[i][2] == kz) return i;
      throw std::logic_error("lattice point missing");
    };
    int from = index_of(-1, -3, 1), to = index_of(-1, -3, 3);
    std::vector<char> used(n, 0);
    if (!bdetail::hamiltonian_path(adj, from, to, g.path, used))
      throw std::logic_error("lattice admits no equal-edge Hamiltonian path");
    return g;
  }();
  return cached;
}

// True iff a unit ball centered at `offset` (relative to the host ball's
// center, |offset| <= 2 and nonnegative z) contains a lattice point.
inline bool check_gamma_coverage(const Point& offset) {
  if (dim_of(offset) != 3) throw std::invalid_argument("check_gamma_coverage: R^3 offsets");
  if (norm(offset) > 2.0 + 1e-9 || offset[2] < -1e-9)
    throw std::invalid_argument("check_gamma_coverage: offset outside the admissible range");
  const GammaSet& g = build_gamma();
  for (const auto& p : g.points)
    if (dist(p, offset) <= 1.0 + 1e-9) return true;
  return false;
}

// ---- solve ----

struct BallTspResult {
  Tour tour;
  SweepIndependentSet independent;
  double backbone_length = 0;
  int k = 0;
  double alpha = 1.0;
  std::string backend;
  double ratio_budget = 0;      // 7 alpha + 54 sqrt 3
  double additive_budget = 0;   // 16 alpha + 144 sqrt 3
  double odd_k_surcharge = 0;   // one extra lattice-path traversal when k is odd
  double lower_bound = 0;
};

// Stitched ball tour: odd backbone segments connect the path's start anchors,
// even segments its end anchors, and each ball's 28 lattice points are
// visited by the path run forward or backward as the parities demand. Odd
// cycles traverse the first ball's path out and back, paying one extra path
// length in the additive budget.
inline BallTspResult solve_balls(const std::vector<Ball>& balls,
                                 PointTspBackend backend = PointTspBackend::automatic,
                                 uint64_t seed = 0) {
  (void)seed;
  if (balls.empty()) throw std::invalid_argument("solve_balls: empty input");
  if (balls[0].dim() != 3) throw std::invalid_argument("solve_balls: balls live in R^3");
  BallTspResult res;
  res.independent = sweep_independent_set(balls, 2);
  res.k = int(res.independent.selected.size());
  const GammaSet& g = build_gamma();
  const double path_len = (g.points.size() - 1) * 2.0 * g.a;  // 18 sqrt 3

  auto append_path = [&](const Point& center, bool forward) {
    if (forward)
      for (int idx : g.path) res.tour.vertices.push_back(g.point_at(center, idx));
    else
      for (auto it = g.path.rbegin(); it != g.path.rend(); ++it)
        res.tour.vertices.push_back(g.point_at(center, *it));
  };

  if (res.k == 1) {
    const Point& c = balls[res.independent.selected[0]].center;
    append_path(c, true);
    append_path(c, false);
    res.backbone_length = 0;
    res.alpha = 1.0;
    res.backend = "none";
    res.odd_k_surcharge = path_len;
  } else {
    std::vector<Point> centers;
    for (int idx : res.independent.selected) centers.push_back(balls[idx].center);
    Tour backbone = ddetail::backend_tour(centers, backend, res.alpha, res.backend);
    res.backbone_length = backbone.length();
    const int k = res.k;
    if (k % 2 == 1) {
      // out-and-back at the first ball: arrive and leave at the start anchor
      append_path(backbone.vertices[0], true);
      append_path(backbone.vertices[0], false);
      res.odd_k_surcharge = path_len;
    } else {
      // arrive via segment k (end anchor), leave via segment 1 (start anchor)
      append_path(backbone.vertices[0], false);
    }
    for (int i = 1; i < k; ++i) {
      bool arrive_start = (i % 2) == 1;  // odd segments join the start anchors
      append_path(backbone.vertices[i], arrive_start);
    }
    std::vector<Point> cleaned;
    for (const auto& v : res.tour.vertices)
      if (cleaned.empty() || dist(cleaned.back(), v) > 1e-15) cleaned.push_back(v);
    while (cleaned.size() > 1 && dist(cleaned.front(), cleaned.back()) < 1e-15) cleaned.pop_back();
    res.tour.vertices = std::move(cleaned);
  }

  const double s3 = std::sqrt(3.0);
  res.ratio_budget = 7.0 * res.alpha + 54.0 * s3;
  res.additive_budget = 16.0 * res.alpha + 144.0 * s3;
  double lb = std::max(0.0, (res.k - 8) / 3.0);
  if (res.k >= 2)
    lb = std::max(lb, res.backbone_length / res.alpha - 2.0 * res.k * balls[0].radius);
  res.lower_bound = lb;
  return res;
}

// Monte-Carlo volume of the Minkowski sum of a connected spatial graph with a
// radius-x ball, against the sweep bound pi x^2 L + (4 pi / 3) x^3.
inline bool check_volume_packing(const GeomGraph& graph, double x, int samples, uint64_t seed,
                                 double* estimate_out = nullptr, double* bound_out = nullptr) {
  if (!graph.connected()) throw std::invalid_argument("check_volume_packing: graph must be connected");
  if (graph.vertices.empty() || graph.vertices[0].size() != 3)
    throw std::invalid_argument("check_volume_packing: spatial graphs only");
  Point lo(3, 1e300), hi(3, -1e300);
  for (const auto& v : graph.vertices)
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], v[c] - x);
      hi[c] = std::max(hi[c], v[c] + x);
    }
  double box_vol = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  Rng rng(mix_seed(seed, 0xB0B0));
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    Point p = {rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]), rng.uniform(lo[2], hi[2])};
    if (graph.dist_to(p) <= x) ++hits;
  }
  double frac = double(hits) / samples;
  double est = box_vol * frac;
  double sigma = box_vol * std::sqrt(std::max(frac * (1 - frac), 1e-12) / samples);
  double bound = kPi * x * x * graph.length() + (4.0 * kPi / 3.0) * x * x * x;
  if (estimate_out) *estimate_out = est;
  if (bound_out) *bound_out = bound;
  return est <= bound + 3.0 * sigma;
}

}  // namespace tspn

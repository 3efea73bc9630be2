#pragma once

// Point-tour black boxes: exact Held-Karp for small n, MST-doubling with
// 2-opt for larger n, and an exact group-TSP used as a test oracle.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tspn/geom.hpp"

namespace tspn {

namespace tspdetail {

inline std::vector<double> pairwise(const std::vector<Point>& pts) {
  size_t n = pts.size();
  std::vector<double> d(n * n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = dist(pts[i], pts[j]);
  return d;
}

}  // namespace tspdetail

// Exact optimal closed tour over 2..16 points (bitmask DP).
inline Tour held_karp(const std::vector<Point>& pts) {
  const int n = int(pts.size());
  if (n < 2 || n > 16) throw std::invalid_argument("held_karp: 2 <= n <= 16 required");
  auto d = tspdetail::pairwise(pts);
  const uint32_t full = (n >= 2 ? (1u << (n - 1)) : 1u) - 1;  // subsets of {1..n-1}
  const double inf = std::numeric_limits<double>::infinity();
  // dp[mask][last]: shortest path 0 -> ... -> last visiting mask (over 1..n-1)
  std::vector<double> dp(size_t(full + 1) * (n - 1), inf);
  std::vector<int8_t> par(size_t(full + 1) * (n - 1), -1);
  for (int j = 1; j < n; ++j) dp[size_t(1u << (j - 1)) * (n - 1) + (j - 1)] = d[0 * n + j];
  for (uint32_t mask = 1; mask <= full; ++mask) {
    for (int j = 1; j < n; ++j) {
      if (!((mask >> (j - 1)) & 1u)) continue;
      double cur = dp[size_t(mask) * (n - 1) + (j - 1)];
      if (cur == inf) continue;
      uint32_t rest = full & ~mask;
      for (uint32_t m = rest; m; m &= m - 1) {
        int k = __builtin_ctz(m) + 1;
        uint32_t nm = mask | (1u << (k - 1));
        double cand = cur + d[size_t(j) * n + k];
        double& slot = dp[size_t(nm) * (n - 1) + (k - 1)];
        if (cand < slot) {
          slot = cand;
          par[size_t(nm) * (n - 1) + (k - 1)] = int8_t(j);
        }
      }
    }
  }
  double best = inf;
  int best_end = 1;
  for (int j = 1; j < n; ++j) {
    double cand = dp[size_t(full) * (n - 1) + (j - 1)] + d[size_t(j) * n + 0];
    if (cand < best) {
      best = cand;
      best_end = j;
    }
  }
  std::vector<int> order;
  uint32_t mask = full;
  int j = best_end;
  while (j != 0 && j != -1) {
    order.push_back(j);
    int p = par[size_t(mask) * (n - 1) + (j - 1)];
    mask &= ~(1u << (j - 1));
    j = p < 0 ? 0 : p;
  }
  order.push_back(0);
  std::reverse(order.begin(), order.end());
  Tour t;
  for (int idx : order) t.vertices.push_back(pts[idx]);
  return t;
}

namespace tspdetail {

inline double tour_len(const std::vector<int>& order, const std::vector<double>& d, int n) {
  double s = 0;
  for (size_t i = 0; i < order.size(); ++i)
    s += d[size_t(order[i]) * n + order[(i + 1) % order.size()]];
  return s;
}

// First-improvement 2-opt with a deterministic scan order.
inline void two_opt(std::vector<int>& order, const std::vector<double>& d, int n, int max_passes = 50) {
  const int m = int(order.size());
  if (m < 4) return;
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (int i = 0; i < m - 1; ++i) {
      for (int j = i + 2; j < m; ++j) {
        if (i == 0 && j == m - 1) continue;
        int a = order[i], b = order[i + 1];
        int c = order[j], e = order[(j + 1) % m];
        double delta = d[size_t(a) * n + c] + d[size_t(b) * n + e] -
                       d[size_t(a) * n + b] - d[size_t(c) * n + e];
        if (delta < -1e-12) {
          std::reverse(order.begin() + i + 1, order.begin() + j + 1);
          improved = true;
        }
      }
    }
    if (!improved) break;
  }
}

}  // namespace tspdetail

// MST doubling tour, improved by 2-opt passes. Length <= 2 x optimal.
inline Tour mst_double_tour(const std::vector<Point>& pts) {
  const int n = int(pts.size());
  if (n < 1) throw std::invalid_argument("mst_double_tour: need at least one point");
  Tour t;
  if (n == 1) {
    t.vertices = pts;
    return t;
  }
  auto d = tspdetail::pairwise(pts);
  // Prim
  std::vector<int> parent(n, -1);
  std::vector<double> key(n, std::numeric_limits<double>::infinity());
  std::vector<bool> in(n, false);
  key[0] = 0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int i = 0; i < n; ++i)
      if (!in[i] && (u < 0 || key[i] < key[u])) u = i;
    in[u] = true;
    for (int v = 0; v < n; ++v)
      if (!in[v] && d[size_t(u) * n + v] < key[v]) {
        key[v] = d[size_t(u) * n + v];
        parent[v] = u;
      }
  }
  std::vector<std::vector<int>> kids(n);
  for (int v = 1; v < n; ++v) kids[parent[v]].push_back(v);
  // preorder walk = doubled-tree shortcut
  std::vector<int> order;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    order.push_back(u);
    for (auto it = kids[u].rbegin(); it != kids[u].rend(); ++it) stack.push_back(*it);
  }
  tspdetail::two_opt(order, d, n);
  for (int idx : order) t.vertices.push_back(pts[idx]);
  return t;
}

// Exact minimum closed tour visiting at least one point per group.
// DP over (group subset, last point), start point enumerated over group 0.
inline Tour group_tsp_exact(const std::vector<std::vector<Point>>& groups) {
  const int g = int(groups.size());
  if (g < 1) throw std::invalid_argument("group_tsp_exact: no groups");
  size_t total = 0;
  for (auto& gr : groups) {
    if (gr.empty()) throw std::invalid_argument("group_tsp_exact: empty group");
    total += gr.size();
  }
  if (g > 10 || total > 640) throw std::invalid_argument("group_tsp_exact: limits exceeded");

  if (g == 1) {
    Tour t;
    t.vertices.push_back(groups[0][0]);
    return t;
  }

  // flatten groups 1..g-1
  std::vector<Point> pts;
  std::vector<int> grp_of;
  std::vector<int> offset(g, 0);
  for (int gi = 1; gi < g; ++gi) {
    offset[gi] = int(pts.size());
    for (auto& p : groups[gi]) {
      pts.push_back(p);
      grp_of.push_back(gi - 1);  // bit index
    }
  }
  const int P = int(pts.size());
  const uint32_t full = (1u << (g - 1)) - 1;
  const double inf = std::numeric_limits<double>::infinity();

  double best = inf;
  Point best_start;
  std::vector<int> best_order;  // flattened indices, start excluded

  std::vector<double> dp(size_t(full + 1) * P);
  std::vector<int32_t> par(size_t(full + 1) * P);

  for (const Point& s : groups[0]) {
    std::fill(dp.begin(), dp.end(), inf);
    std::fill(par.begin(), par.end(), -1);
    for (int p = 0; p < P; ++p) {
      uint32_t m = 1u << grp_of[p];
      double cand = dist(s, pts[p]);
      if (cand < dp[size_t(m) * P + p]) dp[size_t(m) * P + p] = cand;
    }
    for (uint32_t mask = 1; mask < full; ++mask) {
      for (int p = 0; p < P; ++p) {
        if (!((mask >> grp_of[p]) & 1u)) continue;
        double cur = dp[size_t(mask) * P + p];
        if (cur == inf) continue;
        for (int q = 0; q < P; ++q) {
          uint32_t bit = 1u << grp_of[q];
          if (mask & bit) continue;
          uint32_t nm = mask | bit;
          double cand = cur + dist(pts[p], pts[q]);
          double& slot = dp[size_t(nm) * P + q];
          if (cand < slot) {
            slot = cand;
            par[size_t(nm) * P + q] = p;
          }
        }
      }
    }
    for (int p = 0; p < P; ++p) {
      double cand = dp[size_t(full) * P + p];
      if (cand == inf) continue;
      cand += dist(pts[p], s);
      if (cand < best) {
        best = cand;
        best_start = s;
        best_order.clear();
        uint32_t mask = full;
        int q = p;
        while (q >= 0) {
          best_order.push_back(q);
          int pq = par[size_t(mask) * P + q];
          mask &= ~(1u << grp_of[q]);
          q = pq;
        }
        std::reverse(best_order.begin(), best_order.end());
      }
    }
  }
  if (best == inf) throw std::runtime_error("group_tsp_exact: no feasible tour");
  Tour t;
  t.vertices.push_back(best_start);
  for (int idx : best_order) t.vertices.push_back(pts[idx]);
  return t;
}

}  // namespace tspn

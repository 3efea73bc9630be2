#pragma once

// Brute-force oracles used by the test suites. Everything here is
// deliberately independent of the library's solver paths: grid searches,
// exhaustive enumeration, and Monte-Carlo estimates only.

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "tspn/geom.hpp"
#include "tspn/lines.hpp"
#include "tspn/lp.hpp"

namespace testutil {

using tspn::Line;
using tspn::Point;
using tspn::Rng;

inline Point random_point(int d, Rng& rng, double range = 10.0) {
  Point p(d);
  for (double& x : p) x = rng.uniform(-range, range);
  return p;
}

inline Line random_line(int d, Rng& rng, double range = 10.0) {
  return Line(random_point(d, rng, range), tspn::Direction(tspn::random_unit_vector(d, rng)));
}

// Exact distance from a point to a line by projection; elementary enough to
// serve inside grid oracles without touching the code paths under test.
inline double point_line_dist(const Point& p, const Line& l) {
  double t = tspn::dot(tspn::sub(p, l.anchor), l.dir.unit);
  return tspn::dist(p, l.at(t));
}

// Distance between two lines: 1-d parameter grid over the first line,
// analytic projection onto the second, refined around the incumbent. The
// section is convex in the grid parameter, so refinement cannot lose the
// basin (a joint 2-d grid can stall in the diagonal valley of near-parallel
// pairs).
inline double grid_line_distance(const Line& a, const Line& b) {
  double lo_s = -400, hi_s = 400;
  double best = std::numeric_limits<double>::infinity();
  double bs = 0;
  for (int round = 0; round < 16; ++round) {
    const int N = 64;
    for (int i = 0; i <= N; ++i) {
      double s = lo_s + (hi_s - lo_s) * i / N;
      double d = point_line_dist(a.at(s), b);
      if (d < best) {
        best = d;
        bs = s;
      }
    }
    double span = (hi_s - lo_s) / N * 2.5;
    lo_s = bs - span;
    hi_s = bs + span;
  }
  return best;
}

// Distance between a segment and a line by the same 1-d refinement over the
// segment parameter.
inline double grid_segment_line_distance(const Point& a, const Point& b, const Line& l) {
  double lo_s = 0, hi_s = 1;
  double best = std::numeric_limits<double>::infinity();
  double bs = 0;
  Point ab = tspn::sub(b, a);
  for (int round = 0; round < 14; ++round) {
    const int N = 64;
    for (int i = 0; i <= N; ++i) {
      double s = lo_s + (hi_s - lo_s) * i / N;
      double d = point_line_dist(tspn::axpy(a, s, ab), l);
      if (d < best) {
        best = d;
        bs = s;
      }
    }
    double span = (hi_s - lo_s) / N * 2.5;
    lo_s = std::max(0.0, bs - span);
    hi_s = std::min(1.0, bs + span);
  }
  return best;
}

// Grid sampling of a hyperplane patch around its closest point to the origin.
inline std::vector<Point> sample_plane(const tspn::Hyperplane& pl, double half_extent, int per_axis) {
  const int d = pl.dim();
  // orthonormal basis of the plane by Gram-Schmidt against the normal
  std::vector<Point> basis;
  for (int i = 0; i < d && int(basis.size()) < d - 1; ++i) {
    Point e(d, 0.0);
    e[i] = 1.0;
    Point w = e;
    double pn = tspn::dot(w, pl.normal);
    w = tspn::axpy(w, -pn, pl.normal);
    for (const auto& b : basis) w = tspn::axpy(w, -tspn::dot(w, b), b);
    double nn = tspn::norm(w);
    if (nn > 1e-6) basis.push_back(tspn::scale(w, 1.0 / nn));
  }
  Point origin = tspn::scale(pl.normal, pl.offset);
  std::vector<Point> pts;
  if (int(basis.size()) == 1) {
    for (int i = 0; i < per_axis * per_axis; ++i)
      pts.push_back(tspn::axpy(origin, -half_extent + 2 * half_extent * i / (per_axis * per_axis - 1.0), basis[0]));
    return pts;
  }
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      double a = -half_extent + 2 * half_extent * i / (per_axis - 1.0);
      double b = -half_extent + 2 * half_extent * j / (per_axis - 1.0);
      pts.push_back(tspn::axpy(tspn::axpy(origin, a, basis[0]), b, basis[1]));
    }
  return pts;
}

// Exact closed-tour optimum by cyclic permutation enumeration (n <= 9).
inline double brute_force_tsp(const std::vector<Point>& pts) {
  const int n = int(pts.size());
  if (n <= 2) return n == 2 ? 2.0 * tspn::dist(pts[0], pts[1]) : 0.0;
  std::vector<int> perm(n - 1);
  for (int i = 0; i < n - 1; ++i) perm[i] = i + 1;
  double best = std::numeric_limits<double>::infinity();
  do {
    if (perm.front() > perm.back()) continue;  // halve by direction symmetry
    double len = tspn::dist(pts[0], pts[perm[0]]);
    for (int i = 0; i + 1 < n - 1; ++i) len += tspn::dist(pts[perm[i]], pts[perm[i + 1]]);
    len += tspn::dist(pts[perm[n - 2]], pts[0]);
    best = std::min(best, len);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Exact group Steiner optimum by enumerating vertex subsets and taking the
// minimum spanning tree of each induced subgraph that covers every group
// while connected. Every tree spans its own vertex set, so the minimum over
// subsets equals the group Steiner optimum. Usable up to ~16 vertices.
inline double group_steiner_brute(const tspn::GroupGraph& g) {
  const int V = int(g.vertices.size());
  const int ng = int(g.groups.size());
  if (V > 20) throw std::invalid_argument("group_steiner_brute: too many vertices");
  std::vector<uint32_t> vmask(V, 0);
  for (int gi = 0; gi < ng; ++gi)
    for (int v : g.groups[gi]) vmask[v] |= 1u << gi;
  const uint32_t full = (1u << ng) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> w(size_t(V) * V, inf);
  for (const auto& e : g.edges) {
    w[size_t(e.u) * V + e.v] = std::min(w[size_t(e.u) * V + e.v], e.w);
    w[size_t(e.v) * V + e.u] = std::min(w[size_t(e.v) * V + e.u], e.w);
  }
  double best = inf;
  for (uint32_t s = 1; s < (1u << V); ++s) {
    uint32_t cover = 0;
    for (int v = 0; v < V; ++v)
      if ((s >> v) & 1u) cover |= vmask[v];
    if (cover != full) continue;
    // Prim over the subset
    std::vector<int> members;
    for (int v = 0; v < V; ++v)
      if ((s >> v) & 1u) members.push_back(v);
    const int m = int(members.size());
    std::vector<double> key(m, inf);
    std::vector<char> used(m, 0);
    key[0] = 0;
    double total = 0;
    bool connected = true;
    for (int it = 0; it < m; ++it) {
      int u = -1;
      for (int i = 0; i < m; ++i)
        if (!used[i] && (u < 0 || key[i] < key[u])) u = i;
      if (key[u] == inf) {
        connected = false;
        break;
      }
      used[u] = 1;
      total += key[u];
      if (total >= best) break;  // prune
      for (int i = 0; i < m; ++i)
        if (!used[i]) key[i] = std::min(key[i], w[size_t(members[u]) * V + members[i]]);
    }
    if (connected && total < best) best = total;
  }
  return best;
}

// Random small group graph for oracle comparisons: geometric points, a random
// spanning tree plus extra edges, groups assigned round-robin with occasional
// double membership.
inline tspn::GroupGraph random_group_graph(int V, int ng, Rng& rng) {
  ng = std::min(ng, V);  // every group must end up nonempty
  tspn::GroupGraph g;
  for (int v = 0; v < V; ++v) g.vertices.push_back({random_point(2, rng, 10.0), {}, {}});
  for (int v = 1; v < V; ++v) {
    int u = rng.uniform_int(v);
    g.edges.push_back({u, v, tspn::dist(g.vertices[u].p, g.vertices[v].p), tspn::EdgeKind::spanner, -1});
  }
  int extra = rng.uniform_int(V);
  for (int e = 0; e < extra; ++e) {
    int u = rng.uniform_int(V), v = rng.uniform_int(V);
    if (u == v) continue;
    g.edges.push_back({u, v, tspn::dist(g.vertices[u].p, g.vertices[v].p), tspn::EdgeKind::spanner, -1});
  }
  g.groups.assign(ng, {});
  for (int v = 0; v < V; ++v) {
    int gi = v % ng;
    g.groups[gi].push_back(v);
    g.vertices[v].lines.push_back(gi);
    if (rng.uniform() < 0.2) {
      int gj = rng.uniform_int(ng);
      bool dup = false;
      for (int l : g.vertices[v].lines) dup |= (l == gj);
      if (!dup) {
        g.groups[gj].push_back(v);
        g.vertices[v].lines.push_back(gj);
      }
    }
  }
  g.build_adjacency();
  return g;
}

// ---- LP oracles ----

// Random program with explicit +-R box rows appended, so it is always
// bounded; total row count includes the box.
inline tspn::LinearProgram random_bounded_lp(int v, int total_rows, Rng& rng) {
  tspn::LinearProgram lp;
  lp.num_vars = v;
  lp.objective.resize(v);
  for (double& c : lp.objective) c = rng.uniform(-1, 1);
  int user = std::max(0, total_rows - 2 * v);
  for (int i = 0; i < user; ++i) {
    std::vector<double> a(v);
    for (double& x : a) x = rng.uniform(-1, 1);
    lp.add_constraint(std::move(a), rng.uniform(-2, 6));
  }
  const double R = 20.0;
  for (int j = 0; j < v; ++j) {
    std::vector<double> a(v, 0.0), b(v, 0.0);
    a[j] = 1.0;
    b[j] = -1.0;
    lp.add_constraint(std::move(a), R);
    lp.add_constraint(std::move(b), R);
  }
  return lp;
}

namespace lporacle {

inline bool solve_square(std::vector<double> a, std::vector<double> b, std::vector<double>& x, int n) {
  x.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(a[size_t(i) * n + k]) > std::fabs(a[size_t(p) * n + k])) p = i;
    if (std::fabs(a[size_t(p) * n + k]) < 1e-10) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[size_t(p) * n + j], a[size_t(k) * n + j]);
      std::swap(b[p], b[k]);
    }
    for (int i = k + 1; i < n; ++i) {
      double f = a[size_t(i) * n + k] / a[size_t(k) * n + k];
      for (int j = k; j < n; ++j) a[size_t(i) * n + j] -= f * a[size_t(k) * n + j];
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[size_t(i) * n + j] * x[j];
    x[i] = s / a[size_t(i) * n + i];
  }
  return true;
}

}  // namespace lporacle

// Minimum objective over all basic solutions (v-subsets of rows taken as
// equalities, kept if feasible for every row). +inf when infeasible.
inline double enumerate_lp_optimum(const tspn::LinearProgram& lp) {
  const int v = lp.num_vars;
  const int n = int(lp.constraints.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(v);
  for (int i = 0; i < v; ++i) idx[i] = i;
  std::vector<double> A(size_t(v) * v), b(v), x;
  while (true) {
    A.assign(size_t(v) * v, 0.0);
    for (int r = 0; r < v; ++r) {
      const auto& [coef, bound] = lp.constraints[idx[r]];
      for (int j = 0; j < v; ++j) A[size_t(r) * v + j] = coef[j];
      b[r] = bound;
    }
    if (lporacle::solve_square(A, b, x, v)) {
      bool ok = true;
      for (const auto& [coef, bound] : lp.constraints) {
        double s = 0;
        for (int j = 0; j < v; ++j) s += coef[j] * x[j];
        if (s > bound + 1e-7 * (1.0 + std::fabs(bound))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        double val = 0;
        for (int j = 0; j < v; ++j) val += lp.objective[j] * x[j];
        best = std::min(best, val);
      }
    }
    // next combination
    int pos = v - 1;
    while (pos >= 0 && idx[pos] == n - v + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int r = pos + 1; r < v; ++r) idx[r] = idx[r - 1] + 1;
  }
  return best;
}

// Program engineered around a chosen optimal vertex: v active rows whose
// nonnegative combination is -objective (KKT), plus loose filler rows.
inline std::pair<tspn::LinearProgram, double> lp_with_known_optimum(int v, int n, Rng& rng) {
  tspn::LinearProgram lp;
  lp.num_vars = v;
  std::vector<double> xstar(v);
  for (double& x : xstar) x = rng.uniform(-5, 5);
  std::vector<std::vector<double>> active;
  std::vector<double> c(v, 0.0);
  for (int i = 0; i < v; ++i) {
    std::vector<double> a(v);
    for (double& x : a) x = rng.uniform(-1, 1);
    double nn = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
    for (double& x : a) x /= nn;
    double lambda = rng.uniform(0.2, 2.0);
    for (int j = 0; j < v; ++j) c[j] -= lambda * a[j];
    active.push_back(a);
  }
  lp.objective = c;
  for (auto& a : active) {
    double bound = std::inner_product(a.begin(), a.end(), xstar.begin(), 0.0);
    lp.add_constraint(std::move(a), bound);
  }
  for (int i = v; i < n; ++i) {
    std::vector<double> a(v);
    for (double& x : a) x = rng.uniform(-1, 1);
    double bound = std::inner_product(a.begin(), a.end(), xstar.begin(), 0.0) + rng.uniform(0.05, 8.0);
    lp.add_constraint(std::move(a), bound);
  }
  double opt = std::inner_product(c.begin(), c.end(), xstar.begin(), 0.0);
  return {std::move(lp), opt};
}

// ---- minimum-perimeter-box oracles ----

inline bool box_touches_all(const std::vector<double>& lo, const std::vector<double>& hi,
                            const std::vector<tspn::Hyperplane>& planes) {
  int d = int(lo.size());
  for (const auto& pl : planes) {
    double emin = 0, emax = 0;
    for (int j = 0; j < d; ++j) {
      double a = pl.normal[j] * lo[j], b = pl.normal[j] * hi[j];
      emin += std::min(a, b);
      emax += std::max(a, b);
    }
    if (pl.offset < emin - 1e-9 || pl.offset > emax + 1e-9) return false;
  }
  return true;
}

// Multiresolution coordinate-grid search over axis-aligned boxes (identity
// frame): a 7^(2d) stencil shrinks around the incumbent, with restarts from
// the incumbent at a coarser span to shake off pattern-search stalls.
inline double zoom_grid_min_box(const std::vector<tspn::Hyperplane>& planes, double span0) {
  const int d = planes[0].dim();
  const int v = 2 * d;
  const int K = 7;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_z(v, 0.0);
  std::vector<int> digits(v, 0);

  auto sweep = [&](std::vector<double> center, double span) {
    int rounds_left = 60;
    while (rounds_left-- > 0 && span > 1e-5) {
      double before = best;
      std::fill(digits.begin(), digits.end(), 0);
      while (true) {
        std::vector<double> z(v);
        for (int j = 0; j < v; ++j) z[j] = center[j] + span * (digits[j] - K / 2) / (K / 2);
        bool shape_ok = true;
        for (int j = 0; j < d; ++j)
          if (z[j] > z[d + j]) {
            shape_ok = false;
            break;
          }
        if (shape_ok) {
          std::vector<double> lo(z.begin(), z.begin() + d), hi(z.begin() + d, z.end());
          if (box_touches_all(lo, hi, planes)) {
            double obj = 0;
            for (int j = 0; j < d; ++j) obj += hi[j] - lo[j];
            if (obj < best) {
              best = obj;
              best_z = z;
            }
          }
        }
        int pos = v - 1;
        while (pos >= 0 && digits[pos] == K - 1) digits[pos--] = 0;
        if (pos < 0) break;
        ++digits[pos];
      }
      center = best_z;
      // compass-style schedule: hold the scale while it keeps paying off
      if (best > before - span * 1e-3) span *= 0.55;
    }
  };

  // random-direction line search from the incumbent; escapes axis-stencil
  // stalls on correlated descent directions (convex feasible set, so any
  // improving direction is eventually sampled)
  auto ray_polish = [&](uint64_t seed, int tries) {
    tspn::Rng rng(seed);
    for (int t = 0; t < tries; ++t) {
      std::vector<double> dir(v);
      double nn = 0;
      for (double& u : dir) {
        u = rng.normal();
        nn += u * u;
      }
      nn = std::sqrt(nn);
      for (double& u : dir) u /= nn;
      double step = span0;
      while (step > 1e-7) {
        std::vector<double> z(v);
        for (int j = 0; j < v; ++j) z[j] = best_z[j] + step * dir[j];
        bool ok = true;
        for (int j = 0; j < d; ++j)
          if (z[j] > z[d + j]) ok = false;
        double obj = 0;
        if (ok) {
          std::vector<double> lo(z.begin(), z.begin() + d), hi(z.begin() + d, z.end());
          ok = box_touches_all(lo, hi, planes);
          for (int j = 0; j < d; ++j) obj += hi[j] - lo[j];
        }
        if (ok && obj < best) {
          best = obj;
          best_z = z;
        } else {
          step *= 0.5;
        }
      }
    }
  };

  sweep(best_z, span0);
  for (int round = 0; round < 4; ++round) {
    ray_polish(0xD1CE + round, 1500);
    std::vector<double> c = best_z;
    sweep(c, span0 / (3 << round));
  }
  return best;
}

// Independent reconstruction of the minimum-perimeter-box program in the
// identity frame (variables lo..., hi...), for enumeration oracles.
inline tspn::LinearProgram box_lp_for(const std::vector<tspn::Hyperplane>& planes) {
  const int d = planes[0].dim();
  const int v = 2 * d;
  tspn::LinearProgram lp;
  lp.num_vars = v;
  lp.objective.assign(v, 0.0);
  for (int j = 0; j < d; ++j) {
    lp.objective[j] = -1.0;
    lp.objective[d + j] = 1.0;
    std::vector<double> cpl(v, 0.0);
    cpl[j] = 1.0;
    cpl[d + j] = -1.0;
    lp.add_constraint(std::move(cpl), 0.0);
  }
  for (const auto& pl : planes) {
    std::vector<double> nr = pl.normal;
    double off = pl.offset;
    if (nr[d - 1] < 0) {
      for (double& x : nr) x = -x;
      off = -off;
    }
    std::vector<double> rs(v, 0.0), rt(v, 0.0);
    for (int j = 0; j < d; ++j) {
      bool pos = nr[j] >= 0;
      rs[pos ? j : d + j] += nr[j];
      rt[pos ? d + j : j] -= nr[j];
    }
    lp.add_constraint(std::move(rs), off);
    lp.add_constraint(std::move(rt), -off);
  }
  return lp;
}

// KKT certificate for a solved box: rebuild the rows, collect tight ones, and
// look for a nonnegative multiplier subset reproducing the objective.
inline bool box_lp_duality_holds(const std::vector<tspn::Hyperplane>& planes,
                                 const tspn::OrientedBox& box) {
  const int d = box.dim();
  const int v = 2 * d;
  std::vector<std::pair<std::vector<double>, double>> rows;
  for (int j = 0; j < d; ++j) {
    std::vector<double> a(v, 0.0);
    a[j] = 1.0;
    a[d + j] = -1.0;
    rows.emplace_back(std::move(a), 0.0);
  }
  for (const auto& pl : planes) {
    Point nr = box.frame.apply(pl.normal);
    double off = pl.offset;
    if (nr[d - 1] < 0) {
      nr = tspn::scale(nr, -1.0);
      off = -off;
    }
    std::vector<double> rs(v + 0, 0.0), rt(v, 0.0);
    for (int j = 0; j < d; ++j) {
      bool pos = nr[j] >= 0;
      rs[pos ? j : d + j] += nr[j];
      rt[pos ? d + j : j] -= nr[j];
    }
    rows.emplace_back(std::move(rs), off);
    rows.emplace_back(std::move(rt), -off);
  }
  std::vector<double> x(v);
  for (int j = 0; j < d; ++j) {
    x[j] = box.lo[j];
    x[d + j] = box.hi[j];
  }
  std::vector<int> tight;
  for (size_t i = 0; i < rows.size(); ++i) {
    double s = 0;
    for (int j = 0; j < v; ++j) s += rows[i].first[j] * x[j];
    if (std::fabs(s - rows[i].second) <= 1e-6 * (1.0 + std::fabs(rows[i].second)))
      tight.push_back(int(i));
    else if (s > rows[i].second)
      return false;  // primal infeasible
  }
  // KKT stationarity for min c.x over Ax <= b reads A^T lambda = -c with
  // lambda >= 0 on tight rows; c here is the width-sum objective.
  std::vector<double> c(v);
  for (int j = 0; j < d; ++j) {
    c[j] = 1.0;    // -(-1)
    c[d + j] = -1.0;
  }
  // The optimum need not be a vertex, so subsets of every size up to v are
  // tried via least squares on the normal equations.
  const int T = int(tight.size());
  int budget = 20000;
  for (int s = 1; s <= std::min(v, T); ++s) {
    std::vector<int> idx(s);
    for (int i = 0; i < s; ++i) idx[i] = i;
    while (budget-- > 0) {
      // least squares: minimize |B lambda - c| with B = rows^T (v x s)
      std::vector<double> G(size_t(s) * s, 0.0), rhs(s, 0.0), lam;
      for (int a = 0; a < s; ++a) {
        const auto& ra = rows[tight[idx[a]]].first;
        for (int b2 = 0; b2 < s; ++b2) {
          const auto& rb = rows[tight[idx[b2]]].first;
          double g = 0;
          for (int j = 0; j < v; ++j) g += ra[j] * rb[j];
          G[size_t(a) * s + b2] = g;
        }
        double r = 0;
        for (int j = 0; j < v; ++j) r += ra[j] * c[j];
        rhs[a] = r;
      }
      if (lporacle::solve_square(G, rhs, lam, s)) {
        bool nonneg = true;
        for (double l : lam)
          if (l < -1e-6) nonneg = false;
        if (nonneg) {
          std::vector<double> resid = c;
          for (int a = 0; a < s; ++a)
            for (int j = 0; j < v; ++j) resid[j] -= lam[a] * rows[tight[idx[a]]].first[j];
          double rn = 0;
          for (double r : resid) rn = std::max(rn, std::fabs(r));
          if (rn < 1e-5) return true;
        }
      }
      int pos = s - 1;
      while (pos >= 0 && idx[pos] == T - s + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int r = pos + 1; r < s; ++r) idx[r] = idx[r - 1] + 1;
    }
  }
  return false;
}

}  // namespace testutil

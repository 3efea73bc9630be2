#pragma once

// TSP with hyperplane neighborhoods: orientation nets over box orientations,
// the per-orientation minimum-perimeter-box linear program, and the box tour
// with its certified ratio budget.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tspn/common.hpp"
#include "tspn/geom.hpp"
#include "tspn/lp.hpp"

namespace tspn {

// ---- orientation net ----

struct OrientationNet {
  std::vector<Rotation> rotations;
  double angular_resolution = 0;  // grid spacing (radians)
  double eps = 0;
  int d = 0;
};

namespace hdetail {

// A frame vector lying numerically on a coordinate axis breaks the sign
// conventions of the box LP; nudge such frames by a fixed tiny rotation.
inline void perturb_axis_parallel(Rotation& r) {
  bool hit = false;
  for (double v : r.m)
    if (std::fabs(v) >= 1.0 - 5e-15) {
      hit = true;
      break;
    }
  if (!hit) return;
  if (r.d == 2) {
    r = rotation_2d(1e-6).compose(r);
  } else if (r.d == 3) {
    static const Point axis = {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)};
    r = rotation_axis_angle(axis, 1e-6).compose(r);
  } else {
    // compose with a fixed small planar rotation in the first two coordinates
    Rotation t = Rotation::identity(r.d);
    double c = std::cos(1e-6), s = std::sin(1e-6);
    t.at(0, 0) = c; t.at(0, 1) = -s; t.at(1, 0) = s; t.at(1, 1) = c;
    r = t.compose(r);
  }
}

// Lazy Euler Z-Y-Z grid over box orientations in 3-D, for frames used as
// world->box maps (box axes are the matrix rows). Left-multiplying by a box
// symmetry shifts alpha, so the 4-fold spin about the box's own third axis
// reduces alpha to a quarter turn, and picking the row closest to the world
// z-axis as the third axis caps beta at acos(1/sqrt 3). Gamma (the world
// azimuth) keeps its full turn but thins by sin(beta): near the pole the
// alpha grid absorbs the degenerate combination. Covering radius stays below
// eps/2 (the Monte-Carlo covering test pins this down).
struct EulerGrid {
  double h = 0;
  int n_alpha = 0;
  struct Row {
    double beta;
    int n_gamma;
    uint64_t base;
  };
  std::vector<Row> rows;
  uint64_t total = 0;

  static EulerGrid make(double eps) {
    EulerGrid g;
    g.h = eps / 2.0;
    g.n_alpha = int(std::ceil((kPi / 2.0) / g.h));
    const double beta_cap = std::acos(1.0 / std::sqrt(3.0)) + g.h;
    for (int bi = 0;; ++bi) {
      double beta = (bi + 0.5) * g.h;
      if (beta > beta_cap) break;
      int ng = std::max(1, int(std::ceil(2.0 * kPi * std::sin(beta) / g.h)));
      g.rows.push_back({beta, ng, g.total});
      g.total += uint64_t(g.n_alpha) * ng;
    }
    return g;
  }

  uint64_t size() const { return total; }

  Rotation rotation(uint64_t idx) const {
    size_t lo = 0, hi = rows.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (rows[mid].base <= idx)
        lo = mid;
      else
        hi = mid - 1;
    }
    const Row& row = rows[lo];
    uint64_t within = idx - row.base;
    int ai = int(within / row.n_gamma);
    int gi = int(within % row.n_gamma);
    double alpha = (ai + 0.5) * (kPi / 2.0) / n_alpha;
    double gamma = (gi + 0.5) * 2.0 * kPi / row.n_gamma;
    Rotation r = rotation_zyz(alpha, row.beta, gamma);
    perturb_axis_parallel(r);
    return r;
  }
};

}  // namespace hdetail

// Net covering all box orientations within an angular error of eps/(d-1).
// d=2: a planar angle grid at spacing eps. d=3: the symmetry-reduced Euler
// grid above. d=4,5: a seeded random rotation sample (no covering
// certificate; the per-instance ratio certificate below does not need one).
inline OrientationNet build_orientation_net(int d, double eps) {
  if (d < 2 || d > 5) throw std::invalid_argument("build_orientation_net: 2 <= d <= 5");
  if (!(eps > 0.0 && eps < 1.0) && !(d == 2 && eps > 0.0 && eps < 2.0 * kPi))
    throw std::invalid_argument("build_orientation_net: eps out of range");
  OrientationNet net;
  net.d = d;
  net.eps = eps;
  if (d == 2) {
    int m = int(std::ceil(2.0 * kPi / eps));
    net.angular_resolution = eps;
    net.rotations.reserve(m);
    for (int k = 0; k < m; ++k) {
      Rotation r = rotation_2d(k * eps);
      hdetail::perturb_axis_parallel(r);
      net.rotations.push_back(std::move(r));
    }
  } else if (d == 3) {
    auto grid = hdetail::EulerGrid::make(eps);
    net.angular_resolution = grid.h;
    if (grid.size() > 8'000'000ULL)
      throw std::invalid_argument("build_orientation_net: net too large to materialize at this eps");
    net.rotations.reserve(grid.size());
    for (uint64_t i = 0; i < grid.size(); ++i) net.rotations.push_back(grid.rotation(i));
  } else {
    int m = std::clamp(int(std::ceil(std::pow(eps, 1 - d))), 8, 20000);
    net.angular_resolution = eps;
    Rng rng(mix_seed(0xA11CEULL, uint64_t(d)));
    net.rotations.reserve(m + 1);
    Rotation id = Rotation::identity(d);
    hdetail::perturb_axis_parallel(id);
    net.rotations.push_back(id);
    for (int i = 0; i < m; ++i) {
      Rotation r = random_rotation(d, rng);
      hdetail::perturb_axis_parallel(r);
      net.rotations.push_back(std::move(r));
    }
  }
  return net;
}

// Distance between two frames as box orientations: best matching of axis
// directions over index permutations, sign-blind.
inline double box_orientation_distance(const Rotation& a, const Rotation& b) {
  int d = a.d;
  std::vector<double> M(size_t(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0;
      for (int k = 0; k < d; ++k) s += a.at(i, k) * b.at(j, k);
      M[size_t(i) * d + j] = std::min(1.0, std::fabs(s));
    }
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  double best = kPi;
  do {
    double worst = 0;
    for (int i = 0; i < d; ++i) worst = std::max(worst, std::acos(M[size_t(i) * d + perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// ---- LP1: minimum-perimeter box in a fixed frame ----

namespace hdetail {

// Writes the two rows for one plane into dst (stride v+1 = 2d+1).
// Variables: z = (lo_0..lo_{d-1}, hi_0..hi_{d-1}).
inline void plane_rows(const double* nrot, double off, int d, double* row_s, double* row_t) {
  int v = 2 * d;
  std::fill(row_s, row_s + v + 1, 0.0);
  std::fill(row_t, row_t + v + 1, 0.0);
  for (int j = 0; j < d; ++j) {
    bool pos = nrot[j] >= 0.0;  // ties take the + sign; the coefficient is 0 anyway
    // sigma(s) <= 0: s_j = lo_j when the normal coordinate is positive
    row_s[pos ? j : d + j] += nrot[j];
    // sigma(t) >= 0  ->  -n.t <= -off
    row_t[pos ? d + j : j] -= nrot[j];
  }
  row_s[v] = off;
  row_t[v] = -off;
}

struct Lp1Context {
  int d = 0, v = 0, n = 0;
  int n_rows = 0;                   // coupling + 2n plane rows
  std::vector<double> rows;         // stride v+1
  std::vector<double> objective;
  std::vector<double> nbuf;         // rotated normals scratch
  std::vector<int> basis;           // warm-start hypothesis
  std::vector<double> x;            // solution scratch
  SeidelSolver seidel;
  std::vector<int> ws_idx;          // working-set scratch
  std::vector<char> in_ws;
  std::vector<double> compact;

  void init(int dim, int nplanes) {
    d = dim;
    v = 2 * d;
    n = nplanes;
    n_rows = d + 2 * n;
    rows.assign(size_t(n_rows) * (v + 1), 0.0);
    objective.assign(v, 0.0);
    for (int j = 0; j < d; ++j) {
      objective[j] = -1.0;
      objective[d + j] = 1.0;
      double* row = rows.data() + size_t(j) * (v + 1);
      row[j] = 1.0;
      row[d + j] = -1.0;
      row[v] = 0.0;  // lo_j - hi_j <= 0
    }
    nbuf.resize(size_t(n) * d);
    x.assign(v, 0.0);
  }

  // Rotate plane normals into the frame and refresh the plane rows.
  void load_orientation(const std::vector<Hyperplane>& planes, const Rotation& frame) {
    for (int i = 0; i < n; ++i) {
      const Point& nn = planes[i].normal;
      double off = planes[i].offset;
      double* nr = nbuf.data() + size_t(i) * d;
      for (int r = 0; r < d; ++r) {
        double s = 0;
        for (int c = 0; c < d; ++c) s += frame.at(r, c) * nn[c];
        nr[r] = s;
      }
      if (nr[d - 1] < 0) {
        for (int r = 0; r < d; ++r) nr[r] = -nr[r];
        off = -off;
      }
      double* row_s = rows.data() + size_t(d + 2 * i) * (v + 1);
      double* row_t = row_s + (v + 1);
      plane_rows(nr, off, d, row_s, row_t);
    }
  }

  // Width sum of the optimum. Three tiers: KKT re-check of the cached basis,
  // then a working-set loop (Seidel on a small row subset, grown by violated
  // rows until the subset optimum is feasible for everything, which proves
  // global optimality), then a full solve as the safety net.
  double solve(uint64_t seed) {
    if (!basis.empty() &&
        ActiveSetHint::repair(rows.data(), n_rows, v, objective.data(), basis, x.data())) {
      return value();
    }
    if (solve_working_set(seed)) {
      harvest_basis();
      return value();
    }
    LpStatus st = seidel.solve_rows(rows.data(), n_rows, v, objective.data(), seed, x.data());
    if (st != LpStatus::optimal) throw std::logic_error("LP1 must be feasible and bounded");
    harvest_basis();
    return value();
  }

  double value() const {
    double s = 0;
    for (int j = 0; j < d; ++j) s += x[d + j] - x[j];
    return s;
  }

 private:
  bool solve_working_set(uint64_t seed) {
    ws_idx.clear();
    in_ws.assign(n_rows, 0);
    auto put = [&](int i) {
      if (!in_ws[i]) {
        in_ws[i] = 1;
        ws_idx.push_back(i);
      }
    };
    for (int j = 0; j < d; ++j) put(j);  // couplings keep the subset bounded
    for (int i : basis) put(i);
    for (int iter = 0; iter < 40; ++iter) {
      const int m = int(ws_idx.size());
      if (int(compact.size()) < m * (v + 1)) compact.resize(size_t(m) * (v + 1));
      for (int r = 0; r < m; ++r)
        std::copy_n(rows.data() + size_t(ws_idx[r]) * (v + 1), v + 1,
                    compact.data() + size_t(r) * (v + 1));
      if (seidel.solve_rows(compact.data(), m, v, objective.data(), mix_seed(seed, iter),
                            x.data()) != LpStatus::optimal)
        return false;
      // a subset optimum feasible for every row is the global optimum
      int added = 0;
      double worst = 0;
      int worst_i = -1;
      for (int i = 0; i < n_rows; ++i) {
        if (in_ws[i]) continue;
        const double* row = rows.data() + size_t(i) * (v + 1);
        double s = 0;
        for (int j = 0; j < v; ++j) s += row[j] * x[j];
        double gap = s - row[v];
        if (gap > 1e-9 * (1.0 + std::fabs(row[v]))) {
          if (added < 10) {
            put(i);
            ++added;
          } else if (gap > worst) {
            worst = gap;
            worst_i = i;
          }
        }
      }
      if (added == 0) return true;
      if (worst_i >= 0) put(worst_i);
    }
    return false;
  }

  // Cache a certified optimal basis for the warm-start path. Degenerate
  // optima expose more than v tight rows; sliding windows over them usually
  // contain a basis the KKT check accepts.
  void harvest_basis() {
    basis.clear();
    auto tight = ActiveSetHint::tight_rows(rows.data(), n_rows, v, x.data());
    const int t = int(tight.size());
    if (t < v) return;
    std::vector<double> probe(v);
    std::vector<int> cand(v);
    int windows = std::min(t, 8);
    for (int o = 0; o < windows; ++o) {
      for (int r = 0; r < v; ++r) cand[r] = tight[(o + r) % t];
      std::sort(cand.begin(), cand.end());
      if (ActiveSetHint::try_solve(rows.data(), n_rows, v, objective.data(), cand, probe.data())) {
        basis = cand;
        return;
      }
    }
  }
};

}  // namespace hdetail

namespace hdetail {

// The perimeter objective leaves the box position free along directions no
// plane constrains, and those coordinates drift to the solver's bounding box.
// Re-solve with widths frozen, minimizing sum |lo_j + hi_j|, to pull the box
// toward the origin without touching the optimal widths.
inline void polish_box_position(Lp1Context& ctx, uint64_t seed) {
  const int d = ctx.d;
  LinearProgram lp;
  lp.num_vars = 3 * d;  // lo, hi, u with u_j >= |lo_j + hi_j|
  lp.objective.assign(3 * d, 0.0);
  for (int j = 0; j < d; ++j) lp.objective[2 * d + j] = 1.0;
  for (int i = 0; i < ctx.n_rows; ++i) {
    const double* row = ctx.rows.data() + size_t(i) * (ctx.v + 1);
    std::vector<double> a(3 * d, 0.0);
    std::copy(row, row + 2 * d, a.begin());
    lp.add_constraint(std::move(a), row[ctx.v]);
  }
  for (int j = 0; j < d; ++j) {
    double w = ctx.x[d + j] - ctx.x[j];
    std::vector<double> freeze(3 * d, 0.0);
    freeze[d + j] = 1.0;
    freeze[j] = -1.0;
    lp.add_constraint(std::move(freeze), w + 1e-9 * (1.0 + std::fabs(w)));
    std::vector<double> up(3 * d, 0.0), un(3 * d, 0.0);
    up[j] = 1.0;
    up[d + j] = 1.0;
    up[2 * d + j] = -1.0;
    un[j] = -1.0;
    un[d + j] = -1.0;
    un[2 * d + j] = -1.0;
    lp.add_constraint(std::move(up), 0.0);
    lp.add_constraint(std::move(un), 0.0);
  }
  SeidelSolver solver;
  LpSolution sol = solver.solve(lp, mix_seed(seed, 0x705111));
  if (sol.status == LpStatus::optimal)
    std::copy(sol.point.begin(), sol.point.begin() + 2 * d, ctx.x.begin());
}

}  // namespace hdetail

// Minimum-perimeter box with the given orientation that intersects all planes.
inline OrientedBox min_perimeter_box(const std::vector<Hyperplane>& planes, const Rotation& frame,
                                     uint64_t seed) {
  if (planes.empty()) throw std::invalid_argument("min_perimeter_box: no planes");
  int d = planes[0].dim();
  hdetail::Lp1Context ctx;
  ctx.init(d, int(planes.size()));
  ctx.load_orientation(planes, frame);
  ctx.basis.clear();
  ctx.solve(seed);
  hdetail::polish_box_position(ctx, seed);
  OrientedBox box;
  box.frame = frame;
  box.lo.assign(ctx.x.begin(), ctx.x.begin() + d);
  box.hi.assign(ctx.x.begin() + d, ctx.x.end());
  for (int j = 0; j < d; ++j)
    if (box.lo[j] > box.hi[j]) std::swap(box.lo[j], box.hi[j]);  // rounding guard
  // The box must meet every plane: its normal-extent interval contains the offset.
  for (const auto& pl : planes) {
    Point nr = frame.apply(pl.normal);
    double lo_ext = 0, hi_ext = 0;
    for (int j = 0; j < d; ++j) {
      double a = nr[j] * box.lo[j], b = nr[j] * box.hi[j];
      lo_ext += std::min(a, b);
      hi_ext += std::max(a, b);
    }
    double tol = 1e-7 * (1.0 + std::fabs(pl.offset));
    if (pl.offset < lo_ext - tol || pl.offset > hi_ext + tol)
      throw std::logic_error("min_perimeter_box: solution misses a plane");
  }
  return box;
}

// ---- Algorithm: best box over the net, Gray-code tour, ratio certificate ----

struct HyperplaneTspResult {
  Tour tour;
  OrientedBox box;
  double lower_bound = 0;
  double ratio_budget = 0;
  double width_sum = 0;
  double eps = 0;
  uint64_t net_size = 0;
  int d = 0;
};

// Certified multiplicative budget for the box tour against the width-sum
// lower bound. The (d+1)/sqrt(d) 2^(d-3) chain needs d >= 3; in the plane the
// tight constant is sqrt(2).
inline double hyperplane_ratio_budget(int d, double eps) {
  if (d == 2) return std::sqrt(2.0) * (1.0 + eps);
  return (1.0 + eps) * (d + 1) / std::sqrt(double(d)) * std::ldexp(1.0, d - 3);
}

inline HyperplaneTspResult solve_hyperplanes(const std::vector<Hyperplane>& planes, double eps,
                                             uint64_t seed) {
  if (planes.empty()) throw std::invalid_argument("solve_hyperplanes: no planes");
  int d = planes[0].dim();
  if (d < 2 || d > 5) throw std::invalid_argument("solve_hyperplanes: 2 <= d <= 5");
  for (const auto& p : planes)
    if (p.dim() != d) throw std::invalid_argument("solve_hyperplanes: mixed dimensions");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("solve_hyperplanes: 0 < eps < 1");

  hdetail::Lp1Context ctx;
  ctx.init(d, int(planes.size()));

  double best_val = std::numeric_limits<double>::infinity();
  uint64_t best_idx = 0;
  std::vector<double> best_x;
  Rotation best_frame;

  auto consider = [&](uint64_t idx, const Rotation& frame) {
    ctx.load_orientation(planes, frame);
    double val = ctx.solve(mix_seed(seed, idx));
    if (val < best_val - 1e-15) {
      best_val = val;
      best_idx = idx;
      best_x = ctx.x;
      best_frame = frame;
    }
    return val;
  };

  uint64_t net_size = 0;
  if (d == 3) {
    // Snake scan over the Euler grid with a width-sum Lipschitz certificate:
    // rotating an orientation by an angle D inflates the achievable width sum
    // by at most (1 + (d-1) sin D), so while the last evaluated value exceeds
    // best * (1 + 2 sin D) no orientation within distance D can win, and the
    // scan may skip ahead. Exactness of the net minimum is preserved.
    auto grid = hdetail::EulerGrid::make(eps);
    net_size = grid.size();
    const double alpha_step = (kPi / 2.0) / grid.n_alpha;
    for (const auto& row : grid.rows) {
      const double gamma_step = 2.0 * kPi / row.n_gamma;
      double last_val = std::numeric_limits<double>::infinity();
      double dist_acc = 0;
      bool have_last = false;
      for (int ai = 0; ai < grid.n_alpha; ++ai) {
        bool fwd = (ai % 2) == 0;
        for (int g = 0; g < row.n_gamma; ++g) {
          int gi = fwd ? g : row.n_gamma - 1 - g;
          uint64_t idx = row.base + uint64_t(ai) * row.n_gamma + gi;
          double step = (g == 0) ? alpha_step : gamma_step;
          if (have_last) {
            dist_acc += step + 5e-6;  // slack for the axis-parallel nudges
            double grow = 1.0 + 2.0 * std::sin(std::min(dist_acc, kPi / 2.0));
            if (last_val >= best_val * grow) continue;
          }
          double alpha = (ai + 0.5) * alpha_step;
          double gamma = (gi + 0.5) * gamma_step;
          Rotation r = rotation_zyz(alpha, row.beta, gamma);
          hdetail::perturb_axis_parallel(r);
          last_val = consider(idx, r);
          dist_acc = 0;
          have_last = true;
        }
      }
    }
  } else {
    OrientationNet net = build_orientation_net(d, eps);
    net_size = net.rotations.size();
    for (uint64_t i = 0; i < net_size; ++i) consider(i, net.rotations[i]);
  }

  HyperplaneTspResult res;
  res.d = d;
  res.eps = eps;
  res.net_size = net_size;
  // Re-solve the winning orientation through the public path, which also
  // polishes the translation-free coordinates of degenerate optima.
  res.box = min_perimeter_box(planes, best_frame, mix_seed(seed, best_idx));
  if (res.box.width_sum() > best_val + 1e-6 * (1.0 + best_val)) {
    res.box.lo.assign(best_x.begin(), best_x.begin() + d);
    res.box.hi.assign(best_x.begin() + d, best_x.end());
    for (int j = 0; j < d; ++j)
      if (res.box.lo[j] > res.box.hi[j]) std::swap(res.box.lo[j], res.box.hi[j]);
  }
  res.width_sum = res.box.width_sum();
  res.tour = gray_code_box_tour(res.box);
  res.lower_bound = (2.0 / std::sqrt(double(d))) * res.width_sum / (1.0 + eps);
  res.ratio_budget = hyperplane_ratio_budget(d, eps);
  return res;
}

// Width-sum lower bound on the length of any closed curve meeting all planes.
inline double box_lower_bound(const std::vector<Hyperplane>& planes, double eps, uint64_t seed) {
  return solve_hyperplanes(planes, eps, seed).lower_bound;
}

// Min over the net of the axis-aligned enclosing-box width sum of a polygon
// (extrema of a polygon are at its vertices, so the per-orientation minimum
// encloser is the AABB of the rotated vertex set).
inline double min_enclosing_width_sum(const std::vector<Point>& polygon, const OrientationNet& net) {
  if (polygon.empty()) throw std::invalid_argument("min_enclosing_width_sum: empty polygon");
  int d = dim_of(polygon[0]);
  double best = std::numeric_limits<double>::infinity();
  for (const Rotation& r : net.rotations) {
    double sum = 0;
    for (int j = 0; j < d; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (const Point& p : polygon) {
        double s = 0;
        for (int c = 0; c < d; ++c) s += r.at(j, c) * p[c];
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      sum += hi - lo;
    }
    best = std::min(best, sum);
  }
  return best;
}

}  // namespace tspn

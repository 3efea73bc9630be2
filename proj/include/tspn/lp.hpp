#pragma once

// Randomized linear programming in fixed (small) dimension: Seidel's
// incremental algorithm with a bounding box, lexicographic-style bound
// perturbation against degenerate bases, and an active-set KKT fast path for
// re-solving a long run of near-identical programs.

#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "tspn/common.hpp"

namespace tspn {

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "?";
}

// minimize c.x  subject to  A x <= b, at most 16 variables.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;                              // size v
  std::vector<std::pair<std::vector<double>, double>> constraints;  // (coeffs, bound)

  void add_constraint(std::vector<double> coeffs, double bound) {
    if (int(coeffs.size()) != num_vars) throw std::invalid_argument("LP: row arity mismatch");
    constraints.emplace_back(std::move(coeffs), bound);
  }
  void validate() const {
    if (num_vars < 1 || num_vars > 16) throw std::invalid_argument("LP: 1..16 variables supported");
    if (int(objective.size()) != num_vars) throw std::invalid_argument("LP: objective arity mismatch");
    for (auto& [a, b] : constraints)
      if (int(a.size()) != num_vars) throw std::invalid_argument("LP: row arity mismatch");
  }
};

struct LpSolution {
  std::vector<double> point;
  double value = 0;
  LpStatus status = LpStatus::optimal;

  bool feasible_for(const LinearProgram& lp, double tol_scale = 1e-7) const {
    for (auto& [a, b] : lp.constraints) {
      double s = 0;
      for (int j = 0; j < lp.num_vars; ++j) s += a[j] * point[j];
      if (s > b + tol_scale * (1.0 + std::fabs(b))) return false;
    }
    return true;
  }
};

namespace lpdetail {

constexpr double kBigBox = 1e8;

// Dense rows, stride v+1 (coeffs then bound). Workspace is reused across
// solves; recursion depth is bounded by the variable count.
class SeidelWorkspace {
 public:
  void reset(int vmax, int max_rows) {
    if (vmax <= vmax_ && max_rows <= max_rows_) return;
    vmax_ = std::max(vmax, vmax_);
    max_rows_ = std::max(max_rows, max_rows_);
    size_t per_level = size_t(max_rows_) * (vmax_ + 1);
    rows_.assign(size_t(vmax_ + 1) * per_level, 0.0);
    order_.assign(size_t(vmax_ + 1) * max_rows_, 0);
    obj_.assign(size_t(vmax_ + 1) * vmax_, 0.0);
    x_.assign(size_t(vmax_ + 1) * vmax_, 0.0);
    elim_.assign(size_t(vmax_ + 1), ElimRecord{});
  }

  double* row(int level, int i) { return rows_.data() + level_base(level) + size_t(i) * (vmax_ + 1); }
  int* order(int level) { return order_.data() + size_t(level) * max_rows_; }
  double* obj(int level) { return obj_.data() + size_t(level) * vmax_; }
  double* x(int level) { return x_.data() + size_t(level) * vmax_; }

  struct ElimRecord {
    int var = -1;
    std::array<double, 17> row{};  // coeffs + bound of the eliminating constraint
  };
  ElimRecord& elim(int level) { return elim_[level]; }

  int vmax() const { return vmax_; }

 private:
  size_t level_base(int level) const { return size_t(level) * max_rows_ * (vmax_ + 1); }
  int vmax_ = 0, max_rows_ = 0;
  std::vector<double> rows_, obj_, x_;
  std::vector<int> order_;
  std::vector<ElimRecord> elim_;
};

}  // namespace lpdetail

// Seidel solver object; reusable (keeps workspace) and cheap to call in bulk.
class SeidelSolver {
 public:
  // Allocation-free entry point over a dense (v+1)-stride row block.
  // On success writes the optimum into x_out (size v) and returns optimal.
  LpStatus solve_rows(const double* rows, int n, int v, const double* objective, uint64_t seed,
                      double* x_out) {
    ws_.reset(v, n + 2 * v);
    if (int(perm_.size()) < n) perm_.resize(n);

    Rng rng(mix_seed(seed, 0x5e1de1));
    for (int i = 0; i < n; ++i) perm_[i] = i;
    for (int i = n; i > 1; --i) std::swap(perm_[i - 1], perm_[int(rng.next() % uint64_t(i))]);

    for (int i = 0; i < n; ++i) {
      const double* src = rows + size_t(perm_[i]) * (v + 1);
      double* row = ws_.row(0, i);
      double amax = 0;
      for (int j = 0; j < v; ++j) amax = std::max(amax, std::fabs(src[j]));
      double inv = amax > 1e-30 ? 1.0 / amax : 1.0;
      for (int j = 0; j < v; ++j) row[j] = src[j] * inv;
      double bs = src[v] * inv;
      // Upward perturbation keeps every feasible point feasible while breaking
      // degenerate bases.
      row[v] = bs + 1e-9 * (1.0 + std::fabs(bs)) * rng.uniform();
    }

    double* c = ws_.obj(0);
    double cmax = 0;
    for (int j = 0; j < v; ++j) cmax = std::max(cmax, std::fabs(objective[j]));
    // The incremental argument needs a unique optimum at every level; a tiny
    // generic tilt of the objective supplies it without moving the reported
    // value (which is evaluated against the caller's objective).
    for (int j = 0; j < v; ++j)
      c[j] = objective[j] + 1e-12 * (1.0 + cmax) * (2.0 * rng.uniform() - 1.0);

    if (!recurse(0, v, n, rng)) return LpStatus::infeasible;
    const double* x = ws_.x(0);
    double val = 0;
    for (int j = 0; j < v; ++j) {
      x_out[j] = x[j];
      val += objective[j] * x[j];
    }
    // Value-based unboundedness test: degenerate optima may park free
    // (objective-neutral) coordinates on the implicit box without the
    // objective itself being unbounded.
    double cscale = 0;
    for (int j = 0; j < v; ++j) cscale += std::fabs(objective[j]);
    if (val < -1e-3 * lpdetail::kBigBox * (1.0 + cscale)) return LpStatus::unbounded;
    return LpStatus::optimal;
  }

  LpSolution solve(const LinearProgram& lp, uint64_t seed) {
    lp.validate();
    const int v = lp.num_vars;
    const int n = int(lp.constraints.size());
    if (int(flat_.size()) < n * (v + 1)) flat_.resize(size_t(n) * (v + 1));
    for (int i = 0; i < n; ++i) {
      const auto& [a, b] = lp.constraints[i];
      double* row = flat_.data() + size_t(i) * (v + 1);
      std::copy(a.begin(), a.end(), row);
      row[v] = b;
    }
    LpSolution out;
    out.point.assign(v, 0.0);
    out.status = solve_rows(flat_.data(), n, v, lp.objective.data(), seed, out.point.data());
    if (out.status != LpStatus::infeasible) {
      double val = 0;
      for (int j = 0; j < v; ++j) val += lp.objective[j] * out.point[j];
      out.value = val;
    }
    if (out.status != LpStatus::optimal) out.point.assign(v, 0.0);
    return out;
  }

 private:
  // Solve rows[level][0..n_rows) in v variables; optimum into ws_.x(level).
  // Returns false on infeasibility.
  bool recurse(int level, int v, int n_rows, Rng& rng) {
    double* x = ws_.x(level);
    const double* c = ws_.obj(level);

    if (v == 1) {
      double lo = -lpdetail::kBigBox, hi = lpdetail::kBigBox;
      for (int i = 0; i < n_rows; ++i) {
        const double* row = ws_.row(level, i);
        double a = row[0], b = row[1];
        double scale = std::fabs(a) + std::fabs(b) + 1.0;
        if (a > 1e-13 * scale)
          hi = std::min(hi, b / a);
        else if (a < -1e-13 * scale)
          lo = std::max(lo, b / a);
        else if (b < -(1e-6 + 1e-9 * std::fabs(b)))
          return false;  // zero row, decisively contradictory
      }
      // Gaps below the feasibility tolerance are cancellation noise from
      // dependent perturbed rows, not real infeasibility.
      if (lo > hi + 1e-6 + 1e-9 * (std::fabs(lo) + std::fabs(hi))) return false;
      if (lo > hi) hi = lo = 0.5 * (lo + hi);
      x[0] = c[0] > 0 ? lo : (c[0] < 0 ? hi : std::clamp(0.0, lo, hi));
      return true;
    }

    // start at the box corner minimizing the objective
    for (int j = 0; j < v; ++j) x[j] = c[j] > 0 ? -lpdetail::kBigBox : lpdetail::kBigBox;

    for (int i = 0; i < n_rows; ++i) {
      const double* row = ws_.row(level, i);
      double s = 0, smag = 0;
      for (int j = 0; j < v; ++j) {
        double t = row[j] * x[j];
        s += t;
        smag += std::fabs(t);
      }
      double b = row[v];
      // The magnitude term guards against phantom violations when tiny
      // residual coefficients meet the huge implicit-box coordinates.
      double tol = 1e-9 * (1.0 + std::fabs(b)) + 1e-13 * smag;
      if (s <= b + tol) continue;

      // Optimum of rows[0..i] lies on this row's boundary: eliminate the
      // variable with the largest coefficient and recurse on the prefix.
      int k = 0;
      double best = std::fabs(row[0]);
      for (int j = 1; j < v; ++j)
        if (std::fabs(row[j]) > best) {
          best = std::fabs(row[j]);
          k = j;
        }
      if (best <= 1e-9) {
        // Numerically zero row (rows are normalized on entry, so this is
        // cancellation debris from dependent constraints). Contradictory
        // only when the bound is decisively negative.
        if (b < -1e-6 * (1.0 + smag)) return false;
        continue;
      }

      auto& el = ws_.elim(level);
      el.var = k;
      for (int j = 0; j <= v; ++j) el.row[j] = row[j];

      const double inv = 1.0 / row[k];
      // reduced objective
      double* c2 = ws_.obj(level + 1);
      {
        int t = 0;
        double ck = c[k] * inv;
        for (int j = 0; j < v; ++j) {
          if (j == k) continue;
          c2[t++] = c[j] - ck * row[j];
        }
      }
      // The eliminated variable's implicit box bounds join the subproblem as
      // ordinary rows; without them a prefix subproblem can be unbounded
      // along the eliminated direction and the recursion loses correctness.
      auto reduce_into = [&](const double* src, double src_bound, double* dst) {
        double ak = src[k] * inv;
        int t = 0;
        for (int j = 0; j < v; ++j) {
          if (j == k) continue;
          dst[t++] = src[j] - ak * row[j];
        }
        dst[v - 1] = src_bound - ak * b;
      };
      {
        std::array<double, 17> ek{};
        ek[k] = 1.0;
        reduce_into(ek.data(), lpdetail::kBigBox, ws_.row(level + 1, 0));
        ek[k] = -1.0;
        reduce_into(ek.data(), lpdetail::kBigBox, ws_.row(level + 1, 1));
      }
      // reduced prefix rows
      for (int p = 0; p < i; ++p)
        reduce_into(ws_.row(level, p), ws_.row(level, p)[v], ws_.row(level + 1, 2 + p));
      if (!recurse(level + 1, v - 1, i + 2, rng)) return false;
      const double* xs = ws_.x(level + 1);
      {
        int t = 0;
        double acc = b;
        for (int j = 0; j < v; ++j) {
          if (j == k) continue;
          x[j] = xs[t++];
          acc -= row[j] * x[j];
        }
        x[k] = acc * inv;
      }
    }
    return true;
  }

  lpdetail::SeidelWorkspace ws_;
  std::vector<int> perm_;
  std::vector<double> flat_;
};

// Convenience one-shot entry point.
inline LpSolution solve_lp(const LinearProgram& lp, uint64_t seed) {
  SeidelSolver solver;
  return solver.solve(lp, seed);
}

// Active-set fast path: given a basis hypothesis (row indices expected tight
// at the optimum), solve the equality system and verify primal feasibility
// plus dual nonnegativity. On success the returned point is a certified
// optimum; on failure callers fall back to a full solve.
class ActiveSetHint {
 public:
  // rows: dense (v+1)-stride array, n rows; basis: v row indices.
  // Returns true and fills x (size v) when the KKT check passes.
  static bool try_solve(const double* rows, int n, int v, const double* c,
                        const std::vector<int>& basis, double* x) {
    if (int(basis.size()) != v) return false;
    constexpr int VMAX = 16;
    double B[VMAX * VMAX], Bt[VMAX * VMAX], rhs[VMAX], lam[VMAX];
    for (int i = 0; i < v; ++i) {
      const double* row = rows + size_t(basis[i]) * (v + 1);
      for (int j = 0; j < v; ++j) {
        B[i * v + j] = row[j];
        Bt[j * v + i] = row[j];
      }
      rhs[i] = row[v];
    }
    if (!solve_dense(B, rhs, x, v)) return false;
    // dual stationarity: B^T lambda = -c with lambda >= 0
    double cc[VMAX];
    for (int j = 0; j < v; ++j) cc[j] = -c[j];
    if (!solve_dense(Bt, cc, lam, v)) return false;
    for (int i = 0; i < v; ++i)
      if (lam[i] < -1e-9) return false;
    // primal feasibility over all rows
    for (int i = 0; i < n; ++i) {
      const double* row = rows + size_t(i) * (v + 1);
      double s = 0;
      for (int j = 0; j < v; ++j) s += row[j] * x[j];
      if (s > row[v] + 1e-9 * (1.0 + std::fabs(row[v]))) return false;
    }
    return true;
  }

  // Tight rows at x (used to harvest a basis from a fresh solve).
  static std::vector<int> tight_rows(const double* rows, int n, int v, const double* x) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
      const double* row = rows + size_t(i) * (v + 1);
      double s = 0;
      for (int j = 0; j < v; ++j) s += row[j] * x[j];
      if (std::fabs(s - row[v]) <= 1e-7 * (1.0 + std::fabs(row[v]))) out.push_back(i);
    }
    return out;
  }

  // Pivoting repair of a stale basis. Runs dual-simplex swaps while a row is
  // violated (entering the violated row, ratio test on the duals) and primal
  // active-set swaps while a dual multiplier is negative (leaving that row,
  // ratio test along the relaxation direction). Returns true with x at the
  // certified optimum and basis updated in place.
  static bool repair(const double* rows, int n, int v, const double* c, std::vector<int>& basis,
                     double* x, int max_pivots = 40) {
    if (int(basis.size()) != v) return false;
    constexpr int VMAX = 16;
    double B[VMAX * VMAX], Bt[VMAX * VMAX], rhs[VMAX], lam[VMAX], mu[VMAX], dir[VMAX];
    for (int pivot = 0; pivot <= max_pivots; ++pivot) {
      for (int i = 0; i < v; ++i) {
        const double* row = rows + size_t(basis[i]) * (v + 1);
        for (int j = 0; j < v; ++j) {
          B[i * v + j] = row[j];
          Bt[j * v + i] = row[j];
        }
        rhs[i] = row[v];
      }
      double Bc[VMAX * VMAX];
      std::copy(B, B + v * v, Bc);
      if (!solve_dense(Bc, rhs, x, v)) return false;
      double Btc[VMAX * VMAX], cc[VMAX];
      std::copy(Bt, Bt + v * v, Btc);
      for (int j = 0; j < v; ++j) cc[j] = -c[j];
      if (!solve_dense(Btc, cc, lam, v)) return false;

      int neg = -1;
      double neg_val = -1e-7;
      for (int i = 0; i < v; ++i)
        if (lam[i] < neg_val) {
          neg_val = lam[i];
          neg = i;
        }
      int viol = -1;
      double viol_gap = 0;
      for (int i = 0; i < n; ++i) {
        const double* row = rows + size_t(i) * (v + 1);
        double s = 0;
        for (int j = 0; j < v; ++j) s += row[j] * x[j];
        double gap = s - row[v];
        double tol = 1e-9 * (1.0 + std::fabs(row[v]));
        if (gap > tol && gap > viol_gap) {
          viol_gap = gap;
          viol = i;
        }
      }
      if (neg < 0 && viol < 0) return true;  // certified optimal

      if (viol >= 0) {
        // enter the violated row, leave by the dual ratio test; in mixed
        // states this is a heuristic walk, but the exit above re-certifies
        // from scratch so only convergence speed is at stake
        const double* ar = rows + size_t(viol) * (v + 1);
        std::copy(Bt, Bt + v * v, Btc);
        double arr[VMAX];
        for (int j = 0; j < v; ++j) arr[j] = ar[j];
        if (!solve_dense(Btc, arr, mu, v)) return false;
        int leave = -1;
        double best_ratio = 0;
        for (int i = 0; i < v; ++i)
          if (mu[i] > 1e-11) {
            double ratio = lam[i] / mu[i];
            if (leave < 0 || ratio < best_ratio) {
              best_ratio = ratio;
              leave = i;
            }
          }
        if (leave < 0) return false;  // Farkas direction; caller re-solves
        basis[leave] = viol;
      } else if (neg >= 0) {
        // primal step: relax the negative-dual row, walk to the blocking row
        std::copy(B, B + v * v, Bc);
        double e[VMAX] = {0};
        e[neg] = -1.0;
        if (!solve_dense(Bc, e, dir, v)) return false;
        int block = -1;
        double alpha = 0;
        for (int i = 0; i < n; ++i) {
          const double* row = rows + size_t(i) * (v + 1);
          double ad = 0, ax = 0;
          for (int j = 0; j < v; ++j) {
            ad += row[j] * dir[j];
            ax += row[j] * x[j];
          }
          if (ad > 1e-11) {
            double step = (row[v] - ax) / ad;
            if (step < 0) step = 0;
            if (block < 0 || step < alpha) {
              alpha = step;
              block = i;
            }
          }
        }
        if (block < 0) return false;  // unbounded relaxation
        basis[neg] = block;
      } else {
        return false;  // both primal and dual infeasible: start over
      }
    }
    return false;
  }

 private:
  static bool solve_dense(double* a, double* b, double* x, int n) {
    constexpr int VMAX = 16;
    int piv[VMAX];
    for (int k = 0; k < n; ++k) {
      int p = k;
      for (int i = k + 1; i < n; ++i)
        if (std::fabs(a[i * n + k]) > std::fabs(a[p * n + k])) p = i;
      if (std::fabs(a[p * n + k]) < 1e-12) return false;
      piv[k] = p;
      if (p != k) {
        for (int j = 0; j < n; ++j) std::swap(a[p * n + j], a[k * n + j]);
        std::swap(b[p], b[k]);
      }
      double inv = 1.0 / a[k * n + k];
      for (int i = k + 1; i < n; ++i) {
        double f = a[i * n + k] * inv;
        if (f == 0.0) continue;
        for (int j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        b[i] -= f * b[k];
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = b[i];
      for (int j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
      x[i] = s / a[i * n + i];
    }
    (void)piv;
    return true;
  }
};

}  // namespace tspn

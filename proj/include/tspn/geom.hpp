#pragma once

// Dimension-generic geometric primitives: points, directions, hyperplanes,
// lines, balls, rotations, oriented boxes, tours, and the distance zoo used
// by the solvers and the tour verifier.

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tspn/common.hpp"

namespace tspn {

using Point = std::vector<double>;

// ---- basic vector ops ----

inline int dim_of(const Point& p) { return int(p.size()); }

inline double dot(const Point& a, const Point& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Point& a) { return dot(a, a); }
inline double norm(const Point& a) { return std::sqrt(norm2(a)); }

inline Point add(const Point& a, const Point& b) {
  Point r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Point sub(const Point& a, const Point& b) {
  Point r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Point scale(const Point& a, double t) {
  Point r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] * t;
  return r;
}

inline Point axpy(const Point& a, double t, const Point& d) {  // a + t*d
  Point r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * d[i];
  return r;
}

inline double dist(const Point& a, const Point& b) { return norm(sub(a, b)); }

inline bool all_finite(const Point& p) {
  for (double x : p)
    if (!std::isfinite(x)) return false;
  return true;
}

// ---- Direction: unit vector, canonical sign (first nonzero coordinate > 0) ----

struct Direction {
  Point unit;

  Direction() = default;

  explicit Direction(Point v) {
    double n = norm(v);
    if (!(n > 0) || !all_finite(v)) throw std::invalid_argument("Direction: zero or non-finite vector");
    for (double& x : v) x /= n;
    for (double x : v) {
      if (x > kUnitTol) break;
      if (x < -kUnitTol) {
        for (double& y : v) y = -y;
        break;
      }
    }
    unit = std::move(v);
  }

  int dim() const { return dim_of(unit); }
  double operator[](int i) const { return unit[i]; }
};

// Angle between two directions (line directions, sign-blind), in [0, pi/2].
inline double angle_between(const Direction& a, const Direction& b) {
  double c = std::fabs(dot(a.unit, b.unit));
  if (c > 1.0) c = 1.0;
  return std::acos(c);
}

// ---- Hyperplane: { x : normal . x = offset }, unit normal with last
// coordinate >= 0 (flipped at construction). A zero last coordinate means the
// plane is parallel to the x_d axis; stored as-is and flagged. ----

struct Hyperplane {
  Point normal;   // unit
  double offset = 0;

  Hyperplane() = default;

  Hyperplane(Point n, double c) {
    double len = norm(n);
    if (!(len > 0) || !all_finite(n)) throw std::invalid_argument("Hyperplane: bad normal");
    for (double& x : n) x /= len;
    c /= len;
    if (n.back() < 0) {
      for (double& x : n) x = -x;
      c = -c;
    }
    normal = std::move(n);
    offset = c;
  }

  int dim() const { return dim_of(normal); }
  bool axis_degenerate() const { return std::fabs(normal.back()) < kUnitTol; }
  // Signed evaluation sigma(p) = normal.p - offset.
  double eval(const Point& p) const { return dot(normal, p) - offset; }
};

// ---- Line: anchor + t * dir, anchor = point of the line closest to the
// origin (anchor . dir = 0). ----

struct Line {
  Point anchor;
  Direction dir;

  Line() = default;

  Line(const Point& through, Direction d) : dir(std::move(d)) {
    double t = dot(through, dir.unit);
    anchor = axpy(through, -t, dir.unit);
  }

  int dim() const { return dim_of(anchor); }
  Point at(double t) const { return axpy(anchor, t, dir.unit); }
  double param_of(const Point& p) const { return dot(sub(p, anchor), dir.unit); }
  Point project(const Point& p) const { return at(param_of(p)); }
};

// ---- Ball (d=2: disk) ----

struct Ball {
  Point center;
  double radius = 1;

  Ball() = default;
  Ball(Point c, double r) : center(std::move(c)), radius(r) {
    if (!(r > 0)) throw std::invalid_argument("Ball: radius must be positive");
  }
  int dim() const { return dim_of(center); }
};

// ---- Rotation: d x d orthonormal matrix, det +1, row-major. Used as a
// world -> box-frame map; rows are the box axis directions. ----

struct Rotation {
  int d = 0;
  std::vector<double> m;  // row-major d*d

  Rotation() = default;

  static Rotation identity(int d) {
    Rotation r;
    r.d = d;
    r.m.assign(size_t(d) * d, 0.0);
    for (int i = 0; i < d; ++i) r.m[size_t(i) * d + i] = 1.0;
    return r;
  }

  double at(int i, int j) const { return m[size_t(i) * d + j]; }
  double& at(int i, int j) { return m[size_t(i) * d + j]; }

  Point apply(const Point& p) const {  // world -> frame
    Point r(d, 0.0);
    for (int i = 0; i < d; ++i) {
      double s = 0;
      for (int j = 0; j < d; ++j) s += at(i, j) * p[j];
      r[i] = s;
    }
    return r;
  }

  Point apply_transpose(const Point& p) const {  // frame -> world
    Point r(d, 0.0);
    for (int j = 0; j < d; ++j) {
      double s = 0;
      for (int i = 0; i < d; ++i) s += at(i, j) * p[i];
      r[j] = s;
    }
    return r;
  }

  Rotation compose(const Rotation& rhs) const {  // this * rhs
    Rotation r;
    r.d = d;
    r.m.assign(size_t(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) {
        double a = at(i, k);
        for (int j = 0; j < d; ++j) r.at(i, j) += a * rhs.at(k, j);
      }
    return r;
  }

  // Orthonormality residual max |R R^T - I|.
  double orthonormal_residual() const {
    double worst = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double s = 0;
        for (int k = 0; k < d; ++k) s += at(i, k) * at(j, k);
        worst = std::max(worst, std::fabs(s - (i == j ? 1.0 : 0.0)));
      }
    return worst;
  }

  void validate() const {
    if (orthonormal_residual() > kOrthoTol) throw std::invalid_argument("Rotation: not orthonormal");
  }
};

inline Rotation rotation_2d(double theta) {
  Rotation r = Rotation::identity(2);
  double c = std::cos(theta), s = std::sin(theta);
  r.at(0, 0) = c;
  r.at(0, 1) = -s;
  r.at(1, 0) = s;
  r.at(1, 1) = c;
  return r;
}

// Z-Y-Z Euler rotation in 3-D.
inline Rotation rotation_zyz(double alpha, double beta, double gamma) {
  auto rz = [](double t) {
    Rotation r = Rotation::identity(3);
    double c = std::cos(t), s = std::sin(t);
    r.at(0, 0) = c; r.at(0, 1) = -s;
    r.at(1, 0) = s; r.at(1, 1) = c;
    return r;
  };
  Rotation ry = Rotation::identity(3);
  {
    double c = std::cos(beta), s = std::sin(beta);
    ry.at(0, 0) = c; ry.at(0, 2) = s;
    ry.at(2, 0) = -s; ry.at(2, 2) = c;
  }
  return rz(alpha).compose(ry).compose(rz(gamma));
}

// Rotation by angle about a unit axis (3-D), Rodrigues form.
inline Rotation rotation_axis_angle(const Point& axis, double theta) {
  double c = std::cos(theta), s = std::sin(theta), t = 1 - c;
  double x = axis[0], y = axis[1], z = axis[2];
  Rotation r = Rotation::identity(3);
  r.at(0, 0) = t * x * x + c;     r.at(0, 1) = t * x * y - s * z; r.at(0, 2) = t * x * z + s * y;
  r.at(1, 0) = t * x * y + s * z; r.at(1, 1) = t * y * y + c;     r.at(1, 2) = t * y * z - s * x;
  r.at(2, 0) = t * x * z - s * y; r.at(2, 1) = t * y * z + s * x; r.at(2, 2) = t * z * z + c;
  return r;
}

// Random rotation via Gram-Schmidt on Gaussian columns, det forced to +1.
inline Rotation random_rotation(int d, Rng& rng) {
  std::vector<Point> rows(d, Point(d));
  for (auto& row : rows)
    for (double& x : row) x = rng.normal();
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      double p = dot(rows[i], rows[j]);
      rows[i] = axpy(rows[i], -p, rows[j]);
    }
    double n = norm(rows[i]);
    if (n < 1e-9) return random_rotation(d, rng);  // retry on near-degenerate draw
    rows[i] = scale(rows[i], 1.0 / n);
  }
  Rotation r;
  r.d = d;
  r.m.resize(size_t(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) r.at(i, j) = rows[i][j];
  // det sign fix: flip last row if needed (det of orthonormal is +-1)
  double det = 1;
  {
    // compute det by LU on a copy
    std::vector<double> a = r.m;
    for (int k = 0; k < d; ++k) {
      int piv = k;
      for (int i = k + 1; i < d; ++i)
        if (std::fabs(a[size_t(i) * d + k]) > std::fabs(a[size_t(piv) * d + k])) piv = i;
      if (piv != k) {
        for (int j = 0; j < d; ++j) std::swap(a[size_t(piv) * d + j], a[size_t(k) * d + j]);
        det = -det;
      }
      det *= a[size_t(k) * d + k];
      for (int i = k + 1; i < d; ++i) {
        double f = a[size_t(i) * d + k] / a[size_t(k) * d + k];
        for (int j = k; j < d; ++j) a[size_t(i) * d + j] -= f * a[size_t(k) * d + j];
      }
    }
  }
  if (det < 0)
    for (int j = 0; j < d; ++j) r.at(d - 1, j) = -r.at(d - 1, j);
  return r;
}

inline Point random_unit_vector(int d, Rng& rng) {
  Point v(d);
  double n = 0;
  do {
    for (double& x : v) x = rng.normal();
    n = norm(v);
  } while (n < 1e-9);
  return scale(v, 1.0 / n);
}

// ---- OrientedBox: { x : lo <= frame * x <= hi } componentwise ----

struct OrientedBox {
  Rotation frame;           // world -> box coordinates
  std::vector<double> lo, hi;

  int dim() const { return frame.d; }
  double width(int j) const { return hi[j] - lo[j]; }
  double width_sum() const {
    double s = 0;
    for (size_t j = 0; j < lo.size(); ++j) s += hi[j] - lo[j];
    return s;
  }
  void validate() const {
    for (size_t j = 0; j < lo.size(); ++j)
      if (!(lo[j] <= hi[j] + 1e-12)) throw std::invalid_argument("OrientedBox: lo > hi");
  }
  // Corner selected by bit mask (bit j set -> hi in coordinate j), in world coords.
  Point corner(unsigned mask) const {
    Point y(dim());
    for (int j = 0; j < dim(); ++j) y[j] = (mask >> j) & 1u ? hi[j] : lo[j];
    return frame.apply_transpose(y);
  }
};

// ---- Tour / OpenPath ----

struct Tour {
  std::vector<Point> vertices;  // implicitly closed

  double length() const {
    if (vertices.size() < 2) return 0.0;
    double s = 0;
    for (size_t i = 0; i + 1 < vertices.size(); ++i) s += dist(vertices[i], vertices[i + 1]);
    s += dist(vertices.back(), vertices.front());
    return s;
  }
  int dim() const { return vertices.empty() ? 0 : dim_of(vertices.front()); }
};

struct OpenPath {
  std::vector<Point> vertices;

  double length() const {
    double s = 0;
    for (size_t i = 0; i + 1 < vertices.size(); ++i) s += dist(vertices[i], vertices[i + 1]);
    return s;
  }
  int dim() const { return vertices.empty() ? 0 : dim_of(vertices.front()); }
};

// ---- minimum transversal of two lines ----

struct MinTransversal {
  Point on_a, on_b;
  double length = 0;
  bool parallel = false;
};

// Closest pair of points between two lines. For parallel lines the transversal
// is non-unique: returns (anchor_a, foot of the perpendicular on b) and flags it.
inline MinTransversal min_transversal(const Line& a, const Line& b) {
  const Point& u = a.dir.unit;
  const Point& v = b.dir.unit;
  double d_uv = dot(u, v);
  MinTransversal out;
  Point w = sub(a.anchor, b.anchor);
  double denom = 1.0 - d_uv * d_uv;
  if (std::fabs(d_uv) >= 1.0 - kUnitTol || denom <= kUnitTol * kUnitTol) {
    out.parallel = true;
    out.on_a = a.anchor;
    out.on_b = b.project(a.anchor);
  } else {
    double wu = dot(w, u), wv = dot(w, v);
    double s = (d_uv * wv - wu) / denom;
    double t = (wv - d_uv * wu) / denom;
    out.on_a = a.at(s);
    out.on_b = b.at(t);
  }
  out.length = dist(out.on_a, out.on_b);
  return out;
}

// ---- Gray-code box tour ----
//
// Hamiltonian cycle of the 2^d box corners. Bits that flip most often in the
// reflected Gray code get the smallest widths, which realizes the minimum
// cycle length w_d + sum_j 2^(d-j) w_j over widths sorted ascending.
inline Tour gray_code_box_tour(const OrientedBox& box) {
  int d = box.dim();
  if (d < 1) throw std::invalid_argument("gray_code_box_tour: empty box");
  std::vector<int> axes(d);
  std::iota(axes.begin(), axes.end(), 0);
  std::sort(axes.begin(), axes.end(), [&](int i, int j) {
    double wi = box.width(i), wj = box.width(j);
    if (wi != wj) return wi < wj;
    return i < j;
  });
  // bit k (k=0 flips most) drives axes[k]
  Tour tour;
  unsigned count = 1u << d;
  tour.vertices.reserve(count);
  for (unsigned i = 0; i < count; ++i) {
    unsigned code = i ^ (i >> 1);
    unsigned mask = 0;
    for (int k = 0; k < d; ++k)
      if ((code >> k) & 1u) mask |= 1u << axes[k];
    Point p = box.corner(mask);
    if (!tour.vertices.empty() && dist(tour.vertices.back(), p) < 1e-15) continue;
    tour.vertices.push_back(std::move(p));
  }
  while (tour.vertices.size() > 1 && dist(tour.vertices.back(), tour.vertices.front()) < 1e-15)
    tour.vertices.pop_back();
  return tour;
}

// tau(Q): closed-form length of the Gray-code cycle, widths sorted ascending.
inline double box_tour_length(const std::vector<double>& widths) {
  std::vector<double> w = widths;
  std::sort(w.begin(), w.end());
  int d = int(w.size());
  double s = w[d - 1];
  for (int j = 0; j < d; ++j) s += std::ldexp(w[j], d - 1 - j);  // 2^(d-1-j) * w[j]
  return s;
}

// ---- distances ----

inline double dist_point_hyperplane(const Point& p, const Hyperplane& h) {
  return std::fabs(h.eval(p));
}

inline double dist_point_line(const Point& p, const Line& l) {
  return dist(p, l.project(p));
}

inline double dist_point_ball(const Point& p, const Ball& b) {
  return std::max(0.0, dist(p, b.center) - b.radius);
}

inline double dist_point_segment(const Point& p, const Point& a, const Point& b) {
  Point ab = sub(b, a);
  double len2 = norm2(ab);
  if (len2 < 1e-30) return dist(p, a);
  double t = dot(sub(p, a), ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, axpy(a, t, ab));
}

// Zero iff the endpoints straddle (or touch) the plane.
inline double dist_segment_hyperplane(const Point& a, const Point& b, const Hyperplane& h) {
  double fa = h.eval(a), fb = h.eval(b);
  if ((fa <= 0 && fb >= 0) || (fa >= 0 && fb <= 0)) return 0.0;
  return std::min(std::fabs(fa), std::fabs(fb));
}

inline double dist_segment_ball(const Point& a, const Point& b, const Ball& ball) {
  return std::max(0.0, dist_point_segment(ball.center, a, b) - ball.radius);
}

// Distance between segment [a,b] and an infinite line.
inline double dist_segment_line(const Point& a, const Point& b, const Line& l) {
  Point u = sub(b, a);
  double len = norm(u);
  if (len < 1e-15) return dist_point_line(a, l);
  Point ud = scale(u, 1.0 / len);
  const Point& v = l.dir.unit;
  double d_uv = dot(ud, v);
  double denom = 1.0 - d_uv * d_uv;
  Point w = sub(a, l.anchor);
  if (denom <= kUnitTol) {
    return dist_point_line(a, l);  // parallel
  }
  double wu = dot(w, ud), wv = dot(w, v);
  double s = (d_uv * wv - wu) / denom;  // param along segment direction
  if (s >= 0 && s <= len) {
    double t = (wv - d_uv * wu) / denom;
    return dist(axpy(a, s, ud), l.at(t));
  }
  return std::min(dist_point_line(a, l), dist_point_line(b, l));
}

// ---- polyline (tour/path) to neighborhood distances ----

namespace detail {
template <typename SegFn>
double polyline_min(const std::vector<Point>& vs, bool closed, SegFn&& seg) {
  if (vs.empty()) return std::numeric_limits<double>::infinity();
  if (vs.size() == 1) return seg(vs[0], vs[0]);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < vs.size(); ++i) best = std::min(best, seg(vs[i], vs[i + 1]));
  if (closed) best = std::min(best, seg(vs.back(), vs.front()));
  return best;
}
}  // namespace detail

inline double dist_polyline_hyperplane(const std::vector<Point>& vs, bool closed, const Hyperplane& h) {
  return detail::polyline_min(vs, closed, [&](const Point& a, const Point& b) {
    return dist_segment_hyperplane(a, b, h);
  });
}

inline double dist_polyline_line(const std::vector<Point>& vs, bool closed, const Line& l) {
  return detail::polyline_min(vs, closed, [&](const Point& a, const Point& b) {
    return dist_segment_line(a, b, l);
  });
}

inline double dist_polyline_ball(const std::vector<Point>& vs, bool closed, const Ball& b) {
  return detail::polyline_min(vs, closed, [&](const Point& p, const Point& q) {
    return dist_segment_ball(p, q, b);
  });
}

// ---- connected geometric graph (packing-lemma checkers, oracles) ----

struct GeomGraph {
  std::vector<Point> vertices;
  std::vector<std::pair<int, int>> edges;

  double length() const {
    double s = 0;
    for (auto& [u, v] : edges) s += dist(vertices[u], vertices[v]);
    return s;
  }

  bool connected() const {
    if (vertices.empty()) return true;
    std::vector<int> id(vertices.size());
    std::iota(id.begin(), id.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (id[x] != x) x = id[x] = id[id[x]];
      return x;
    };
    for (auto& [u, v] : edges) id[find(u)] = find(v);
    int root = find(0);
    for (size_t i = 1; i < vertices.size(); ++i)
      if (find(int(i)) != root) return false;
    return true;
  }

  double dist_to(const Point& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < vertices.size(); ++i) best = std::min(best, dist(p, vertices[i]));
    for (auto& [u, v] : edges) best = std::min(best, dist_point_segment(p, vertices[u], vertices[v]));
    return best;
  }
};

}  // namespace tspn

#pragma once

// TSP with line neighborhoods in R^3: the transversal/spanner graph over the
// input lines, exact and greedy group Steiner solvers on it, tour extraction,
// the constructive witness tree that certifies the constant-factor gap
// between tours and group Steiner trees, and samplers for the two detour
// inequalities the construction rests on.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include "tspn/common.hpp"
#include "tspn/geom.hpp"

namespace tspn {

// ---- direction net over Gr(1,3) ----

struct DirectionNet {
  std::vector<Direction> centers;
  double construction_radius = kPi / 12.0;
  double membership_radius = kPi / 6.0;
};

namespace ldetail {

struct IcoMesh {
  std::vector<Point> verts;
  std::vector<std::array<int, 3>> faces;
};

inline IcoMesh icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoMesh m;
  auto push = [&](double a, double b, double c) {
    Point p = {a, b, c};
    m.verts.push_back(scale(p, 1.0 / norm(p)));
  };
  push(-1, phi, 0); push(1, phi, 0); push(-1, -phi, 0); push(1, -phi, 0);
  push(0, -1, phi); push(0, 1, phi); push(0, -1, -phi); push(0, 1, -phi);
  push(phi, 0, -1); push(phi, 0, 1); push(-phi, 0, -1); push(-phi, 0, 1);
  m.faces = {{0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  return m;
}

inline IcoMesh subdivide(const IcoMesh& in) {
  IcoMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> mid;
  auto midpoint = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    Point p = add(out.verts[a], out.verts[b]);
    p = scale(p, 1.0 / norm(p));
    out.verts.push_back(std::move(p));
    int id = int(out.verts.size()) - 1;
    mid.emplace(key, id);
    return id;
  };
  for (const auto& f : in.faces) {
    int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

// Antipodal classes of an icosphere's vertex set, as canonical directions.
inline std::vector<Direction> direction_classes(int levels) {
  IcoMesh m = icosahedron();
  for (int i = 0; i < levels; ++i) m = subdivide(m);
  std::vector<Direction> out;
  for (const auto& v : m.verts) {
    Direction d(v);
    bool dup = false;
    for (const auto& e : out)
      if (angle_between(d, e) < 1e-9) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(d));
  }
  return out;
}

// Smallest enclosing ball of points in R^3 (Welzl, support sets up to four
// points); returns the center.
struct Miniball {
  Point c = {0, 0, 0};
  double r2 = -1;

  static Miniball of_support(const std::vector<Point>& s) {
    Miniball b;
    switch (s.size()) {
      case 0:
        b.c = {0, 0, 0};
        b.r2 = -1;
        break;
      case 1:
        b.c = s[0];
        b.r2 = 0;
        break;
      case 2:
        b.c = scale(add(s[0], s[1]), 0.5);
        b.r2 = norm2(sub(s[0], b.c));
        break;
      case 3: {
        Point ab = sub(s[1], s[0]), ap = sub(s[2], s[0]);
        double ab2 = norm2(ab), ap2 = norm2(ap), abap = dot(ab, ap);
        double det = 2.0 * (ab2 * ap2 - abap * abap);
        if (std::fabs(det) < 1e-18) {
          std::vector<Point> two = {s[0], norm2(ab) > norm2(ap) ? s[1] : s[2]};
          return of_support(two);
        }
        double u = (ap2 * (ab2 - abap)) / det, v = (ab2 * (ap2 - abap)) / det;
        b.c = add(s[0], add(scale(ab, u), scale(ap, v)));
        b.r2 = norm2(sub(s[0], b.c));
        break;
      }
      default: {  // circumsphere of four points
        double A[9], rhs[3];
        for (int i = 0; i < 3; ++i) {
          Point dl = sub(s[i + 1], s[0]);
          for (int j = 0; j < 3; ++j) A[i * 3 + j] = 2.0 * dl[j];
          rhs[i] = norm2(s[i + 1]) - norm2(s[0]);
        }
        // Cramer with partial pivoting
        double M[9];
        std::copy(A, A + 9, M);
        double x[3];
        bool ok = true;
        int piv[3] = {0, 1, 2};
        (void)piv;
        for (int k = 0; k < 3 && ok; ++k) {
          int p = k;
          for (int i = k + 1; i < 3; ++i)
            if (std::fabs(M[i * 3 + k]) > std::fabs(M[p * 3 + k])) p = i;
          if (std::fabs(M[p * 3 + k]) < 1e-14) {
            ok = false;
            break;
          }
          if (p != k) {
            for (int j = 0; j < 3; ++j) std::swap(M[p * 3 + j], M[k * 3 + j]);
            std::swap(rhs[p], rhs[k]);
          }
          for (int i = k + 1; i < 3; ++i) {
            double f = M[i * 3 + k] / M[k * 3 + k];
            for (int j = k; j < 3; ++j) M[i * 3 + j] -= f * M[k * 3 + j];
            rhs[i] -= f * rhs[k];
          }
        }
        if (!ok) {  // degenerate: fall back to the best three-point support
          std::vector<Point> three(s.begin(), s.begin() + 3);
          return of_support(three);
        }
        for (int i = 2; i >= 0; --i) {
          double acc = rhs[i];
          for (int j = i + 1; j < 3; ++j) acc -= M[i * 3 + j] * x[j];
          x[i] = acc / M[i * 3 + i];
        }
        b.c = {x[0], x[1], x[2]};
        b.r2 = norm2(sub(s[0], b.c));
      }
    }
    return b;
  }

  bool contains(const Point& p) const { return norm2(sub(p, c)) <= r2 * (1 + 1e-10) + 1e-16; }
};

inline Miniball welzl(std::vector<Point>& pts, size_t n, std::vector<Point>& support) {
  if (n == 0 || support.size() == 4) return Miniball::of_support(support);
  Miniball b = welzl(pts, n - 1, support);
  if (b.r2 >= 0 && b.contains(pts[n - 1])) return b;
  support.push_back(pts[n - 1]);
  b = welzl(pts, n - 1, support);
  support.pop_back();
  // move-to-front keeps the expected recursion shallow
  Point p = pts[n - 1];
  for (size_t i = n - 1; i > 0; --i) pts[i] = pts[i - 1];
  pts[0] = std::move(p);
  return b;
}

inline Point miniball_center(std::vector<Point> pts, Rng& rng) {
  rng.shuffle(pts);
  std::vector<Point> support;
  return welzl(pts, pts.size(), support).c;
}

}  // namespace ldetail

// Deterministic covering of the direction space by at most 40 centers of
// angular radius pi/12: greedy farthest-point seeding over a fine icosphere
// evaluation mesh, then minimax Lloyd rounds that recenter every cell at the
// circumcenter of its assigned directions. Plain farthest-point greedy
// carries a factor-two covering overhead and does not fit in 40 centers.
inline DirectionNet build_direction_net(int d) {
  if (d != 3) throw std::invalid_argument("build_direction_net: only d = 3 is supported");
  static const DirectionNet cached = [] {
    DirectionNet net;
    const std::vector<Direction> eval = ldetail::direction_classes(6);  // ~20k classes
    const double eval_resolution = 0.011;                               // mesh covering slack
    const double target = kPi / 12.0 - eval_resolution;
    const size_t budget = 40;
    const size_t E = eval.size();

    auto covering = [&](const std::vector<Point>& cs) {
      double worst = 0;
      for (size_t i = 0; i < E; ++i) {
        double bi = 0;
        for (const auto& c : cs) bi = std::max(bi, std::fabs(dot(eval[i].unit, c)));
        worst = std::max(worst, std::acos(std::min(1.0, bi)));
      }
      return worst;
    };

    std::vector<Point> best_config;
    double best_worst = kPi;
    for (uint64_t restart = 0; restart < 8 && best_worst > target; ++restart) {
      Rng rng(mix_seed(0xD12EC7ULL, restart));
      // farthest-point seeding (restarts jitter the start class)
      std::vector<double> bestd(E, kPi);
      size_t pick = restart == 0 ? 0 : size_t(rng.next() % E);
      if (restart == 0) {
        double bz = -1;
        for (size_t i = 0; i < E; ++i)
          if (std::fabs(eval[i].unit[2]) > bz) {
            bz = std::fabs(eval[i].unit[2]);
            pick = i;
          }
      }
      std::vector<Point> config;
      while (config.size() < budget) {
        config.push_back(eval[pick].unit);
        double worst = 0;
        for (size_t i = 0; i < E; ++i) {
          double a = std::acos(std::min(1.0, std::fabs(dot(eval[i].unit, config.back()))));
          if (a < bestd[i]) bestd[i] = a;
          if (bestd[i] > worst) {
            worst = bestd[i];
            pick = i;
          }
        }
        if (worst <= target) break;
      }
      // minimax Lloyd with exact per-cell circumcenters
      std::vector<std::vector<Point>> cells(config.size());
      for (int round = 0; round < 120; ++round) {
        for (auto& cell : cells) cell.clear();
        for (size_t i = 0; i < E; ++i) {
          size_t owner = 0;
          double bi = -1;
          for (size_t cidx = 0; cidx < config.size(); ++cidx) {
            double a = std::fabs(dot(eval[i].unit, config[cidx]));
            if (a > bi) {
              bi = a;
              owner = cidx;
            }
          }
          Point p = eval[i].unit;
          if (dot(p, config[owner]) < 0) p = scale(p, -1.0);
          cells[owner].push_back(std::move(p));
        }
        bool moved = false;
        for (size_t cidx = 0; cidx < config.size(); ++cidx) {
          if (cells[cidx].empty()) continue;
          Point center = ldetail::miniball_center(cells[cidx], rng);
          double nn = norm(center);
          if (nn < 1e-9) continue;
          center = scale(center, 1.0 / nn);
          if (dist(center, config[cidx]) > 1e-12) moved = true;
          config[cidx] = std::move(center);
        }
        double w = covering(config);
        if (w < best_worst) {
          best_worst = w;
          best_config = config;
        }
        if (!moved || best_worst <= target) break;
      }
    }
    if (best_worst > target) throw std::logic_error("direction net failed to converge");
    for (const auto& c : best_config) net.centers.push_back(Direction(c));
    return net;
  }();
  return cached;
}

// ---- greedy 2-spanner ----

struct SpannerEdge {
  int u, v;
  double w;
};

// Greedy t=2 spanner: pairs by increasing distance, edge added iff the
// current spanner distance exceeds twice the pair distance.
inline std::vector<SpannerEdge> greedy_2_spanner(const std::vector<Point>& pts) {
  const int n = int(pts.size());
  std::vector<SpannerEdge> edges;
  if (n < 2) return edges;
  struct Pair {
    double d;
    int i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(size_t(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({dist(pts[i], pts[j]), i, j});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist_m(size_t(n) * n, inf);
  for (int i = 0; i < n; ++i) dist_m[size_t(i) * n + i] = 0;
  for (const auto& pr : pairs) {
    if (dist_m[size_t(pr.i) * n + pr.j] <= 2.0 * pr.d) continue;
    edges.push_back({pr.i, pr.j, pr.d});
    for (int a = 0; a < n; ++a) {
      double dai = dist_m[size_t(a) * n + pr.i], daj = dist_m[size_t(a) * n + pr.j];
      if (dai == inf && daj == inf) continue;
      for (int b = 0; b < n; ++b) {
        double via1 = dai + pr.d + dist_m[size_t(pr.j) * n + b];
        double via2 = daj + pr.d + dist_m[size_t(pr.i) * n + b];
        double best = std::min(via1, via2);
        if (best < dist_m[size_t(a) * n + b]) dist_m[size_t(a) * n + b] = best;
      }
    }
  }
  return edges;
}

// ---- the transversal/spanner graph over the lines ----

enum class EdgeKind { transversal, spanner, along_line };

struct GroupGraph {
  struct Vertex {
    Point p;
    std::vector<int> lines;     // memberships
    std::vector<double> params;
  };
  struct Edge {
    int u, v;
    double w;
    EdgeKind kind;
    int aux;  // net-center id for spanner edges, line id for along-line edges
  };
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> groups;  // vertex ids per line, sorted by param
  std::vector<std::vector<std::pair<int, double>>> adj;

  void build_adjacency() {
    adj.assign(vertices.size(), {});
    for (const auto& e : edges) {
      adj[e.u].push_back({e.v, e.w});
      adj[e.v].push_back({e.u, e.w});
    }
  }
};

namespace ldetail {

struct VertexRegistry {
  const std::vector<Line>* lines;
  GroupGraph* g;
  std::vector<std::vector<std::pair<double, int>>> per_line;  // (param, id) sorted

  int add_on_line(int li, double t) {
    auto& reg = per_line[li];
    auto it = std::lower_bound(reg.begin(), reg.end(), std::make_pair(t - 1e-9 * (1 + std::fabs(t)), -1));
    for (auto scan = it; scan != reg.end() && scan->first <= t + 1e-9 * (1 + std::fabs(t)); ++scan)
      return scan->second;
    int id = int(g->vertices.size());
    g->vertices.push_back({(*lines)[li].at(t), {li}, {t}});
    reg.insert(std::lower_bound(reg.begin(), reg.end(), std::make_pair(t, id)), {t, id});
    return id;
  }

  // Registers a point known to lie on line li as well (cross-line merge).
  void add_membership(int id, int li, double t) {
    auto& v = g->vertices[id];
    for (int l : v.lines)
      if (l == li) return;
    v.lines.push_back(li);
    v.params.push_back(t);
    auto& reg = per_line[li];
    reg.insert(std::lower_bound(reg.begin(), reg.end(), std::make_pair(t, id)), {t, id});
  }
};

}  // namespace ldetail

// Assembles the graph: pairwise minimum transversals, per-endpoint orthogonal
// planes with greedy 2-spanners across near-parallel line families, and
// along-line edges between consecutive vertices.
inline GroupGraph build_group_graph(const std::vector<Line>& lines, const DirectionNet& net) {
  const int n = int(lines.size());
  if (n < 2) throw std::invalid_argument("build_group_graph: need at least two lines");
  for (const auto& l : lines)
    if (l.dim() != 3) throw std::invalid_argument("build_group_graph: lines must live in R^3");

  GroupGraph g;
  ldetail::VertexRegistry reg{&lines, &g, std::vector<std::vector<std::pair<double, int>>>(n)};

  // membership of lines in the direction families
  const int tau = int(net.centers.size());
  std::vector<std::vector<int>> family(tau);  // line ids per net center
  std::vector<std::vector<int>> line_families(n);
  for (int li = 0; li < n; ++li)
    for (int j = 0; j < tau; ++j)
      if (angle_between(lines[li].dir, net.centers[j]) <= net.membership_radius + 1e-12) {
        family[j].push_back(li);
        line_families[li].push_back(j);
      }

  // transversal endpoints; intersecting pairs merge into one two-line vertex
  struct EndpointRef {
    int vertex;
    int line;
  };
  std::vector<EndpointRef> endpoints;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto mt = min_transversal(lines[i], lines[j]);
      if (mt.length <= 1e-9) {
        int id = reg.add_on_line(i, lines[i].param_of(mt.on_a));
        reg.add_membership(id, j, lines[j].param_of(mt.on_b));
        endpoints.push_back({id, i});
        endpoints.push_back({id, j});
      } else {
        int u = reg.add_on_line(i, lines[i].param_of(mt.on_a));
        int v = reg.add_on_line(j, lines[j].param_of(mt.on_b));
        g.edges.push_back({u, v, mt.length, EdgeKind::transversal, -1});
        endpoints.push_back({u, i});
        endpoints.push_back({v, j});
      }
    }

  // per-endpoint orthogonal-plane spanners across each covering family
  for (const auto& ep : endpoints) {
    const Point& p = g.vertices[ep.vertex].p;
    for (int j : line_families[ep.line]) {
      const Point& axis = net.centers[j].unit;
      double level = dot(p, axis);
      std::vector<int> plane_vertex;
      std::vector<Point> plane_points;
      for (int li : family[j]) {
        double denom = dot(lines[li].dir.unit, axis);
        if (std::fabs(denom) < 1e-12) continue;  // numerically parallel to the plane: skip
        double t = (level - dot(lines[li].anchor, axis)) / denom;
        int id = reg.add_on_line(li, t);
        plane_vertex.push_back(id);
        plane_points.push_back(g.vertices[id].p);
      }
      for (const auto& e : greedy_2_spanner(plane_points)) {
        int u = plane_vertex[e.u], v = plane_vertex[e.v];
        if (u != v) g.edges.push_back({u, v, e.w, EdgeKind::spanner, j});
      }
    }
  }

  // along-line edges between consecutive vertices
  for (int li = 0; li < n; ++li) {
    const auto& r = reg.per_line[li];
    for (size_t k = 0; k + 1 < r.size(); ++k) {
      if (r[k].second == r[k + 1].second) continue;
      g.edges.push_back({r[k].second, r[k + 1].second, r[k + 1].first - r[k].first,
                         EdgeKind::along_line, li});
    }
  }

  // dedupe edges (spanners from different endpoints repeat pairs)
  {
    std::map<std::pair<int, int>, size_t> seen;
    std::vector<GroupGraph::Edge> unique;
    for (const auto& e : g.edges) {
      auto key = std::minmax(e.u, e.v);
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, unique.size());
        unique.push_back(e);
      } else if (e.w < unique[it->second].w) {
        unique[it->second] = e;
      }
    }
    g.edges = std::move(unique);
  }

  g.groups.assign(n, {});
  for (int li = 0; li < n; ++li)
    for (const auto& [t, id] : reg.per_line[li])
      if (g.groups[li].empty() || g.groups[li].back() != id) g.groups[li].push_back(id);
  g.build_adjacency();
  return g;
}

inline GroupGraph build_group_graph(const std::vector<Line>& lines) {
  return build_group_graph(lines, build_direction_net(3));
}

// ---- group Steiner solvers ----

struct SteinerTree {
  std::vector<int> edge_ids;
  double length = 0;
  int root = -1;  // meaningful for edgeless single-vertex trees
};

// Exact minimum group Steiner tree by dynamic programming over
// (group subset, root vertex) with merge and Dijkstra relaxation passes.
inline SteinerTree group_steiner_exact(const GroupGraph& g) {
  const int ng = int(g.groups.size());
  const int V = int(g.vertices.size());
  if (ng > 12 || V > 2000) throw std::invalid_argument("group_steiner_exact: instance too large");
  for (const auto& grp : g.groups)
    if (grp.empty()) throw std::runtime_error("group_steiner_exact: no feasible tree");

  const uint32_t full = (1u << ng) - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<uint32_t> vmask(V, 0);
  for (int gi = 0; gi < ng; ++gi)
    for (int v : g.groups[gi]) vmask[v] |= 1u << gi;

  std::vector<double> dp(size_t(full + 1) * V, inf);
  // parent encoding: kind 0 none, 1 edge (aux = neighbor, pmask = prev mask),
  // 2 merge (aux = submask)
  struct Par {
    int8_t kind = 0;
    int32_t aux = -1;
    uint32_t pmask = 0;
  };
  std::vector<Par> par(size_t(full + 1) * V);

  // a tree containing v covers every subset of v's own memberships
  for (int v = 0; v < V; ++v)
    for (uint32_t s = vmask[v]; s; s = (s - 1) & vmask[v]) dp[size_t(s) * V + v] = 0;

  using QItem = std::pair<double, int>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;

  for (uint32_t mask = 1; mask <= full; ++mask) {
    double* layer = dp.data() + size_t(mask) * V;
    // merge: combine complementary sublayers at a shared root
    for (uint32_t sub = (mask - 1) & mask; sub; sub = (sub - 1) & mask) {
      if (sub < (mask ^ sub)) continue;  // each split once
      const double* a = dp.data() + size_t(sub) * V;
      const double* b = dp.data() + size_t(mask ^ sub) * V;
      for (int v = 0; v < V; ++v) {
        double cand = a[v] + b[v];
        if (cand < layer[v]) {
          layer[v] = cand;
          par[size_t(mask) * V + v] = {2, int32_t(sub), 0};
        }
      }
    }
    // Dijkstra relaxation within the layer; edges into vertices with extra
    // memberships spill into the corresponding superset layer
    for (int v = 0; v < V; ++v)
      if (layer[v] < inf) pq.push({layer[v], v});
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > layer[v] + 1e-15) continue;
      for (const auto& [u, w] : g.adj[v]) {
        double cand = dv + w;
        uint32_t m2 = mask | vmask[u];
        if (m2 == mask) {
          if (cand < layer[u] - 1e-15) {
            layer[u] = cand;
            par[size_t(mask) * V + u] = {1, v, mask};
            pq.push({cand, u});
          }
        } else if (cand < dp[size_t(m2) * V + u]) {
          dp[size_t(m2) * V + u] = cand;
          par[size_t(m2) * V + u] = {1, v, mask};
        }
      }
    }
  }

  double best = inf;
  int best_v = -1;
  for (int v = 0; v < V; ++v)
    if (dp[size_t(full) * V + v] < best) {
      best = dp[size_t(full) * V + v];
      best_v = v;
    }
  if (!(best < inf)) throw std::runtime_error("group_steiner_exact: no feasible tree");

  // reconstruct the edge set
  SteinerTree tree;
  tree.root = best_v;
  std::map<std::pair<int, int>, int> edge_of;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    auto key = std::minmax(g.edges[i].u, g.edges[i].v);
    auto it = edge_of.find(key);
    if (it == edge_of.end() || g.edges[i].w < g.edges[edge_of[key]].w) edge_of[key] = int(i);
  }
  std::vector<char> edge_used(g.edges.size(), 0);
  std::vector<std::pair<uint32_t, int>> stack{{full, best_v}};
  while (!stack.empty()) {
    auto [mask, v] = stack.back();
    stack.pop_back();
    const Par& pr = par[size_t(mask) * V + v];
    if (pr.kind == 0) continue;
    if (pr.kind == 2) {
      stack.push_back({uint32_t(pr.aux), v});
      stack.push_back({mask ^ uint32_t(pr.aux), v});
    } else {
      int u = pr.aux;
      int ei = edge_of.at(std::minmax(u, v));
      if (!edge_used[ei]) {
        edge_used[ei] = 1;
        tree.edge_ids.push_back(ei);
        tree.length += g.edges[ei].w;
      }
      stack.push_back({pr.pmask, u});
    }
  }
  return tree;
}

// Greedy accretion: start from the closest group pair, then repeatedly splice
// in the cheapest shortest path to an untouched group.
inline SteinerTree group_steiner_greedy(const GroupGraph& g) {
  const int ng = int(g.groups.size());
  const int V = int(g.vertices.size());
  for (const auto& grp : g.groups)
    if (grp.empty()) throw std::runtime_error("group_steiner_greedy: no feasible tree");
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<int> group_of_min(V, -1);
  auto dijkstra = [&](const std::vector<int>& sources, std::vector<double>& dist,
                      std::vector<int>& parent) {
    dist.assign(V, inf);
    parent.assign(V, -1);
    using QItem = std::pair<double, int>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
    for (int s : sources) {
      dist[s] = 0;
      pq.push({0, s});
    }
    while (!pq.empty()) {
      auto [dv, v] = pq.top();
      pq.pop();
      if (dv > dist[v] + 1e-15) continue;
      for (const auto& [u, w] : g.adj[v])
        if (dv + w < dist[u] - 1e-15) {
          dist[u] = dv + w;
          parent[u] = v;
          pq.push({dist[u], u});
        }
    }
  };

  // closest pair of groups
  int ga = 0, gb = 1;
  double best_pair = inf;
  int best_target = -1;
  std::vector<int> best_parent;
  for (int gi = 0; gi < ng; ++gi) {
    std::vector<double> dist;
    std::vector<int> parent;
    dijkstra(g.groups[gi], dist, parent);
    for (int gj = 0; gj < ng; ++gj) {
      if (gj == gi) continue;
      for (int v : g.groups[gj])
        if (dist[v] < best_pair) {
          best_pair = dist[v];
          ga = gi;
          gb = gj;
          best_target = v;
          best_parent = parent;
        }
    }
  }
  if (best_target < 0) throw std::runtime_error("group_steiner_greedy: no feasible tree");

  SteinerTree tree;
  std::vector<char> in_tree(V, 0), group_done(ng, 0);
  std::vector<int> tree_vertices;
  std::map<std::pair<int, int>, int> edge_of;
  for (size_t i = 0; i < g.edges.size(); ++i) {
    auto key = std::minmax(g.edges[i].u, g.edges[i].v);
    auto it = edge_of.find(key);
    if (it == edge_of.end() || g.edges[i].w < g.edges[edge_of[key]].w) edge_of[key] = int(i);
  }
  auto absorb = [&](int v) {
    if (in_tree[v]) return;
    in_tree[v] = 1;
    tree_vertices.push_back(v);
    for (int li : g.vertices[v].lines) group_done[li] = 1;
  };
  auto splice_path = [&](int target, const std::vector<int>& parent) {
    int v = target;
    while (v >= 0 && !in_tree[v]) {
      int u = parent[v];
      if (u >= 0) {
        int ei = edge_of.at(std::minmax(u, v));
        tree.edge_ids.push_back(ei);
        tree.length += g.edges[ei].w;
      }
      absorb(v);
      v = u;
    }
    if (v >= 0) absorb(v);
  };
  // seed with the pair path
  {
    int v = best_target;
    std::vector<int> chain;
    while (v >= 0) {
      chain.push_back(v);
      v = best_parent[v];
    }
    absorb(chain.back());
    for (size_t i = chain.size() - 1; i-- > 0;) {
      int ei = edge_of.at(std::minmax(chain[i], chain[i + 1]));
      tree.edge_ids.push_back(ei);
      tree.length += g.edges[ei].w;
      absorb(chain[i]);
    }
    (void)ga;
    (void)gb;
  }
  tree.root = tree_vertices.front();

  for (int round = 0; round < ng; ++round) {
    bool all = true;
    for (int gi = 0; gi < ng; ++gi)
      if (!group_done[gi]) all = false;
    if (all) break;
    std::vector<double> dist;
    std::vector<int> parent;
    dijkstra(tree_vertices, dist, parent);
    double best = inf;
    int target = -1;
    for (int gi = 0; gi < ng; ++gi) {
      if (group_done[gi]) continue;
      for (int v : g.groups[gi])
        if (dist[v] < best) {
          best = dist[v];
          target = v;
        }
    }
    if (target < 0 || best == inf) throw std::runtime_error("group_steiner_greedy: no feasible tree");
    splice_path(target, parent);
  }
  (void)group_of_min;
  return tree;
}

// ---- tree to tour ----

// Doubled-tree Euler walk, shortcut to first visits, restricted to one
// representative per group.
inline Tour tree_to_tour(const SteinerTree& tree, const GroupGraph& g) {
  Tour tour;
  const int ng = int(g.groups.size());
  std::vector<char> covered(ng, 0);
  if (tree.edge_ids.empty()) {
    if (tree.root < 0) throw std::invalid_argument("tree_to_tour: empty tree");
    tour.vertices.push_back(g.vertices[tree.root].p);
    return tour;
  }
  std::vector<std::vector<int>> adj(g.vertices.size());
  int root = g.vertices.size();
  for (int ei : tree.edge_ids) {
    adj[g.edges[ei].u].push_back(g.edges[ei].v);
    adj[g.edges[ei].v].push_back(g.edges[ei].u);
    root = std::min({root, g.edges[ei].u, g.edges[ei].v});
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  std::vector<char> visited(g.vertices.size(), 0);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (visited[v]) continue;
    visited[v] = 1;
    bool fresh = false;
    for (int li : g.vertices[v].lines)
      if (!covered[li]) {
        covered[li] = 1;
        fresh = true;
      }
    if (fresh) tour.vertices.push_back(g.vertices[v].p);
    for (auto it = adj[v].rbegin(); it != adj[v].rend(); ++it)
      if (!visited[*it]) stack.push_back(*it);
  }
  return tour;
}

// ---- witness tree ----

struct WitnessResult {
  double length = 0;
  std::vector<std::pair<Point, Point>> segments;
  int block_count = 0;
  std::vector<char> line_touched;
};

namespace ldetail {

// Shortest-path length between two members of a plane point set through its
// greedy 2-spanner.
inline double spanner_path_length(const std::vector<Point>& pts, int from, int to,
                                  std::vector<std::pair<Point, Point>>* segs) {
  auto edges = greedy_2_spanner(pts);
  const int n = int(pts.size());
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> parent(n, -1);
  using QItem = std::pair<double, int>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> pq;
  dist[from] = 0;
  pq.push({0, from});
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v] + 1e-15) continue;
    for (auto& [u, w] : adj[v])
      if (dv + w < dist[u] - 1e-15) {
        dist[u] = dv + w;
        parent[u] = v;
        pq.push({dist[u], u});
      }
  }
  if (dist[to] == inf) throw std::logic_error("spanner path missing");
  if (segs) {
    int v = to;
    while (parent[v] >= 0) {
      segs->push_back({pts[parent[v]], pts[v]});
      v = parent[v];
    }
  }
  return dist[to];
}

}  // namespace ldetail

// Constructive group-Steiner witness for a given cycle visiting order: blocks
// of near-parallel lines, a backbone of minimum transversals between block
// leaders, and per-block paths through the orthogonal-plane spanners. The
// total length is certified against 68 times the cycle length.
inline WitnessResult witness_tree(const std::vector<Line>& lines,
                                  const std::vector<Point>& tour_points,
                                  const DirectionNet& net) {
  const int n = int(lines.size());
  if (n < 2 || int(tour_points.size()) != n)
    throw std::invalid_argument("witness_tree: need one visit point per line");
  double cycle_len = 0;
  for (int i = 0; i < n; ++i) cycle_len += dist(tour_points[i], tour_points[(i + 1) % n]);

  WitnessResult res;
  res.line_touched.assign(n, 0);
  auto add_seg = [&](const Point& a, const Point& b) {
    double w = dist(a, b);
    if (w < 1e-15) return;
    res.segments.push_back({a, b});
    res.length += w;
  };

  // blocks by the pi/12 leader rule
  std::vector<int> block_start{0};
  for (int i = 1; i < n; ++i)
    if (angle_between(lines[block_start.back()].dir, lines[i].dir) > kPi / 12.0)
      block_start.push_back(i);
  const int k = int(block_start.size());
  res.block_count = k;

  // backbone transversals between consecutive leaders
  std::vector<Point> leader_in(k), leader_out(k);  // t_i (arrive), s_i (leave)
  std::vector<char> has_in(k, 0), has_out(k, 0);
  for (int b = 0; b + 1 < k; ++b) {
    auto mt = min_transversal(lines[block_start[b]], lines[block_start[b + 1]]);
    leader_out[b] = mt.on_a;
    has_out[b] = 1;
    leader_in[b + 1] = mt.on_b;
    has_in[b + 1] = 1;
    add_seg(mt.on_a, mt.on_b);
  }
  for (int b = 0; b < k; ++b)
    if (has_in[b] && has_out[b]) add_seg(leader_in[b], leader_out[b]);

  // per-block paths
  for (int b = 0; b < k; ++b) {
    int first = block_start[b];
    int last = (b + 1 < k ? block_start[b + 1] : n) - 1;
    const Line& leader = lines[first];
    // covering net center for the block
    int center = -1;
    for (size_t j = 0; j < net.centers.size(); ++j)
      if (angle_between(leader.dir, net.centers[j]) <= net.construction_radius + 1e-12) {
        center = int(j);
        break;
      }
    if (center < 0) throw std::logic_error("witness_tree: direction net does not cover a block leader");
    const Point& axis = net.centers[center].unit;

    // family of lines within the membership radius of this center
    std::vector<int> fam;
    for (int li = 0; li < n; ++li)
      if (angle_between(lines[li].dir, net.centers[center]) <= net.membership_radius + 1e-12)
        fam.push_back(li);
    auto plane_points = [&](double level, std::vector<int>& ids) {
      std::vector<Point> pts;
      ids.clear();
      for (int li : fam) {
        double denom = dot(lines[li].dir.unit, axis);
        if (std::fabs(denom) < 1e-12) continue;
        double t = (level - dot(lines[li].anchor, axis)) / denom;
        pts.push_back(lines[li].at(t));
        ids.push_back(li);
      }
      return pts;
    };
    auto index_of = [&](const std::vector<int>& ids, int li) {
      for (size_t i = 0; i < ids.size(); ++i)
        if (ids[i] == li) return int(i);
      throw std::logic_error("witness_tree: line missing from its plane");
    };

    // start point of the block path
    Point q;
    if (has_out[b])
      q = leader_out[b];
    else if (has_in[b])
      q = leader_in[b];
    else {
      // single block: the backbone degenerates to one transversal, chosen so
      // its endpoint on the first line sits nearest the cycle's visit point
      double best = std::numeric_limits<double>::infinity();
      MinTransversal chosen;
      for (int li = 0; li < n; ++li) {
        if (li == first) continue;
        auto mt = min_transversal(leader, lines[li]);
        double dcur = dist(mt.on_a, tour_points[first]);
        if (dcur < best) {
          best = dcur;
          chosen = mt;
        }
      }
      q = chosen.on_a;
      add_seg(chosen.on_a, chosen.on_b);
    }
    res.line_touched[first] = 1;

    int cur = first;
    for (int nxt = first + 1; nxt <= last; ++nxt) {
      double level = dot(q, axis);
      std::vector<int> ids;
      std::vector<Point> pts = plane_points(level, ids);
      double denom = dot(lines[nxt].dir.unit, axis);
      if (std::fabs(denom) < 1e-12) throw std::logic_error("witness_tree: family line parallel to plane");
      double tr = (level - dot(lines[nxt].anchor, axis)) / denom;
      Point r = lines[nxt].at(tr);
      double hop = dist(q, r);
      double cycle_hop = dist(tour_points[cur], tour_points[nxt]);
      if (hop <= 3.0 * cycle_hop) {
        res.length += ldetail::spanner_path_length(pts, index_of(ids, cur), index_of(ids, nxt),
                                                   &res.segments);
        q = r;
      } else {
        auto mt = min_transversal(lines[cur], lines[nxt]);
        double level2 = dot(mt.on_b, axis);
        std::vector<int> ids2;
        std::vector<Point> pts2 = plane_points(level2, ids2);
        double denom_cur = dot(lines[cur].dir.unit, axis);
        double tu = (level2 - dot(lines[cur].anchor, axis)) / denom_cur;
        Point u = lines[cur].at(tu);
        add_seg(q, u);  // along the current line
        res.length += ldetail::spanner_path_length(pts2, index_of(ids2, cur), index_of(ids2, nxt),
                                                   &res.segments);
        q = mt.on_b;
      }
      res.line_touched[nxt] = 1;
      cur = nxt;
    }
  }

  if (res.length > 68.0 * cycle_len * (1 + 1e-9) + 1e-9)
    throw std::logic_error("witness_tree: length certificate violated");
  return res;
}

inline WitnessResult witness_tree(const std::vector<Line>& lines,
                                  const std::vector<Point>& tour_points) {
  return witness_tree(lines, tour_points, build_direction_net(3));
}

// ---- detour inequalities ----

inline double transversal_detour_factor(double phi0) {
  return std::sqrt(3.0 / (1.0 - std::cos(phi0)));
}

struct TransversalDetourSample {
  Line l1, l2;
  Point p1, p2;
  double phi0 = kPi / 12.0;
};

// Two lines at angle within (phi0, pi/2], with marked points. The detour via
// the minimum transversal is bounded by sqrt(3/(1-cos phi0)) |p1 p2|.
inline TransversalDetourSample sample_transversal_detour(double phi0, Rng& rng) {
  TransversalDetourSample s;
  s.phi0 = phi0;
  Direction d1(random_unit_vector(3, rng));
  double phi = rng.uniform(phi0 * (1 + 1e-9), kPi / 2);
  // rotate d1 by exactly phi about a random orthogonal axis
  Point axis = random_unit_vector(3, rng);
  axis = axpy(axis, -dot(axis, d1.unit), d1.unit);
  while (norm(axis) < 1e-6) {
    axis = random_unit_vector(3, rng);
    axis = axpy(axis, -dot(axis, d1.unit), d1.unit);
  }
  axis = scale(axis, 1.0 / norm(axis));
  Rotation rot = rotation_axis_angle(axis, phi);
  Direction d2(rot.apply(d1.unit));
  Point a1(3), a2(3);
  for (int i = 0; i < 3; ++i) {
    a1[i] = rng.uniform(-10, 10);
    a2[i] = rng.uniform(-10, 10);
  }
  s.l1 = Line(a1, d1);
  s.l2 = Line(a2, d2);
  s.p1 = s.l1.at(rng.uniform(-20, 20));
  s.p2 = s.l2.at(rng.uniform(-20, 20));
  return s;
}

inline bool check_transversal_detour(const TransversalDetourSample& s) {
  auto mt = min_transversal(s.l1, s.l2);
  double lhs = dist(s.p1, mt.on_a) + mt.length + dist(mt.on_b, s.p2);
  double rhs = transversal_detour_factor(s.phi0) * dist(s.p1, s.p2);
  return lhs <= rhs + 1e-9 * (1.0 + rhs);
}

struct NearParallelSample {
  Line l1, l2;
  Point p1, p2, r1, r2;
};

// Two near-vertical lines (angle phi in (0, pi/6], both within pi/6 of the
// vertical axis), points r_i cut by a shared horizontal plane, and marked
// points p_i with |p1 p2| <= |r1 r2| / 3.
inline NearParallelSample sample_near_parallel(Rng& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Point e3 = {0, 0, 1};
    auto tilt = [&](double max_angle) {
      Point axis = {std::cos(rng.uniform(0, 2 * kPi)), std::sin(rng.uniform(0, 2 * kPi)), 0};
      return rotation_axis_angle(axis, rng.uniform(0, max_angle)).apply(e3);
    };
    Direction d1(tilt(kPi / 6));
    Direction d2(tilt(kPi / 6));
    double phi = angle_between(d1, d2);
    if (phi <= 1e-6 || phi > kPi / 6) continue;
    Point a1(3), a2(3);
    for (int i = 0; i < 3; ++i) {
      a1[i] = rng.uniform(-5, 5);
      a2[i] = rng.uniform(-5, 5);
    }
    NearParallelSample s;
    s.l1 = Line(a1, d1);
    s.l2 = Line(a2, d2);
    double z0 = rng.uniform(-10, 10);
    double t1 = (z0 - s.l1.anchor[2]) / s.l1.dir.unit[2];
    double t2 = (z0 - s.l2.anchor[2]) / s.l2.dir.unit[2];
    s.r1 = s.l1.at(t1);
    s.r2 = s.l2.at(t2);
    double rr = dist(s.r1, s.r2);
    if (rr < 1e-6) continue;
    auto mt = min_transversal(s.l1, s.l2);
    // sample p_i near the transversal feet until the separation constraint holds
    bool ok = false;
    double range = rr;
    for (int inner = 0; inner < 60; ++inner) {
      s.p1 = s.l1.at(s.l1.param_of(mt.on_a) + rng.uniform(-range, range));
      s.p2 = s.l2.at(s.l2.param_of(mt.on_b) + rng.uniform(-range, range));
      if (dist(s.p1, s.p2) <= rr / 3.0) {
        ok = true;
        break;
      }
      range *= 0.7;
    }
    if (ok) return s;
  }
  throw std::logic_error("sample_near_parallel: could not build an admissible sample");
}

inline bool check_near_parallel(const NearParallelSample& s) {
  auto mt = min_transversal(s.l1, s.l2);
  const double bound = 2.0 * std::sqrt(3.0) / 9.0;
  double lhs1 = dist(s.p1, mt.on_a), rhs1 = bound * dist(s.r1, mt.on_a);
  double lhs2 = dist(s.p2, mt.on_b), rhs2 = bound * dist(s.r2, mt.on_b);
  return lhs1 <= rhs1 + 1e-9 * (1 + rhs1) && lhs2 <= rhs2 + 1e-9 * (1 + rhs2);
}

// ---- end-to-end lines pipeline ----

struct LinesTspResult {
  Tour tour;
  SteinerTree tree;
  double tree_length = 0;
  double lower_bound = 0;   // tree / 68 when the tree is exact
  double ratio_budget = 0;  // 2 * 68 for the exact path, 0 when uncertified
  std::string solver;
  size_t graph_vertices = 0, graph_edges = 0;
};

inline LinesTspResult solve_lines(const std::vector<Line>& lines) {
  LinesTspResult res;
  if (lines.size() == 1) {
    res.tour.vertices.push_back(lines[0].anchor);
    res.solver = "single-line";
    return res;
  }
  GroupGraph g = build_group_graph(lines);
  res.graph_vertices = g.vertices.size();
  res.graph_edges = g.edges.size();
  bool exact = g.groups.size() <= 12 && g.vertices.size() <= 2000;
  SteinerTree tree = exact ? group_steiner_exact(g) : group_steiner_greedy(g);
  res.solver = exact ? "exact-dp" : "greedy";
  res.tree = tree;
  res.tree_length = tree.length;
  res.tour = tree_to_tour(tree, g);
  if (exact) {
    res.lower_bound = tree.length / 68.0;
    res.ratio_budget = 136.0;  // tour <= 2 tree <= 2 * 68 * (tree / 68)
  }
  return res;
}

}  // namespace tspn

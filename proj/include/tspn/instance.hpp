#pragma once

// Instance and tour file formats (UTF-8 JSON), generators, the tour
// verifier, and the per-run ratio report.

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "tspn/balls.hpp"
#include "tspn/common.hpp"
#include "tspn/disks.hpp"
#include "tspn/geom.hpp"
#include "tspn/hyperplanes.hpp"
#include "tspn/lines.hpp"

namespace tspn {

enum class NeighborhoodKind { hyperplanes, lines, disks, balls };

inline const char* to_string(NeighborhoodKind k) {
  switch (k) {
    case NeighborhoodKind::hyperplanes: return "hyperplanes";
    case NeighborhoodKind::lines: return "lines";
    case NeighborhoodKind::disks: return "disks";
    case NeighborhoodKind::balls: return "balls";
  }
  return "?";
}

inline NeighborhoodKind kind_from_string(const std::string& s) {
  if (s == "hyperplanes") return NeighborhoodKind::hyperplanes;
  if (s == "lines") return NeighborhoodKind::lines;
  if (s == "disks") return NeighborhoodKind::disks;
  if (s == "balls") return NeighborhoodKind::balls;
  throw std::invalid_argument("unknown neighborhood kind: " + s);
}

struct Instance {
  int dim = 0;
  NeighborhoodKind kind = NeighborhoodKind::disks;
  std::vector<Hyperplane> hyperplanes;
  std::vector<Line> lines;
  std::vector<Ball> balls;  // used for both disks and balls

  size_t size() const {
    switch (kind) {
      case NeighborhoodKind::hyperplanes: return hyperplanes.size();
      case NeighborhoodKind::lines: return lines.size();
      default: return balls.size();
    }
  }
};

// ---- JSON ----

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json items = nlohmann::json::array();
  switch (inst.kind) {
    case NeighborhoodKind::hyperplanes:
      for (const auto& h : inst.hyperplanes)
        items.push_back({{"normal", h.normal}, {"offset", h.offset}});
      break;
    case NeighborhoodKind::lines:
      for (const auto& l : inst.lines)
        items.push_back({{"anchor", l.anchor}, {"dir", l.dir.unit}});
      break;
    default:
      for (const auto& b : inst.balls)
        items.push_back({{"center", b.center}, {"radius", b.radius}});
  }
  return {{"dim", inst.dim}, {"kind", to_string(inst.kind)}, {"items", std::move(items)}};
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  inst.dim = j.at("dim").get<int>();
  inst.kind = kind_from_string(j.at("kind").get<std::string>());
  for (const auto& item : j.at("items")) {
    switch (inst.kind) {
      case NeighborhoodKind::hyperplanes: {
        Point n = item.at("normal").get<Point>();
        if (int(n.size()) != inst.dim) throw std::invalid_argument("normal arity mismatch");
        inst.hyperplanes.emplace_back(n, item.at("offset").get<double>());
        break;
      }
      case NeighborhoodKind::lines: {
        Point a = item.at("anchor").get<Point>();
        Point d = item.at("dir").get<Point>();
        if (int(a.size()) != inst.dim || int(d.size()) != inst.dim)
          throw std::invalid_argument("line arity mismatch");
        inst.lines.emplace_back(a, Direction(d));
        break;
      }
      default: {
        Point c = item.at("center").get<Point>();
        if (int(c.size()) != inst.dim) throw std::invalid_argument("center arity mismatch");
        inst.balls.emplace_back(c, item.at("radius").get<double>());
      }
    }
  }
  return inst;
}

inline nlohmann::json tour_to_json(const Tour& t) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : t.vertices) vs.push_back(v);
  return {{"dim", t.dim()}, {"closed", true}, {"vertices", std::move(vs)}};
}

inline Tour tour_from_json(const nlohmann::json& j0) {
  const nlohmann::json& j = j0.contains("tour") ? j0.at("tour") : j0;
  Tour t;
  for (const auto& v : j.at("vertices")) t.vertices.push_back(v.get<Point>());
  if (t.vertices.empty()) throw std::invalid_argument("tour has no vertices");
  return t;
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

// ---- generators ----

inline Instance gen_hyperplanes(int n, int dim, uint64_t seed) {
  if (dim < 2 || dim > 5) throw std::invalid_argument("hyperplanes: dim 2..5");
  Rng rng(mix_seed(seed, 0x48504C));
  Instance inst;
  inst.dim = dim;
  inst.kind = NeighborhoodKind::hyperplanes;
  for (int i = 0; i < n; ++i) {
    Point u = random_unit_vector(dim, rng);
    if (u[dim - 1] < 0) u = scale(u, -1.0);
    inst.hyperplanes.emplace_back(u, rng.uniform(-10, 10));
  }
  return inst;
}

inline Instance gen_lines(int n, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x4C494E));
  Instance inst;
  inst.dim = 3;
  inst.kind = NeighborhoodKind::lines;
  for (int i = 0; i < n; ++i) {
    Point through(3);
    for (double& x : through) x = rng.uniform(-10, 10);
    inst.lines.emplace_back(through, Direction(random_unit_vector(3, rng)));
  }
  return inst;
}

inline Instance gen_disks(int n, uint64_t seed, double range = 10.0) {
  Rng rng(mix_seed(seed, 0x4449534B));
  Instance inst;
  inst.dim = 2;
  inst.kind = NeighborhoodKind::disks;
  for (int i = 0; i < n; ++i)
    inst.balls.emplace_back(Point{rng.uniform(0, range), rng.uniform(0, range)}, 1.0);
  return inst;
}

inline Instance gen_balls(int n, uint64_t seed, double range = 20.0) {
  Rng rng(mix_seed(seed, 0x42414C4C));
  Instance inst;
  inst.dim = 3;
  inst.kind = NeighborhoodKind::balls;
  for (int i = 0; i < n; ++i)
    inst.balls.emplace_back(
        Point{rng.uniform(0, range), rng.uniform(0, range), rng.uniform(0, range)}, 1.0);
  return inst;
}

// The adversarial mixed-radius triple: radii (1, x, x) centered on the axis
// at 0, 1+x+eps, 1+3x. A demonstration instance; the unit-disk solver
// rightly refuses it.
inline Instance gen_scaled_triple(double x, double eps) {
  if (!(x >= 1.0)) throw std::invalid_argument("scaled triple: x >= 1 required");
  Instance inst;
  inst.dim = 2;
  inst.kind = NeighborhoodKind::disks;
  inst.balls.emplace_back(Point{0.0, 0.0}, 1.0);
  inst.balls.emplace_back(Point{1.0 + x + eps, 0.0}, x);
  inst.balls.emplace_back(Point{1.0 + 3.0 * x, 0.0}, x);
  return inst;
}

// ---- verification ----

struct VerifyResult {
  bool ok = true;
  std::vector<double> distances;  // per neighborhood
  int first_violation = -1;
};

inline VerifyResult verify_tour(const Instance& inst, const std::vector<Point>& vertices,
                                double tol) {
  if (vertices.empty()) throw std::invalid_argument("verify_tour: empty tour");
  if (dim_of(vertices.front()) != inst.dim)
    throw std::invalid_argument("verify_tour: dimension mismatch");
  VerifyResult res;
  auto note = [&](double dcur) {
    res.distances.push_back(dcur);
    if (dcur > tol && res.first_violation < 0) {
      res.first_violation = int(res.distances.size()) - 1;
      res.ok = false;
    }
  };
  switch (inst.kind) {
    case NeighborhoodKind::hyperplanes:
      for (const auto& h : inst.hyperplanes) note(dist_polyline_hyperplane(vertices, true, h));
      break;
    case NeighborhoodKind::lines:
      for (const auto& l : inst.lines) note(dist_polyline_line(vertices, true, l));
      break;
    default:
      for (const auto& b : inst.balls) note(dist_polyline_ball(vertices, true, b));
  }
  return res;
}

// ---- ratio report ----

struct RatioReport {
  std::string instance_id;
  std::string algorithm;
  std::string backend;
  double tour_length = 0;
  double lower_bound = 0;  // 0 when unavailable
  std::optional<double> oracle_opt;
  double ratio_budget = 0;
  double additive_budget = 0;
  double odd_k_surcharge = 0;
  bool budget_satisfied = true;
  double wall_time = 0;
  uint64_t seed = 0;

  void refresh_budget_flag() {
    double bound = std::max(lower_bound, oracle_opt.value_or(0.0));
    if (bound <= 0) {
      budget_satisfied = true;
      return;
    }
    budget_satisfied =
        tour_length <= ratio_budget * bound + additive_budget + odd_k_surcharge + 1e-9;
  }
};

inline nlohmann::json report_to_json(const RatioReport& r) {
  nlohmann::json j = {{"instance_id", r.instance_id},
                      {"algorithm", r.algorithm},
                      {"backend", r.backend},
                      {"tour_length", r.tour_length},
                      {"lower_bound", r.lower_bound},
                      {"ratio_budget", r.ratio_budget},
                      {"additive_budget", r.additive_budget},
                      {"odd_k_surcharge", r.odd_k_surcharge},
                      {"budget_satisfied", r.budget_satisfied},
                      {"wall_time", r.wall_time},
                      {"seed", r.seed}};
  if (r.oracle_opt)
    j["oracle_opt"] = *r.oracle_opt;
  else
    j["oracle_opt"] = nullptr;
  return j;
}

// ---- solve dispatch ----

struct SolveOutcome {
  Tour tour;
  RatioReport report;
};

inline SolveOutcome solve_instance(const Instance& inst, double eps, uint64_t seed) {
  SolveOutcome out;
  std::ostringstream id;
  id << to_string(inst.kind) << "-n" << inst.size() << "-d" << inst.dim;
  out.report.instance_id = id.str();
  out.report.seed = seed;
  auto t0 = std::chrono::steady_clock::now();
  switch (inst.kind) {
    case NeighborhoodKind::hyperplanes: {
      auto res = solve_hyperplanes(inst.hyperplanes, eps, seed);
      out.tour = std::move(res.tour);
      out.report.algorithm = "hyperplanes";
      out.report.backend = "orientation-net-lp";
      out.report.lower_bound = res.lower_bound;
      out.report.ratio_budget = res.ratio_budget;
      break;
    }
    case NeighborhoodKind::lines: {
      auto res = solve_lines(inst.lines);
      out.tour = std::move(res.tour);
      out.report.algorithm = "lines";
      out.report.backend = res.solver;
      out.report.lower_bound = res.lower_bound;
      out.report.ratio_budget = res.ratio_budget;
      break;
    }
    case NeighborhoodKind::disks: {
      auto res = solve_disks(inst.balls, PointTspBackend::automatic, seed);
      out.tour = std::move(res.tour);
      out.report.algorithm = "disks";
      out.report.backend = res.backend;
      out.report.lower_bound = res.lower_bound;
      out.report.ratio_budget = res.ratio_budget;
      out.report.additive_budget = res.additive_budget;
      break;
    }
    case NeighborhoodKind::balls: {
      auto res = solve_balls(inst.balls, PointTspBackend::automatic, seed);
      out.tour = std::move(res.tour);
      out.report.algorithm = "balls";
      out.report.backend = res.backend;
      out.report.lower_bound = res.lower_bound;
      out.report.ratio_budget = res.ratio_budget;
      out.report.additive_budget = res.additive_budget;
      out.report.odd_k_surcharge = res.odd_k_surcharge;
      break;
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  out.report.tour_length = out.tour.length();
  out.report.wall_time = std::chrono::duration<double>(t1 - t0).count();
  out.report.refresh_budget_flag();
  return out;
}

}  // namespace tspn

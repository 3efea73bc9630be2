#include "doctest.h"

#include "tspn/balls.hpp"

#include "oracles.hpp"

using namespace tspn;

namespace {

std::vector<Ball> random_unit_balls(int n, Rng& rng, double range = 20.0) {
  std::vector<Ball> balls;
  for (int i = 0; i < n; ++i)
    balls.push_back(Ball({rng.uniform(0, range), rng.uniform(0, range), rng.uniform(0, range)}, 1.0));
  return balls;
}

double lattice_path_length() {
  const auto& g = build_gamma();
  return (g.points.size() - 1) * 2.0 * g.a;  // 18 sqrt 3
}

double expected_stitched_length(const BallTspResult& r) {
  return r.backbone_length + r.k * lattice_path_length() + r.odd_k_surcharge;
}

}  // namespace

TEST_CASE("lattice: the 28 points match the published grid") {
  const auto& g = build_gamma();
  REQUIRE(g.points.size() == 28);
  // 16 in the lower plane, 12 in the upper plane with the corners missing
  std::vector<std::array<int, 3>> expected;
  for (int kx : {-3, -1, 1, 3})
    for (int ky : {-3, -1, 1, 3}) expected.push_back({kx, ky, 1});
  for (int kx : {-3, -1, 1, 3})
    for (int ky : {-3, -1, 1, 3})
      if (!(std::abs(kx) == 3 && std::abs(ky) == 3)) expected.push_back({kx, ky, 3});
  REQUIRE(expected.size() == 28);
  for (const auto& e : expected) {
    bool found = false;
    for (const auto& k : g.grid) found |= (k == e);
    CHECK(found);
  }
}

TEST_CASE("lattice path: 27 edges of exact length 2/sqrt3 between the pinned endpoints") {
  const auto& g = build_gamma();
  REQUIRE(g.path.size() == 28);
  CHECK(g.grid[g.path.front()] == std::array<int, 3>{-1, -3, 1});
  CHECK(g.grid[g.path.back()] == std::array<int, 3>{-1, -3, 3});
  std::vector<char> seen(28, 0);
  for (int idx : g.path) {
    CHECK(!seen[idx]);
    seen[idx] = 1;
  }
  for (size_t i = 0; i + 1 < g.path.size(); ++i) {
    const auto& a = g.grid[g.path[i]];
    const auto& b = g.grid[g.path[i + 1]];
    int d2 = 0;
    for (int c = 0; c < 3; ++c) d2 += (a[c] - b[c]) * (a[c] - b[c]);
    CHECK(d2 == 4);  // squared distance 4 a^2 = 4/3, exactly 2a per edge
  }
  CHECK(lattice_path_length() == doctest::Approx(18.0 * std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("lattice coverage: pinned offsets") {
  CHECK(check_gamma_coverage({0, 0, 0}));  // the host ball itself, boundary-tight
  CHECK(check_gamma_coverage({0, 0, 2}));
  const auto& g = build_gamma();
  double best = 1e9;
  for (const auto& p : g.points) best = std::min(best, dist(p, {0, 0, 2}));
  CHECK(best == doctest::Approx(0.8593).epsilon(1e-3));
}

TEST_CASE("lattice coverage: admissible offsets never escape") {
  Rng rng(2025);
  int violations = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    Point u = random_unit_vector(3, rng);
    double r = 2.0 * std::cbrt(rng.uniform());
    Point off = scale(u, r);
    off[2] = std::fabs(off[2]);
    if (!check_gamma_coverage(off)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("solve_balls: single ball runs the path out and back") {
  std::vector<Ball> one = {Ball({1, 2, 3}, 1)};
  auto res = solve_balls(one);
  CHECK(res.tour.length() == doctest::Approx(2 * lattice_path_length()).epsilon(1e-9));
  CHECK(dist_polyline_ball(res.tour.vertices, true, one[0]) <= kMemberTol);
}

TEST_CASE("solve_balls: two far balls expand structurally") {
  double D = 60;
  std::vector<Ball> two = {Ball({0, 0, 0}, 1), Ball({0, 0, D}, 1)};
  auto res = solve_balls(two);
  CHECK(res.k == 2);
  CHECK(std::fabs(res.tour.length() - expected_stitched_length(res)) < 1e-6);
  for (const auto& b : two) CHECK(dist_polyline_ball(res.tour.vertices, true, b) <= kMemberTol);
}

TEST_CASE("solve_balls: validity, stitching identity, count bound, budget arithmetic") {
  Rng rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    int n = 20 + rng.uniform_int(81);
    auto balls = random_unit_balls(n, rng);
    auto res = solve_balls(balls);
    for (const auto& b : balls) CHECK(dist_polyline_ball(res.tour.vertices, true, b) <= kMemberTol);
    if (res.k >= 2) CHECK(std::fabs(res.tour.length() - expected_stitched_length(res)) < 1e-6);
    CHECK(res.k <= 3.0 * res.backbone_length + 9.0);
    CHECK(res.ratio_budget == doctest::Approx(7.0 * res.alpha + 54.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(res.additive_budget ==
          doctest::Approx(16.0 * res.alpha + 144.0 * std::sqrt(3.0)).epsilon(1e-12));
  }
}

TEST_CASE("headline budget arithmetic stays under the published caps") {
  double s3 = std::sqrt(3.0);
  CHECK(7.0 * 1.01 + 54.0 * s3 <= 100.61);
  CHECK(16.0 * 1.01 + 144.0 * s3 <= 265.6);
}

TEST_CASE("volume packing bound: tight cases and random trees") {
  SUBCASE("single point is exactly the ball volume") {
    GeomGraph g;
    g.vertices.push_back({0, 0, 0});
    double est = 0, bound = 0;
    CHECK(check_volume_packing(g, 1.0, 400000, 1, &est, &bound));
    CHECK(bound == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(std::fabs(est - bound) < 0.005 * bound);
  }
  SUBCASE("straight segment attains the bound") {
    GeomGraph g;
    g.vertices.push_back({0, 0, 0});
    g.vertices.push_back({0, 0, 2});
    g.edges.push_back({0, 1});
    double est = 0, bound = 0;
    CHECK(check_volume_packing(g, 1.0, 400000, 2, &est, &bound));
    CHECK(bound == doctest::Approx(2 * kPi + 4.0 * kPi / 3.0));
    CHECK(std::fabs(est - bound) < 0.005 * bound);
  }
  SUBCASE("random trees stay under the bound") {
    Rng rng(9);
    for (int trial = 0; trial < 6; ++trial) {
      GeomGraph g;
      int m = 2 + rng.uniform_int(7);
      for (int i = 0; i < m; ++i) g.vertices.push_back(testutil::random_point(3, rng, 4.0));
      for (int v = 1; v < m; ++v) g.edges.push_back({rng.uniform_int(v), v});
      CHECK(check_volume_packing(g, 0.7, 200000, uint64_t(trial)));
    }
  }
}

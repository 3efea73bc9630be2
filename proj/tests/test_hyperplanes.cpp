#include "doctest.h"

#include "tspn/hyperplanes.hpp"
#include "tspn/point_tsp.hpp"

#include "oracles.hpp"

using namespace tspn;

TEST_CASE("orientation net: planar counts") {
  auto quarter = build_orientation_net(2, kPi / 2);
  CHECK(quarter.rotations.size() == 4);
  auto fine = build_orientation_net(2, 0.01);
  CHECK(fine.rotations.size() == 629);  // ceil(2*pi / 0.01)
}

TEST_CASE("orientation net: planar covering within eps") {
  auto net = build_orientation_net(2, kPi / 2);
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    Rotation r = rotation_2d(rng.uniform(0, 2 * kPi));
    double best = kPi;
    for (const auto& c : net.rotations) best = std::min(best, box_orientation_distance(r, c));
    CHECK(best <= kPi / 4 + 1e-9);
  }
}

TEST_CASE("orientation net: no frame vector on a coordinate axis") {
  for (double eps : {0.7, 0.3}) {
    auto net = build_orientation_net(3, eps);
    for (const auto& r : net.rotations)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double c = std::min(1.0, std::fabs(r.at(i, j)));
          CHECK(std::acos(c) > 1e-9);
        }
  }
}

TEST_CASE("orientation net: d=3 covering radius and cardinality at eps=0.2") {
  auto net = build_orientation_net(3, 0.2);
  double h = 0.1;
  uint64_t full_grid = uint64_t(std::ceil(2 * kPi / h)) * uint64_t(std::ceil(kPi / h)) *
                       uint64_t(std::ceil(2 * kPi / h));
  // symmetry-reduced construction sits between full-grid/|box symmetries| and
  // the full grid itself
  CHECK(net.rotations.size() >= full_grid / 48);
  CHECK(net.rotations.size() <= full_grid);

  Rng rng(2024);
  double worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Rotation r = random_rotation(3, rng);
    double best = kPi;
    for (const auto& c : net.rotations) {
      double dcur = box_orientation_distance(r, c);
      if (dcur < best) best = dcur;
    }
    worst = std::max(worst, best);
  }
  CHECK(worst <= 0.1);  // eps/(d-1)
}

TEST_CASE("solve_hyperplanes: concurrent planes give a point tour") {
  std::vector<Hyperplane> planes = {Hyperplane({1, 0, 0}, 0), Hyperplane({0, 1, 0}, 0),
                                    Hyperplane({1, 1, 1}, 0)};
  auto res = solve_hyperplanes(planes, 0.3, 1);
  CHECK(res.tour.length() <= 1e-6);
}

TEST_CASE("ratio budget formula hits the d=3 headline constant") {
  CHECK(hyperplane_ratio_budget(3, 0.00022) <= 2.31);
  CHECK(hyperplane_ratio_budget(3, 0.05) == doctest::Approx(2.42487).epsilon(1e-4));
  CHECK(hyperplane_ratio_budget(3, 0.01) <= 2.333);
}

TEST_CASE("solve_hyperplanes: refinement self-consistency on a fixed instance") {
  std::vector<Hyperplane> planes = {Hyperplane({1, 0, 0}, 0), Hyperplane({0, 1, 0}, 0),
                                    Hyperplane({1, 1, 1}, 10)};
  double eps = 0.4;
  auto coarse = solve_hyperplanes(planes, eps, 1);
  auto fine = solve_hyperplanes(planes, eps / 4, 1);
  // the coarse net's best width sum is within (1+eps) of any finer net's
  CHECK(coarse.width_sum <= (1 + eps) * fine.width_sum + 1e-9);
  CHECK(fine.width_sum <= coarse.width_sum + 1e-9);
}

TEST_CASE("solve_hyperplanes: validity and ratio certificate on random instances") {
  Rng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    int d = (trial % 2) ? 2 : 3;
    int n = 4 + rng.uniform_int(10);
    std::vector<Hyperplane> planes;
    for (int i = 0; i < n; ++i) {
      Point u = random_unit_vector(d, rng);
      if (u[d - 1] < 0) u = scale(u, -1.0);
      planes.push_back(Hyperplane(u, rng.uniform(-10, 10)));
    }
    double eps = 0.25;
    auto res = solve_hyperplanes(planes, eps, uint64_t(trial));
    for (const auto& pl : planes)
      CHECK(dist_polyline_hyperplane(res.tour.vertices, true, pl) <= kMemberTol);
    if (res.lower_bound > 0)
      CHECK(res.tour.length() <= res.ratio_budget * res.lower_bound * (1 + 1e-9));
  }
}

TEST_CASE("solve_hyperplanes: adding a plane never shrinks the best perimeter") {
  Rng rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<Hyperplane> planes;
    for (int i = 0; i < 6; ++i) {
      Point u = random_unit_vector(3, rng);
      if (u[2] < 0) u = scale(u, -1.0);
      planes.push_back(Hyperplane(u, rng.uniform(-10, 10)));
    }
    auto base = solve_hyperplanes(planes, 0.35, 9);
    Point u = random_unit_vector(3, rng);
    if (u[2] < 0) u = scale(u, -1.0);
    planes.push_back(Hyperplane(u, rng.uniform(-10, 10)));
    auto more = solve_hyperplanes(planes, 0.35, 9);
    CHECK(more.width_sum >= base.width_sum - 1e-7 * (1 + base.width_sum));
  }
}

TEST_CASE("box_lower_bound: slab and concurrent examples") {
  double eps = 0.3;
  std::vector<Hyperplane> slab = {Hyperplane({1, 0, 0}, 0), Hyperplane({1, 0, 0}, 5)};
  double lb = box_lower_bound(slab, eps, 1);
  CHECK(lb == doctest::Approx((2.0 / std::sqrt(3.0)) * 5.0 / (1 + eps)).epsilon(0.01));
  std::vector<Hyperplane> conc = {Hyperplane({1, 0, 0}, 0), Hyperplane({0, 1, 0}, 0),
                                  Hyperplane({0, 0, 1}, 0)};
  CHECK(box_lower_bound(conc, eps, 1) <= 1e-8);
}

TEST_CASE("box_lower_bound is below the sampled-plane tour oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 3; ++trial) {
    int n = 3 + (trial % 2);
    std::vector<Hyperplane> planes;
    for (int i = 0; i < n; ++i) {
      Point u = random_unit_vector(3, rng);
      if (u[2] < 0) u = scale(u, -1.0);
      planes.push_back(Hyperplane(u, rng.uniform(-6, 6)));
    }
    double lb = box_lower_bound(planes, 0.25, uint64_t(trial));
    // discretized group tour over plane samplings is a valid plane tour, so
    // its exact optimum can only sit above the true optimum
    std::vector<std::vector<Point>> groups;
    for (const auto& pl : planes) groups.push_back(testutil::sample_plane(pl, 20.0, 12));
    Tour oracle = group_tsp_exact(groups);
    CHECK(lb <= oracle.length() + 1e-6);
  }
}

TEST_CASE("curve enclosure width sums obey the sqrt(d)/2 length bound over the net") {
  auto net = build_orientation_net(3, 0.4);
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    int m = 3 + rng.uniform_int(10);
    std::vector<Point> poly;
    for (int i = 0; i < m; ++i) poly.push_back(testutil::random_point(3, rng, 8.0));
    double len = 0;
    for (int i = 0; i < m; ++i) len += dist(poly[i], poly[(i + 1) % m]);
    double wsum = min_enclosing_width_sum(poly, net);
    CHECK(wsum <= (std::sqrt(3.0) / 2.0) * len * (1 + net.eps) + 1e-9);
  }
}

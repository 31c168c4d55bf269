#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "folia/metrics.hpp"

using namespace folia;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("horizontal distance along the axes") {
  auto g = heat::build_grid(8);
  auto df = metrics::cc_distance(g, g.index(0, 0, 0));
  // x and y moves cost h each; wrap makes the far side N - i steps
  for (int i = 1; i < 8; ++i) {
    CHECK(df.d[g.index(i, 0, 0)] == Catch::Approx(std::min(i, 8 - i) * g.h).epsilon(1e-12));
    CHECK(df.d[g.index(0, i, 0)] == Catch::Approx(std::min(i, 8 - i) * g.h).epsilon(1e-12));
  }
  CHECK(df.d[g.index(0, 0, 0)] == 0.0);
  CHECK(df.d.maxCoeff() < std::numeric_limits<double>::infinity());
}

TEST_CASE("vertical displacement costs match the frozen value") {
  // Reaching one z-plane up from the origin on the 8-grid takes 10 horizontal
  // moves: d((0,0,0),(0,0,1)) = 1.25. Frozen from the graph construction.
  auto g = heat::build_grid(8);
  auto df = metrics::cc_distance(g, g.index(0, 0, 0));
  CHECK(df.d[g.index(0, 0, 1)] == Catch::Approx(1.25).epsilon(1e-12));
  CHECK(df.max_rounding >= 0.0);
}

TEST_CASE("riemannian comparison distance is a lower bound") {
  auto g = heat::build_grid(8);
  int src = g.index(2, 3, 1);
  auto dh = metrics::cc_distance(g, src);
  auto dr = metrics::riemannian_distance(g, src);
  for (int i = 0; i < g.size(); ++i) CHECK(dr.d[i] <= dh.d[i] + 1e-12);
}

TEST_CASE("transport between point masses costs the pair distance") {
  MatrixXd cost(3, 3);
  cost << 0, 1, 4, 1, 0, 1, 4, 1, 0;
  VectorXd mu0 = VectorXd::Zero(3), mu1 = VectorXd::Zero(3);
  mu0[0] = 1.0;
  mu1[2] = 1.0;
  auto plan = metrics::optimal_transport(cost, mu0, mu1);
  CHECK(plan.cost == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(plan.w2 == Catch::Approx(2.0).epsilon(1e-14));
  CHECK(plan.coupling.size() == 1u);
}

TEST_CASE("transport LP matches brute force on uniform 4-point marginals") {
  // With uniform marginals on 4 atoms the optimum is attained at a
  // permutation (Birkhoff), so minimizing over all 24 is an exact oracle.
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    MatrixXd cost(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) cost(i, j) = u(rng);
    VectorXd mu = VectorXd::Constant(4, 0.25);
    auto plan = metrics::optimal_transport(cost, mu, mu);
    std::array<int, 4> perm{0, 1, 2, 3};
    double best = 1e300;
    do {
      double c = 0.0;
      for (int i = 0; i < 4; ++i) c += 0.25 * cost(i, perm[i]);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(plan.cost == Catch::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("transport duals certify optimality and marginals are exact") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 12;
  MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = u(rng);
  VectorXd mu0(n), mu1(n);
  for (int i = 0; i < n; ++i) {
    mu0[i] = u(rng) + 0.05;
    mu1[i] = u(rng) + 0.05;
  }
  mu0 /= mu0.sum();
  mu1 /= mu1.sum();
  auto plan = metrics::optimal_transport(cost, mu0, mu1);
  CHECK(plan.dual_violation < 1e-12);
  CHECK(plan.dual_value == Catch::Approx(plan.cost).margin(1e-12));
  VectorXd row = VectorXd::Zero(n), col = VectorXd::Zero(n);
  for (auto [i, j, m] : plan.coupling) {
    CHECK(m > 0.0);
    row[i] += m;
    col[j] += m;
  }
  CHECK((row - mu0).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((col - mu1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("wasserstein2 on the grid distance matrix") {
  auto g = heat::build_grid(4);
  MatrixXd dH = metrics::cc_distance_matrix(g);
  CHECK(dH.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((dH - dH.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  // W2 between a point mass and itself is zero; between two point masses it
  // is the distance.
  int a = g.index(0, 0, 0), b = g.index(2, 1, 0);
  VectorXd mu0 = VectorXd::Zero(g.size()), mu1 = VectorXd::Zero(g.size());
  mu0[a] = 1.0;
  mu1[b] = 1.0;
  CHECK(metrics::wasserstein2(dH, mu0, mu0) == Catch::Approx(0.0).margin(1e-14));
  CHECK(metrics::wasserstein2(dH, mu0, mu1) == Catch::Approx(dH(a, b)).epsilon(1e-12));
}

TEST_CASE("transport argument validation") {
  MatrixXd cost = MatrixXd::Zero(2, 3);
  VectorXd mu2 = VectorXd::Constant(2, 0.5), mu3 = VectorXd::Constant(3, 1.0 / 3.0);
  CHECK_NOTHROW(metrics::optimal_transport(cost, mu2, mu3));
  CHECK_THROWS_AS(metrics::optimal_transport(cost, mu3, mu2), std::invalid_argument);
  VectorXd neg = mu2;
  neg[0] = -0.1;
  CHECK_THROWS_AS(metrics::optimal_transport(cost, neg, mu3), std::invalid_argument);
  VectorXd heavy = mu2 * 2.0;
  CHECK_THROWS_AS(metrics::optimal_transport(cost, heavy, mu3), std::invalid_argument);
  MatrixXd big = MatrixXd::Zero(2000, 2000);
  VectorXd mub = VectorXd::Constant(2000, 1.0 / 2000.0);
  CHECK_THROWS_AS(metrics::wasserstein2(big, mub, mub), std::invalid_argument);
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "folia/calculus.hpp"
#include "folia/tolerances.hpp"

using namespace folia;
using Eigen::VectorXd;

namespace {
VectorXd origin3() { return VectorXd::Zero(3); }
}  // namespace

TEST_CASE("iterated carre du champ of f = xz at the origin") {
  // Closed form on the polarized group: Gamma_{2,eps}(xz) = 2 at the origin
  // for eps = 1 (hand computation from X1 = dx, X2 = dy + x dz, Z = dz).
  auto M = models::heisenberg_model();
  Expr f = parse_expr("x*z", {"x", "y", "z"});
  CHECK(calculus::gamma2_eps(M, f, origin3(), 1.0) == Catch::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("Bochner identities hold to machine precision") {
  std::mt19937 rng(123);
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    double worst = 0.0;
    for (int s = 0; s < 40; ++s) {
      Expr f = random_test_function(3, rng);
      VectorXd p = M.sample_point(rng);
      for (double eps : {0.1, 1.0, 10.0}) {
        auto [rh, rv] = calculus::bochner_residuals(M, f, p, eps);
        worst = std::max({worst, rh, rv});
      }
    }
    INFO(name);
    CHECK(worst < tol::bochner);
  }
}

TEST_CASE("mixed covariant Hessian blocks agree in norm") {
  std::mt19937 rng(321);
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    for (int s = 0; s < 20; ++s) {
      Expr f = random_test_function(3, rng);
      CHECK(calculus::mixed_hessian_symmetry(M, f, M.sample_point(rng)) < 1e-12);
    }
  }
}

TEST_CASE("carre du champ scaling and positivity") {
  auto M = models::heisenberg_model();
  std::mt19937 rng(17);
  for (int s = 0; s < 10; ++s) {
    Expr f = random_test_function(3, rng);
    VectorXd p = M.sample_point(rng);
    auto v = calculus::operators(M, f, p, 0.7);
    // Gamma_eps is a sum of squares
    CHECK(v.gammaEps >= 0.0);
    // quadratic scaling of the iterated form: Gamma2(3f) = 9 Gamma2(f)
    Expr f3 = Expr::constant(3.0) * f;
    CHECK(calculus::gamma2_eps(M, f3, p, 0.7) ==
          Catch::Approx(9.0 * calculus::gamma2_eps(M, f, p, 0.7)).margin(1e-9));
  }
}

TEST_CASE("generalized inequality at nu = 0 matches the classical assembly") {
  std::mt19937 rng(55);
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    for (int s = 0; s < 20; ++s) {
      Expr f = random_test_function(3, rng);
      VectorXd p = M.sample_point(rng);
      for (double eps : {0.5, 1.0, 2.0}) {
        double gap = calculus::cd_gap(M, f, p, eps, 0.0);
        double classical = calculus::cd_gap_classical(M, f, p, eps);
        CHECK(std::abs(gap - classical) <= tol::cd_classical_match *
                                               std::max(1.0, std::abs(classical)));
      }
    }
  }
}

TEST_CASE("generalized curvature-dimension gap is nonnegative on random samples") {
  std::mt19937 rng(777);
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    double min_gap = 1e300;
    for (int s = 0; s < 30; ++s) {
      Expr f = random_test_function(3, rng);
      VectorXd p = M.sample_point(rng);
      for (double eps : {0.5, 1.0, 2.0})
        for (double off : {-0.5, 0.0, 1.0, 10.0})
          min_gap = std::min(min_gap, calculus::cd_gap(M, f, p, eps, off * eps));
    }
    INFO(name);
    CHECK(min_gap >= -tol::cd_gap);
  }
}

TEST_CASE("horizontal iterated form clears the spectral bound on su2") {
  auto M = models::su2_model();
  std::mt19937 rng(31);
  double min_gap = 1e300;
  for (int s = 0; s < 30; ++s) {
    Expr f = random_test_function(3, rng);
    VectorXd p = M.sample_point(rng);
    for (double eps : {1.5, 2.0, 4.0}) min_gap = std::min(min_gap, calculus::t2_gap(M, f, p, eps));
  }
  CHECK(min_gap >= -1e-9);
}

TEST_CASE("calculus argument validation") {
  auto M = models::heisenberg_model();
  Expr f = parse_expr("x*y", {"x", "y", "z"});
  CHECK_THROWS_AS(calculus::gamma2_eps(M, f, origin3(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calculus::cd_gap(M, f, origin3(), 1.0, -1.5), std::invalid_argument);
  CHECK_THROWS_AS(calculus::cd_gap(M, f, origin3(), -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calculus::jet(f, origin3(), 5), std::invalid_argument);
}

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "folia/report.hpp"
#include "folia/tolerances.hpp"
#include "folia/verify.hpp"

using namespace folia;
using Eigen::VectorXd;

TEST_CASE("rate constant time factors and their rho = 0 limits") {
  verify::RateConstant zero{0.0};
  CHECK(zero.revls_coeff(0.25) == Catch::Approx(4.0).epsilon(1e-15));
  CHECK(zero.revp_coeff(0.25) == Catch::Approx(2.0).epsilon(1e-15));
  CHECK(zero.kernel_coeff_printed(0.25) == Catch::Approx(8.0).epsilon(1e-15));
  // continuity at the removable singularity
  verify::RateConstant tiny{1e-10};
  CHECK(tiny.revls_coeff(0.25) == Catch::Approx(4.0).epsilon(1e-8));
  CHECK(tiny.kernel_coeff_printed(0.25) == Catch::Approx(8.0).epsilon(1e-8));
  // closed forms at rho = 1
  verify::RateConstant one{1.0};
  CHECK(one.revls_coeff(0.5) == Catch::Approx(2.0 / std::expm1(1.0)).epsilon(1e-14));
  CHECK(one.kernel_coeff_printed(0.5) == Catch::Approx(2.0 / std::expm1(0.5)).epsilon(1e-14));
  CHECK(one.kernel_coeff_printed(1.0) == Catch::Approx(one.revls_coeff(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(one.revls_coeff(0.0), std::invalid_argument);
}

TEST_CASE("rate constant from model constants") {
  auto kh = models::extract_constants(models::heisenberg_model());
  CHECK(verify::RateConstant::from(kh, 1.0).rho == Catch::Approx(-1.0).epsilon(1e-12));
  auto ks = models::extract_constants(models::su2_model());
  CHECK(verify::RateConstant::from(ks, 1.0).rho == Catch::Approx(0.0).margin(1e-12));
  CHECK(verify::RateConstant::from(ks, 2.0).rho == Catch::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(verify::RateConstant::from(kh, 0.0), std::invalid_argument);
}

TEST_CASE("discrete carre du champ is nonnegative and vanishes on constants") {
  auto ctx = verify::make_context(8, 1.0);
  std::mt19937 rng(5);
  auto f = verify::random_positive_field(ctx.grid, rng);
  VectorXd g = verify::carre_du_champ(ctx.GH, f.values);
  CHECK(g.minCoeff() >= 0.0);
  VectorXd ones = VectorXd::Ones(ctx.grid.size());
  CHECK(verify::carre_du_champ(ctx.G, ones).maxCoeff() < 1e-12);
  // energy identity: mean of Gamma equals the Dirichlet form
  CHECK(verify::integral(verify::carre_du_champ(ctx.G, f.values)) ==
        Catch::Approx(verify::dirichlet_energy(ctx.G, f.values)).margin(1e-12));
}

TEST_CASE("entropy functional basics") {
  VectorXd u = VectorXd::Constant(10, 3.0);
  CHECK(verify::entropy(u) == Catch::Approx(0.0).margin(1e-14));
  VectorXd v(2);
  v << 0.5, 1.5;
  CHECK(verify::entropy(v) > 0.0);
  VectorXd bad(2);
  bad << 1.0, 0.0;
  CHECK_THROWS_AS(verify::entropy(bad), std::invalid_argument);
}

TEST_CASE("gradient and reverse bounds pass on a small grid") {
  auto ctx = verify::make_context(8, 1.0);
  auto k = models::extract_constants(models::heisenberg_model());
  std::mt19937 rng(2024);
  std::vector<heat::Field> fields;
  for (int q = 0; q < 4; ++q) fields.push_back(verify::random_positive_field(ctx.grid, rng));
  auto grad = verify::check_gradient_bounds(ctx, k, 0.05, fields, tol::tau(tol::C_gradient, 8));
  CHECK(grad.status == "PASS");
  CHECK(grad.margins.size() == 12u);
  auto rev = verify::check_reverse_inequalities(ctx, k, 0.05, fields, tol::tau(tol::C_reverse, 8));
  CHECK(rev.status == "PASS");
  // reverse-Poincare margin grows with t (coefficient decays like 1/t)
  auto rev_late = verify::check_reverse_inequalities(ctx, k, 0.2, fields, 0.25);
  CHECK(rev_late.status == "PASS");
}

TEST_CASE("Wang and log-Harnack inequalities on a small grid") {
  auto ctx = verify::make_context(8, 1.0);
  auto k = models::extract_constants(models::heisenberg_model());
  std::mt19937 rng(11);
  auto f = verify::random_positive_field(ctx.grid, rng);
  auto pairs = verify::sample_pairs(ctx.grid, 20, rng);
  auto wang = verify::check_wang_harnack(ctx, k, 0.05, 2.0, f, pairs, tol::tau(tol::C_harnack, 8));
  CHECK(wang.status == "PASS");
  // x = y pairs are the pure Jensen case: the discrete semigroup satisfies
  // them with no tolerance at all
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].x == pairs[i].y) CHECK(wang.margins[i] >= -1e-12);
  // alpha -> infinity weakens the exponent, margins cannot tighten to failure
  auto wang4 = verify::check_wang_harnack(ctx, k, 0.05, 4.0, f, pairs, tol::tau(tol::C_harnack, 8));
  CHECK(wang4.status == "PASS");
  auto lh = verify::check_log_harnack_and_kernel(ctx, k, 0.05, f, pairs,
                                                 tol::tau(tol::C_harnack, 8));
  CHECK(lh.status == "PASS");
  CHECK(lh.extras.count("kernel_min_margin_printed") == 1u);
  CHECK(lh.extras.at("kernel_min_margin_printed") >= 0.0);
  CHECK_THROWS_AS(verify::check_wang_harnack(ctx, k, 0.05, 1.0, f, pairs, 0.1),
                  std::invalid_argument);
}

TEST_CASE("spectral-gap Poincare inequality") {
  auto su2 = verify::check_poincare("su2", 2.0);
  CHECK(su2.status == "PASS");
  CHECK(su2.tolerance == 0.0);
  CHECK(su2.extras.at("spectral_gap") == Catch::Approx(4.0).epsilon(1e-14));
  CHECK(su2.extras.at("spectral_bound") == Catch::Approx(2.0).epsilon(1e-14));
  auto h = verify::check_poincare("heisenberg", 1.0);
  CHECK(h.status == "NOT-APPLICABLE");
}

TEST_CASE("entropy-Wasserstein bound with a self coupling") {
  auto ctx = verify::make_context(6, 1.0);
  auto k = models::extract_constants(models::heisenberg_model());
  std::mt19937 rng(3);
  auto f = verify::random_positive_field(ctx.grid, rng);
  auto g = verify::random_positive_field(ctx.grid, rng);
  std::vector<std::pair<heat::Field, heat::Field>> pairs{{f, g}, {f, f}};
  auto rep = verify::check_entropy_wasserstein(ctx, k, 0.05, pairs,
                                               tol::tau(tol::C_entropy_wasserstein, 6));
  CHECK(rep.status == "PASS");
  CHECK(rep.extras.at("max_dual_violation") < 1e-9);
  // with g = f the transport term vanishes and the margin reduces to the
  // entropy decay Ent(f) - Ent(P_t f) >= 0
  CHECK(rep.margins[1] >= -1e-12);
}

TEST_CASE("log-Sobolev constant estimate is pinned by the spectral gap") {
  auto ctx = verify::make_context(8, 1.0);
  std::mt19937 rng(21);
  std::vector<heat::Field> fields;
  for (int q = 0; q < 6; ++q) fields.push_back(verify::random_positive_field(ctx.grid, rng));
  auto est = verify::estimate_lsi_constant(ctx, fields);
  CHECK(est.used >= 6);
  CHECK(est.lambda1 == Catch::Approx(128.0 * (1.0 - std::cos(M_PI / 4.0))).epsilon(1e-9));
  CHECK(est.c_hat >= est.poincare_lower * 0.95);
  CHECK(est.c_hat < 10.0 * est.poincare_lower);
}

TEST_CASE("refinement study passes with true constants on small grids") {
  auto rep = verify::refinement_study("gradient_e2", {8, 12}, 1.0, 0.05, 2.0, 3, 2024, 2.0);
  CHECK(rep.status == "PASS");
  CHECK(rep.refinement.size() == 2u);
  CHECK_THROWS_AS(verify::refinement_study("nope", {8}, 1.0, 0.05, 2.0, 1, 1, 2.0),
                  std::invalid_argument);
}

TEST_CASE("sensitivity canary separates true from falsified constants") {
  auto M = models::heisenberg_model();
  auto rep = verify::sensitivity_canary(M, 25, {0.5, 1.0, 2.0}, {-0.5, 0.0, 1.0, 10.0}, 2024,
                                        1e-3);
  CHECK(rep.status == "PASS");
  CHECK(rep.extras.at("min_gap_true") >= -1e-3);
  CHECK(rep.extras.at("min_gap_mutated") < -0.01);
}

TEST_CASE("reports serialize deterministically") {
  auto ctx = verify::make_context(6, 1.0);
  auto k = models::extract_constants(models::heisenberg_model());
  auto run = [&](unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<heat::Field> fields{verify::random_positive_field(ctx.grid, rng)};
    auto rep = verify::check_gradient_bounds(ctx, k, 0.05, fields, 0.1);
    return report::to_json(rep).dump(2);
  };
  CHECK(run(7) == run(7));
  CHECK(run(7) != run(8));
}

TEST_CASE("binary field round trip") {
  auto grid = heat::build_grid(6);
  std::mt19937 rng(9);
  auto f = verify::random_positive_field(grid, rng);
  std::string path = "field_roundtrip.bin";
  report::write_field(path, f, 1.0, 0.25);
  auto g = report::read_field(path, grid);
  CHECK((g.values - f.values).cwiseAbs().maxCoeff() == 0.0);
  auto other = heat::build_grid(8);
  CHECK_THROWS_AS(report::read_field(path, other), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("config hash is stable") {
  CHECK(report::config_hash("abc") == report::config_hash("abc"));
  CHECK(report::config_hash("abc") != report::config_hash("abd"));
  CHECK(report::config_hash("").size() == 16u);
}

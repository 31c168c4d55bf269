// Acceptance gate: one criterion per line, nonzero exit if any fails.
// Every check runs against frozen tolerances; seeds are fixed so the run is
// reproducible bit for bit.

#include <unsupported/Eigen/MatrixFunctions>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "folia/report.hpp"
#include "folia/tolerances.hpp"
#include "folia/verify.hpp"

using namespace folia;
using Eigen::VectorXd;

namespace {

int failures = 0;

void line(int num, const std::string& what, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << num << ": " << what << " ("
            << detail << ")" << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// 1. Closed-form Ricci of the canonical variation vs direct computation.
void criterion1() {
  double worst = 0.0;
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0})
      worst = std::max(worst, models::ricci_formula_residual(M, eps));
  }
  line(1, "Ricci closed form, eps in {1/4..4}, both models", worst < tol::ricci_formula,
       "max residual " + fmt(worst));
}

// 2. Bochner identities on random test functions.
void criterion2() {
  std::mt19937 rng(101);
  double worst = 0.0;
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    for (int s = 0; s < 200; ++s) {
      Expr f = random_test_function(3, rng);
      VectorXd p = M.sample_point(rng);
      for (double eps : {0.1, 1.0, 10.0}) {
        auto [rh, rv] = calculus::bochner_residuals(M, f, p, eps);
        worst = std::max({worst, rh, rv});
      }
    }
  }
  line(2, "Bochner identities, 200 samples per model", worst < tol::bochner,
       "max residual " + fmt(worst));
}

// 3. Generalized curvature-dimension inequality plus the nu = 0 classical match.
void criterion3() {
  double min_gap = 1e300, max_diff = 0.0;
  for (const char* name : {"heisenberg", "su2"}) {
    auto M = models::load_model(name);
    int total = M.name == "heisenberg" ? 400 : 100;
    auto ensemble = verify::cd_sample_ensemble(M, total, 2024);
    for (const auto& [f, p] : ensemble)
      for (double eps : {0.5, 1.0, 2.0})
        for (double off : {-0.5, 0.0, 1.0, 10.0}) {
          double gap = calculus::cd_gap(M, f, p, eps, off * eps);
          min_gap = std::min(min_gap, gap);
          if (off == 0.0) {
            double classical = calculus::cd_gap_classical(M, f, p, eps);
            max_diff = std::max(max_diff, std::abs(gap - classical) /
                                              std::max(1.0, std::abs(classical)));
          }
        }
  }
  bool ok = min_gap >= -tol::cd_gap && max_diff <= tol::cd_classical_match;
  line(3, "curvature-dimension inequality, 500 samples, nu sweep", ok,
       "min gap " + fmt(min_gap) + ", nu=0 classical diff " + fmt(max_diff));
}

// 4. Sensitivity canary: halving kappa must break the tight samples.
void criterion4() {
  auto rep = verify::sensitivity_canary(models::heisenberg_model(), 50, {0.5, 1.0, 2.0},
                                        {-0.5, 0.0, 1.0, 10.0}, 2024, 1e-3);
  bool ok = rep.status == "PASS" && rep.extras.at("min_gap_mutated") < -0.01;
  line(4, "falsified-constant canary on the tight ensemble", ok,
       "true " + fmt(rep.extras.at("min_gap_true")) + ", mutated " +
           fmt(rep.extras.at("min_gap_mutated")));
}

// 5. Heat discretization exactness: conservation, symmetry, expm accuracy.
void criterion5() {
  auto grid = heat::build_grid(8);
  auto G = heat::assemble_generator(grid, 1.0);
  Eigen::MatrixXd L(G.L);
  double asym = (L - L.transpose()).cwiseAbs().maxCoeff();
  std::mt19937 rng(77);
  auto f = verify::random_positive_field(grid, rng);
  auto ptf = heat::evolve(f, G, 0.05);
  double drift = std::abs(ptf.mass() - f.mass());
  VectorXd exact = (0.05 * L).exp() * f.values;
  auto cn = heat::evolve(f, G, 0.05, heat::Scheme::CrankNicolson);
  double rel = (cn.values - exact).norm() / exact.norm();
  bool ok = asym < tol::self_adjointness && drift < tol::mass_conservation &&
            rel < tol::expm_rel_error;
  line(5, "heat generator exactness and expm accuracy", ok,
       "asym " + fmt(asym) + ", mass drift " + fmt(drift) + ", expm rel " + fmt(rel));
}

// 6. Gradient bound under grid refinement.
void criterion6() {
  bool ok = true;
  std::string detail;
  for (double t : {0.01, 0.05}) {
    auto rep = verify::refinement_study("gradient_e2", {12, 16, 24}, 1.0, t, 2.0, 20, 2024,
                                        tol::C_gradient);
    if (rep.status != "PASS") ok = false;
    detail += "t=" + fmt(t) + " min " + fmt(rep.min_margin) + "; ";
  }
  line(6, "gradient bound refinement N in {12,16,24}", ok, detail);
}

// 7. Wang and log-Harnack inequalities, including the exact x = y Jensen cases.
void criterion7() {
  auto ctx = verify::make_context(12, 1.0);
  auto k = models::extract_constants(models::heisenberg_model());
  std::mt19937 rng(2024);
  auto f = verify::random_positive_field(ctx.grid, rng);
  auto pairs = verify::sample_pairs(ctx.grid, 50, rng);
  bool ok = true;
  double worst = 1e300, worst_diag = 1e300;
  for (double alpha : {1.5, 2.0, 4.0}) {
    auto rep = verify::check_wang_harnack(ctx, k, 0.05, alpha, f, pairs,
                                          tol::tau(tol::C_harnack, 12));
    if (rep.status != "PASS") ok = false;
    worst = std::min(worst, rep.min_margin);
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (pairs[i].x == pairs[i].y) worst_diag = std::min(worst_diag, rep.margins[i]);
  }
  auto lh = verify::check_log_harnack_and_kernel(ctx, k, 0.05, f, pairs,
                                                 tol::tau(tol::C_harnack, 12));
  if (lh.status != "PASS") ok = false;
  worst = std::min(worst, lh.min_margin);
  if (worst_diag < -1e-12) ok = false;
  line(7, "Wang/log-Harnack, alpha in {1.5,2,4}, 50 pairs", ok,
       "min margin " + fmt(worst) + ", x=y min " + fmt(worst_diag));
}

// 8. Spectral-gap Poincare inequality with zero tolerance.
void criterion8() {
  auto a = verify::check_poincare("su2", 2.0);
  auto b = verify::check_poincare("su2", 4.0);
  auto h = verify::check_poincare("heisenberg", 1.0);
  bool ok = a.status == "PASS" && b.status == "PASS" && h.status == "NOT-APPLICABLE";
  line(8, "Poincare via spectral gap (su2), hypothesis gate (heisenberg)", ok,
       "su2 margins " + fmt(a.min_margin) + ", " + fmt(b.min_margin) + "; heisenberg " +
           h.status);
}

// 9. Entropy-Wasserstein bound with the exact transport LP.
void criterion9() {
  auto ctx = verify::make_context(8, 1.0);
  auto k = models::extract_constants(models::heisenberg_model());
  bool ok = true;
  double worst = 1e300, self_worst = 1e300;
  for (double t : {0.02, 0.05}) {
    std::mt19937 rng(2024);
    std::vector<std::pair<heat::Field, heat::Field>> pairs;
    for (int q = 0; q < 4; ++q)
      pairs.emplace_back(verify::random_positive_field(ctx.grid, rng),
                         verify::random_positive_field(ctx.grid, rng));
    auto f = verify::random_positive_field(ctx.grid, rng);
    pairs.emplace_back(f, f);  // self coupling: reduces to entropy decay
    auto rep = verify::check_entropy_wasserstein(ctx, k, t, pairs,
                                                 tol::tau(tol::C_entropy_wasserstein, 8));
    if (rep.status != "PASS" || rep.extras.at("max_dual_violation") > 1e-9) ok = false;
    worst = std::min(worst, rep.min_margin);
    self_worst = std::min(self_worst, rep.margins.back());
  }
  if (self_worst < -1e-12) ok = false;
  line(9, "entropy-Wasserstein bound, certified transport LP", ok,
       "min margin " + fmt(worst) + ", self coupling " + fmt(self_worst));
}

// 10. Log-Sobolev constant estimate: stable across N, pinned by 2/lambda1.
void criterion10() {
  bool ok = true;
  double lo = 1e300, hi = 0.0;
  std::string detail;
  for (int N : {12, 16, 24}) {
    auto ctx = verify::make_context(N, 1.0);
    std::mt19937 rng(2024);
    std::vector<heat::Field> fields;
    for (int q = 0; q < 10; ++q) fields.push_back(verify::random_positive_field(ctx.grid, rng));
    auto est = verify::estimate_lsi_constant(ctx, fields);
    if (est.c_hat < est.poincare_lower * 0.95) ok = false;
    lo = std::min(lo, est.c_hat);
    hi = std::max(hi, est.c_hat);
    detail += "N=" + std::to_string(N) + " C^=" + fmt(est.c_hat) + "; ";
  }
  if (hi > lo * 1.2) ok = false;
  line(10, "log-Sobolev constant estimate stable across N", ok, detail);
}

// 11. Determinism: identical seeds produce byte-identical report files.
void criterion11() {
  namespace fs = std::filesystem;
  auto produce = [](const fs::path& dir) {
    fs::create_directories(dir);
    auto ctx = verify::make_context(8, 1.0);
    auto k = models::extract_constants(models::heisenberg_model());
    std::mt19937 rng(2024);
    std::vector<heat::Field> fields;
    for (int q = 0; q < 3; ++q) fields.push_back(verify::random_positive_field(ctx.grid, rng));
    auto grad = verify::check_gradient_bounds(ctx, k, 0.05, fields, tol::tau(tol::C_gradient, 8));
    report::write_json((dir / "gradient.json").string(), report::to_json(grad));
    report::write_margins_csv((dir / "gradient.csv").string(), grad);
    auto canary = verify::sensitivity_canary(models::heisenberg_model(), 10, {1.0}, {0.0, 1.0},
                                             2024, 1e-3);
    report::write_json((dir / "canary.json").string(), report::to_json(canary));
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  fs::path base = fs::temp_directory_path() / "folia_determinism";
  produce(base / "a");
  produce(base / "b");
  bool ok = true;
  int compared = 0;
  for (const char* f : {"gradient.json", "gradient.csv", "canary.json"}) {
    std::string a = slurp(base / "a" / f), b = slurp(base / "b" / f);
    if (a.empty() || a != b) ok = false;
    ++compared;
  }
  fs::remove_all(base);
  line(11, "byte-identical reports from identical seeds", ok,
       std::to_string(compared) + " files compared");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  if (failures == 0)
    std::cout << "all 11 acceptance criteria passed" << std::endl;
  else
    std::cout << failures << " acceptance criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}

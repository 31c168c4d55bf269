// Command-line front end: model validation, pointwise curvature checks, heat
// evolution, distances, optimal transport, and the inequality harness.
// Reports are JSON (plus CSV margin tables); a manifest ties a run together.
// Seeded runs are byte-for-bit reproducible; wall-clock timings live only in
// the manifest.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "folia/report.hpp"
#include "folia/tolerances.hpp"
#include "folia/verify.hpp"

namespace fs = std::filesystem;
using namespace folia;
using nlohmann::json;

namespace {

std::string output_dir() {
  const char* env = std::getenv("OUTPUT_DIR");
  std::string dir = env ? env : "out";
  fs::create_directories(dir);
  return dir;
}

double elapsed(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_validate(const std::string& model) {
  auto M = models::load_model(model);
  auto rep = models::validate_structure(M);
  json j = report::to_json(rep);
  j["model"] = model;
  std::string path = output_dir() + "/validate_" + model + ".json";
  report::write_json(path, j);
  std::cout << j.dump(2) << "\n";
  return rep.all_ok() ? 0 : 1;
}

int run_pointwise(const std::string& model, const std::string& check, int samples, unsigned seed) {
  auto M = models::load_model(model);
  json j;
  j["model"] = model;
  j["check"] = check;
  j["samples"] = samples;
  j["seed"] = seed;
  bool ok = true;
  if (check == "ricci") {
    double worst = 0.0;
    for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0})
      worst = std::max(worst, models::ricci_formula_residual(M, eps));
    j["max_residual"] = worst;
    ok = worst < tol::ricci_formula;
  } else if (check == "bochner") {
    std::mt19937 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      Expr f = random_test_function(M.dim(), rng);
      auto p = M.sample_point(rng);
      for (double eps : {0.1, 1.0, 10.0}) {
        auto [rh, rv] = calculus::bochner_residuals(M, f, p, eps);
        worst = std::max({worst, rh, rv});
      }
    }
    j["max_residual"] = worst;
    ok = worst < tol::bochner;
  } else if (check == "cd") {
    auto ensemble = verify::cd_sample_ensemble(M, samples, seed);
    double min_gap = std::numeric_limits<double>::infinity();
    double max_nu0_diff = 0.0;
    for (const auto& [f, p] : ensemble)
      for (double eps : {0.5, 1.0, 2.0})
        for (double off : {-0.5, 0.0, 1.0, 10.0}) {
          double gap = calculus::cd_gap(M, f, p, eps, off * eps);
          min_gap = std::min(min_gap, gap);
          if (off == 0.0)
            max_nu0_diff = std::max(
                max_nu0_diff, std::abs(gap - calculus::cd_gap_classical(M, f, p, eps)));
        }
    j["min_gap"] = min_gap;
    j["max_nu0_classical_diff"] = max_nu0_diff;
    ok = min_gap >= -tol::cd_gap && max_nu0_diff <= tol::cd_classical_match;
  } else {
    std::cerr << "unknown pointwise check '" << check << "'\n";
    return 2;
  }
  j["pass"] = ok;
  report::write_json(output_dir() + "/pointwise_" + model + "_" + check + ".json", j);
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

int run_heat(int N, double eps, double t, const std::string& scheme_name,
             const std::string& field_out) {
  auto ctx = verify::make_context(N, eps);
  heat::Scheme scheme =
      scheme_name == "cn" ? heat::Scheme::CrankNicolson : heat::Scheme::ExplicitEuler;
  std::mt19937 rng(2024);
  auto f = verify::random_positive_field(ctx.grid, rng);
  auto ptf = heat::evolve(f, ctx.G, t, scheme);
  json j;
  j["N"] = N;
  j["eps"] = eps;
  j["t"] = t;
  j["scheme"] = scheme_name;
  j["mass_before"] = f.mass();
  j["mass_after"] = ptf.mass();
  j["mass_drift"] = std::abs(ptf.mass() - f.mass());
  if (!field_out.empty()) report::write_field(field_out, ptf, eps, t);
  report::write_json(output_dir() + "/heat.json", j);
  std::cout << j.dump(2) << "\n";
  return j["mass_drift"].get<double>() < tol::mass_conservation ? 0 : 1;
}

int run_distance(int N, int si, int sj, int sk) {
  auto grid = heat::build_grid(N);
  auto df = metrics::cc_distance(grid, grid.index(si, sj, sk));
  json j;
  j["N"] = N;
  j["source"] = {si, sj, sk};
  j["max_distance"] = df.d.maxCoeff();
  j["max_rounding_radius"] = df.max_rounding;
  std::string csv = output_dir() + "/distance.csv";
  std::ofstream out(csv);
  out << "i,j,k,distance,rounding\n" << std::setprecision(17);
  for (int idx = 0; idx < grid.size(); ++idx) {
    int i, jj, k;
    grid.coords(idx, i, jj, k);
    out << i << "," << jj << "," << k << "," << df.d[idx] << "," << df.rounding[idx] << "\n";
  }
  report::write_json(output_dir() + "/distance.json", j);
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_wasserstein(int N, unsigned seed) {
  if (N > 10) {
    std::cerr << "wasserstein: exact LP limited to N <= 10\n";
    return 2;
  }
  auto grid = heat::build_grid(N);
  auto dH = metrics::cc_distance_matrix(grid);
  std::mt19937 rng(seed);
  auto f = verify::random_positive_field(grid, rng);
  auto g = verify::random_positive_field(grid, rng);
  Eigen::VectorXd mu0 = f.values / f.values.sum();
  Eigen::VectorXd mu1 = g.values / g.values.sum();
  auto plan = metrics::optimal_transport(Eigen::MatrixXd(dH.array().square()), mu0, mu1);
  json j;
  j["N"] = N;
  j["seed"] = seed;
  j["w2"] = plan.w2;
  j["cost"] = plan.cost;
  j["dual_value"] = plan.dual_value;
  j["dual_violation"] = plan.dual_violation;
  j["coupling_size"] = plan.coupling.size();
  report::write_json(output_dir() + "/wasserstein.json", j);
  std::cout << j.dump(2) << "\n";
  return plan.dual_violation < 1e-9 ? 0 : 1;
}

struct VerifyOptions {
  std::string model = "heisenberg";
  std::string check = "all";
  int N = 12;
  double eps = 1.0;
  double t = 0.05;
  double alpha = 2.0;
  unsigned seed = 2024;
  int fields = 10;
  int pairs = 30;
};

int run_verify(const VerifyOptions& o) {
  std::ostringstream cfg;
  cfg << o.model << "|" << o.check << "|" << o.N << "|" << o.eps << "|" << o.t << "|" << o.alpha
      << "|" << o.seed;
  report::Manifest manifest;
  manifest.config = cfg.str();
  auto k = models::extract_constants(models::load_model(o.model));
  std::vector<verify::CheckReport> reports;
  auto want = [&](const std::string& id) { return o.check == "all" || o.check == id; };
  auto t0 = std::chrono::steady_clock::now();

  if (want("poincare")) reports.push_back(verify::check_poincare(o.model, o.eps));

  if (o.model == "heisenberg") {
    bool need_grid = want("gradient") || want("reverse") || want("wang") || want("log_harnack") ||
                     want("canary");
    if (need_grid) {
      auto ctx = verify::make_context(o.N, o.eps);
      std::mt19937 rng(o.seed);
      std::vector<heat::Field> fields;
      for (int q = 0; q < o.fields; ++q)
        fields.push_back(verify::random_positive_field(ctx.grid, rng));
      auto pairs = verify::sample_pairs(ctx.grid, o.pairs, rng);
      if (want("gradient"))
        reports.push_back(verify::check_gradient_bounds(ctx, k, o.t, fields,
                                                        tol::tau(tol::C_gradient, o.N)));
      if (want("reverse"))
        reports.push_back(verify::check_reverse_inequalities(ctx, k, o.t, fields,
                                                             tol::tau(tol::C_reverse, o.N)));
      if (want("wang"))
        reports.push_back(verify::check_wang_harnack(ctx, k, o.t, o.alpha, fields[0], pairs,
                                                     tol::tau(tol::C_harnack, o.N)));
      if (want("log_harnack"))
        reports.push_back(verify::check_log_harnack_and_kernel(ctx, k, o.t, fields[0], pairs,
                                                               tol::tau(tol::C_harnack, o.N)));
    }
    if (want("entropy_wasserstein")) {
      auto ctx8 = verify::make_context(8, o.eps);
      std::mt19937 rng(o.seed + 1);
      std::vector<std::pair<heat::Field, heat::Field>> fg;
      for (int q = 0; q < 5; ++q)
        fg.emplace_back(verify::random_positive_field(ctx8.grid, rng),
                        verify::random_positive_field(ctx8.grid, rng));
      reports.push_back(verify::check_entropy_wasserstein(
          ctx8, k, o.t, fg, tol::tau(tol::C_entropy_wasserstein, 8)));
    }
    if (want("canary"))
      reports.push_back(verify::sensitivity_canary(models::load_model(o.model), 50,
                                                   {0.5, 1.0, 2.0}, {-0.5, 0.0, 1.0, 10.0},
                                                   o.seed, 1e-3));
  }

  bool any_fail = false;
  std::string dir = output_dir();
  for (const auto& r : reports) {
    std::string base = dir + "/verify_" + o.model + "_" + r.id;
    report::write_json(base + ".json", report::to_json(r));
    report::write_margins_csv(base + "_margins.csv", r);
    manifest.report_paths.push_back(base + ".json");
    manifest.timings_sec.push_back(elapsed(t0));
    if (r.status == "FAIL") any_fail = true;
    std::cout << r.id << ": " << r.status << " (min margin " << r.min_margin << ", tol "
              << r.tolerance << ")\n";
  }
  report::write_json(dir + "/manifest.json", manifest.to_json());
  return any_fail ? 1 : 0;
}

int run_report(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    std::cerr << "cannot open manifest " << manifest_path << "\n";
    return 2;
  }
  json m = json::parse(in);
  std::cout << "check                          model        min margin    tolerance   status\n";
  for (const auto& path : m["reports"]) {
    std::ifstream rin(path.get<std::string>());
    if (!rin) {
      std::cerr << "missing report " << path << "\n";
      return 2;
    }
    json r = json::parse(rin);
    std::ostringstream line;
    line.setf(std::ios::left);
    line.width(31);
    line << r["id"].get<std::string>();
    line.width(13);
    line << r["model"].get<std::string>();
    line.setf(std::ios::right);
    std::ostringstream mm, tt;
    mm.precision(4);
    mm << std::scientific << r["min_margin"].get<double>();
    tt.precision(4);
    tt << std::scientific << r["tolerance"].get<double>();
    std::cout << line.str() << mm.str() << "    " << tt.str() << "   "
              << r["status"].get<std::string>() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification laboratory for totally geodesic Riemannian foliations"};
  app.require_subcommand(1);

  std::string model = "heisenberg", check = "all", scheme = "ee", field_out, manifest_path;
  int N = 12, samples = 200, si = 0, sj = 0, sk = 0;
  double eps = 1.0, t = 0.05, alpha = 2.0;
  unsigned seed = 2024;

  auto* validate = app.add_subcommand("validate", "structural checks of a model foliation");
  validate->add_option("model", model)->required();

  auto* pointwise = app.add_subcommand("pointwise", "exact-jet curvature checks");
  pointwise->add_option("model", model)->required();
  pointwise->add_option("--check", check, "ricci|bochner|cd")->required();
  pointwise->add_option("--samples", samples);
  pointwise->add_option("--seed", seed);

  auto* heat_cmd = app.add_subcommand("heat", "evolve the heat semigroup on the nilmanifold grid");
  heat_cmd->add_option("--N", N);
  heat_cmd->add_option("--eps", eps);
  heat_cmd->add_option("--t", t);
  heat_cmd->add_option("--scheme", scheme, "ee|cn");
  heat_cmd->add_option("--field-out", field_out);

  auto* dist = app.add_subcommand("distance", "sub-elliptic distance field by Dijkstra");
  dist->add_option("--N", N);
  dist->add_option("--i", si);
  dist->add_option("--j", sj);
  dist->add_option("--k", sk);

  auto* wass = app.add_subcommand("wasserstein", "exact 2-Wasserstein distance on a small grid");
  wass->add_option("--N", N);
  wass->add_option("--seed", seed);

  VerifyOptions vo;
  auto* ver = app.add_subcommand("verify", "semigroup inequality harness");
  ver->add_option("model", vo.model)->required();
  ver->add_option("--check", vo.check,
                  "all|gradient|reverse|wang|log_harnack|poincare|entropy_wasserstein|canary");
  ver->add_option("--N", vo.N);
  ver->add_option("--eps", vo.eps);
  ver->add_option("--t", vo.t);
  ver->add_option("--alpha", vo.alpha);
  ver->add_option("--seed", vo.seed);
  ver->add_option("--fields", vo.fields);
  ver->add_option("--pairs", vo.pairs);

  auto* rep = app.add_subcommand("report", "summarize a run manifest");
  rep->add_option("manifest", manifest_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return run_validate(model);
    if (*pointwise) return run_pointwise(model, check, samples, seed);
    if (*heat_cmd) return run_heat(N, eps, t, scheme, field_out);
    if (*dist) return run_distance(N, si, sj, sk);
    if (*wass) return run_wasserstein(N, seed);
    if (*ver) return run_verify(vo);
    if (*rep) return run_report(manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

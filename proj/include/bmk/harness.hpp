#pragma once

// Experiment orchestration behind the command-line front end: a single
// config struct (JSON file keys == CLI flags, flags override the file),
// a dispatcher that writes reports, and the exit-code contract
// 0 = all checks passed, 2 = a check failed, 1 = error.

#include <string>
#include <vector>

#include "bmk/report.hpp"

namespace bmk {

struct ExperimentConfig {
  std::string operation;  // spectrum | verify | stability | solve | equivalence | catalog
  std::string variant;    // verify: bm | lp-bm | p-bm | lp-mink
  int dim = 2;
  int modes = 0;  // band limit; 0 = dimension default
  unsigned long long seed = 0;
  std::string out;  // JSON report path; empty = no file
  std::string csv;  // optional CSV path (equivalence margins)
  std::vector<std::string> bodies;
  std::vector<CatalogEntry> extra_catalog;
  std::string phi = "h_K";  // stability probe direction: h_K | random
  double p = 0.5;
  double p_star = 0.5;
  double lambda = 0.5;
  int lambda_grid = 11;
  int trials = 100;
  double noise = 0.05;
  double f_const = 0.0;            // solve: constant right-hand side
  std::string from_body;           // solve: round-trip data from a catalog body
  std::vector<double> f_coeffs;    // solve: inline spectral coefficients
};

inline ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    const nlohmann::json& v = it.value();
    try {
      if (k == "operation") cfg.operation = v.get<std::string>();
      else if (k == "variant") cfg.variant = v.get<std::string>();
      else if (k == "dim") cfg.dim = v.get<int>();
      else if (k == "modes") cfg.modes = v.get<int>();
      else if (k == "seed") cfg.seed = v.get<unsigned long long>();
      else if (k == "out") cfg.out = v.get<std::string>();
      else if (k == "csv") cfg.csv = v.get<std::string>();
      else if (k == "bodies") cfg.bodies = v.get<std::vector<std::string>>();
      else if (k == "body") cfg.bodies = {v.get<std::string>()};
      else if (k == "catalog") cfg.extra_catalog = parse_catalog_json(v);
      else if (k == "phi") cfg.phi = v.get<std::string>();
      else if (k == "p") cfg.p = v.get<double>();
      else if (k == "p_star") cfg.p_star = v.get<double>();
      else if (k == "lambda") cfg.lambda = v.get<double>();
      else if (k == "lambda_grid") cfg.lambda_grid = v.get<int>();
      else if (k == "trials") cfg.trials = v.get<int>();
      else if (k == "noise") cfg.noise = v.get<double>();
      else if (k == "f_const") cfg.f_const = v.get<double>();
      else if (k == "from_body") cfg.from_body = v.get<std::string>();
      else if (k == "f_coeffs") cfg.f_coeffs = v.get<std::vector<double>>();
      else throw ConfigError("config: unknown key '" + k + "'");
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config: bad value for key '" + k + "'");
    }
  }
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("config: dim must be 2 or 3");
  if (cfg.modes < 0) throw ConfigError("config: modes must be positive");
  if (cfg.lambda_grid < 2) throw ConfigError("config: lambda_grid must be >= 2");
  if (cfg.trials < 0) throw ConfigError("config: trials must be nonnegative");
  if (cfg.noise < 0) throw ConfigError("config: noise must be nonnegative");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(doc);
}

struct RunResult {
  int exit_code = 0;  // 0 pass, 2 check failure
  nlohmann::json report;
};

namespace detail {

inline BodyRep body_by_name(const ExperimentConfig& cfg, const Discretization& disc,
                            const std::string& name) {
  auto cat = merge_catalog(cfg.dim, cfg.extra_catalog);
  return make_body(find_body(cat, name), disc);
}

inline const std::string& body_arg(const ExperimentConfig& cfg, size_t i) {
  if (cfg.bodies.size() <= i)
    throw ConfigError("config: operation '" + cfg.operation + "' needs " +
                      std::to_string(i + 1) + " body name(s) under 'bodies'");
  return cfg.bodies[i];
}

}  // namespace detail

inline RunResult run(const ExperimentConfig& cfg) {
  auto disc = make_discretization(cfg.dim, cfg.modes);
  RunResult rr;
  nlohmann::json body;

  if (cfg.operation == "spectrum") {
    auto K = detail::body_by_name(cfg, disc, detail::body_arg(cfg, 0));
    auto full = solve_spectrum(assemble_pencil(K, Parity::All), cfg.dim + 4);
    auto [lam3, ok] = third_eigenvalue(K);
    auto structure = verify_structure(K);
    body = {{"body", K.name},
            {"dim", cfg.dim},
            {"bandlimit", disc.bandlimit},
            {"eigenvalues", std::vector<double>(full.eigenvalues.data(),
                                                full.eigenvalues.data() +
                                                    full.eigenvalues.size())},
            {"lambda3", lam3},
            {"lambda3_ge_1", ok},
            {"structure", to_json(structure)}};
    rr.exit_code = structure.pass ? 0 : 2;
  } else if (cfg.operation == "verify") {
    auto K = detail::body_by_name(cfg, disc, detail::body_arg(cfg, 0));
    auto L = detail::body_by_name(cfg, disc, detail::body_arg(cfg, 1));
    InequalityReport rep;
    auto grid = uniform_lambda_grid(cfg.lambda_grid);
    if (cfg.variant == "bm") rep = verify_bm(K, L, grid);
    else if (cfg.variant == "lp-bm") rep = verify_lp_bm(K, L, cfg.p, grid);
    else if (cfg.variant == "p-bm") rep = verify_p_bm(K, L, cfg.p, grid);
    else if (cfg.variant == "lp-mink") rep = verify_lp_minkowski(K, L, cfg.p);
    else throw ConfigError("config: variant must be bm | lp-bm | p-bm | lp-mink");
    body = to_json(rep);
    rr.exit_code = rep.pass ? 0 : 2;
  } else if (cfg.operation == "stability") {
    auto K = detail::body_by_name(cfg, disc, detail::body_arg(cfg, 0));
    SpectralField phi;
    if (cfg.phi == "h_K") {
      phi = K.field;
    } else if (cfg.phi == "random") {
      std::mt19937_64 rng(cfg.seed);
      phi = random_even_field(cfg.dim, disc.bandlimit, rng);
      phi.coeffs *= 0.05 / phi.coeffs.cwiseAbs().maxCoeff();
    } else {
      throw ConfigError("config: phi must be h_K | random");
    }
    auto rep = full_stability_report(K, phi, cfg.p, cfg.lambda, cfg.p_star);
    body = to_json(rep);
    rr.exit_code = rep.stable && rep.spectral_ok ? 0 : 2;
  } else if (cfg.operation == "solve") {
    LpSolver solver(disc);
    Eigen::VectorXd f;
    if (!cfg.from_body.empty()) {
      auto K = detail::body_by_name(cfg, disc, cfg.from_body);
      f = body_rhs(K, cfg.p);
    } else if (!cfg.f_coeffs.empty()) {
      SpectralField fs;
      fs.dim = cfg.dim;
      fs.bandlimit = disc.bandlimit;
      if (static_cast<int>(cfg.f_coeffs.size()) > basis_size(cfg.dim, disc.bandlimit))
        throw ConfigError("config: f_coeffs has more entries than the basis");
      fs.coeffs = Eigen::VectorXd::Zero(basis_size(cfg.dim, disc.bandlimit));
      for (size_t i = 0; i < cfg.f_coeffs.size(); ++i) fs.coeffs[i] = cfg.f_coeffs[i];
      for (int i = 0; i < fs.coeffs.size(); ++i)
        if (fs.coeffs[i] != 0.0 && !mode_is_even(cfg.dim, i))
          throw ConfigError("config: f_coeffs must only use even modes");
      fs.even = true;
      f = values_on_grid(fs, *disc.grid);
    } else if (cfg.f_const > 0) {
      f = Eigen::VectorXd::Constant(disc.grid->node_count(), cfg.f_const);
    } else {
      throw ConfigError("config: solve needs f_const, f_coeffs or from_body");
    }
    auto tr = solver.homotopy_solve(f, cfg.p, cfg.p_star);
    body = to_json(tr);
    bool pass = tr.converged &&
                tr.steps.back().residual_sup < solver.options().newton_tol;
    if (pass && cfg.trials > 0) {
      SolveResult base;
      base.solution = tr.steps.back().solution;
      auto probe = solver.uniqueness_probe(f, cfg.p, base, cfg.trials, cfg.noise,
                                           cfg.seed == 0 ? 1 : cfg.seed);
      body["distinct_solutions"] = probe.representatives.size();
      body["probe_failed"] = probe.failed;
      pass = probe.representatives.size() == 1;
    }
    rr.exit_code = pass ? 0 : 2;
  } else if (cfg.operation == "equivalence") {
    auto K = detail::body_by_name(cfg, disc, detail::body_arg(cfg, 0));
    auto rep = equivalence_experiment(K, cfg.p_star, cfg.trials,
                                      cfg.seed == 0 ? 1 : cfg.seed);
    body = to_json(rep);
    if (!cfg.csv.empty()) write_margins_csv(cfg.csv, rep);
    rr.exit_code = rep.agree && rep.consistent ? 0 : 2;
  } else if (cfg.operation == "catalog") {
    auto cat = merge_catalog(cfg.dim, cfg.extra_catalog);
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : cat)
      list.push_back({{"name", e.name}, {"kind", e.kind}, {"params", e.params}});
    body = list;
    rr.exit_code = 0;
  } else {
    throw ConfigError("config: unknown operation '" + cfg.operation + "'");
  }

  rr.report = wrap_report(cfg.operation, std::move(body), cfg.seed);
  if (!cfg.out.empty()) write_json(cfg.out, rr.report);
  return rr;
}

}  // namespace bmk

// Command-line front end. Exit codes: 0 = all checks passed,
// 2 = a numerical check failed, 1 = usage or runtime error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bmk/acceptance.hpp"

using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bmk::ConfigError("cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw bmk::ConfigError("parse error in '" + path + "': " + e.what());
  }
  return doc;
}

void print_summary(const std::string& op, const json& rep) {
  if (op == "spectrum") {
    std::cout << "lambda3 = " << rep.at("lambda3").get<double>()
              << (rep.at("lambda3_ge_1").get<bool>() ? " (>= 1)" : " (< 1)")
              << ", structure "
              << (rep.at("structure").at("pass").get<bool>() ? "ok" : "violated")
              << "\n";
  } else if (op == "verify") {
    std::cout << rep.at("name").get<std::string>() << " ["
              << rep.at("body_K").get<std::string>() << ", "
              << rep.at("body_L").get<std::string>() << "]: min margin "
              << rep.at("margin").get<double>() << " -> "
              << (rep.at("pass").get<bool>() ? "PASS" : "FAIL") << "\n";
  } else if (op == "stability") {
    std::cout << "margin = " << rep.at("margin").get<double>() << ", lambda3 = "
              << rep.at("lambda3").get<double>() << ", stable = "
              << (rep.at("stable").get<bool>() ? "yes" : "no") << "\n";
  } else if (op == "solve") {
    std::cout << "homotopy " << (rep.at("converged").get<bool>() ? "converged" : "stalled")
              << " in " << rep.at("steps").size() << " steps, final residual "
              << rep.at("steps").back().at("residual_sup").get<double>();
    if (rep.contains("distinct_solutions"))
      std::cout << ", distinct solutions " << rep.at("distinct_solutions").get<int>();
    std::cout << "\n";
  } else if (op == "equivalence") {
    std::cout << "lambda3 = " << rep.at("lambda3").get<double>() << ", min margin "
              << rep.at("min_margin").get<double>() << " over "
              << rep.at("trials").get<int>() << " trials, agree = "
              << (rep.at("agree").get<bool>() ? "yes" : "no") << "\n";
  } else if (op == "catalog") {
    for (const auto& e : rep)
      std::cout << e.at("name").get<std::string>() << " ("
                << e.at("kind").get<std::string>() << ")\n";
  }
}

int run_suite(const std::string& which, const std::string& out_path) {
  auto results = which == "quick" ? bmk::run_quick() : bmk::run_acceptance();
  bool all = true;
  json rows = json::array();
  for (const auto& r : results) {
    std::printf("criterion-%-2d %s  %-38s %s (%.2fs)\n", r.id,
                r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
                r.seconds);
    all = all && r.pass;
    rows.push_back({{"id", r.id},
                    {"name", r.name},
                    {"pass", r.pass},
                    {"detail", r.detail},
                    {"seconds", r.seconds}});
  }
  std::printf("suite %s: %zu criteria, %s\n", which.c_str(), results.size(),
              all ? "all passed" : "FAILURES present");
  if (!out_path.empty())
    bmk::write_json(out_path, bmk::wrap_report("suite", std::move(rows), 0));
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Brunn-Minkowski-type inequalities, "
               "Aleksandrov spectra and the even Monge-Ampere problem on the sphere"};
  app.require_subcommand(1);

  std::string config_path, catalog_path, out_path;
  bool print_json = false;
  json ov = json::object();

  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  app.add_option("--catalog", catalog_path,
                 "extra body catalog (JSON array) merged with the builtins");
  app.add_option("--out", out_path, "write the JSON report to this path");
  app.add_flag("--json", print_json, "print the full JSON report to stdout");

  auto opt_int = [&](CLI::App* s, const char* flag, std::string key, const char* d) {
    s->add_option_function<long long>(
        flag, [&ov, key = std::move(key)](long long v) { ov[key] = v; }, d);
  };
  auto opt_num = [&](CLI::App* s, const char* flag, std::string key, const char* d) {
    s->add_option_function<double>(
        flag, [&ov, key = std::move(key)](double v) { ov[key] = v; }, d);
  };
  auto opt_str = [&](CLI::App* s, const char* flag, std::string key, const char* d) {
    s->add_option_function<std::string>(
        flag, [&ov, key = std::move(key)](std::string v) { ov[key] = std::move(v); },
        d);
  };
  opt_int(&app, "--dim", "dim", "ambient dimension, 2 or 3");
  opt_int(&app, "--modes", "modes", "spectral band limit (0 = dimension default)");
  opt_int(&app, "--seed", "seed", "seed for stochastic experiments");

  auto* spectrum = app.add_subcommand(
      "spectrum", "Aleksandrov eigenvalues and spectral structure of a body");
  opt_str(spectrum, "body", "body", "catalog body name");

  auto* verify = app.add_subcommand(
      "verify", "check an inequality (bm | lp-bm | p-bm | lp-mink) on a body pair");
  opt_str(verify, "variant", "variant", "bm | lp-bm | p-bm | lp-mink");
  std::vector<std::string> pair;
  verify->add_option("bodies", pair, "two catalog body names")->expected(2);
  opt_num(verify, "--p", "p", "inequality exponent");
  opt_int(verify, "--lambda-grid", "lambda_grid", "number of interpolation points");

  auto* stability = app.add_subcommand(
      "stability", "variations, stability condition and spectral gap of a body");
  opt_str(stability, "body", "body", "catalog body name");
  opt_str(stability, "--phi", "phi", "probe direction: h_K | random");
  opt_num(stability, "--p", "p", "exponent of the perturbed volume functional");
  opt_num(stability, "--p-star", "p_star", "exponent in the stability condition");
  opt_num(stability, "--lambda", "lambda", "interpolation weight");

  auto* solve = app.add_subcommand(
      "solve", "homotopy solve of det(grad^2 u + u I) = f u^{p-1} plus uniqueness probe");
  opt_num(solve, "--p", "p", "target exponent, in (0,1)");
  opt_num(solve, "--p-star", "p_star", "homotopy start exponent, in (0,1)");
  opt_num(solve, "--f-const", "f_const", "constant right-hand side");
  opt_str(solve, "--from-body", "from_body", "round-trip data built from a catalog body");
  std::vector<double> f_coeffs;
  solve->add_option("--f-coeffs", f_coeffs,
                    "right-hand side as spectral coefficients (even modes only)");
  opt_int(solve, "--trials", "trials", "uniqueness probe restarts (0 disables)");
  opt_num(solve, "--noise", "noise", "restart perturbation amplitude");

  auto* equivalence = app.add_subcommand(
      "equivalence", "random-perturbation experiment: stability margins vs lambda3");
  opt_str(equivalence, "body", "body", "catalog body name");
  opt_num(equivalence, "--p-star", "p_star", "exponent in the stability condition");
  opt_int(equivalence, "--trials", "trials", "number of random directions");
  opt_str(equivalence, "--csv", "csv", "write per-trial margins to this CSV path");

  auto* cat = app.add_subcommand("catalog", "list the available bodies");

  auto* suite = app.add_subcommand("suite", "run the acceptance criteria");
  std::string which = "acceptance";
  suite->add_option("which", which, "acceptance | quick")
      ->check(CLI::IsMember({"acceptance", "quick"}));

  for (auto* s : {spectrum, verify, stability, solve, equivalence, cat, suite})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (suite->parsed()) return run_suite(which, out_path);

    json doc = config_path.empty() ? json::object() : read_json_file(config_path);
    for (const auto& [k, v] : ov.items()) doc[k] = v;
    if (!pair.empty()) doc["bodies"] = pair;
    if (!f_coeffs.empty()) doc["f_coeffs"] = f_coeffs;
    if (!catalog_path.empty()) doc["catalog"] = read_json_file(catalog_path);
    if (!out_path.empty()) doc["out"] = out_path;
    for (auto* s : {spectrum, verify, stability, solve, equivalence, cat})
      if (s->parsed()) doc["operation"] = s->get_name();

    auto cfg = bmk::parse_config(doc);
    auto rr = bmk::run(cfg);
    if (print_json)
      std::cout << rr.report.dump(2) << "\n";
    else
      print_summary(cfg.operation, rr.report.at("report"));
    return rr.exit_code;
  } catch (const bmk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

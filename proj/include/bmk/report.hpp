#pragma once

// JSON/CSV report emission. Every top-level report carries the schema tag
// "bmk/1" and the seed that produced it; no timestamps, so reruns with the
// same seed are byte-identical.

#include <fstream>
#include <iomanip>
#include <string>

#include <json.hpp>

#include "bmk/lpsolver.hpp"
#include "bmk/stability.hpp"

namespace bmk {

inline nlohmann::json to_json(const SpectralField& f) {
  return {{"dim", f.dim},
          {"bandlimit", f.bandlimit},
          {"even", f.even},
          {"coeffs", std::vector<double>(f.coeffs.data(), f.coeffs.data() + f.coeffs.size())}};
}

inline SpectralField field_from_json(const nlohmann::json& j) {
  SpectralField f;
  f.dim = j.at("dim").get<int>();
  f.bandlimit = j.at("bandlimit").get<int>();
  f.even = j.value("even", false);
  auto c = j.at("coeffs").get<std::vector<double>>();
  if (static_cast<int>(c.size()) != basis_size(f.dim, f.bandlimit))
    throw ConfigError("coeffs: expected " +
                      std::to_string(basis_size(f.dim, f.bandlimit)) + " entries");
  f.coeffs = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
  return f;
}

inline nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"lambda", row.lambda},
                    {"lhs", row.lhs},
                    {"rhs", row.rhs},
                    {"margin", row.margin}});
  return {{"name", r.name},          {"p", r.p},
          {"rows", rows},            {"lhs", r.lhs},
          {"rhs", r.rhs},            {"margin", r.margin},
          {"pass", r.pass},          {"equality_flag", r.equality_flag},
          {"body_K", r.body_K},      {"body_L", r.body_L},
          {"grid_resolution", r.grid_resolution}};
}

inline nlohmann::json to_json(const StructureReport& r) {
  return {{"one_negative", r.one_negative},
          {"negative_eigenvalue", r.negative_eigenvalue},
          {"negative_value_residual", r.negative_value_residual},
          {"eigvec_angle", r.eigvec_angle},
          {"kernel_dim", r.kernel_dim},
          {"kernel_angle", r.kernel_angle},
          {"pass", r.pass}};
}

inline nlohmann::json to_json(const StabilityReport& r) {
  return {{"body", r.body},     {"p_star", r.p_star},
          {"lhs", r.lhs},       {"rhs", r.rhs},
          {"margin", r.margin}, {"I0", r.I0},
          {"I1", r.I1},         {"I2", r.I2},
          {"J_value", r.J_value},
          {"inf_J", r.inf_J},   {"lambda3", r.lambda3},
          {"stable", r.stable}, {"spectral_ok", r.spectral_ok}};
}

inline nlohmann::json to_json(const Lemma51Report& r) {
  return {{"lhs", r.lhs},
          {"rhs", r.rhs},
          {"margin", r.margin},
          {"lambda3", r.lambda3},
          {"centered_norm", r.centered_norm},
          {"eigen_residual", r.eigen_residual},
          {"equality", r.equality}};
}

inline nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json j{{"body", r.body},
                   {"dim", r.dim},
                   {"p_star", r.p_star},
                   {"trials", r.trials},
                   {"seed", r.seed},
                   {"lambda3", r.lambda3},
                   {"spectral_ok", r.spectral_ok},
                   {"margins", r.margins},
                   {"min_margin", r.min_margin},
                   {"empirical_ok", r.empirical_ok},
                   {"agree", r.agree},
                   {"consistent", r.consistent},
                   {"necessity_checked", r.necessity_checked}};
  if (r.necessity_checked) j["necessity_J"] = r.necessity_J;
  return j;
}

inline nlohmann::json to_json(const HomotopyStep& s) {
  return {{"t", s.t},
          {"p_t", s.p_t},
          {"solution", to_json(s.solution)},
          {"newton_iters", s.newton_iters},
          {"residual_sup", s.residual_sup},
          {"bound_low", s.bound_low},
          {"bound_high", s.bound_high},
          {"norm_C2alpha_proxy", s.norm_C2alpha_proxy}};
}

inline nlohmann::json to_json(const HomotopyTrace& tr) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : tr.steps) steps.push_back(to_json(s));
  return {{"steps", steps},
          {"converged", tr.converged},
          {"p_star", tr.p_star},
          {"f", to_json(tr.f)}};
}

inline nlohmann::json wrap_report(const std::string& kind, nlohmann::json body,
                                  unsigned long long seed) {
  return {{"schema", "bmk/1"}, {"kind", kind}, {"seed", seed},
          {"report", std::move(body)}};
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << j.dump(2) << "\n";
}

inline void write_margins_csv(const std::string& path, const EquivalenceReport& r) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << "trial,margin\n";
  for (size_t i = 0; i < r.margins.size(); ++i)
    out << i << "," << std::setprecision(17) << r.margins[i] << "\n";
}

}  // namespace bmk

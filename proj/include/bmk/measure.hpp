#pragma once

// Volumes, cone-volume measures and the inequality verifiers.
//
// Margins are normalized: margin = (lhs - rhs) / rhs, pass iff
// margin >= -1e-9, equality iff |margin| < 1e-7.

#include <string>
#include <vector>

#include "bmk/body.hpp"

namespace bmk {

inline constexpr double kPassTol = 1e-9;
inline constexpr double kEqualityTol = 1e-7;

inline Eigen::VectorXd ma_density(const BodyRep& K) { return K.detW; }

// V(K) = (1/d) * integral of h * det W over the sphere, d = ambient dim.
inline double volume(const BodyRep& K) {
  return integrate(K.h.cwiseProduct(K.detW), *K.grid) / K.dim();
}

// Density of the normalized cone-volume measure; integrates to 1.
inline Eigen::VectorXd cone_volume_density(const BodyRep& K) {
  Eigen::VectorXd d = K.h.cwiseProduct(K.detW) / (K.dim() * volume(K));
  return d;
}

struct InequalityReport {
  std::string name;  // BM | LpBM | pBM | LpMink
  double p = 0.0;
  std::vector<double> lambda_grid;
  // per-lambda rows (single row for LpMink)
  struct Row {
    double lambda = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // (lhs - rhs) / rhs
  };
  std::vector<Row> rows;
  double lhs = 0.0;  // of the worst row
  double rhs = 0.0;
  double margin = 0.0;  // worst margin over the grid
  bool pass = false;
  bool equality_flag = false;  // any row within the equality tolerance
  std::string body_K, body_L;
  int grid_resolution = 0;
};

inline std::vector<double> uniform_lambda_grid(int count = 11) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = static_cast<double>(i) / (count - 1);
  return g;
}

namespace detail {

inline InequalityReport finish_report(InequalityReport rep) {
  rep.margin = std::numeric_limits<double>::infinity();
  rep.equality_flag = false;
  for (const auto& r : rep.rows) {
    if (r.margin < rep.margin) {
      rep.margin = r.margin;
      rep.lhs = r.lhs;
      rep.rhs = r.rhs;
    }
    if (std::abs(r.margin) < kEqualityTol) rep.equality_flag = true;
  }
  rep.pass = rep.margin >= -kPassTol;
  return rep;
}

inline void require_pair(const BodyRep& K, const BodyRep& L) {
  if (K.grid != L.grid) throw ConfigError("verifier: bodies must share a grid");
}

}  // namespace detail

// (1.2)-type check: V((1-l)K + lL) >= V(K)^(1-l) V(L)^l. The Minkowski sum
// of support functions is itself a support function, no Wulff step needed.
inline InequalityReport verify_bm(const BodyRep& K, const BodyRep& L,
                                  const std::vector<double>& lambda_grid) {
  detail::require_pair(K, L);
  InequalityReport rep;
  rep.name = "BM";
  rep.lambda_grid = lambda_grid;
  rep.body_K = K.name;
  rep.body_L = L.name;
  rep.grid_resolution = K.grid->resolution;
  double vk = volume(K), vl = volume(L);
  for (double lam : lambda_grid) {
    SpectralField f = K.field;
    f.coeffs = (1.0 - lam) * K.field.coeffs + lam * L.field.coeffs;
    auto body = body_from_field(std::move(f), K.grid, "bm_sum");
    double lhs = volume(body);
    double rhs = std::pow(vk, 1.0 - lam) * std::pow(vl, lam);
    rep.rows.push_back({lam, lhs, rhs, (lhs - rhs) / rhs});
  }
  return detail::finish_report(rep);
}

// (1.3)-type check through the Wulff body of the L_p combination.
inline InequalityReport verify_lp_bm(const BodyRep& K, const BodyRep& L, double p,
                                     const std::vector<double>& lambda_grid) {
  detail::require_pair(K, L);
  if (p < 0.0 || p == 1.0) throw ConfigError("verify_lp_bm: p in [0,1) or (1,inf)");
  InequalityReport rep;
  rep.name = "LpBM";
  rep.p = p;
  rep.lambda_grid = lambda_grid;
  rep.body_K = K.name;
  rep.body_L = L.name;
  rep.grid_resolution = K.grid->resolution;
  double vk = volume(K), vl = volume(L);
  WulffOptions wopt;
  wopt.bandlimit = K.field.bandlimit;
  for (double lam : lambda_grid) {
    auto body = wulff_body(lp_combination(K, L, p, lam), wopt);
    double lhs = volume(body);
    double rhs = std::pow(vk, 1.0 - lam) * std::pow(vl, lam);
    rep.rows.push_back({lam, lhs, rhs, (lhs - rhs) / rhs});
  }
  return detail::finish_report(rep);
}

// (1.4)-type check with the homogeneity-consistent exponent p/d, d = n+1.
inline InequalityReport verify_p_bm(const BodyRep& K, const BodyRep& L, double p,
                                    const std::vector<double>& lambda_grid) {
  detail::require_pair(K, L);
  if (p == 0.0) throw ConfigError("verify_p_bm: p must be nonzero");
  InequalityReport rep;
  rep.name = "pBM";
  rep.p = p;
  rep.lambda_grid = lambda_grid;
  rep.body_K = K.name;
  rep.body_L = L.name;
  rep.grid_resolution = K.grid->resolution;
  double d = K.dim();
  double vk = volume(K), vl = volume(L);
  WulffOptions wopt;
  wopt.bandlimit = K.field.bandlimit;
  for (double lam : lambda_grid) {
    auto body = wulff_body(lp_combination(K, L, p, lam), wopt);
    double lhs = volume(body);
    double rhs = std::pow(
        (1.0 - lam) * std::pow(vk, p / d) + lam * std::pow(vl, p / d), d / p);
    rep.rows.push_back({lam, lhs, rhs, (lhs - rhs) / rhs});
  }
  return detail::finish_report(rep);
}

// (1.5)-type check with the homogeneity-consistent exponent 1/d.
inline InequalityReport verify_lp_minkowski(const BodyRep& K, const BodyRep& L,
                                            double p) {
  detail::require_pair(K, L);
  if (p <= 0.0) throw ConfigError("verify_lp_minkowski: p must be positive");
  InequalityReport rep;
  rep.name = "LpMink";
  rep.p = p;
  rep.body_K = K.name;
  rep.body_L = L.name;
  rep.grid_resolution = K.grid->resolution;
  Eigen::VectorXd ratio(K.h.size());
  for (int j = 0; j < K.h.size(); ++j)
    ratio[j] = std::pow(L.h[j] / K.h[j], p);
  double lhs =
      std::pow(integrate(ratio.cwiseProduct(cone_volume_density(K)), *K.grid), 1.0 / p);
  double rhs = std::pow(volume(L) / volume(K), 1.0 / K.dim());
  rep.rows.push_back({0.0, lhs, rhs, (lhs - rhs) / rhs});
  return detail::finish_report(rep);
}

}  // namespace bmk

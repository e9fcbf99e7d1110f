#pragma once

// Second-variation machinery around the L_p combination functional
//   I(eps) = (int h_lam det W_lam) * (int h_L det W_L)^(-lambda),
// the quadratic stability condition it induces, the J-functional with its
// Euler-Lagrange residual, and the third-eigenvalue equivalence experiment.

#include <random>
#include <string>
#include <vector>

#include "bmk/catalog.hpp"
#include "bmk/spectrum.hpp"

namespace bmk {

namespace detail {

// int U^{ij} (phi_{;ij} + phi delta_ij) phi over the sphere, from nodal jets.
inline double cofactor_quadratic(const BodyRep& K, const std::vector<Jet>& jets) {
  const auto& grid = *K.grid;
  double acc = 0;
  for (int j = 0; j < grid.node_count(); ++j) {
    double s;
    if (K.tdim() == 1) {
      s = K.U[j](0, 0) * (jets[j].hess(0, 0) + jets[j].value);
    } else {
      Eigen::Matrix2d M = jets[j].hess;
      M.diagonal().array() += jets[j].value;
      s = K.U[j].cwiseProduct(M).sum();
    }
    acc += grid.weights[j] * jets[j].value * s;
  }
  return acc;
}

// int det W * phi  and  int h^{-1} det W * phi^2.
inline double mass_moment(const BodyRep& K, const Eigen::VectorXd& phi) {
  return integrate(K.detW.cwiseProduct(phi), *K.grid);
}

inline double weighted_square(const BodyRep& K, const Eigen::VectorXd& phi) {
  return integrate(K.detW.cwiseProduct(phi).cwiseProduct(phi).cwiseQuotient(K.h),
                   *K.grid);
}

inline double total_mass(const BodyRep& K) {
  return integrate(K.h.cwiseProduct(K.detW), *K.grid);  // = d * V(K)
}

}  // namespace detail

struct VariationProbe {
  BodyRep K;
  SpectralField phi;
  Eigen::VectorXd phi_values;
  std::vector<Jet> phi_jets;
  double p = 0.5;
  double lambda = 0.5;
  double eps_max = 0.0;
};

namespace detail {

inline bool field_is_body(const BodyRep& K, const SpectralField& phi, double eps) {
  SpectralField f = K.field;
  f.coeffs += eps * phi.coeffs;
  try {
    body_from_field(std::move(f), K.grid, "probe");
  } catch (const Error&) {
    return false;
  }
  return true;
}

// largest eps with h_K +/- eps*phi both valid support functions, by bisection
inline double compute_eps_max(const BodyRep& K, const SpectralField& phi) {
  auto ok = [&](double e) {
    return field_is_body(K, phi, e) && field_is_body(K, phi, -e);
  };
  double lo = 0.0, hi = 1.0;
  int grow = 0;
  while (grow < 8 && ok(hi)) {
    lo = hi;
    hi *= 2;
    ++grow;
  }
  if (grow == 8) return lo;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

inline VariationProbe make_probe(const BodyRep& K, const SpectralField& phi,
                                 double p, double lambda) {
  if (!phi.even) throw NotOriginSymmetric("make_probe: phi must be even");
  if (p < 0.0 || p >= 1.0) throw ConfigError("make_probe: p must lie in [0,1)");
  if (lambda < 0.0 || lambda > 1.0)
    throw ConfigError("make_probe: lambda must lie in [0,1]");
  VariationProbe pr{K, phi, values_on_grid(phi, *K.grid), synthesize(phi, *K.grid),
                    p, lambda, 0.0};
  pr.eps_max = detail::compute_eps_max(K, phi);
  return pr;
}

inline double I_functional(const VariationProbe& pr, double eps) {
  const auto& grid = *pr.K.grid;
  SpectralField fl = pr.K.field;
  fl.coeffs += eps * pr.phi.coeffs;
  auto L = body_from_field(std::move(fl), pr.K.grid, "probe_L");

  Eigen::VectorXd hlam(grid.node_count());
  for (int j = 0; j < grid.node_count(); ++j) {
    double hk = pr.K.h[j], hl = L.h[j];
    hlam[j] = pr.p == 0.0
                  ? std::pow(hk, 1.0 - pr.lambda) * std::pow(hl, pr.lambda)
                  : std::pow((1.0 - pr.lambda) * std::pow(hk, pr.p) +
                                 pr.lambda * std::pow(hl, pr.p),
                             1.0 / pr.p);
  }
  auto lam = body_from_values(hlam, pr.K.grid, pr.K.field.bandlimit, "probe_lam");
  return detail::total_mass(lam) * std::pow(detail::total_mass(L), -pr.lambda);
}

// Analytic first and second variations of I at eps = 0.
inline std::pair<double, double> second_variation(const VariationProbe& pr) {
  const auto& K = pr.K;
  int n = K.n();
  double vp = detail::total_mass(K);
  double b = detail::mass_moment(K, pr.phi_values);
  double x = detail::weighted_square(K, pr.phi_values);
  double q = detail::cofactor_quadratic(K, pr.phi_jets);
  double lam = pr.lambda;

  double t1 = (n + 1) * lam * b * std::pow(vp, -lam);
  double t2 = (n + 1) * lam * std::pow(vp, -lam) * b;
  double i1 = t1 - t2;

  double i2 = (n + 1) * lam * (1.0 - lam) * std::pow(vp, -lam) *
              ((n + 1) / vp * b * b - (1.0 - pr.p) * x - q);
  return {i1, i2};
}

struct StabilityReport {
  std::string body;
  double p_star = 0.0;
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  double margin = std::numeric_limits<double>::quiet_NaN();  // lhs - rhs
  double I0 = std::numeric_limits<double>::quiet_NaN();
  double I1 = std::numeric_limits<double>::quiet_NaN();
  double I2 = std::numeric_limits<double>::quiet_NaN();
  double J_value = std::numeric_limits<double>::quiet_NaN();
  double inf_J = std::numeric_limits<double>::quiet_NaN();
  double lambda3 = std::numeric_limits<double>::quiet_NaN();
  bool stable = false;       // margin >= -kPassTol
  bool spectral_ok = false;  // lambda3 >= 1 - 1e-8
};

// Quadratic stability condition: the mean-squared term dominates the
// (1 - p_star)-weighted mass term plus the cofactor quadratic.
inline StabilityReport stable_condition(const BodyRep& K, const SpectralField& phi,
                                        double p_star) {
  if (!phi.even) throw NotOriginSymmetric("stable_condition: phi must be even");
  if (p_star < 0.0 || p_star >= 1.0)
    throw ConfigError("stable_condition: p_star must lie in [0,1)");
  Eigen::VectorXd pv = values_on_grid(phi, *K.grid);
  auto jets = synthesize(phi, *K.grid);
  int n = K.n();
  double vp = detail::total_mass(K);
  double b = detail::mass_moment(K, pv);

  StabilityReport rep;
  rep.body = K.name;
  rep.p_star = p_star;
  rep.lhs = (n + 1) / vp * b * b;
  rep.rhs = (1.0 - p_star) * detail::weighted_square(K, pv) +
            detail::cofactor_quadratic(K, jets);
  rep.margin = rep.lhs - rep.rhs;
  rep.stable = rep.margin >= -kPassTol;
  return rep;
}

// J(phi) = -int U^{ij}(grad^2 phi + phi I) phi + (n+1) (int h detW)^{-1}
//          (int detW phi)^2 on the unit sphere of int h^{-1} detW phi^2.
inline double J_functional(const BodyRep& K, const SpectralField& phi) {
  if (!phi.even) throw NotOriginSymmetric("J_functional: phi must be even");
  Eigen::VectorXd pv = values_on_grid(phi, *K.grid);
  double norm2 = detail::weighted_square(K, pv);
  if (!(norm2 > 0) || !std::isfinite(norm2))
    throw ZeroField("J_functional: phi has zero norm");
  double s = 1.0 / std::sqrt(norm2);
  SpectralField pn = phi;
  pn.coeffs *= s;
  Eigen::VectorXd pnv = s * pv;
  auto jets = synthesize(pn, *K.grid);
  int n = K.n();
  double vp = detail::total_mass(K);
  double b = detail::mass_moment(K, pnv);
  return -detail::cofactor_quadratic(K, jets) + (n + 1) / vp * b * b;
}

struct InfJResult {
  double value = 0.0;
  SpectralField minimizer;
  double el_residual = 0.0;  // sup-norm residual of the stationarity equation
};

// Minimize J over the even subspace via the rank-one-modified pencil.
inline InfJResult inf_J(const BodyRep& K, double el_tol = 1e-7) {
  Pencil P = assemble_pencil(K, Parity::Even);
  const auto& grid = *K.grid;
  BasisTables tb(grid, K.field.bandlimit, Parity::Even, false);
  int n = K.n();
  double vp = detail::total_mass(K);
  Eigen::VectorXd bvec =
      tb.val.transpose() * K.detW.cwiseProduct(grid.weights).eval();

  Eigen::MatrixXd M = P.A + ((n + 1) / vp) * (bvec * bvec.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(M, P.B);
  if (es.info() != Eigen::Success)
    throw EigensolveFailure("inf_J: eigensolver did not converge");
  double mu = es.eigenvalues()[0];
  Eigen::VectorXd v = es.eigenvectors().col(0);
  if (bvec.dot(v) < 0) v = -v;

  // stationarity: A v + lam1(v) b = mu B v, lam1 = (n+1) b.v / (int h detW)
  double lam1 = (n + 1) / vp * bvec.dot(v);
  Eigen::VectorXd res = P.A * v + lam1 * bvec - mu * (P.B * v);
  InfJResult out;
  out.el_residual = res.cwiseAbs().maxCoeff();
  if (out.el_residual > el_tol)
    throw EigensolveFailure("inf_J: stationarity residual " +
                            std::to_string(out.el_residual));
  out.value = mu;
  out.minimizer.dim = K.dim();
  out.minimizer.bandlimit = K.field.bandlimit;
  out.minimizer.even = true;
  out.minimizer.coeffs = tb.expand_coeffs(v);
  return out;
}

struct Lemma51Report {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs, nonnegative for even phi
  double lambda3 = 0.0;
  double centered_norm = 0.0;   // B-norm of phi minus its h_K component
  double eigen_residual = 0.0;  // relative pencil residual of the centered field
  bool equality = false;
};

// Spectral-gap inequality: the cofactor quadratic plus lambda3 times the
// weighted mass of phi^2 is dominated by (n + lambda3) times the squared mean.
inline Lemma51Report lemma51_check(const BodyRep& K, const SpectralField& phi,
                                   double equality_tol = 1e-8) {
  if (!phi.even) throw NotOriginSymmetric("lemma51_check: phi must be even");
  Eigen::VectorXd pv = values_on_grid(phi, *K.grid);
  auto jets = synthesize(phi, *K.grid);
  int n = K.n();
  double vp = detail::total_mass(K);
  double b = detail::mass_moment(K, pv);

  Lemma51Report rep;
  rep.lambda3 = third_eigenvalue(K).first;
  rep.lhs = detail::cofactor_quadratic(K, jets) +
            rep.lambda3 * detail::weighted_square(K, pv);
  rep.rhs = (n + rep.lambda3) / vp * b * b;
  rep.margin = rep.rhs - rep.lhs;

  // equality criterion: phi - (mean/mass) h_K is a lambda3 eigenfunction or 0
  Pencil P = assemble_pencil(K, Parity::Even);
  BasisTables tb(*K.grid, K.field.bandlimit, Parity::Even, false);
  Eigen::VectorXd c = tb.restrict_coeffs(phi.coeffs - (b / vp) * K.field.coeffs);
  double cb = std::sqrt(std::max(0.0, c.dot(P.B * c)));
  Eigen::VectorXd pc = tb.restrict_coeffs(phi.coeffs);
  double pb = std::sqrt(std::max(1e-300, pc.dot(P.B * pc)));
  rep.centered_norm = cb;
  if (cb < equality_tol * pb) {
    rep.eigen_residual = 0.0;
    rep.equality = true;
  } else {
    Eigen::VectorXd r = P.A * c - rep.lambda3 * (P.B * c);
    rep.eigen_residual = r.norm() / (P.B * c).norm();
    rep.equality = rep.eigen_residual < 1e-6;
  }
  return rep;
}

// Central second difference of eps -> V(W((h^p + eps phi^p)^{1/p}))^{p/d},
// stencil 1e-3 with one Richardson step at half width.
inline double km_local_check(const BodyRep& K, const SpectralField& phi, double p,
                             double stencil = 1e-3) {
  if (!phi.even) throw NotOriginSymmetric("km_local_check: phi must be even");
  if (p <= 0.0 || p >= 1.0) throw ConfigError("km_local_check: p must lie in (0,1)");
  Eigen::VectorXd pv = values_on_grid(phi, *K.grid);
  if (pv.minCoeff() <= 0)
    throw PositivityViolation("km_local_check: phi must be positive");
  WulffOptions wopt;
  wopt.bandlimit = K.field.bandlimit;
  double expo = p / K.dim();
  auto F = [&](double eps) {
    Eigen::VectorXd g(K.h.size());
    for (int j = 0; j < K.h.size(); ++j)
      g[j] = std::pow(std::pow(K.h[j], p) + eps * std::pow(pv[j], p), 1.0 / p);
    auto W = wulff_body(CandidateField{K.dim(), K.grid, g}, wopt);
    return std::pow(volume(W), expo);
  };
  auto second = [&](double h) { return (F(h) - 2.0 * F(0.0) + F(-h)) / (h * h); };
  double d1 = second(stencil);
  double d2 = second(stencil / 2);
  return (4.0 * d2 - d1) / 3.0;
}

struct EquivalenceReport {
  std::string body;
  int dim = 2;
  double p_star = 0.0;
  int trials = 0;
  unsigned long long seed = 0;
  double lambda3 = 0.0;
  bool spectral_ok = false;   // lambda3 >= 1 - 1e-8
  std::vector<double> margins;
  double min_margin = 0.0;
  bool empirical_ok = false;  // all margins >= -kPassTol
  bool agree = false;         // empirical and spectral verdicts coincide
  bool consistent = true;     // margin < -1e-6 only when lambda3 < 1 + 1e-6
  bool necessity_checked = false;
  double necessity_J = std::numeric_limits<double>::quiet_NaN();
};

// Sample random even perturbations, compare the empirical verdict of the
// quadratic condition against the spectral threshold lambda3 >= 1.
inline EquivalenceReport equivalence_experiment(const BodyRep& K, double p_star,
                                                int trials,
                                                unsigned long long seed = 1) {
  if (trials < 1) throw ConfigError("equivalence_experiment: trials must be >= 1");
  EquivalenceReport rep;
  rep.body = K.name;
  rep.dim = K.dim();
  rep.p_star = p_star;
  rep.trials = trials;
  rep.seed = seed;
  rep.lambda3 = third_eigenvalue(K).first;
  rep.spectral_ok = rep.lambda3 >= 1.0 - 1e-8;

  std::mt19937_64 rng(seed);
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    auto phi = random_even_field(K.dim(), K.field.bandlimit, rng);
    double norm2 = detail::weighted_square(K, values_on_grid(phi, *K.grid));
    phi.coeffs /= std::sqrt(norm2);
    double m = stable_condition(K, phi, p_star).margin;
    rep.margins.push_back(m);
    rep.min_margin = std::min(rep.min_margin, m);
  }
  rep.empirical_ok = rep.min_margin >= -kPassTol;
  rep.agree = rep.empirical_ok == rep.spectral_ok;
  rep.consistent = rep.min_margin >= -1e-6 || rep.lambda3 < 1.0 + 1e-6;

  if (!rep.spectral_ok) {
    // necessity direction: h_K + eps * (third eigenfunction) pushes J below 1
    auto even = solve_spectrum(assemble_pencil(K, Parity::Even), 4);
    BasisTables tb(*K.grid, K.field.bandlimit, Parity::Even, false);
    SpectralField dir;
    dir.dim = K.dim();
    dir.bandlimit = K.field.bandlimit;
    dir.even = true;
    dir.coeffs = tb.expand_coeffs(even.eigenvectors.col(1));
    SpectralField probe = dir;
    probe.coeffs = K.field.coeffs + 0.1 * dir.coeffs;
    rep.necessity_J = J_functional(K, probe);
    rep.necessity_checked = true;
  }
  return rep;
}

// One-stop report used by the command-line front end.
inline StabilityReport full_stability_report(const BodyRep& K,
                                             const SpectralField& phi, double p,
                                             double lambda, double p_star) {
  StabilityReport rep = stable_condition(K, phi, p_star);
  auto probe = make_probe(K, phi, p, lambda);
  rep.I0 = I_functional(probe, 0.0);
  auto [i1, i2] = second_variation(probe);
  rep.I1 = i1;
  rep.I2 = i2;
  rep.J_value = J_functional(K, phi);
  rep.inf_J = inf_J(K).value;
  rep.lambda3 = third_eigenvalue(K).first;
  rep.spectral_ok = rep.lambda3 >= 1.0 - 1e-8;
  return rep;
}

}  // namespace bmk

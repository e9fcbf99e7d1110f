#pragma once

// The acceptance suite: one runner per criterion, each returning a pass/fail
// verdict with a one-line detail string. Tolerances are pinned here.

#include <chrono>
#include <sstream>

#include "bmk/harness.hpp"

namespace bmk {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

inline std::vector<BodyRep> catalog_bodies(const Discretization& disc) {
  std::vector<BodyRep> out;
  for (const auto& e : builtin_catalog(disc.dim)) out.push_back(make_body(e, disc));
  return out;
}

inline BodyRep one_body(const std::string& name, const Discretization& disc) {
  return make_body(find_body(builtin_catalog(disc.dim), name), disc);
}

}  // namespace detail

// 1. planar ball spectrum: -1, 0, 0, 3 to 1e-8 at band limit 64, under 1 s.
inline CriterionResult criterion1() {
  detail::Stopwatch sw;
  CriterionResult r{1, "planar ball spectrum"};
  auto disc = make_discretization(2, 64);
  auto full = solve_spectrum(assemble_pencil(detail::one_body("ball", disc),
                                             Parity::All), 4);
  double target[] = {-1.0, 0.0, 0.0, 3.0};
  double worst = 0;
  for (int i = 0; i < 4; ++i)
    worst = std::max(worst, std::abs(full.eigenvalues[i] - target[i]));
  worst = std::max(worst, std::abs(full.lambda3 - 3.0));
  r.seconds = sw.seconds();
  r.pass = worst < 1e-8 && r.seconds < 1.0;
  r.detail = "max eigenvalue error " + detail::fmt(worst) + ", " +
             detail::fmt(r.seconds) + " s";
  return r;
}

// 2. spatial ball spectrum: -2, 0 x3, 4 x5 to 1e-6 at band limit 24, under 30 s.
inline CriterionResult criterion2() {
  detail::Stopwatch sw;
  CriterionResult r{2, "spatial ball spectrum"};
  auto disc = make_discretization(3, 24);
  auto full = solve_spectrum(assemble_pencil(detail::one_body("ball", disc),
                                             Parity::All), 9);
  double worst = 0;
  for (int i = 0; i < 9; ++i) {
    double target = i == 0 ? -2.0 : (i <= 3 ? 0.0 : 4.0);
    worst = std::max(worst, std::abs(full.eigenvalues[i] - target));
  }
  worst = std::max(worst, std::abs(full.lambda3 - 4.0));
  r.seconds = sw.seconds();
  r.pass = worst < 1e-6 && r.seconds < 30.0;
  r.detail = "max eigenvalue error " + detail::fmt(worst) + ", " +
             detail::fmt(r.seconds) + " s";
  return r;
}

// 3. spectral structure (one negative eigenvalue = -n with eigenvector h_K,
//    kernel of dimension n+1 spanned by the coordinates) on every body.
inline CriterionResult criterion3() {
  detail::Stopwatch sw;
  CriterionResult r{3, "spectral structure on the catalog"};
  r.pass = true;
  double worst = 0;
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 64 : 16);
    for (const auto& K : detail::catalog_bodies(disc)) {
      try {
        auto rep = verify_structure(K, 1e-5);
        worst = std::max({worst, rep.negative_value_residual, rep.eigvec_angle,
                          rep.kernel_angle});
        if (!rep.pass) {
          r.pass = false;
          r.detail = "dim " + std::to_string(dim) + " body " + K.name + " failed";
        }
      } catch (const Error& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
      }
    }
  }
  if (r.pass) r.detail = "worst residual/angle " + detail::fmt(worst);
  r.seconds = sw.seconds();
  return r;
}

// 4. third eigenvalue >= 1 - 1e-8 on the full planar catalog.
inline CriterionResult criterion4() {
  detail::Stopwatch sw;
  CriterionResult r{4, "planar third-eigenvalue bound"};
  auto disc = make_discretization(2, 64);
  r.pass = true;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& K : detail::catalog_bodies(disc)) {
    auto [lam3, ok] = third_eigenvalue(K);
    lo = std::min(lo, lam3);
    if (!ok) {
      r.pass = false;
      r.detail = "body " + K.name + " has lambda3 = " + detail::fmt(lam3);
    }
  }
  if (r.pass) r.detail = "min lambda3 " + detail::fmt(lo);
  r.seconds = sw.seconds();
  return r;
}

// 5. inf J = 1 with minimizer proportional to h_K; stationarity residual < 1e-7.
inline CriterionResult criterion5() {
  detail::Stopwatch sw;
  CriterionResult r{5, "J-functional minimum"};
  auto disc = make_discretization(2, 64);
  r.pass = true;
  double worst_val = 0, worst_res = 0, worst_angle = 0;
  for (const char* name : {"ball", "ellipse_2_1"}) {
    auto K = detail::one_body(name, disc);
    InfJResult res;
    try {
      res = inf_J(K, 1e-7);
    } catch (const Error& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
      continue;
    }
    worst_val = std::max(worst_val, std::abs(res.value - 1.0));
    worst_res = std::max(worst_res, res.el_residual);
    Eigen::VectorXd mv = values_on_grid(res.minimizer, *disc.grid);
    double num = integrate(K.detW.cwiseProduct(mv), *disc.grid);
    double den = std::sqrt(
        integrate(K.detW.cwiseProduct(mv).cwiseProduct(mv).cwiseQuotient(K.h),
                  *disc.grid) *
        integrate(K.h.cwiseProduct(K.detW), *disc.grid));
    worst_angle = std::max(worst_angle, 1.0 - std::abs(num) / den);
    if (std::abs(res.value - 1.0) >= 1e-6 || res.el_residual >= 1e-7 ||
        1.0 - std::abs(num) / den > 1e-8)
      r.pass = false;
  }
  if (r.detail.empty())
    r.detail = "|inf_J - 1| " + detail::fmt(worst_val) + ", residual " +
               detail::fmt(worst_res) + ", alignment defect " +
               detail::fmt(worst_angle);
  r.seconds = sw.seconds();
  return r;
}

// 6. equality anchor of the stability condition at phi = h_K for
//    p_star in {0, 0.5}. Note: the exact margin at phi = h_K equals
//    p_star * int h detW, so a zero margin is only attainable at p_star = 0;
//    the criterion is evaluated as stated and reports the discrepancy.
inline CriterionResult criterion6() {
  detail::Stopwatch sw;
  CriterionResult r{6, "stability equality anchor"};
  r.pass = true;
  double worst = 0;
  std::string worst_at;
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 64 : 16);
    for (const auto& K : detail::catalog_bodies(disc)) {
      for (double ps : {0.0, 0.5}) {
        double m = std::abs(stable_condition(K, K.field, ps).margin);
        if (m > worst) {
          worst = m;
          worst_at = K.name + " (dim " + std::to_string(dim) +
                     ", p_star = " + detail::fmt(ps) + ")";
        }
        if (m > 1e-9) r.pass = false;
      }
    }
  }
  r.detail = "worst |margin| " + detail::fmt(worst) + " at " + worst_at +
             "; analytic margin at h_K is p_star * int h detW";
  r.seconds = sw.seconds();
  return r;
}

// 7. analytic second variation vs central finite differences (rel. err 1e-4),
//    first variation below 1e-10, ten probes per body.
inline CriterionResult criterion7() {
  detail::Stopwatch sw;
  CriterionResult r{7, "second-variation consistency"};
  r.pass = true;
  double worst_rel = 0, worst_i1 = 0;
  const double ps[] = {0.0, 0.25, 0.5, 0.75, 0.9};
  const double ls[] = {0.3, 0.5, 0.7};
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 32 : 12);
    std::mt19937 rng(1234 + dim);
    for (const auto& K : detail::catalog_bodies(disc)) {
      for (int t = 0; t < 10; ++t) {
        auto phi = random_even_field(dim, disc.bandlimit, rng);
        phi.coeffs *= 0.05 / phi.coeffs.cwiseAbs().maxCoeff();
        auto probe = make_probe(K, phi, ps[t % 5], ls[t % 3]);
        auto [i1, i2] = second_variation(probe);
        worst_i1 = std::max(worst_i1, std::abs(i1));
        double h = 1e-3;
        double fd = (I_functional(probe, h) - 2.0 * I_functional(probe, 0.0) +
                     I_functional(probe, -h)) /
                    (h * h);
        double rel = std::abs(fd - i2) / std::max(1e-12, std::abs(i2));
        worst_rel = std::max(worst_rel, rel);
        if (rel >= 1e-4 || std::abs(i1) >= 1e-10) r.pass = false;
      }
    }
  }
  r.detail = "worst FD relative error " + detail::fmt(worst_rel) + ", worst |I1| " +
             detail::fmt(worst_i1);
  r.seconds = sw.seconds();
  return r;
}

// 8. inequality verifiers: full catalog pairings, the p = 2 ball pair value,
//    and dilate-pair equalities pinning the homogeneity exponents.
inline CriterionResult criterion8() {
  detail::Stopwatch sw;
  CriterionResult r{8, "inequality verifiers"};
  r.pass = true;
  std::string why;

  // (i) all catalog pairs over an 11-point grid with endpoint equality
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 48 : 12);
    auto bodies = detail::catalog_bodies(disc);
    for (size_t a = 0; a < bodies.size(); ++a) {
      for (size_t b = a + 1; b < bodies.size(); ++b) {
        auto rep = verify_bm(bodies[a], bodies[b], uniform_lambda_grid(11));
        bool ends = std::abs(rep.rows.front().margin) < 1e-7 &&
                    std::abs(rep.rows.back().margin) < 1e-7;
        if (!rep.pass || !ends) {
          r.pass = false;
          why = "BM " + bodies[a].name + "/" + bodies[b].name + " margin " +
                detail::fmt(rep.margin);
        }
      }
    }
  }

  // (ii) p = 2 ball pair: 2.5 pi vs 2 pi
  {
    auto disc = make_discretization(2, 48);
    auto b1 = make_body({"b1", "ball", nlohmann::json{{"r", 1.0}}}, disc);
    auto b2 = make_body({"b2", "ball", nlohmann::json{{"r", 2.0}}}, disc);
    auto rep = verify_lp_bm(b1, b2, 2.0, {0.5});
    if (std::abs(rep.rows[0].lhs - 2.5 * kPi) > 1e-10 ||
        std::abs(rep.rows[0].rhs - 2.0 * kPi) > 1e-10) {
      r.pass = false;
      why = "ball pair lhs " + detail::fmt(rep.rows[0].lhs) + " rhs " +
            detail::fmt(rep.rows[0].rhs);
    }
  }

  // (iii) dilate pairs: equality in the power-mean and mixed-volume forms
  double worst_eq = 0;
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 48 : 12);
    auto K = detail::one_body(dim == 2 ? "ellipse_2_1" : "ellipsoid_a", disc);
    auto L = dilate(K, 2.0);
    for (double p : {0.5, 2.0}) {
      auto rep = verify_p_bm(K, L, p, uniform_lambda_grid(11));
      for (const auto& row : rep.rows)
        worst_eq = std::max(worst_eq, std::abs(row.margin));
    }
    auto mink = verify_lp_minkowski(K, L, 0.5);
    worst_eq = std::max(worst_eq, std::abs(mink.margin));
  }
  if (worst_eq >= 1e-8) {
    r.pass = false;
    why = "dilate equality defect " + detail::fmt(worst_eq);
  }

  r.detail = r.pass ? "all pairings pass; dilate equality defect " +
                          detail::fmt(worst_eq)
                    : why;
  r.seconds = sw.seconds();
  return r;
}

// 9. solver: constant data, round trips, homotopy monitors, uniqueness probe.
inline CriterionResult criterion9() {
  CriterionResult r{9, "Monge-Ampere solver"};
  r.pass = true;
  std::string why;
  double t2 = 0, t3 = 0;

  {
    detail::Stopwatch sw;
    auto disc = make_discretization(2, 64);
    LpSolver solver(disc);
    Eigen::VectorXd one = Eigen::VectorXd::Ones(disc.grid->node_count());
    for (double p : {0.1, 0.5, 0.9}) {
      auto res = solver.newton_solve(one, p, constant_field(2, 64, 1.05));
      Eigen::VectorXd uv = values_on_grid(res.solution, *disc.grid);
      if (res.residual_sup >= 1e-10 || (uv.array() - 1.0).abs().maxCoeff() >= 1e-10) {
        r.pass = false;
        why = "planar constant data, p = " + detail::fmt(p);
      }
    }
    auto K = detail::one_body("ellipse_2_1", disc);
    std::mt19937 rng(7);
    SpectralField u0 = K.field;
    auto nz = random_even_field(2, 4, rng);
    u0.coeffs.head(nz.coeffs.size()) += 0.01 * nz.coeffs;
    auto rt = solver.newton_solve(body_rhs(K, 0.5), 0.5, u0);
    if ((values_on_grid(rt.solution, *disc.grid) - K.h).cwiseAbs().maxCoeff() >= 1e-8) {
      r.pass = false;
      why = "planar round trip";
    }
    auto tr = solver.homotopy_solve(body_rhs(K, 0.5), 0.5);
    bool monitors = true;
    for (const auto& s : tr.steps)
      monitors = monitors && s.bound_low > 0 &&
                 s.norm_C2alpha_proxy < solver.options().c2_ceiling;
    if (!tr.converged || !monitors) {
      r.pass = false;
      why = "planar homotopy";
    }
    SolveResult base;
    base.solution = constant_field(2, 64, 1.0);
    auto probe = solver.uniqueness_probe(one, 0.5, base, 20, 0.05, 3);
    if (probe.representatives.size() != 1) {
      r.pass = false;
      why = "planar uniqueness probe: " +
            std::to_string(probe.representatives.size()) + " clusters";
    }
    t2 = sw.seconds();
    if (t2 >= 5.0) {
      r.pass = false;
      why = "planar runtime " + detail::fmt(t2) + " s";
    }
  }

  {
    detail::Stopwatch sw;
    auto disc = make_discretization(3, 16);
    LpSolver solver(disc);
    Eigen::VectorXd one = Eigen::VectorXd::Ones(disc.grid->node_count());
    for (double p : {0.1, 0.5, 0.9}) {
      auto res = solver.newton_solve(one, p, constant_field(3, 16, 1.05));
      Eigen::VectorXd uv = values_on_grid(res.solution, *disc.grid);
      if (res.residual_sup >= 1e-10 || (uv.array() - 1.0).abs().maxCoeff() >= 1e-10) {
        r.pass = false;
        why = "spatial constant data, p = " + detail::fmt(p);
      }
    }
    auto K = detail::one_body("ellipsoid_a", disc);
    std::mt19937 rng(8);
    SpectralField u0 = K.field;
    auto nz = random_even_field(3, 4, rng);
    u0.coeffs.head(nz.coeffs.size()) += 0.01 * nz.coeffs;
    auto rt = solver.newton_solve(body_rhs(K, 0.5), 0.5, u0);
    if ((values_on_grid(rt.solution, *disc.grid) - K.h).cwiseAbs().maxCoeff() >= 1e-6) {
      r.pass = false;
      why = "spatial round trip";
    }
    // band-limited data: intermediate continuation targets stay resolvable
    Eigen::VectorXd f(disc.grid->node_count());
    for (int j = 0; j < f.size(); ++j) {
      double ct = std::cos(disc.grid->theta[j]);
      f[j] = 1.0 + 0.1 * 0.5 * (3.0 * ct * ct - 1.0);
    }
    auto tr = solver.homotopy_solve(f, 0.5);
    bool monitors = true;
    for (const auto& s : tr.steps)
      monitors = monitors && s.bound_low > 0 &&
                 s.norm_C2alpha_proxy < solver.options().c2_ceiling;
    if (!tr.converged || !monitors) {
      r.pass = false;
      why = "spatial homotopy";
    }
    t3 = sw.seconds();
    if (t3 >= 300.0) {
      r.pass = false;
      why = "spatial runtime " + detail::fmt(t3) + " s";
    }
  }

  r.detail = r.pass ? "dim 2 " + detail::fmt(t2) + " s, dim 3 " + detail::fmt(t3) + " s"
                    : why;
  r.seconds = t2 + t3;
  return r;
}

// 10. equivalence experiment: random even perturbations never violate the
//     stability condition on bodies with third eigenvalue >= 1.
inline CriterionResult criterion10() {
  detail::Stopwatch sw;
  CriterionResult r{10, "stability/eigenvalue equivalence"};
  r.pass = true;
  double worst = std::numeric_limits<double>::infinity();
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 32 : 12);
    for (const auto& K : detail::catalog_bodies(disc)) {
      auto rep = equivalence_experiment(K, 0.0, 100, 1000 + dim);
      worst = std::min(worst, rep.min_margin);
      if (!rep.spectral_ok || !rep.empirical_ok || !rep.consistent || !rep.agree) {
        r.pass = false;
        r.detail = "body " + K.name + " (dim " + std::to_string(dim) +
                   "): min margin " + detail::fmt(rep.min_margin) + ", lambda3 " +
                   detail::fmt(rep.lambda3);
      }
    }
  }
  if (r.pass) r.detail = "min margin over all runs " + detail::fmt(worst);
  r.seconds = sw.seconds();
  return r;
}

// 11. spectral-gap inequality: nonnegative margins over random even fields,
//     equality at the third eigenfunction and at h_K.
inline CriterionResult criterion11() {
  detail::Stopwatch sw;
  CriterionResult r{11, "spectral-gap inequality"};
  r.pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_eq = 0;
  for (int dim : {2, 3}) {
    auto disc = make_discretization(dim, dim == 2 ? 32 : 12);
    std::mt19937 rng(77 + dim);
    for (const auto& K : detail::catalog_bodies(disc)) {
      for (int t = 0; t < 100; ++t) {
        auto phi = random_even_field(dim, disc.bandlimit, rng);
        double n2 = integrate(K.detW.cwiseProduct(values_on_grid(phi, *disc.grid))
                                  .cwiseProduct(values_on_grid(phi, *disc.grid))
                                  .cwiseQuotient(K.h),
                              *disc.grid);
        phi.coeffs /= std::sqrt(n2);
        auto rep = lemma51_check(K, phi);
        worst_margin = std::min(worst_margin, rep.margin);
        if (rep.margin < -1e-9) r.pass = false;
      }
      // equality cases
      auto at_h = lemma51_check(K, K.field);
      auto even = solve_spectrum(assemble_pencil(K, Parity::Even), 4);
      BasisTables tb(*disc.grid, disc.bandlimit, Parity::Even, false);
      SpectralField e3;
      e3.dim = dim;
      e3.bandlimit = disc.bandlimit;
      e3.even = true;
      e3.coeffs = tb.expand_coeffs(even.eigenvectors.col(1));
      auto at_e = lemma51_check(K, e3);
      double eq = std::max(std::abs(at_h.margin), std::abs(at_e.margin));
      worst_eq = std::max(worst_eq, eq);
      if (eq >= 1e-8 || !at_h.equality || !at_e.equality) {
        r.pass = false;
        r.detail = "equality defect " + detail::fmt(eq) + " on " + K.name;
      }
    }
  }
  if (r.detail.empty())
    r.detail = "min margin " + detail::fmt(worst_margin) + ", equality defect " +
               detail::fmt(worst_eq);
  r.seconds = sw.seconds();
  return r;
}

inline std::vector<CriterionResult> run_acceptance() {
  return {criterion1(), criterion2(), criterion3(), criterion4(),
          criterion5(), criterion6(), criterion7(), criterion8(),
          criterion9(), criterion10(), criterion11()};
}

inline std::vector<CriterionResult> run_quick() {
  return {criterion1(), criterion4(), criterion5()};
}

}  // namespace bmk

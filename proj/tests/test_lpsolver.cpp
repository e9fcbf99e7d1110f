#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bmk/lpsolver.hpp"
#include "bmk/measure.hpp"

using namespace bmk;

namespace {

BodyRep catalog_body(const std::string& name, const Discretization& d) {
  return make_body(find_body(builtin_catalog(d.dim), name), d);
}

Eigen::VectorXd ones(const Discretization& d) {
  return Eigen::VectorXd::Ones(d.grid->node_count());
}

}  // namespace

TEST_CASE("pointwise residual closed forms") {
  auto d = make_discretization(2, 16);
  auto one = constant_field(2, d.bandlimit, 1.0);
  auto two = constant_field(2, d.bandlimit, 2.0);
  for (double p : {0.1, 0.5, 0.9}) {
    auto r = residual(one, one, p, *d.grid);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-14);
  }
  auto r2 = residual(two, one, 0.5, *d.grid);
  CHECK((r2.array() - (2.0 - std::pow(2.0, -0.5))).abs().maxCoeff() < 1e-13);

  // constructed data makes the body's support an exact root
  auto K = catalog_body("ellipse_2_1", d);
  LpSolver solver(d);
  auto rr = solver.residual_values(K.field, body_rhs(K, 0.5), 0.5);
  CHECK(rr.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("newton: constant data pulls back to u = 1") {
  auto d = make_discretization(2, 32);
  LpSolver solver(d);
  auto res = solver.newton_solve(ones(d), 0.5, constant_field(2, d.bandlimit, 1.1));
  CHECK(res.residual_sup < 1e-10);
  Eigen::VectorXd uv = values_on_grid(res.solution, *d.grid);
  CHECK((uv.array() - 1.0).abs().maxCoeff() < 1e-10);

  // exact root converges without iterating
  auto quick = solver.newton_solve(ones(d), 0.9, constant_field(2, d.bandlimit, 1.0));
  CHECK(quick.iterations == 0);
}

TEST_CASE("newton: ellipse round trip from a noisy start") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  LpSolver solver(d);
  std::mt19937 rng(5);
  SpectralField u0 = K.field;
  auto nz = random_even_field(2, 4, rng);
  u0.coeffs.head(nz.coeffs.size()) += 0.01 * nz.coeffs;
  auto res = solver.newton_solve(body_rhs(K, 0.5), 0.5, u0);
  CHECK(res.residual_sup < 1e-10);
  Eigen::VectorXd diff = values_on_grid(res.solution, *d.grid) - K.h;
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("newton: solutions stay exactly even") {
  auto d = make_discretization(2, 16);
  LpSolver solver(d);
  auto res = solver.newton_solve(ones(d), 0.5, constant_field(2, d.bandlimit, 1.2));
  for (int i : even_modes(2, d.bandlimit)) res.solution.coeffs[i] = 0.0;
  CHECK(res.solution.coeffs.cwiseAbs().maxCoeff() == 0.0);  // odd part never touched
}

TEST_CASE("newton error paths") {
  auto d = make_discretization(2, 16);
  LpSolver solver(d);
  CHECK_THROWS_AS(
      solver.newton_solve(ones(d), 0.5, constant_field(2, d.bandlimit, -1.0)),
      PositivityViolation);
  // far-from-convex start cannot be rescued
  SpectralField bad = constant_field(2, d.bandlimit, 1.0);
  bad.coeffs[2 * 8 - 1] = 1.5;  // large cos(8t) component, u > 0 but wild
  CHECK_THROWS_AS(solver.newton_solve(ones(d), 0.5, bad), NewtonDivergence);
}

TEST_CASE("homotopy with f = 1 collapses to the constant trace") {
  auto d = make_discretization(2, 16);
  LpSolver solver(d);
  auto tr = solver.homotopy_solve(ones(d), 0.5);
  CHECK(tr.converged);
  CHECK(tr.steps.front().t == 0.0);
  CHECK(tr.steps.back().t == 1.0);
  for (size_t i = 1; i < tr.steps.size(); ++i) {
    CHECK(tr.steps[i].t > tr.steps[i - 1].t);
    CHECK(tr.steps[i].residual_sup < 1e-10);
    CHECK(tr.steps[i].bound_low > 0);
    Eigen::VectorXd uv = values_on_grid(tr.steps[i].solution, *d.grid);
    CHECK((uv.array() - 1.0).abs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("homotopy on perturbed data: certificate and endpoint consistency") {
  auto d = make_discretization(2, 32);
  LpSolver solver(d);
  Eigen::VectorXd f(d.grid->node_count());
  for (int j = 0; j < f.size(); ++j) f[j] = 1.0 + 0.1 * std::cos(2 * d.grid->theta[j]);
  auto tr = solver.homotopy_solve(f, 0.5);
  CHECK(tr.converged);
  CHECK(tr.steps.back().residual_sup < 1e-10);
  for (const auto& s : tr.steps) {
    CHECK(s.bound_low > 0);
    CHECK(s.norm_C2alpha_proxy < 10.0);
  }

  // definitional round trip: det W * u^{1-p} reproduces f
  const auto& u = tr.steps.back().solution;
  auto jets = synthesize(u, *d.grid);
  for (int j = 0; j < f.size(); ++j) {
    double w = jets[j].hess(0, 0) + jets[j].value;
    double fprime = w * std::pow(jets[j].value, 1.0 - 0.5);
    CHECK(std::abs(fprime - f[j]) < 1e-9);
  }

  // t = 1 endpoint is already a Newton fixed point
  auto re = solver.newton_solve(f, 0.5, u);
  CHECK(re.iterations == 0);

  // residual certificate on a twice finer grid
  auto fine = make_discretization(2, d.bandlimit, 4);
  SpectralField fs = analyze(f, *d.grid, d.bandlimit);
  auto rfine = residual(u, fs, 0.5, *fine.grid);
  CHECK(rfine.cwiseAbs().maxCoeff() < 10.0 * solver.options().newton_tol);
}

TEST_CASE("linearization multipliers at t = 0 avoid zero") {
  CHECK(linearized_check_at_one(2, 16, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(linearized_check_at_one(3, 8, 0.5) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(linearized_check_at_one(2, 16, 0.1) == doctest::Approx(1.9).epsilon(1e-14));
  for (double ps = 0.05; ps < 1.0; ps += 0.05) {
    CHECK(linearized_check_at_one(2, 32, ps) > 0.4);
    CHECK(linearized_check_at_one(3, 16, ps) > 0.4);
  }
}

TEST_CASE("uniqueness probe finds a single cluster for constant data") {
  auto d = make_discretization(2, 32);
  LpSolver solver(d);
  auto base = solver.newton_solve(ones(d), 0.5, constant_field(2, d.bandlimit, 1.0));
  auto probe = solver.uniqueness_probe(ones(d), 0.5, base, 20, 0.05, 9);
  CHECK(probe.trials == 20);
  CHECK(probe.failed == 0);
  CHECK(probe.representatives.size() == 1);
  Eigen::VectorXd uv = values_on_grid(probe.representatives[0], *d.grid);
  CHECK((uv.array() - 1.0).abs().maxCoeff() < 1e-9);

  // zero noise: every trial reproduces the base solution
  auto still = solver.uniqueness_probe(ones(d), 0.5, base, 5, 0.0, 9);
  CHECK(still.representatives.size() == 1);
  CHECK(still.failed == 0);
}

TEST_CASE("uniqueness probe on the ellipse round trip") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  LpSolver solver(d);
  auto f = body_rhs(K, 0.5);
  auto base = solver.newton_solve(f, 0.5, K.field);
  auto probe = solver.uniqueness_probe(f, 0.5, base, 10, 0.02, 17);
  CHECK(probe.representatives.size() == 1);
}

TEST_CASE("3d: constant data and ellipsoid round trip") {
  auto d = make_discretization(3, 12);
  LpSolver solver(d);
  auto res = solver.newton_solve(ones(d), 0.5, constant_field(3, d.bandlimit, 1.05));
  CHECK(res.residual_sup < 1e-10);
  Eigen::VectorXd uv = values_on_grid(res.solution, *d.grid);
  CHECK((uv.array() - 1.0).abs().maxCoeff() < 1e-10);

  auto K = catalog_body("ellipsoid_a", d);
  std::mt19937 rng(2);
  SpectralField u0 = K.field;
  auto nz = random_even_field(3, 4, rng);
  u0.coeffs.head(nz.coeffs.size()) += 0.01 * nz.coeffs;
  auto rt = solver.newton_solve(body_rhs(K, 0.5), 0.5, u0);
  CHECK(rt.residual_sup < 1e-10);
  Eigen::VectorXd diff = values_on_grid(rt.solution, *d.grid) - K.h;
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("homotopy rejects bad inputs") {
  auto d = make_discretization(2, 16);
  LpSolver solver(d);
  CHECK_THROWS_AS(solver.homotopy_solve(ones(d), 1.5), ConfigError);
  CHECK_THROWS_AS(solver.homotopy_solve(ones(d), 0.5, -0.1), ConfigError);
  CHECK_THROWS_AS(solver.homotopy_solve((-1.0 * ones(d)).eval(), 0.5),
                  PositivityViolation);
}

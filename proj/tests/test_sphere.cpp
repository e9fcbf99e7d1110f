#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bmk/grid.hpp"
#include "bmk/spectral.hpp"

using namespace bmk;

TEST_CASE("uniform circle grid") {
  auto g = build_grid(2, 8);
  REQUIRE(g.node_count() == 8);
  for (int j = 0; j < 8; ++j) {
    CHECK(g.theta[j] == doctest::Approx(2.0 * kPi * j / 8).epsilon(1e-15));
    CHECK(g.weights[j] == doctest::Approx(kPi / 4).epsilon(1e-15));
    CHECK(std::abs(g.nodes.row(j).norm() - 1.0) < 1e-14);
  }
  CHECK(integrate(Eigen::VectorXd::Ones(8), g) == doctest::Approx(2 * kPi).epsilon(1e-14));
}

TEST_CASE("sphere grid measure and unit nodes") {
  auto g = build_grid(3, 24);
  CHECK(std::abs(integrate(Eigen::VectorXd::Ones(g.node_count()), g) - 4 * kPi) < 1e-12);
  for (int j = 0; j < g.node_count(); ++j) {
    CHECK(std::abs(g.nodes.row(j).norm() - 1.0) < 1e-14);
    CHECK(g.theta[j] > 0.0);
    CHECK(g.theta[j] < kPi);  // poles excluded
  }
  // antipode map is exact on the grid
  for (int j : {0, 17, g.node_count() / 2, g.node_count() - 1}) {
    int a = g.antipode(j);
    CHECK((g.nodes.row(j) + g.nodes.row(a)).norm() < 1e-12);
  }
}

TEST_CASE("circle quadrature oracles") {
  auto g = build_grid(2, 64);
  Eigen::VectorXd c2(g.node_count()), csq(g.node_count());
  for (int j = 0; j < g.node_count(); ++j) {
    c2[j] = std::cos(2 * g.theta[j]);
    csq[j] = std::cos(g.theta[j]) * std::cos(g.theta[j]);
  }
  CHECK(std::abs(integrate(csq, g) - kPi) < 1e-13);
  CHECK(std::abs(integrate(c2, g)) < 1e-13);
}

TEST_CASE("sphere moment oracle: integral of x3^2 is 4pi/3") {
  auto g = build_grid(3, 16);
  Eigen::VectorXd v(g.node_count());
  for (int j = 0; j < g.node_count(); ++j) v[j] = g.nodes(j, 2) * g.nodes(j, 2);
  CHECK(std::abs(integrate(v, g) - 4 * kPi / 3) < 1e-12);
}

TEST_CASE("analyze picks out single Fourier mode") {
  auto g = build_grid(2, 128);
  Eigen::VectorXd v(g.node_count());
  for (int j = 0; j < g.node_count(); ++j) v[j] = std::cos(2 * g.theta[j]);
  auto f = analyze(v, g, 16);
  for (int i = 0; i < f.size(); ++i) {
    double expect = (i == 3) ? std::sqrt(kPi) : 0.0;  // (k=2, cos)
    CHECK(std::abs(f.coeffs[i] - expect) < 1e-13);
  }
  CHECK(f.even);
}

TEST_CASE("analyze of constant keeps only the constant mode") {
  auto g = build_grid(3, 12);
  auto f = analyze(Eigen::VectorXd::Ones(g.node_count()), g, 8);
  CHECK(std::abs(f.coeffs[0] - std::sqrt(4 * kPi)) < 1e-12);
  CHECK(f.coeffs.tail(f.size() - 1).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("degree-2 zonal harmonic projects to a single coefficient") {
  auto g = build_grid(3, 16);
  Eigen::VectorXd v(g.node_count());
  for (int j = 0; j < g.node_count(); ++j) {
    double x3 = g.nodes(j, 2);
    v[j] = std::sqrt(5.0 / (16.0 * kPi)) * (3 * x3 * x3 - 1);
  }
  auto f = analyze(v, g, 8);
  for (int i = 0; i < f.size(); ++i) {
    double expect = (i == 4) ? 1.0 : 0.0;  // (l=2, m=0)
    CHECK(std::abs(f.coeffs[i] - expect) < 1e-12);
  }
  CHECK(f.even);
}

TEST_CASE("synthesize jets: constant and cos 2t") {
  auto g = build_grid(2, 64);
  auto one = constant_field(2, 8, 1.0);
  for (const auto& j : synthesize(one, g)) {
    CHECK(std::abs(j.value - 1.0) < 1e-14);
    CHECK(j.grad.norm() < 1e-14);
    CHECK(j.hess.norm() < 1e-14);
  }
  SpectralField f;
  f.dim = 2;
  f.bandlimit = 8;
  f.coeffs = Eigen::VectorXd::Zero(basis_size(2, 8));
  f.coeffs[3] = std::sqrt(kPi);  // cos 2t
  auto jets = synthesize(f, g);
  for (int j = 0; j < g.node_count(); ++j) {
    double c2 = std::cos(2 * g.theta[j]);
    CHECK(std::abs(jets[j].value - c2) < 1e-13);
    CHECK(std::abs(jets[j].hess(0, 0) + 4 * c2) < 1e-12);
  }
}

TEST_CASE("covariant Hessian trace equals spectral Laplacian") {
  for (int dim : {2, 3}) {
    int L = dim == 2 ? 12 : 10;
    auto g = build_grid(dim, dim == 2 ? 128 : 24);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    SpectralField f;
    f.dim = dim;
    f.bandlimit = L;
    f.coeffs.resize(basis_size(dim, L));
    for (int i = 0; i < f.size(); ++i) f.coeffs[i] = u(rng);
    auto jets = synthesize(f, g);
    // independent route: apply the Laplace multiplier mode by mode
    SpectralField lap = f;
    for (int i = 0; i < f.size(); ++i)
      lap.coeffs[i] *= laplace_multiplier(dim, i);
    auto lv = values_on_grid(lap, g);
    for (int j = 0; j < g.node_count(); ++j)
      CHECK(std::abs(jets[j].hess.trace() - lv[j]) < 1e-10);
  }
}

TEST_CASE("analyze-synthesize round trip on band-limited fields") {
  for (int dim : {2, 3}) {
    int L = dim == 2 ? 16 : 12;
    auto g = build_grid(dim, dim == 2 ? 128 : 20);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    SpectralField f;
    f.dim = dim;
    f.bandlimit = L;
    f.coeffs.resize(basis_size(dim, L));
    for (int i = 0; i < f.size(); ++i) f.coeffs[i] = u(rng);
    auto back = analyze(values_on_grid(f, g), g, L);
    CHECK((back.coeffs - f.coeffs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("parity detection on even samples") {
  for (int dim : {2, 3}) {
    auto g = build_grid(dim, dim == 2 ? 64 : 16);
    std::mt19937_64 rng(3);
    auto f = random_even_field(dim, 12, rng);
    auto back = analyze(values_on_grid(f, g), g, 12);
    CHECK(back.even);
    for (int i = 0; i < back.size(); ++i)
      if (!mode_is_even(dim, i)) CHECK(back.coeffs[i] == 0.0);
  }
}

TEST_CASE("basis orthonormality under grid quadrature") {
  auto g = build_grid(3, 12);
  BasisTables tb(g, 10, Parity::All, false);
  Eigen::MatrixXd gram = tb.val.transpose() * g.weights.asDiagonal() * tb.val;
  gram -= Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  CHECK(gram.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jet symmetry invariant") {
  auto g = build_grid(3, 12);
  std::mt19937_64 rng(5);
  auto f = random_even_field(3, 10, rng);
  for (const auto& j : synthesize(f, g))
    CHECK(std::abs(j.hess(0, 1) - j.hess(1, 0)) < 1e-12);
}

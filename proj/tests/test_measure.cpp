#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bmk/catalog.hpp"
#include "bmk/measure.hpp"

using namespace bmk;

namespace {

BodyRep catalog_body(const std::string& name, const Discretization& d) {
  return make_body(find_body(builtin_catalog(d.dim), name), d);
}

BodyRep ball_of_radius(double r, const Discretization& d) {
  return make_body({"ball_r", "ball", nlohmann::json{{"r", r}}}, d);
}

}  // namespace

TEST_CASE("volumes of balls and ellipsoids") {
  auto d2 = make_discretization(2, 32);
  CHECK(volume(catalog_body("ball", d2)) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(volume(catalog_body("ellipse_2_1", d2)) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-10));

  auto d3 = make_discretization(3, 16);
  CHECK(volume(catalog_body("ball", d3)) ==
        doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-10));
  CHECK(volume(catalog_body("ellipsoid_a", d3)) ==
        doctest::Approx(4.0 * kPi / 3.0 * 1.3 * 1.0 * 0.8).epsilon(1e-8));
}

TEST_CASE("ellipse boundary length from the surface-area density") {
  // perimeter = integral of det W over S^1; oracle: independent trapezoid
  // quadrature of sqrt(a^2 sin^2 t + b^2 cos^2 t)
  auto d = make_discretization(2, 64);
  auto K = catalog_body("ellipse_2_1", d);
  double per = integrate(ma_density(K), *d.grid);
  int N = 200000;
  double oracle = 0;
  for (int i = 0; i < N; ++i) {
    double t = 2.0 * kPi * i / N;
    oracle += std::sqrt(4.0 * std::sin(t) * std::sin(t) + std::cos(t) * std::cos(t));
  }
  oracle *= 2.0 * kPi / N;
  CHECK(per == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("sphere surface density r^2 and ball cone-volume normalization") {
  auto d = make_discretization(3, 12);
  auto K = ball_of_radius(1.5, d);
  CHECK((ma_density(K).array() - 2.25).abs().maxCoeff() < 1e-9);
  auto cv = cone_volume_density(K);
  CHECK((cv.array() - 1.0 / (4.0 * kPi)).abs().maxCoeff() < 1e-10);
  CHECK(integrate(cv, *d.grid) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cone-volume density is dilation invariant") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto cvK = cone_volume_density(K);
  auto cv2 = cone_volume_density(dilate(K, 3.0));
  CHECK((cvK - cv2).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(integrate(cvK, *d.grid) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("BM verifier on balls has closed-form rows") {
  auto d = make_discretization(2, 32);
  auto K = ball_of_radius(1.0, d);
  auto L = ball_of_radius(3.0, d);
  auto rep = verify_bm(K, L, {0.5});
  // V(ball(2)) = 4 pi vs sqrt(pi * 9 pi) = 3 pi
  CHECK(rep.rows[0].lhs == doctest::Approx(4.0 * kPi).epsilon(1e-10));
  CHECK(rep.rows[0].rhs == doctest::Approx(3.0 * kPi).epsilon(1e-10));
  CHECK(rep.margin == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(rep.pass);
  CHECK(!rep.equality_flag);
}

TEST_CASE("BM equality for identical bodies and at endpoints") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto rep = verify_bm(K, K, uniform_lambda_grid());
  CHECK(rep.pass);
  CHECK(rep.equality_flag);
  for (const auto& r : rep.rows) CHECK(std::abs(r.margin) < 1e-10);

  auto L = catalog_body("ball", d);
  auto rep2 = verify_bm(K, L, uniform_lambda_grid());
  CHECK(rep2.pass);
  CHECK(std::abs(rep2.rows.front().margin) < 1e-10);  // lambda = 0
  CHECK(std::abs(rep2.rows.back().margin) < 1e-10);   // lambda = 1
  CHECK(rep2.rows[5].margin > 1e-4);                  // strict in between
}

TEST_CASE("BM margin is invariant under swapping the pair") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto L = catalog_body("perturbed_ball", d);
  auto a = verify_bm(K, L, {0.3});
  auto b = verify_bm(L, K, {0.7});
  CHECK(a.rows[0].lhs == doctest::Approx(b.rows[0].lhs).epsilon(1e-12));
  CHECK(a.rows[0].margin == doctest::Approx(b.rows[0].margin).epsilon(1e-10));
}

TEST_CASE("Lp-BM verifier, p = 2 ball pair") {
  auto d = make_discretization(2, 32);
  auto K = ball_of_radius(1.0, d);
  auto L = ball_of_radius(2.0, d);
  auto rep = verify_lp_bm(K, L, 2.0, {0.5});
  CHECK(rep.rows[0].lhs == doctest::Approx(2.5 * kPi).epsilon(1e-10));
  CHECK(rep.rows[0].rhs == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(rep.pass);
}

TEST_CASE("Lp-BM verifier, p = 0 and p = 1/2 on the catalog") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto L = catalog_body("ball", d);
  for (double p : {0.0, 0.5}) {
    auto rep = verify_lp_bm(K, L, p, uniform_lambda_grid());
    CHECK(rep.pass);
    CHECK(rep.equality_flag);  // endpoints
  }
  CHECK_THROWS_AS(verify_lp_bm(K, L, 1.0, {0.5}), ConfigError);
  CHECK_THROWS_AS(verify_lp_bm(K, L, -0.5, {0.5}), ConfigError);
}

TEST_CASE("pBM equality for dilate pairs") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto L = dilate(K, 2.0);
  for (double p : {0.5, 2.0}) {
    auto rep = verify_p_bm(K, L, p, uniform_lambda_grid());
    CHECK(rep.pass);
    for (const auto& r : rep.rows) CHECK(std::abs(r.margin) < 1e-8);
  }
  // balls of different radii are dilates too
  auto b1 = ball_of_radius(1.0, d);
  auto b2 = ball_of_radius(2.0, d);
  auto rep = verify_p_bm(b1, b2, 2.0, {0.5});
  CHECK(std::abs(rep.rows[0].margin) < 1e-10);
}

TEST_CASE("pBM strict case and pBM/LpBM consistency") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto L = catalog_body("ball", d);
  auto rep = verify_p_bm(K, L, 0.5, {0.25});
  CHECK(rep.pass);
  // the power-mean rhs of pBM dominates the geometric-mean rhs of LpBM
  auto rep2 = verify_lp_bm(K, L, 0.5, {0.25});
  CHECK(rep.rows[0].lhs == doctest::Approx(rep2.rows[0].lhs).epsilon(1e-12));
  CHECK(rep.rows[0].rhs >= rep2.rows[0].rhs - 1e-12);
}

TEST_CASE("Lp-Minkowski verifier") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  // dilate pair: both sides equal the ratio
  auto rep = verify_lp_minkowski(K, dilate(K, 2.0), 0.5);
  CHECK(rep.rows[0].lhs == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rep.rows[0].rhs == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rep.equality_flag);
  // L = K: both sides 1
  auto repKK = verify_lp_minkowski(K, K, 0.5);
  CHECK(repKK.rows[0].lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(repKK.rows[0].rhs == doctest::Approx(1.0).epsilon(1e-12));
  // strict case
  auto L = catalog_body("ball", d);
  auto rep2 = verify_lp_minkowski(K, L, 0.5);
  CHECK(rep2.pass);
  CHECK(rep2.margin > 1e-4);
  CHECK_THROWS_AS(verify_lp_minkowski(K, L, 0.0), ConfigError);
}

TEST_CASE("verifiers reject bodies on different grids") {
  auto d1 = make_discretization(2, 32);
  auto d2 = make_discretization(2, 16);
  auto K = catalog_body("ball", d1);
  auto L = catalog_body("ball", d2);
  CHECK_THROWS_AS(verify_bm(K, L, {0.5}), ConfigError);
}

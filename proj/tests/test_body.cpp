#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bmk/catalog.hpp"
#include "bmk/measure.hpp"

using namespace bmk;

namespace {

BodyRep catalog_body(const std::string& name, const Discretization& d) {
  return make_body(find_body(builtin_catalog(d.dim), name), d);
}

}  // namespace

TEST_CASE("ball: h = detW = margin = 1") {
  auto d = make_discretization(2, 16);
  auto K = catalog_body("ball", d);
  CHECK((K.h.array() - 1.0).abs().maxCoeff() < 1e-13);
  CHECK((K.detW.array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(K.convexity_margin == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ellipse support function closed form") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  // theta = 0 is node 0, theta = pi/2 is node m/4
  CHECK(K.h[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(K.h[d.grid->node_count() / 4] == doctest::Approx(1.0).epsilon(1e-9));
  for (int j = 0; j < d.grid->node_count(); ++j) {
    double t = d.grid->theta[j];
    double expect = std::sqrt(4 * std::cos(t) * std::cos(t) + std::sin(t) * std::sin(t));
    CHECK(std::abs(K.h[j] - expect) < 1e-9);  // spectral truncation at K = 32
  }
}

TEST_CASE("smoothed cube in 3d has positive convexity margin") {
  auto d = make_discretization(3, 16);
  auto K = catalog_body("cube_q4", d);
  CHECK(K.convexity_margin > 1e-3);
  // cofactor identity at every node
  for (int j = 0; j < d.grid->node_count(); ++j) {
    Eigen::Matrix2d R = K.W[j] * K.U[j] - K.detW[j] * Eigen::Matrix2d::Identity();
    CHECK(R.cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, std::abs(K.detW[j])));
  }
}

TEST_CASE("convexity violation is reported for wild perturbations") {
  auto d = make_discretization(2, 16);
  CatalogEntry e{"bad", "perturbed_ball",
                 nlohmann::json{{"r", 1.0},
                                {"modes", nlohmann::json::array(
                                              {nlohmann::json{{"k", 4}, {"cos", 0.5}}})}}};
  CHECK_THROWS_AS(make_body(e, d), ConvexityViolation);

  // the raw q-norm support function (mu = 0) has W = 0 along the axes
  CatalogEntry raw{"raw_q4", "smoothed_cube",
                   nlohmann::json{{"q", 4}, {"mu", 0.0}, {"scales", {1.0, 1.0, 1.0}}}};
  CHECK_THROWS_AS(make_body(raw, make_discretization(3, 16)), ConvexityViolation);
}

TEST_CASE("lp_combination closed forms") {
  auto d = make_discretization(2, 16);
  auto b1 = catalog_body("ball", d);
  auto b2 = make_body({"ball2", "ball", nlohmann::json{{"r", 2.0}}}, d);
  auto g = lp_combination(b1, b2, 2.0, 0.5);
  CHECK((g.g.array() - std::sqrt(2.5)).abs().maxCoeff() < 1e-13);

  auto be = make_body({"balle", "ball", nlohmann::json{{"r", std::exp(1.0)}}}, d);
  auto g0 = lp_combination(b1, be, 0.0, 0.5);
  CHECK((g0.g.array() - std::sqrt(std::exp(1.0))).abs().maxCoeff() < 1e-13);

  auto K = catalog_body("ellipse_2_1", d);
  auto gi = lp_combination(K, K, 0.5, 0.3);
  CHECK((gi.g - K.h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lp_combination is nondecreasing in p") {
  auto d = make_discretization(2, 16);
  auto K = catalog_body("ellipse_2_1", d);
  auto L = catalog_body("ball", d);
  double plist[] = {0.0, 0.25, 0.5, 0.75, 1.5, 2.0};
  for (size_t i = 0; i + 1 < std::size(plist); ++i) {
    auto lo = lp_combination(K, L, plist[i], 0.4);
    auto hi = lp_combination(K, L, plist[i + 1], 0.4);
    CHECK((hi.g - lo.g).minCoeff() > -1e-12);
  }
}

TEST_CASE("wulff body of a support function is a fixed point") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  CandidateField c{2, d.grid, K.h};
  WulffOptions opt;
  opt.bandlimit = d.bandlimit;
  auto W = wulff_body(c, opt);
  CHECK((W.h - K.h).cwiseAbs().maxCoeff() < 1e-6);
  // idempotence
  CandidateField c2{2, d.grid, W.h};
  auto W2 = wulff_body(c2, opt);
  CHECK((W2.h - W.h).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("wulff body ignores antipodal spikes") {
  auto grid = std::make_shared<DirectionGrid>(build_grid(2, 4096));
  int m = grid->node_count();
  Eigen::VectorXd g = Eigen::VectorXd::Ones(m);
  g[0] = 3.0;
  g[m / 2] = 3.0;
  CandidateField cand{2, grid, g};
  WulffOptions opt;
  opt.bandlimit = 16;
  auto W = wulff_body(cand, opt);
  CHECK((W.h.array() - 1.0).abs().maxCoeff() < 1e-6);
}

TEST_CASE("2d wulff support values match a brute-force vertex oracle") {
  auto grid = std::make_shared<DirectionGrid>(build_grid(2, 40));
  int m = grid->node_count();
  Eigen::VectorXd g(m);
  for (int j = 0; j < m; ++j) g[j] = 1.0 + 0.3 * std::cos(2 * grid->theta[j]);
  CandidateField cand{2, grid, g};
  auto hw = bmk::detail::wulff_support_values(cand);

  // oracle: enumerate all pairwise line intersections, keep feasible ones,
  // take the max dot product per direction
  std::vector<Eigen::Vector2d> verts;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::Matrix2d M;
      M << grid->nodes(i, 0), grid->nodes(i, 1), grid->nodes(j, 0), grid->nodes(j, 1);
      if (std::abs(M.determinant()) < 1e-9) continue;
      Eigen::Vector2d v = M.inverse() * Eigen::Vector2d(g[i], g[j]);
      bool feasible = true;
      for (int k = 0; k < m && feasible; ++k)
        feasible = grid->nodes.row(k).head<2>().dot(v) <= g[k] + 1e-9;
      if (feasible) verts.push_back(v);
    }
  }
  REQUIRE(!verts.empty());
  for (int j = 0; j < m; ++j) {
    double best = -1e300;
    for (const auto& v : verts)
      best = std::max(best, grid->nodes.row(j).head<2>().dot(v));
    CHECK(hw[j] == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("wulff truncation only shrinks the naive volume") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto L = catalog_body("ball", d);
  auto g = lp_combination(K, L, 0.5, 0.5);
  WulffOptions opt;
  opt.bandlimit = d.bandlimit;
  auto W = wulff_body(g, opt);
  // naive volume: plug g into the volume formula without convexity checks
  auto gf = analyze(g.g, *d.grid, d.bandlimit);
  auto jets = synthesize(gf, *d.grid);
  double naive = 0;
  for (int j = 0; j < d.grid->node_count(); ++j) {
    Eigen::Matrix2d Wm = jets[j].hess;
    Wm(0, 0) += jets[j].value;
    naive += d.grid->weights[j] * jets[j].value * det_w(Wm, 1) / 2.0;
  }
  CHECK(volume(W) <= naive + 1e-9);
  CHECK((W.h - g.g).maxCoeff() < 1e-6);  // h_W <= g + grid tolerance
}

TEST_CASE("3d wulff of a spiked ball recovers the ball") {
  auto grid = std::make_shared<DirectionGrid>(build_grid(3, 16));
  int m = grid->node_count();
  Eigen::VectorXd g = Eigen::VectorXd::Ones(m);
  g[3] = 2.5;
  g[grid->antipode(3)] = 2.5;
  CandidateField cand{3, grid, g};
  WulffOptions opt;
  opt.bandlimit = 8;
  auto W = wulff_body(cand, opt);
  CHECK((W.h.array() - 1.0).abs().maxCoeff() < 5e-3);
}

TEST_CASE("dilate scales support, volume and margin") {
  auto d = make_discretization(2, 32);
  auto K = catalog_body("ellipse_2_1", d);
  auto K2 = dilate(K, 2.0);
  CHECK((K2.h - 2.0 * K.h).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(volume(K2) == doctest::Approx(4.0 * volume(K)).epsilon(1e-10));
  CHECK(K2.convexity_margin == doctest::Approx(2.0 * K.convexity_margin).epsilon(1e-10));

  auto b2 = dilate(catalog_body("ball", d), 2.0);
  CHECK((b2.h.array() - 2.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("volume homogeneity in 3d") {
  auto d = make_discretization(3, 12);
  auto K = catalog_body("ellipsoid_a", d);
  CHECK(volume(dilate(K, 1.7)) ==
        doctest::Approx(std::pow(1.7, 3) * volume(K)).epsilon(1e-10));
}

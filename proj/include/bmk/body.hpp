#pragma once

// Support-function representation of origin-symmetric convex bodies.
//
// A BodyRep owns a band-limited even support function h together with the
// cached per-node jet, W = grad^2 h + h I in the orthonormal tangent frame,
// det W, the cofactor U, and the convexity margin min_j lambda_min(W_j).

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bmk/grid.hpp"
#include "bmk/spectral.hpp"

namespace bmk {

inline constexpr double kConvexityEps = 1e-9;

inline Eigen::Matrix2d cofactor(const Eigen::Matrix2d& W, int tdim) {
  Eigen::Matrix2d U = Eigen::Matrix2d::Zero();
  if (tdim == 1) {
    U(0, 0) = 1.0;
  } else {
    U(0, 0) = W(1, 1);
    U(1, 1) = W(0, 0);
    U(0, 1) = -W(0, 1);
    U(1, 0) = -W(1, 0);
  }
  return U;
}

inline double det_w(const Eigen::Matrix2d& W, int tdim) {
  return tdim == 1 ? W(0, 0) : W(0, 0) * W(1, 1) - W(0, 1) * W(1, 0);
}

inline double min_eig_w(const Eigen::Matrix2d& W, int tdim) {
  if (tdim == 1) return W(0, 0);
  double tr = W.trace();
  double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det_w(W, 2)));
  return 0.5 * (tr - disc);
}

struct BodyRep {
  SpectralField field;  // even support function
  std::shared_ptr<const DirectionGrid> grid;
  std::vector<Jet> jets;
  std::vector<Eigen::Matrix2d> W;  // grad^2 h + h I per node
  std::vector<Eigen::Matrix2d> U;  // cofactor of W per node
  Eigen::VectorXd h;               // nodal values
  Eigen::VectorXd detW;            // nodal Monge-Ampere density
  double convexity_margin = 0.0;
  std::string name;

  int dim() const { return grid->dim; }
  int n() const { return grid->dim - 1; }  // sphere dimension
  int tdim() const { return grid->tangent_dim(); }
};

// Positive nodal function that may fail to be a support function.
struct CandidateField {
  int dim = 2;
  std::shared_ptr<const DirectionGrid> grid;
  Eigen::VectorXd g;
};

namespace detail {

inline void fill_caches(BodyRep& body) {
  const auto& g = *body.grid;
  int m = g.node_count(), td = g.tangent_dim();
  body.h.resize(m);
  body.detW.resize(m);
  body.W.resize(m);
  body.U.resize(m);
  body.convexity_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const Jet& jet = body.jets[j];
    body.h[j] = jet.value;
    Eigen::Matrix2d W = jet.hess;
    W(0, 0) += jet.value;
    if (td == 2) W(1, 1) += jet.value;
    if (td == 1) {
      W(0, 1) = W(1, 0) = W(1, 1) = 0.0;
    }
    body.W[j] = W;
    body.detW[j] = det_w(W, td);
    body.U[j] = cofactor(W, td);
    body.convexity_margin = std::min(body.convexity_margin, min_eig_w(W, td));
  }
}

inline void validate(const BodyRep& body, double eps_conv = kConvexityEps) {
  if (!body.field.even)
    throw NotOriginSymmetric("body '" + body.name + "' is not origin-symmetric");
  if (body.h.minCoeff() <= 0.0)
    throw PositivityViolation("body '" + body.name + "': support function not positive");
  if (body.convexity_margin <= eps_conv)
    throw ConvexityViolation("body '" + body.name + "': convexity margin " +
                                 std::to_string(body.convexity_margin),
                             body.convexity_margin);
  // cofactor identity W U = detW I
  for (int j = 0; j < body.grid->node_count(); ++j) {
    Eigen::Matrix2d R = body.W[j] * body.U[j];
    R(0, 0) -= body.detW[j];
    if (body.tdim() == 2) R(1, 1) -= body.detW[j];
    double scale = std::max(1.0, std::abs(body.detW[j]));
    if (R.cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw Error("cofactor identity failed at node " + std::to_string(j));
  }
  // even symmetry at paired nodes
  for (int j = 0; j < body.grid->node_count(); ++j) {
    if (std::abs(body.h[j] - body.h[body.grid->antipode(j)]) >
        1e-12 * std::max(1.0, std::abs(body.h[j])))
      throw NotOriginSymmetric("body '" + body.name + "': h(-x) != h(x)");
  }
}

}  // namespace detail

// Builds a body from a band-limited even support-function field.
inline BodyRep body_from_field(SpectralField field,
                               std::shared_ptr<const DirectionGrid> grid,
                               std::string name = "",
                               double eps_conv = kConvexityEps) {
  BodyRep body;
  body.field = std::move(field);
  body.grid = std::move(grid);
  body.name = std::move(name);
  body.jets = synthesize(body.field, *body.grid);
  detail::fill_caches(body);
  detail::validate(body, eps_conv);
  return body;
}

// Builds a body from nodal support-function samples (projected to the basis).
inline BodyRep body_from_values(const Eigen::VectorXd& values,
                                std::shared_ptr<const DirectionGrid> grid,
                                int bandlimit, std::string name = "",
                                double eps_conv = kConvexityEps) {
  auto field = analyze(values, *grid, bandlimit);
  return body_from_field(std::move(field), std::move(grid), std::move(name), eps_conv);
}

inline BodyRep dilate(const BodyRep& K, double c) {
  if (c <= 0.0) throw ConfigError("dilate: factor must be positive");
  BodyRep out = K;
  out.field.coeffs *= c;
  out.h *= c;
  out.detW *= std::pow(c, K.tdim());
  out.convexity_margin *= c;
  for (int j = 0; j < K.grid->node_count(); ++j) {
    out.jets[j].value *= c;
    out.jets[j].grad *= c;
    out.jets[j].hess *= c;
    out.W[j] *= c;
    out.U[j] = cofactor(out.W[j], K.tdim());
  }
  return out;
}

// Pointwise L_p Minkowski combination of two support functions; the result
// is a Wulff function and need not be convex for p < 1.
inline CandidateField lp_combination(const BodyRep& K, const BodyRep& L, double p,
                                     double lambda) {
  if (K.grid != L.grid) throw ConfigError("lp_combination: bodies must share a grid");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lp_combination: lambda in [0,1]");
  CandidateField out;
  out.dim = K.dim();
  out.grid = K.grid;
  int m = K.grid->node_count();
  out.g.resize(m);
  for (int j = 0; j < m; ++j) {
    double a = K.h[j], b = L.h[j];
    out.g[j] = (p == 0.0)
                   ? std::pow(a, 1.0 - lambda) * std::pow(b, lambda)
                   : std::pow((1.0 - lambda) * std::pow(a, p) + lambda * std::pow(b, p),
                              1.0 / p);
  }
  return out;
}

namespace detail {

struct Facet {
  Eigen::Vector3d normal;  // outward, not normalized
  double offset;           // normal . vertex (> 0, origin interior)
};

// Convex hull of planar points (monotone chain); returns edge facets.
inline std::vector<Facet> hull_facets_2d(const Eigen::MatrixXd& pts) {
  int n = static_cast<int>(pts.rows());
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts(a, 0) < pts(b, 0) || (pts(a, 0) == pts(b, 0) && pts(a, 1) < pts(b, 1));
  });
  auto cross = [&](int o, int a, int b) {
    return (pts(a, 0) - pts(o, 0)) * (pts(b, 1) - pts(o, 1)) -
           (pts(a, 1) - pts(o, 1)) * (pts(b, 0) - pts(o, 0));
  };
  std::vector<int> hull;
  for (int s = 0; s < n; ++s) {  // lower chain
    int i = idx[s];
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), i) <= 0)
      hull.pop_back();
    hull.push_back(i);
  }
  size_t lower = hull.size() + 1;
  for (int s = n - 2; s >= 0; --s) {  // upper chain
    int i = idx[s];
    while (hull.size() >= lower && cross(hull[hull.size() - 2], hull.back(), i) <= 0)
      hull.pop_back();
    hull.push_back(i);
  }
  hull.pop_back();
  if (hull.size() < 3) throw DegenerateBody("wulff_body: flat halfplane intersection");
  std::vector<Facet> facets;
  for (size_t e = 0; e < hull.size(); ++e) {
    Eigen::Vector2d a = pts.row(hull[e]).head<2>();
    Eigen::Vector2d b = pts.row(hull[(e + 1) % hull.size()]).head<2>();
    Eigen::Vector2d d = b - a;
    Eigen::Vector3d nrm(d.y(), -d.x(), 0.0);  // outward for CCW hull
    double off = nrm.head<2>().dot(a);
    if (off <= 0.0) throw DegenerateBody("wulff_body: origin not interior");
    facets.push_back({nrm, off});
  }
  return facets;
}

// Incremental convex hull in 3D. Points come from strictly convex surfaces
// at desk scale, so the plain O(n^2) conflict walk is adequate.
class Hull3D {
 public:
  explicit Hull3D(const Eigen::MatrixXd& pts) : pts_(pts) {
    int n = static_cast<int>(pts.rows());
    if (n < 4) throw DegenerateBody("wulff_body: too few points");
    init_simplex();
    for (int i = 0; i < n; ++i) add_point(i);
  }

  std::vector<Facet> facets() const {
    std::vector<Facet> out;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      double off = f.normal.dot(pts_.row(f.v[0]).transpose());
      if (off <= 0.0) throw DegenerateBody("wulff_body: origin not interior");
      out.push_back({f.normal, off});
    }
    return out;
  }

 private:
  struct Face {
    int v[3];
    Eigen::Vector3d normal;
    double offset;
    bool alive = true;
  };

  void make_face(int a, int b, int c, const Eigen::Vector3d& inside) {
    Face f;
    f.v[0] = a;
    f.v[1] = b;
    f.v[2] = c;
    Eigen::Vector3d pa = pts_.row(a).transpose(), pb = pts_.row(b).transpose(),
                    pc = pts_.row(c).transpose();
    f.normal = (pb - pa).cross(pc - pa);
    f.offset = f.normal.dot(pa);
    if (f.normal.dot(inside) > f.offset) {  // flip outward
      std::swap(f.v[1], f.v[2]);
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    faces_.push_back(f);
  }

  void init_simplex() {
    int n = static_cast<int>(pts_.rows());
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    double best = -1;
    for (int i = 1; i < n; ++i) {
      double d = (pts_.row(i) - pts_.row(i0)).norm();
      if (d > best) best = d, i1 = i;
    }
    best = -1;
    Eigen::Vector3d a = pts_.row(i0).transpose(), b = pts_.row(i1).transpose();
    for (int i = 0; i < n; ++i) {
      double d = (Eigen::Vector3d(pts_.row(i).transpose()) - a).cross(b - a).norm();
      if (d > best) best = d, i2 = i;
    }
    Eigen::Vector3d c = pts_.row(i2).transpose();
    Eigen::Vector3d nrm = (b - a).cross(c - a);
    best = -1;
    for (int i = 0; i < n; ++i) {
      double d = std::abs(nrm.dot(Eigen::Vector3d(pts_.row(i).transpose()) - a));
      if (d > best) best = d, i3 = i;
    }
    if (best < 1e-12) throw DegenerateBody("wulff_body: coplanar directions");
    Eigen::Vector3d centroid =
        (a + b + c + Eigen::Vector3d(pts_.row(i3).transpose())) / 4.0;
    make_face(i0, i1, i2, centroid);
    make_face(i0, i1, i3, centroid);
    make_face(i0, i2, i3, centroid);
    make_face(i1, i2, i3, centroid);
  }

  void add_point(int p) {
    Eigen::Vector3d x = pts_.row(p).transpose();
    std::vector<int> visible;
    for (size_t f = 0; f < faces_.size(); ++f) {
      if (!faces_[f].alive) continue;
      if (faces_[f].normal.dot(x) > faces_[f].offset + 1e-12 * faces_[f].normal.norm())
        visible.push_back(static_cast<int>(f));
    }
    if (visible.empty()) return;
    // horizon = edges shared by exactly one visible face
    std::vector<std::pair<int, int>> horizon;
    auto edge_key = [](int u, int v) { return std::make_pair(std::min(u, v), std::max(u, v)); };
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> edges;
    for (int f : visible) {
      for (int e = 0; e < 3; ++e) {
        int u = faces_[f].v[e], v = faces_[f].v[(e + 1) % 3];
        auto key = edge_key(u, v);
        bool merged = false;
        for (auto& rec : edges)
          if (rec.first == key) {
            rec.second.second++;
            merged = true;
            break;
          }
        if (!merged) edges.push_back({key, {u, 1}});
      }
      faces_[f].alive = false;
    }
    Eigen::Vector3d inside = Eigen::Vector3d::Zero();
    int cnt = 0;
    for (const auto& f : faces_)
      if (f.alive) {
        for (int e = 0; e < 3; ++e) inside += Eigen::Vector3d(pts_.row(f.v[e]).transpose());
        cnt += 3;
      }
    if (cnt == 0) throw DegenerateBody("wulff_body: hull collapse");
    inside /= cnt;
    for (const auto& rec : edges)
      if (rec.second.second == 1)
        make_face(rec.first.first, rec.first.second, p, inside);
  }

  const Eigen::MatrixXd& pts_;
  std::vector<Face> faces_;
};

// Support function of the halfspace intersection { y . x_i <= g_i } at the
// grid directions, via the polar dual: h_W = gauge of conv{ x_i / g_i }.
inline Eigen::VectorXd wulff_support_values(const CandidateField& cand) {
  const auto& grid = *cand.grid;
  int m = grid.node_count();
  Eigen::MatrixXd pts(m, 3);
  for (int j = 0; j < m; ++j) pts.row(j) = grid.node3(j).transpose() / cand.g[j];
  std::vector<Facet> facets =
      cand.dim == 2 ? hull_facets_2d(pts) : Hull3D(pts).facets();
  Eigen::VectorXd h(m);
  for (int j = 0; j < m; ++j) {
    Eigen::Vector3d u = grid.node3(j);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& f : facets) best = std::max(best, f.normal.dot(u) / f.offset);
    if (best <= 0.0) throw DegenerateBody("wulff_body: unbounded direction");
    h[j] = best;
  }
  return h;
}

}  // namespace detail

struct WulffOptions {
  int bandlimit = 0;        // 0: pick from grid resolution
  double fastpath_tol = 1e-6;  // sup-norm slack for accepting projected g directly
  double eps_conv = kConvexityEps;
};

// Wulff body of a positive nodal function g: the largest convex body whose
// support function stays below g. If the spectral projection of g is already
// a valid support function within fastpath_tol, it is used directly;
// otherwise the polytope { y . x_i <= g_i } is built (dual convex hull) and
// its support function is mollified back onto the basis.
inline BodyRep wulff_body(const CandidateField& cand, const WulffOptions& opt = {}) {
  if (cand.g.minCoeff() <= 0.0)
    throw PositivityViolation("wulff_body: Wulff function must be positive");
  const auto& grid = *cand.grid;
  int bl = opt.bandlimit;
  if (bl == 0) bl = grid.dim == 2 ? grid.resolution / 4 : grid.resolution / 2;

  auto field = analyze(cand.g, grid, bl);
  if (field.even) {
    Eigen::VectorXd proj = values_on_grid(field, grid);
    if ((proj - cand.g).cwiseAbs().maxCoeff() <=
        opt.fastpath_tol * std::max(1.0, cand.g.maxCoeff())) {
      try {
        return body_from_field(std::move(field), cand.grid, "wulff", opt.eps_conv);
      } catch (const ConvexityViolation&) {
        // projected g is not convex; fall through to the polytope route
      } catch (const PositivityViolation&) {
      }
    }
  }

  Eigen::VectorXd hw = detail::wulff_support_values(cand);
  auto wf = analyze(hw, grid, bl);
  if (!wf.even) {
    // symmetrize round-off only; a genuinely odd part is an input error
    double odd = 0.0;
    for (int i = 0; i < wf.size(); ++i)
      if (!mode_is_even(grid.dim, i)) {
        odd = std::max(odd, std::abs(wf.coeffs[i]));
        wf.coeffs[i] = 0.0;
      }
    if (odd > 1e-9 * std::max(1.0, wf.coeffs.cwiseAbs().maxCoeff()))
      throw NotOriginSymmetric("wulff_body: candidate is not origin-symmetric");
    wf.even = true;
  }
  return body_from_field(std::move(wf), cand.grid, "wulff", opt.eps_conv);
}

}  // namespace bmk

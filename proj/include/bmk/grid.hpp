#pragma once

// Quadrature grids on S^1 and S^2 with per-node tangent frames.
//
// S^1: m uniform nodes theta_j = 2*pi*j/m, weight 2*pi/m each.
// S^2: Gauss-Legendre nodes in cos(theta) times a uniform longitude grid.
//      All nodes are interior, the poles are never sampled.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "bmk/errors.hpp"

namespace bmk {

inline constexpr double kPi = std::numbers::pi;

// Gauss-Legendre rule on [-1,1], nodes ascending. Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess for the i-th root (descending order).
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
}

struct DirectionGrid {
  int dim = 2;         // ambient dimension, 2 or 3
  int resolution = 0;  // construction parameter, see build_grid
  // Angles per node: theta only for S^1; (theta, phi) colatitude/longitude for S^2.
  std::vector<double> theta;
  std::vector<double> phi;
  Eigen::VectorXd weights;
  Eigen::MatrixXd nodes;  // node_count x dim unit vectors

  int node_count() const { return static_cast<int>(theta.size()); }
  int tangent_dim() const { return dim - 1; }

  Eigen::Vector3d node3(int j) const {
    return {nodes(j, 0), nodes(j, 1), dim == 3 ? nodes(j, 2) : 0.0};
  }

  // Orthonormal tangent frame at node j. For S^1 the single tangent is
  // (-sin, cos); for S^2 the frame is (e_theta, e_phi / sin theta).
  Eigen::Vector3d frame(int j, int axis) const {
    if (dim == 2) {
      return {-std::sin(theta[j]), std::cos(theta[j]), 0.0};
    }
    double st = std::sin(theta[j]), ct = std::cos(theta[j]);
    double sp = std::sin(phi[j]), cp = std::cos(phi[j]);
    if (axis == 0) return {ct * cp, ct * sp, -st};
    return {-sp, cp, 0.0};
  }

  // Index of the antipodal node (-x is always a grid node by construction).
  int antipode(int j) const {
    int m = node_count();
    if (dim == 2) return (j + m / 2) % m;
    int nphi = n_phi;
    int itheta = j / nphi, iphi = j % nphi;
    int ntheta = m / nphi;
    return (ntheta - 1 - itheta) * nphi + (iphi + nphi / 2) % nphi;
  }

  int n_phi = 0;  // longitudes per ring (S^2 only)
};

// Builds a quadrature grid.
//   dim 2: resolution uniform nodes on the circle (resolution even, >= 4).
//   dim 3: (resolution + 2) Gauss-Legendre colatitude rings, each carrying
//          2*resolution + 2 uniform longitudes; exact for spherical
//          polynomials through degree ~2*resolution.
inline DirectionGrid build_grid(int dim, int resolution) {
  if (dim != 2 && dim != 3) throw ConfigError("build_grid: dim must be 2 or 3");
  if (resolution < 4) throw ConfigError("build_grid: resolution must be >= 4");

  DirectionGrid g;
  g.dim = dim;
  g.resolution = resolution;

  if (dim == 2) {
    int m = resolution + (resolution % 2);  // even node count for antipodes
    g.theta.resize(m);
    g.weights.resize(m);
    g.nodes.resize(m, 2);
    for (int j = 0; j < m; ++j) {
      double t = 2.0 * kPi * j / m;
      g.theta[j] = t;
      g.weights[j] = 2.0 * kPi / m;
      g.nodes(j, 0) = std::cos(t);
      g.nodes(j, 1) = std::sin(t);
    }
    return g;
  }

  int ntheta = resolution + 2;
  int nphi = 2 * resolution + 2;  // even, so phi + pi stays on the grid
  std::vector<double> gx, gw;
  gauss_legendre(ntheta, gx, gw);
  int m = ntheta * nphi;
  g.theta.resize(m);
  g.phi.resize(m);
  g.weights.resize(m);
  g.nodes.resize(m, 3);
  g.n_phi = nphi;
  for (int i = 0; i < ntheta; ++i) {
    double ct = gx[ntheta - 1 - i];  // descending in cos => theta ascending
    double th = std::acos(ct);
    double st = std::sin(th);
    for (int k = 0; k < nphi; ++k) {
      int j = i * nphi + k;
      double ph = 2.0 * kPi * k / nphi;
      g.theta[j] = th;
      g.phi[j] = ph;
      g.weights[j] = gw[ntheta - 1 - i] * (2.0 * kPi / nphi);
      g.nodes(j, 0) = st * std::cos(ph);
      g.nodes(j, 1) = st * std::sin(ph);
      g.nodes(j, 2) = ct;
    }
  }
  return g;
}

inline double integrate(const Eigen::VectorXd& values, const DirectionGrid& g) {
  if (values.size() != g.weights.size())
    throw ConfigError("integrate: value vector does not match grid");
  return g.weights.dot(values);
}

}  // namespace bmk

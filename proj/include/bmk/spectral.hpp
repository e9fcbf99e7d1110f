#pragma once

// Truncated orthogonal bases on the sphere and their covariant calculus.
//
// S^1: real Fourier basis {1/sqrt(2pi), cos(k t)/sqrt(pi), sin(k t)/sqrt(pi)}.
// S^2: real orthonormal spherical harmonics, l-major ordering
//      (l,0), (l,1,cos), (l,1,sin), ..., (l,l,sin).
//
// synthesize() returns per-node jets (value, tangent gradient, covariant
// Hessian) in the orthonormal frame of the grid:
//   h_{;tt} = h_tt
//   h_{;tp} = (h_tp - cot t * h_p) / sin t
//   h_{;pp} = h_pp / sin^2 t + cot t * h_t

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bmk/grid.hpp"

namespace bmk {

inline int basis_size(int dim, int bandlimit) {
  return dim == 2 ? 2 * bandlimit + 1 : (bandlimit + 1) * (bandlimit + 1);
}

// Degree (k on S^1, l on S^2) of a basis mode.
inline int mode_degree(int dim, int index) {
  if (dim == 2) return (index + 1) / 2;
  return static_cast<int>(std::sqrt(static_cast<double>(index)));
}

// A mode is even iff its degree is even: both cos/sin of even k on S^1
// (antipodal map is t -> t + pi) and even-l harmonics on S^2.
inline bool mode_is_even(int dim, int index) {
  return mode_degree(dim, index) % 2 == 0;
}

inline double laplace_multiplier(int dim, int index) {
  int d = mode_degree(dim, index);
  return dim == 2 ? -static_cast<double>(d) * d : -static_cast<double>(d) * (d + 1);
}

inline std::vector<int> even_modes(int dim, int bandlimit) {
  std::vector<int> out;
  int n = basis_size(dim, bandlimit);
  for (int i = 0; i < n; ++i)
    if (mode_is_even(dim, i)) out.push_back(i);
  return out;
}

struct SpectralField {
  int dim = 2;
  int bandlimit = 0;
  Eigen::VectorXd coeffs;  // basis_size(dim, bandlimit) entries
  bool even = false;

  int size() const { return static_cast<int>(coeffs.size()); }
};

struct Jet {
  double value = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
};

namespace detail {

inline int tri_index(int l, int m) { return l * (l + 1) / 2 + m; }

// Fully normalized associated Legendre values P(l,m, cos t) together with
// first and second theta-derivatives, for all 0 <= m <= l <= L.
// Nodes are interior so sin t > 0 throughout.
inline void legendre_jets(int L, double ct, double st, std::vector<double>& P,
                          std::vector<double>& Pt, std::vector<double>& Ptt) {
  int n = tri_index(L, L) + 1;
  P.assign(n, 0.0);
  std::vector<double> Px(n, 0.0);
  double omx2 = st * st;  // 1 - ct^2
  P[0] = std::sqrt(1.0 / (4.0 * kPi));
  for (int m = 1; m <= L; ++m)
    P[tri_index(m, m)] =
        -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * P[tri_index(m - 1, m - 1)];
  for (int m = 0; m < L; ++m)
    P[tri_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * ct * P[tri_index(m, m)];
  for (int m = 0; m <= L; ++m) {
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      double b = std::sqrt((2.0 * l + 1.0) *
                           (static_cast<double>(l - 1) * (l - 1) - m * m) /
                           ((2.0 * l - 3.0) * (static_cast<double>(l) * l - m * m)));
      P[tri_index(l, m)] =
          a * ct * P[tri_index(l - 1, m)] - b * P[tri_index(l - 2, m)];
    }
  }
  // (1-x^2) P'(l,m) = -l x P(l,m) + c(l,m) P(l-1,m)
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      double acc = -l * ct * P[tri_index(l, m)];
      if (l > m)
        acc += std::sqrt((static_cast<double>(l) * l - m * m) * (2.0 * l + 1.0) /
                         (2.0 * l - 1.0)) *
               P[tri_index(l - 1, m)];
      Px[tri_index(l, m)] = acc / omx2;
    }
  }
  Pt.assign(n, 0.0);
  Ptt.assign(n, 0.0);
  for (int l = 0; l <= L; ++l) {
    for (int m = 0; m <= l; ++m) {
      int i = tri_index(l, m);
      // Legendre ODE gives the second x-derivative.
      double pxx =
          (2.0 * ct * Px[i] - (l * (l + 1.0) - m * m / omx2) * P[i]) / omx2;
      Pt[i] = -st * Px[i];
      Ptt[i] = -ct * Px[i] + omx2 * pxx;
    }
  }
}

}  // namespace detail

// Per-node values and covariant jets of every basis mode.
struct NodeBasis {
  Eigen::VectorXd val, gt, gp, h11, h12, h22;
};

inline void eval_node_basis(int dim, int bandlimit, double theta, double phi,
                            NodeBasis& nb) {
  int n = basis_size(dim, bandlimit);
  nb.val.resize(n);
  nb.gt.resize(n);
  nb.gp.resize(n);
  nb.h11.resize(n);
  nb.h12.resize(n);
  nb.h22.resize(n);
  nb.gp.setZero();
  nb.h12.setZero();
  nb.h22.setZero();
  if (dim == 2) {
    nb.val[0] = 1.0 / std::sqrt(2.0 * kPi);
    nb.gt[0] = 0.0;
    nb.h11[0] = 0.0;
    double inv = 1.0 / std::sqrt(kPi);
    for (int k = 1; k <= bandlimit; ++k) {
      double c = std::cos(k * theta) * inv, s = std::sin(k * theta) * inv;
      nb.val[2 * k - 1] = c;
      nb.val[2 * k] = s;
      nb.gt[2 * k - 1] = -k * s;
      nb.gt[2 * k] = k * c;
      nb.h11[2 * k - 1] = -k * k * c;
      nb.h11[2 * k] = -k * k * s;
    }
    return;
  }
  double ct = std::cos(theta), st = std::sin(theta);
  double cot = ct / st, ist = 1.0 / st;
  std::vector<double> P, Pt, Ptt;
  detail::legendre_jets(bandlimit, ct, st, P, Pt, Ptt);
  const double r2 = std::sqrt(2.0);
  for (int l = 0; l <= bandlimit; ++l) {
    for (int m = 0; m <= l; ++m) {
      int ti = detail::tri_index(l, m);
      double p = P[ti], pt = Pt[ti], ptt = Ptt[ti];
      auto put = [&](int col, double T, double Tp) {
        // T = angular factor, Tp = dT/dphi; d2T/dphi2 = -m^2 T.
        nb.val[col] = p * T;
        nb.gt[col] = pt * T;
        nb.gp[col] = p * Tp * ist;
        nb.h11[col] = ptt * T;
        nb.h12[col] = (pt - cot * p) * Tp * ist;
        nb.h22[col] = -m * m * p * T * ist * ist + cot * pt * T;
      };
      if (m == 0) {
        put(l * l, 1.0, 0.0);
      } else {
        double cm = std::cos(m * phi), sm = std::sin(m * phi);
        put(l * l + 2 * m - 1, r2 * cm, -r2 * m * sm);
        put(l * l + 2 * m, r2 * sm, r2 * m * cm);
      }
    }
  }
}

enum class Parity { All, Even };

// Node x mode matrices of basis values and (optionally) covariant jets,
// cached for repeated transforms and Galerkin assembly on one grid.
struct BasisTables {
  int dim = 2;
  int bandlimit = 0;
  std::vector<int> modes;  // column -> global mode index
  Eigen::MatrixXd val, gt, gp, h11, h12, h22;

  BasisTables() = default;
  BasisTables(const DirectionGrid& grid, int bl, Parity par,
              bool with_hessians = true) {
    dim = grid.dim;
    bandlimit = bl;
    int nfull = basis_size(dim, bl);
    if (par == Parity::All) {
      modes.resize(nfull);
      for (int i = 0; i < nfull; ++i) modes[i] = i;
    } else {
      modes = even_modes(dim, bl);
    }
    int m = grid.node_count(), n = static_cast<int>(modes.size());
    val.resize(m, n);
    gt.resize(m, n);
    gp.resize(m, n);
    if (with_hessians) {
      h11.resize(m, n);
      h12.resize(m, n);
      h22.resize(m, n);
    }
    NodeBasis nb;
    for (int j = 0; j < m; ++j) {
      eval_node_basis(dim, bl, grid.theta[j], dim == 3 ? grid.phi[j] : 0.0, nb);
      for (int c = 0; c < n; ++c) {
        int i = modes[c];
        val(j, c) = nb.val[i];
        gt(j, c) = nb.gt[i];
        gp(j, c) = nb.gp[i];
        if (with_hessians) {
          h11(j, c) = nb.h11[i];
          h12(j, c) = nb.h12[i];
          h22(j, c) = nb.h22[i];
        }
      }
    }
  }

  // Restrict a full coefficient vector to the table's columns.
  Eigen::VectorXd restrict_coeffs(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(modes.size());
    for (size_t c = 0; c < modes.size(); ++c) out[c] = full[modes[c]];
    return out;
  }

  Eigen::VectorXd expand_coeffs(const Eigen::VectorXd& restricted) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(basis_size(dim, bandlimit));
    for (size_t c = 0; c < modes.size(); ++c) out[modes[c]] = restricted[c];
    return out;
  }
};

// Quadrature projection onto the truncated basis; exact for band-limited
// samples on a sufficiently resolved grid.
inline SpectralField analyze(const Eigen::VectorXd& values, const DirectionGrid& grid,
                             int bandlimit) {
  if (values.size() != grid.weights.size())
    throw ConfigError("analyze: value vector does not match grid");
  SpectralField f;
  f.dim = grid.dim;
  f.bandlimit = bandlimit;
  int n = basis_size(grid.dim, bandlimit);
  f.coeffs = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd wv = grid.weights.cwiseProduct(values);
  NodeBasis nb;
  for (int j = 0; j < grid.node_count(); ++j) {
    eval_node_basis(grid.dim, bandlimit, grid.theta[j],
                    grid.dim == 3 ? grid.phi[j] : 0.0, nb);
    f.coeffs += wv[j] * nb.val;
  }
  double scale = std::max(1.0, f.coeffs.cwiseAbs().maxCoeff());
  double odd_max = 0.0;
  for (int i = 0; i < n; ++i)
    if (!mode_is_even(grid.dim, i)) odd_max = std::max(odd_max, std::abs(f.coeffs[i]));
  if (odd_max < 1e-13 * scale) {
    f.even = true;
    for (int i = 0; i < n; ++i)
      if (!mode_is_even(grid.dim, i)) f.coeffs[i] = 0.0;
  }
  return f;
}

inline std::vector<Jet> synthesize(const SpectralField& f, const BasisTables& tb) {
  Eigen::VectorXd c = tb.restrict_coeffs(f.coeffs);
  Eigen::VectorXd v = tb.val * c, a = tb.gt * c, b = tb.gp * c;
  Eigen::VectorXd q11 = tb.h11 * c, q12 = tb.h12 * c, q22 = tb.h22 * c;
  std::vector<Jet> jets(v.size());
  for (int j = 0; j < v.size(); ++j) {
    jets[j].value = v[j];
    jets[j].grad << a[j], b[j];
    jets[j].hess << q11[j], q12[j], q12[j], q22[j];
  }
  return jets;
}

inline std::vector<Jet> synthesize(const SpectralField& f, const DirectionGrid& grid) {
  std::vector<Jet> jets(grid.node_count());
  NodeBasis nb;
  for (int j = 0; j < grid.node_count(); ++j) {
    eval_node_basis(f.dim, f.bandlimit, grid.theta[j],
                    f.dim == 3 ? grid.phi[j] : 0.0, nb);
    jets[j].value = f.coeffs.dot(nb.val);
    jets[j].grad << f.coeffs.dot(nb.gt), f.coeffs.dot(nb.gp);
    double q12 = f.coeffs.dot(nb.h12);
    jets[j].hess << f.coeffs.dot(nb.h11), q12, q12, f.coeffs.dot(nb.h22);
  }
  return jets;
}

inline Eigen::VectorXd values_on_grid(const SpectralField& f, const DirectionGrid& grid) {
  Eigen::VectorXd out(grid.node_count());
  NodeBasis nb;
  for (int j = 0; j < grid.node_count(); ++j) {
    eval_node_basis(f.dim, f.bandlimit, grid.theta[j],
                    f.dim == 3 ? grid.phi[j] : 0.0, nb);
    out[j] = f.coeffs.dot(nb.val);
  }
  return out;
}

inline SpectralField constant_field(int dim, int bandlimit, double value) {
  SpectralField f;
  f.dim = dim;
  f.bandlimit = bandlimit;
  f.coeffs = Eigen::VectorXd::Zero(basis_size(dim, bandlimit));
  f.coeffs[0] = value * (dim == 2 ? std::sqrt(2.0 * kPi) : std::sqrt(4.0 * kPi));
  f.even = true;
  return f;
}

// Random band-limited even field: i.i.d. uniform [-1,1] coefficients on
// even modes of degree 2..bandlimit/2, zero elsewhere.
template <class Rng>
SpectralField random_even_field(int dim, int bandlimit, Rng& rng) {
  SpectralField f;
  f.dim = dim;
  f.bandlimit = bandlimit;
  f.coeffs = Eigen::VectorXd::Zero(basis_size(dim, bandlimit));
  f.even = true;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int n = f.size();
  for (int i = 0; i < n; ++i) {
    int d = mode_degree(dim, i);
    if (d % 2 == 0 && d >= 2 && d <= bandlimit / 2) f.coeffs[i] = u(rng);
  }
  return f;
}

}  // namespace bmk

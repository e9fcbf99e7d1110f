#pragma once

// The Aleksandrov generalized eigenvalue problem
//   -U^{ij} (phi_{;ij} + phi delta_{ij}) = lambda h^{-1} det(W) phi
// assembled in weak form over the spectral basis. The cofactor U is
// divergence-free, so integration by parts yields the symmetric pair
//   A[psi,phi] = int U^{ij} psi_{;i} phi_{;j} - int tr(U) psi phi
//   B[psi,phi] = int h^{-1} det(W) psi phi.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bmk/body.hpp"
#include "bmk/measure.hpp"

namespace bmk {

struct Pencil {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<int> basis_map;  // column -> global mode index
  Parity subspace = Parity::All;
  std::string body_name;
  int bandlimit = 0;
  int dim = 2;
};

inline Pencil assemble_pencil(const BodyRep& K, Parity subspace,
                              double sym_tol = 1e-8) {
  const auto& grid = *K.grid;
  int m = grid.node_count();
  BasisTables tb(grid, K.field.bandlimit, subspace, /*with_hessians=*/false);

  Eigen::VectorXd w = grid.weights;
  Eigen::VectorXd u11(m), u12(m), u22(m), tru(m), bw(m);
  for (int j = 0; j < m; ++j) {
    u11[j] = w[j] * K.U[j](0, 0);
    u12[j] = w[j] * K.U[j](0, 1);
    u22[j] = w[j] * K.U[j](1, 1);
    tru[j] = w[j] * (K.tdim() == 1 ? K.U[j](0, 0) : K.U[j].trace());
    bw[j] = w[j] * K.detW[j] / K.h[j];
  }

  Pencil P;
  P.basis_map = tb.modes;
  P.subspace = subspace;
  P.body_name = K.name;
  P.bandlimit = K.field.bandlimit;
  P.dim = K.dim();

  P.A = tb.gt.transpose() * u11.asDiagonal() * tb.gt +
        tb.gt.transpose() * u12.asDiagonal() * tb.gp +
        tb.gp.transpose() * u12.asDiagonal() * tb.gt +
        tb.gp.transpose() * u22.asDiagonal() * tb.gp -
        tb.val.transpose() * tru.asDiagonal() * tb.val;
  P.B = tb.val.transpose() * bw.asDiagonal() * tb.val;

  double scale = std::max(1.0, P.A.cwiseAbs().maxCoeff());
  double asym = (P.A - P.A.transpose()).cwiseAbs().maxCoeff() / scale;
  if (asym > sym_tol)
    throw AssemblyAsymmetry("assemble_pencil: asymmetry " + std::to_string(asym));
  P.A = 0.5 * (P.A + P.A.transpose()).eval();
  P.B = 0.5 * (P.B + P.B.transpose()).eval();

  Eigen::LLT<Eigen::MatrixXd> llt(P.B);
  if (llt.info() != Eigen::Success)
    throw EigensolveFailure("assemble_pencil: B is not positive definite");
  return P;
}

struct SpectrumResult {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // B-orthonormal columns
  double lambda3 = 0.0;
  int negative_count = 0;
  int kernel_dim = 0;
  Parity subspace = Parity::All;
  std::vector<int> basis_map;
  int dim = 2;
};

inline constexpr double kZeroGroupTol = 1e-4;

inline SpectrumResult solve_spectrum(const Pencil& P, int count = 8,
                                     double zero_tol = kZeroGroupTol) {
  if (count < 3) throw ConfigError("solve_spectrum: count must be >= 3");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(P.A, P.B);
  if (es.info() != Eigen::Success)
    throw EigensolveFailure("solve_spectrum: eigensolver did not converge");
  SpectrumResult r;
  int keep = std::min<int>(count, es.eigenvalues().size());
  r.eigenvalues = es.eigenvalues().head(keep);
  r.eigenvectors = es.eigenvectors().leftCols(keep);
  r.subspace = P.subspace;
  r.basis_map = P.basis_map;
  r.dim = P.dim;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()[i];
    if (ev < -zero_tol) ++r.negative_count;
    if (std::abs(ev) <= zero_tol) ++r.kernel_dim;
  }
  if (P.subspace == Parity::Even) {
    // coordinate functions are odd, the zero group is absent here
    if (keep < 2) throw EigensolveFailure("solve_spectrum: need >= 2 eigenvalues");
    r.lambda3 = r.eigenvalues[1];
  } else {
    r.lambda3 = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()[i] > zero_tol) {
        r.lambda3 = es.eigenvalues()[i];
        break;
      }
  }
  return r;
}

// lambda_3 from the even subspace, cross-checked against the full space.
inline std::pair<double, bool> third_eigenvalue(const BodyRep& K,
                                                double agree_tol = 1e-5) {
  auto even = solve_spectrum(assemble_pencil(K, Parity::Even), 4);
  auto full = solve_spectrum(assemble_pencil(K, Parity::All), K.dim() + 3);
  if (std::abs(even.lambda3 - full.lambda3) > agree_tol)
    throw CrossCheckMismatch("third_eigenvalue: even " + std::to_string(even.lambda3) +
                             " vs full " + std::to_string(full.lambda3));
  return {even.lambda3, even.lambda3 >= 1.0 - 1e-8};
}

struct StructureReport {
  bool one_negative = false;
  double negative_eigenvalue = 0.0;
  double negative_value_residual = 0.0;  // |lambda_1 + n|
  double eigvec_angle = 0.0;             // B-angle between v_1 and h_K
  int kernel_dim = 0;
  double kernel_angle = 0.0;  // max principal angle vs span{a.x}
  bool pass = false;
};

namespace detail {

// Coefficient vectors of the coordinate functions x_i in the full basis.
inline Eigen::MatrixXd coordinate_coefficients(int dim, int bandlimit) {
  int n = basis_size(dim, bandlimit);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, dim);
  if (dim == 2) {
    C(1, 0) = std::sqrt(kPi);  // cos t
    C(2, 1) = std::sqrt(kPi);  // sin t
  } else {
    double c = std::sqrt(4.0 * kPi / 3.0);
    C(2, 0) = -c;  // x = -c * Y_{1,1,cos} (Condon-Shortley sign)
    C(3, 1) = -c;  // y
    C(1, 2) = c;   // z = c * Y_{1,0}
  }
  return C;
}

}  // namespace detail

inline StructureReport verify_structure(const BodyRep& K, double tol = 1e-5) {
  Pencil P = assemble_pencil(K, Parity::All);
  auto full = solve_spectrum(P, K.dim() + 3);
  StructureReport rep;
  rep.kernel_dim = full.kernel_dim;
  rep.one_negative = full.negative_count == 1;
  rep.negative_eigenvalue = full.eigenvalues[0];
  rep.negative_value_residual = std::abs(full.eigenvalues[0] + K.n());

  // first eigenvector vs h_K in the B inner product
  Eigen::VectorXd hv = K.field.coeffs;
  Eigen::VectorXd v1 = Eigen::VectorXd::Zero(hv.size());
  for (size_t c = 0; c < full.basis_map.size(); ++c)
    v1[full.basis_map[c]] = full.eigenvectors(c, 0);
  auto bdot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double acc = 0;
    for (size_t c = 0; c < P.basis_map.size(); ++c)
      for (size_t d = 0; d < P.basis_map.size(); ++d)
        acc += a[P.basis_map[c]] * P.B(c, d) * b[P.basis_map[d]];
    return acc;
  };
  double cosang = std::abs(bdot(v1, hv)) / std::sqrt(bdot(v1, v1) * bdot(hv, hv));
  rep.eigvec_angle = std::acos(std::min(1.0, cosang));

  // kernel vs span of coordinate functions: principal angles via the
  // B-orthonormalized cross Gram
  int d = K.dim();
  if (full.kernel_dim != d)
    throw StructureViolation("verify_structure: kernel dimension " +
                                 std::to_string(full.kernel_dim) + " != " +
                                 std::to_string(d),
                             static_cast<double>(full.kernel_dim));
  Eigen::MatrixXd C = detail::coordinate_coefficients(d, K.field.bandlimit);
  Eigen::MatrixXd Cres(P.basis_map.size(), d);
  for (size_t c = 0; c < P.basis_map.size(); ++c) Cres.row(c) = C.row(P.basis_map[c]);
  Eigen::MatrixXd G = Cres.transpose() * P.B * Cres;
  Eigen::MatrixXd Cw = Cres * Eigen::LLT<Eigen::MatrixXd>(G).matrixL().solve(
                                  Eigen::MatrixXd::Identity(d, d)).transpose();
  Eigen::MatrixXd V = full.eigenvectors.middleCols(1, d);
  Eigen::MatrixXd cross = V.transpose() * P.B * Cw;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
  double smin = svd.singularValues().minCoeff();
  rep.kernel_angle = std::acos(std::min(1.0, smin));

  rep.pass = rep.one_negative && rep.negative_value_residual < tol &&
             rep.eigvec_angle < tol && rep.kernel_dim == d && rep.kernel_angle < tol;
  return rep;
}

}  // namespace bmk

#pragma once

// Damped Newton solver with homotopy continuation for the even Monge-Ampere
// problem det(grad^2 u + u I) = f u^{p-1} on the sphere, p in (0,1).
// Continuation path: f_t = t f + 1 - t, p_t = t p + (1 - t) p_star, starting
// from the exact root u = 1 at t = 0.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bmk/catalog.hpp"
#include "bmk/spectral.hpp"

namespace bmk {

struct SolverOptions {
  double newton_tol = 1e-10;
  int max_iters = 50;
  int max_backtracks = 20;
  double eps_conv = kConvexityEps;
  double c2_ceiling = 1e6;     // abort threshold for the C2 proxy monitor
  double t_step_init = 0.1;
  double t_step_floor = 1e-4;
};

struct SolveResult {
  SpectralField solution;
  double residual_sup = 0.0;
  int iterations = 0;
  std::vector<SpectralField> distinct_solutions;
};

struct HomotopyStep {
  double t = 0.0;
  double p_t = 0.0;
  SpectralField solution;
  int newton_iters = 0;
  double residual_sup = 0.0;
  double bound_low = 0.0;   // min of u over the grid
  double bound_high = 0.0;  // max of u over the grid
  double norm_C2alpha_proxy = 0.0;  // sup|u| + max node Hessian norm
};

struct HomotopyTrace {
  std::vector<HomotopyStep> steps;
  bool converged = false;
  double p_star = 0.5;
  SpectralField f;
};

struct ProbeResult {
  std::vector<SpectralField> representatives;
  int trials = 0;
  int failed = 0;
};

// Pointwise residual det(grad^2 u + u I) - f u^{p-1} for arbitrary fields.
inline Eigen::VectorXd residual(const SpectralField& u, const SpectralField& f,
                                double p, const DirectionGrid& grid) {
  auto jets = synthesize(u, grid);
  Eigen::VectorXd fv = values_on_grid(f, grid);
  int tdim = grid.tangent_dim();
  Eigen::VectorXd r(grid.node_count());
  for (int j = 0; j < grid.node_count(); ++j) {
    double uv = jets[j].value;
    if (uv <= 0) throw PositivityViolation("residual: u must be positive");
    Eigen::Matrix2d W = jets[j].hess;
    W(0, 0) += uv;
    if (tdim == 2) W(1, 1) += uv;
    r[j] = det_w(W, tdim) - fv[j] * std::pow(uv, p - 1.0);
  }
  return r;
}

// Smallest magnitude of the t = 0 linearization multipliers
// -k(k+n-1) + (n+1-p_star) over the even modes; must stay away from zero.
inline double linearized_check_at_one(int dim, int bandlimit, double p_star) {
  if (p_star <= 0.0 || p_star >= 1.0)
    throw ConfigError("linearized_check_at_one: p_star must lie in (0,1)");
  double best = std::numeric_limits<double>::infinity();
  for (int i : even_modes(dim, bandlimit)) {
    double m = laplace_multiplier(dim, i) + (dim - p_star);
    best = std::min(best, std::abs(m));
  }
  return best;
}

class LpSolver {
 public:
  explicit LpSolver(Discretization disc, SolverOptions opts = {})
      : disc_(std::move(disc)),
        opts_(opts),
        tb_(*disc_.grid, disc_.bandlimit, Parity::Even, /*with_hessians=*/true) {}

  const Discretization& disc() const { return disc_; }
  const SolverOptions& options() const { return opts_; }

  // f given nodally keeps constructed roots exact; the spectral overload
  // evaluates f on the grid first.
  SolveResult newton_solve(const Eigen::VectorXd& f_nodes, double p,
                           const SpectralField& u0) const {
    if (!u0.even) throw NotOriginSymmetric("newton_solve: u0 must be even");
    Eigen::VectorXd c = tb_.restrict_coeffs(u0.coeffs);
    State st = eval(c);
    if (st.u.minCoeff() <= 0)
      throw PositivityViolation("newton_solve: u0 must be positive");
    Eigen::VectorXd r = nodal_residual(st, f_nodes, p);
    double rsup = r.cwiseAbs().maxCoeff();
    const Eigen::VectorXd& w = disc_.grid->weights;
    int it = 0;
    while (rsup >= opts_.newton_tol) {
      if (it >= opts_.max_iters)
        throw NewtonDivergence("newton_solve: no convergence after " +
                               std::to_string(it) + " iterations");
      Eigen::MatrixXd J = jacobian(st, f_nodes, p);
      Eigen::VectorXd R = tb_.val.transpose() * r.cwiseProduct(w).eval();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
      if (!lu.isInvertible())
        throw JacobianSingular("newton_solve: singular linearization");
      Eigen::VectorXd delta = lu.solve(-R);

      double s = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < opts_.max_backtracks; ++bt, s *= 0.5) {
        Eigen::VectorXd cn = c + s * delta;
        State sn = eval(cn);
        if (sn.u.minCoeff() <= 0 || sn.min_eig <= opts_.eps_conv) continue;
        Eigen::VectorXd rn = nodal_residual(sn, f_nodes, p);
        double rs = rn.cwiseAbs().maxCoeff();
        if (rs < rsup) {
          c = std::move(cn);
          st = std::move(sn);
          r = std::move(rn);
          rsup = rs;
          accepted = true;
          break;
        }
      }
      if (!accepted) throw NewtonDivergence("newton_solve: line search stalled");
      ++it;
    }
    SolveResult out;
    out.solution.dim = disc_.dim;
    out.solution.bandlimit = disc_.bandlimit;
    out.solution.even = true;
    out.solution.coeffs = tb_.expand_coeffs(c);
    out.residual_sup = rsup;
    out.iterations = it;
    return out;
  }

  SolveResult newton_solve(const SpectralField& f, double p,
                           const SpectralField& u0) const {
    return newton_solve(values_on_grid(f, *disc_.grid), p, u0);
  }

  HomotopyTrace homotopy_solve(const Eigen::VectorXd& f_nodes, double p,
                               double p_star = 0.5) const {
    if (p <= 0.0 || p >= 1.0)
      throw ConfigError("homotopy_solve: p must lie in (0,1)");
    if (p_star <= 0.0 || p_star >= 1.0)
      throw ConfigError("homotopy_solve: p_star must lie in (0,1)");
    if (f_nodes.minCoeff() <= 0)
      throw PositivityViolation("homotopy_solve: f must be positive");

    HomotopyTrace tr;
    tr.p_star = p_star;
    tr.f = analyze(f_nodes, *disc_.grid, disc_.bandlimit);

    auto blend = [&](double t) -> Eigen::VectorXd {
      return t * f_nodes + Eigen::VectorXd::Constant(f_nodes.size(), 1.0 - t);
    };
    double t = 0.0;
    SolveResult cur =
        newton_solve(blend(0.0), p_star, constant_field(disc_.dim, disc_.bandlimit, 1.0));
    record(tr, 0.0, p_star, cur);

    double dt = opts_.t_step_init;
    int streak = 0;
    while (t < 1.0) {
      double tn = std::min(1.0, t + dt);
      double pt = tn * p + (1.0 - tn) * p_star;
      try {
        SolveResult next = newton_solve(blend(tn), pt, cur.solution);
        t = tn;
        cur = std::move(next);
        record(tr, t, pt, cur);
        if (++streak >= 2) {
          dt *= 2.0;
          streak = 0;
        }
      } catch (const NewtonDivergence&) {
        dt *= 0.5;
        streak = 0;
        if (dt < opts_.t_step_floor) return tr;  // converged stays false
      } catch (const JacobianSingular&) {
        dt *= 0.5;
        streak = 0;
        if (dt < opts_.t_step_floor) return tr;
      }
    }
    tr.converged = true;
    return tr;
  }

  HomotopyTrace homotopy_solve(const SpectralField& f, double p,
                               double p_star = 0.5) const {
    return homotopy_solve(values_on_grid(f, *disc_.grid), p, p_star);
  }

  // Re-run Newton from perturbed starts and cluster the limits by
  // sup-distance; low-degree noise keeps the starts admissible.
  ProbeResult uniqueness_probe(const Eigen::VectorXd& f_nodes, double p,
                               const SolveResult& base, int trials, double noise,
                               unsigned long long seed = 1,
                               double cluster_tol = 1e-6) const {
    ProbeResult out;
    out.trials = trials;
    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> rep_values;
    auto consider = [&](const SpectralField& s) {
      Eigen::VectorXd v = tb_.val * tb_.restrict_coeffs(s.coeffs);
      for (const auto& rv : rep_values)
        if ((v - rv).cwiseAbs().maxCoeff() <= cluster_tol) return;
      rep_values.push_back(std::move(v));
      out.representatives.push_back(s);
    };
    consider(base.solution);
    int noise_bl = std::min(4, disc_.bandlimit);
    for (int tI = 0; tI < trials; ++tI) {
      auto nz = random_even_field(disc_.dim, noise_bl, rng);
      SpectralField u0 = base.solution;
      u0.coeffs.head(nz.coeffs.size()) += noise * nz.coeffs;
      try {
        consider(newton_solve(f_nodes, p, u0).solution);
      } catch (const Error&) {
        ++out.failed;
      }
    }
    return out;
  }

  // Nodal residual of an arbitrary even field against nodal f.
  Eigen::VectorXd residual_values(const SpectralField& u,
                                  const Eigen::VectorXd& f_nodes, double p) const {
    State st = eval(tb_.restrict_coeffs(u.coeffs));
    if (st.u.minCoeff() <= 0)
      throw PositivityViolation("residual_values: u must be positive");
    return nodal_residual(st, f_nodes, p);
  }

 private:
  struct State {
    Eigen::VectorXd u, w11, w12, w22, det;
    double min_eig = 0.0;
    double max_hess = 0.0;
  };

  State eval(const Eigen::VectorXd& c) const {
    State st;
    st.u = tb_.val * c;
    st.w11 = tb_.h11 * c + st.u;
    if (tdim() == 1) {
      st.det = st.w11;
      st.min_eig = st.w11.minCoeff();
      st.max_hess = (st.w11 - st.u).cwiseAbs().maxCoeff();
    } else {
      st.w12 = tb_.h12 * c;
      st.w22 = tb_.h22 * c + st.u;
      st.det = st.w11.cwiseProduct(st.w22) - st.w12.cwiseProduct(st.w12);
      st.min_eig = std::numeric_limits<double>::infinity();
      st.max_hess = 0.0;
      for (int j = 0; j < st.u.size(); ++j) {
        double mean = 0.5 * (st.w11[j] + st.w22[j]);
        double rad = std::sqrt(0.25 * (st.w11[j] - st.w22[j]) * (st.w11[j] - st.w22[j]) +
                               st.w12[j] * st.w12[j]);
        st.min_eig = std::min(st.min_eig, mean - rad);
        double a = st.w11[j] - st.u[j], b = st.w12[j], d = st.w22[j] - st.u[j];
        st.max_hess = std::max(st.max_hess, std::sqrt(a * a + 2 * b * b + d * d));
      }
    }
    return st;
  }

  Eigen::VectorXd nodal_residual(const State& st, const Eigen::VectorXd& f_nodes,
                                 double p) const {
    Eigen::VectorXd r(st.u.size());
    for (int j = 0; j < st.u.size(); ++j)
      r[j] = st.det[j] - f_nodes[j] * std::pow(st.u[j], p - 1.0);
    return r;
  }

  // Galerkin matrix of delta -> U^{ij}(delta_{;ij} + delta d_ij)
  //                            - (p-1) f u^{p-2} delta at the current state;
  // the cofactor of grad^2 u + u I is divergence-free, so the second-order
  // part assembles symmetrically from first derivatives.
  Eigen::MatrixXd jacobian(const State& st, const Eigen::VectorXd& f_nodes,
                           double p) const {
    const Eigen::VectorXd& w = disc_.grid->weights;
    int m = static_cast<int>(st.u.size());
    Eigen::VectorXd mass(m);
    for (int j = 0; j < m; ++j)
      mass[j] = w[j] * (p - 1.0) * f_nodes[j] * std::pow(st.u[j], p - 2.0);

    if (tdim() == 1) {
      // cofactor is identically 1
      return -(tb_.gt.transpose() * w.asDiagonal() * tb_.gt -
               tb_.val.transpose() * w.asDiagonal() * tb_.val) -
             tb_.val.transpose() * mass.asDiagonal() * tb_.val;
    }
    Eigen::VectorXd u11 = w.cwiseProduct(st.w22);
    Eigen::VectorXd u12 = -w.cwiseProduct(st.w12);
    Eigen::VectorXd u22 = w.cwiseProduct(st.w11);
    Eigen::VectorXd tru = u11 + u22;
    Eigen::MatrixXd A = tb_.gt.transpose() * u11.asDiagonal() * tb_.gt +
                        tb_.gt.transpose() * u12.asDiagonal() * tb_.gp +
                        tb_.gp.transpose() * u12.asDiagonal() * tb_.gt +
                        tb_.gp.transpose() * u22.asDiagonal() * tb_.gp -
                        tb_.val.transpose() * tru.asDiagonal() * tb_.val;
    return -A - tb_.val.transpose() * mass.asDiagonal() * tb_.val;
  }

  void record(HomotopyTrace& tr, double t, double pt, const SolveResult& cur) const {
    State st = eval(tb_.restrict_coeffs(cur.solution.coeffs));
    HomotopyStep step;
    step.t = t;
    step.p_t = pt;
    step.solution = cur.solution;
    step.newton_iters = cur.iterations;
    step.residual_sup = cur.residual_sup;
    step.bound_low = st.u.minCoeff();
    step.bound_high = st.u.maxCoeff();
    step.norm_C2alpha_proxy = st.u.cwiseAbs().maxCoeff() + st.max_hess;
    if (step.bound_low <= 0 || step.norm_C2alpha_proxy > opts_.c2_ceiling)
      throw ContinuationStall("homotopy_solve: a-priori bound monitor breached at t=" +
                              std::to_string(t));
    tr.steps.push_back(std::move(step));
  }

  int tdim() const { return disc_.grid->tangent_dim(); }

  Discretization disc_;
  SolverOptions opts_;
  BasisTables tb_;
};

// Round-trip data: nodal f = h^{1-p} det W of a body, for which the body's
// projected support function is an exact root.
inline Eigen::VectorXd body_rhs(const BodyRep& K, double p) {
  Eigen::VectorXd f(K.h.size());
  for (int j = 0; j < K.h.size(); ++j)
    f[j] = std::pow(K.h[j], 1.0 - p) * K.detW[j];
  return f;
}

}  // namespace bmk

#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "fastreact/block_tridiag.hpp"
#include "fastreact/errors.hpp"
#include "fastreact/grid.hpp"

namespace fastreact {

/// Per-cell description of one implicit Euler problem
///   (u - u_old)/tau - lap(flux(u)) = source(u).
template <int NC>
struct CellProblem {
  using Vec = Eigen::Matrix<double, NC, 1>;
  using Mat = Eigen::Matrix<double, NC, NC>;

  std::function<Vec(const Vec&)> flux;
  std::function<Mat(const Vec&)> flux_jacobian;
  std::function<Vec(const Vec&)> source;           // empty means no source
  std::function<Mat(const Vec&)> source_jacobian;  // required when source is set
};

struct NewtonControls {
  double tol = 1e-12;    // on |R|_inf * tau / (1 + |u_old|_inf)
  int max_iter = 50;
  double floor = 1e-14;  // positivity projection level in the line search
  int max_halvings = 30;
  int clip_limit = 5;    // consecutive projected iterations tolerated
};

namespace detail {

template <int NC>
Eigen::Matrix<double, NC, 1> gather(const std::array<Field, NC>& u, Eigen::Index j) {
  Eigen::Matrix<double, NC, 1> v;
  for (int c = 0; c < NC; ++c) v(c) = u[c](j);
  return v;
}

template <int NC>
Eigen::VectorXd flatten(const std::array<Field, NC>& u) {
  const Eigen::Index n = u[0].size();
  Eigen::VectorXd out(NC * n);
  for (int c = 0; c < NC; ++c) out.segment(c * n, n) = u[c].matrix();
  return out;
}

}  // namespace detail

/// Residual R_c = (u_c - u_old_c)/tau - lap(flux_c(u)) - source_c(u).
template <int NC>
std::array<Field, NC> implicit_residual(const CellProblem<NC>& prob,
                                        const std::array<Field, NC>& u,
                                        const std::array<Field, NC>& u_old,
                                        const Grid1D& grid, double tau) {
  const Eigen::Index n = grid.n;
  std::array<Field, NC> fluxf;
  for (int c = 0; c < NC; ++c) fluxf[c].resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto fv = prob.flux(detail::gather<NC>(u, j));
    for (int c = 0; c < NC; ++c) fluxf[c](j) = fv(c);
  }
  std::array<Field, NC> R;
  for (int c = 0; c < NC; ++c)
    R[c] = (u[c] - u_old[c]) / tau - laplacian_neumann(fluxf[c], grid);
  if (prob.source) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto sv = prob.source(detail::gather<NC>(u, j));
      for (int c = 0; c < NC; ++c) R[c](j) -= sv(c);
    }
  }
  return R;
}

template <int NC>
double residual_norm(const std::array<Field, NC>& R) {
  double m = 0.0;
  for (const Field& r : R) m = std::max(m, r.abs().maxCoeff());
  return m;
}

/// One implicit Euler step by damped Newton with a block-tridiagonal Jacobian.
/// The line search projects trial iterates onto [floor, inf); more than
/// clip_limit consecutive projected iterations throw SolverDivergence so the
/// caller can fall back to the monotone fixed-point map. After convergence up
/// to three full polish steps are taken while each still cuts the residual in
/// half, which drives the step residual to rounding level.
template <int NC>
std::array<Field, NC> implicit_euler_newton(const CellProblem<NC>& prob,
                                            const std::array<Field, NC>& u_old,
                                            const Grid1D& grid, double tau,
                                            const NewtonControls& ctl) {
  using Vec = typename CellProblem<NC>::Vec;
  using Mat = typename CellProblem<NC>::Mat;
  const Eigen::Index n = grid.n;
  const double inv_h2 = 1.0 / (grid.h() * grid.h());

  double uold_norm = 0.0;
  for (const Field& f : u_old) uold_norm = std::max(uold_norm, f.abs().maxCoeff());
  const double scale = (1.0 + uold_norm) / tau;

  std::array<Field, NC> u = u_old;
  auto R = implicit_residual<NC>(prob, u, u_old, grid, tau);
  double rn = residual_norm<NC>(R) / scale;

  auto direction = [&](const std::array<Field, NC>& ucur,
                       const std::array<Field, NC>& rcur) {
    std::vector<Mat> flux_jac(n);
    for (Eigen::Index j = 0; j < n; ++j)
      flux_jac[j] = prob.flux_jacobian(detail::gather<NC>(ucur, j));
    std::vector<Mat> diag(n), lower(n), upper(n);
    std::vector<Vec> rhs(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dcoef = (j == 0 || j == n - 1) ? 1.0 : 2.0;
      diag[j] = Mat::Identity() / tau + dcoef * inv_h2 * flux_jac[j];
      if (prob.source)
        diag[j] -= prob.source_jacobian(detail::gather<NC>(ucur, j));
      lower[j] = j > 0 ? Mat(-inv_h2 * flux_jac[j - 1]) : Mat::Zero();
      upper[j] = j + 1 < n ? Mat(-inv_h2 * flux_jac[j + 1]) : Mat::Zero();
      rhs[j] = -detail::gather<NC>(rcur, j);
    }
    return solve_block_tridiagonal<NC>(std::move(diag), lower, upper, std::move(rhs));
  };

  auto apply_step = [&](const std::vector<Vec>& delta, double lambda,
                        std::array<Field, NC>& trial, bool& clipped) {
    trial = u;
    clipped = false;
    for (Eigen::Index j = 0; j < n; ++j)
      for (int c = 0; c < NC; ++c) {
        double val = u[c](j) + lambda * delta[j](c);
        if (val < ctl.floor) {
          val = ctl.floor;
          clipped = true;
        }
        trial[c](j) = val;
      }
  };

  int consecutive_clips = 0;
  for (int it = 0; rn > ctl.tol; ++it) {
    if (it >= ctl.max_iter)
      throw SolverDivergence("implicit step: iteration limit reached",
                             detail::flatten<NC>(u), rn);
    const auto delta = direction(u, R);
    double lambda = 1.0;
    bool accepted = false, clipped = false;
    for (int halve = 0; halve <= ctl.max_halvings; ++halve, lambda *= 0.5) {
      std::array<Field, NC> trial;
      bool clip;
      apply_step(delta, lambda, trial, clip);
      auto rt = implicit_residual<NC>(prob, trial, u_old, grid, tau);
      const double rtn = residual_norm<NC>(rt) / scale;
      if (std::isfinite(rtn) && rtn < rn) {
        u = std::move(trial);
        R = std::move(rt);
        rn = rtn;
        clipped = clip;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw SolverDivergence("implicit step: line search stalled",
                             detail::flatten<NC>(u), rn);
    consecutive_clips = clipped ? consecutive_clips + 1 : 0;
    if (consecutive_clips > ctl.clip_limit)
      throw SolverDivergence("implicit step: positivity projection persisted",
                             detail::flatten<NC>(u), rn);
  }

  for (int extra = 0; extra < 3 && rn > 0.0; ++extra) {
    const auto delta = direction(u, R);
    std::array<Field, NC> trial;
    bool clip;
    apply_step(delta, 1.0, trial, clip);
    auto rt = implicit_residual<NC>(prob, trial, u_old, grid, tau);
    const double rtn = residual_norm<NC>(rt) / scale;
    if (!std::isfinite(rtn) || rtn >= 0.5 * rn) break;
    u = std::move(trial);
    R = std::move(rt);
    rn = rtn;
  }
  return u;
}

}  // namespace fastreact

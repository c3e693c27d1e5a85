#include "fastreact/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fastreact/implicit_step.hpp"

namespace fastreact {

namespace {

double regularize(double z, double eta) { return z / (1.0 + eta * z); }

CellProblem<3> make_cell_problem(const SchemeParams& p, const ModelFunctions& m) {
  CellProblem<3> prob;
  prob.flux = [&m](const Triple& u) { return F_eval(u, m); };
  prob.flux_jacobian = [&m](const Triple& u) { return F_jacobian(u, m); };
  if (!std::isinf(p.eps)) {
    const double eta = p.eta, eps = p.eps;
    prob.source = [&m, eta, eps](const Triple& u) { return Q_eta(u, eta, eps, m); };
    prob.source_jacobian = [&m, eta, eps](const Triple& u) {
      return Q_eta_jacobian(u, eta, eps, m);
    };
  }
  return prob;
}

void require_state(const State& s, const Grid1D& grid, const char* what) {
  for (const Field& f : s.u)
    if (f.size() != grid.n)
      throw std::invalid_argument(std::string(what) + ": field/grid size mismatch");
}

}  // namespace

void validate(const SchemeParams& p) {
  if (!(p.tau > 0.0) || !std::isfinite(p.tau))
    throw std::invalid_argument("scheme: tau must be positive and finite");
  if (!(p.eta >= 0.0) || !std::isfinite(p.eta))
    throw std::invalid_argument("scheme: eta must be nonnegative and finite");
  if (!(p.eps > 0.0))  // +inf allowed, disables the reaction
    throw std::invalid_argument("scheme: eps must be positive");
  if (!(p.newton_tol > 0.0))
    throw std::invalid_argument("scheme: newton_tol must be positive");
  if (p.newton_max < 1) throw std::invalid_argument("scheme: newton_max must be >= 1");
  if (p.fixedpoint_max < 1)
    throw std::invalid_argument("scheme: fixedpoint_max must be >= 1");
  if (p.max_step_halvings < 0 || p.max_step_halvings > 10)
    throw std::invalid_argument("scheme: max_step_halvings must lie in [0, 10]");
  if (p.strict_tau) {
    if (!(p.eta > 0.0) || std::isinf(p.eps))
      throw std::invalid_argument("scheme: strict_tau requires eta > 0 and finite eps");
    if (!(p.tau <= p.eps * p.eta * p.eta / 2.0))
      throw std::invalid_argument("scheme: strict_tau requires tau <= eps eta^2 / 2");
  }
}

Triple Q_eta(const Triple& u, double eta, double eps, const ModelFunctions& m) {
  if (std::isinf(eps)) return Triple::Zero();
  const double r1 = regularize(m.q[0](u(0)), eta);
  const double r2 = regularize(m.q[1](u(1)), eta);
  const double r3 = regularize(m.q[2](u(2)), eta);
  const double d = (r1 - r2 * r3) / eps;
  return {-d, d, d};
}

Eigen::Matrix3d Q_eta_jacobian(const Triple& u, double eta, double eps,
                               const ModelFunctions& m) {
  if (std::isinf(eps)) return Eigen::Matrix3d::Zero();
  auto dreg = [&](int i, double s) {
    const double w = 1.0 + eta * m.q[i](s);
    return m.dq[i](s) / (w * w);
  };
  const double r2 = regularize(m.q[1](u(1)), eta);
  const double r3 = regularize(m.q[2](u(2)), eta);
  Eigen::Matrix3d J;
  J(0, 0) = -dreg(0, u(0)) / eps;
  J(0, 1) = dreg(1, u(1)) * r3 / eps;
  J(0, 2) = r2 * dreg(2, u(2)) / eps;
  J.row(1) = -J.row(0);
  J.row(2) = -J.row(0);
  return J;
}

std::array<Field, 3> step_residual(const State& u_new, const State& u_old,
                                   const Grid1D& grid, const SchemeParams& p,
                                   const ModelFunctions& m) {
  require_state(u_new, grid, "step_residual");
  require_state(u_old, grid, "step_residual");
  return implicit_residual<3>(make_cell_problem(p, m), u_new.u, u_old.u, grid, p.tau);
}

State newton_solve_step(const State& u_old, const Grid1D& grid, const SchemeParams& p,
                        const ModelFunctions& m) {
  validate(p);
  require_state(u_old, grid, "newton_solve_step");
  NewtonControls ctl;
  ctl.tol = p.newton_tol;
  ctl.max_iter = p.newton_max;
  State out;
  out.u = implicit_euler_newton<3>(make_cell_problem(p, m), u_old.u, grid, p.tau, ctl);
  out.t = u_old.t + p.tau;
  return out;
}

State fixedpoint_solve_step(const State& u_old, const Grid1D& grid,
                            const SchemeParams& p, const ModelFunctions& m, double M) {
  validate(p);
  require_state(u_old, grid, "fixedpoint_solve_step");
  if (!(M > 0.0) || !std::isfinite(M))
    throw std::invalid_argument("fixedpoint_solve_step: M must be positive and finite");

  const Eigen::Index n = grid.n;
  const double tau = p.tau;
  const auto prob = make_cell_problem(p, m);

  double uold_norm = 0.0;
  for (const Field& f : u_old.u) uold_norm = std::max(uold_norm, f.abs().maxCoeff());
  const double scale = (1.0 + uold_norm) / tau;

  // Constant Helmholtz bands for (M Id - tau lap); an M-matrix, so the solve
  // maps nonnegative data to nonnegative data.
  using M1 = Eigen::Matrix<double, 1, 1>;
  const double off = -tau / (grid.h() * grid.h());
  std::vector<M1> diag(n), lower(n), upper(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dcoef = (j == 0 || j == n - 1) ? 1.0 : 2.0;
    diag[j](0, 0) = M - dcoef * off;
    lower[j](0, 0) = j > 0 ? off : 0.0;
    upper[j](0, 0) = j + 1 < n ? off : 0.0;
  }

  std::array<Field, 3> u = u_old.u;
  double rn = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= p.fixedpoint_max; ++it) {
    const auto R = implicit_residual<3>(prob, u, u_old.u, grid, tau);
    rn = residual_norm<3>(R) / scale;
    if (rn <= p.newton_tol) {
      State out;
      out.u = std::move(u);
      out.t = u_old.t + tau;
      return out;
    }

    std::array<Field, 3> w;
    for (int i = 0; i < 3; ++i) w[i].resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Triple uj(u[0](j), u[1](j), u[2](j));
      const Triple fv = F_eval(uj, m);
      const Triple qv = Q_eta(uj, p.eta, p.eps, m);
      for (int i = 0; i < 3; ++i)
        w[i](j) = u_old.u[i](j) + M * fv(i) - uj(i) + tau * qv(i);
    }
    for (int i = 0; i < 3; ++i) {
      const double wmin = w[i].minCoeff();
      if (wmin < -1e-12 * (1.0 + w[i].abs().maxCoeff()))
        throw SolverDivergence("fixedpoint_solve_step: monotone bracket went negative (M too small)",
                               detail::flatten<3>(u), rn);
      w[i] = w[i].max(0.0);
    }

    std::array<Field, 3> z;
    for (int i = 0; i < 3; ++i) {
      std::vector<M1> rhs(n);
      for (Eigen::Index j = 0; j < n; ++j) rhs[j](0) = w[i](j);
      const auto sol = solve_block_tridiagonal<1>(diag, lower, upper, std::move(rhs));
      z[i].resize(n);
      for (Eigen::Index j = 0; j < n; ++j) z[i](j) = std::max(0.0, sol[j](0));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const Triple unew = F_inverse({z[0](j), z[1](j), z[2](j)}, m, 1e-13);
      for (int i = 0; i < 3; ++i) u[i](j) = unew(i);
    }
  }
  throw SolverDivergence("fixedpoint_solve_step: iteration cap reached",
                         detail::flatten<3>(u), rn);
}

double fixedpoint_bound(const SchemeParams& p, const ModelFunctions& m, double smax) {
  if (std::isinf(p.eps)) return 1.5 / m.kappa1;
  double k2 = 0.0;
  const int count = 16;
  std::vector<double> samples(count);
  for (int i = 0; i < count; ++i)
    samples[i] = std::exp(std::log(1e-6) +
                          (std::log(smax) - std::log(1e-6)) * i / (count - 1));
  for (double s1 : samples)
    for (double s2 : samples)
      for (double s3 : samples) {
        const Triple q = Q_eta({s1, s2, s3}, p.eta, p.eps, m);
        k2 = std::max({k2, std::max(0.0, -q(0)) / s1, std::max(0.0, -q(1)) / s2,
                       std::max(0.0, -q(2)) / s3});
      }
  return 1.5 * (p.tau * k2 + 1.0) / m.kappa1;
}

namespace {

State advance(const State& cur, const Grid1D& grid, const SchemeParams& p,
              const ModelFunctions& m, int halvings_left) {
  try {
    return newton_solve_step(cur, grid, p, m);
  } catch (const SolverDivergence&) {
  }
  double smax = 1.0;
  for (const Field& f : cur.u) smax = std::max(smax, f.maxCoeff());
  try {
    return fixedpoint_solve_step(cur, grid, p, m, fixedpoint_bound(p, m, 2.0 * smax));
  } catch (const SolverDivergence& e) {
    if (halvings_left <= 0) throw;
    SchemeParams half = p;
    half.tau = 0.5 * p.tau;
    const State mid = advance(cur, grid, half, m, halvings_left - 1);
    return advance(mid, grid, half, m, halvings_left - 1);
  }
}

}  // namespace

RunResult run(const State& u_init, double t_final, const Grid1D& grid,
              const SchemeParams& p, const ModelFunctions& m,
              const RunMonitors& monitors) {
  validate(p);
  require_state(u_init, grid, "run");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("run: t_final must be positive and finite");
  for (const Field& f : u_init.u)
    if (!(f.minCoeff() > 0.0))
      throw std::invalid_argument("run: initial state must be strictly positive");

  const int n_steps = int(std::ceil(t_final / p.tau - 1e-12));
  const double margin =
      monitors.margin_delta > 0.0 ? monitors.margin_delta : certified_margin();

  RunResult out;
  out.trajectory.reserve(n_steps + 1);
  out.trajectory.push_back(u_init);
  for (int k = 1; k <= n_steps; ++k) {
    State next;
    try {
      next = advance(out.trajectory.back(), grid, p, m, p.max_step_halvings);
    } catch (const SolverDivergence& e) {
      throw SolverDivergence("step " + std::to_string(k) + " (t = " +
                                 std::to_string(u_init.t + k * p.tau) +
                                 "): " + e.what(),
                             e.last_iterate, e.residual);
    }
    next.t = u_init.t + k * p.tau;  // recompute to avoid accumulated drift
    if (monitors.entropy)
      out.reports.push_back(
          make_entropy_report(k, next, p.eta, p.eps, margin, grid, m));
    out.trajectory.push_back(std::move(next));
  }
  return out;
}

}  // namespace fastreact

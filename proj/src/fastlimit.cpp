#include "fastreact/fastlimit.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fastreact/entropy.hpp"
#include "fastreact/implicit_step.hpp"

namespace fastreact {

namespace {

void require_positive_field(const Eigen::Ref<const Field>& f, const Grid1D& grid,
                            const char* what) {
  if (f.size() != grid.n)
    throw std::invalid_argument(std::string(what) + ": field/grid size mismatch");
  if (!(f.minCoeff() > 0.0))
    throw std::invalid_argument(std::string(what) + ": field must be strictly positive");
}

CellProblem<2> make_limit_problem(const ModelFunctions& m) {
  CellProblem<2> prob;
  prob.flux = [&m](const Pair& vw) {
    const Triple u = reconstruct_constraint(vw, m);
    const Triple fv = F_eval(u, m);
    return Pair(fv(0) + fv(1), fv(0) + fv(2));
  };
  prob.flux_jacobian = [&m](const Pair& vw) { return limit_flux_jacobian(vw, m); };
  return prob;
}

}  // namespace

State well_prepared_init(const Eigen::Ref<const Field>& u2_init,
                         const Eigen::Ref<const Field>& u3_init, const Grid1D& grid,
                         const ModelFunctions& m) {
  require_positive_field(u2_init, grid, "well_prepared_init");
  require_positive_field(u3_init, grid, "well_prepared_init");
  State s;
  s.t = 0.0;
  s.u[1] = u2_init;
  s.u[2] = u3_init;
  s.u[0].resize(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j)
    s.u[0](j) = q_inverse(m.q[1](u2_init(j)) * m.q[2](u3_init(j)), 0, m, 1e-15);
  return s;
}

Eigen::Matrix2d limit_flux_jacobian(const Pair& vw, const ModelFunctions& m) {
  // The Jacobian is only used to drive Newton, so lift the point off the
  // boundary where the chain rule would hit q'(0).
  const Pair safe(std::max(vw(0), 1e-12), std::max(vw(1), 1e-12));
  const Triple u = reconstruct_constraint(safe, m);
  const Eigen::Matrix3d JF = F_jacobian(u, m);
  Eigen::Matrix<double, 2, 3> dGdu;
  dGdu.row(0) = JF.row(0) + JF.row(1);
  dGdu.row(1) = JF.row(0) + JF.row(2);

  const Pair u23(std::max(u(1), 1e-300), std::max(u(2), 1e-300));
  const Eigen::Matrix2d Jg_inv = g_jacobian(u23, m).inverse();
  const double d1 = m.dq[0](std::max(u(0), 1e-300));
  const Eigen::RowVector2d dc(m.dq[1](u23(0)) * m.q[2](u23(1)) / d1,
                              m.q[1](u23(0)) * m.dq[2](u23(1)) / d1);
  Eigen::Matrix<double, 3, 2> dudvw;
  dudvw.row(0) = dc * Jg_inv;
  dudvw.bottomRows<2>() = Jg_inv;
  return dGdu * dudvw;
}

namespace {

std::array<Field, 2> advance_limit(const std::array<Field, 2>& cur,
                                   const Grid1D& grid, const SchemeParams& p,
                                   const CellProblem<2>& prob, int halvings_left) {
  NewtonControls ctl;
  ctl.tol = p.newton_tol;
  ctl.max_iter = p.newton_max;
  try {
    return implicit_euler_newton<2>(prob, cur, grid, p.tau, ctl);
  } catch (const SolverDivergence&) {
    if (halvings_left <= 0) throw;
    SchemeParams half = p;
    half.tau = 0.5 * p.tau;
    const auto mid = advance_limit(cur, grid, half, prob, halvings_left - 1);
    return advance_limit(mid, grid, half, prob, halvings_left - 1);
  }
}

}  // namespace

LimitRunResult solve_limit_system(const Eigen::Ref<const Field>& v_init,
                                  const Eigen::Ref<const Field>& w_init, double t_final,
                                  const Grid1D& grid, const SchemeParams& p,
                                  const ModelFunctions& m) {
  validate(p);
  require_positive_field(v_init, grid, "solve_limit_system");
  require_positive_field(w_init, grid, "solve_limit_system");
  if (!(t_final > 0.0) || !std::isfinite(t_final))
    throw std::invalid_argument("solve_limit_system: t_final must be positive and finite");

  const int n_steps = int(std::ceil(t_final / p.tau - 1e-12));
  const auto prob = make_limit_problem(m);

  LimitRunResult out;
  out.trajectory.reserve(n_steps + 1);
  out.trajectory.push_back({v_init, w_init, 0.0});
  out.h_limit.push_back(h_limit_eval(v_init, w_init, grid, m));

  std::array<Field, 2> cur{v_init, w_init};
  for (int k = 1; k <= n_steps; ++k) {
    try {
      cur = advance_limit(cur, grid, p, prob, p.max_step_halvings);
    } catch (const SolverDivergence& e) {
      throw SolverDivergence(
          "limit step " + std::to_string(k) + ": " + e.what(), e.last_iterate,
          e.residual);
    }
    out.trajectory.push_back({cur[0], cur[1], k * p.tau});
    out.h_limit.push_back(h_limit_eval(cur[0], cur[1], grid, m));
  }
  return out;
}

SweepResult eps_sweep(const Eigen::Ref<const Field>& u2_init,
                      const Eigen::Ref<const Field>& u3_init, double t_final,
                      const Grid1D& grid, const SchemeParams& base,
                      const ModelFunctions& m, std::vector<double> eps_list) {
  validate(base);
  if (eps_list.empty()) throw std::invalid_argument("eps_sweep: empty eps list");
  for (double e : eps_list)
    if (!(e > 0.0) || !std::isfinite(e))
      throw std::invalid_argument("eps_sweep: eps values must be positive and finite");
  if (std::set<double>(eps_list.begin(), eps_list.end()).size() != eps_list.size())
    throw std::invalid_argument("eps_sweep: duplicate eps values");
  std::sort(eps_list.begin(), eps_list.end(), std::greater<double>());

  const State u0 = well_prepared_init(u2_init, u3_init, grid, m);
  const Field v0 = u0.u[0] + u0.u[1];
  const Field w0 = u0.u[0] + u0.u[2];
  const LimitRunResult limit = solve_limit_system(v0, w0, t_final, grid, base, m);

  SweepResult out;
  for (double eps : eps_list) {
    SweepEntry entry;
    entry.eps = eps;
    try {
      SchemeParams p = base;
      p.eps = eps;
      validate(p);
      RunMonitors mon;
      mon.entropy = false;
      const RunResult rr = run(u0, t_final, grid, p, m, mon);
      if (rr.trajectory.size() != limit.trajectory.size())
        throw std::logic_error("eps_sweep: trajectory length mismatch");

      double defect = 0.0, gap_v = 0.0, gap_w = 0.0;
      Field cell(grid.n);
      for (std::size_t k = 1; k < rr.trajectory.size(); ++k) {
        const State& s = rr.trajectory[k];
        for (Eigen::Index j = 0; j < grid.n; ++j)
          cell(j) = std::abs(m.q[0](s.u[0](j)) -
                             m.q[1](s.u[1](j)) * m.q[2](s.u[2](j)));
        defect += p.tau * integrate(cell, grid);
        const PairState& ls = limit.trajectory[k];
        gap_v += p.tau * integrate((s.u[0] + s.u[1] - ls.v).abs(), grid);
        gap_w += p.tau * integrate((s.u[0] + s.u[2] - ls.w).abs(), grid);
      }
      entry.defect_l1_qt = defect;
      entry.gap_v = gap_v;
      entry.gap_w = gap_w;
      entry.ratio_sqrt_eps = defect / std::sqrt(eps);
      entry.ok = true;
    } catch (const std::exception& ex) {
      entry.ok = false;
      entry.error = ex.what();
    }
    out.entries.push_back(std::move(entry));
  }
  return out;
}

}  // namespace fastreact

#pragma once

#include <array>
#include <vector>

#include "fastreact/entropy.hpp"
#include "fastreact/grid.hpp"
#include "fastreact/maps.hpp"
#include "fastreact/model.hpp"
#include "fastreact/state.hpp"

namespace fastreact {

struct SchemeParams {
  double tau = 1e-3;
  double eta = 0.0;  // reaction regularization; 0 disables it
  double eps = 1.0;  // reaction speed 1/eps; +inf disables the reaction
  double newton_tol = 1e-12;
  int newton_max = 50;
  bool strict_tau = false;  // enforce tau <= eps eta^2 / 2 (requires eta > 0)
  int fixedpoint_max = 5000;
  int max_step_halvings = 0;  // optional tau halving on solver divergence, up to 10
};

/// Throws std::invalid_argument on inconsistent parameters.
void validate(const SchemeParams& p);

/// Regularized reaction Q^eta_i(u) = (sigma_i/eps)(r1(u1) - r2(u2) r3(u3)),
/// r_i = q_i/(1 + eta q_i), sigma = (-1, +1, +1). Rows 2 and 3 are exactly
/// the negation of row 1; for eta > 0, |Q^eta| <= 2/(eps eta^2).
Triple Q_eta(const Triple& u, double eta, double eps, const ModelFunctions& funcs);
Eigen::Matrix3d Q_eta_jacobian(const Triple& u, double eta, double eps,
                               const ModelFunctions& funcs);

/// Implicit Euler residual (u_new - u_old)/tau - lap F(u_new) - Q^eta(u_new).
std::array<Field, 3> step_residual(const State& u_new, const State& u_old,
                                   const Grid1D& grid, const SchemeParams& p,
                                   const ModelFunctions& funcs);

/// One implicit Euler step by damped Newton (see implicit_step.hpp for the
/// globalization). Converges when |R|_inf tau/(1 + |u_old|_inf) <= newton_tol.
State newton_solve_step(const State& u_old, const Grid1D& grid, const SchemeParams& p,
                        const ModelFunctions& funcs);

/// Monotone fixed-point step
///   u <- F^-1((M Id - tau lap)^-1 (u_old + M F(u) - u + tau Q^eta(u))).
/// The resolvent is an M-matrix, so nonnegativity is preserved whenever M is
/// large enough that the bracket stays nonnegative (M >= (tau K2 + 1)/kappa1
/// with K2 a linear bound on the negative reaction part). Slower than Newton
/// but unconditionally positivity-preserving.
State fixedpoint_solve_step(const State& u_old, const Grid1D& grid,
                            const SchemeParams& p, const ModelFunctions& funcs,
                            double M);

/// Samples the negative reaction part on (0, smax]^3 and returns a padded
/// fixed-point bound M = 1.5 (tau K2 + 1)/kappa1.
double fixedpoint_bound(const SchemeParams& p, const ModelFunctions& funcs,
                        double smax);

struct RunMonitors {
  bool entropy = true;
  double margin_delta = 0.0;  // 0 picks certified_margin()
};

struct RunResult {
  std::vector<State> trajectory;       // initial state plus ceil(t_final/tau) steps
  std::vector<EntropyReport> reports;  // one per step when monitors are enabled
};

/// Runs ceil(t_final/tau) implicit steps from a strictly positive initial
/// state. Newton is tried first; on divergence the fixed-point map runs, and
/// if max_step_halvings > 0 the step is recursively halved. Failures carry
/// the step context in SolverDivergence.
RunResult run(const State& u_init, double t_final, const Grid1D& grid,
              const SchemeParams& p, const ModelFunctions& funcs,
              const RunMonitors& monitors = {});

}  // namespace fastreact

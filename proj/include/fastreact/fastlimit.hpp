#pragma once

#include <string>
#include <vector>

#include "fastreact/grid.hpp"
#include "fastreact/maps.hpp"
#include "fastreact/model.hpp"
#include "fastreact/state.hpp"
#include "fastreact/stepper.hpp"

namespace fastreact {

/// Places u1 on the reaction equilibrium, u1 = q1^-1(q2(u2) q3(u3)), so the
/// initial defect vanishes. u2_init and u3_init must be strictly positive.
State well_prepared_init(const Eigen::Ref<const Field>& u2_init,
                         const Eigen::Ref<const Field>& u3_init, const Grid1D& grid,
                         const ModelFunctions& funcs);

/// 2x2 Jacobian d(G1, G2)/d(v, w) of the reduced fluxes G1 = F1 + F2,
/// G2 = F1 + F3 through the constraint reconstruction.
Eigen::Matrix2d limit_flux_jacobian(const Pair& vw, const ModelFunctions& funcs);

struct LimitRunResult {
  std::vector<PairState> trajectory;  // initial state plus ceil(t_final/tau) steps
  std::vector<double> h_limit;        // limit entropy per trajectory entry
};

/// Implicit Euler for the reduced system d_t v = lap G1(v, w),
/// d_t w = lap G2(v, w) with no-flux boundaries, damped Newton per step.
LimitRunResult solve_limit_system(const Eigen::Ref<const Field>& v_init,
                                  const Eigen::Ref<const Field>& w_init, double t_final,
                                  const Grid1D& grid, const SchemeParams& p,
                                  const ModelFunctions& funcs);

struct SweepEntry {
  double eps = 0.0;
  double defect_l1_qt = 0.0;     // space-time L1 norm of q1(u1) - q2(u2) q3(u3)
  double gap_v = 0.0, gap_w = 0.0;  // space-time L1 distance to the limit run
  double ratio_sqrt_eps = 0.0;   // defect / sqrt(eps)
  bool ok = false;
  std::string error;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // sorted by decreasing eps
};

/// Runs the full system once per eps from the same well-prepared data and
/// compares against a single limit solve on matching time levels. Rejects
/// duplicate or non-positive eps values; per-eps solver failures are recorded
/// in the entry without aborting the remaining runs.
SweepResult eps_sweep(const Eigen::Ref<const Field>& u2_init,
                      const Eigen::Ref<const Field>& u3_init, double t_final,
                      const Grid1D& grid, const SchemeParams& base,
                      const ModelFunctions& funcs, std::vector<double> eps_list);

}  // namespace fastreact

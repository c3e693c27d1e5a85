#pragma once

#include <array>
#include <vector>

#include "fastreact/grid.hpp"
#include "fastreact/model.hpp"
#include "fastreact/state.hpp"

namespace fastreact {

/// Per-species entropy density integral_1^u log(q_i(s)/(1 + eta q_i(s))) ds,
/// extended by its finite limit at u = 0. Closed form for power laws at
/// eta = 0 (beta (u log u - u + 1)), quadrature otherwise.
double entropy_density(double ui, int species, double eta, const ModelFunctions& funcs);

/// Entropy functional h(u), the eta = 0 case of h_eta_eval.
double h_eval(const State& s, const Grid1D& grid, const ModelFunctions& funcs);

/// Regularized entropy functional; coincides with h_eval exactly at eta = 0.
double h_eta_eval(const State& s, double eta, const Grid1D& grid,
                  const ModelFunctions& funcs);

/// Pointwise (a - b)(log a - log b) >= 0, evaluated stably near a = b; inputs
/// are clamped at 1e-300 and a pair that both underflow counts as zero.
double entropy_rate_product(double a, double b);

struct DissipationTerms {
  std::array<Field, 4> T;        // pointwise weights T1..T4
  double d_grad = 0.0;           // margin-weighted gradient dissipation
  bool cauchy_schwarz_ok = true; // T4^2 <= 2 (1-margin)^2 T1 T2 cellwise
  double worst_margin = 0.0;     // min of rhs - lhs over cells
  int clamped_cells = 0;         // cells lifted to 1e-12 before evaluation
};

/// Gradient dissipation weights and their face-quadrature total
///   d_grad = sum_faces h [ margin (T1 g1^2 + T2 g2^2) + T3 g3^2 ],
/// g_i the face difference quotients, T_i face-averaged.
DissipationTerms dissipation_terms(const State& s, double eta, double margin_delta,
                                   const Grid1D& grid, const ModelFunctions& funcs);

/// Reaction dissipation (1/eps) integral (a - b)(log a - log b) dx with
/// a, b the regularized forward/backward rates. Nonnegative; zero when the
/// reaction is disabled (eps = inf).
double reaction_dissipation(const State& s, double eta, double eps, const Grid1D& grid,
                            const ModelFunctions& funcs);

/// Entropy of the reduced limit system: the three-species entropy evaluated on
/// the constraint reconstruction of (v, w).
double h_limit_eval(const Eigen::Ref<const Field>& v, const Eigen::Ref<const Field>& w,
                    const Grid1D& grid, const ModelFunctions& funcs);

/// One row of entropy.csv.
struct EntropyReport {
  int step = 0;
  double t = 0.0;
  double h_eta = 0.0;
  double d_grad = 0.0;
  double d_reac = 0.0;
  double mass12 = 0.0;   // integral of u1 + u2
  double mass13 = 0.0;   // integral of u1 + u3
  double defect_l1 = 0.0;  // |q1(u1) - q2(u2) q3(u3)| in L1
  double min_u = 0.0;
};

EntropyReport make_entropy_report(int step, const State& s, double eta, double eps,
                                  double margin_delta, const Grid1D& grid,
                                  const ModelFunctions& funcs);

/// Duality accounting for the combined density v = 2 u1 + u2 + u3, whose step
/// update is exactly (v^k - v^{k-1})/tau = lap(mu^k v^k) with
/// mu = (2 F1 + F2 + F3)/v, because the reaction cancels from 2 Q1 + Q2 + Q3.
/// Accumulates A = sum_k tau int mu v^2 and B = sum_k tau int mu and the worst
/// relative step residual |(v^k - v^{k-1})/tau - lap(mu v)|_inf tau/(1 + |v|_inf).
struct DualityMonitorResult {
  double a_accum = 0.0;
  double b_accum = 0.0;
  double ratio = 0.0;  // A / (1 + B)
  double max_rel_residual = 0.0;
};

DualityMonitorResult duality_monitor(const std::vector<State>& trajectory,
                                     const Grid1D& grid, const ModelFunctions& funcs);

}  // namespace fastreact

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fastreact {

using ScalarFn = std::function<double(double)>;
using BivariateFn = std::function<double(double, double)>;

/// Parameters of the closed-form power-law family
///   f_i(s)     = alpha_i s + s^delta,
///   q_i(s)     = s^beta,
///   f12(s1,s2) = alpha s1^gamma s2,
///   f21(s1,s2) = alpha s1 s2^gamma.
/// The family is certified (entropy structure holds) iff beta >= 1, gamma >= 1,
/// delta >= 1 + 4 max(beta, gamma - 1) and 1024 alpha^2 <= min(alpha1, alpha2, delta).
struct PowerLawParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double alpha3 = 1.0;
  double delta = 5.0;
  double beta = 1.0;
  double gamma = 1.0;
  double alpha = 0.005;
};

/// Callable bundle defining one model instance. Species 1 and 2 carry the
/// cross-diffusion pair (f12, f21); species 3 diffuses on its own. All
/// functions act on [0, inf).
struct ModelFunctions {
  std::array<ScalarFn, 3> f;   // self-diffusion nonlinearities f_i
  std::array<ScalarFn, 3> df;  // f_i'
  BivariateFn f12, f21;        // cross terms entering F_1 and F_2
  BivariateFn d1f12, d2f12;    // partials of f12
  BivariateFn d1f21, d2f21;    // partials of f21
  std::array<ScalarFn, 3> q;   // reaction densities q_i, increasing, q_i(0) = 0
  std::array<ScalarFn, 3> dq;  // q_i'
  std::array<ScalarFn, 3> q_inv;  // optional closed-form inverses (may be empty)

  double kappa1 = 0.0;   // uniform lower bound of f_i'
  std::optional<PowerLawParams> power_law;  // set when built from the family above
  bool identity_f = false;  // every f_i is the identity
  bool identity_q = false;  // every q_i is the identity
};

/// Builds the power-law bundle with exact derivatives and inverses.
/// Rejects non-finite parameters, alpha_i <= 0, exponents < 1, alpha < 0.
ModelFunctions build_power_law(const PowerLawParams& p);

/// f_i(s) = s, q_i(s) = s, no cross terms. The model with closed-form
/// constraint inversion and entropy flux.
ModelFunctions build_identity();

/// One validated inequality or sampled property.
struct CheckResult {
  std::string name;
  bool pass = false;
  double lhs = 0.0;   // worst observed left side
  double rhs = 0.0;   // corresponding right side
  std::array<double, 3> witness{0.0, 0.0, 0.0};  // point realising the worst case
  std::string note;
};

struct AssumptionReport {
  std::vector<CheckResult> checks;
  double margin_delta = 0.0;  // the delta in (0,1) used by the cross-diffusion split

  bool pass() const;
  std::string to_text() const;
};

/// The delta in (0,1) for which the certified power-law family satisfies the
/// weak cross-diffusion inequality: 1 - 1/sqrt(2).
double certified_margin();

/// Closed-form certificate for the power-law family (exponent and size
/// inequalities above). Witnesses carry the violated sides.
AssumptionReport check_power_law_certified(const PowerLawParams& p);

/// Log-spaced evaluation grid on [1e-2, 10]^2 plus both axes, used by
/// check_weak_cross_diffusion.
std::vector<std::pair<double, double>> default_cross_diffusion_grid();

/// Samples the weak cross-diffusion inequality
///   (dq1 d2f12 / den1 + dq2 d1f21 / den2)^2
///     <= 2 (1-margin)^2 dq1 dq2 (f1'+d1f12)(f2'+d2f21) / (den1 den2),
/// den_i = q_i (1 + eta q_i), at eta in {0, eta_max/2, eta_max}, together with
/// positivity of the diffusion-block determinant. Fails with the worst witness
/// point (s1, s2, eta).
AssumptionReport check_weak_cross_diffusion(
    const ModelFunctions& funcs, double eta_max, double margin_delta,
    const std::vector<std::pair<double, double>>& grid);

/// Sampled structural checks: f_i(0) = 0, f_i' >= kappa1 > 0, f_i(s) >= kappa1 s,
/// vanishing and monotone cross terms, q_i(0) = 0, q_i' > 0, q_i reaches 1,
/// q_inv round trip to 1e-12 relative on [0, 100]. Bundles without closed-form
/// derivatives are cross-checked against central differences.
AssumptionReport check_structure(const ModelFunctions& funcs, std::uint64_t seed);

/// Reports the sampled maxima of the reaction/entropy growth ratios on
/// [0, 1e3]^3 and whether the leading ratio decays over the last decade.
/// Fails only on non-finite values.
AssumptionReport check_reaction_growth(const ModelFunctions& funcs, std::uint64_t seed);

}  // namespace fastreact

// End-to-end acceptance gate. Each criterion prints exactly one PASS/FAIL
// line with the measured quantity and its limit; the exit code is the number
// of failed criteria. Tolerances are pinned here on purpose.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fastreact/entropy.hpp"
#include "fastreact/fastlimit.hpp"
#include "fastreact/maps.hpp"
#include "fastreact/model.hpp"
#include "fastreact/stepper.hpp"

using namespace fastreact;

namespace {

int failures = 0;

void report(int index, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", index, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class Fn>
void criterion(int index, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(index, false, std::string("aborted: ") + e.what());
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Scalar Thomas algorithm, local so criterion 9 has an independent oracle.
Field tridiag_solve(Field a, Field b, Field c, Field d) {
  const Eigen::Index n = b.size();
  for (Eigen::Index i = 1; i < n; ++i) {
    const double w = a(i) / b(i - 1);
    b(i) -= w * c(i - 1);
    d(i) -= w * d(i - 1);
  }
  Field x(n);
  x(n - 1) = d(n - 1) / b(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i)
    x(i) = (d(i) - c(i) * x(i + 1)) / b(i);
  return x;
}

Field heat_step_oracle(const Field& u_old, const Grid1D& grid, double tau) {
  const Eigen::Index n = grid.n;
  const double r = tau / (grid.h() * grid.h());
  Field a = Field::Constant(n, -r), b(n), c = Field::Constant(n, -r), d = u_old;
  for (Eigen::Index j = 0; j < n; ++j)
    b(j) = 1.0 + ((j == 0 || j == n - 1) ? r : 2.0 * r);
  a(0) = 0.0;
  c(n - 1) = 0.0;
  return tridiag_solve(a, b, c, d);
}

constexpr double kTau = 1e-3;
constexpr double kTFinal = 0.5;
constexpr double kNewtonTol = 1e-12;

struct LabeledRun {
  double eta = 0.0, eps = 0.0;
  double h_init = 0.0;
  RunResult rr;
};

}  // namespace

int main() {
  const ModelFunctions funcs = build_power_law(PowerLawParams{});
  const Grid1D grid(128, 1.0);
  const Field x = grid.centers();
  const Field u2_init = 1.0 + 0.5 * (M_PI * x).cos();
  const Field u3_init = 1.0 + 0.5 * (M_PI * x).sin().square();

  // Shared monitored runs across the regularization matrix, used by 1-3.
  std::optional<State> init;
  std::vector<LabeledRun> runs;
  std::string run_error = "reference run not attempted";
  try {
    init = well_prepared_init(u2_init, u3_init, grid, funcs);
    for (double eta : {0.0, 0.1})
      for (double eps : {1.0, 1e-2}) {
        SchemeParams p;
        p.tau = kTau;
        p.eta = eta;
        p.eps = eps;
        LabeledRun lr;
        lr.eta = eta;
        lr.eps = eps;
        lr.h_init = h_eta_eval(*init, eta, grid, funcs);
        lr.rr = run(*init, kTFinal, grid, p, funcs);
        runs.push_back(std::move(lr));
      }
    run_error.clear();
  } catch (const std::exception& e) {
    run_error = e.what();
  }

  criterion(1, [&] {
    if (!run_error.empty()) throw std::runtime_error(run_error);
    const double m12 = integrate(init->u[0] + init->u[1], grid);
    const double m13 = integrate(init->u[0] + init->u[2], grid);
    double drift = 0.0;
    for (const EntropyReport& r : runs[0].rr.reports) {
      drift = std::max(drift, std::abs(r.mass12 - m12) / std::abs(m12));
      drift = std::max(drift, std::abs(r.mass13 - m13) / std::abs(m13));
    }
    report(1, drift < 1e-9,
           "combined masses u1+u2 and u1+u3 drift " + num(drift) +
               " relative over " + std::to_string(runs[0].rr.reports.size()) +
               " steps (limit 1e-9)");
  });

  criterion(2, [&] {
    if (!run_error.empty()) throw std::runtime_error(run_error);
    double worst = std::numeric_limits<double>::infinity();
    for (const LabeledRun& lr : runs)
      for (const EntropyReport& r : lr.rr.reports) worst = std::min(worst, r.min_u);
    report(2, worst > 0.0,
           "densities stay strictly positive for eta in {0, 0.1}, eps in {1, 0.01}; "
           "smallest value " + num(worst));
  });

  criterion(3, [&] {
    if (!run_error.empty()) throw std::runtime_error(run_error);
    double worst_gap = -std::numeric_limits<double>::infinity();
    double min_dreac = std::numeric_limits<double>::infinity();
    for (const LabeledRun& lr : runs) {
      double h_prev = lr.h_init;
      for (const EntropyReport& r : lr.rr.reports) {
        const double slack = 10.0 * kNewtonTol * (1.0 + std::abs(h_prev));
        worst_gap = std::max(worst_gap, r.h_eta + kTau * r.d_reac - h_prev - slack);
        min_dreac = std::min(min_dreac, r.d_reac);
        h_prev = r.h_eta;
      }
    }
    report(3, worst_gap <= 0.0 && min_dreac >= -1e-14,
           "regularized entropy plus tau times reaction dissipation is "
           "non-increasing (worst excess " + num(worst_gap) +
               ", smallest dissipation " + num(min_dreac) + ")");
  });

  // Shared sweep for 4 and 5.
  std::optional<SweepResult> sweep;
  std::string sweep_error = "sweep not attempted";
  try {
    SchemeParams p;
    p.tau = kTau;
    sweep = eps_sweep(u2_init, u3_init, kTFinal, grid, p, funcs, {1e-1, 1e-2, 1e-3});
    sweep_error.clear();
    for (const SweepEntry& e : sweep->entries)
      if (!e.ok) sweep_error = "eps = " + num(e.eps) + " failed: " + e.error;
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }

  criterion(4, [&] {
    if (!sweep_error.empty()) throw std::runtime_error(sweep_error);
    const auto& e = sweep->entries;
    const bool defect_down = e[1].defect_l1_qt < e[0].defect_l1_qt &&
                             e[2].defect_l1_qt < e[1].defect_l1_qt;
    const bool ratio_tame = e[1].ratio_sqrt_eps <= e[0].ratio_sqrt_eps &&
                            e[2].ratio_sqrt_eps <= e[1].ratio_sqrt_eps;
    report(4, defect_down && ratio_tame,
           "constraint defect falls with eps (" + num(e[0].defect_l1_qt) + ", " +
               num(e[1].defect_l1_qt) + ", " + num(e[2].defect_l1_qt) +
               ") and defect/sqrt(eps) does not grow (" +
               num(e[0].ratio_sqrt_eps) + ", " + num(e[1].ratio_sqrt_eps) + ", " +
               num(e[2].ratio_sqrt_eps) + ")");
  });

  criterion(5, [&] {
    if (!sweep_error.empty()) throw std::runtime_error(sweep_error);
    const auto& e = sweep->entries;
    const double contraction = e[2].gap_v / e[0].gap_v;
    report(5, e[2].gap_v <= 0.3 * e[0].gap_v,
           "distance to the reduced system contracts by " + num(contraction) +
               " from eps 0.1 to eps 0.001 (limit 0.3)");
  });

  criterion(6, [&] {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> unif(0.0, 10.0);
    double worst_f = 0.0, worst_g = 0.0, worst_route = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Triple u(unif(rng), unif(rng), unif(rng));
      const Triple back = F_inverse(F_eval(u, funcs), funcs, 1e-13);
      worst_f = std::max(worst_f, (back - u).cwiseAbs().maxCoeff());

      const Pair u23(u(1), u(2));
      const Pair vw = g_eval(u23, funcs);
      const Pair back23 = g_inverse(vw, funcs, 1e-13);
      worst_g = std::max(worst_g, (back23 - u23).cwiseAbs().maxCoeff());

      const Triple closed = pair_inverse_closed_form(vw);
      worst_route = std::max(worst_route,
                             std::max(std::abs(closed(1) - back23(0)),
                                      std::abs(closed(2) - back23(1))));
    }
    report(6, worst_f <= 1e-10 && worst_g <= 1e-10 && worst_route <= 1e-10,
           "inversion round trips on 100 random positive points: F " + num(worst_f) +
               ", g " + num(worst_g) + ", closed-form route gap " + num(worst_route) +
               " (limit 1e-10)");
  });

  criterion(7, [&] {
    const ModelFunctions ident = build_identity();
    const struct {
      double s, value;
    } table[] = {{0.1, 0.1},
                 {0.61803398874989485, 0.61803398874989485},
                 {1.0, 0.93714568761017056},
                 {5.0, 2.2633684184156875},
                 {50.0, 4.482641702670086}};
    double worst_frozen = 0.0, worst_quad = 0.0;
    for (const auto& row : table) {
      const double closed = entropy_flux(row.s, 0, ident);
      worst_frozen = std::max(
          worst_frozen, std::abs(closed - row.value) / (1.0 + std::abs(row.value)));
      worst_quad = std::max(
          worst_quad, std::abs(closed - entropy_flux_quadrature(row.s, 0, ident)));
    }
    report(7, worst_frozen <= 1e-13 && worst_quad <= 1e-8,
           "entropy flux closed form sits on the frozen values (" + num(worst_frozen) +
               " relative) and on quadrature (" + num(worst_quad) + ", limit 1e-8)");
  });

  criterion(8, [&] {
    const bool ref_ok = check_power_law_certified(PowerLawParams{}).pass();
    PowerLawParams bad_alpha;
    bad_alpha.alpha = 0.1;
    PowerLawParams bad_delta;
    bad_delta.delta = 4.0;
    const AssumptionReport rep_alpha = check_power_law_certified(bad_alpha);
    const AssumptionReport rep_delta = check_power_law_certified(bad_delta);
    const bool witnesses =
        rep_alpha.to_text().find("FAIL") != std::string::npos &&
        rep_alpha.to_text().find("at (") != std::string::npos &&
        rep_delta.to_text().find("FAIL") != std::string::npos &&
        rep_delta.to_text().find("at (") != std::string::npos;
    report(8, ref_ok && !rep_alpha.pass() && !rep_delta.pass() && witnesses,
           "parameter certificate accepts the reference family and rejects "
           "alpha = 0.1 and delta = 4 with printed witnesses");
  });

  criterion(9, [&] {
    const ModelFunctions ident = build_identity();
    const Grid1D g9(64, 1.0);
    const Field x9 = g9.centers();
    State u_old;
    u_old.u[0] = 1.0 + 0.3 * (2.0 * M_PI * x9).cos();
    u_old.u[1] = 1.2 + 0.4 * (M_PI * x9).sin();
    u_old.u[2] = 0.8 + 0.2 * (3.0 * M_PI * x9).cos();
    u_old.t = 0.0;
    SchemeParams p;
    p.tau = 1e-2;
    p.eps = std::numeric_limits<double>::infinity();
    const State u_new = newton_solve_step(u_old, g9, p, ident);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      worst = std::max(
          worst,
          (u_new.u[i] - heat_step_oracle(u_old.u[i], g9, p.tau)).abs().maxCoeff());
    report(9, worst <= 1e-12,
           "identity diffusion with the reaction disabled reproduces the scalar "
           "tridiagonal oracle to " + num(worst) + " (limit 1e-12)");
  });

  criterion(10, [&] {
    if (!init) throw std::runtime_error(run_error);
    double ratios[3] = {0.0, 0.0, 0.0};
    double worst_res = 0.0;
    int i = 0;
    for (double tau : {1e-2, 5e-3, 2.5e-3}) {
      SchemeParams p;
      p.tau = tau;
      RunMonitors mon;
      mon.entropy = false;
      const RunResult rr = run(*init, 0.1, grid, p, funcs, mon);
      const DualityMonitorResult d = duality_monitor(rr.trajectory, grid, funcs);
      worst_res = std::max(worst_res, d.max_rel_residual);
      ratios[i++] = d.ratio;
    }
    const double rmin = std::min({ratios[0], ratios[1], ratios[2]});
    const double rmax = std::max({ratios[0], ratios[1], ratios[2]});
    report(10, worst_res <= 10.0 * kNewtonTol && rmax - rmin < 0.25 * rmin,
           "dual accounting for 2 u1 + u2 + u3: worst step residual " +
               num(worst_res) + " (limit 1e-11), ratio spread " +
               num(rmin > 0 ? (rmax - rmin) / rmin : 0.0) +
               " across tau in {0.01, 0.005, 0.0025} (limit 0.25)");
  });

  return failures;
}

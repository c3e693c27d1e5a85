#include "fastreact/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fastreact/maps.hpp"
#include "fastreact/quadrature.hpp"

namespace fastreact {

namespace {

void require_state(const State& s, const Grid1D& grid, const char* what) {
  for (const Field& f : s.u)
    if (f.size() != grid.n)
      throw std::invalid_argument(std::string(what) + ": field/grid size mismatch");
}

double regularize(double z, double eta) { return z / (1.0 + eta * z); }

}  // namespace

double entropy_density(double ui, int species, double eta, const ModelFunctions& m) {
  if (!std::isfinite(ui) || ui < 0.0)
    throw std::invalid_argument("entropy_density: density must be finite and nonnegative");
  if (!(eta >= 0.0))
    throw std::invalid_argument("entropy_density: eta must be nonnegative");

  double base;
  if (m.power_law) {
    const double beta = m.power_law->beta;
    base = ui > 0.0 ? beta * (ui * std::log(ui) - ui + 1.0) : beta;
  } else if (m.identity_q) {
    base = ui > 0.0 ? ui * std::log(ui) - ui + 1.0 : 1.0;
  } else {
    base = adaptive_simpson(
        [&](double s) { return std::log(std::max(m.q[species](s), 1e-300)); }, 1.0, ui,
        1e-12);
  }
  if (eta > 0.0)
    base -= adaptive_simpson(
        [&](double s) { return std::log1p(eta * m.q[species](s)); }, 1.0, ui, 1e-12);
  return base;
}

double h_eta_eval(const State& s, double eta, const Grid1D& grid,
                  const ModelFunctions& m) {
  require_state(s, grid, "h_eta_eval");
  Field dens = Field::Zero(grid.n);
  for (int i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < grid.n; ++j)
      dens(j) += entropy_density(s.u[i](j), i, eta, m);
  return integrate(dens, grid);
}

double h_eval(const State& s, const Grid1D& grid, const ModelFunctions& m) {
  return h_eta_eval(s, 0.0, grid, m);
}

double entropy_rate_product(double a, double b) {
  a = std::max(a, 0.0);
  b = std::max(b, 0.0);
  if (a < 1e-300 && b < 1e-300) return 0.0;
  a = std::max(a, 1e-300);
  b = std::max(b, 1e-300);
  if (a == b) return 0.0;
  const double d = a - b;
  return d * std::log1p(d / b);
}

DissipationTerms dissipation_terms(const State& s, double eta, double margin_delta,
                                   const Grid1D& grid, const ModelFunctions& m) {
  require_state(s, grid, "dissipation_terms");
  if (!(margin_delta > 0.0 && margin_delta < 1.0))
    throw std::invalid_argument("dissipation_terms: margin must lie in (0,1)");
  if (!(eta >= 0.0))
    throw std::invalid_argument("dissipation_terms: eta must be nonnegative");

  const Eigen::Index n = grid.n;
  DissipationTerms out;
  for (auto& t : out.T) t.resize(n);

  // The weights blow up as any density reaches zero, so cells are lifted to
  // 1e-12 (and counted) before evaluation; gradients use the raw fields.
  double worst = std::numeric_limits<double>::infinity();
  const double factor = 2.0 * (1.0 - margin_delta) * (1.0 - margin_delta);
  for (Eigen::Index j = 0; j < n; ++j) {
    double c[3];
    for (int i = 0; i < 3; ++i) {
      c[i] = s.u[i](j);
      if (c[i] < 1e-12) {
        c[i] = 1e-12;
        ++out.clamped_cells;
      }
    }
    double den[3];
    for (int i = 0; i < 3; ++i) {
      const double qv = m.q[i](c[i]);
      den[i] = qv * (1.0 + eta * qv);
    }
    out.T[0](j) = m.dq[0](c[0]) * (m.df[0](c[0]) + m.d1f12(c[0], c[1])) / den[0];
    out.T[1](j) = m.dq[1](c[1]) * (m.df[1](c[1]) + m.d2f21(c[0], c[1])) / den[1];
    out.T[2](j) = m.dq[2](c[2]) * m.df[2](c[2]) / den[2];
    out.T[3](j) = m.dq[0](c[0]) * m.d2f12(c[0], c[1]) / den[0] +
                  m.dq[1](c[1]) * m.d1f21(c[0], c[1]) / den[1];

    const double lhs = out.T[3](j) * out.T[3](j);
    const double rhs = factor * out.T[0](j) * out.T[1](j);
    if (lhs > rhs * (1.0 + 1e-12)) out.cauchy_schwarz_ok = false;
    worst = std::min(worst, rhs - lhs);
  }
  out.worst_margin = worst;

  const double h = grid.h();
  double acc = 0.0;
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    double g[3], tf[3];
    for (int i = 0; i < 3; ++i) {
      g[i] = (s.u[i](j + 1) - s.u[i](j)) / h;
      tf[i] = 0.5 * (out.T[i](j) + out.T[i](j + 1));
    }
    acc += h * (margin_delta * (tf[0] * g[0] * g[0] + tf[1] * g[1] * g[1]) +
                tf[2] * g[2] * g[2]);
  }
  out.d_grad = acc;
  return out;
}

double reaction_dissipation(const State& s, double eta, double eps, const Grid1D& grid,
                            const ModelFunctions& m) {
  require_state(s, grid, "reaction_dissipation");
  if (std::isinf(eps)) return 0.0;
  if (!(eps > 0.0) || !(eta >= 0.0))
    throw std::invalid_argument("reaction_dissipation: need eps > 0 and eta >= 0");

  Field val(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    const double a = regularize(m.q[0](s.u[0](j)), eta);
    const double b =
        regularize(m.q[1](s.u[1](j)), eta) * regularize(m.q[2](s.u[2](j)), eta);
    val(j) = entropy_rate_product(a, b);
  }
  return integrate(val, grid) / eps;
}

double h_limit_eval(const Eigen::Ref<const Field>& v, const Eigen::Ref<const Field>& w,
                    const Grid1D& grid, const ModelFunctions& m) {
  if (v.size() != grid.n || w.size() != grid.n)
    throw std::invalid_argument("h_limit_eval: field/grid size mismatch");
  Field dens(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    const Triple u = reconstruct_constraint({v(j), w(j)}, m);
    dens(j) = entropy_density(u(0), 0, 0.0, m) + entropy_density(u(1), 1, 0.0, m) +
              entropy_density(u(2), 2, 0.0, m);
  }
  return integrate(dens, grid);
}

EntropyReport make_entropy_report(int step, const State& s, double eta, double eps,
                                  double margin_delta, const Grid1D& grid,
                                  const ModelFunctions& m) {
  EntropyReport r;
  r.step = step;
  r.t = s.t;
  r.h_eta = h_eta_eval(s, eta, grid, m);
  r.d_grad = dissipation_terms(s, eta, margin_delta, grid, m).d_grad;
  r.d_reac = reaction_dissipation(s, eta, eps, grid, m);
  r.mass12 = integrate(s.u[0] + s.u[1], grid);
  r.mass13 = integrate(s.u[0] + s.u[2], grid);
  Field defect(grid.n);
  for (Eigen::Index j = 0; j < grid.n; ++j)
    defect(j) = std::abs(m.q[0](s.u[0](j)) - m.q[1](s.u[1](j)) * m.q[2](s.u[2](j)));
  r.defect_l1 = integrate(defect, grid);
  r.min_u = std::min({s.u[0].minCoeff(), s.u[1].minCoeff(), s.u[2].minCoeff()});
  return r;
}

DualityMonitorResult duality_monitor(const std::vector<State>& trajectory,
                                     const Grid1D& grid, const ModelFunctions& m) {
  if (trajectory.size() < 2)
    throw std::invalid_argument("duality_monitor: need at least two states");

  DualityMonitorResult out;
  Field v_prev;
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const State& s = trajectory[k];
    require_state(s, grid, "duality_monitor");
    Field v = 2.0 * s.u[0] + s.u[1] + s.u[2];
    if (!(v.minCoeff() > 0.0))
      throw std::invalid_argument("duality_monitor: states must keep v positive");
    if (k > 0) {
      const double tau = s.t - trajectory[k - 1].t;
      if (!(tau > 0.0))
        throw std::invalid_argument("duality_monitor: non-increasing time stamps");
      Field mu(grid.n);
      for (Eigen::Index j = 0; j < grid.n; ++j) {
        const Triple fv = F_eval({s.u[0](j), s.u[1](j), s.u[2](j)}, m);
        mu(j) = (2.0 * fv(0) + fv(1) + fv(2)) / v(j);
      }
      out.a_accum += tau * integrate(mu * v * v, grid);
      out.b_accum += tau * integrate(mu, grid);
      const Field resid = (v - v_prev) / tau - laplacian_neumann(mu * v, grid);
      out.max_rel_residual =
          std::max(out.max_rel_residual,
                   resid.abs().maxCoeff() * tau / (1.0 + v.abs().maxCoeff()));
    }
    v_prev = std::move(v);
  }
  out.ratio = out.a_accum / (1.0 + out.b_accum);
  return out;
}

}  // namespace fastreact

#include "fastreact/maps.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fastreact/errors.hpp"
#include "fastreact/quadrature.hpp"

namespace fastreact {

namespace {

void require_nonnegative(const double* data, int n, const char* what) {
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(data[i]) || data[i] < 0.0)
      throw std::invalid_argument(std::string(what) + ": components must be finite and nonnegative");
}

// Safeguarded Newton/bisection for an increasing function on [lo, hi] with
// phi(lo) <= target <= phi(hi). Stops when |phi(x) - target| <= tol_abs or the
// bracket has collapsed to machine width (the root is then resolved as well as
// doubles allow).
double solve_increasing(const std::function<double(double)>& phi,
                        const std::function<double(double)>& dphi, double target,
                        double lo, double hi, double tol_abs, const char* what) {
  double flo = phi(lo) - target;
  if (std::abs(flo) <= tol_abs) return lo;
  double fhi = phi(hi) - target;
  if (std::abs(fhi) <= tol_abs) return hi;
  if (flo > 0.0 || fhi < 0.0)
    throw SolverDivergence(std::string(what) + ": bracket does not contain the target",
                           Eigen::VectorXd::Constant(1, lo), std::abs(flo));

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double fx = phi(x) - target;
    if (std::abs(fx) <= tol_abs) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi)))
      return x;
    double next = std::numeric_limits<double>::quiet_NaN();
    if (dphi) {
      const double d = dphi(x);
      if (std::isfinite(d) && d > 0.0) next = x - fx / d;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw SolverDivergence(std::string(what) + ": scalar solve stalled",
                         Eigen::VectorXd::Constant(1, x), std::abs(phi(x) - target));
}

}  // namespace

Triple F_eval(const Triple& u, const ModelFunctions& m) {
  return {m.f[0](u(0)) + m.f12(u(0), u(1)),
          m.f[1](u(1)) + m.f21(u(0), u(1)),
          m.f[2](u(2))};
}

Eigen::Matrix3d F_jacobian(const Triple& u, const ModelFunctions& m) {
  Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
  J(0, 0) = m.df[0](u(0)) + m.d1f12(u(0), u(1));
  J(0, 1) = m.d2f12(u(0), u(1));
  J(1, 0) = m.d1f21(u(0), u(1));
  J(1, 1) = m.df[1](u(1)) + m.d2f21(u(0), u(1));
  J(2, 2) = m.df[2](u(2));
  return J;
}

double q_inverse(double y, int species, const ModelFunctions& m, double tol) {
  if (!std::isfinite(y) || y < 0.0)
    throw std::invalid_argument("q_inverse: target must be finite and nonnegative");
  if (m.q_inv[species]) return m.q_inv[species](y);
  if (y == 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (m.q[species](hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300)
      throw SolverDivergence("q_inverse: no finite preimage",
                             Eigen::VectorXd::Constant(1, hi), y);
  }
  return solve_increasing(m.q[species], m.dq[species], y, lo, hi, tol * (1.0 + y),
                          "q_inverse");
}

Triple F_inverse(const Triple& y, const ModelFunctions& m, double tol) {
  require_nonnegative(y.data(), 3, "F_inverse");
  if (!(tol > 0.0)) throw std::invalid_argument("F_inverse: tol must be positive");

  Triple u = Triple::Zero();
  if (y(2) > 0.0)
    u(2) = solve_increasing(m.f[2], m.df[2], y(2), 0.0, y(2) / m.kappa1,
                            tol * (1.0 + y(2)), "F_inverse");

  // f_i(s) >= kappa1 s and the cross terms vanish on the axes, so y_i = 0
  // forces u_i = 0 exactly and the coupled pair degenerates to scalar solves.
  if (y(0) == 0.0 && y(1) == 0.0) return u;
  if (y(0) == 0.0) {
    auto phi = [&](double s) { return m.f[1](s) + m.f21(0.0, s); };
    auto dphi = [&](double s) { return m.df[1](s) + m.d2f21(0.0, s); };
    u(1) = solve_increasing(phi, dphi, y(1), 0.0, y(1) / m.kappa1,
                            tol * (1.0 + y(1)), "F_inverse");
    return u;
  }
  if (y(1) == 0.0) {
    auto phi = [&](double s) { return m.f[0](s) + m.f12(s, 0.0); };
    auto dphi = [&](double s) { return m.df[0](s) + m.d1f12(s, 0.0); };
    u(0) = solve_increasing(phi, dphi, y(0), 0.0, y(0) / m.kappa1,
                            tol * (1.0 + y(0)), "F_inverse");
    return u;
  }

  // Diagonal estimates ignoring the cross terms start the coupled solve.
  double a0 = solve_increasing(m.f[0], m.df[0], y(0), 0.0, y(0) / m.kappa1,
                               1e-3 * (1.0 + y(0)), "F_inverse");
  double b0 = solve_increasing(m.f[1], m.df[1], y(1), 0.0, y(1) / m.kappa1,
                               1e-3 * (1.0 + y(1)), "F_inverse");
  if (a0 <= 0.0) a0 = y(0) / std::max(m.kappa1, 1e-8);
  if (b0 <= 0.0) b0 = y(1) / std::max(m.kappa1, 1e-8);

  // Damped Newton for log F(exp s) = log y; the log chart keeps iterates
  // positive and sees the map as a diffeomorphism without critical points.
  Eigen::Vector2d s(std::log(a0), std::log(b0));
  auto eval = [&](const Eigen::Vector2d& sv, Eigen::Vector2d& uv, Eigen::Vector2d& Fv) {
    uv = sv.array().min(700.0).max(-700.0).exp();
    Fv(0) = m.f[0](uv(0)) + m.f12(uv(0), uv(1));
    Fv(1) = m.f[1](uv(1)) + m.f21(uv(0), uv(1));
  };
  // Convergence is per component, |F_i(u) - y_i| <= tol (1 + y_i), so a small
  // component is not served at the slack of a large one.
  auto rel_res = [&](const Eigen::Vector2d& Fvalue) {
    return std::max(std::abs(Fvalue(0) - y(0)) / (1.0 + y(0)),
                    std::abs(Fvalue(1) - y(1)) / (1.0 + y(1)));
  };
  Eigen::Vector2d uv, Fv;
  eval(s, uv, Fv);
  double res = rel_res(Fv);

  for (int it = 0; it < 120; ++it) {
    if (res <= tol) {
      u(0) = uv(0);
      u(1) = uv(1);
      return u;
    }
    Eigen::Vector2d r(std::log(Fv(0) / y(0)), std::log(Fv(1) / y(1)));
    Eigen::Matrix2d J;
    J(0, 0) = uv(0) * (m.df[0](uv(0)) + m.d1f12(uv(0), uv(1))) / Fv(0);
    J(0, 1) = uv(1) * m.d2f12(uv(0), uv(1)) / Fv(0);
    J(1, 0) = uv(0) * m.d1f21(uv(0), uv(1)) / Fv(1);
    J(1, 1) = uv(1) * (m.df[1](uv(1)) + m.d2f21(uv(0), uv(1))) / Fv(1);
    const Eigen::Vector2d step = J.partialPivLu().solve(-r);
    const double rn = r.norm();

    double lambda = 1.0;
    bool accepted = false;
    for (int halve = 0; halve < 40; ++halve, lambda *= 0.5) {
      const Eigen::Vector2d strial = s + lambda * step;
      Eigen::Vector2d utrial, Ftrial;
      eval(strial, utrial, Ftrial);
      if (!Ftrial.allFinite() || !(Ftrial(0) > 0.0) || !(Ftrial(1) > 0.0)) continue;
      const Eigen::Vector2d rtrial(std::log(Ftrial(0) / y(0)), std::log(Ftrial(1) / y(1)));
      const double res_trial = rel_res(Ftrial);
      if (rtrial.norm() < rn || res_trial <= tol) {
        s = strial;
        uv = utrial;
        Fv = Ftrial;
        res = res_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      Eigen::VectorXd last(3);
      last << uv(0), uv(1), u(2);
      throw SolverDivergence("F_inverse: damped Newton stalled", last, res);
    }
  }
  Eigen::VectorXd last(3);
  last << uv(0), uv(1), u(2);
  throw SolverDivergence("F_inverse: iteration limit reached", last, res);
}

Pair g_eval(const Pair& u23, const ModelFunctions& m) {
  require_nonnegative(u23.data(), 2, "g_eval");
  const double prod = m.q[1](u23(0)) * m.q[2](u23(1));
  const double c = q_inverse(prod, 0, m);
  return {u23(0) + c, u23(1) + c};
}

Eigen::Matrix2d g_jacobian(const Pair& u23, const ModelFunctions& m) {
  if (!(u23(0) > 0.0) || !(u23(1) > 0.0))
    throw std::invalid_argument("g_jacobian: point must be strictly positive");
  const double q2v = m.q[1](u23(0)), q3v = m.q[2](u23(1));
  const double c = q_inverse(q2v * q3v, 0, m);
  const double d1 = m.dq[0](c);
  const double dc2 = m.dq[1](u23(0)) * q3v / d1;
  const double dc3 = q2v * m.dq[2](u23(1)) / d1;
  Eigen::Matrix2d J;
  J << 1.0 + dc2, dc3, dc2, 1.0 + dc3;
  return J;
}

Pair g_inverse(const Pair& vw, const ModelFunctions& m, double tol) {
  require_nonnegative(vw.data(), 2, "g_inverse");
  if (!(tol > 0.0)) throw std::invalid_argument("g_inverse: tol must be positive");
  const double v = vw(0), w = vw(1);
  if (v == 0.0) return {0.0, w};  // u2 = 0 forces the shared term to vanish
  if (w == 0.0) return {v, 0.0};

  const double tol_abs = tol * (1.0 + vw.lpNorm<Eigen::Infinity>());
  const double d = w - v;  // u3 - u2, exact for any root
  auto psi = [&](double u2) {
    return u2 + q_inverse(m.q[1](u2) * m.q[2](u2 + d), 0, m, 1e-15);
  };
  auto dpsi = [&](double u2) {
    const double prod = m.q[1](u2) * m.q[2](u2 + d);
    const double c = q_inverse(prod, 0, m, 1e-15);
    return 1.0 + (m.dq[1](u2) * m.q[2](u2 + d) + m.q[1](u2) * m.dq[2](u2 + d)) / m.dq[0](c);
  };
  const double lo = std::max(0.0, -d);
  const double u2 = solve_increasing(psi, dpsi, v, lo, v, tol_abs, "g_inverse");
  return {u2, std::max(0.0, u2 + d)};
}

Triple pair_inverse_closed_form(const Pair& vw) {
  require_nonnegative(vw.data(), 2, "pair_inverse_closed_form");
  const double v = vw(0), w = vw(1);
  const double b2 = w - v + 1.0;
  const double u2 = b2 >= 0.0 ? 2.0 * v / (b2 + std::sqrt(b2 * b2 + 4.0 * v))
                              : 0.5 * (-b2 + std::sqrt(b2 * b2 + 4.0 * v));
  const double b3 = v - w + 1.0;
  const double u3 = b3 >= 0.0 ? 2.0 * w / (b3 + std::sqrt(b3 * b3 + 4.0 * w))
                              : 0.5 * (-b3 + std::sqrt(b3 * b3 + 4.0 * w));
  return {std::max(0.0, w - u3), u2, u3};
}

Triple reconstruct_constraint(const Pair& vw, const ModelFunctions& m, double tol) {
  if (m.identity_q) return pair_inverse_closed_form(vw);
  const Pair u23 = g_inverse(vw, m, tol);
  const double u1 = q_inverse(m.q[1](u23(0)) * m.q[2](u23(1)), 0, m, 1e-15);
  return {u1, u23(0), u23(1)};
}

double entropy_flux(double s, int species, const ModelFunctions& m) {
  if (!std::isfinite(s) || s < 0.0)
    throw std::invalid_argument("entropy_flux: argument must be finite and nonnegative");
  if (s == 0.0) return 0.0;
  if (m.identity_f && m.identity_q) {
    // Integrand is 1 below the golden-section point s0 and 1/sqrt(y + y^2) above.
    const double s0 = 0.5 * (std::sqrt(5.0) - 1.0);
    if (s <= s0) return s;
    auto anti = [](double y) { return std::log(0.5 + y + std::sqrt(y + y * y)); };
    return s0 + anti(s) - anti(s0);
  }
  return entropy_flux_quadrature(s, species, m);
}

double entropy_flux_quadrature(double s, int species, const ModelFunctions& m) {
  if (!std::isfinite(s) || s < 0.0)
    throw std::invalid_argument("entropy_flux_quadrature: argument must be finite and nonnegative");
  if (s == 0.0) return 0.0;

  auto ratio = [&](double y) {
    const double qv = m.q[species](y);
    return m.dq[species](y) * m.df[species](y) / (qv * (1.0 + qv));
  };
  auto integrand = [&](double y) {
    if (y <= 0.0) return 1.0;
    const double r = ratio(y);
    if (!(r < 1.0)) return 1.0;
    return std::sqrt(r);
  };

  // Bisect every crossing of ratio = 1 so each quadrature piece is smooth.
  std::vector<double> knots{0.0, s};
  const int scan = 256;
  const double start = std::min(s, std::max(1e-12, 1e-9 * s));
  double prev_y = start;
  double prev_r = ratio(prev_y) - 1.0;
  for (int k = 1; k <= scan; ++k) {
    const double y = start * std::pow(s / start, double(k) / scan);
    const double ry = ratio(y) - 1.0;
    if (std::isfinite(prev_r) && std::isfinite(ry) &&
        ((prev_r < 0.0 && ry > 0.0) || (prev_r > 0.0 && ry < 0.0))) {
      double a = prev_y, b = y, fa = prev_r;
      while (b - a > 1e-12) {
        const double mid = 0.5 * (a + b);
        const double fm = ratio(mid) - 1.0;
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      knots.push_back(0.5 * (a + b));
    } else if (ry == 0.0) {
      knots.push_back(y);
    }
    prev_y = y;
    prev_r = ry;
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  double total = 0.0;
  const double tol = 1e-10 / double(knots.size() - 1);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    total += adaptive_simpson(integrand, knots[k], knots[k + 1], tol);
  return total;
}

}  // namespace fastreact

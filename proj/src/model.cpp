#include "fastreact/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fastreact/quadrature.hpp"

namespace fastreact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool all_finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

double sq(double x) { return x * x; }

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out(count);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
  return out;
}

}  // namespace

ModelFunctions build_power_law(const PowerLawParams& p) {
  if (!all_finite({p.alpha1, p.alpha2, p.alpha3, p.delta, p.beta, p.gamma, p.alpha}))
    throw std::invalid_argument("build_power_law: non-finite parameter");
  if (!(p.alpha1 > 0.0 && p.alpha2 > 0.0 && p.alpha3 > 0.0))
    throw std::invalid_argument("build_power_law: alpha_i must be positive");
  if (!(p.delta >= 1.0 && p.beta >= 1.0 && p.gamma >= 1.0))
    throw std::invalid_argument("build_power_law: exponents must be >= 1");
  if (!(p.alpha >= 0.0))
    throw std::invalid_argument("build_power_law: alpha must be nonnegative");

  ModelFunctions m;
  const double delta = p.delta, beta = p.beta, gamma = p.gamma, a = p.alpha;
  const std::array<double, 3> lin{p.alpha1, p.alpha2, p.alpha3};
  for (int i = 0; i < 3; ++i) {
    const double ai = lin[i];
    m.f[i] = [ai, delta](double s) { return ai * s + std::pow(s, delta); };
    m.df[i] = [ai, delta](double s) { return ai + delta * std::pow(s, delta - 1.0); };
  }
  if (beta == 1.0) {
    for (int i = 0; i < 3; ++i) {
      m.q[i] = [](double s) { return s; };
      m.dq[i] = [](double) { return 1.0; };
      m.q_inv[i] = [](double y) { return y; };
    }
    m.identity_q = true;
  } else {
    for (int i = 0; i < 3; ++i) {
      m.q[i] = [beta](double s) { return std::pow(s, beta); };
      m.dq[i] = [beta](double s) { return beta * std::pow(s, beta - 1.0); };
      m.q_inv[i] = [beta](double y) { return std::pow(y, 1.0 / beta); };
    }
  }
  if (gamma == 1.0) {
    m.f12 = [a](double s1, double s2) { return a * s1 * s2; };
    m.d1f12 = [a](double, double s2) { return a * s2; };
    m.d2f12 = [a](double s1, double) { return a * s1; };
    m.f21 = [a](double s1, double s2) { return a * s1 * s2; };
    m.d1f21 = [a](double, double s2) { return a * s2; };
    m.d2f21 = [a](double s1, double) { return a * s1; };
  } else {
    m.f12 = [a, gamma](double s1, double s2) { return a * std::pow(s1, gamma) * s2; };
    m.d1f12 = [a, gamma](double s1, double s2) { return a * gamma * std::pow(s1, gamma - 1.0) * s2; };
    m.d2f12 = [a, gamma](double s1, double) { return a * std::pow(s1, gamma); };
    m.f21 = [a, gamma](double s1, double s2) { return a * s1 * std::pow(s2, gamma); };
    m.d1f21 = [a, gamma](double, double s2) { return a * std::pow(s2, gamma); };
    m.d2f21 = [a, gamma](double s1, double s2) { return a * gamma * s1 * std::pow(s2, gamma - 1.0); };
  }
  m.kappa1 = std::min({p.alpha1, p.alpha2, p.alpha3});
  m.power_law = p;
  return m;
}

ModelFunctions build_identity() {
  ModelFunctions m;
  for (int i = 0; i < 3; ++i) {
    m.f[i] = [](double s) { return s; };
    m.df[i] = [](double) { return 1.0; };
    m.q[i] = [](double s) { return s; };
    m.dq[i] = [](double) { return 1.0; };
    m.q_inv[i] = [](double y) { return y; };
  }
  auto zero2 = [](double, double) { return 0.0; };
  m.f12 = m.f21 = zero2;
  m.d1f12 = m.d2f12 = m.d1f21 = m.d2f21 = zero2;
  m.kappa1 = 1.0;
  m.identity_f = true;
  m.identity_q = true;
  return m;
}

bool AssumptionReport::pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

std::string AssumptionReport::to_text() const {
  std::ostringstream os;
  os.precision(12);
  for (const CheckResult& c : checks) {
    os << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": lhs=" << c.lhs
       << " rhs=" << c.rhs << " at (" << c.witness[0] << ", " << c.witness[1]
       << ", " << c.witness[2] << ")";
    if (!c.note.empty()) os << "  [" << c.note << "]";
    os << "\n";
  }
  return os.str();
}

double certified_margin() { return 1.0 - 1.0 / std::sqrt(2.0); }

AssumptionReport check_power_law_certified(const PowerLawParams& p) {
  AssumptionReport rep;
  rep.margin_delta = certified_margin();

  CheckResult c1{"reaction exponent beta >= 1", p.beta >= 1.0, p.beta, 1.0, {p.beta, 0, 0}, ""};
  CheckResult c2{"cross exponent gamma >= 1", p.gamma >= 1.0, p.gamma, 1.0, {p.gamma, 0, 0}, ""};
  const double need = 1.0 + 4.0 * std::max(p.beta, p.gamma - 1.0);
  CheckResult c3{"self-diffusion exponent delta >= 1 + 4 max(beta, gamma-1)",
                 p.delta >= need, p.delta, need, {p.delta, p.beta, p.gamma},
                 "lhs must be >= rhs"};
  const double size = 1024.0 * sq(p.alpha);
  const double cap = std::min({p.alpha1, p.alpha2, p.delta});
  CheckResult c4{"cross strength 1024 alpha^2 <= min(alpha1, alpha2, delta)",
                 size <= cap, size, cap, {p.alpha, 0, 0}, "lhs must be <= rhs"};
  rep.checks = {c1, c2, c3, c4};
  return rep;
}

std::vector<std::pair<double, double>> default_cross_diffusion_grid() {
  std::vector<std::pair<double, double>> grid;
  const auto axis = log_spaced(1e-2, 10.0, 64);
  grid.reserve(axis.size() * axis.size() + 2 * axis.size() + 1);
  for (double s1 : axis)
    for (double s2 : axis) grid.emplace_back(s1, s2);
  for (double s : axis) {
    grid.emplace_back(0.0, s);
    grid.emplace_back(s, 0.0);
  }
  grid.emplace_back(0.0, 0.0);
  return grid;
}

AssumptionReport check_weak_cross_diffusion(
    const ModelFunctions& funcs, double eta_max, double margin_delta,
    const std::vector<std::pair<double, double>>& grid) {
  if (!(margin_delta > 0.0 && margin_delta < 1.0))
    throw std::invalid_argument("check_weak_cross_diffusion: margin must lie in (0,1)");
  if (!(eta_max >= 0.0))
    throw std::invalid_argument("check_weak_cross_diffusion: eta_max must be >= 0");

  std::vector<double> etas{0.0};
  if (eta_max > 0.0) {
    etas.push_back(0.5 * eta_max);
    etas.push_back(eta_max);
  }

  CheckResult split{"weak cross-diffusion split", true, 0.0, kInf, {0, 0, 0}, ""};
  CheckResult det{"diffusion block determinant positive", true, kInf, 0.0, {0, 0, 0}, ""};
  double worst_margin = kInf;
  int skipped = 0;

  const double factor = 2.0 * sq(1.0 - margin_delta);
  for (const auto& [s1, s2] : grid) {
    // Determinant of the (1,2) diffusion block; eta plays no role here.
    {
      const double diag1 = funcs.df[0](s1) + funcs.d1f12(s1, s2);
      const double diag2 = funcs.df[1](s2) + funcs.d2f21(s1, s2);
      const double off = funcs.d2f12(s1, s2) * funcs.d1f21(s1, s2);
      const double d = diag1 * diag2 - off;
      if (!std::isfinite(d) || d <= 0.0) {
        det.pass = false;
        det.lhs = d;
        det.witness = {s1, s2, 0.0};
      } else if (d < det.lhs) {
        det.lhs = d;
        det.witness = {s1, s2, 0.0};
      }
    }

    for (double eta : etas) {
      double lhs, rhs;
      if (s1 > 0.0 && s2 > 0.0) {
        const double q1v = funcs.q[0](s1), q2v = funcs.q[1](s2);
        const double den1 = q1v * (1.0 + eta * q1v);
        const double den2 = q2v * (1.0 + eta * q2v);
        const double t1 = funcs.dq[0](s1) * funcs.d2f12(s1, s2) / den1;
        const double t2 = funcs.dq[1](s2) * funcs.d1f21(s1, s2) / den2;
        lhs = sq(t1 + t2);
        rhs = factor * funcs.dq[0](s1) * funcs.dq[1](s2) *
              (funcs.df[0](s1) + funcs.d1f12(s1, s2)) *
              (funcs.df[1](s2) + funcs.d2f21(s1, s2)) / (den1 * den2);
      } else if (funcs.power_law) {
        // On the boundary the right side diverges; the left side has the
        // closed-form limit alpha beta s^(gamma-1) / (1 + eta s^beta) per factor.
        const auto& p = *funcs.power_law;
        const double t1 = p.alpha * p.beta * std::pow(s1, p.gamma - 1.0) /
                          (1.0 + eta * std::pow(s1, p.beta));
        const double t2 = p.alpha * p.beta * std::pow(s2, p.gamma - 1.0) /
                          (1.0 + eta * std::pow(s2, p.beta));
        lhs = sq(t1 + t2);
        rhs = kInf;
      } else {
        ++skipped;
        continue;
      }

      if (!std::isfinite(lhs) || lhs > rhs * (1.0 + 1e-12)) {
        split.pass = false;
        split.lhs = lhs;
        split.rhs = rhs;
        split.witness = {s1, s2, eta};
        worst_margin = -kInf;
      } else if (rhs - lhs < worst_margin) {
        worst_margin = rhs - lhs;
        split.lhs = lhs;
        split.rhs = rhs;
        split.witness = {s1, s2, eta};
      }
    }
  }
  if (skipped > 0)
    split.note = std::to_string(skipped) + " boundary points skipped (no closed-form limit)";

  AssumptionReport rep;
  rep.margin_delta = margin_delta;
  rep.checks = {split, det};
  return rep;
}

AssumptionReport check_structure(const ModelFunctions& funcs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 100.0);

  std::vector<double> samples = log_spaced(1e-6, 100.0, 40);
  for (int k = 0; k < 60; ++k) samples.push_back(unif(rng));

  AssumptionReport rep;
  rep.margin_delta = certified_margin();

  CheckResult origin{"f_i(0) = 0 and q_i(0) = 0", true, 0.0, 0.0, {0, 0, 0}, ""};
  for (int i = 0; i < 3; ++i) {
    const double fv = funcs.f[i](0.0), qv = funcs.q[i](0.0);
    if (std::abs(fv) > 1e-14 || std::abs(qv) > 1e-14) {
      origin.pass = false;
      origin.lhs = std::max(std::abs(fv), std::abs(qv));
      origin.witness = {double(i + 1), 0, 0};
    }
  }

  CheckResult slope{"f_i' >= kappa1 > 0 and f_i(s) >= kappa1 s", funcs.kappa1 > 0.0,
                    kInf, funcs.kappa1, {0, 0, 0}, ""};
  CheckResult qmono{"q_i increasing with q_i' > 0 on (0, inf)", true, kInf, 0.0, {0, 0, 0}, ""};
  CheckResult qone{"q_i reaches 1 on the sampled range", true, 0.0, 1.0, {0, 0, 0}, ""};
  CheckResult cross{"cross terms vanish on the axes and are nondecreasing", true,
                    0.0, 0.0, {0, 0, 0}, ""};
  CheckResult roundtrip{"q_inv(q(s)) = s to 1e-12 relative on [0, 100]", true,
                        0.0, 1e-12, {0, 0, 0}, ""};

  for (int i = 0; i < 3; ++i) {
    double qmax = 0.0;
    for (double s : samples) {
      const double d = funcs.df[i](s);
      if (!(d >= funcs.kappa1) || !std::isfinite(d)) {
        slope.pass = false;
        slope.lhs = d;
        slope.witness = {double(i + 1), s, 0};
      }
      if (funcs.f[i](s) < funcs.kappa1 * s * (1.0 - 1e-12)) {
        slope.pass = false;
        slope.lhs = funcs.f[i](s);
        slope.rhs = funcs.kappa1 * s;
        slope.witness = {double(i + 1), s, 0};
      }
      const double dqv = funcs.dq[i](s);
      if (!(dqv > 0.0) || !std::isfinite(dqv)) {
        qmono.pass = false;
        qmono.lhs = dqv;
        qmono.witness = {double(i + 1), s, 0};
      }
      qmax = std::max(qmax, funcs.q[i](s));

      if (funcs.q_inv[i]) {
        const double y = funcs.q[i](s);
        const double back = funcs.q_inv[i](y);
        const double err = std::abs(back - s) / (1.0 + s);
        if (err > 1e-12) {
          roundtrip.pass = false;
          roundtrip.lhs = err;
          roundtrip.witness = {double(i + 1), s, 0};
        }
      }
    }
    if (qmax < 1.0) {
      qone.pass = false;
      qone.lhs = qmax;
      qone.witness = {double(i + 1), 0, 0};
    }
  }

  for (double s : samples) {
    if (std::abs(funcs.f12(0.0, s)) > 1e-14 || std::abs(funcs.f21(s, 0.0)) > 1e-14) {
      cross.pass = false;
      cross.lhs = std::max(std::abs(funcs.f12(0.0, s)), std::abs(funcs.f21(s, 0.0)));
      cross.witness = {s, 0, 0};
    }
  }
  for (int k = 0; k < 80; ++k) {
    const double s1 = unif(rng), s2 = unif(rng);
    const double partials[4] = {funcs.d1f12(s1, s2), funcs.d2f12(s1, s2),
                                funcs.d1f21(s1, s2), funcs.d2f21(s1, s2)};
    for (double pd : partials) {
      if (pd < -1e-12 || !std::isfinite(pd)) {
        cross.pass = false;
        cross.lhs = pd;
        cross.witness = {s1, s2, 0};
      }
    }
  }

  rep.checks = {origin, slope, qmono, qone, cross, roundtrip};

  // Bundles assembled from user callables carry no certified derivatives, so
  // compare against central differences at relative step 1e-6.
  if (!funcs.power_law) {
    CheckResult fd{"derivatives agree with central differences", true, 0.0, 0.0, {0, 0, 0},
                   "relative step 1e-6"};
    auto check1 = [&](const ScalarFn& fn, const ScalarFn& dfn, int tag) {
      for (double s : log_spaced(0.1, 50.0, 12)) {
        const double h = 1e-6 * s;
        const double num = (fn(s + h) - fn(s - h)) / (2.0 * h);
        const double exact = dfn(s);
        if (std::abs(num - exact) > 1e-4 * (1.0 + std::abs(exact))) {
          fd.pass = false;
          fd.lhs = num;
          fd.rhs = exact;
          fd.witness = {double(tag), s, 0};
        }
      }
    };
    for (int i = 0; i < 3; ++i) {
      check1(funcs.f[i], funcs.df[i], i + 1);
      check1(funcs.q[i], funcs.dq[i], i + 4);
    }
    for (double s1 : {0.3, 2.0, 9.0}) {
      for (double s2 : {0.7, 4.0}) {
        const double h1 = 1e-6 * s1, h2 = 1e-6 * s2;
        const double pairs[4][2] = {
            {(funcs.f12(s1 + h1, s2) - funcs.f12(s1 - h1, s2)) / (2 * h1), funcs.d1f12(s1, s2)},
            {(funcs.f12(s1, s2 + h2) - funcs.f12(s1, s2 - h2)) / (2 * h2), funcs.d2f12(s1, s2)},
            {(funcs.f21(s1 + h1, s2) - funcs.f21(s1 - h1, s2)) / (2 * h1), funcs.d1f21(s1, s2)},
            {(funcs.f21(s1, s2 + h2) - funcs.f21(s1, s2 - h2)) / (2 * h2), funcs.d2f21(s1, s2)}};
        for (auto& pr : pairs) {
          if (std::abs(pr[0] - pr[1]) > 1e-4 * (1.0 + std::abs(pr[1]))) {
            fd.pass = false;
            fd.lhs = pr[0];
            fd.rhs = pr[1];
            fd.witness = {s1, s2, 0};
          }
        }
      }
    }
    rep.checks.push_back(fd);
  }
  return rep;
}

AssumptionReport check_reaction_growth(const ModelFunctions& funcs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1e-2, 1e3);

  std::vector<std::array<double, 3>> pts;
  const auto axis = log_spaced(1e-2, 1e3, 8);
  for (double a : axis)
    for (double b : axis)
      for (double c : axis) pts.push_back({a, b, c});
  for (int k = 0; k < 500; ++k) pts.push_back({unif(rng), unif(rng), unif(rng)});

  auto flux = [&](const std::array<double, 3>& s, int i) {
    if (i == 0) return funcs.f[0](s[0]) + funcs.f12(s[0], s[1]);
    if (i == 1) return funcs.f[1](s[1]) + funcs.f21(s[0], s[1]);
    return funcs.f[2](s[2]);
  };

  CheckResult r1{"per-species growth ratio q(1+q) / (q' f' (F s + 1))", true, 0.0, kInf, {0, 0, 0}, ""};
  CheckResult r2{"reaction size over total flux", true, 0.0, kInf, {0, 0, 0}, ""};
  CheckResult r3{"entropy integrand over total flux", true, 0.0, kInf, {0, 0, 0}, ""};
  double r1_top = 0.0;  // max over points whose largest component sits in the last decade

  for (const auto& s : pts) {
    double fsum = 0.0, ssum = 0.0;
    for (int i = 0; i < 3; ++i) {
      fsum += flux(s, i);
      ssum += s[i];
    }
    for (int i = 0; i < 3; ++i) {
      const double qv = funcs.q[i](s[i]);
      const double ratio = qv * (1.0 + qv) /
                           (funcs.dq[i](s[i]) * funcs.df[i](s[i]) * (flux(s, i) * s[i] + 1.0));
      if (!std::isfinite(ratio)) {
        r1.pass = false;
        r1.witness = {s[0], s[1], s[2]};
      } else if (ratio > r1.lhs) {
        r1.lhs = ratio;
        r1.witness = {s[0], s[1], s[2]};
      }
      if (std::isfinite(ratio) && *std::max_element(s.begin(), s.end()) >= 100.0)
        r1_top = std::max(r1_top, ratio);
    }
    const double defect = funcs.q[0](s[0]) + funcs.q[1](s[1]) * funcs.q[2](s[2]);
    const double den = fsum * ssum + 1.0;
    const double v2 = defect / den;
    if (!std::isfinite(v2)) {
      r2.pass = false;
      r2.witness = {s[0], s[1], s[2]};
    } else if (v2 > r2.lhs) {
      r2.lhs = v2;
      r2.witness = {s[0], s[1], s[2]};
    }
    double ent = 0.0;
    for (int i = 0; i < 3; ++i)
      ent += adaptive_simpson([&](double v) { return std::log1p(funcs.q[i](v)); }, 1.0,
                              s[i], 1e-9);
    const double v3 = ent / den;
    if (!std::isfinite(v3)) {
      r3.pass = false;
      r3.witness = {s[0], s[1], s[2]};
    } else if (v3 > r3.lhs) {
      r3.lhs = v3;
      r3.witness = {s[0], s[1], s[2]};
    }
  }
  {
    std::ostringstream os;
    os.precision(6);
    os << "sampled max " << r1.lhs << ", max over last decade " << r1_top
       << (r1_top <= r1.lhs * (1.0 + 1e-12) && r1_top < r1.lhs ? " (decays)" : "");
    r1.note = os.str();
  }

  AssumptionReport rep;
  rep.margin_delta = certified_margin();
  rep.checks = {r1, r2, r3};
  return rep;
}

}  // namespace fastreact

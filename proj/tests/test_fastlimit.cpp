#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "fastreact/entropy.hpp"
#include "fastreact/fastlimit.hpp"

using namespace fastreact;

namespace {

ModelFunctions reference_model() { return build_power_law(PowerLawParams{}); }

Field cosine_profile(const Grid1D& grid, double base, double amp, double waves) {
  return base + amp * (waves * M_PI * grid.centers() / grid.length).cos();
}

}  // namespace

TEST_CASE("well-prepared initialization hits the constraint") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(8, 1.0);

  const State flat = well_prepared_init(Field::Constant(8, 1.0),
                                        Field::Constant(8, 1.0), grid, ref);
  CHECK((flat.u[0] - 1.0).abs().maxCoeff() <= 1e-14);

  const State s = well_prepared_init(Field::Constant(8, 2.0),
                                     Field::Constant(8, 3.0), grid, ref);
  CHECK((s.u[0] - 6.0).abs().maxCoeff() <= 1e-12);

  PowerLawParams p;
  p.beta = 2.0;
  const ModelFunctions quad = build_power_law(p);
  const State sq = well_prepared_init(Field::Constant(8, 2.0),
                                      Field::Constant(8, 2.0), grid, quad);
  CHECK((sq.u[0] - 4.0).abs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(well_prepared_init(Field::Zero(8), Field::Constant(8, 1.0),
                                     grid, ref),
                  std::invalid_argument);
}

TEST_CASE("limit flux Jacobian matches finite differences") {
  for (const ModelFunctions& m :
       {reference_model(), build_identity(),
        build_power_law([] { PowerLawParams p; p.beta = 2.0; return p; }())}) {
    const Pair vw(2.3, 3.1);
    const Eigen::Matrix2d J = limit_flux_jacobian(vw, m);
    auto G = [&](const Pair& p2) {
      const Triple u = reconstruct_constraint(p2, m);
      const Triple fv = F_eval(u, m);
      return Pair(fv(0) + fv(1), fv(0) + fv(2));
    };
    for (int c = 0; c < 2; ++c) {
      Pair up = vw, dn = vw;
      const double h = 1e-6;
      up(c) += h;
      dn(c) -= h;
      const Pair num = (G(up) - G(dn)) / (2.0 * h);
      for (int r = 0; r < 2; ++r)
        CHECK(std::abs(J(r, c) - num(r)) <= 2e-5 * (1.0 + std::abs(num(r))));
    }
  }
}

TEST_CASE("constant data is a fixed point of the limit solver") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(12, 1.0);
  SchemeParams p;
  p.tau = 1e-2;
  const LimitRunResult r = solve_limit_system(Field::Constant(12, 3.0),
                                              Field::Constant(12, 4.0), 0.05,
                                              grid, p, ref);
  REQUIRE(r.trajectory.size() == 6);
  for (const PairState& ps : r.trajectory) {
    CHECK((ps.v - 3.0).abs().maxCoeff() <= 1e-11);
    CHECK((ps.w - 4.0).abs().maxCoeff() <= 1e-11);
  }
  REQUIRE(r.h_limit.size() == 6);
  CHECK(r.h_limit[5] == doctest::Approx(r.h_limit[0]).epsilon(1e-10));
}

TEST_CASE("limit solver conserves both densities and dissipates entropy") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(32, 1.0);
  const Field v0 = cosine_profile(grid, 3.0, 0.8, 1.0);
  const Field w0 = cosine_profile(grid, 2.5, 0.5, 2.0);
  SchemeParams p;
  p.tau = 1e-3;
  const LimitRunResult r = solve_limit_system(v0, w0, 0.03, grid, p, ref);

  const double mv = integrate(v0, grid), mw = integrate(w0, grid);
  for (const PairState& ps : r.trajectory) {
    CHECK(std::abs(integrate(ps.v, grid) - mv) <= 1e-11 * std::abs(mv));
    CHECK(std::abs(integrate(ps.w, grid) - mw) <= 1e-11 * std::abs(mw));
    CHECK(ps.v.minCoeff() > 0.0);
    CHECK(ps.w.minCoeff() > 0.0);
  }
  for (size_t k = 1; k < r.h_limit.size(); ++k)
    CHECK(r.h_limit[k] <= r.h_limit[k - 1] + 1e-11);
}

TEST_CASE("limit trajectory stays consistent under both reconstruction routes") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(16, 1.0);
  SchemeParams p;
  p.tau = 2e-3;
  const LimitRunResult r = solve_limit_system(cosine_profile(grid, 3.0, 0.7, 1.0),
                                              cosine_profile(grid, 2.0, 0.4, 3.0),
                                              0.01, grid, p, ref);
  for (const PairState& ps : r.trajectory) {
    for (int j = 0; j < grid.n; ++j) {
      const Pair vw(ps.v(j), ps.w(j));
      const Triple closed = reconstruct_constraint(vw, ref);
      const Pair u23 = g_inverse(vw, ref, 1e-13);  // iterative route
      CHECK(std::abs(closed(1) - u23(0)) <= 1e-10);
      CHECK(std::abs(closed(2) - u23(1)) <= 1e-10);
      CHECK(closed(0) == doctest::Approx(closed(1) * closed(2)).epsilon(1e-12));
    }
  }
}

TEST_CASE("epsilon sweep converges to the limit system") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(32, 1.0);
  const Field u2 = cosine_profile(grid, 1.0, 0.5, 1.0);
  const Field u3 = 1.0 + 0.5 * (M_PI * grid.centers()).sin().square();
  SchemeParams p;
  p.tau = 1e-3;
  const SweepResult sweep =
      eps_sweep(u2, u3, 0.05, grid, p, ref, {1e-2, 1e-1, 1e-3});

  REQUIRE(sweep.entries.size() == 3);
  // Entries come back sorted by decreasing eps regardless of input order.
  CHECK(sweep.entries[0].eps == 1e-1);
  CHECK(sweep.entries[1].eps == 1e-2);
  CHECK(sweep.entries[2].eps == 1e-3);
  for (const SweepEntry& e : sweep.entries) {
    CHECK(e.ok);
    CHECK(e.error.empty());
    CHECK(e.defect_l1_qt > 0.0);
    CHECK(e.ratio_sqrt_eps ==
          doctest::Approx(e.defect_l1_qt / std::sqrt(e.eps)).epsilon(1e-13));
  }
  CHECK(sweep.entries[1].defect_l1_qt < sweep.entries[0].defect_l1_qt);
  CHECK(sweep.entries[2].defect_l1_qt < sweep.entries[1].defect_l1_qt);
  CHECK(sweep.entries[2].gap_v < sweep.entries[0].gap_v);
  CHECK(sweep.entries[2].gap_w < sweep.entries[0].gap_w);
}

TEST_CASE("epsilon sweep rejects malformed lists") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(8, 1.0);
  const Field ones = Field::Constant(8, 1.0);
  SchemeParams p;
  CHECK_THROWS_AS(eps_sweep(ones, ones, 0.01, grid, p, ref, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(eps_sweep(ones, ones, 0.01, grid, p, ref, {0.1, 0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(eps_sweep(ones, ones, 0.01, grid, p, ref, {0.1, -1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(eps_sweep(ones, ones, 0.01, grid, p, ref,
                            {std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
}

TEST_CASE("per-epsilon failures are recorded without aborting the sweep") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(8, 1.0);
  const Field ones = Field::Constant(8, 1.0);
  SchemeParams p;
  p.tau = 1e-3;
  p.strict_tau = true;
  p.eta = 0.05;
  p.eps = 1.0;  // base passes validation; eps = 0.1 violates tau <= eps eta^2/2
  const SweepResult sweep = eps_sweep(ones, ones, 0.002, grid, p, ref, {1.0, 0.1});
  REQUIRE(sweep.entries.size() == 2);
  CHECK(sweep.entries[0].ok);
  CHECK_FALSE(sweep.entries[1].ok);
  CHECK(sweep.entries[1].error.find("strict_tau") != std::string::npos);
}

TEST_CASE("limit solver validates input") {
  const ModelFunctions ref = reference_model();
  Grid1D grid(8, 1.0);
  SchemeParams p;
  CHECK_THROWS_AS(solve_limit_system(Field::Zero(8), Field::Constant(8, 1.0),
                                     0.01, grid, p, ref),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_limit_system(Field::Constant(8, 1.0),
                                     Field::Constant(8, 1.0), -0.5, grid, p, ref),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_limit_system(Field::Constant(5, 1.0),
                                     Field::Constant(8, 1.0), 0.01, grid, p, ref),
                  std::invalid_argument);
}

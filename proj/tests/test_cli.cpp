#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "fastreact/commands.hpp"
#include "fastreact/csv.hpp"
#include "fastreact/expression.hpp"

using namespace fastreact;

namespace {

/// Redirects a std stream into a buffer for the lifetime of the object, so
/// command output does not pollute the test log.
class CaptureStream {
 public:
  explicit CaptureStream(std::ostream& s) : stream_(s), old_(s.rdbuf(buf_.rdbuf())) {}
  ~CaptureStream() { stream_.rdbuf(old_); }
  std::string text() const { return buf_.str(); }

 private:
  std::ostream& stream_;
  std::ostringstream buf_;
  std::streambuf* old_;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file ", p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

std::filesystem::path fresh_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("expression grammar") {
  CHECK(Expression::parse("2+3*4^2")(0.0) == 50.0);
  CHECK(Expression::parse("2^3^2")(0.0) == 512.0);  // right associative
  CHECK(Expression::parse("pi")(0.0) == doctest::Approx(M_PI).epsilon(1e-16));
  CHECK(Expression::parse("x")(0.75) == 0.75);
  CHECK(Expression::parse("-x+1")(0.3) == doctest::Approx(0.7));
  CHECK(Expression::parse("(1+2)*(3-4)/2")(0.0) == doctest::Approx(-1.5));
  CHECK(Expression::parse("sin(x)^2")(0.7) ==
        doctest::Approx(std::sin(0.7) * std::sin(0.7)).epsilon(1e-15));
  CHECK(Expression::parse("exp(-x)")(1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(Expression::parse(" 1 + 0.5*cos(pi*x) ")(0.25) ==
        doctest::Approx(1.0 + 0.5 * std::cos(M_PI * 0.25)).epsilon(1e-15));
  CHECK(Expression::parse("1e-2")(0.0) == 0.01);
}

TEST_CASE("expression errors carry a position") {
  for (const char* bad : {"", "2+", "sin", "sin(", "sin(x", "foo(1)", "2 3",
                          "1..2", ")", "2*/3"})
    CHECK_THROWS_AS(Expression::parse(bad), ExpressionError);
  try {
    Expression::parse("1 + @");
    FAIL("expected ExpressionError");
  } catch (const ExpressionError& e) {
    CHECK(std::string(e.what()).find("position") != std::string::npos);
  }
}

TEST_CASE("empty config text yields the documented defaults") {
  const RunConfig cfg = parse_config_text("");
  CHECK(cfg.preset == "power_law");
  CHECK(cfg.params.alpha1 == 1.0);
  CHECK(cfg.params.alpha2 == 1.0);
  CHECK(cfg.params.alpha3 == 1.0);
  CHECK(cfg.params.delta == 5.0);
  CHECK(cfg.params.beta == 1.0);
  CHECK(cfg.params.gamma == 1.0);
  CHECK(cfg.params.alpha == 0.005);
  CHECK(cfg.certified);
  CHECK(cfg.n_cells == 128);
  CHECK(cfg.length == 1.0);
  CHECK(cfg.scheme.tau == 1e-3);
  CHECK(cfg.scheme.eta == 0.0);
  CHECK(cfg.scheme.eps == 1.0);
  CHECK(cfg.scheme.newton_tol == 1e-12);
  CHECK(cfg.scheme.newton_max == 50);
  CHECK_FALSE(cfg.scheme.strict_tau);
  CHECK(cfg.scheme.max_step_halvings == 0);
  CHECK(cfg.t_final == 0.5);
  CHECK(cfg.u1.empty());
  CHECK(cfg.u2 == "1");
  CHECK(cfg.u3 == "1");
  CHECK(cfg.well_prepared);
  CHECK(cfg.out_dir == "out");
  CHECK(cfg.fields_stride == 10);
  CHECK(cfg.monitors);
}

TEST_CASE("every key parses into its field") {
  const RunConfig cfg = parse_config_text(R"(
# full key coverage
[model]
preset = power_law
alpha1 = 0.75
alpha2 = 1.25
alpha3 = 2
delta = 6
beta = 1.5
gamma = 2
alpha = 0.01
certified = false

[grid]
n = 64
length = 2.5

[scheme]
tau = 0.0005
eta = 0.1
eps = 0.01
t_final = 0.25
newton_tol = 1e-11
newton_max = 25
fixedpoint_max = 100
max_step_halvings = 3
strict_tau = false

; init profiles are expressions in x
[init]
u1 = 1 + x
u2 = 2
u3 = 1 + 0.5*sin(pi*x)
well_prepared = false

[output]
dir = some/dir
fields_stride = 7
monitors = false
)");
  CHECK(cfg.params.alpha1 == 0.75);
  CHECK(cfg.params.alpha2 == 1.25);
  CHECK(cfg.params.alpha3 == 2.0);
  CHECK(cfg.params.delta == 6.0);
  CHECK(cfg.params.beta == 1.5);
  CHECK(cfg.params.gamma == 2.0);
  CHECK(cfg.params.alpha == 0.01);
  CHECK_FALSE(cfg.certified);
  CHECK(cfg.n_cells == 64);
  CHECK(cfg.length == 2.5);
  CHECK(cfg.scheme.tau == 0.0005);
  CHECK(cfg.scheme.eta == 0.1);
  CHECK(cfg.scheme.eps == 0.01);
  CHECK(cfg.t_final == 0.25);
  CHECK(cfg.scheme.newton_tol == 1e-11);
  CHECK(cfg.scheme.newton_max == 25);
  CHECK(cfg.scheme.fixedpoint_max == 100);
  CHECK(cfg.scheme.max_step_halvings == 3);
  CHECK(cfg.u1 == "1 + x");
  CHECK(cfg.u2 == "2");
  CHECK(cfg.u3 == "1 + 0.5*sin(pi*x)");
  CHECK_FALSE(cfg.well_prepared);
  CHECK(cfg.out_dir == "some/dir");
  CHECK(cfg.fields_stride == 7);
  CHECK_FALSE(cfg.monitors);
}

TEST_CASE("scheme.eps accepts inf to disable the reaction") {
  const RunConfig cfg = parse_config_text("[scheme]\neps = inf\n");
  CHECK(std::isinf(cfg.scheme.eps));
  CHECK_THROWS_AS(parse_config_text("[scheme]\neps = nan\n"), ConfigError);
}

TEST_CASE("malformed config input is rejected with context") {
  auto message_of = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of("n = 4\n").find("outside of any [section]") != std::string::npos);
  CHECK(message_of("[grid\nn = 4\n").find("malformed section") != std::string::npos);
  CHECK(message_of("[grid]\nn 4\n").find("expected key = value") != std::string::npos);
  CHECK(message_of("[grid]\nn = 4\nn = 8\n").find("duplicate key grid.n") !=
        std::string::npos);
  CHECK(message_of("[grid]\nm = 4\n").find("unknown key grid.m") != std::string::npos);
  CHECK(message_of("[typo]\nn = 4\n").find("unknown key typo.n") != std::string::npos);
  CHECK(message_of("[grid]\nn = four\n").find("not an integer") != std::string::npos);
  CHECK(message_of("[grid]\nlength = long\n").find("not a number") != std::string::npos);
  CHECK(message_of("[output]\nmonitors = yes\n").find("not a boolean") !=
        std::string::npos);
}

TEST_CASE("inconsistent config values are rejected") {
  CHECK_THROWS_AS(parse_config_text("[grid]\nn = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[grid]\nlength = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scheme]\ntau = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scheme]\neta = -0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scheme]\neps = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scheme]\nt_final = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scheme]\nnewton_max = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[scheme]\nmax_step_halvings = 11\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[output]\nfields_stride = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[output]\ndir =\n"), ConfigError);

  // strict_tau needs eta > 0, finite eps, and tau below the regularized bound.
  CHECK_THROWS_AS(parse_config_text("[scheme]\nstrict_tau = true\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[scheme]\nstrict_tau = true\neta = 0.1\neps = inf\n"),
      ConfigError);
  const std::string base = "[scheme]\nstrict_tau = true\neta = 0.1\neps = 1\ntau = ";
  CHECK_NOTHROW(parse_config_text(base + "0.005\n"));
  CHECK_THROWS_AS(parse_config_text(base + "0.0051\n"), ConfigError);

  // init.u1 must be given exactly when the constraint does not supply it.
  CHECK_THROWS_AS(parse_config_text("[init]\nu1 = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[init]\nwell_prepared = false\n"), ConfigError);
  CHECK_NOTHROW(parse_config_text("[init]\nwell_prepared = false\nu1 = 1\n"));
}

TEST_CASE("identity preset rejects power-law keys") {
  CHECK_NOTHROW(parse_config_text("[model]\npreset = identity\n"));
  CHECK_THROWS_AS(parse_config_text("[model]\npreset = identity\nalpha = 0.1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\npreset = identity\ncertified = true\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[model]\npreset = nonsense\n"), ConfigError);
}

TEST_CASE("certified gate in make_model") {
  RunConfig cfg;
  CHECK_NOTHROW(make_model(cfg));

  cfg.params.alpha = 0.1;  // 1024 alpha^2 = 10.24 > min(alpha1, alpha2, delta)
  try {
    make_model(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("certified") != std::string::npos);
  }
  cfg.certified = false;
  CHECK_NOTHROW(make_model(cfg));

  cfg = RunConfig{};
  cfg.preset = "identity";
  const ModelFunctions funcs = make_model(cfg);
  CHECK(funcs.identity_q);
  CHECK(funcs.f[0](2.0) == 2.0);
}

TEST_CASE("initial state wiring") {
  RunConfig cfg;
  cfg.n_cells = 16;
  const Grid1D grid = make_grid(cfg);
  const ModelFunctions funcs = make_model(cfg);

  cfg.u2 = "2";
  cfg.u3 = "3";
  const State s = make_initial_state(cfg, grid, funcs);
  CHECK((s.u[0] - 6.0).abs().maxCoeff() <= 1e-12);  // q1 u1 = q2 u2 q3 u3
  CHECK((s.u[1] - 2.0).abs().maxCoeff() == 0.0);

  cfg.u2 = "cos(2*pi*x)";  // changes sign on (0, 1)
  CHECK_THROWS_AS(make_initial_state(cfg, grid, funcs), ConfigError);
  cfg.u2 = "1/0";
  CHECK_THROWS_AS(make_initial_state(cfg, grid, funcs), ConfigError);
  cfg.u2 = "2+";
  try {
    make_initial_state(cfg, grid, funcs);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("init.u2") != std::string::npos);
  }

  cfg.u2 = "1";
  cfg.well_prepared = false;
  cfg.u1 = "1 + x";
  const State explicit_u1 = make_initial_state(cfg, grid, funcs);
  CHECK(explicit_u1.u[0](0) == doctest::Approx(1.0 + grid.center(0)));
}

TEST_CASE("load_config reads files and reports missing ones") {
  CHECK_THROWS_AS(load_config("/nonexistent/fastreact.ini"), ConfigError);

  const auto path = std::filesystem::temp_directory_path() / "fastreact_test_cli.ini";
  {
    std::ofstream out(path);
    out << "[grid]\nn = 32\n";
  }
  const RunConfig cfg = load_config(path.string());
  CHECK(cfg.n_cells == 32);
  std::filesystem::remove(path);
}

TEST_CASE("numeric formatting survives a round trip") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.5) == "-0.5");
  for (double v : {1.0 / 3.0, M_PI, 1e300, 6.02e23, -2.2250738585072014e-308}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("simulate writes deterministic output files") {
  RunConfig cfg;
  cfg.n_cells = 16;
  cfg.t_final = 0.01;  // 10 steps at the default tau
  cfg.u2 = "1 + 0.5*cos(pi*x)";
  cfg.fields_stride = 4;

  const auto dir_a = fresh_dir("fastreact_test_cli_a");
  const auto dir_b = fresh_dir("fastreact_test_cli_b");
  int rc_a = -1, rc_b = -1;
  {
    CaptureStream out(std::cout);
    cfg.out_dir = dir_a.string();
    rc_a = cmd_simulate(cfg);
    cfg.out_dir = dir_b.string();
    rc_b = cmd_simulate(cfg);
  }
  CHECK(rc_a == kExitOk);
  CHECK(rc_b == kExitOk);

  const std::string fields = slurp(dir_a / "fields.csv");
  const std::string entropy = slurp(dir_a / "entropy.csv");
  CHECK(fields.rfind("t,x,u1,u2,u3\n", 0) == 0);
  CHECK(entropy.rfind("step,t,h_eta,D_grad,D_reac,mass12,mass13,defect_L1,min_u\n",
                      0) == 0);
  // Snapshots at steps 0, 4, 8 plus the final step, 16 cells each.
  CHECK(count_lines(fields) == 1 + 4 * 16);
  CHECK(count_lines(entropy) == 1 + 10);

  CHECK(fields == slurp(dir_b / "fields.csv"));
  CHECK(entropy == slurp(dir_b / "entropy.csv"));
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("simulate reports solver divergence") {
  RunConfig cfg;
  cfg.n_cells = 8;
  cfg.scheme.tau = 1.0;
  cfg.scheme.newton_max = 1;
  cfg.scheme.fixedpoint_max = 1;
  cfg.t_final = 2.0;
  cfg.well_prepared = false;
  cfg.u1 = "1 + 0.3*cos(2*pi*x)";
  cfg.u2 = "1.2 + 0.4*sin(pi*x)";
  cfg.u3 = "0.8 + 0.2*cos(3*pi*x)";
  const auto dir = fresh_dir("fastreact_test_cli_div");
  cfg.out_dir = dir.string();

  CaptureStream out(std::cout);
  CaptureStream err(std::cerr);
  CHECK(cmd_simulate(cfg) == kExitDiverged);
  CHECK(err.text().find("solver diverged") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("check gates on the certificate") {
  RunConfig cfg;
  {
    CaptureStream out(std::cout);
    CHECK(cmd_check(cfg, 12345) == kExitOk);
    CHECK(out.text().find("CHECK PASS") != std::string::npos);
  }
  cfg.params.alpha = 0.1;
  {
    CaptureStream out(std::cout);
    CHECK(cmd_check(cfg, 12345) == kExitCheckFailed);
    CHECK(out.text().find("CHECK FAIL") != std::string::npos);
  }
}

TEST_CASE("sweep rejects a duplicate eps list") {
  RunConfig cfg;
  cfg.n_cells = 8;
  cfg.t_final = 0.001;
  const auto dir = fresh_dir("fastreact_test_cli_sweep");
  cfg.out_dir = dir.string();
  CaptureStream out(std::cout);
  CaptureStream err(std::cerr);
  CHECK(cmd_sweep(cfg, {0.1, 0.1}) == kExitConfigError);
  CHECK(err.text().find("duplicate") != std::string::npos);
  std::filesystem::remove_all(dir);
}

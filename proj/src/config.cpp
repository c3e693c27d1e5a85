#include "fastreact/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fastreact/expression.hpp"
#include "fastreact/fastlimit.hpp"

namespace fastreact {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Raw key/value store plus consumption tracking, so that every key the
/// loader never asked for can be reported as unknown.
class IniData {
 public:
  explicit IniData(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header '" + t + "'");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty())
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": empty section name");
        continue;
      }
      const size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value, got '" + t + "'");
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": key outside of any [section]");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key");
      const std::string full = section + "." + key;
      if (values_.count(full))
        throw ConfigError("config: duplicate key " + full);
      values_[full] = value;
    }
  }

  bool has(const std::string& full) const { return values_.count(full) != 0; }

  std::string get_string(const std::string& full, const std::string& dflt) {
    auto it = values_.find(full);
    if (it == values_.end()) return dflt;
    consumed_.insert(full);
    return it->second;
  }

  double get_double(const std::string& full, double dflt) {
    auto it = values_.find(full);
    if (it == values_.end()) return dflt;
    consumed_.insert(full);
    const std::string& s = it->second;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || std::isnan(v))
      throw ConfigError("config: " + full + " = '" + s + "' is not a number");
    return v;
  }

  int get_int(const std::string& full, int dflt) {
    auto it = values_.find(full);
    if (it == values_.end()) return dflt;
    consumed_.insert(full);
    const std::string& s = it->second;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
      throw ConfigError("config: " + full + " = '" + s + "' is not an integer");
    return static_cast<int>(v);
  }

  bool get_bool(const std::string& full, bool dflt) {
    auto it = values_.find(full);
    if (it == values_.end()) return dflt;
    consumed_.insert(full);
    const std::string& s = it->second;
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("config: " + full + " = '" + s +
                      "' is not a boolean (use true/false)");
  }

  void reject_unconsumed() const {
    for (const auto& [full, value] : values_) {
      (void)value;
      if (!consumed_.count(full))
        throw ConfigError("config: unknown key " + full);
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  IniData ini(text);
  RunConfig cfg;

  cfg.preset = ini.get_string("model.preset", cfg.preset);
  require(cfg.preset == "power_law" || cfg.preset == "identity",
          "config: model.preset must be power_law or identity, got '" +
              cfg.preset + "'");
  if (cfg.preset == "identity") {
    for (const char* key : {"alpha1", "alpha2", "alpha3", "delta", "beta",
                            "gamma", "alpha", "certified"})
      require(!ini.has(std::string("model.") + key),
              std::string("config: model.") + key +
                  " has no effect with preset identity");
  } else {
    cfg.params.alpha1 = ini.get_double("model.alpha1", cfg.params.alpha1);
    cfg.params.alpha2 = ini.get_double("model.alpha2", cfg.params.alpha2);
    cfg.params.alpha3 = ini.get_double("model.alpha3", cfg.params.alpha3);
    cfg.params.delta = ini.get_double("model.delta", cfg.params.delta);
    cfg.params.beta = ini.get_double("model.beta", cfg.params.beta);
    cfg.params.gamma = ini.get_double("model.gamma", cfg.params.gamma);
    cfg.params.alpha = ini.get_double("model.alpha", cfg.params.alpha);
    cfg.certified = ini.get_bool("model.certified", cfg.certified);
  }

  cfg.n_cells = ini.get_int("grid.n", cfg.n_cells);
  require(cfg.n_cells >= 3, "config: grid.n must be at least 3");
  cfg.length = ini.get_double("grid.length", cfg.length);
  require(cfg.length > 0, "config: grid.length must be positive");

  cfg.scheme.tau = ini.get_double("scheme.tau", cfg.scheme.tau);
  require(cfg.scheme.tau > 0, "config: scheme.tau must be positive");
  cfg.scheme.eta = ini.get_double("scheme.eta", cfg.scheme.eta);
  require(cfg.scheme.eta >= 0, "config: scheme.eta must be nonnegative");
  cfg.scheme.eps = ini.get_double("scheme.eps", cfg.scheme.eps);
  require(cfg.scheme.eps > 0,
          "config: scheme.eps must be positive (inf disables the reaction)");
  cfg.t_final = ini.get_double("scheme.t_final", cfg.t_final);
  require(cfg.t_final > 0, "config: scheme.t_final must be positive");
  cfg.scheme.newton_tol =
      ini.get_double("scheme.newton_tol", cfg.scheme.newton_tol);
  require(cfg.scheme.newton_tol > 0,
          "config: scheme.newton_tol must be positive");
  cfg.scheme.newton_max = ini.get_int("scheme.newton_max", cfg.scheme.newton_max);
  require(cfg.scheme.newton_max >= 1,
          "config: scheme.newton_max must be at least 1");
  cfg.scheme.strict_tau = ini.get_bool("scheme.strict_tau", cfg.scheme.strict_tau);
  cfg.scheme.fixedpoint_max =
      ini.get_int("scheme.fixedpoint_max", cfg.scheme.fixedpoint_max);
  require(cfg.scheme.fixedpoint_max >= 1,
          "config: scheme.fixedpoint_max must be at least 1");
  cfg.scheme.max_step_halvings =
      ini.get_int("scheme.max_step_halvings", cfg.scheme.max_step_halvings);
  require(cfg.scheme.max_step_halvings >= 0 && cfg.scheme.max_step_halvings <= 10,
          "config: scheme.max_step_halvings must lie in [0, 10]");
  if (cfg.scheme.strict_tau) {
    require(cfg.scheme.eta > 0,
            "config: scheme.strict_tau requires scheme.eta > 0");
    require(std::isfinite(cfg.scheme.eps),
            "config: scheme.strict_tau requires a finite scheme.eps");
    require(cfg.scheme.tau <=
                cfg.scheme.eps * cfg.scheme.eta * cfg.scheme.eta / 2.0,
            "config: scheme.strict_tau requires tau <= eps*eta^2/2");
  }

  cfg.u1 = ini.get_string("init.u1", cfg.u1);
  cfg.u2 = ini.get_string("init.u2", cfg.u2);
  cfg.u3 = ini.get_string("init.u3", cfg.u3);
  cfg.well_prepared = ini.get_bool("init.well_prepared", cfg.well_prepared);
  if (cfg.well_prepared)
    require(cfg.u1.empty(),
            "config: init.u1 conflicts with init.well_prepared = true");
  else
    require(!cfg.u1.empty(),
            "config: init.u1 is required when init.well_prepared = false");

  cfg.out_dir = ini.get_string("output.dir", cfg.out_dir);
  require(!cfg.out_dir.empty(), "config: output.dir must not be empty");
  cfg.fields_stride = ini.get_int("output.fields_stride", cfg.fields_stride);
  require(cfg.fields_stride >= 1,
          "config: output.fields_stride must be at least 1");
  cfg.monitors = ini.get_bool("output.monitors", cfg.monitors);

  ini.reject_unconsumed();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

Grid1D make_grid(const RunConfig& cfg) {
  return Grid1D(cfg.n_cells, cfg.length);
}

ModelFunctions make_model(const RunConfig& cfg) {
  if (cfg.preset == "identity") return build_identity();
  ModelFunctions funcs;
  try {
    funcs = build_power_law(cfg.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: model: ") + e.what());
  }
  if (cfg.certified) {
    const AssumptionReport report = check_power_law_certified(cfg.params);
    if (!report.pass())
      throw ConfigError(
          "config: model.certified = true rejected the parameters\n" +
          report.to_text());
  }
  return funcs;
}

State make_initial_state(const RunConfig& cfg, const Grid1D& grid,
                         const ModelFunctions& funcs) {
  const Field x = grid.centers();
  auto evaluate = [&](const std::string& source, const char* key) {
    Expression expr;
    try {
      expr = Expression::parse(source);
    } catch (const ExpressionError& e) {
      throw ConfigError(std::string("config: init.") + key + ": " + e.what());
    }
    Field values(grid.n);
    for (Eigen::Index j = 0; j < values.size(); ++j) values(j) = expr(x(j));
    if (!values.allFinite())
      throw ConfigError(std::string("config: init.") + key +
                        " evaluates to a non-finite value on the grid");
    if (!(values.minCoeff() > 0))
      throw ConfigError(std::string("config: init.") + key +
                        " must be strictly positive on the grid");
    return values;
  };

  const Field u2 = evaluate(cfg.u2, "u2");
  const Field u3 = evaluate(cfg.u3, "u3");
  if (cfg.well_prepared) return well_prepared_init(u2, u3, grid, funcs);

  State state;
  state.u = {evaluate(cfg.u1, "u1"), u2, u3};
  state.t = 0.0;
  return state;
}

}  // namespace fastreact

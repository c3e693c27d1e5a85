#pragma once

#include <string>

#include "fastreact/errors.hpp"
#include "fastreact/model.hpp"
#include "fastreact/state.hpp"
#include "fastreact/stepper.hpp"

namespace fastreact {

/// One run description, read from an INI-style file with sections
/// [model], [grid], [scheme], [init], [output].
struct RunConfig {
  // [model]
  std::string preset = "power_law";  // or "identity"
  PowerLawParams params;
  bool certified = true;  // reject parameters outside the certified family

  // [grid]
  int n_cells = 128;
  double length = 1.0;

  // [scheme]
  SchemeParams scheme;
  double t_final = 0.5;

  // [init] expressions in x
  std::string u1;  // required only when well_prepared = false
  std::string u2 = "1";
  std::string u3 = "1";
  bool well_prepared = true;

  // [output]
  std::string out_dir = "out";
  int fields_stride = 10;
  bool monitors = true;
};

/// Loads and validates a config file. Unknown sections or keys and
/// inconsistent values raise ConfigError naming the offending key.
RunConfig load_config(const std::string& path);

/// Same parser on an in-memory string.
RunConfig parse_config_text(const std::string& text);

Grid1D make_grid(const RunConfig& cfg);

/// Builds the model bundle; in certified mode power-law parameters must pass
/// check_power_law_certified or a ConfigError carries the failed inequalities.
ModelFunctions make_model(const RunConfig& cfg);

/// Evaluates the initial profiles at the cell centers; all species must come
/// out strictly positive. With well_prepared = true, u1 sits on the reaction
/// equilibrium.
State make_initial_state(const RunConfig& cfg, const Grid1D& grid,
                         const ModelFunctions& funcs);

}  // namespace fastreact

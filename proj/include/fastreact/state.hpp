#pragma once

#include <array>

#include "fastreact/grid.hpp"

namespace fastreact {

/// Three species densities at the cell centers, tagged with physical time.
struct State {
  std::array<Field, 3> u;
  double t = 0.0;
};

/// Two combined densities (v, w) of the reduced limit system.
struct PairState {
  Field v, w;
  double t = 0.0;
};

}  // namespace fastreact

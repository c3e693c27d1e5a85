#pragma once

#include <cstdint>
#include <vector>

#include "fastreact/config.hpp"

namespace fastreact {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitCheckFailed = 3;

/// Full-system run; writes fields.csv (every fields_stride-th step plus the
/// first and last) and entropy.csv (one row per step) into cfg.out_dir.
int cmd_simulate(const RunConfig& cfg);

/// Reduced-system run from the combined initial densities; same output files,
/// with the state columns holding the constraint reconstruction.
int cmd_limit(const RunConfig& cfg);

/// One full run per eps against a shared limit solve; writes sweep.csv.
int cmd_sweep(const RunConfig& cfg, const std::vector<double>& eps_list);

/// Model certificate, sampled structure checks, weak cross-diffusion
/// inequality, reaction growth report, and inversion round trips. Prints one
/// block per check; returns kExitCheckFailed if any gated check fails.
int cmd_check(const RunConfig& cfg, std::uint64_t seed);

}  // namespace fastreact

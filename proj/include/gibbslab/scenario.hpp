#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gibbslab/io.hpp"

namespace gibbslab {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitUsage = 3 };

/// Fail dominates inconclusive, which dominates pass; usage errors dominate everything.
int combine_exit(int a, int b);

const std::vector<std::string>& scenario_names();

struct ScenarioResult {
  int exit_code = kExitPass;
  /// Fully determined by the spec and seed.
  Json report;
  /// Scalars that a parameter sweep tabulates.
  Json headline = Json::object();
  /// (file name, CSV content)
  std::vector<std::pair<std::string, std::string>> tables;
  /// Aligned text rendering for the terminal.
  std::string summary;
};

/// Runs one scenario. `point` distinguishes grid points of a sweep; sampler seeds are derived
/// from (seed, point). Throws std::invalid_argument on spec errors and std::length_error on caps.
ScenarioResult run_scenario(const std::string& scenario, const Json& spec, std::uint64_t seed, std::uint64_t point = 0);

/// Spec with `param` set to `value` (beta, n, epsilon or lambda).
Json apply_sweep_parameter(const Json& spec, const std::string& param, double value);

struct SweepResult {
  int exit_code = kExitPass;
  Json report;
  std::string csv;
  std::string summary;
};

SweepResult run_sweep(const std::string& scenario, const Json& spec, const std::string& param,
                      const std::vector<double>& grid, std::uint64_t seed);

}  // namespace gibbslab

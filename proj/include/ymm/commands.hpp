#pragma once

#include "ymm/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ymm {

/// Exit codes shared by the commands and the CLI.
enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2, kPartial = 3 };

struct CommandResult {
  int exit_code = kOk;
  std::string manifest;              // path of the manifest written
  std::vector<std::string> outputs;  // names relative to the output directory
  nlohmann::json summary = nlohmann::json::object();
};

/// Seed and thread overrides from the command line.
RunConfig apply_overrides(RunConfig c, std::optional<std::uint64_t> seed, std::optional<int> threads);

/// operators.json: Kronecker terms of 4H, Q, Q^2 and the size operator.
CommandResult cmd_build(const RunConfig& c, const std::string& out);
/// Optional sweep (sweep.json, sweep.csv), then spectrum.csv and spectrum.json.
/// Unconverged pairs still produce output, with exit code kPartial.
CommandResult cmd_spectrum(const RunConfig& c, const std::string& out);
/// fit.json for both modes plus regge.svg, chew_frautschi.svg and sizes.svg.
CommandResult cmd_fit(const RunConfig& c, const std::string& out);
/// equilibration.json, haar.json, trajectory_d<d>.csv and .svg per window size.
CommandResult cmd_equilibrate(const RunConfig& c, const std::string& out);
/// oracle.json and oracle.csv.
CommandResult cmd_oracle(const RunConfig& c, const std::string& out);

}  // namespace ymm

#pragma once

#include "ymm/eigensolve.hpp"
#include "ymm/model.hpp"
#include "ymm/regge.hpp"
#include "ymm/spectrum.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ymm {

/// Invalid or unknown configuration field; the message starts with the dotted field path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SweepConfig {
  std::vector<std::pair<int, int>> levels;  // (h0, l0), empty skips the sweep
  int k = 2;
  double stability_tol = 1e-4;
};

struct SpectrumConfig {
  ClassifyOptions classify;
  double degenerate_rel = 0.05;
  bool store_eigenvectors = false;
};

struct FitConfig {
  FitRegion region;
  ReggeOptions options;
  std::string spectrum;  // input records; empty reads <out>/spectrum.csv
};

struct EquilibrationConfig {
  int q = 0;
  int n_start = 0;
  std::vector<int> sizes{2, 3, 4, 5, 6, 7, 8};  // d_Delta per window, from n_start
  int samples = 10000;            // grid points for finite-horizon averages
  double horizon_factor = 1e4;    // T = horizon_factor / min gap
  int trajectory_samples = 1000;
  double trajectory_periods = 1.0;  // trajectory horizon in units of 2 pi / min gap
  int haar_samples = 100000;
  double slack = 0.1;
  double E_floor = 0.0;  // gap-law check starts here
  bool subsystem = true;
  int subsystem_h0 = 4;
  int subsystem_l0 = 4;
  int subsystem_first = 24;  // initial state: uniform over eigenvectors [first, first + count)
  int subsystem_count = 16;
  std::string spectrum;
};

struct OracleConfig {
  std::vector<int> cutoffs{4, 6, 8};
  int k = 5;
  double rel_tol = 0.05;
  std::string spectrum;  // reduced records; empty solves the model section
};

struct RunConfig {
  ModelSpec model = make_model_spec(32, 40);
  EigenRequest solver;
  SweepConfig sweep;
  SpectrumConfig spectrum;
  FitConfig fit;
  EquilibrationConfig equilibration;
  OracleConfig oracle;
  std::uint64_t seed = 1;
  int threads = 1;

  /// Throws ConfigError naming the field.
  void validate() const;
  /// Copies seed and threads into the solver request.
  EigenRequest request() const;
};

/// Missing fields keep their defaults; unknown fields are errors.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Every field, defaults included.
nlohmann::json to_json(const RunConfig& c);

std::string to_string(SolverMode m);
SolverMode solver_mode_from_string(const std::string& s);
std::string to_string(ChargeConvention c);
ChargeConvention charge_convention_from_string(const std::string& s);

}  // namespace ymm

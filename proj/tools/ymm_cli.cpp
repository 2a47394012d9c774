#include "ymm/commands.hpp"
#include "ymm/io.hpp"

#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectrum, Regge fits and equilibration checks for the reduced two-particle model"};
  app.set_version_flag("--version", std::string(ymm::kToolVersion));
  app.require_subcommand(1);

  struct Options {
    std::string config, out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
  };
  std::map<std::string, Options> opts;
  using Command = std::function<ymm::CommandResult(const ymm::RunConfig&, const std::string&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands = {
      {"build", {"Assemble operators and write their Kronecker snapshots", ymm::cmd_build}},
      {"spectrum", {"Sweep, solve, classify charges and write spectrum.csv", ymm::cmd_spectrum}},
      {"fit", {"Regge fits (alpha free and alpha = 2) with SVG plots", ymm::cmd_fit}},
      {"equilibrate", {"Haar statistics, window trajectories and subsystem check", ymm::cmd_equilibrate}},
      {"oracle", {"Cross-check against the six-oscillator construction", ymm::cmd_oracle}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    Options& o = opts[name];
    sub->add_option("--config", o.config, "JSON run configuration (defaults when omitted)");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "RNG seed (overrides the config)");
    sub->add_option("--threads", o.threads, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, entry] : commands) {
    if (!app.got_subcommand(name)) continue;
    const Options& o = opts[name];
    try {
      ymm::RunConfig cfg = o.config.empty() ? ymm::parse_config(nlohmann::json::object()) : ymm::load_config(o.config);
      cfg = ymm::apply_overrides(cfg, o.seed, o.threads);
      const ymm::CommandResult r = entry.second(cfg, o.out);
      std::cout << r.summary.dump() << "\n";
      for (const std::string& f : r.outputs) std::cout << "wrote " << f << "\n";
      std::cout << "manifest " << r.manifest << "\n";
      return r.exit_code;
    } catch (const ymm::ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return ymm::kConfigError;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return ymm::kRuntimeError;
    }
  }
  return ymm::kRuntimeError;
}

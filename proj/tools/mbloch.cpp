// mbloch: run, convert, verify and refine Maxwell-Bloch chain experiments.
//
//   mbloch <mode> --config <path> [--out <dir>] [--seed <u64>]
//   mbloch verify [--only 1,5] [--quiet]
//   mbloch converge --config <path> [--levels 3]
//
// Exit codes: 0 ok, 1 property failure, 2 config error, 3 numerical blow-up.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mbloch/config.hpp"
#include "mbloch/run.hpp"
#include "mbloch/verify.hpp"

namespace {

using mbloch::ConfigError;
using mbloch::Mode;
using mbloch::RunConfig;

/// Loads the config file; the subcommand supplies the mode when the file
/// has none and must agree with it otherwise.
RunConfig load_for_mode(const std::string& path, Mode mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("parse error in '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  if (!j.contains("mode")) {
    j["mode"] = mbloch::to_string(mode);
  } else if (j["mode"] != mbloch::to_string(mode)) {
    throw ConfigError(fmt::format("config mode '{}' does not match subcommand '{}'",
                                  j["mode"].dump(), mbloch::to_string(mode)));
  }
  return mbloch::config_from_json(j);
}

int report_config_error(const ConfigError& e) {
  std::cerr << "config error: " << e.what() << '\n';
  return mbloch::kExitConfigError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maxwell-Bloch chain simulator and verification suite"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mbloch::version_string());

  struct RunOptions {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
  };
  std::vector<std::pair<Mode, CLI::App*>> run_commands;
  RunOptions run_opts;
  const std::vector<std::pair<Mode, const char*>> modes{
      {Mode::kChain, "group-form chain on the loop"},
      {Mode::kFields, "scalar (E, P, D) field form"},
      {Mode::kNeumann, "spatially constant C. Neumann oscillator"},
      {Mode::kReduced, "reduced Bloch-sphere system with a sech pulse"},
      {Mode::kSineGordon, "SO(2) sine-Gordon embedding"},
      {Mode::kConvert, "fields -> group -> fields round trip"}};
  for (const auto& [mode, help] : modes) {
    CLI::App* sub = app.add_subcommand(mbloch::to_string(mode), help);
    sub->add_option("--config", run_opts.config, "JSON run configuration")->required();
    sub->add_option("--out", run_opts.out, "output directory (overrides the config)");
    sub->add_option("--seed", run_opts.seed, "RNG seed (overrides the config)");
    run_commands.emplace_back(mode, sub);
  }

  std::vector<int> only;
  bool quiet = false;
  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
  verify->add_option("--only", only, "criterion ids to run")->delimiter(',');
  verify->add_flag("--quiet", quiet, "one line per criterion");

  std::string converge_config;
  int levels = 3;
  CLI::App* converge = app.add_subcommand("converge", "refinement study of a configured run");
  converge->add_option("--config", converge_config, "JSON run configuration")->required();
  converge->add_option("--levels", levels, "number of refinement levels (>= 3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mbloch::kExitConfigError;
  }

  try {
    if (verify->parsed()) {
      const auto results = mbloch::run_acceptance(only);
      std::cout << mbloch::format_results(results, !quiet);
      for (const auto& r : results) {
        if (!r.pass) return mbloch::kExitPropertyFailure;
      }
      return mbloch::kExitOk;
    }
    if (converge->parsed()) {
      const RunConfig cfg = mbloch::load_config(converge_config);
      std::cout << mbloch::format_table(mbloch::convergence_study(cfg, levels));
      return mbloch::kExitOk;
    }
    for (const auto& [mode, sub] : run_commands) {
      if (!sub->parsed()) continue;
      RunConfig cfg = load_for_mode(run_opts.config, mode);
      if (run_opts.out) cfg.out = *run_opts.out;
      if (run_opts.seed) cfg.seed = *run_opts.seed;
      const mbloch::RunOutcome outcome = mbloch::run(cfg);
      if (!outcome.message.empty()) {
        (outcome.exit_code == mbloch::kExitOk ? std::cout : std::cerr) << outcome.message << '\n';
      }
      if (outcome.exit_code == mbloch::kExitOk) {
        std::cout << "wrote " << outcome.out_dir.string() << '\n';
      }
      return outcome.exit_code;
    }
  } catch (const ConfigError& e) {
    return report_config_error(e);
  } catch (const mbloch::NumericalBlowup& e) {
    std::cerr << fmt::format("numerical blow-up: {} (last good time {:.17g})\n", e.what(),
                             e.last_good_time());
    return mbloch::kExitBlowup;
  }
  return mbloch::kExitConfigError;
}

#pragma once

// Run configuration: JSON file <-> RunConfig, with validation.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbloch/dynamics.hpp"

namespace mbloch {

enum class Mode { kChain, kFields, kNeumann, kReduced, kSineGordon, kVerify, kConvert };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::vector<std::string> violations = {})
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

struct ChiProbeSpec {
  double x0 = 0.0;               // position on [0, 2 pi), snapped to the nearest node
  std::vector<double> xi{1.0};   // coefficients in the tau torus frame
};

struct ProbeConfig {
  int xi_loops = 5;  // seeded random loops in the tau torus
  std::vector<ChiProbeSpec> chi;
  std::vector<std::vector<double>> eta;  // coefficients in the sigma torus frame
};

struct RunConfig {
  Mode mode = Mode::kChain;
  int n = 2;
  int N = 64;
  double cfl = 0.25;
  std::optional<double> dt;
  double T = 1.0;
  int deriv_order = 4;
  int reunit_every = 1;
  BetaMode beta_mode = BetaMode::kSkew;
  double c = 1.0;
  double beta = 0.0;
  std::string preset;
  nlohmann::json preset_params = nlohmann::json::object();
  ProbeConfig probes;
  std::vector<double> z{0.5, 1.0, 2.0};
  std::string out = "mbloch_out";
  std::string input;
  std::uint64_t seed = 0;
  std::optional<int> sample_every;
  bool snapshots = false;
  bool renormalize = false;

  DerivOrder stencil() const { return deriv_order_from_int(deriv_order); }
};

/// Parses and validates. Unknown keys and every violated constraint are
/// reported together in one ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Every field, including filled-in defaults.
nlohmann::json to_json(const RunConfig& cfg);

/// Violations of the mode-specific requirements (empty when valid).
std::vector<std::string> validate(const RunConfig& cfg);
/// Throws ConfigError listing every violation found by validate().
void require_valid(const RunConfig& cfg);

}  // namespace mbloch

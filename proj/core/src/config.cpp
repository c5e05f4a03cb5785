#include "mbloch/config.hpp"

#include <algorithm>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace mbloch {
namespace {

[[noreturn]] void throw_invalid(std::vector<std::string> errors) {
  std::ostringstream msg;
  msg << "invalid configuration:";
  for (const auto& e : errors) msg << "\n  - " << e;
  throw ConfigError(msg.str(), std::move(errors));
}

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "mode",  "n",      "N",          "cfl",         "dt",     "T",        "derivOrder",
      "reunitEvery", "betaMode", "c", "beta",        "preset", "presetParams", "probes",
      "z",     "out",    "input",      "seed",        "sampleEvery", "snapshots", "renormalize"};
  return keys;
}

const std::set<std::string>& known_probe_keys() {
  static const std::set<std::string> keys{"xiLoops", "chi", "eta"};
  return keys;
}

std::vector<std::string> presets_for(Mode m) {
  switch (m) {
    case Mode::kChain:
      return {"torus_flow", "random_smooth", "fields_gaussian", "sg_kink", "neumann_generic"};
    case Mode::kFields:
      return {"fields_gaussian"};
    case Mode::kNeumann:
      return {"neumann_generic", "torus_flow"};
    case Mode::kReduced:
      return {"sit_pulse"};
    case Mode::kSineGordon:
      return {"sg_kink"};
    case Mode::kConvert:
      return {"fields_gaussian"};
    case Mode::kVerify:
      return {};
  }
  return {};
}

std::string default_preset(Mode m) {
  switch (m) {
    case Mode::kReduced:
      return "sit_pulse";
    case Mode::kConvert:
    case Mode::kFields:
      return "fields_gaussian";
    case Mode::kSineGordon:
      return "sg_kink";
    default:
      return "";
  }
}

/// Reads j[key] into `out` when present; type errors become violations.
template <class T>
void read(const json& j, const char* key, T& out, std::vector<std::string>& errors) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    errors.push_back(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::kChain:
      return "chain";
    case Mode::kFields:
      return "fields";
    case Mode::kNeumann:
      return "neumann";
    case Mode::kReduced:
      return "reduced";
    case Mode::kSineGordon:
      return "sinegordon";
    case Mode::kVerify:
      return "verify";
    case Mode::kConvert:
      return "convert";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::kChain, Mode::kFields, Mode::kNeumann, Mode::kReduced, Mode::kSineGordon,
                 Mode::kVerify, Mode::kConvert}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown mode '" + s + "'");
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> v;
  const bool needs_horizon = cfg.mode != Mode::kVerify && cfg.mode != Mode::kConvert;
  if (needs_horizon && !(cfg.T > 0.0)) v.push_back("T > 0 required (got " + std::to_string(cfg.T) + ")");
  if (cfg.N < 8) v.push_back("N ≥ 8 required (got " + std::to_string(cfg.N) + ")");
  if (cfg.N % 2 != 0) v.push_back("N must be even (got " + std::to_string(cfg.N) + ")");
  if (cfg.n < 2 || cfg.n > kMaxDim) {
    v.push_back("n must lie in [2, " + std::to_string(kMaxDim) + "] (got " + std::to_string(cfg.n) + ")");
  }
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0)) v.push_back("cfl must lie in (0, 1]");
  if (cfg.dt && !(*cfg.dt > 0.0)) v.push_back("dt must be positive");
  if (cfg.deriv_order != 2 && cfg.deriv_order != 4) v.push_back("derivOrder must be 2 or 4");
  if (cfg.reunit_every < 1) v.push_back("reunitEvery must be >= 1");
  if (cfg.sample_every && *cfg.sample_every < 1) v.push_back("sampleEvery must be >= 1");
  for (double z : cfg.z) {
    if (z == 0.0) v.push_back("z values must be nonzero");
  }
  if (cfg.probes.xi_loops < 0) v.push_back("probes.xiLoops must be >= 0");
  for (const auto& e : cfg.probes.eta) {
    if (static_cast<int>(e.size()) > cfg.n - 1) v.push_back("probes.eta entry has too many coefficients");
  }
  for (const auto& p : cfg.probes.chi) {
    if (static_cast<int>(p.xi.size()) > cfg.n - 1) v.push_back("probes.chi xi has too many coefficients");
  }
  if (cfg.mode != Mode::kVerify) {
    const auto allowed = presets_for(cfg.mode);
    if (cfg.preset.empty()) {
      v.push_back("preset is required for mode " + to_string(cfg.mode));
    } else if (std::find(allowed.begin(), allowed.end(), cfg.preset) == allowed.end()) {
      v.push_back("preset '" + cfg.preset + "' is not available for mode " + to_string(cfg.mode));
    }
  }
  const bool su2_only = cfg.mode == Mode::kFields || cfg.mode == Mode::kSineGordon ||
                        cfg.mode == Mode::kConvert || cfg.preset == "fields_gaussian" ||
                        cfg.preset == "sg_kink";
  if (su2_only && cfg.n != 2) v.push_back("mode/preset requires n = 2");
  if (!cfg.preset_params.is_object()) v.push_back("presetParams must be an object");
  return v;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  std::vector<std::string> errors;
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().contains(key)) errors.push_back("unknown key '" + key + "'");
  }

  RunConfig cfg;
  if (!j.contains("mode")) {
    errors.push_back("field 'mode' is required");
  } else {
    try {
      cfg.mode = mode_from_string(j.at("mode").get<std::string>());
    } catch (const std::exception& e) {
      errors.push_back(std::string("field 'mode': ") + e.what());
    }
  }
  const bool needs_horizon = cfg.mode != Mode::kVerify && cfg.mode != Mode::kConvert;
  if (needs_horizon && !j.contains("T") && cfg.mode != Mode::kReduced) {
    errors.push_back("field 'T' is required for mode " + to_string(cfg.mode));
  }
  if (cfg.mode == Mode::kReduced) cfg.T = 40.0;

  read(j, "n", cfg.n, errors);
  read(j, "N", cfg.N, errors);
  read(j, "cfl", cfg.cfl, errors);
  if (j.contains("dt") && !j.at("dt").is_null()) {
    double dt = 0.0;
    read(j, "dt", dt, errors);
    cfg.dt = dt;
  }
  read(j, "T", cfg.T, errors);
  read(j, "derivOrder", cfg.deriv_order, errors);
  read(j, "reunitEvery", cfg.reunit_every, errors);
  if (j.contains("betaMode")) {
    std::string bm;
    read(j, "betaMode", bm, errors);
    if (bm == "skew") {
      cfg.beta_mode = BetaMode::kSkew;
    } else if (bm == "damping") {
      cfg.beta_mode = BetaMode::kDamping;
    } else {
      errors.push_back("field 'betaMode': expected 'skew' or 'damping', got '" + bm + "'");
    }
  }
  read(j, "c", cfg.c, errors);
  read(j, "beta", cfg.beta, errors);
  cfg.preset = default_preset(cfg.mode);
  read(j, "preset", cfg.preset, errors);
  if (j.contains("presetParams")) cfg.preset_params = j.at("presetParams");
  read(j, "z", cfg.z, errors);
  read(j, "out", cfg.out, errors);
  read(j, "input", cfg.input, errors);
  read(j, "seed", cfg.seed, errors);
  if (j.contains("sampleEvery") && !j.at("sampleEvery").is_null()) {
    int se = 0;
    read(j, "sampleEvery", se, errors);
    cfg.sample_every = se;
  }
  read(j, "snapshots", cfg.snapshots, errors);
  read(j, "renormalize", cfg.renormalize, errors);

  if (j.contains("probes")) {
    const json& pj = j.at("probes");
    if (!pj.is_object()) {
      errors.push_back("field 'probes' must be an object");
    } else {
      for (const auto& [key, _] : pj.items()) {
        if (!known_probe_keys().contains(key)) errors.push_back("unknown key 'probes." + key + "'");
      }
      read(pj, "xiLoops", cfg.probes.xi_loops, errors);
      read(pj, "eta", cfg.probes.eta, errors);
      if (pj.contains("chi")) {
        if (!pj.at("chi").is_array()) {
          errors.push_back("field 'probes.chi' must be an array");
        } else {
          for (const auto& cj : pj.at("chi")) {
            ChiProbeSpec spec;
            if (!cj.is_object()) {
              errors.push_back("probes.chi entries must be objects {x0, xi}");
              continue;
            }
            for (const auto& [key, _] : cj.items()) {
              if (key != "x0" && key != "xi") errors.push_back("unknown key 'probes.chi." + key + "'");
            }
            read(cj, "x0", spec.x0, errors);
            read(cj, "xi", spec.xi, errors);
            cfg.probes.chi.push_back(spec);
          }
        }
      }
    }
  }
  if (!j.contains("probes") || !j.at("probes").contains("chi")) {
    for (int k : {1, 3, 5, 7}) cfg.probes.chi.push_back({k * std::numbers::pi / 4.0, {1.0}});
  }
  if (cfg.probes.eta.empty()) cfg.probes.eta.push_back({1.0});

  auto more = validate(cfg);
  errors.insert(errors.end(), more.begin(), more.end());
  if (!errors.empty()) throw_invalid(std::move(errors));
  return cfg;
}

void require_valid(const RunConfig& cfg) {
  if (auto errors = validate(cfg); !errors.empty()) throw_invalid(std::move(errors));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["mode"] = to_string(cfg.mode);
  j["n"] = cfg.n;
  j["N"] = cfg.N;
  j["cfl"] = cfg.cfl;
  j["dt"] = cfg.dt ? json(*cfg.dt) : json(nullptr);
  j["T"] = cfg.T;
  j["derivOrder"] = cfg.deriv_order;
  j["reunitEvery"] = cfg.reunit_every;
  j["betaMode"] = cfg.beta_mode == BetaMode::kSkew ? "skew" : "damping";
  j["c"] = cfg.c;
  j["beta"] = cfg.beta;
  j["preset"] = cfg.preset;
  j["presetParams"] = cfg.preset_params;
  json chi = json::array();
  for (const auto& p : cfg.probes.chi) chi.push_back({{"x0", p.x0}, {"xi", p.xi}});
  j["probes"] = {{"xiLoops", cfg.probes.xi_loops}, {"chi", chi}, {"eta", cfg.probes.eta}};
  j["z"] = cfg.z;
  j["out"] = cfg.out;
  j["input"] = cfg.input;
  j["seed"] = cfg.seed;
  j["sampleEvery"] = cfg.sample_every ? json(*cfg.sample_every) : json(nullptr);
  j["snapshots"] = cfg.snapshots;
  j["renormalize"] = cfg.renormalize;
  return j;
}

}  // namespace mbloch

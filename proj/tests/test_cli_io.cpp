#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mbloch/config.hpp"
#include "mbloch/run.hpp"
#include "support.hpp"

namespace mbloch {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() /
            ("mbloch_test_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string violation_text(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, MinimalChainDefaults) {
  const RunConfig cfg = config_from_json(json{{"mode", "chain"}, {"T", 1.0}, {"preset", "torus_flow"}});
  EXPECT_EQ(cfg.mode, Mode::kChain);
  EXPECT_EQ(cfg.n, 2);
  EXPECT_EQ(cfg.N, 64);
  EXPECT_EQ(cfg.deriv_order, 4);
  EXPECT_EQ(cfg.reunit_every, 1);
  EXPECT_DOUBLE_EQ(cfg.c, 1.0);
  EXPECT_FALSE(cfg.dt.has_value());
  EXPECT_EQ(cfg.z, (std::vector<double>{0.5, 1.0, 2.0}));
  EXPECT_EQ(cfg.probes.chi.size(), 4u);
  EXPECT_EQ(cfg.probes.eta.size(), 1u);
}

TEST(Config, ModeDefaults) {
  const RunConfig reduced = config_from_json(json{{"mode", "reduced"}});
  EXPECT_EQ(reduced.preset, "sit_pulse");
  EXPECT_DOUBLE_EQ(reduced.T, 40.0);
  EXPECT_EQ(config_from_json(json{{"mode", "sinegordon"}, {"T", 1}}).preset, "sg_kink");
  EXPECT_EQ(config_from_json(json{{"mode", "convert"}}).preset, "fields_gaussian");
}

TEST(Config, SmallGridIsRejectedWithReason) {
  const std::string msg =
      violation_text(json{{"mode", "chain"}, {"T", 1.0}, {"preset", "torus_flow"}, {"N", 4}});
  EXPECT_NE(msg.find("N ≥ 8"), std::string::npos) << msg;
}

TEST(Config, EveryViolationIsListed) {
  try {
    config_from_json(json{{"mode", "chain"},
                          {"T", -1.0},
                          {"preset", "torus_flow"},
                          {"N", 9},
                          {"cfl", 2.0},
                          {"derivOrder", 3}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_GE(e.violations().size(), 4u);
  }
}

TEST(Config, UnknownKeysAreNamed) {
  EXPECT_NE(violation_text(json{{"mode", "chain"}, {"T", 1.0}, {"gamma", 2.0}}).find("gamma"),
            std::string::npos);
  const std::string nested = violation_text(
      json{{"mode", "chain"}, {"T", 1.0}, {"probes", {{"chi", {{{"x0", 1.0}, {"bogus", 1}}}}}}});
  EXPECT_NE(nested.find("probes.chi.bogus"), std::string::npos) << nested;
}

TEST(Config, MissingModeAndHorizon) {
  EXPECT_FALSE(violation_text(json{{"T", 1.0}}).empty());
  EXPECT_FALSE(violation_text(json{{"mode", "chain"}}).empty());
}

TEST(Config, PresetMustSuitMode) {
  EXPECT_FALSE(violation_text(json{{"mode", "fields"}, {"T", 1.0}, {"preset", "torus_flow"}}).empty());
  EXPECT_FALSE(violation_text(json{{"mode", "fields"}, {"T", 1.0}, {"n", 3}}).empty());
}

TEST(Config, ParseErrorNamesFile) {
  TempDir dir("parse");
  const fs::path p = dir.path() / "broken.json";
  std::ofstream(p) << "{\"mode\": \"chain\", ";
  try {
    load_config(p.string());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("parse error"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("broken.json"), std::string::npos);
  }
}

TEST(Config, JsonEchoRoundTrips) {
  const RunConfig cfg = config_from_json(
      json{{"mode", "chain"}, {"T", 2.5}, {"preset", "random_smooth"}, {"n", 3}, {"seed", 17}, {"dt", 0.01}});
  const RunConfig again = config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(again), to_json(cfg));
  EXPECT_EQ(again.seed, 17u);
  EXPECT_DOUBLE_EQ(*again.dt, 0.01);
}

RunConfig torus_config(const fs::path& out) {
  RunConfig cfg = config_from_json(json{{"mode", "chain"},
                                        {"T", 2.0},
                                        {"N", 16},
                                        {"dt", 0.01},
                                        {"preset", "torus_flow"},
                                        {"presetParams", {{"mu", {0.7}}}}});
  cfg.out = out.string();
  return cfg;
}

TEST(Run, ManifestIsComplete) {
  TempDir dir("manifest");
  RunConfig cfg = torus_config(dir.path());
  cfg.snapshots = true;
  const RunOutcome r = run(cfg);
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  const json m = json::parse(slurp(dir.path() / "manifest.json"));
  for (const char* key : {"version", "config", "resolved", "exitCode", "summary", "message"}) {
    EXPECT_TRUE(m.contains(key)) << key;
  }
  EXPECT_EQ(m["exitCode"], 0);
  EXPECT_DOUBLE_EQ(m["resolved"]["dt"].get<double>(), 0.01);
  EXPECT_EQ(m["resolved"]["steps"], 200);
  EXPECT_EQ(m["config"], to_json(cfg));
  EXPECT_TRUE(fs::exists(dir.path() / "series.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "snapshot_initial.json"));
  EXPECT_TRUE(fs::exists(dir.path() / "snapshot_final.json"));
}

TEST(Run, TorusFlowFinalStateAndDrifts) {
  const RunConfig cfg = torus_config("unused");
  const ChainRun r = simulate_chain(cfg);
  const AlgebraElement mu = TorusFrame::diagonal(2).combine(std::vector<double>{0.7});
  const Matrix expected = testing::series_exp(2.0 * mu.matrix());
  for (const auto& g : r.final.state.g.values) {
    EXPECT_LE(testing::max_abs(g.matrix() - expected), 1e-8);
  }
  for (const auto& [name, err] : series_errors(r.series)) {
    if (name == "t") continue;
    EXPECT_LE(err, 1e-8) << name;
  }
}

TEST(Run, CsvIsDeterministic) {
  RunConfig cfg = config_from_json(
      json{{"mode", "chain"}, {"T", 0.5}, {"N", 16}, {"preset", "random_smooth"}, {"seed", 4}});
  const std::string a = to_csv(simulate_chain(cfg).series);
  const std::string b = to_csv(simulate_chain(cfg).series);
  EXPECT_EQ(a, b);
  cfg.seed = 5;
  EXPECT_NE(a, to_csv(simulate_chain(cfg).series));
  EXPECT_EQ(a.substr(0, a.find('\n')).substr(0, 9), "t,energy,");
}

TEST(Run, ConvertModeRoundTrip) {
  TempDir dir("convert");
  RunConfig cfg = config_from_json(json{{"mode", "convert"}, {"beta", 0.3}});
  cfg.out = dir.path().string();
  const RunOutcome r = run(cfg);
  EXPECT_EQ(r.exit_code, kExitOk) << r.message;
  EXPECT_TRUE(fs::exists(dir.path() / "group_snapshot.json"));
  const FieldState back = field_state_from_json(json::parse(slurp(dir.path() / "fields_roundtrip.json")));
  EXPECT_NEAR(back.beta, 0.3, 1e-10);
}

TEST(Run, SnapshotFieldsRoundTrip) {
  RunConfig cfg = config_from_json(json{{"mode", "convert"}, {"beta", -0.2}});
  const FieldRun f = simulate_fields(config_from_json(json{{"mode", "fields"}, {"T", 0.1}, {"N", 16}}));
  const FieldState back = field_state_from_json(snapshot_json(f.final));
  for (int j = 0; j < f.final.grid().size(); ++j) {
    EXPECT_EQ(back.E[j], f.final.E[j]);
    EXPECT_EQ(back.P[j], f.final.P[j]);
    EXPECT_EQ(back.D[j], f.final.D[j]);
  }
  const ConvertResult c = convert_fields(back, 1.0);
  EXPECT_LE(c.residual, 1e-10);
}

TEST(Run, BlowupMapsToExitCode) {
  TempDir dir("blowup");
  RunConfig cfg = config_from_json(json{
      {"mode", "chain"}, {"T", 500.0}, {"N", 64}, {"dt", 50.0}, {"preset", "random_smooth"}});
  cfg.out = dir.path().string();
  const RunOutcome r = run(cfg);
  EXPECT_EQ(r.exit_code, kExitBlowup);
  const json m = json::parse(slurp(dir.path() / "manifest.json"));
  EXPECT_EQ(m["exitCode"], kExitBlowup);
}

TEST(Run, InvalidConfigMapsToExitCode) {
  TempDir dir("invalid");
  RunConfig cfg = torus_config(dir.path());
  cfg.N = 4;
  EXPECT_EQ(run(cfg).exit_code, kExitConfigError);
}

TEST(Run, ReducedSeriesStaysOnSphere) {
  const ReducedRun r = simulate_reduced(config_from_json(json{{"mode", "reduced"}}));
  for (const auto& [name, err] : series_errors(r.series)) {
    if (name == "norm_dev") EXPECT_LE(err, 1e-9);
  }
  EXPECT_NEAR(r.final.u.u3, -1.0, 1e-6);
}

TEST(SuccessiveOrders, Log2Ratios) {
  const auto o = successive_orders({1.0, 0.25, 1.0 / 64.0});
  ASSERT_EQ(o.size(), 2u);
  EXPECT_DOUBLE_EQ(o[0], 2.0);
  EXPECT_DOUBLE_EQ(o[1], 4.0);
  EXPECT_TRUE(successive_orders({1.0}).empty());
}

TEST(ConvergenceStudy, EnergyAndLaxOrders) {
  const RunConfig cfg = config_from_json(
      json{{"mode", "chain"}, {"T", 1.0}, {"N", 32}, {"preset", "random_smooth"}, {"seed", 3}});
  const ConvergenceTable t = convergence_study(cfg, 3);
  EXPECT_EQ(t.grid_sizes, (std::vector<int>{32, 64, 128}));
  bool saw_energy = false, saw_lax = false;
  for (const auto& row : t.rows) {
    if (row.quantity == "energy") {
      saw_energy = true;
      for (double o : row.orders) EXPECT_GE(o, 3.5);
    }
    if (row.quantity.rfind("lax", 0) == 0) {
      saw_lax = true;
      for (double o : row.orders) EXPECT_GE(o, 1.8) << row.quantity;
    }
  }
  EXPECT_TRUE(saw_energy);
  EXPECT_TRUE(saw_lax);
  EXPECT_THROW(convergence_study(cfg, 2), std::exception);
}

TEST(DefaultSampleEvery, ThousandRows) {
  EXPECT_EQ(default_sample_every(10), 1);
  EXPECT_EQ(default_sample_every(1000), 1);
  EXPECT_EQ(default_sample_every(5999), 5);
}

}  // namespace
}  // namespace mbloch

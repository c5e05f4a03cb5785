#pragma once

// Run driver: dispatches a RunConfig to the steppers, samples diagnostics
// into a fixed-schema series and writes series.csv, manifest.json and
// optional JSON snapshots.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbloch/config.hpp"
#include "mbloch/diagnostics.hpp"
#include "mbloch/presets.hpp"

namespace mbloch {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitBlowup = 3;

std::string version_string();

/// Column names plus rows of doubles; one row per sample time.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> values(const std::string& name) const;
};

/// Header line, then rows with every double at 17 significant digits.
std::string to_csv(const Series& s);

/// Default sampling cadence max(1, floor(steps / 1000)).
int default_sample_every(std::int64_t steps);

// Per-mode simulations that return their series in memory. `grid_n` and
// `dt` override the configured resolution (used by refinement studies);
// `on_state` observes every step of chain-type runs.

struct ChainRun {
  Series series;
  ChainSetup final;
  double dt = 0.0;
  std::int64_t steps = 0;
};
using ChainObserver = std::function<void(const ChainState&, const ModelParams&)>;

ChainRun simulate_chain(const RunConfig& cfg, std::optional<int> grid_n = {},
                        std::optional<double> dt = {}, const ChainObserver& on_state = {});

struct FieldRun {
  Series series;
  FieldState final;
  ModelParams params;
  double dt = 0.0;
};
FieldRun simulate_fields(const RunConfig& cfg, std::optional<int> grid_n = {},
                         std::optional<double> dt = {});

struct NeumannRun {
  Series series;
  NeumannState final;
  double dt = 0.0;
};
NeumannRun simulate_neumann(const RunConfig& cfg, std::optional<double> dt = {});

struct ReducedRun {
  Series series;
  ReducedState initial;
  ReducedState final;
  double dt = 0.0;
};
ReducedRun simulate_reduced(const RunConfig& cfg, std::optional<double> dt = {});

struct ConvertResult {
  FieldState input;
  GroupForm group;
  FieldState back;
  double residual = 0.0;   // max over nodes of |dE| + |dP| + |dD|, plus |d beta|
  double beta_max_dev = 0.0;
};
ConvertResult convert_fields(const FieldState& f, double c);

/// Resolved dt for a chain-type run: the configured dt or cfl_dt, fitted to T.
double resolved_chain_dt(const RunConfig& cfg, const ModelParams& p);
/// Same for the C. Neumann ODE: the potential branch of cfl_dt.
double resolved_neumann_dt(const RunConfig& cfg, const ModelParams& p);

// Snapshot JSON: complex numbers as [re, im], matrices as row-major nested lists.
nlohmann::json snapshot_json(const ChainState& s, const ModelParams& p);
nlohmann::json snapshot_json(const FieldState& f);
FieldState field_state_from_json(const nlohmann::json& j);

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::filesystem::path out_dir;
  nlohmann::json summary = nlohmann::json::object();
};

/// Runs one configured experiment and writes its artifacts to cfg.out.
/// Numerical blow-up is reported through the exit code, not thrown.
RunOutcome run(const RunConfig& cfg);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// ---------------------------------------------------------------------------
// Refinement studies

struct OrderRow {
  std::string quantity;
  std::vector<double> errors;  // one per level
  std::vector<double> orders;  // log2(e_k / e_{k+1})
  bool monotone = true;
};

struct ConvergenceTable {
  std::vector<int> grid_sizes;
  std::vector<double> dts;
  std::vector<OrderRow> rows;
};

/// Per-column error measure of a series: drift max_t |q(t) - q(0)| /
/// max(|q(0)|, 1) for conserved columns, max_t |q| for the residual and
/// deviation columns (beta_dev, casimir_dev, unitarity_dev, lax[..],
/// norm_dev, off_subgroup, bloch_dev).
std::vector<std::pair<std::string, double>> series_errors(const Series& s);

/// Runs the configured experiment at (N 2^k, dt / 2^k), k = 0..levels-1,
/// levels >= 3. Levels run concurrently up to MBLOCH_THREADS (default 1).
ConvergenceTable convergence_study(const RunConfig& cfg, int levels);

std::string format_table(const ConvergenceTable& t);

/// log2 ratios of successive entries.
std::vector<double> successive_orders(const std::vector<double>& errors);

/// MBLOCH_THREADS, at least 1.
int max_threads();

}  // namespace mbloch

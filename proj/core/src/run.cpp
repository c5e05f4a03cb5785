#include "mbloch/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "mbloch/verify.hpp"

#ifndef MBLOCH_VERSION
#define MBLOCH_VERSION "0.0.0"
#endif

namespace mbloch {

using nlohmann::json;

std::string version_string() { return MBLOCH_VERSION; }

int Series::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<double> Series::values(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw std::out_of_range("series has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(c)]);
  return out;
}

std::string to_csv(const Series& s) {
  std::string out;
  for (std::size_t k = 0; k < s.columns.size(); ++k) {
    if (k) out += ',';
    out += s.columns[k];
  }
  out += '\n';
  for (const auto& row : s.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += fmt::format("{:.17g}", row[k]);
    }
    out += '\n';
  }
  return out;
}

int default_sample_every(std::int64_t steps) {
  return static_cast<int>(std::max<std::int64_t>(1, steps / 1000));
}

double resolved_chain_dt(const RunConfig& cfg, const ModelParams& p) {
  const double dt_max = cfg.dt.value_or(cfl_dt(p, p.grid(), cfg.cfl));
  return fit_step(cfg.T, dt_max);
}

double resolved_neumann_dt(const RunConfig& cfg, const ModelParams& p) {
  ModelParams still = p;
  still.c = 0.0;
  return fit_step(cfg.T, cfg.dt.value_or(cfl_dt(still, p.grid(), cfg.cfl)));
}

namespace {

std::int64_t step_count(double horizon, double dt) {
  return std::max<std::int64_t>(1, std::llround(horizon / dt));
}

std::vector<std::string> chain_columns(const DiagnosticProbes& probes, bool sine_gordon) {
  std::vector<std::string> cols{"t",           "energy",       "beta_mean",
                                "beta_dev",    "casimir_dev",  "unitarity_dev"};
  for (std::size_t k = 0; k < probes.xi_loops.size(); ++k) cols.push_back(fmt::format("G[{}]", k));
  for (std::size_t k = 0; k < probes.chi_nodes.size(); ++k) cols.push_back(fmt::format("chi[{}]", k));
  for (std::size_t k = 0; k < probes.etas.size(); ++k) cols.push_back(fmt::format("J[{}]", k));
  for (double z : probes.z_values) cols.push_back(fmt::format("lax[z={}]", z));
  if (sine_gordon) cols.push_back("off_subgroup");
  return cols;
}

std::vector<double> flatten(const DiagnosticRecord& r) {
  std::vector<double> row{r.t, r.energy, r.beta_mean, r.beta_dev, r.casimir_dev, r.unitarity_dev};
  row.insert(row.end(), r.G.begin(), r.G.end());
  row.insert(row.end(), r.chi.begin(), r.chi.end());
  row.insert(row.end(), r.J.begin(), r.J.end());
  row.insert(row.end(), r.lax.begin(), r.lax.end());
  return row;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("complex value must be [re, im]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> field_bloch_radius(const FieldState& f) {
  std::vector<double> r(static_cast<std::size_t>(f.grid().size()));
  for (int j = 0; j < f.grid().size(); ++j) r[j] = f.D[j] * f.D[j] + std::norm(f.P[j]);
  return r;
}

std::vector<double> field_row(const FieldState& f, const std::vector<double>& r0) {
  double e_max = 0.0, p_max = 0.0, d_min = std::numeric_limits<double>::infinity(), dev = 0.0;
  for (int j = 0; j < f.grid().size(); ++j) {
    e_max = std::max(e_max, std::abs(f.E[j]));
    p_max = std::max(p_max, std::abs(f.P[j]));
    d_min = std::min(d_min, f.D[j]);
    dev = std::max(dev, std::abs(f.D[j] * f.D[j] + std::norm(f.P[j]) - r0[j]));
  }
  return {f.t, e_max, p_max, d_min, dev};
}

bool finite_fields(const FieldState& f) {
  for (int j = 0; j < f.grid().size(); ++j) {
    if (!std::isfinite(f.E[j].real()) || !std::isfinite(f.E[j].imag()) ||
        !std::isfinite(f.P[j].real()) || !std::isfinite(f.P[j].imag()) || !std::isfinite(f.D[j])) {
      return false;
    }
  }
  return true;
}

}  // namespace

ChainRun simulate_chain(const RunConfig& cfg, std::optional<int> grid_n, std::optional<double> dt,
                        const ChainObserver& on_state) {
  const PeriodicGrid grid(grid_n.value_or(cfg.N));
  ChainRun out;
  out.final = make_chain_setup(cfg, grid);
  ChainState& state = out.final.state;
  const ModelParams& p = out.final.params;
  p.validate(false);
  const DiagnosticProbes probes = make_probes(cfg, p);
  out.dt = dt.value_or(resolved_chain_dt(cfg, p));
  out.steps = step_count(cfg.T, out.dt);
  const StepControl ctl{out.dt, cfg.cfl, cfg.reunit_every, cfg.stencil()};
  const int every = cfg.sample_every.value_or(default_sample_every(out.steps));
  const bool sg = cfg.mode == Mode::kSineGordon;
  out.series.columns = chain_columns(probes, sg);

  auto record = [&](const ChainState* other, const ChainState& cur) {
    std::vector<double> row = flatten(record_diagnostics(other, cur, p, probes, ctl.deriv_order));
    if (sg) row.push_back(off_subgroup_defect(cur));
    out.series.rows.push_back(std::move(row));
  };

  if (on_state) on_state(state, p);
  {
    const ChainState ahead = rk4_step(state, p, ctl);
    record(&ahead, state);
  }
  for (std::int64_t k = 1; k <= out.steps; ++k) {
    ChainState prev = std::move(state);
    state = rk4_step(prev, p, ctl);
    if (on_state) on_state(state, p);
    if (k % every == 0 || k == out.steps) record(&prev, state);
  }
  return out;
}

FieldRun simulate_fields(const RunConfig& cfg, std::optional<int> grid_n, std::optional<double> dt) {
  const PeriodicGrid grid(grid_n.value_or(cfg.N));
  FieldRun out;
  out.final = make_field_state(cfg, grid);
  // Same model and step size as the equivalent group-form run.
  RunConfig as_chain = cfg;
  as_chain.mode = Mode::kChain;
  out.params = make_chain_setup(as_chain, grid).params;
  out.dt = dt.value_or(resolved_chain_dt(cfg, out.params));
  const std::int64_t steps = step_count(cfg.T, out.dt);
  const int every = cfg.sample_every.value_or(default_sample_every(steps));
  const std::vector<double> r0 = field_bloch_radius(out.final);
  out.series.columns = {"t", "e_max", "p_max", "d_min", "bloch_dev"};
  out.series.rows.push_back(field_row(out.final, r0));
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double last = out.final.t;
    out.final = fields_step(out.final, out.params, out.dt, cfg.stencil());
    if (!finite_fields(out.final)) throw NumericalBlowup("fields: non-finite values", last);
    if (k % every == 0 || k == steps) out.series.rows.push_back(field_row(out.final, r0));
  }
  return out;
}

NeumannRun simulate_neumann(const RunConfig& cfg, std::optional<double> dt) {
  const PeriodicGrid grid(8);
  ChainSetup setup = make_chain_setup(cfg, grid);
  const NeumannParams np = neumann_params(setup.params);
  const DiagnosticProbes probes = make_probes(cfg, setup.params);
  NeumannRun out;
  out.dt = dt.value_or(resolved_neumann_dt(cfg, setup.params));
  const std::int64_t steps = step_count(cfg.T, out.dt);
  const int every = cfg.sample_every.value_or(default_sample_every(steps));
  out.series.columns = {"t", "energy", "unitarity_dev"};
  for (std::size_t k = 0; k < probes.chi_xi.size(); ++k) out.series.columns.push_back(fmt::format("chi[{}]", k));
  for (std::size_t k = 0; k < probes.etas.size(); ++k) out.series.columns.push_back(fmt::format("J[{}]", k));
  out.final = {0.0, setup.state.g[0], setup.state.m[0]};
  auto record = [&](const NeumannState& s) {
    std::vector<double> row{s.t, neumann_energy(s, np), unitarity_defect(s.g.matrix())};
    const AlgebraElement body = adjoint_conj(s.g.inverse(), s.m);
    for (const auto& xi : probes.chi_xi) row.push_back(inner(body, xi));
    for (const auto& eta : probes.etas) row.push_back(inner(s.m, eta));
    out.series.rows.push_back(std::move(row));
  };
  record(out.final);
  for (std::int64_t k = 1; k <= steps; ++k) {
    out.final = neumann_step(out.final, np, out.dt);
    if (k % every == 0 || k == steps) record(out.final);
  }
  return out;
}

ReducedRun simulate_reduced(const RunConfig& cfg, std::optional<double> dt) {
  const ReducedSetup setup = make_reduced_setup(cfg);
  ReducedRun out;
  out.initial = setup.state;
  out.final = setup.state;
  out.dt = fit_step(cfg.T, dt.value_or(setup.dt));
  const std::int64_t steps = step_count(cfg.T, out.dt);
  const int every = cfg.sample_every.value_or(default_sample_every(steps));
  const double n0 = setup.state.u.norm();
  out.series.columns = {"t", "u1", "u2", "u3", "norm_dev", "hamiltonian", "drive"};
  auto record = [&](const ReducedState& s) {
    out.series.rows.push_back({s.t, s.u.u1, s.u.u2, s.u.u3, std::abs(s.u.norm() - n0),
                               reduced_hamiltonian(s.u, s.t, setup.drive),
                               sech_drive(s.t, setup.drive)});
  };
  record(out.final);
  for (std::int64_t k = 1; k <= steps; ++k) {
    out.final = reduced_step(out.final, setup.drive, out.dt, cfg.renormalize);
    if (k % every == 0 || k == steps) record(out.final);
  }
  return out;
}

ConvertResult convert_fields(const FieldState& f, double c) {
  ConvertResult r;
  r.input = f;
  ModelParams base;
  base.n = 2;
  base.c = c;
  base.tau_frame = TorusFrame::diagonal(2);
  base.sigma_frame = TorusFrame::diagonal(2);
  r.group = init_from_fields(f, base);
  ExtractedFields back = extract_fields(r.group.state, r.group.params);
  r.back = back.fields;
  r.back.beta_mode = f.beta_mode;
  r.beta_max_dev = back.beta_max_dev;
  double worst = 0.0;
  for (int j = 0; j < f.grid().size(); ++j) {
    worst = std::max(worst, std::abs(r.back.E[j] - f.E[j]) + std::abs(r.back.P[j] - f.P[j]) +
                                std::abs(r.back.D[j] - f.D[j]));
  }
  r.residual = worst + std::abs(r.back.beta - f.beta);
  return r;
}

json snapshot_json(const ChainState& s, const ModelParams& p) {
  json g = json::array(), m = json::array(), tau = json::array();
  for (int j = 0; j < s.grid().size(); ++j) {
    g.push_back(matrix_json(s.g[j].matrix()));
    m.push_back(matrix_json(s.m[j].matrix()));
    tau.push_back(matrix_json(p.tau[j].matrix()));
  }
  return {{"kind", "chain"}, {"t", s.t},     {"step", s.step}, {"N", s.grid().size()},
          {"n", p.n},        {"c", p.c},     {"sigma", matrix_json(p.sigma.matrix())},
          {"tau", tau},      {"g", g},       {"m", m}};
}

json snapshot_json(const FieldState& f) {
  json E = json::array(), P = json::array(), D = json::array();
  for (int j = 0; j < f.grid().size(); ++j) {
    E.push_back(complex_json(f.E[j]));
    P.push_back(complex_json(f.P[j]));
    D.push_back(f.D[j]);
  }
  return {{"kind", "fields"},
          {"t", f.t},
          {"N", f.grid().size()},
          {"beta", f.beta},
          {"betaMode", f.beta_mode == BetaMode::kSkew ? "skew" : "damping"},
          {"E", E},
          {"P", P},
          {"D", D}};
}

FieldState field_state_from_json(const json& j) {
  try {
    const auto& E = j.at("E");
    const auto& P = j.at("P");
    const auto& D = j.at("D");
    if (E.size() != P.size() || E.size() != D.size()) {
      throw ConfigError("fields input: E, P and D must have equal length");
    }
    const PeriodicGrid grid(static_cast<int>(E.size()));
    FieldState f;
    f.t = j.value("t", 0.0);
    f.beta = j.value("beta", 0.0);
    const std::string mode = j.value("betaMode", std::string("skew"));
    if (mode != "skew" && mode != "damping") throw ConfigError("fields input: bad betaMode");
    f.beta_mode = mode == "skew" ? BetaMode::kSkew : BetaMode::kDamping;
    std::vector<Complex> e, p;
    std::vector<double> d;
    for (std::size_t k = 0; k < E.size(); ++k) {
      e.push_back(complex_from_json(E[k]));
      p.push_back(complex_from_json(P[k]));
      d.push_back(D[k].get<double>());
    }
    f.E = LoopField<Complex>(grid, std::move(e));
    f.P = LoopField<Complex>(grid, std::move(p));
    f.D = LoopField<double>(grid, std::move(d));
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fields input: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fields input: ") + e.what());
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

RunOutcome run(const RunConfig& cfg) {
  RunOutcome outcome;
  outcome.out_dir = cfg.out;
  json manifest{{"version", version_string()}, {"config", to_json(cfg)}};
  json resolved = json::object();
  try {
    require_valid(cfg);
    std::filesystem::create_directories(outcome.out_dir);
    auto dir = [&](const char* name) { return outcome.out_dir / name; };
    switch (cfg.mode) {
      case Mode::kChain:
      case Mode::kSineGordon: {
        ChainState initial;
        ModelParams params;
        ChainRun r = simulate_chain(cfg, {}, {}, [&](const ChainState& s, const ModelParams& p) {
          if (s.step == 0 && cfg.snapshots) {
            initial = s;
            params = p;
          }
        });
        resolved = {{"dt", r.dt}, {"steps", r.steps},
                    {"sampleEvery", cfg.sample_every.value_or(default_sample_every(r.steps))}};
        write_atomic(dir("series.csv"), to_csv(r.series));
        if (cfg.snapshots) {
          write_atomic(dir("snapshot_initial.json"), snapshot_json(initial, params).dump());
          write_atomic(dir("snapshot_final.json"),
                       snapshot_json(r.final.state, r.final.params).dump());
        }
        if (cfg.mode == Mode::kSineGordon) {
          const SineGordonFields sg = sine_gordon_extract(r.final.state);
          outcome.summary["phi_final"] = sg.phi.values;
        }
        outcome.summary["final_t"] = r.final.state.t;
        break;
      }
      case Mode::kFields: {
        FieldRun r = simulate_fields(cfg);
        const std::int64_t steps = step_count(cfg.T, r.dt);
        resolved = {{"dt", r.dt}, {"steps", steps},
                    {"sampleEvery", cfg.sample_every.value_or(default_sample_every(steps))}};
        write_atomic(dir("series.csv"), to_csv(r.series));
        if (cfg.snapshots) write_atomic(dir("snapshot_final.json"), snapshot_json(r.final).dump());
        outcome.summary["final_t"] = r.final.t;
        break;
      }
      case Mode::kNeumann: {
        NeumannRun r = simulate_neumann(cfg);
        const std::int64_t steps = step_count(cfg.T, r.dt);
        resolved = {{"dt", r.dt}, {"steps", steps},
                    {"sampleEvery", cfg.sample_every.value_or(default_sample_every(steps))}};
        write_atomic(dir("series.csv"), to_csv(r.series));
        const auto energy = r.series.values("energy");
        outcome.summary["energy_drift"] =
            std::abs(energy.back() - energy.front()) / std::max(std::abs(energy.front()), 1.0);
        if (cfg.snapshots) {
          write_atomic(dir("snapshot_final.json"),
                       json{{"kind", "neumann"},
                            {"t", r.final.t},
                            {"g", matrix_json(r.final.g.matrix())},
                            {"m", matrix_json(r.final.m.matrix())}}
                           .dump());
        }
        break;
      }
      case Mode::kReduced: {
        ReducedRun r = simulate_reduced(cfg);
        const std::int64_t steps = step_count(cfg.T, r.dt);
        resolved = {{"dt", r.dt}, {"steps", steps},
                    {"sampleEvery", cfg.sample_every.value_or(default_sample_every(steps))},
                    {"t0", r.initial.t}};
        write_atomic(dir("series.csv"), to_csv(r.series));
        const BlochVector& a = r.initial.u;
        const BlochVector& b = r.final.u;
        outcome.summary["return_error"] =
            std::sqrt((a.u1 - b.u1) * (a.u1 - b.u1) + (a.u2 - b.u2) * (a.u2 - b.u2) +
                      (a.u3 - b.u3) * (a.u3 - b.u3));
        outcome.summary["pulse_area"] =
            pulse_area(r.initial.t, r.final.t, make_reduced_setup(cfg).drive);
        outcome.summary["final_u"] = {b.u1, b.u2, b.u3};
        break;
      }
      case Mode::kConvert: {
        FieldState input;
        if (!cfg.input.empty()) {
          std::ifstream in(cfg.input);
          if (!in) throw ConfigError("cannot open input '" + cfg.input + "'");
          json j;
          try {
            j = json::parse(in);
          } catch (const json::parse_error& e) {
            throw ConfigError("parse error in '" + cfg.input + "': " + e.what());
          }
          input = field_state_from_json(j);
        } else {
          input = make_field_state(cfg, PeriodicGrid(cfg.N));
        }
        const ConvertResult r = convert_fields(input, cfg.c);
        write_atomic(dir("group_snapshot.json"),
                     snapshot_json(r.group.state, r.group.params).dump());
        write_atomic(dir("fields_roundtrip.json"), snapshot_json(r.back).dump());
        outcome.summary["residual"] = r.residual;
        outcome.summary["beta_max_dev"] = r.beta_max_dev;
        if (!(r.residual <= 1e-10)) {
          outcome.exit_code = kExitPropertyFailure;
          outcome.message = fmt::format("round-trip residual {:.3e} exceeds 1e-10", r.residual);
        } else {
          outcome.message = fmt::format("round-trip residual {:.3e}", r.residual);
        }
        break;
      }
      case Mode::kVerify: {
        const auto results = run_acceptance();
        json rows = json::array();
        bool ok = true;
        for (const auto& c : results) {
          rows.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
          ok = ok && c.pass;
        }
        outcome.summary["criteria"] = rows;
        outcome.message = format_results(results);
        if (!ok) outcome.exit_code = kExitPropertyFailure;
        break;
      }
    }
  } catch (const NumericalBlowup& e) {
    outcome.exit_code = kExitBlowup;
    outcome.message = fmt::format("numerical blow-up: {} (last good time {:.17g})", e.what(),
                                  e.last_good_time());
    outcome.summary["last_good_time"] = e.last_good_time();
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = e.what();
  } catch (const DegeneratePointError& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = e.what();
  }
  manifest["resolved"] = resolved;
  manifest["exitCode"] = outcome.exit_code;
  manifest["summary"] = outcome.summary;
  manifest["message"] = outcome.message;
  try {
    std::filesystem::create_directories(outcome.out_dir);
    write_atomic(outcome.out_dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    if (outcome.exit_code == kExitOk) outcome.exit_code = kExitPropertyFailure;
    outcome.message += std::string(outcome.message.empty() ? "" : "; ") + e.what();
  }
  return outcome;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, double>> series_errors(const Series& s) {
  static const std::vector<std::string> residual_cols{
      "beta_dev", "casimir_dev", "unitarity_dev", "norm_dev", "off_subgroup", "bloch_dev"};
  static const std::vector<std::string> skipped{"t",           "u1",   "u2",    "u3",
                                                "hamiltonian", "drive", "e_max", "p_max",
                                                "d_min"};
  std::vector<std::pair<std::string, double>> out;
  if (s.rows.empty()) return out;
  for (std::size_t c = 0; c < s.columns.size(); ++c) {
    const std::string& name = s.columns[c];
    if (std::find(skipped.begin(), skipped.end(), name) != skipped.end()) continue;
    const bool residual = name.rfind("lax[", 0) == 0 ||
                          std::find(residual_cols.begin(), residual_cols.end(), name) !=
                              residual_cols.end();
    double e = 0.0;
    const double q0 = s.rows.front()[c];
    for (const auto& row : s.rows) {
      e = std::max(e, residual ? std::abs(row[c]) : std::abs(row[c] - q0));
    }
    if (!residual) e /= std::max(std::abs(q0), 1.0);
    out.emplace_back(name, e);
  }
  return out;
}

std::vector<double> successive_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    if (errors[k + 1] == 0.0) {
      orders.push_back(errors[k] == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::numeric_limits<double>::infinity());
    } else {
      orders.push_back(std::log2(errors[k] / errors[k + 1]));
    }
  }
  return orders;
}

int max_threads() {
  const char* env = std::getenv("MBLOCH_THREADS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

ConvergenceTable convergence_study(const RunConfig& cfg, int levels) {
  if (levels < 3) throw ConfigError("convergence study needs at least 3 refinement levels");
  if (cfg.mode == Mode::kVerify || cfg.mode == Mode::kConvert) {
    throw ConfigError("convergence study is not defined for mode " + to_string(cfg.mode));
  }
  ConvergenceTable table;
  double dt0 = 0.0;
  std::int64_t steps0 = 0;
  const bool gridded = cfg.mode == Mode::kChain || cfg.mode == Mode::kSineGordon ||
                       cfg.mode == Mode::kFields;
  if (gridded) {
    RunConfig as_chain = cfg;
    if (cfg.mode == Mode::kFields) as_chain.mode = Mode::kChain;
    dt0 = resolved_chain_dt(cfg, make_chain_setup(as_chain, PeriodicGrid(cfg.N)).params);
  } else if (cfg.mode == Mode::kNeumann) {
    dt0 = resolved_neumann_dt(cfg, make_chain_setup(cfg, PeriodicGrid(8)).params);
  } else {
    dt0 = fit_step(cfg.T, make_reduced_setup(cfg).dt);
  }
  steps0 = step_count(cfg.T, dt0);
  const int every0 = cfg.sample_every.value_or(default_sample_every(steps0));

  auto level = [&](int k) -> Series {
    RunConfig c = cfg;
    c.sample_every = every0 << k;
    const double dt = dt0 / static_cast<double>(1 << k);
    const int n = cfg.N << k;
    switch (cfg.mode) {
      case Mode::kChain:
      case Mode::kSineGordon:
        return simulate_chain(c, n, dt).series;
      case Mode::kFields:
        return simulate_fields(c, n, dt).series;
      case Mode::kNeumann:
        return simulate_neumann(c, dt).series;
      default:
        return simulate_reduced(c, dt).series;
    }
  };

  std::vector<Series> results(static_cast<std::size_t>(levels));
  const int threads = max_threads();
  for (int start = 0; start < levels; start += threads) {
    std::vector<std::future<Series>> jobs;
    for (int k = start; k < std::min(levels, start + threads); ++k) {
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, level, k));
    }
    for (int k = start; k < std::min(levels, start + threads); ++k) {
      results[static_cast<std::size_t>(k)] = jobs[static_cast<std::size_t>(k - start)].get();
    }
  }

  for (int k = 0; k < levels; ++k) {
    table.grid_sizes.push_back(gridded ? cfg.N << k : 0);
    table.dts.push_back(dt0 / static_cast<double>(1 << k));
  }
  const auto base = series_errors(results[0]);
  for (std::size_t q = 0; q < base.size(); ++q) {
    OrderRow row;
    row.quantity = base[q].first;
    for (const auto& r : results) row.errors.push_back(series_errors(r)[q].second);
    row.orders = successive_orders(row.errors);
    for (std::size_t k = 0; k + 1 < row.errors.size(); ++k) {
      if (!(row.errors[k + 1] < row.errors[k])) row.monotone = false;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_table(const ConvergenceTable& t) {
  std::string out = fmt::format("{:<16}", "quantity");
  for (std::size_t k = 0; k < t.dts.size(); ++k) {
    out += t.grid_sizes[k] > 0 ? fmt::format(" {:>12}", fmt::format("N={}", t.grid_sizes[k]))
                               : fmt::format(" {:>12}", fmt::format("dt={:.2e}", t.dts[k]));
  }
  out += "  orders\n";
  for (const auto& row : t.rows) {
    out += fmt::format("{:<16}", row.quantity);
    for (double e : row.errors) out += fmt::format(" {:>12.3e}", e);
    out += " ";
    for (double o : row.orders) out += fmt::format(" {:6.2f}", o);
    if (!row.monotone) out += "  (non-monotone)";
    out += '\n';
  }
  return out;
}

}  // namespace mbloch

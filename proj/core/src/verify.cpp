#include "mbloch/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "mbloch/random.hpp"
#include "mbloch/run.hpp"

namespace mbloch {
namespace {

constexpr double kPi = std::numbers::pi;

class Checks {
 public:
  Checks(int id, std::string name) { result_.id = id, result_.name = std::move(name); }

  void at_most(std::string what, double value, double bound) {
    add({std::move(what), value, bound, true, value <= bound});
  }
  void at_least(std::string what, double value, double bound) {
    add({std::move(what), value, bound, false, value >= bound});
  }
  void within(const std::string& what, double value, double lo, double hi) {
    at_least(what + " (low)", value, lo);
    at_most(what + " (high)", value, hi);
  }

  CriterionResult done() {
    result_.pass = !result_.checks.empty() &&
                   std::all_of(result_.checks.begin(), result_.checks.end(),
                               [](const Measurement& m) { return m.pass; });
    if (result_.detail.empty()) result_.detail = fmt::format("{} checks", result_.checks.size());
    return std::move(result_);
  }

 private:
  void add(Measurement m) {
    if (!m.pass && result_.detail.empty()) {
      result_.detail = fmt::format("{} = {:.3e} (bound {} {:.3e})", m.name, m.value,
                                   m.at_most ? "<=" : ">=", m.bound);
    }
    result_.checks.push_back(std::move(m));
  }
  CriterionResult result_;
};

RunConfig chain_config(const std::string& preset, int n_grid, double T) {
  RunConfig c;
  c.mode = Mode::kChain;
  c.preset = preset;
  c.N = n_grid;
  c.T = T;
  c.probes.chi.clear();
  for (int k : {1, 3, 5, 7}) c.probes.chi.push_back({k * kPi / 4.0, {1.0}});
  c.probes.eta = {{1.0}};
  return c;
}

double field_discrepancy(const FieldState& a, const FieldState& b) {
  double worst = 0.0;
  for (int j = 0; j < a.grid().size(); ++j) {
    worst = std::max(worst, std::abs(a.E[j] - b.E[j]) + std::abs(a.P[j] - b.P[j]) +
                                std::abs(a.D[j] - b.D[j]));
  }
  return worst;
}

double error_of(const Series& s, const std::string& column) {
  for (const auto& [name, e] : series_errors(s)) {
    if (name == column) return e;
  }
  throw std::out_of_range("no error measure for column " + column);
}

std::string order_label(const std::string& q, std::size_t k) {
  return fmt::format("{} order N{}->N{}", q, k, k + 1);
}

double max_matrix_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

CriterionResult check_formulation_equivalence() {
  Checks ck(1, "group form vs field form");
  RunConfig cfg = chain_config("fields_gaussian", 64, 2.0);
  cfg.beta = 0.0;
  const double dt0 = resolved_chain_dt(cfg, make_chain_setup(cfg, PeriodicGrid(64)).params);
  std::vector<double> errs;
  for (int k = 0; k < 3; ++k) {
    const int n = 64 << k;
    const double dt = dt0 / (1 << k);
    RunConfig c = cfg;
    c.sample_every = 1 << 30;
    const ChainRun group = simulate_chain(c, n, dt);
    RunConfig f = c;
    f.mode = Mode::kFields;
    const FieldRun fields = simulate_fields(f, n, dt);
    const FieldState extracted = extract_fields(group.final.state, group.final.params).fields;
    errs.push_back(field_discrepancy(extracted, fields.final));
  }
  const auto orders = successive_orders(errs);
  ck.at_most("discrepancy N=256", errs[2], 1e-5);
  for (std::size_t k = 0; k < orders.size(); ++k) {
    ck.at_least(order_label("discrepancy", k), orders[k], 4.0 - 0.4);
  }
  return ck.done();
}

CriterionResult check_conservation() {
  Checks ck(2, "conservation of energy, G, chi, J");
  RunConfig cfg = chain_config("random_smooth", 64, 5.0);
  cfg.seed = 3;
  cfg.cfl = 0.25;
  const double dt0 = resolved_chain_dt(cfg, make_chain_setup(cfg, PeriodicGrid(64)).params);
  const int every0 = 4;
  std::vector<Series> levels;
  for (int k = 0; k < 4; ++k) {
    RunConfig c = cfg;
    c.sample_every = every0 << k;
    levels.push_back(simulate_chain(c, 64 << k, dt0 / (1 << k)).series);
  }
  std::vector<std::string> quantities{"energy"};
  for (int k = 0; k < 5; ++k) quantities.push_back(fmt::format("G[{}]", k));
  for (int k = 0; k < 4; ++k) quantities.push_back(fmt::format("chi[{}]", k));
  for (const auto& q : quantities) {
    std::vector<double> errs;
    for (const auto& s : levels) errs.push_back(error_of(s, q));
    ck.at_most(q + " drift N=128", errs[1], 1e-4);
    const auto orders = successive_orders(errs);
    for (std::size_t k = 0; k < orders.size(); ++k) ck.within(order_label(q, k), orders[k], 3.6, 4.4);
  }
  // J is linear in m and the scheme preserves linear invariants exactly: its
  // drift sits at the roundoff floor at every resolution.
  for (std::size_t k = 0; k < levels.size(); ++k) {
    ck.at_most(fmt::format("J[0] drift N={}", 64 << k), error_of(levels[k], "J[0]"), 1e-12);
  }
  return ck.done();
}

CriterionResult check_beta_constraint() {
  Checks ck(3, "beta constraint");
  for (double beta : {0.3, -0.7}) {
    RunConfig cfg = chain_config("fields_gaussian", 64, 2.0);
    cfg.beta = beta;
    cfg.sample_every = 1;
    const ChainRun r = simulate_chain(cfg);
    const auto dev = r.series.values("beta_dev");
    const auto mean = r.series.values("beta_mean");
    double mean_err = 0.0;
    for (double m : mean) mean_err = std::max(mean_err, std::abs(m - beta));
    ck.at_most(fmt::format("max beta_dev (beta={})", beta), *std::max_element(dev.begin(), dev.end()), 1e-8);
    ck.at_most(fmt::format("max |beta_mean - beta| (beta={})", beta), mean_err, 1e-8);
  }
  Rng rng(2024);
  for (int n = 2; n <= kMaxDim; ++n) {
    const AlgebraElement sigma = default_sigma(n);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const AlgebraElement x = random_algebra(rng, n, 1.0);
      worst = std::max(worst, std::abs(inner(bracket(sigma, x), sigma)));
    }
    ck.at_most(fmt::format("max |inner([sigma,X],sigma)| n={}", n), worst, 1e-14);
  }
  return ck.done();
}

CriterionResult check_casimir() {
  Checks ck(4, "Casimir and unitarity over 1e4 steps");
  RunConfig cfg = chain_config("random_smooth", 32, 1.0);
  cfg.seed = 5;
  cfg.reunit_every = 1;
  const ModelParams p = make_chain_setup(cfg, PeriodicGrid(32)).params;
  const double dt = cfl_dt(p, p.grid(), cfg.cfl);
  cfg.dt = dt;
  cfg.T = 1e4 * dt;
  cfg.sample_every = 1 << 30;
  double casimir = 0.0, unitarity = 0.0;
  std::int64_t steps = 0;
  simulate_chain(cfg, {}, dt, [&](const ChainState& s, const ModelParams& mp) {
    const auto prof = casimir_profile(s, mp);
    casimir = std::max(casimir, *std::max_element(prof.values.begin(), prof.values.end()));
    unitarity = std::max(unitarity, unitarity_dev(s));
    steps = s.step;
  });
  ck.at_least("steps taken", static_cast<double>(steps), 1e4);
  ck.at_most("max casimir_dev", casimir, 1e-10);
  ck.at_most("max unitarity_dev", unitarity, 1e-10);
  return ck.done();
}

CriterionResult check_lax_pair() {
  Checks ck(5, "zero-curvature residual");
  {
    RunConfig cfg = chain_config("torus_flow", 64, 1.0);
    cfg.sample_every = 1;
    const ChainRun r = simulate_chain(cfg);
    for (double z : cfg.z) {
      const auto v = r.series.values(fmt::format("lax[z={}]", z));
      ck.at_most(fmt::format("torus_flow max lax z={}", z), *std::max_element(v.begin(), v.end()), 1e-10);
    }
  }
  RunConfig cfg = chain_config("random_smooth", 64, 1.0);
  cfg.seed = 9;
  const double dt0 = resolved_chain_dt(cfg, make_chain_setup(cfg, PeriodicGrid(64)).params);
  std::vector<std::vector<double>> errs(cfg.z.size());
  for (int k = 0; k < 3; ++k) {
    RunConfig c = cfg;
    c.sample_every = 2 << k;
    const Series s = simulate_chain(c, 64 << k, dt0 / (1 << k)).series;
    for (std::size_t q = 0; q < cfg.z.size(); ++q) {
      errs[q].push_back(error_of(s, fmt::format("lax[z={}]", cfg.z[q])));
    }
  }
  for (std::size_t q = 0; q < cfg.z.size(); ++q) {
    const auto orders = successive_orders(errs[q]);
    for (std::size_t k = 0; k < orders.size(); ++k) {
      ck.at_least(order_label(fmt::format("random_smooth lax z={}", cfg.z[q]), k), orders[k], 1.8);
    }
  }
  return ck.done();
}

CriterionResult check_potential_spectrum() {
  Checks ck(6, "potential spectrum");
  Rng rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    Matrix t(2, 2);
    t << Complex(0.0, a), Complex(b, c), Complex(-b, c), Complex(0.0, -a);
    const auto ev = potential_spectrum(AlgebraElement::from_matrix(t));
    const double r = 2.0 * std::sqrt(a * a + b * b + c * c);
    const std::array<double, 4> expect{-r, -r, r, r};
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(ev[i] - expect[i]));
  }
  ck.at_most("max |eigenvalue - (+-2|tau|)|", worst, 1e-10);
  Matrix diag(2, 2);
  diag << Complex(0.0, 1.0), 0.0, 0.0, Complex(0.0, -1.0);
  const auto ev = potential_spectrum(AlgebraElement::from_matrix(diag));
  ck.at_most("tau = diag(i,-i) spectrum error",
             std::max({std::abs(ev[0] + 2), std::abs(ev[1] + 2), std::abs(ev[2] - 2), std::abs(ev[3] - 2)}),
             1e-12);
  return ck.done();
}

CriterionResult check_neumann_limit() {
  Checks ck(7, "C. Neumann limit");
  RunConfig cfg = chain_config("neumann_generic", 16, 1.0);
  cfg.seed = 4;
  cfg.c = 1.3;
  cfg.sample_every = 1 << 30;
  const double dt = 1e-3;
  const ModelParams p0 = make_chain_setup(cfg, PeriodicGrid(16)).params;
  const NeumannParams np = neumann_params(p0);
  NeumannState ns;
  bool have = false;
  double worst = 0.0;
  simulate_chain(cfg, {}, dt, [&](const ChainState& s, const ModelParams&) {
    if (!have) {
      ns = {s.t, s.g[0], s.m[0]};
      have = true;
    } else {
      ns = neumann_step(ns, np, dt);
    }
    for (int j = 0; j < s.grid().size(); ++j) {
      worst = std::max({worst, max_matrix_diff(s.g[j].matrix(), ns.g.matrix()),
                        max_matrix_diff(s.m[j].matrix(), ns.m.matrix())});
    }
  });
  ck.at_most("max nodewise |chain - neumann|", worst, 1e-13);

  RunConfig nc = cfg;
  nc.mode = Mode::kNeumann;
  nc.T = 10.0;
  nc.dt = 1e-3;
  nc.sample_every = 10;
  const NeumannRun r = simulate_neumann(nc, 1e-3);
  const auto e = r.series.values("energy");
  double drift = 0.0;
  for (double v : e) drift = std::max(drift, std::abs(v - e.front()));
  ck.at_most("relative energy drift T=10 dt=1e-3", drift / std::abs(e.front()), 1e-8);
  return ck.done();
}

CriterionResult check_sine_gordon() {
  Checks ck(8, "sine-Gordon reduction");
  {
    const AlgebraElement sigma = default_sigma(2);
    const AlgebraElement jgen = rotation_generator();
    double worst = 0.0;
    for (int k = 0; k <= 64; ++k) {
      const double phi = -kPi + 2.0 * kPi * k / 64.0;
      const AlgebraElement f = bracket(sigma, adjoint_conj(exp_algebra(phi * jgen), sigma));
      worst = std::max(worst, (f.matrix() - kSineGordonCoupling * std::sin(2.0 * phi) * jgen.matrix())
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    ck.at_most("[sigma, Ad sigma] - 0.5 sin(2phi) J", worst, 1e-14);
  }
  RunConfig cfg = chain_config("sg_kink", 128, 5.0);
  cfg.mode = Mode::kSineGordon;
  cfg.preset_params = {{"amp", 0.5}, {"wind", 1}, {"vel", 0.2}};
  cfg.c = 1.0;
  cfg.sample_every = 1 << 30;
  double off = 0.0;
  simulate_chain(cfg, {}, {}, [&](const ChainState& s, const ModelParams&) {
    off = std::max(off, off_subgroup_defect(s));
  });
  ck.at_most("max off-subgroup defect T=5", off, 1e-9);

  // phi_tt + c phi_tx - (1/2) sin 2phi at t* = 1, phi_tt by a five-point
  // difference in time, phi_tx by the run's own stencil.
  RunConfig rc = cfg;
  rc.T = 1.5;
  const double dt0 = resolved_chain_dt(rc, make_chain_setup(rc, PeriodicGrid(64)).params);
  const std::int64_t center0 = std::llround(1.0 / dt0);
  std::vector<double> errs;
  for (int k = 0; k < 3; ++k) {
    const int n = 64 << k;
    const double dt = dt0 / (1 << k);
    const std::int64_t center = center0 << k;
    std::vector<SineGordonFields> window;
    simulate_chain(rc, n, dt, [&](const ChainState& s, const ModelParams&) {
      if (s.step >= center - 2 && s.step <= center + 2) window.push_back(sine_gordon_extract(s));
    });
    const SineGordonFields& mid = window[2];
    const auto phi_tx = deriv_x(mid.phi_t, rc.stencil());
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      const double phi_tt = (-window[4].phi_t[j] + 8.0 * window[3].phi_t[j] -
                             8.0 * window[1].phi_t[j] + window[0].phi_t[j]) /
                            (12.0 * dt);
      worst = std::max(worst, std::abs(phi_tt + rc.c * phi_tx[j] -
                                       kSineGordonCoupling * std::sin(2.0 * mid.phi[j])));
    }
    errs.push_back(worst);
  }
  const auto orders = successive_orders(errs);
  for (std::size_t k = 0; k < orders.size(); ++k) {
    ck.at_least(order_label("sine-Gordon residual", k), orders[k], 3.6);
  }
  return ck.done();
}

CriterionResult check_reduced_sphere() {
  Checks ck(9, "reduced Bloch sphere");
  Rng rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const BlochVector v{u(rng), u(rng), u(rng)};
    const DriveParams p{2.0 * u(rng), 1.0 + 0.9 * u(rng), 1.0 + 0.5 * u(rng)};
    const double t = 10.0 * u(rng);
    const BlochVector a = read_bloch(commutator_form(v, t, p));
    const BlochVector b = reduced_rhs(v, t, p);
    worst = std::max({worst, std::abs(a.u1 - b.u1), std::abs(a.u2 - b.u2), std::abs(a.u3 - b.u3)});
  }
  ck.at_most("max |[Omega, rho] - rhs|", worst, 1e-12);

  RunConfig cfg;
  cfg.mode = Mode::kReduced;
  cfg.preset = "sit_pulse";
  cfg.T = 40.0;
  cfg.sample_every = 1;
  const ReducedRun r = simulate_reduced(cfg, 1e-3);
  const auto dev = r.series.values("norm_dev");
  ck.at_most("max sphere drift, full pulse, dt = tau/1000", *std::max_element(dev.begin(), dev.end()), 1e-9);
  const BlochVector& a = r.initial.u;
  const BlochVector& b = r.final.u;
  ck.at_most("|u(T) - u(-T)| at Delta = 0",
             std::sqrt((a.u1 - b.u1) * (a.u1 - b.u1) + (a.u2 - b.u2) * (a.u2 - b.u2) +
                       (a.u3 - b.u3) * (a.u3 - b.u3)),
             1e-6);
  return ck.done();
}

CriterionResult check_round_trips() {
  Checks ck(10, "round trips and determinism");
  {
    RunConfig cfg = chain_config("fields_gaussian", 64, 1.0);
    cfg.beta = 0.3;
    ck.at_most("fields_gaussian fields->group->fields",
               convert_fields(make_field_state(cfg, PeriodicGrid(64)), 1.0).residual, 1e-10);
    Rng rng(12);
    const PeriodicGrid grid(96);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      FieldState f;
      const auto er = random_smooth_scalar(rng, grid, 4, 0.8);
      const auto ei = random_smooth_scalar(rng, grid, 4, 0.8);
      const auto pr = random_smooth_scalar(rng, grid, 4, 0.6);
      const auto pi = random_smooth_scalar(rng, grid, 4, 0.6);
      const auto d = random_smooth_scalar(rng, grid, 4, 0.5);
      f.E = sample(grid, [&](double) { return Complex(); });
      f.P = f.E;
      f.D = LoopField<double>(grid, 0.0);
      for (int j = 0; j < grid.size(); ++j) {
        f.E[j] = {er[j], ei[j]};
        f.P[j] = {pr[j], pi[j]};
        f.D[j] = (trial % 2 ? 1.0 : -1.0) + d[j];
      }
      f.beta = 0.1 * trial;
      worst = std::max(worst, convert_fields(f, 1.0).residual);
    }
    ck.at_most("random smooth fields->group->fields", worst, 1e-10);
  }
  {
    Rng rng(13);
    const PeriodicGrid grid(128);
    double worst = 0.0;
    for (int wind = -2; wind <= 2; ++wind) {
      const auto bump = random_smooth_scalar(rng, grid, 5, 3.0);
      LoopField<double> phi(grid, 0.0);
      for (int j = 0; j < grid.size(); ++j) phi[j] = bump[j] + wind * grid.node(j);
      const auto phi_t = random_smooth_scalar(rng, grid, 5, 1.0);
      const SineGordonFields back = sine_gordon_extract(sine_gordon_embed(phi, phi_t));
      for (int j = 0; j < grid.size(); ++j) {
        const double d = back.phi[j] - phi[j];
        worst = std::max({worst, std::abs(d - 2.0 * kPi * std::round(d / (2.0 * kPi))),
                          std::abs(back.phi_t[j] - phi_t[j])});
      }
    }
    ck.at_most("sine-Gordon embed/extract mod 2pi", worst, 1e-12);
  }
  {
    RunConfig cfg = chain_config("random_smooth", 32, 0.5);
    cfg.seed = 21;
    const std::string a = to_csv(simulate_chain(cfg).series);
    const std::string b = to_csv(simulate_chain(cfg).series);
    ck.at_most("in-memory CSV mismatch", a == b ? 0.0 : 1.0, 0.0);
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    const auto root = std::filesystem::temp_directory_path() / fmt::format("mbloch_det_{}", stamp);
    std::string files[2];
    for (int k = 0; k < 2; ++k) {
      RunConfig c = cfg;
      c.out = (root / std::to_string(k)).string();
      const RunOutcome o = run(c);
      std::ifstream in(std::filesystem::path(c.out) / "series.csv", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      files[k] = o.exit_code == kExitOk ? ss.str() : std::string();
    }
    std::error_code ec;
    std::filesystem::remove_all(root, ec);
    ck.at_most("series.csv byte mismatch", !files[0].empty() && files[0] == files[1] ? 0.0 : 1.0, 0.0);
  }
  return ck.done();
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& only) {
  using Fn = CriterionResult (*)();
  const Fn all[] = {check_formulation_equivalence, check_conservation, check_beta_constraint,
                    check_casimir,                 check_lax_pair,     check_potential_spectrum,
                    check_neumann_limit,           check_sine_gordon,  check_reduced_sphere,
                    check_round_trips};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    try {
      out.push_back(all[id - 1]());
    } catch (const std::exception& e) {
      CriterionResult r;
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.detail = std::string("exception: ") + e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string format_results(const std::vector<CriterionResult>& results, bool verbose) {
  std::string out;
  for (const auto& r : results) {
    out += fmt::format("{} [{}] {}: {}\n", r.pass ? "PASS" : "FAIL", r.id, r.name, r.detail);
    if (!verbose) continue;
    for (const auto& m : r.checks) {
      out += fmt::format("    {:<4} {:<52} {:>12.4e} {} {:.1e}\n", m.pass ? "ok" : "BAD", m.name,
                         m.value, m.at_most ? "<=" : ">=", m.bound);
    }
  }
  return out;
}

}  // namespace mbloch

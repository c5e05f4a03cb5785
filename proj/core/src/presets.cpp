#include "mbloch/presets.hpp"

#include <cmath>
#include <numbers>

#include "mbloch/random.hpp"

namespace mbloch {
namespace {

using nlohmann::json;

template <class T>
T param(const RunConfig& cfg, const char* key, T fallback) {
  if (!cfg.preset_params.contains(key)) return fallback;
  try {
    return cfg.preset_params.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("presetParams.") + key + ": " + e.what());
  }
}

std::vector<double> frame_coeffs(const RunConfig& cfg, const char* key,
                                 std::vector<double> fallback) {
  std::vector<double> v = param(cfg, key, std::move(fallback));
  if (static_cast<int>(v.size()) > cfg.n - 1) v.resize(static_cast<std::size_t>(cfg.n - 1));
  return v;
}

/// Seeds for the preset data and the probe loops are decoupled so that
/// adding probes never changes the initial state.
constexpr std::uint64_t kProbeStream = 0x9e3779b97f4a7c15ULL;

ModelParams constant_model(const RunConfig& cfg, const PeriodicGrid& grid,
                           const AlgebraElement& tau) {
  ModelParams p;
  p.n = cfg.n;
  p.sigma = default_sigma(cfg.n);
  p.tau = LoopField<AlgebraElement>(grid, tau);
  p.c = cfg.c;
  p.tau_frame = TorusFrame::diagonal(cfg.n);
  p.sigma_frame = TorusFrame::diagonal(cfg.n);
  return p;
}

/// Smooth periodic bump exp(w (cos(x - x0) - 1)), peak 1 at x0.
double bump(double x, double x0, double w) { return std::exp(w * (std::cos(x - x0) - 1.0)); }

}  // namespace

int nearest_node(const PeriodicGrid& grid, double x) {
  const long k = std::lround(x / grid.dx());
  const long n = grid.size();
  return static_cast<int>(((k % n) + n) % n);
}

FieldState make_field_state(const RunConfig& cfg, const PeriodicGrid& grid) {
  const double e_amp = param(cfg, "eAmp", 0.5);
  const double p_amp = param(cfg, "pAmp", 0.3);
  const double d_amp = param(cfg, "dAmp", 0.2);
  const double w = param(cfg, "width", 4.0);
  FieldState f;
  f.E = sample(grid, [&](double x) {
    return Complex(e_amp * bump(x, 2.0, w), 0.5 * e_amp * bump(x, 3.0, w));
  });
  f.P = sample(grid, [&](double x) {
    return p_amp * bump(x, 4.0, w) * std::exp(Complex(0.0, std::sin(x)));
  });
  f.D = sample(grid, [&](double x) { return -1.0 + d_amp * bump(x, 1.0, w); });
  f.beta = cfg.beta;
  f.beta_mode = cfg.beta_mode;
  return f;
}

SineGordonSetup make_sine_gordon(const RunConfig& cfg, const PeriodicGrid& grid) {
  const double amp = param(cfg, "amp", 0.5);
  const int wind = param(cfg, "wind", 0);
  const double vel = param(cfg, "vel", 0.2);
  return {sample(grid, [&](double x) { return amp * std::sin(x) + wind * x; }),
          sample(grid, [&](double x) { return vel * std::cos(x); })};
}

ChainSetup make_chain_setup(const RunConfig& cfg, const PeriodicGrid& grid) {
  const TorusFrame diag = TorusFrame::diagonal(cfg.n);
  if (cfg.preset == "torus_flow") {
    std::vector<double> mu_default(static_cast<std::size_t>(cfg.n - 1), 0.2);
    mu_default[0] = 0.7;
    const AlgebraElement mu = diag.combine(frame_coeffs(cfg, "mu", mu_default));
    AlgebraElement tau = default_sigma(cfg.n);
    if (cfg.preset_params.contains("tau")) tau = diag.combine(frame_coeffs(cfg, "tau", {}));
    ChainSetup s{{}, constant_model(cfg, grid, tau)};
    s.state.g = LoopField<GroupElement>(grid, GroupElement::identity(cfg.n));
    s.state.m = LoopField<AlgebraElement>(grid, mu);
    return s;
  }
  if (cfg.preset == "random_smooth" || cfg.preset == "neumann_generic") {
    std::vector<double> tau_default(static_cast<std::size_t>(cfg.n - 1), 0.3);
    tau_default[0] = 0.8;
    const AlgebraElement tau = diag.combine(frame_coeffs(cfg, "tau", tau_default));
    ChainSetup s{{}, constant_model(cfg, grid, tau)};
    Rng rng(cfg.seed);
    if (cfg.preset == "random_smooth") {
      const int modes = param(cfg, "modes", 3);
      const auto x = random_smooth_loop(rng, grid, cfg.n, modes, param(cfg, "gAmp", 1.0));
      const auto y = random_smooth_loop(rng, grid, cfg.n, modes, param(cfg, "mAmp", 0.5));
      std::vector<GroupElement> g;
      g.reserve(x.values.size());
      for (const auto& xj : x.values) g.push_back(exp_algebra(xj));
      s.state.g = LoopField<GroupElement>(grid, std::move(g));
      s.state.m = y;
    } else {
      const GroupElement g0 = random_group(rng, cfg.n);
      const AlgebraElement m0 = random_algebra(rng, cfg.n, param(cfg, "mScale", 0.5));
      s.state.g = LoopField<GroupElement>(grid, g0);
      s.state.m = LoopField<AlgebraElement>(grid, m0);
    }
    return s;
  }
  if (cfg.preset == "fields_gaussian") {
    ModelParams base = constant_model(cfg, grid, default_sigma(2));
    GroupForm gf = init_from_fields(make_field_state(cfg, grid), base);
    return {gf.state, gf.params};
  }
  if (cfg.preset == "sg_kink") {
    const SineGordonSetup sg = make_sine_gordon(cfg, grid);
    ChainSetup s{sine_gordon_embed(sg.phi, sg.phi_t), sine_gordon_params(grid, cfg.c)};
    return s;
  }
  throw ConfigError("preset '" + cfg.preset + "' does not produce chain data");
}

ReducedSetup make_reduced_setup(const RunConfig& cfg) {
  ReducedSetup r;
  r.drive.delta = param(cfg, "delta", 0.0);
  r.drive.k = param(cfg, "k", 1.0);
  r.drive.tau_p = param(cfg, "tauP", 1.0);
  r.drive.validate();
  const auto u0 = param(cfg, "u0", std::vector<double>{0.0, 0.0, -1.0});
  if (u0.size() != 3) throw ConfigError("presetParams.u0 must have three entries");
  r.state.u = {u0[0], u0[1], u0[2]};
  r.state.t = -20.0 * r.drive.tau_p;
  r.dt = cfg.dt.value_or(param(cfg, "dt", r.drive.tau_p / 1000.0));
  return r;
}

DiagnosticProbes make_probes(const RunConfig& cfg, const ModelParams& p) {
  DiagnosticProbes probes;
  probes.z_values = cfg.z;
  const PeriodicGrid& grid = p.grid();
  if (p.tau_is_constant(1e-14) && p.tau_frame.dim() == p.n) {
    Rng rng(cfg.seed ^ kProbeStream);
    const auto& basis = p.tau_frame.basis();
    for (int k = 0; k < cfg.probes.xi_loops; ++k) {
      LoopField<AlgebraElement> xi(grid, AlgebraElement::zero(p.n));
      for (const auto& b : basis) {
        const LoopField<double> coef = random_smooth_scalar(rng, grid, 3, 1.0);
        for (int j = 0; j < grid.size(); ++j) xi[j] += coef[j] * b;
      }
      probes.xi_loops.push_back(std::move(xi));
    }
    for (const auto& spec : cfg.probes.chi) {
      probes.chi_nodes.push_back(nearest_node(grid, spec.x0));
      probes.chi_xi.push_back(p.tau_frame.combine(spec.xi));
    }
  }
  if (p.sigma_frame.dim() == p.n) {
    for (const auto& eta : cfg.probes.eta) probes.etas.push_back(p.sigma_frame.combine(eta));
  }
  return probes;
}

}  // namespace mbloch

#include "mbloch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mbloch {
namespace {

constexpr Complex kI{0.0, 1.0};

/// One classical RK4 step for a state made of per-node (g, m) matrix pairs.
/// `rhs(g, m, gd, md)` fills the tangents. Shared by the chain and the
/// Neumann stepper so that spatially constant runs agree bit for bit.
template <class Rhs>
void rk4_matrices(std::vector<Matrix>& g, std::vector<Matrix>& m, double dt, Rhs&& rhs) {
  const std::size_t n = g.size();
  std::vector<Matrix> k1g(n), k1m(n), k2g(n), k2m(n), k3g(n), k3m(n), k4g(n), k4m(n);
  std::vector<Matrix> yg(n), ym(n);

  rhs(g, m, k1g, k1m);
  for (std::size_t j = 0; j < n; ++j) {
    yg[j] = g[j] + (0.5 * dt) * k1g[j];
    ym[j] = m[j] + (0.5 * dt) * k1m[j];
  }
  rhs(yg, ym, k2g, k2m);
  for (std::size_t j = 0; j < n; ++j) {
    yg[j] = g[j] + (0.5 * dt) * k2g[j];
    ym[j] = m[j] + (0.5 * dt) * k2m[j];
  }
  rhs(yg, ym, k3g, k3m);
  for (std::size_t j = 0; j < n; ++j) {
    yg[j] = g[j] + dt * k3g[j];
    ym[j] = m[j] + dt * k3m[j];
  }
  rhs(yg, ym, k4g, k4m);
  const double w = dt / 6.0;
  for (std::size_t j = 0; j < n; ++j) {
    g[j] += w * (k1g[j] + 2.0 * k2g[j] + 2.0 * k3g[j] + k4g[j]);
    m[j] += w * (k1m[j] + 2.0 * k2m[j] + 2.0 * k3m[j] + k4m[j]);
  }
}

void chain_tangent_raw(const std::vector<Matrix>& g, const std::vector<Matrix>& m,
                       const ModelParams& p, double dx, DerivOrder order,
                       std::vector<Matrix>& gd, std::vector<Matrix>& md) {
  const Matrix& sigma = p.sigma.matrix();
  const int n = static_cast<int>(g.size());
  for (int j = 0; j < n; ++j) {
    gd[j] = m[j] * g[j];
    md[j] = potential_force(sigma, g[j], p.tau[j].matrix()) -
            p.c * detail::centered_difference(m, j, dx, order);
  }
}

void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
  if (!(a == b)) {
    throw GridMismatch(std::string(where) + ": grid mismatch (" + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()) + ")");
  }
}

void require_su2(int n, const char* where) {
  if (n != 2) throw DimensionError(std::string(where) + " is defined for n = 2 only");
}

bool all_finite(const std::vector<Matrix>& v) {
  return std::all_of(v.begin(), v.end(), [](const Matrix& x) { return x.allFinite(); });
}

}  // namespace

bool ModelParams::tau_is_constant(double tol) const {
  for (int j = 1; j < tau.size(); ++j) {
    if ((tau[j].matrix() - tau[0].matrix()).norm() > tol) return false;
  }
  return true;
}

void ModelParams::validate(bool need_torus_tau) const {
  if (sigma.dim() != n) throw DimensionError("sigma has the wrong dimension");
  if (sigma.matrix().norm() == 0.0) throw std::invalid_argument("sigma must be nonzero");
  for (const auto& t : tau.values) {
    if (t.dim() != n) throw DimensionError("tau has the wrong dimension");
  }
  if (need_torus_tau) {
    if (!tau_is_constant(1e-14)) throw std::invalid_argument("tau must be constant in x");
    if (tau_frame.dim() != n || !tau_frame.contains(tau[0])) {
      throw std::invalid_argument("tau must lie in the tau torus frame");
    }
  }
}

AlgebraElement default_sigma(int n) {
  std::vector<double> d(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) d[static_cast<std::size_t>(k)] = 0.5 * (n - 1 - 2 * k);
  return AlgebraElement::imaginary_diagonal(d);
}

Matrix potential_force(const Matrix& sigma, const Matrix& g, const Matrix& tau) {
  const Matrix rho = g * tau * g.adjoint();
  return sigma * rho - rho * sigma;
}

ChainTangent chain_rhs(const ChainState& s, const ModelParams& p, const StepControl& ctl) {
  require_same_grid(s.grid(), p.grid(), "chain_rhs");
  require_same_grid(s.grid(), s.m.grid, "chain_rhs");
  const int n = s.grid().size();
  std::vector<Matrix> g(static_cast<std::size_t>(n)), m(g.size()), gd(g.size()), md(g.size());
  for (int j = 0; j < n; ++j) {
    g[j] = s.g[j].matrix();
    m[j] = s.m[j].matrix();
  }
  chain_tangent_raw(g, m, p, s.grid().dx(), ctl.deriv_order, gd, md);
  ChainTangent out;
  out.g_dot = std::move(gd);
  out.m_dot.reserve(md.size());
  for (auto& x : md) out.m_dot.push_back(AlgebraElement::unchecked(x));
  return out;
}

ChainState rk4_step(const ChainState& s, const ModelParams& p, const StepControl& ctl) {
  require_same_grid(s.grid(), p.grid(), "rk4_step");
  if (!(ctl.dt > 0.0) || ctl.reunit_every < 1) {
    throw std::invalid_argument("rk4_step: dt must be positive and reunit_every >= 1");
  }
  const int n = s.grid().size();
  const double dx = s.grid().dx();
  std::vector<Matrix> g(static_cast<std::size_t>(n)), m(g.size());
  for (int j = 0; j < n; ++j) {
    g[j] = s.g[j].matrix();
    m[j] = s.m[j].matrix();
  }
  rk4_matrices(g, m, ctl.dt, [&](const auto& gg, const auto& mm, auto& gd, auto& md) {
    chain_tangent_raw(gg, mm, p, dx, ctl.deriv_order, gd, md);
  });
  if (!all_finite(g) || !all_finite(m)) {
    throw NumericalBlowup("rk4_step: non-finite state", s.t);
  }

  ChainState out;
  out.t = s.t + ctl.dt;
  out.step = s.step + 1;
  const bool project = out.step % ctl.reunit_every == 0;
  std::vector<GroupElement> gv;
  std::vector<AlgebraElement> mv;
  gv.reserve(g.size());
  mv.reserve(m.size());
  for (int j = 0; j < n; ++j) {
    if (project) {
      try {
        gv.push_back(reunitarize(g[j]));
      } catch (const NumericalBlowup& e) {
        throw NumericalBlowup(std::string(e.what()) + " at node " + std::to_string(j), s.t);
      }
    } else {
      gv.push_back(GroupElement::unchecked(g[j]));
    }
    mv.push_back(AlgebraElement::unchecked(m[j]));
  }
  out.g = LoopField<GroupElement>(s.grid(), std::move(gv));
  out.m = LoopField<AlgebraElement>(s.grid(), std::move(mv));
  return out;
}

double cfl_dt(const ModelParams& p, const PeriodicGrid& grid, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
  double tau_max = 0.0;
  for (const auto& t : p.tau.values) tau_max = std::max(tau_max, norm(t));
  const double advective = cfl * grid.dx() / std::max(std::abs(p.c), 1e-12);
  const double potential_cap = cfl / (1.0 + 2.0 * norm(p.sigma) * tau_max);
  return std::min(advective, potential_cap);
}

double fit_step(double horizon, double dt_max) {
  if (!(horizon > 0.0) || !(dt_max > 0.0)) throw std::invalid_argument("fit_step: need positive values");
  const double steps = std::ceil(horizon / dt_max - 1e-9);
  return horizon / std::max(1.0, steps);
}

// ---------------------------------------------------------------------------

FieldTangent fields_rhs(const FieldState& f, const ModelParams& p, DerivOrder order) {
  require_su2(p.n, "fields_rhs");
  const int n = f.grid().size();
  const double dx = f.grid().dx();
  FieldTangent out;
  out.E_t.resize(static_cast<std::size_t>(n));
  out.P_t.resize(out.E_t.size());
  out.D_t.resize(out.E_t.size());
  for (int j = 0; j < n; ++j) {
    const Complex e = f.E[j];
    const Complex pp = f.P[j];
    const double d = f.D[j];
    out.E_t[j] = -p.c * detail::centered_difference(f.E.values, j, dx, order) + 2.0 * pp;
    const Complex relax = f.beta_mode == BetaMode::kSkew ? kI * f.beta * pp : f.beta * pp;
    out.P_t[j] = e * d - relax;
    out.D_t[j] = -0.5 * (std::conj(e) * pp + e * std::conj(pp)).real();
  }
  return out;
}

FieldState fields_step(const FieldState& f, const ModelParams& p, double dt, DerivOrder order) {
  auto axpy = [](const FieldState& base, const FieldTangent& k, double h) {
    FieldState y = base;
    for (int j = 0; j < base.grid().size(); ++j) {
      y.E[j] += h * k.E_t[j];
      y.P[j] += h * k.P_t[j];
      y.D[j] += h * k.D_t[j];
    }
    return y;
  };
  const FieldTangent k1 = fields_rhs(f, p, order);
  const FieldTangent k2 = fields_rhs(axpy(f, k1, 0.5 * dt), p, order);
  const FieldTangent k3 = fields_rhs(axpy(f, k2, 0.5 * dt), p, order);
  const FieldTangent k4 = fields_rhs(axpy(f, k3, dt), p, order);
  FieldState out = f;
  const double w = dt / 6.0;
  for (int j = 0; j < f.grid().size(); ++j) {
    out.E[j] += w * (k1.E_t[j] + 2.0 * k2.E_t[j] + 2.0 * k3.E_t[j] + k4.E_t[j]);
    out.P[j] += w * (k1.P_t[j] + 2.0 * k2.P_t[j] + 2.0 * k3.P_t[j] + k4.P_t[j]);
    out.D[j] += w * (k1.D_t[j] + 2.0 * k2.D_t[j] + 2.0 * k3.D_t[j] + k4.D_t[j]);
    if (!std::isfinite(out.D[j]) || !std::isfinite(std::abs(out.E[j])) ||
        !std::isfinite(std::abs(out.P[j]))) {
      throw NumericalBlowup("fields_step: non-finite state at node " + std::to_string(j), f.t);
    }
  }
  out.t = f.t + dt;
  return out;
}

AlgebraElement rho_from_fields(Complex P, double D) {
  Matrix r(2, 2);
  r << kI * D, kI * P, kI * std::conj(P), -kI * D;
  return AlgebraElement::unchecked(r);
}

AlgebraElement f_from_fields(Complex E, double beta) {
  Matrix f(2, 2);
  f << 0.5 * kI * beta, 0.5 * E, -0.5 * std::conj(E), -0.5 * kI * beta;
  return AlgebraElement::unchecked(f);
}

GroupForm init_from_fields(const FieldState& f, ModelParams base) {
  const PeriodicGrid& grid = f.grid();
  const int n = grid.size();
  std::vector<GroupElement> g;
  std::vector<AlgebraElement> m, tau;
  g.reserve(static_cast<std::size_t>(n));
  m.reserve(g.capacity());
  tau.reserve(g.capacity());
  for (int j = 0; j < n; ++j) {
    const double r2 = f.D[j] * f.D[j] + std::norm(f.P[j]);
    if (!(r2 > 1e-12)) {
      throw DegeneratePointError("init_from_fields: D^2 + |P|^2 vanishes at node " +
                                     std::to_string(j),
                                 j);
    }
    const Diagonalization dz = diagonalize_skew(rho_from_fields(f.P[j], f.D[j]));
    g.push_back(dz.g);
    tau.push_back(dz.tau);
    m.push_back(-f_from_fields(f.E[j], f.beta));
  }
  GroupForm out;
  out.state.t = f.t;
  out.state.g = LoopField<GroupElement>(grid, std::move(g));
  out.state.m = LoopField<AlgebraElement>(grid, std::move(m));
  out.params = std::move(base);
  out.params.n = 2;
  out.params.sigma = default_sigma(2);
  out.params.tau = LoopField<AlgebraElement>(grid, std::move(tau));
  if (out.params.tau_frame.dim() != 2) out.params.tau_frame = TorusFrame::diagonal(2);
  if (out.params.sigma_frame.dim() != 2) out.params.sigma_frame = TorusFrame::diagonal(2);
  return out;
}

ExtractedFields extract_fields(const ChainState& s, const ModelParams& p) {
  require_su2(p.n, "extract_fields");
  require_same_grid(s.grid(), p.grid(), "extract_fields");
  const PeriodicGrid& grid = s.grid();
  const int n = grid.size();
  std::vector<Complex> E, P;
  std::vector<double> D, beta;
  for (int j = 0; j < n; ++j) {
    const Matrix rho = adjoint_conj(s.g[j], p.tau[j]).matrix();
    const Matrix& m = s.m[j].matrix();
    D.push_back(rho(0, 0).imag());
    P.push_back(-kI * rho(0, 1));
    E.push_back(-2.0 * m(0, 1));
    beta.push_back(-2.0 * m(0, 0).imag());
  }
  double mean = 0.0;
  for (double b : beta) mean += b;
  mean /= n;
  double dev = 0.0;
  for (double b : beta) dev = std::max(dev, std::abs(b - mean));

  ExtractedFields out;
  out.fields.t = s.t;
  out.fields.E = LoopField<Complex>(grid, std::move(E));
  out.fields.P = LoopField<Complex>(grid, std::move(P));
  out.fields.D = LoopField<double>(grid, std::move(D));
  out.fields.beta = mean;
  out.beta_max_dev = dev;
  return out;
}

// ---------------------------------------------------------------------------

NeumannParams neumann_params(const ModelParams& p) {
  if (!p.tau_is_constant(0.0)) throw std::invalid_argument("neumann_params: tau varies in x");
  return NeumannParams{p.sigma, p.tau[0]};
}

std::pair<Matrix, AlgebraElement> neumann_rhs(const NeumannState& s, const NeumannParams& p) {
  const Matrix& g = s.g.matrix();
  return {s.m.matrix() * g,
          AlgebraElement::unchecked(potential_force(p.sigma.matrix(), g, p.tau.matrix()))};
}

NeumannState neumann_step(const NeumannState& s, const NeumannParams& p, double dt) {
  std::vector<Matrix> g{s.g.matrix()}, m{s.m.matrix()};
  rk4_matrices(g, m, dt, [&](const auto& gg, const auto& mm, auto& gd, auto& md) {
    gd[0] = mm[0] * gg[0];
    md[0] = potential_force(p.sigma.matrix(), gg[0], p.tau.matrix());
  });
  if (!g[0].allFinite() || !m[0].allFinite()) {
    throw NumericalBlowup("neumann_step: non-finite state", s.t);
  }
  NeumannState out;
  out.t = s.t + dt;
  try {
    out.g = reunitarize(g[0]);
  } catch (const NumericalBlowup& e) {
    throw NumericalBlowup(e.what(), s.t);
  }
  out.m = AlgebraElement::unchecked(m[0]);
  return out;
}

double neumann_energy(const NeumannState& s, const NeumannParams& p) {
  return 0.5 * inner(s.m, s.m) + inner(p.sigma, adjoint_conj(s.g, p.tau));
}

// ---------------------------------------------------------------------------

AlgebraElement rotation_generator() {
  Matrix j(2, 2);
  j << 0.0, 1.0, -1.0, 0.0;
  return AlgebraElement::unchecked(j);
}

ModelParams sine_gordon_params(const PeriodicGrid& grid, double c) {
  ModelParams p;
  p.n = 2;
  p.sigma = default_sigma(2);
  p.tau = LoopField<AlgebraElement>(grid, p.sigma);
  p.c = c;
  p.tau_frame = TorusFrame::diagonal(2);
  p.sigma_frame = TorusFrame::diagonal(2);
  return p;
}

ChainState sine_gordon_embed(const LoopField<double>& phi, const LoopField<double>& phi_t) {
  require_same_grid(phi.grid, phi_t.grid, "sine_gordon_embed");
  const AlgebraElement jgen = rotation_generator();
  std::vector<GroupElement> g;
  std::vector<AlgebraElement> m;
  for (int j = 0; j < phi.size(); ++j) {
    const double c = std::cos(phi[j]);
    const double s = std::sin(phi[j]);
    Matrix r(2, 2);
    r << c, s, -s, c;
    g.push_back(GroupElement::unchecked(r));
    m.push_back(phi_t[j] * jgen);
  }
  ChainState out;
  out.g = LoopField<GroupElement>(phi.grid, std::move(g));
  out.m = LoopField<AlgebraElement>(phi.grid, std::move(m));
  return out;
}

double off_subgroup_defect(const ChainState& s) {
  const AlgebraElement jgen = rotation_generator();
  double worst = 0.0;
  for (int j = 0; j < s.grid().size(); ++j) {
    const Matrix& g = s.g[j].matrix();
    if (g.rows() != 2) throw DimensionError("off_subgroup_defect: n must be 2");
    worst = std::max({worst, g.imag().cwiseAbs().maxCoeff(), std::abs(g(0, 0) - g(1, 1)),
                      std::abs(g(0, 1) + g(1, 0))});
    const double phi_t = inner(s.m[j], jgen) / inner(jgen, jgen);
    worst = std::max(worst, (s.m[j].matrix() - phi_t * jgen.matrix()).norm());
  }
  return worst;
}

SineGordonFields sine_gordon_extract(const ChainState& s) {
  const double defect = off_subgroup_defect(s);
  if (defect > 1e-6) {
    throw InvariantError("sine_gordon_extract: state is " + std::to_string(defect) +
                         " off the SO(2) subgroup");
  }
  const AlgebraElement jgen = rotation_generator();
  const double jj = inner(jgen, jgen);
  const int n = s.grid().size();
  std::vector<double> phi(static_cast<std::size_t>(n)), phi_t(phi.size());
  double prev_raw = 0.0;
  for (int j = 0; j < n; ++j) {
    const Matrix& g = s.g[j].matrix();
    const double raw = std::atan2(g(0, 1).real(), g(0, 0).real());
    if (j == 0) {
      phi[0] = raw;
    } else {
      double d = raw - prev_raw;
      d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
      phi[j] = phi[j - 1] + d;
    }
    prev_raw = raw;
    phi_t[j] = inner(s.m[j], jgen) / jj;
  }
  return SineGordonFields{LoopField<double>(s.grid(), std::move(phi)),
                          LoopField<double>(s.grid(), std::move(phi_t))};
}

}  // namespace mbloch

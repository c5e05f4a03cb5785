#include "mbloch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace mbloch {
namespace {

/// -Re Tr(AB) for raw matrices that are skew-Hermitian up to discretization.
double trace_form(const Matrix& a, const Matrix& b) {
  Complex acc = 0.0;
  for (int j = 0; j < a.rows(); ++j)
    for (int k = 0; k < a.cols(); ++k) acc += a(j, k) * b(k, j);
  return -acc.real();
}

void require_charge_setup(const ChainState& s, const ModelParams& p, const char* where) {
  if (!(s.grid() == p.grid())) throw GridMismatch(std::string(where) + ": grid mismatch");
  if (!p.tau_is_constant(1e-14)) {
    throw std::invalid_argument(std::string(where) + ": tau must be constant in x");
  }
  if (p.tau_frame.dim() != p.n) {
    throw std::invalid_argument(std::string(where) + ": tau torus frame not set");
  }
}

void require_in_frame(const AlgebraElement& x, const TorusFrame& frame, const char* where) {
  if (!frame.contains(x, 1e-10)) {
    throw std::invalid_argument(std::string(where) + ": element is off the torus");
  }
}

LoopField<Matrix> g_derivative(const ChainState& s, DerivOrder order) {
  return deriv_x(as_matrices(s.g), order);
}

}  // namespace

double energy_total(const ChainState& s, const ModelParams& p) {
  if (!(s.grid() == p.grid())) throw GridMismatch("energy_total: grid mismatch");
  std::vector<double> density;
  density.reserve(static_cast<std::size_t>(s.grid().size()));
  for (int j = 0; j < s.grid().size(); ++j) {
    density.push_back(0.5 * inner(s.m[j], s.m[j]) +
                      inner(p.sigma, adjoint_conj(s.g[j], p.tau[j])));
  }
  return integrate_circle(LoopField<double>(s.grid(), std::move(density)));
}

double noether_G(const ChainState& s, const ModelParams& p, const LoopField<AlgebraElement>& xi,
                 DerivOrder order, double magnetic_coefficient) {
  require_charge_setup(s, p, "noether_G");
  if (!(xi.grid == s.grid())) throw GridMismatch("noether_G: xi grid mismatch");
  const LoopField<Matrix> gx = g_derivative(s, order);
  const double a = magnetic_coefficient * p.c;
  std::vector<double> density;
  density.reserve(static_cast<std::size_t>(s.grid().size()));
  for (int j = 0; j < s.grid().size(); ++j) {
    require_in_frame(xi[j], p.tau_frame, "noether_G");
    const Matrix& g = s.g[j].matrix();
    const Matrix vel = s.m[j].matrix() + a * gx[j] * g.adjoint();
    density.push_back(trace_form(vel, g * xi[j].matrix() * g.adjoint()));
  }
  return integrate_circle(LoopField<double>(s.grid(), std::move(density)));
}

namespace {

Matrix left_velocity(const ChainState& s, const ModelParams& p, int j, DerivOrder order,
                     double magnetic_coefficient) {
  if (j < 0 || j >= s.grid().size()) {
    throw std::out_of_range("pointwise charge: node index " + std::to_string(j) +
                            " out of range");
  }
  const Matrix& g = s.g[j].matrix();
  const Matrix gx = detail::centered_difference(as_matrices(s.g).values, j, s.grid().dx(), order);
  return g.adjoint() * s.m[j].matrix() * g + magnetic_coefficient * p.c * g.adjoint() * gx;
}

}  // namespace

double pointwise_chi(const ChainState& s, const ModelParams& p, int x0_index,
                     const AlgebraElement& xi_hat, DerivOrder order,
                     double magnetic_coefficient) {
  require_charge_setup(s, p, "pointwise_chi");
  require_in_frame(xi_hat, p.tau_frame, "pointwise_chi");
  return trace_form(left_velocity(s, p, x0_index, order, magnetic_coefficient), xi_hat.matrix());
}

double pointwise_chi_right(const ChainState& s, const ModelParams& p, int x0_index,
                           const AlgebraElement& xi_hat, DerivOrder order,
                           double magnetic_coefficient) {
  require_charge_setup(s, p, "pointwise_chi_right");
  require_in_frame(xi_hat, p.tau_frame, "pointwise_chi_right");
  if (x0_index < 0 || x0_index >= s.grid().size()) {
    throw std::out_of_range("pointwise_chi_right: node index out of range");
  }
  const Matrix& g = s.g[x0_index].matrix();
  const Matrix gx =
      detail::centered_difference(as_matrices(s.g).values, x0_index, s.grid().dx(), order);
  const Matrix vel = s.m[x0_index].matrix() + magnetic_coefficient * p.c * gx * g.adjoint();
  return trace_form(vel, g * xi_hat.matrix() * g.adjoint());
}

AlgebraElement pointwise_chi_element(const ChainState& s, const ModelParams& p, int x0_index,
                                     DerivOrder order, double magnetic_coefficient) {
  require_charge_setup(s, p, "pointwise_chi_element");
  return torus_project(
      AlgebraElement::unchecked(left_velocity(s, p, x0_index, order, magnetic_coefficient)),
      p.tau_frame);
}

double left_moment_J(const ChainState& s, const ModelParams& p, const AlgebraElement& eta) {
  if (p.sigma_frame.dim() != p.n) throw std::invalid_argument("left_moment_J: sigma frame not set");
  require_in_frame(eta, p.sigma_frame, "left_moment_J");
  std::vector<double> density;
  density.reserve(static_cast<std::size_t>(s.grid().size()));
  for (int j = 0; j < s.grid().size(); ++j) density.push_back(inner(s.m[j], eta));
  return integrate_circle(LoopField<double>(s.grid(), std::move(density)));
}

AlgebraElement left_moment_element(const ChainState& s, const ModelParams& p) {
  if (p.sigma_frame.dim() != p.n) {
    throw std::invalid_argument("left_moment_element: sigma frame not set");
  }
  AlgebraElement total = AlgebraElement::zero(p.n);
  for (int j = 0; j < s.grid().size(); ++j) total += s.m[j];
  return torus_project(s.grid().dx() * total, p.sigma_frame);
}

BetaValue beta_value(const ChainState& s, const ModelParams& p) {
  const int n = s.grid().size();
  std::vector<double> b(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (int j = 0; j < n; ++j) {
    b[j] = -2.0 * inner(s.m[j], p.sigma);
    mean += b[j];
  }
  mean /= n;
  double dev = 0.0;
  for (double v : b) dev = std::max(dev, std::abs(v - mean));
  return {mean, dev};
}

LoopField<double> casimir_profile(const ChainState& s, const ModelParams& p) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(s.grid().size()));
  for (int j = 0; j < s.grid().size(); ++j) {
    out.push_back(std::abs(norm(adjoint_conj(s.g[j], p.tau[j])) - norm(p.tau[j])));
  }
  return LoopField<double>(s.grid(), std::move(out));
}

double unitarity_dev(const ChainState& s) {
  double worst = 0.0;
  for (const auto& g : s.g.values) worst = std::max(worst, unitarity_defect(g.matrix()));
  return worst;
}

double lax_residual(const ChainState& prev, const ChainState& next, const ModelParams& p,
                    double z, DerivOrder order) {
  if (z == 0.0) throw std::invalid_argument("lax_residual: spectral parameter z must be nonzero");
  if (!(next.t > prev.t)) throw std::invalid_argument("lax_residual: snapshots out of order");
  if (!(prev.grid() == next.grid()) || !(prev.grid() == p.grid())) {
    throw GridMismatch("lax_residual: grid mismatch");
  }
  const int n = prev.grid().size();
  const double dt = next.t - prev.t;
  const Matrix& sigma = p.sigma.matrix();
  auto v_of = [&](const ChainState& s, int j) {
    const Matrix& g = s.g[j].matrix();
    return Matrix(-z * sigma + s.m[j].matrix() - (g * p.tau[j].matrix() * g.adjoint()) / z);
  };
  std::vector<Matrix> u_mid(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    u_mid[j] = z * sigma - 0.5 * (prev.m[j].matrix() + next.m[j].matrix());
  }
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const Matrix v0 = v_of(prev, j);
    const Matrix v1 = v_of(next, j);
    const Matrix v_mid = 0.5 * (v0 + v1);
    const Matrix ux = detail::centered_difference(u_mid, j, prev.grid().dx(), order);
    const Matrix r = (v1 - v0) / dt - p.c * ux + (u_mid[j] * v_mid - v_mid * u_mid[j]);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double potential_closed_form(double a, double b, double c, const std::array<double, 4>& q) {
  const auto [q1, q2, q3, q4] = q;
  return 2.0 * a * (q1 * q1 + q2 * q2 - q3 * q3 - q4 * q4) + 4.0 * b * (-q1 * q4 + q2 * q3) +
         4.0 * c * (q1 * q3 + q2 * q4);
}

std::array<double, 4> potential_spectrum(const AlgebraElement& tau) {
  if (tau.dim() != 2) throw DimensionError("potential_spectrum is defined for n = 2 only");
  Matrix sigma = Matrix::Zero(2, 2);
  sigma(0, 0) = Complex(0.0, 1.0);
  sigma(1, 1) = Complex(0.0, -1.0);
  auto form = [&](const Eigen::Vector4d& q) {
    Matrix g(2, 2);
    g << Complex(q(0), q(1)), Complex(q(2), q(3)), Complex(-q(2), q(3)), Complex(q(0), -q(1));
    return -(sigma * g * tau.matrix() * g.adjoint()).trace().real();
  };
  Eigen::Matrix4d quad;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector4d ej = Eigen::Vector4d::Unit(j);
    quad(j, j) = form(ej);
  }
  for (int j = 0; j < 4; ++j) {
    for (int k = j + 1; k < 4; ++k) {
      const Eigen::Vector4d ej = Eigen::Vector4d::Unit(j);
      const Eigen::Vector4d ek = Eigen::Vector4d::Unit(k);
      quad(j, k) = quad(k, j) = 0.5 * (form(ej + ek) - quad(j, j) - quad(k, k));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(quad, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(1), ev(2), ev(3)};
}

DiagnosticRecord record_diagnostics(const ChainState* prev, const ChainState& cur,
                                    const ModelParams& p, const DiagnosticProbes& probes,
                                    DerivOrder order) {
  DiagnosticRecord r;
  r.t = cur.t;
  r.energy = energy_total(cur, p);
  const BetaValue b = beta_value(cur, p);
  r.beta_mean = b.mean;
  r.beta_dev = b.max_dev;
  const LoopField<double> cas = casimir_profile(cur, p);
  r.casimir_dev = *std::max_element(cas.values.begin(), cas.values.end());
  r.unitarity_dev = unitarity_dev(cur);
  if (p.tau_is_constant(1e-14)) {
    for (const auto& xi : probes.xi_loops) r.G.push_back(noether_G(cur, p, xi, order));
    for (std::size_t k = 0; k < probes.chi_nodes.size(); ++k) {
      r.chi.push_back(pointwise_chi(cur, p, probes.chi_nodes[k], probes.chi_xi[k], order));
    }
  }
  for (const auto& eta : probes.etas) r.J.push_back(left_moment_J(cur, p, eta));
  if (prev != nullptr) {
    const ChainState& a = prev->t < cur.t ? *prev : cur;
    const ChainState& c = prev->t < cur.t ? cur : *prev;
    for (double z : probes.z_values) r.lax.push_back(lax_residual(a, c, p, z, order));
  }
  return r;
}

}  // namespace mbloch

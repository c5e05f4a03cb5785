#include "mbloch/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mbloch {

AlgebraElement random_algebra(Rng& rng, int n, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = Complex(normal(rng), normal(rng));
  AlgebraElement x = project_to_algebra(m);
  const double r = norm(x);
  return r > 0.0 ? (scale / r) * x : x;
}

GroupElement random_group(Rng& rng, int n) {
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi * std::sqrt(2.0));
  const double a = angle(rng);
  return exp_algebra(random_algebra(rng, n, a));
}

LoopField<AlgebraElement> random_smooth_loop(Rng& rng, const PeriodicGrid& grid, int n,
                                             int modes, double amplitude) {
  std::vector<AlgebraElement> a, b;
  double total = 0.0;
  for (int k = 0; k <= modes; ++k) {
    const double w = 1.0 / ((1.0 + k) * (1.0 + k));
    a.push_back(random_algebra(rng, n, w));
    b.push_back(random_algebra(rng, n, w));
    total += 2.0 * w;
  }
  const double scale = amplitude / total;
  std::vector<AlgebraElement> v;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.node(j);
    AlgebraElement s = AlgebraElement::zero(n);
    for (int k = 0; k <= modes; ++k) s += std::cos(k * x) * a[k] + std::sin(k * x) * b[k];
    v.push_back(scale * s);
  }
  return LoopField<AlgebraElement>(grid, std::move(v));
}

LoopField<double> random_smooth_scalar(Rng& rng, const PeriodicGrid& grid, int modes,
                                       double amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a, b;
  double total = 0.0;
  for (int k = 0; k <= modes; ++k) {
    const double w = 1.0 / ((1.0 + k) * (1.0 + k));
    a.push_back(w * normal(rng));
    b.push_back(w * normal(rng));
    total += std::abs(a.back()) + std::abs(b.back());
  }
  const double scale = total > 0.0 ? amplitude / total : 0.0;
  std::vector<double> v;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.node(j);
    double s = 0.0;
    for (int k = 0; k <= modes; ++k) s += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
    v.push_back(scale * s);
  }
  return LoopField<double>(grid, std::move(v));
}

}  // namespace mbloch

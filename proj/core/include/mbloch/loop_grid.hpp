#pragma once

// Uniform periodic grid on [0, 2*pi), sampled loops, centered differences
// and the rectangle-rule integral over the circle.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbloch/lie.hpp"

namespace mbloch {

class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  /// N >= 8 and even.
  explicit PeriodicGrid(int n);

  int size() const { return n_; }
  double dx() const { return dx_; }
  double node(int j) const { return j * dx_; }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) { return a.n_ == b.n_; }

 private:
  int n_ = 0;
  double dx_ = 0.0;
};

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class V>
struct LoopField {
  PeriodicGrid grid;
  std::vector<V> values;

  LoopField() = default;
  LoopField(PeriodicGrid g, std::vector<V> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != grid.size()) {
      throw GridMismatch("loop field has " + std::to_string(values.size()) +
                         " values on a grid of " + std::to_string(grid.size()));
    }
  }
  LoopField(PeriodicGrid g, const V& fill) : grid(g), values(g.size(), fill) {}

  int size() const { return grid.size(); }
  V& operator[](int j) { return values[static_cast<std::size_t>(j)]; }
  const V& operator[](int j) const { return values[static_cast<std::size_t>(j)]; }
};

/// Sample f(x_j) on the grid.
template <class F>
auto sample(const PeriodicGrid& grid, F&& f) {
  using V = decltype(f(0.0));
  std::vector<V> v;
  v.reserve(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) v.push_back(f(grid.node(j)));
  return LoopField<V>(grid, std::move(v));
}

enum class DerivOrder { kSecond = 2, kFourth = 4 };

DerivOrder deriv_order_from_int(int order);

namespace detail {

/// Centered difference at node j for any V closed under +, - and
/// multiplication by a real scalar. Differences of equal neighbours are
/// exactly zero, so constant loops differentiate to exactly zero.
template <class V>
V centered_difference(const std::vector<V>& f, int j, double dx, DerivOrder order) {
  const int n = static_cast<int>(f.size());
  auto at = [&](int k) -> const V& { return f[static_cast<std::size_t>(((k % n) + n) % n)]; };
  if (order == DerivOrder::kSecond) {
    return (at(j + 1) - at(j - 1)) * (1.0 / (2.0 * dx));
  }
  return ((at(j + 1) - at(j - 1)) * 8.0 - (at(j + 2) - at(j - 2))) * (1.0 / (12.0 * dx));
}

}  // namespace detail

template <class V>
LoopField<V> deriv_x(const LoopField<V>& f, DerivOrder order) {
  std::vector<V> out;
  out.reserve(f.values.size());
  for (int j = 0; j < f.size(); ++j) {
    out.push_back(detail::centered_difference(f.values, j, f.grid.dx(), order));
  }
  return LoopField<V>(f.grid, std::move(out));
}

/// sum_j f_j * dx, accumulated in index order.
double integrate_circle(const LoopField<double>& f);

/// The group loop as plain matrices (for differentiating g).
LoopField<Matrix> as_matrices(const LoopField<GroupElement>& g);

}  // namespace mbloch

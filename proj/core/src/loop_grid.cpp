#include "mbloch/loop_grid.hpp"

#include <numbers>

namespace mbloch {

PeriodicGrid::PeriodicGrid(int n) : n_(n), dx_(2.0 * std::numbers::pi / n) {
  if (n < 8 || n % 2 != 0) {
    throw std::invalid_argument("periodic grid needs N >= 8 and even, got " + std::to_string(n));
  }
}

DerivOrder deriv_order_from_int(int order) {
  switch (order) {
    case 2:
      return DerivOrder::kSecond;
    case 4:
      return DerivOrder::kFourth;
    default:
      throw std::invalid_argument("derivative order must be 2 or 4, got " +
                                  std::to_string(order));
  }
}

double integrate_circle(const LoopField<double>& f) {
  double acc = 0.0;
  for (double v : f.values) acc += v;
  return acc * f.grid.dx();
}

LoopField<Matrix> as_matrices(const LoopField<GroupElement>& g) {
  std::vector<Matrix> out;
  out.reserve(g.values.size());
  for (const auto& x : g.values) out.push_back(x.matrix());
  return LoopField<Matrix>(g.grid, std::move(out));
}

}  // namespace mbloch

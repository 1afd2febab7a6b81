#include "tfd/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace tfd {

std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo,
                                             double hi, double rel_tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= rel_tol * std::max(std::abs(mid), 1e-300)) break;
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

GridMaximum maximize_on_grid(const std::function<double(double)>& f,
                             const std::vector<double>& grid, double rel_tol) {
  GridMaximum out;
  if (grid.empty()) return out;
  out.xs = grid;
  out.values.reserve(grid.size());
  for (double x : grid) out.values.push_back(f(x));
  const double top = *std::max_element(out.values.begin(), out.values.end());
  std::size_t k = out.values.size() - 1;
  while (out.values[k] < top * (1.0 - 1e-13)) --k;
  out.x_star = grid[k];
  out.f_max = out.values[k];
  if (k == 0 || k + 1 == grid.size()) {
    out.at_boundary = true;
    return out;
  }
  const auto [x, v] = golden_section_max(f, grid[k - 1], grid[k + 1], rel_tol);
  if (v >= out.f_max) {
    out.x_star = x;
    out.f_max = v;
  }
  return out;
}

}  // namespace tfd

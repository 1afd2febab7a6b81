#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace tfd {

/// Golden-section maximization of a unimodal f on [lo, hi]; stops when the
/// bracket is narrower than rel_tol * |x|. Returns (argmax, max).
std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double lo,
                                             double hi, double rel_tol = 1e-8,
                                             int max_iter = 200);

struct GridMaximum {
  std::vector<double> xs;
  std::vector<double> values;
  double x_star = 0.0;
  double f_max = 0.0;
  /// The best grid point is an endpoint, so no refinement was attempted.
  bool at_boundary = false;
};

/// Evaluates f on an ascending grid, then refines the best interior point by
/// golden section on its two neighbours. Ties within 1e-13 relative resolve
/// to the largest x (plateaus such as the decoupled limit).
GridMaximum maximize_on_grid(const std::function<double(double)>& f,
                             const std::vector<double>& grid, double rel_tol = 1e-8);

}  // namespace tfd

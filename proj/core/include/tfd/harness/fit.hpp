#pragma once

#include <utility>
#include <vector>

namespace tfd::harness {

struct SlopeFit {
  double a = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of -log f against n: -log f = a n + b. Needs at least four
/// points with distinct sizes and positive fidelities (FitError otherwise).
SlopeFit fit_decay_slope(const std::vector<std::pair<double, double>>& n_and_f);

struct BetaOfCFit {
  double a = 0.0;
  double b = 0.0;
  /// Root-mean-square residual in beta.
  double residual = 0.0;
  bool converged = false;
};

/// Levenberg-Marquardt fit of beta = A asinh(B / c), started from A = 2, B = 1.
/// Needs at least three points with c > 0 (FitError otherwise); on
/// non-convergence the best iterate is returned with converged = false.
BetaOfCFit fit_beta_of_c(const std::vector<std::pair<double, double>>& c_and_beta);

struct ThermometryPoint {
  double j = 0.0;
  double mean_energy = 0.0;
  double variance = 0.0;
};

/// Integrates d beta / dj = -(1/var) d<H_L>/dj down from the largest j,
/// anchored at anchor_beta there. Points must be strictly descending in j
/// (InvalidGrid otherwise) with positive variance. Returns beta-hat per point.
std::vector<double> thermometry_map(const std::vector<ThermometryPoint>& points, double anchor_beta);

}  // namespace tfd::harness

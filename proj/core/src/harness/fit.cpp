#include "tfd/harness/fit.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include "tfd/error.hpp"

namespace tfd::harness {

namespace {

struct AsinhModel : Eigen::DenseFunctor<double> {
  const std::vector<std::pair<double, double>>& data;

  explicit AsinhModel(const std::vector<std::pair<double, double>>& d)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(d.size())), data(d) {}

  int operator()(const InputType& p, ValueType& f) const {
    for (std::size_t i = 0; i < data.size(); ++i) {
      f[i] = p[0] * std::asinh(p[1] / data[i].first) - data[i].second;
    }
    return 0;
  }

  int df(const InputType& p, JacobianType& j) const {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double u = p[1] / data[i].first;
      j(i, 0) = std::asinh(u);
      j(i, 1) = p[0] / data[i].first / std::sqrt(1.0 + u * u);
    }
    return 0;
  }
};

// Derivative at x[at] of the parabola through three points.
double parabola_slope(const double* x, const double* y, double at) {
  const double d0 = ((at - x[1]) + (at - x[2])) / ((x[0] - x[1]) * (x[0] - x[2]));
  const double d1 = ((at - x[0]) + (at - x[2])) / ((x[1] - x[0]) * (x[1] - x[2]));
  const double d2 = ((at - x[0]) + (at - x[1])) / ((x[2] - x[0]) * (x[2] - x[1]));
  return y[0] * d0 + y[1] * d1 + y[2] * d2;
}

}  // namespace

SlopeFit fit_decay_slope(const std::vector<std::pair<double, double>>& n_and_f) {
  if (n_and_f.size() < 4) throw Error(ErrorCode::FitError, "need at least four sizes");
  std::set<double> distinct;
  for (const auto& [n, f] : n_and_f) {
    if (!(f > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::FitError, "fidelities must be positive");
    distinct.insert(n);
  }
  if (distinct.size() < 2) throw Error(ErrorCode::FitError, "degenerate sizes");
  const Eigen::Index m = static_cast<Eigen::Index>(n_and_f.size());
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i, 0) = n_and_f[i].first;
    x(i, 1) = 1.0;
    y[i] = -std::log(n_and_f[i].second);
  }
  const Eigen::Vector2d coef = x.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - x * coef;
  const double ss_tot = (y.array() - y.mean()).square().sum();
  SlopeFit fit;
  fit.a = coef[0];
  fit.intercept = coef[1];
  fit.r_squared = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
  return fit;
}

BetaOfCFit fit_beta_of_c(const std::vector<std::pair<double, double>>& c_and_beta) {
  if (c_and_beta.size() < 3) throw Error(ErrorCode::FitError, "need at least three points");
  for (const auto& [c, b] : c_and_beta) {
    if (!(c > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::FitError, "need c > 0 and finite beta");
  }
  AsinhModel model(c_and_beta);
  Eigen::LevenbergMarquardt<AsinhModel> lm(model);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(1e-15);
  lm.setMaxfev(4000);
  Eigen::VectorXd p(2);
  p << 2.0, 1.0;
  const auto status = lm.minimize(p);
  Eigen::VectorXd f(c_and_beta.size());
  model(p, f);
  BetaOfCFit fit;
  fit.a = p[0];
  fit.b = p[1];
  fit.residual = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
  fit.converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                  status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                  std::isfinite(fit.residual);
  return fit;
}

std::vector<double> thermometry_map(const std::vector<ThermometryPoint>& points, double anchor_beta) {
  const std::size_t m = points.size();
  if (m == 0) throw Error(ErrorCode::InvalidGrid, "no thermometry points");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(points[i].variance > 0.0)) throw Error(ErrorCode::InvalidGrid, "variance must be positive");
    if (i > 0 && !(points[i].j < points[i - 1].j)) {
      throw Error(ErrorCode::InvalidGrid, "j must be strictly descending");
    }
  }
  std::vector<double> beta(m, anchor_beta);
  if (m == 1) return beta;

  std::vector<double> j(m), e(m), g(m);
  for (std::size_t i = 0; i < m; ++i) {
    j[i] = points[i].j;
    e[i] = points[i].mean_energy;
  }
  for (std::size_t i = 0; i < m; ++i) {
    double slope;
    if (m == 2) {
      slope = (e[1] - e[0]) / (j[1] - j[0]);
    } else {
      const std::size_t s = i == 0 ? 0 : (i + 1 == m ? m - 3 : i - 1);
      slope = parabola_slope(&j[s], &e[s], j[i]);
    }
    g[i] = -slope / points[i].variance;
  }
  for (std::size_t i = 1; i < m; ++i) {
    beta[i] = beta[i - 1] + 0.5 * (g[i - 1] + g[i]) * (j[i] - j[i - 1]);
  }
  return beta;
}

}  // namespace tfd::harness

#include "tfd/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tfd/ed.hpp"
#include "tfd/error.hpp"
#include "tfd/lanczos.hpp"
#include "tfd/optimize.hpp"

namespace tfd::rmt {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Index kDenseMaxDim = 64;
// I_1(2 sigma beta) overflows a double past 2 sigma beta ~ 709.
constexpr double kMaxSigmaBeta = 350.0;

void check_spectrum(const RealVector& eigs) {
  if (eigs.size() == 0) throw Error(ErrorCode::InvalidMatrix, "empty spectrum");
  for (Index i = 0; i < eigs.size(); ++i) {
    if (!std::isfinite(eigs[i])) throw Error(ErrorCode::InvalidMatrix, "non-finite eigenvalue");
  }
}

RealVector sorted(const RealVector& eigs) {
  RealVector s = eigs;
  std::sort(s.begin(), s.end());
  return s;
}

// Bisection for an increasing g on (lo, hi) with g(lo) < 0 < g(hi), run to
// the floating-point resolution of the bracket.
template <class G>
double bisect_increasing(G g, double lo, double hi) {
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
}

std::vector<double> default_grid(const std::vector<double>& grid) {
  return grid.empty() ? ed::default_beta_grid() : grid;
}

}  // namespace

void RmtConfig::validate() const {
  if (!(j > 0.0)) throw Error(ErrorCode::InvalidCoupling, "J must be positive");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidCoupling, "sigma must be positive");
  if (k < 1) throw Error(ErrorCode::InvalidCoupling, "K must be at least 1");
  if (n < 1 || n > 30 || l != (Index{1} << n)) {
    throw Error(ErrorCode::InvalidCoupling, "L must equal 2^N");
  }
}

double critical_coupling(double sigma, int n) { return 2.0 * sigma / n; }

double stieltjes(const RealVector& eigs, double lambda) {
  return (eigs.array() - lambda).inverse().mean();
}

DiagonalSolution solve_diagonal(const RealVector& eigs, double j, int n, bool all_roots) {
  check_spectrum(eigs);
  if (!(j > 0.0) || n < 1) throw Error(ErrorCode::InvalidCoupling, "need J > 0 and N >= 1");
  const RealVector e = sorted(eigs);
  const double jn = j * n;
  const double target = 2.0 / jn;
  const double e_min = e[0];

  DiagonalSolution out;
  // lambda = e_min - d; m is decreasing in d and m(d) <= 1/d, so the root
  // lies in (0, JN/2]. Bisecting on d keeps full relative precision when
  // lambda_star crowds the lowest level.
  const RealVector shifted = e.array() - e_min;
  auto g_star = [&](double d) { return target - (shifted.array() + d).inverse().mean(); };
  const double d = bisect_increasing(g_star, 0.0, 0.5 * jn);
  out.lambda_star = e_min - d;
  out.gap0 = 2.0 * d;
  out.residual = std::abs(g_star(d)) / target;
  out.max_residual = out.residual;
  out.lambdas.push_back(out.lambda_star);
  if (!all_roots) return out;

  for (Index i = 0; i + 1 < e.size(); ++i) {
    const double a = e[i], b = e[i + 1];
    if (b <= a) {
      // Degenerate level: the traceless combinations inside it are diagonal
      // eigenstates with lambda equal to the level itself.
      out.lambdas.push_back(a);
      continue;
    }
    // Between two poles m rises from -inf to +inf. The root is bracketed by
    // its distance from the nearer pole so that roots crowding a level keep
    // full relative precision.
    const double half = 0.5 * (b - a);
    const bool lower = stieltjes(e, a + half) > target;
    const double pole = lower ? a : b;
    const RealVector rel = e.array() - pole;
    // lambda = pole + t (lower) or pole - t (upper)
    auto g = [&](double t) {
      const double m = (rel.array() - (lower ? t : -t)).inverse().mean() - target;
      return lower ? m : -m;
    };
    const double t = bisect_increasing(g, 0.0, half);
    out.lambdas.push_back(lower ? pole + t : pole - t);
    out.max_residual = std::max(out.max_residual, std::abs(g(t)) / target);
  }
  std::sort(out.lambdas.begin(), out.lambdas.end());
  return out;
}

RealVector resolvent_state(const RealVector& eigs, double lambda) {
  check_spectrum(eigs);
  RealVector a(eigs.size());
  for (Index i = 0; i < eigs.size(); ++i) {
    const double gap = eigs[i] - lambda;
    if (gap == 0.0 || !std::isfinite(1.0 / gap)) {
      throw Error(ErrorCode::PoleError, "lambda coincides with an eigenvalue");
    }
    a[i] = 1.0 / gap;
  }
  const double norm = a.norm();
  if (!std::isfinite(norm) || norm == 0.0) throw Error(ErrorCode::PoleError, "resolvent not normalizable");
  return a / norm;
}

Matrix build_h_infinity(const RealVector& eigs, double j, int n) {
  check_spectrum(eigs);
  const Index l = eigs.size();
  if (l > kDenseMaxDim) throw Error(ErrorCode::TooLarge, "dense H_inf limited to L <= 64");
  const double jn = j * n;
  Matrix h = Matrix::Zero(l * l, l * l);
  for (Index a = 0; a < l; ++a) {
    for (Index b = 0; b < l; ++b) h(a * l + b, a * l + b) = eigs[a] + eigs[b] + jn;
  }
  for (Index a = 0; a < l; ++a) {
    for (Index b = 0; b < l; ++b) h(a * l + a, b * l + b) -= jn / static_cast<double>(l);
  }
  return h;
}

Vector embed_diagonal(const RealVector& a) {
  const Index l = a.size();
  Vector v = Vector::Zero(l * l);
  for (Index i = 0; i < l; ++i) v[i * l + i] = a[i];
  return v;
}

double diagonal_tfd_overlap(const RealVector& eigs, const Vector& a, double beta) {
  const double e_min = eigs.minCoeff();
  cplx amp = 0.0;
  double z = 0.0;
  for (Index i = 0; i < eigs.size(); ++i) {
    const double w = std::exp(-0.5 * beta * (eigs[i] - e_min));
    amp += a[i] * w;
    z += w * w;
  }
  return std::norm(amp) / z;
}

FidelityPeak maximize_diagonal_overlap(const RealVector& eigs, const Vector& a,
                                       const std::vector<double>& beta_grid) {
  const auto grid = default_grid(beta_grid);
  const GridMaximum best = maximize_on_grid(
      [&](double b) { return diagonal_tfd_overlap(eigs, a, b); }, grid, 1e-8);
  return {best.x_star, best.f_max, best.at_boundary};
}

double semicircle_stieltjes(double lambda, double sigma) {
  if (std::abs(lambda) < 2.0 * sigma) {
    throw Error(ErrorCode::PoleError, "lambda inside the semicircle support");
  }
  // Rationalized form of (sgn(lambda) sqrt(lambda^2 - 4 sigma^2) - lambda) / (2 sigma^2).
  const double root = std::sqrt(lambda * lambda - 4.0 * sigma * sigma);
  return -2.0 / (lambda + std::copysign(root, lambda));
}

double gue_overlap(double j_over_jc, double sigma, double beta) {
  if (j_over_jc < 1.0 + 1e-6) throw Error(ErrorCode::BelowCritical, "J/J_c must exceed 1");
  const double r = 1.0 / j_over_jc;
  const double s = sigma * beta;
  if (s < 0.0 || s > kMaxSigmaBeta) throw Error(ErrorCode::InvalidGrid, "sigma*beta out of range");
  if (s == 0.0) return 1.0 - r * r;
  // For m >= 2s successive terms shrink at least by half, so the tail is
  // bounded by the last term.
  double sum = 0.0;
  double rm = 1.0;
  for (int m = 1; m < 10'000'000; ++m) {
    rm *= r;
    const double term = m * rm * std::cyl_bessel_i(static_cast<double>(m), s);
    sum += term;
    if (m >= 2.0 * s && term <= 1e-16 * sum) break;
  }
  return 4.0 / s * (j_over_jc * j_over_jc - 1.0) * sum * sum / std::cyl_bessel_i(1.0, 2.0 * s);
}

GueAnalytics gue_analytics(double j_over_jc, double sigma, double beta) {
  if (!(j_over_jc >= 1.0 + 1e-6)) throw Error(ErrorCode::BelowCritical, "J/J_c must exceed 1");
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidCoupling, "sigma must be positive");
  const double x = j_over_jc;
  GueAnalytics out;
  out.lambda_star = -sigma * (x + 1.0 / x);
  out.gap0 = 2.0 * (-2.0 * sigma - out.lambda_star);
  out.m_value = semicircle_stieltjes(out.lambda_star, sigma);
  out.overlap = gue_overlap(x, sigma, beta);
  std::vector<double> grid = ed::log_grid(1e-4, 300.0, 141);
  for (double& b : grid) b /= sigma;
  const GridMaximum best =
      maximize_on_grid([&](double b) { return gue_overlap(x, sigma, b); }, grid, 1e-9);
  out.beta_star = best.x_star;
  out.f_max = best.f_max;
  return out;
}

Matrix sample_gue(Index l, double sigma, std::mt19937_64& rng) {
  const double var = sigma * sigma / static_cast<double>(l);
  std::normal_distribution<double> diag(0.0, std::sqrt(var));
  std::normal_distribution<double> off(0.0, std::sqrt(0.5 * var));
  Matrix h(l, l);
  for (Index a = 0; a < l; ++a) {
    h(a, a) = diag(rng);
    for (Index b = a + 1; b < l; ++b) {
      const double re = off(rng);
      const double im = off(rng);
      h(a, b) = cplx(re, im);
      h(b, a) = cplx(re, -im);
    }
  }
  return h;
}

FiniteKResult finite_k_experiment(const RmtConfig& cfg, const RealVector* h0_eigs,
                                  const std::vector<double>& beta_grid) {
  cfg.validate();
  const Index l = cfg.l;
  if (l > kDenseMaxDim) throw Error(ErrorCode::TooLarge, "finite-K runs limited to L <= 64");
  std::mt19937_64 rng(cfg.seed);
  RealVector eigs;
  if (h0_eigs != nullptr) {
    if (h0_eigs->size() != l) throw Error(ErrorCode::Incompatible, "H0 spectrum size differs from L");
    check_spectrum(*h0_eigs);
    eigs = *h0_eigs;
  } else {
    eigs = num::hermitian_eigenvalues(sample_gue(l, cfg.sigma, rng));
  }

  std::vector<Matrix> ops;
  ops.reserve(cfg.k);
  Matrix sq = Matrix::Zero(l, l);
  for (int a = 0; a < cfg.k; ++a) {
    ops.push_back(sample_gue(l, 1.0, rng));
    sq.noalias() += ops.back() * ops.back();
  }
  const double g = cfg.jn() / (2.0 * cfg.k);
  const RealVector& e = eigs;

  // psi_nm is the amplitude of |eps_n>|eps_m*>; O_L acts as O psi and O*_R
  // as psi O (O Hermitian).
  num::MatVec h = [&](const Vector& x, Vector& y) {
    Eigen::Map<const RowMatrix> psi(x.data(), l, l);
    Eigen::Map<RowMatrix> out(y.data(), l, l);
    RowMatrix acc = sq * psi + psi * sq;
    RowMatrix tmp(l, l);
    for (const Matrix& o : ops) {
      tmp.noalias() = o * psi;
      acc.noalias() -= 2.0 * tmp * o;
    }
    out = g * acc;
    for (Index a = 0; a < l; ++a) {
      for (Index b = 0; b < l; ++b) out(a, b) += (e[a] + e[b]) * psi(a, b);
    }
  };

  const DiagonalSolution diag = solve_diagonal(e, cfg.j, cfg.n, false);
  const RealVector res = resolvent_state(e, diag.lambda_star);
  const Vector start = embed_diagonal(res);
  num::LanczosOptions lo;
  lo.tol = 1e-10;
  lo.seed = cfg.seed;
  const num::LanczosResult gs = num::lanczos_lowest(h, l * l, lo, &start);

  FiniteKResult out;
  out.gs_energy = gs.value;
  Vector d(l);
  for (Index a = 0; a < l; ++a) d[a] = gs.vector[a * l + a];
  out.w_off = std::max(0.0, 1.0 - d.squaredNorm());
  out.resolvent_fidelity = std::norm(res.cast<cplx>().dot(d));
  const FidelityPeak peak = maximize_diagonal_overlap(e, d, default_grid(beta_grid));
  out.f_max = peak.f_max;
  out.beta_star = peak.beta_star;
  out.at_boundary = peak.at_boundary;
  return out;
}

}  // namespace tfd::rmt

#include "tfd/lanczos.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "tfd/error.hpp"

namespace tfd::num {

namespace {

void project_out(Vector& w, std::span<const Vector> basis) {
  for (const Vector& b : basis) w -= b * b.dot(w);
}

Vector random_vector(Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

}  // namespace

LanczosResult lanczos_lowest(const MatVec& h, Index dim, const LanczosOptions& opts,
                             const Vector* start, std::span<const Vector> deflate) {
  LanczosResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.residual = std::numeric_limits<double>::infinity();

  const std::size_t bytes_per_vec = static_cast<std::size_t>(dim) * sizeof(cplx);
  int m_max = opts.krylov_max;
  if (bytes_per_vec > 0) {
    m_max = static_cast<int>(std::min<std::size_t>(
        m_max, std::max<std::size_t>(8, opts.memory_budget_bytes / bytes_per_vec)));
  }
  m_max = std::max(1, std::min<int>(m_max, static_cast<int>(dim)));

  Vector q = (start != nullptr && start->size() == dim && start->norm() > 0.0)
                 ? *start
                 : random_vector(dim, opts.seed);
  project_out(q, deflate);
  if (q.norm() < 1e-14) {
    q = random_vector(dim, opts.seed + 1);
    project_out(q, deflate);
  }
  q.normalize();

  double norm_est = 0.0;
  Vector w(dim);
  std::vector<Vector> basis;
  basis.reserve(m_max);

  for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    basis.clear();
    basis.push_back(q);
    std::vector<double> alpha, beta;
    RealVector ritz_y;
    double ritz_residual = std::numeric_limits<double>::infinity();
    bool done = false;

    for (int j = 0; j < m_max; ++j) {
      h(basis[j], w);
      ++best.matvecs;
      project_out(w, deflate);
      const double a = basis[j].dot(w).real();
      alpha.push_back(a);
      // Two passes of classical Gram-Schmidt against the whole Krylov basis.
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& b : basis) w -= b * b.dot(w);
      }
      project_out(w, deflate);
      const double b = w.norm();

      const int k = j + 1;
      const bool breakdown = b <= 1e-14 * std::max(norm_est, std::abs(a));
      const bool check = k <= 24 || k % 6 == 0 || k == m_max || breakdown || k == dim;
      if (check) {
        RealVector diag(k), off(std::max(0, k - 1));
        for (int i = 0; i < k; ++i) diag[i] = alpha[i];
        for (int i = 0; i + 1 < k; ++i) off[i] = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        const RealVector& theta = tri.eigenvalues();
        norm_est = std::max({norm_est, std::abs(theta[0]), std::abs(theta[k - 1])});
        ritz_y = tri.eigenvectors().col(0);
        ritz_residual = b * std::abs(ritz_y[k - 1]);

        const double scale = std::max(norm_est, 1e-300);
        if (ritz_residual <= opts.tol * scale || breakdown || k == dim || k == m_max) {
          done = ritz_residual <= opts.tol * scale || breakdown || k == dim;
          break;
        }
      }
      if (j + 1 < m_max) {
        beta.push_back(b);
        basis.push_back(w / b);
      }
    }

    Vector psi = Vector::Zero(dim);
    for (Index i = 0; i < ritz_y.size(); ++i) psi += ritz_y[i] * basis[i];
    project_out(psi, deflate);
    psi.normalize();

    // True residual; the Ritz estimate can be optimistic once orthogonality degrades.
    h(psi, w);
    ++best.matvecs;
    project_out(w, deflate);
    const double value = psi.dot(w).real();
    const double residual = (w - value * psi).norm();
    norm_est = std::max(norm_est, std::abs(value));

    if (residual < best.residual || value < best.value - 1e-12 * std::max(1.0, norm_est)) {
      best.value = value;
      best.vector = psi;
      best.residual = residual;
    }
    best.norm_estimate = norm_est;
    if (residual <= opts.tol * std::max(norm_est, 1e-300) ||
        (done && residual <= 10.0 * opts.tol * std::max(norm_est, 1e-300))) {
      best.value = value;
      best.vector = psi;
      best.residual = residual;
      best.converged = true;
      return best;
    }
    q = psi;
  }

  if (opts.throw_on_failure) {
    std::ostringstream msg;
    msg << "Lanczos did not converge after " << best.matvecs
        << " matvecs; residual=" << best.residual << " |H|~" << norm_est;
    throw Error(ErrorCode::NoConvergence, msg.str());
  }
  return best;
}

}  // namespace tfd::num

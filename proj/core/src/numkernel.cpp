#include "tfd/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfd/error.hpp"

namespace tfd::num {

namespace {

constexpr Index kMaxGateDim = 16;

void require_hermitian(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::InvalidMatrix, "matrix is " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + ", expected square");
  }
  if (!is_hermitian(a, rel_tol)) {
    throw Error(ErrorCode::InvalidMatrix, "matrix is not Hermitian");
  }
}

}  // namespace

double max_abs(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = max_abs(a);
  if (scale == 0.0) return true;
  return max_abs(a - a.adjoint()) <= rel_tol * scale;
}

void fix_phase(Eigen::Ref<Vector> v) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    // Ties resolve to the lowest index so the choice is platform independent.
    const double m = std::abs(v[i]);
    if (m > best_abs * (1.0 + 1e-12)) {
      best_abs = m;
      best = i;
    }
  }
  if (best_abs <= 0.0) return;
  v *= std::conj(v[best]) / best_abs;
}

EigenSystem hermitian_eig(const Matrix& a, double rel_tol) {
  require_hermitian(a, rel_tol);
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index k = 0; k < out.vectors.cols(); ++k) fix_phase(out.vectors.col(k));
  return out;
}

RealVector hermitian_eigenvalues(const Matrix& a, double rel_tol) {
  require_hermitian(a, rel_tol);
  const Matrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

namespace {

template <class Svd>
SvdResult truncate(const Svd& svd, const SvdTruncation& policy) {
  SvdResult out;
  const RealVector& s = svd.singularValues();
  const double total = s.squaredNorm();
  const double s_max = s.size() > 0 ? s[0] : 0.0;

  const Index cap = std::max<Index>(1, std::min<Index>(policy.max_rank, s.size()));
  Index keep = 1;
  while (keep < cap && s_max > 0.0 && s[keep] >= policy.cutoff * s_max) ++keep;

  double discarded = 0.0;
  for (Index i = keep; i < s.size(); ++i) discarded += s[i] * s[i];
  out.discarded_weight = total > 0.0 ? discarded / total : 0.0;
  out.u = svd.matrixU().leftCols(keep).template cast<cplx>();
  out.s = s.head(keep);
  out.v = svd.matrixV().leftCols(keep).template cast<cplx>();
  return out;
}

}  // namespace

SvdResult svd_truncate(const Matrix& a, const SvdTruncation& policy) {
  if (a.size() == 0) return {};
  // Real input (all models here are real) takes the cheaper real decomposition.
  if (a.imag().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::BDCSVD<RealMatrix> svd(a.real(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    return truncate(svd, policy);
  }
  const Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return truncate(svd, policy);
}

Matrix expm_hermitian(const Matrix& a, cplx scale) {
  if (a.rows() > kMaxGateDim || a.cols() > kMaxGateDim) {
    throw Error(ErrorCode::GateTooLarge,
                "gate dimension " + std::to_string(a.rows()) + " exceeds 16 (4 sites)");
  }
  require_hermitian(a, 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (a + a.adjoint()));
  const RealVector& lam = solver.eigenvalues();
  const Matrix& v = solver.eigenvectors();
  Vector e(lam.size());
  for (Index i = 0; i < lam.size(); ++i) e[i] = std::exp(scale * lam[i]);
  return v * e.asDiagonal() * v.adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace tfd::num

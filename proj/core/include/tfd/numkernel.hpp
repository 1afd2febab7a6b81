#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace tfd {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace tfd

namespace tfd::num {

/// Eigen-decomposition of a Hermitian matrix. Energies ascend; columns of
/// `vectors` are orthonormal and phase-fixed (largest-magnitude entry real
/// and positive).
struct EigenSystem {
  RealVector energies;
  Matrix vectors;

  Index dim() const { return energies.size(); }
};

/// Relative Hermiticity check: max|A - A^dagger| <= tol * max|A|.
bool is_hermitian(const Matrix& a, double rel_tol = 1e-12);

/// Largest-magnitude entry (max norm).
double max_abs(const Matrix& a);

EigenSystem hermitian_eig(const Matrix& a, double rel_tol = 1e-12);

/// Only eigenvalues; skips the vector computation.
RealVector hermitian_eigenvalues(const Matrix& a, double rel_tol = 1e-12);

struct SvdTruncation {
  Index max_rank = 1 << 20;
  /// Singular values with s_i / s_max < cutoff are discarded.
  double cutoff = 0.0;
};

struct SvdResult {
  Matrix u;
  RealVector s;
  Matrix v;  // a ~= u * diag(s) * v^dagger
  double discarded_weight = 0.0;
};

SvdResult svd_truncate(const Matrix& a, const SvdTruncation& policy);

/// exp(scale * A) for a Hermitian A of dimension <= 16.
Matrix expm_hermitian(const Matrix& a, cplx scale);

Matrix kron(const Matrix& a, const Matrix& b);

/// Rotates v so its largest-magnitude entry is real and positive.
void fix_phase(Eigen::Ref<Vector> v);

}  // namespace tfd::num

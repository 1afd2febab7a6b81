#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "tfd/numkernel.hpp"

namespace tfd::num {

/// y <- H x. Implementations may assume y is already sized.
using MatVec = std::function<void(const Vector& x, Vector& y)>;

struct LanczosOptions {
  int krylov_max = 300;
  int max_restarts = 40;
  /// Converged when the Ritz residual is <= tol * |H| (|H| estimated from Ritz values).
  double tol = 1e-8;
  std::size_t memory_budget_bytes = std::size_t{1} << 30;
  std::uint64_t seed = 0x5eed;
  bool throw_on_failure = true;
};

struct LanczosResult {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  double norm_estimate = 0.0;
  int matvecs = 0;
  bool converged = false;
};

/// Lowest eigenpair of a Hermitian operator by restarted Lanczos with full
/// reorthogonalization. Vectors in `deflate` (orthonormal) are projected out,
/// which yields the lowest state of the complement.
LanczosResult lanczos_lowest(const MatVec& h, Index dim, const LanczosOptions& opts,
                             const Vector* start = nullptr,
                             std::span<const Vector> deflate = {});

}  // namespace tfd::num

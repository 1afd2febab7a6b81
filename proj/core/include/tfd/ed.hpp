#pragma once

#include <cstdint>
#include <vector>

#include "tfd/lanczos.hpp"
#include "tfd/models.hpp"
#include "tfd/numkernel.hpp"

namespace tfd::ed {

using num::EigenSystem;

/// Basis ordering of a doubled-system state. Zigzag interleaves L_i, R_i on
/// the merged chain; Block stores all L sites then all R sites (L (x) R).
enum class Ordering { Zigzag, Block };

/// Site 0 is the most significant bit of the basis index.
struct StateVector {
  Vector amplitudes;
  Ordering ordering = Ordering::Block;
  int n_sites = 0;

  double norm() const { return amplitudes.norm(); }
};

/// Converts between zigzag and block orderings (exact bit permutation).
StateVector to_ordering(const StateVector& psi, Ordering target);

/// Relabels qubits: new site of old site k is perm[k].
Vector permute_sites(const Vector& v, int n_sites, const std::vector<int>& perm);

/// Matrix-free application of a Pauli sum on up to 62 sites.
class PauliOperator {
 public:
  explicit PauliOperator(const models::PauliSum& h);

  int n_sites() const { return n_sites_; }
  Index dim() const { return Index{1} << n_sites_; }
  void apply(const Vector& x, Vector& y) const;
  num::MatVec matvec() const;
  Matrix dense() const;

 private:
  struct Term {
    std::uint64_t flip;
    std::uint64_t sign;
    cplx coeff;
  };
  int n_sites_ = 0;
  std::vector<Term> terms_;
};

/// Largest number of sites for dense matrices (dimension 4096).
inline constexpr int kDenseMaxSites = 12;
/// Largest supported doubled dimension for the Lanczos path.
inline constexpr int kSparseMaxSites = 20;
/// Up to this many sites ground_state/gap diagonalize densely.
inline constexpr int kDenseSolveMaxSites = 8;

Matrix dense_matrix(const models::PauliSum& h);
Matrix dense_matrix(const models::DoubledSystem& sys, Ordering ordering);

/// Normalized vectorization of exp(-beta H0 / 2) (block ordering: amplitude
/// of |i>_L |j>_R is the (i, j) entry), converted to `ordering`.
StateVector tfd_state(const Matrix& h0, double beta, Ordering ordering);

struct GroundState {
  double energy = 0.0;
  StateVector psi;
  double residual = 0.0;
};

struct SolveOptions {
  num::LanczosOptions lanczos{};
};

GroundState ground_state(const models::DoubledSystem& sys, const SolveOptions& opts = {});
GroundState ground_state(const models::PauliSum& h, const SolveOptions& opts = {});

struct GapResult {
  double delta = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
};

GapResult gap(const models::DoubledSystem& sys, const SolveOptions& opts = {});
GapResult gap(const models::PauliSum& h, const SolveOptions& opts = {});

struct FidelityCurve {
  std::vector<double> betas;
  std::vector<double> overlaps;
  double beta_star = 0.0;
  double f_max = 0.0;
  /// True when the maximum sits on a grid endpoint (no interior optimum).
  bool at_boundary = false;
};

/// 61 log-spaced points in [1e-3, 1e3].
std::vector<double> default_beta_grid();
std::vector<double> log_grid(double lo, double hi, int points);

/// |<TFD_beta|psi>|^2 as a function of beta for a fixed state, computed in
/// the eigenbasis of H0 (basis-independent within degenerate blocks).
class TfdOverlap {
 public:
  TfdOverlap(const EigenSystem& h0_eigs, const StateVector& psi);
  double operator()(double beta) const;

 private:
  RealVector shifted_;  // eps_n - eps_0
  Vector diag_;         // <v_n (x) conj(v_n) | psi>
};

struct ScanOptions {
  double rel_tol = 1e-8;
};

FidelityCurve fidelity_scan(const StateVector& psi, const Matrix& h0,
                            const std::vector<double>& beta_grid, const ScanOptions& opts = {});
FidelityCurve fidelity_scan(const StateVector& psi, const EigenSystem& h0_eigs,
                            const std::vector<double>& beta_grid, const ScanOptions& opts = {});

/// 1 - ||P_diag psi||^2 where P_diag projects on span{v_n (x) conj(v_m)} with
/// |eps_n - eps_m| <= tol * spectral width.
double offdiag_weight(const StateVector& psi, const EigenSystem& h0_eigs, double tol = 1e-10);

/// <H_{0,L}> and its variance in psi.
struct OneSidedMoments {
  double mean = 0.0;
  double variance = 0.0;
};
OneSidedMoments one_sided_moments(const StateVector& psi, const Matrix& h0);

/// Expectation <psi|H|psi> for a Pauli sum in psi's native site order.
double expectation(const models::PauliSum& h, const Vector& psi);

/// Finite stand-in for beta = infinity: 200 / spectral width.
double beta_infinity(const EigenSystem& h0_eigs);

/// Reshapes a block-ordered state into the L-by-R amplitude matrix.
Matrix as_block_matrix(const StateVector& psi);

}  // namespace tfd::ed

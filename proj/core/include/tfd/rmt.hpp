#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tfd/numkernel.hpp"

namespace tfd::rmt {

/// Random-matrix parent Hamiltonian on an L-dimensional space. All RMT
/// routines work in the eigenbasis of H0, where the antiunitary map is plain
/// complex conjugation.
struct RmtConfig {
  Index l = 32;
  int n = 5;
  double j = 1.0;
  double sigma = 1.0;
  int k = 8;
  std::uint64_t seed = 1;

  double jn() const { return j * n; }
  /// Throws InvalidCoupling on j <= 0, sigma <= 0, k < 1 or l != 2^n.
  void validate() const;
};

/// J_c = 2 sigma / N.
double critical_coupling(double sigma, int n);

struct DiagonalSolution {
  /// All L solutions of Tr R(lambda) = 2L/(JN), ascending.
  std::vector<double> lambdas;
  double lambda_star = 0.0;
  double gap0 = 0.0;
  /// |m(lambda_star) - 2/(JN)| / (2/(JN)).
  double residual = 0.0;
  /// Same measure, largest over all non-degenerate roots.
  double max_residual = 0.0;
};

/// m(lambda) = (1/L) sum_n 1/(eps_n - lambda) for a discrete spectrum.
double stieltjes(const RealVector& eigs, double lambda);

/// Roots of m(lambda) = 2/(JN) by bisection. With all_roots = false only
/// lambda_star (below the spectrum) is computed.
DiagonalSolution solve_diagonal(const RealVector& eigs, double j, int n, bool all_roots = true);

/// Unit-norm a_n proportional to 1/(eps_n - lambda). PoleError when lambda
/// hits an eigenvalue.
RealVector resolvent_state(const RealVector& eigs, double lambda);

/// Dense H_inf = H0_L + H0*_R + JN (1 - |inf><inf|) on the L^2 product
/// basis (index n*L + m for |eps_n>|eps_m*>). TooLarge for L > 64.
Matrix build_h_infinity(const RealVector& eigs, double j, int n);

/// Places diagonal amplitudes a_n on the product basis (index n*L + n).
Vector embed_diagonal(const RealVector& a);

/// |<TFD_beta|psi>|^2 where a holds the diagonal amplitudes psi_nn of a
/// unit-norm state (the TFD has no off-diagonal weight).
double diagonal_tfd_overlap(const RealVector& eigs, const Vector& a, double beta);

struct FidelityPeak {
  double beta_star = 0.0;
  double f_max = 0.0;
  bool at_boundary = false;
};

/// Maximizes diagonal_tfd_overlap over a beta grid with golden refinement.
FidelityPeak maximize_diagonal_overlap(const RealVector& eigs, const Vector& a,
                                       const std::vector<double>& beta_grid);

/// Semicircle Stieltjes transform, branch with m -> 0 away from the cut.
/// PoleError for |lambda| < 2 sigma.
double semicircle_stieltjes(double lambda, double sigma);

/// Closed-form overlap |<TFD_beta|GS>|^2 for a semicircle H0 (Bessel series).
double gue_overlap(double j_over_jc, double sigma, double beta);

struct GueAnalytics {
  double m_value = 0.0;
  double lambda_star = 0.0;
  /// 2(eps_min - lambda_star) with eps_min = -2 sigma, i.e. 2 sigma (x + 1/x - 2).
  double gap0 = 0.0;
  double overlap = 0.0;
  double beta_star = 0.0;
  double f_max = 0.0;
};

/// Energies are in units where J_c N = 2 sigma. BelowCritical for
/// j_over_jc < 1 + 1e-6.
GueAnalytics gue_analytics(double j_over_jc, double sigma, double beta);

/// GUE sample with E|h_nm|^2 = sigma^2 / L (spectral edges at +-2 sigma).
Matrix sample_gue(Index l, double sigma, std::mt19937_64& rng);

struct FiniteKResult {
  double w_off = 0.0;
  double f_max = 0.0;
  double beta_star = 0.0;
  double gs_energy = 0.0;
  /// |<GS|resolvent_state(lambda_star)>|^2.
  double resolvent_fidelity = 0.0;
  bool at_boundary = false;
};

/// Exact ground state of the finite-K coupled Hamiltonian
///   H0_L + H0*_R + (JN / 2K) sum_a (O_a,L - O*_a,R)^2
/// with K GUE operators of entry variance 1/L. H0 is a fresh GUE draw unless
/// h0_eigs is given. TooLarge for L > 64. Deterministic in cfg.seed.
FiniteKResult finite_k_experiment(const RmtConfig& cfg, const RealVector* h0_eigs = nullptr,
                                  const std::vector<double>& beta_grid = {});

}  // namespace tfd::rmt

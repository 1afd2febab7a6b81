#pragma once

#include <cstdint>
#include <vector>

#include "tfd/pauli.hpp"

namespace tfd::models {

/// Mixed-field Ising chain with open boundaries:
/// jz sum Z_i Z_{i+1} + hx sum X_i + hz sum Z_i.
PauliSum build_mfi_1d(int n, double jz, double hx, double hz);

/// Mixed-field Ising model on an open nx-by-ny grid; site (x, y) -> x * ny + y.
PauliSum build_mfi_2d(int nx, int ny, double jz, double hx, double hz);

struct DisorderSpec {
  int n = 0;
  int q = 4;
  double j_scale = 1.0;
  std::uint64_t seed = 0;
  std::int64_t realization_index = 0;
};

/// Variance of the spin-SYK couplings:
/// J^2 (q-1)! / (q n^(q-1) 2^(q-1)).
double spin_syk_variance(int n, int q, double j_scale);

/// All-to-all q-body X/Y Pauli model keeping only strings with an even number
/// of Y factors (real in the computational basis).
PauliSum sample_spin_syk(const DisorderSpec& spec);

/// Complex conjugation in the computational basis: Y -> -Y.
PauliSum conjugate_spec(const PauliSum& h);

enum class Copy { Left, Right };

/// Merged-chain index of site i of the given copy: L_i -> 2i, R_i -> 2i+1.
constexpr int zigzag_site(Copy copy, int i) { return 2 * i + (copy == Copy::Right ? 1 : 0); }

/// Two mirrored copies of H0 with the LR coupling c * sum_a (O_a,L - O*_a,R)^2
/// and the penalty (xi / 2N) (H_L - H*_R)^2, all on the zigzag merged chain.
struct DoubledSystem {
  int n = 0;  // sites per copy
  PauliSum left;              // H0 on copy sites 0..n-1
  PauliSum right_conjugated;  // H0* on copy sites 0..n-1
  PauliSum lr_coupling_terms; // merged chain, 2n sites
  PauliSum penalty_terms;     // merged chain, 2n sites (empty when xi == 0)
  double coupling_c = 0.0;
  double penalty_xi = 0.0;
  bool include_constant = true;

  int merged_sites() const { return 2 * n; }
  /// site_map[copy_site] for the given copy.
  std::vector<int> site_map(Copy copy) const;
  PauliSum left_merged() const;
  PauliSum right_merged() const;
  /// H_L + H*_R + coupling + penalty on the merged chain.
  PauliSum total() const;
};

/// Per-operator prefactor JN/(2K) of the coupling sum; equals J/4 for K = 2N.
constexpr double coupling_from_j(double j, int n, int k) { return j * n / (2.0 * k); }

/// {X_i, Z_i}: the mixed-field Ising coupling set (K = 2N).
std::vector<PauliSum> mfi_couplings(int n);
/// {X_i, Y_i}: the spin-SYK coupling set.
std::vector<PauliSum> syk_couplings(int n);

DoubledSystem build_parent(const PauliSum& h0, const std::vector<PauliSum>& coupling_ops,
                           double c, double xi, bool include_constant = true);

/// H0 = (1 - Z)/2 with the coupling -c (X_L X_R + Z_L Z_R) (plus constant);
/// this is the parent above at c/2. Its ground state is exactly the TFD at
/// beta = 2 asinh(1/c).
DoubledSystem single_spin_toy(double c, bool include_constant = true);
PauliSum single_spin_h0();

}  // namespace tfd::models

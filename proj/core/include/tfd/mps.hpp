#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tfd/numkernel.hpp"

namespace tfd::mps {

using Matrix2 = Eigen::Matrix2cd;

struct Truncation {
  Index max_bond = 625;
  /// Singular values with s_i / s_max below this are dropped.
  double cutoff = 1e-10;
};

/// Open-boundary tensor train with physical dimension 2. Site i stores one
/// Dl-by-Dr matrix per physical state; the outer bonds have dimension 1.
class TensorTrainState {
 public:
  using Site = std::array<Matrix, 2>;

  TensorTrainState() = default;
  explicit TensorTrainState(std::vector<Site> sites);

  int size() const { return static_cast<int>(sites_.size()); }
  const Site& site(int i) const { return sites_.at(i); }
  /// Mutable access drops the canonical-form bookkeeping.
  Site& mutable_site(int i);

  /// Dimension of the bond between sites b and b + 1.
  Index bond_dim(int b) const { return sites_.at(b)[0].cols(); }
  Index max_bond() const;
  /// Canonical center, or -1 when the gauge is unknown.
  int center() const { return center_; }

  /// Left-isometries left of k, right-isometries right of k (exact QR moves).
  void canonicalize(int k);
  /// Shifts an existing center to k; canonicalizes first when needed.
  void move_center(int k);
  bool is_canonical(double tol = 1e-10) const;

  double norm() const;
  /// Scales the state to unit norm; returns the previous norm.
  double normalize();

  /// Sum of discarded weights from all truncations applied so far.
  double discarded_weight() const { return discarded_; }
  void add_discarded(double w) { discarded_ += w; }

  /// Single-site operator g(s', s). Unitary gates keep the gauge; others move
  /// the center onto i first.
  void apply_one_site(int i, const Matrix2& g, bool unitary);
  /// 4x4 gate on (i, i+1) indexed s_i * 2 + s_{i+1}. The center ends on i+1
  /// when sweeping right, on i otherwise.
  void apply_two_site(int i, const Matrix& gate, const Truncation& trunc, bool sweep_right);
  /// 4x4 gate on (i, i+2) acting as identity on i+1: the three-site block is
  /// contracted, the gate applied to its outer legs and the block split by two
  /// SVDs. The center ends on i+1.
  void apply_distance_two(int i, const Matrix& gate, const Truncation& trunc, bool sweep_right);

  /// Replaces sites (i, i+1) by the SVD split of `theta` (rows (s_i, left
  /// bond), columns (s_{i+1}, right bond)); returns the discarded weight.
  double split_two_site(int i, const Matrix& theta, const Truncation& trunc, bool sweep_right,
                        bool renormalize = false);

  /// Dense amplitudes, site 0 most significant (n <= 24).
  Vector to_dense() const;
  static TensorTrainState from_dense(const Vector& v, int n_sites, const Truncation& trunc = {1 << 20, 0.0});

 private:
  Matrix left_merge(int i) const;   // rows (s, Dl), cols Dr
  Matrix right_merge(int i) const;  // rows Dl, cols (s, Dr)
  void set_from_left(int i, const Matrix& m);
  void set_from_right(int i, const Matrix& m);
  void shift_right(int i);
  void shift_left(int i);

  std::vector<Site> sites_;
  int center_ = -1;
  double discarded_ = 0.0;
};

/// <a|b> by exact contraction.
cplx overlap(const TensorTrainState& a, const TensorTrainState& b);

/// a + weight * b as a tensor train with block-diagonal bonds.
TensorTrainState add(const TensorTrainState& a, const TensorTrainState& b, cplx weight = 1.0);

/// Interleaved Bell pairs (|00> + |11>)/sqrt(2) on merged sites (2i, 2i+1).
TensorTrainState mps_bell(int n_pairs);
/// Computational basis product state; bits[i] is the state of site i.
TensorTrainState product_state(const std::vector<int>& bits);
/// Random normalized state with the given uniform bond dimension. Entries are
/// complex Gaussian, or real Gaussian when real_amplitudes is set.
TensorTrainState random_state(int n_sites, Index bond, std::uint64_t seed, bool real_amplitudes = false);

}  // namespace tfd::mps

#pragma once

#include <string>
#include <vector>

#include "tfd/models.hpp"
#include "tfd/mps.hpp"

namespace tfd::mps {

/// One MPO site: a wl-by-wr grid of 2x2 operators W(a, b)(s', s).
struct MpoSite {
  Index wl = 1;
  Index wr = 1;
  std::vector<Matrix2> blocks;  // row-major in (a, b)

  MpoSite() = default;
  MpoSite(Index wl_, Index wr_) : wl(wl_), wr(wr_), blocks(wl_ * wr_, Matrix2::Zero()) {}
  Matrix2& at(Index a, Index b) { return blocks[a * wr + b]; }
  const Matrix2& at(Index a, Index b) const { return blocks[a * wr + b]; }
};

class TensorTrainOperator {
 public:
  TensorTrainOperator() = default;
  TensorTrainOperator(std::vector<MpoSite> sites, std::string label = {});

  int size() const { return static_cast<int>(sites_.size()); }
  const MpoSite& site(int i) const { return sites_.at(i); }
  const std::vector<MpoSite>& sites() const { return sites_; }
  const std::string& label() const { return label_; }
  Index max_bond() const;

 private:
  std::vector<MpoSite> sites_;
  std::string label_;
};

struct CompileOptions {
  /// Largest term span accepted without compression.
  int max_span = 4;
  /// Allow longer terms and compress the result.
  bool compress = false;
  double cutoff = 1e-12;
};

/// Finite-state-automaton MPO of a Pauli sum; channels are shared between
/// terms with identical remaining operator patterns.
TensorTrainOperator compile_mpo(const models::PauliSum& h, const CompileOptions& opts = {});

/// MPO of the full doubled Hamiltonian on the zigzag chain. The penalty is
/// built as the compressed square of the (H_L - H*_R) MPO.
TensorTrainOperator compile_mpo(const models::DoubledSystem& sys, const CompileOptions& opts = {});

/// Operator product a * b (bond dimensions multiply).
TensorTrainOperator product(const TensorTrainOperator& a, const TensorTrainOperator& b);
TensorTrainOperator sum(const TensorTrainOperator& a, const TensorTrainOperator& b);
TensorTrainOperator scaled(const TensorTrainOperator& a, cplx factor);
/// SVD compression sweeps; singular values below cutoff * s_max are dropped.
TensorTrainOperator compress(const TensorTrainOperator& a, double cutoff = 1e-12);

cplx expectation(const TensorTrainOperator& op, const TensorTrainState& bra, const TensorTrainState& ket);
/// <psi|O|psi> / <psi|psi>, real part.
double expectation(const TensorTrainOperator& op, const TensorTrainState& psi);

/// Dense matrix (at most 12 sites).
Matrix to_dense(const TensorTrainOperator& op);

}  // namespace tfd::mps

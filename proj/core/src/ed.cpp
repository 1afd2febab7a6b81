#include "tfd/ed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfd/error.hpp"
#include "tfd/optimize.hpp"

namespace tfd::ed {

namespace {

std::vector<int> zigzag_to_block_perm(int n_sites) {
  const int n = n_sites / 2;
  std::vector<int> perm(n_sites);
  for (int k = 0; k < n_sites; ++k) perm[k] = (k % 2 == 0) ? k / 2 : n + k / 2;
  return perm;
}

std::vector<int> inverse(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  return inv;
}

void require_sites(int n_sites, int limit, const char* what) {
  if (n_sites > limit) {
    throw Error(ErrorCode::TooLarge, std::string(what) + ": " + std::to_string(n_sites) +
                                         " sites exceeds limit of " + std::to_string(limit));
  }
}

int log2_dim(Index dim) {
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  if ((Index{1} << n) != dim) {
    throw Error(ErrorCode::Incompatible, "dimension " + std::to_string(dim) + " is not a power of two");
  }
  return n;
}

}  // namespace

Vector permute_sites(const Vector& v, int n_sites, const std::vector<int>& perm) {
  const Index dim = v.size();
  Vector out(dim);
  for (Index b = 0; b < dim; ++b) {
    Index nb = 0;
    for (int k = 0; k < n_sites; ++k) {
      if ((b >> (n_sites - 1 - k)) & 1) nb |= Index{1} << (n_sites - 1 - perm[k]);
    }
    out[nb] = v[b];
  }
  return out;
}

StateVector to_ordering(const StateVector& psi, Ordering target) {
  if (psi.ordering == target) return psi;
  if (psi.n_sites % 2 != 0) throw Error(ErrorCode::Incompatible, "doubled state needs an even site count");
  const auto z2b = zigzag_to_block_perm(psi.n_sites);
  const auto& perm = (psi.ordering == Ordering::Zigzag) ? z2b : inverse(z2b);
  return StateVector{permute_sites(psi.amplitudes, psi.n_sites, perm), target, psi.n_sites};
}

PauliOperator::PauliOperator(const models::PauliSum& h) : n_sites_(h.n_sites()) {
  require_sites(n_sites_, 62, "PauliOperator");
  for (const auto& t : h.terms()) {
    Term term{0, 0, t.coefficient};
    int n_y = 0;
    for (const auto& [site, op] : t.ops) {
      const std::uint64_t bit = std::uint64_t{1} << (n_sites_ - 1 - site);
      if (op == models::Pauli::X || op == models::Pauli::Y) term.flip |= bit;
      if (op == models::Pauli::Z || op == models::Pauli::Y) term.sign |= bit;
      if (op == models::Pauli::Y) ++n_y;
    }
    static const cplx kIPow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    term.coeff *= kIPow[n_y % 4];
    terms_.push_back(term);
  }
}

void PauliOperator::apply(const Vector& x, Vector& y) const {
  const Index d = dim();
  if (y.size() != d) y.resize(d);
  y.setZero();
  for (const Term& t : terms_) {
    if (t.sign == 0) {
      for (Index b = 0; b < d; ++b) y[b ^ static_cast<Index>(t.flip)] += t.coeff * x[b];
    } else {
      for (Index b = 0; b < d; ++b) {
        const bool odd = __builtin_parityll(static_cast<std::uint64_t>(b) & t.sign);
        y[b ^ static_cast<Index>(t.flip)] += (odd ? -t.coeff : t.coeff) * x[b];
      }
    }
  }
}

num::MatVec PauliOperator::matvec() const {
  return [this](const Vector& x, Vector& y) { apply(x, y); };
}

Matrix PauliOperator::dense() const {
  require_sites(n_sites_, kDenseMaxSites, "dense matrix");
  const Index d = dim();
  Matrix m = Matrix::Zero(d, d);
  for (const Term& t : terms_) {
    for (Index b = 0; b < d; ++b) {
      const bool odd = __builtin_parityll(static_cast<std::uint64_t>(b) & t.sign);
      m(b ^ static_cast<Index>(t.flip), b) += odd ? -t.coeff : t.coeff;
    }
  }
  return m;
}

Matrix dense_matrix(const models::PauliSum& h) { return PauliOperator(h).dense(); }

Matrix dense_matrix(const models::DoubledSystem& sys, Ordering ordering) {
  models::PauliSum total = sys.total();
  require_sites(total.n_sites(), kDenseMaxSites, "dense matrix");
  if (ordering == Ordering::Block) total = total.remapped(zigzag_to_block_perm(total.n_sites()), total.n_sites());
  return dense_matrix(total);
}

Matrix as_block_matrix(const StateVector& psi) {
  const StateVector block = to_ordering(psi, Ordering::Block);
  const Index d = Index{1} << (block.n_sites / 2);
  // Row-major (i_L, j_R) layout of the amplitude vector.
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) m(i, j) = block.amplitudes[i * d + j];
  }
  return m;
}

StateVector tfd_state(const Matrix& h0, double beta, Ordering ordering) {
  if (!std::isfinite(beta) || beta < 0.0) throw Error(ErrorCode::InvalidGrid, "beta must be finite and >= 0");
  const double scale = std::max(num::max_abs(h0), 1e-300);
  if (h0.imag().cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::AntiunitaryMismatch,
                "H0 is not real; complex conjugation does not map its eigenbasis correctly");
  }
  const EigenSystem eig = num::hermitian_eig(h0);
  const Index d = eig.dim();
  const int n = log2_dim(d);
  Vector w(d);
  for (Index k = 0; k < d; ++k) w[k] = std::exp(-0.5 * beta * (eig.energies[k] - eig.energies[0]));
  const Matrix t = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
  Vector amps(d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) amps[i * d + j] = t(i, j);
  }
  amps.normalize();
  return to_ordering(StateVector{std::move(amps), Ordering::Block, 2 * n}, ordering);
}

GroundState ground_state(const models::PauliSum& h, const SolveOptions& opts) {
  require_sites(h.n_sites(), kSparseMaxSites, "ground_state");
  const PauliOperator op(h);
  GroundState gs;
  gs.psi.n_sites = h.n_sites();
  gs.psi.ordering = Ordering::Zigzag;
  if (h.n_sites() <= kDenseSolveMaxSites) {
    const EigenSystem eig = num::hermitian_eig(op.dense(), 1e-10);
    gs.energy = eig.energies[0];
    gs.psi.amplitudes = eig.vectors.col(0);
  } else {
    const auto res = num::lanczos_lowest(op.matvec(), op.dim(), opts.lanczos);
    gs.energy = res.value;
    gs.psi.amplitudes = res.vector;
    num::fix_phase(gs.psi.amplitudes);
  }
  Vector hv;
  op.apply(gs.psi.amplitudes, hv);
  gs.residual = (hv - gs.energy * gs.psi.amplitudes).norm();
  return gs;
}

GroundState ground_state(const models::DoubledSystem& sys, const SolveOptions& opts) {
  return ground_state(sys.total(), opts);
}

GapResult gap(const models::PauliSum& h, const SolveOptions& opts) {
  require_sites(h.n_sites(), kSparseMaxSites, "gap");
  const PauliOperator op(h);
  GapResult out;
  if (h.n_sites() <= kDenseSolveMaxSites) {
    const RealVector ev = num::hermitian_eigenvalues(op.dense(), 1e-10);
    out.e0 = ev[0];
    out.e1 = ev.size() > 1 ? ev[1] : ev[0];
  } else {
    const auto r0 = num::lanczos_lowest(op.matvec(), op.dim(), opts.lanczos);
    const Vector locked[1] = {r0.vector};
    const auto r1 = num::lanczos_lowest(op.matvec(), op.dim(), opts.lanczos, nullptr, locked);
    out.e0 = r0.value;
    out.e1 = r1.value;
  }
  out.delta = out.e1 - out.e0;
  return out;
}

GapResult gap(const models::DoubledSystem& sys, const SolveOptions& opts) {
  return gap(sys.total(), opts);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (points < 1 || lo <= 0.0 || hi < lo) throw Error(ErrorCode::InvalidGrid, "bad log grid");
  std::vector<double> g(points);
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

std::vector<double> default_beta_grid() { return log_grid(1e-3, 1e3, 61); }

TfdOverlap::TfdOverlap(const EigenSystem& h0_eigs, const StateVector& psi) {
  const Matrix amp = as_block_matrix(psi);
  if (amp.rows() != h0_eigs.dim()) {
    throw Error(ErrorCode::Incompatible, "state and H0 dimensions differ");
  }
  const Matrix& v = h0_eigs.vectors;
  const Matrix av = amp * v;
  diag_.resize(h0_eigs.dim());
  for (Index n = 0; n < h0_eigs.dim(); ++n) diag_[n] = v.col(n).dot(av.col(n));
  shifted_ = h0_eigs.energies.array() - h0_eigs.energies[0];
  diag_ /= std::max(amp.norm(), 1e-300);
}

double TfdOverlap::operator()(double beta) const {
  cplx num = 0.0;
  double z = 0.0;
  for (Index n = 0; n < shifted_.size(); ++n) {
    const double w = std::exp(-0.5 * beta * shifted_[n]);
    num += w * diag_[n];
    z += w * w;
  }
  return std::norm(num) / z;
}

FidelityCurve fidelity_scan(const StateVector& psi, const EigenSystem& h0_eigs,
                            const std::vector<double>& beta_grid, const ScanOptions& opts) {
  if (beta_grid.empty()) throw Error(ErrorCode::InvalidGrid, "empty beta grid");
  for (double b : beta_grid) {
    if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::InvalidGrid, "beta grid must be positive");
  }
  const TfdOverlap overlap(h0_eigs, psi);
  const GridMaximum best =
      maximize_on_grid([&](double x) { return overlap(x); }, beta_grid, opts.rel_tol);
  FidelityCurve curve;
  curve.betas = best.xs;
  curve.overlaps = best.values;
  curve.beta_star = best.x_star;
  curve.f_max = best.f_max;
  curve.at_boundary = best.at_boundary;
  return curve;
}

FidelityCurve fidelity_scan(const StateVector& psi, const Matrix& h0,
                            const std::vector<double>& beta_grid, const ScanOptions& opts) {
  return fidelity_scan(psi, num::hermitian_eig(h0), beta_grid, opts);
}

double offdiag_weight(const StateVector& psi, const EigenSystem& h0_eigs, double tol) {
  const Matrix amp = as_block_matrix(psi);
  const Matrix c = h0_eigs.vectors.adjoint() * amp * h0_eigs.vectors;
  const RealVector& e = h0_eigs.energies;
  const Index d = e.size();
  const double width = e[d - 1] - e[0];
  const double thr = tol * width;
  double diag = 0.0;
  for (Index n = 0; n < d; ++n) {
    // Energies are sorted, so the degenerate partners of n are contiguous.
    for (Index m = n; m >= 0 && e[n] - e[m] <= thr; --m) diag += std::norm(c(n, m)) + (m != n ? std::norm(c(m, n)) : 0.0);
  }
  const double total = amp.squaredNorm();
  return std::clamp(1.0 - diag / total, 0.0, 1.0);
}

OneSidedMoments one_sided_moments(const StateVector& psi, const Matrix& h0) {
  const Matrix amp = as_block_matrix(psi);
  const Matrix h_amp = h0 * amp;
  const double norm2 = amp.squaredNorm();
  OneSidedMoments m;
  m.mean = (amp.conjugate().cwiseProduct(h_amp)).sum().real() / norm2;
  m.variance = std::max(0.0, h_amp.squaredNorm() / norm2 - m.mean * m.mean);
  return m;
}

double expectation(const models::PauliSum& h, const Vector& psi) {
  const PauliOperator op(h);
  Vector hv;
  op.apply(psi, hv);
  return psi.dot(hv).real() / psi.squaredNorm();
}

double beta_infinity(const EigenSystem& h0_eigs) {
  const double width = h0_eigs.energies[h0_eigs.dim() - 1] - h0_eigs.energies[0];
  return width > 0.0 ? 200.0 / width : 200.0;
}

}  // namespace tfd::ed

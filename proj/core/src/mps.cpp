#include "tfd/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tfd/error.hpp"

namespace tfd::mps {

namespace {

// Thin QR: m = q * r with q having min(rows, cols) orthonormal columns.
void thin_qr(const Matrix& m, Matrix& q, Matrix& r) {
  const Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

}  // namespace

TensorTrainState::TensorTrainState(std::vector<Site> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw Error(ErrorCode::EmptyLattice, "tensor train needs at least one site");
  if (sites_.front()[0].rows() != 1 || sites_.back()[0].cols() != 1) {
    throw Error(ErrorCode::Incompatible, "boundary bonds must have dimension 1");
  }
  for (int i = 0; i < size(); ++i) {
    const Site& s = sites_[i];
    if (s[0].rows() != s[1].rows() || s[0].cols() != s[1].cols()) {
      throw Error(ErrorCode::Incompatible, "site " + std::to_string(i) + " has mismatched blocks");
    }
    if (i + 1 < size() && s[0].cols() != sites_[i + 1][0].rows()) {
      throw Error(ErrorCode::Incompatible, "bond " + std::to_string(i) + " dimensions disagree");
    }
  }
}

TensorTrainState::Site& TensorTrainState::mutable_site(int i) {
  center_ = -1;
  return sites_.at(i);
}

Index TensorTrainState::max_bond() const {
  Index m = 1;
  for (int b = 0; b + 1 < size(); ++b) m = std::max(m, bond_dim(b));
  return m;
}

Matrix TensorTrainState::left_merge(int i) const {
  const Site& a = sites_[i];
  const Index dl = a[0].rows();
  Matrix m(2 * dl, a[0].cols());
  m.topRows(dl) = a[0];
  m.bottomRows(dl) = a[1];
  return m;
}

Matrix TensorTrainState::right_merge(int i) const {
  const Site& a = sites_[i];
  const Index dr = a[0].cols();
  Matrix m(a[0].rows(), 2 * dr);
  m.leftCols(dr) = a[0];
  m.rightCols(dr) = a[1];
  return m;
}

void TensorTrainState::set_from_left(int i, const Matrix& m) {
  const Index dl = m.rows() / 2;
  sites_[i][0] = m.topRows(dl);
  sites_[i][1] = m.bottomRows(dl);
}

void TensorTrainState::set_from_right(int i, const Matrix& m) {
  const Index dr = m.cols() / 2;
  sites_[i][0] = m.leftCols(dr);
  sites_[i][1] = m.rightCols(dr);
}

void TensorTrainState::shift_right(int i) {
  Matrix q, r;
  thin_qr(left_merge(i), q, r);
  set_from_left(i, q);
  for (auto& a : sites_[i + 1]) a = r * a;
  center_ = i + 1;
}

void TensorTrainState::shift_left(int i) {
  Matrix q, r;
  thin_qr(right_merge(i).adjoint(), q, r);
  set_from_right(i, q.adjoint());
  const Matrix ra = r.adjoint();
  for (auto& a : sites_[i - 1]) a = a * ra;
  center_ = i - 1;
}

void TensorTrainState::canonicalize(int k) {
  if (k < 0 || k >= size()) throw Error(ErrorCode::Incompatible, "canonical center out of range");
  for (int i = 0; i < k; ++i) shift_right(i);
  for (int i = size() - 1; i > k; --i) shift_left(i);
  center_ = k;
}

void TensorTrainState::move_center(int k) {
  if (center_ < 0) {
    canonicalize(k);
    return;
  }
  while (center_ < k) shift_right(center_);
  while (center_ > k) shift_left(center_);
}

bool TensorTrainState::is_canonical(double tol) const {
  if (center_ < 0) return false;
  for (int i = 0; i < size(); ++i) {
    if (i == center_) continue;
    const Site& a = sites_[i];
    Matrix g;
    if (i < center_) {
      g = a[0].adjoint() * a[0] + a[1].adjoint() * a[1];
    } else {
      g = a[0] * a[0].adjoint() + a[1] * a[1].adjoint();
    }
    if (num::max_abs(g - Matrix::Identity(g.rows(), g.cols())) > tol) return false;
  }
  return true;
}

double TensorTrainState::norm() const {
  if (center_ >= 0) {
    const Site& c = sites_[center_];
    return std::sqrt(c[0].squaredNorm() + c[1].squaredNorm());
  }
  return std::sqrt(std::max(0.0, overlap(*this, *this).real()));
}

double TensorTrainState::normalize() {
  if (center_ < 0) canonicalize(0);
  const double n = norm();
  if (n > 0.0) {
    for (auto& a : sites_[center_]) a /= n;
  }
  return n;
}

void TensorTrainState::apply_one_site(int i, const Matrix2& g, bool unitary) {
  if (!unitary) move_center(i);
  Site& a = sites_.at(i);
  const Matrix a0 = a[0];
  a[0] = g(0, 0) * a0 + g(0, 1) * a[1];
  a[1] = g(1, 0) * a0 + g(1, 1) * a[1];
}

void TensorTrainState::apply_two_site(int i, const Matrix& gate, const Truncation& trunc, bool sweep_right) {
  if (i < 0 || i + 1 >= size()) throw Error(ErrorCode::Incompatible, "two-site gate out of range");
  move_center(std::clamp(center_ < 0 ? i : center_, i, i + 1));
  const Site& a = sites_[i];
  const Site& b = sites_[i + 1];
  const Index dl = a[0].rows(), dr = b[0].cols();
  Matrix theta[4];
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) theta[s1 * 2 + s2] = a[s1] * b[s2];
  }
  Matrix big = Matrix::Zero(2 * dl, 2 * dr);
  for (int out = 0; out < 4; ++out) {
    auto blk = big.block((out / 2) * dl, (out % 2) * dr, dl, dr);
    for (int in = 0; in < 4; ++in) {
      if (gate(out, in) != 0.0) blk += gate(out, in) * theta[in];
    }
  }
  split_two_site(i, big, trunc, sweep_right);
}

double TensorTrainState::split_two_site(int i, const Matrix& theta, const Truncation& trunc, bool sweep_right,
                                        bool renormalize) {
  auto svd = num::svd_truncate(theta, {trunc.max_bond, trunc.cutoff});
  discarded_ += svd.discarded_weight;
  if (renormalize && svd.s.norm() > 0.0) svd.s /= svd.s.norm();
  const Matrix vh = svd.v.adjoint();
  if (sweep_right) {
    set_from_left(i, svd.u);
    set_from_right(i + 1, svd.s.cast<cplx>().asDiagonal() * vh);
    center_ = i + 1;
  } else {
    set_from_left(i, svd.u * svd.s.cast<cplx>().asDiagonal());
    set_from_right(i + 1, vh);
    center_ = i;
  }
  return svd.discarded_weight;
}

void TensorTrainState::apply_distance_two(int i, const Matrix& gate, const Truncation& trunc,
                                          bool sweep_right) {
  if (i < 0 || i + 2 >= size()) throw Error(ErrorCode::Incompatible, "distance-two gate out of range");
  move_center(std::clamp(center_ < 0 ? i : center_, i, i + 2));
  const Site& a = sites_[i];
  const Site& m = sites_[i + 1];
  const Site& b = sites_[i + 2];
  const Index dl = a[0].rows(), dr = b[0].cols();

  // theta3[(s1 s2 s3)] = A_i[s1] A_{i+1}[s2] A_{i+2}[s3]
  Matrix theta[8];
  for (int s1 = 0; s1 < 2; ++s1) {
    for (int s2 = 0; s2 < 2; ++s2) {
      const Matrix am = a[s1] * m[s2];
      for (int s3 = 0; s3 < 2; ++s3) theta[s1 * 4 + s2 * 2 + s3] = am * b[s3];
    }
  }
  Matrix gated[8];
  for (int s2 = 0; s2 < 2; ++s2) {
    for (int out = 0; out < 4; ++out) {
      Matrix acc = Matrix::Zero(dl, dr);
      for (int in = 0; in < 4; ++in) {
        if (gate(out, in) != 0.0) acc += gate(out, in) * theta[(in / 2) * 4 + s2 * 2 + (in % 2)];
      }
      gated[(out / 2) * 4 + s2 * 2 + (out % 2)] = std::move(acc);
    }
  }

  const num::SvdTruncation policy{trunc.max_bond, trunc.cutoff};
  if (sweep_right) {
    // Split (s1 | s2 s3), then (s2 | s3).
    Matrix m1(2 * dl, 4 * dr);
    for (int k = 0; k < 8; ++k) m1.block((k / 4) * dl, (k % 4) * dr, dl, dr) = gated[k];
    const auto svd1 = num::svd_truncate(m1, policy);
    discarded_ += svd1.discarded_weight;
    set_from_left(i, svd1.u);
    const Matrix rest = svd1.s.cast<cplx>().asDiagonal() * svd1.v.adjoint();
    const Index k1 = rest.rows();
    Matrix m2(2 * k1, 2 * dr);
    for (int s2 = 0; s2 < 2; ++s2) {
      for (int s3 = 0; s3 < 2; ++s3) m2.block(s2 * k1, s3 * dr, k1, dr) = rest.middleCols((s2 * 2 + s3) * dr, dr);
    }
    const auto svd2 = num::svd_truncate(m2, policy);
    discarded_ += svd2.discarded_weight;
    set_from_left(i + 1, svd2.u * svd2.s.cast<cplx>().asDiagonal());
    set_from_right(i + 2, svd2.v.adjoint());
  } else {
    // Split (s1 s2 | s3), then (s1 | s2).
    Matrix m1(4 * dl, 2 * dr);
    for (int k = 0; k < 8; ++k) m1.block((k / 2) * dl, (k % 2) * dr, dl, dr) = gated[k];
    const auto svd1 = num::svd_truncate(m1, policy);
    discarded_ += svd1.discarded_weight;
    set_from_right(i + 2, svd1.v.adjoint());
    const Matrix rest = svd1.u * svd1.s.cast<cplx>().asDiagonal();
    const Index k1 = rest.cols();
    Matrix m2(2 * dl, 2 * k1);
    for (int s1 = 0; s1 < 2; ++s1) {
      for (int s2 = 0; s2 < 2; ++s2) m2.block(s1 * dl, s2 * k1, dl, k1) = rest.middleRows((s1 * 2 + s2) * dl, dl);
    }
    const auto svd2 = num::svd_truncate(m2, policy);
    discarded_ += svd2.discarded_weight;
    set_from_left(i, svd2.u);
    set_from_right(i + 1, svd2.s.cast<cplx>().asDiagonal() * svd2.v.adjoint());
  }
  center_ = i + 1;
}

Vector TensorTrainState::to_dense() const {
  if (size() > 24) throw Error(ErrorCode::TooLarge, "to_dense supports at most 24 sites");
  Matrix acc = Matrix::Ones(1, 1);
  for (const Site& a : sites_) {
    Matrix next(acc.rows() * 2, a[0].cols());
    for (Index r = 0; r < acc.rows(); ++r) {
      for (int s = 0; s < 2; ++s) next.row(r * 2 + s) = acc.row(r) * a[s];
    }
    acc = std::move(next);
  }
  return acc.col(0);
}

TensorTrainState TensorTrainState::from_dense(const Vector& v, int n_sites, const Truncation& trunc) {
  if (n_sites < 1 || v.size() != (Index{1} << n_sites)) {
    throw Error(ErrorCode::Incompatible, "vector length does not match 2^n_sites");
  }
  std::vector<Site> sites(n_sites);
  Matrix rest = v.transpose();
  double discarded = 0.0;
  for (int i = 0; i + 1 < n_sites; ++i) {
    const Index dl = rest.rows();
    const Index half = rest.cols() / 2;
    Matrix m(2 * dl, half);
    m.topRows(dl) = rest.leftCols(half);
    m.bottomRows(dl) = rest.rightCols(half);
    const auto svd = num::svd_truncate(m, {trunc.max_bond, trunc.cutoff});
    discarded += svd.discarded_weight;
    sites[i][0] = svd.u.topRows(dl);
    sites[i][1] = svd.u.bottomRows(dl);
    rest = svd.s.cast<cplx>().asDiagonal() * svd.v.adjoint();
  }
  sites[n_sites - 1][0] = rest.col(0);
  sites[n_sites - 1][1] = rest.col(1);
  TensorTrainState out(std::move(sites));
  out.center_ = n_sites - 1;
  out.discarded_ = discarded;
  return out;
}

cplx overlap(const TensorTrainState& a, const TensorTrainState& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::Incompatible, "overlap of tensor trains with different lengths");
  }
  Matrix env = Matrix::Ones(1, 1);
  for (int i = 0; i < a.size(); ++i) {
    const auto& x = a.site(i);
    const auto& y = b.site(i);
    env = x[0].adjoint() * env * y[0] + x[1].adjoint() * env * y[1];
  }
  return env(0, 0);
}

TensorTrainState add(const TensorTrainState& a, const TensorTrainState& b, cplx weight) {
  if (a.size() != b.size()) throw Error(ErrorCode::Incompatible, "sum of tensor trains with different lengths");
  const int n = a.size();
  std::vector<TensorTrainState::Site> sites(n);
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < 2; ++s) {
      const Matrix& x = a.site(i)[s];
      const Matrix y = i == 0 ? Matrix(weight * b.site(i)[s]) : b.site(i)[s];
      if (n == 1) {
        sites[i][s] = x + y;
      } else if (i == 0) {
        sites[i][s].resize(1, x.cols() + y.cols());
        sites[i][s] << x, y;
      } else if (i == n - 1) {
        sites[i][s].resize(x.rows() + y.rows(), 1);
        sites[i][s] << x, y;
      } else {
        sites[i][s] = Matrix::Zero(x.rows() + y.rows(), x.cols() + y.cols());
        sites[i][s].topLeftCorner(x.rows(), x.cols()) = x;
        sites[i][s].bottomRightCorner(y.rows(), y.cols()) = y;
      }
    }
  }
  return TensorTrainState(std::move(sites));
}

TensorTrainState mps_bell(int n_pairs) {
  if (n_pairs < 1) throw Error(ErrorCode::EmptyLattice, "Bell product needs at least one pair");
  std::vector<TensorTrainState::Site> sites(2 * n_pairs);
  const double amp = 1.0 / std::sqrt(2.0);
  for (int p = 0; p < n_pairs; ++p) {
    for (int s = 0; s < 2; ++s) {
      sites[2 * p][s] = Matrix::Zero(1, 2);
      sites[2 * p][s](0, s) = amp;
      sites[2 * p + 1][s] = Matrix::Zero(2, 1);
      sites[2 * p + 1][s](s, 0) = 1.0;
    }
  }
  TensorTrainState out(std::move(sites));
  out.canonicalize(0);
  return out;
}

TensorTrainState product_state(const std::vector<int>& bits) {
  std::vector<TensorTrainState::Site> sites(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    for (int s = 0; s < 2; ++s) sites[i][s] = Matrix::Constant(1, 1, s == bits[i] ? 1.0 : 0.0);
  }
  TensorTrainState out(std::move(sites));
  out.canonicalize(0);
  return out;
}

TensorTrainState random_state(int n_sites, Index bond, std::uint64_t seed, bool real_amplitudes) {
  if (n_sites < 1) throw Error(ErrorCode::EmptyLattice, "random state needs at least one site");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  auto cap = [&](int b) {
    // Bond after site b: at most 2^(b+1) and 2^(n-b-1).
    const int lg = std::min(b + 1, n_sites - b - 1);
    return lg >= 30 ? bond : std::min<Index>(bond, Index{1} << lg);
  };
  std::vector<TensorTrainState::Site> sites(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    const Index dl = i == 0 ? 1 : cap(i - 1);
    const Index dr = i == n_sites - 1 ? 1 : cap(i);
    for (int s = 0; s < 2; ++s) {
      sites[i][s].resize(dl, dr);
      for (Index r = 0; r < dl; ++r) {
        for (Index c = 0; c < dr; ++c) {
          const double re = g(rng);
          sites[i][s](r, c) = cplx(re, real_amplitudes ? 0.0 : g(rng));
        }
      }
    }
  }
  TensorTrainState out(std::move(sites));
  out.canonicalize(0);
  out.normalize();
  return out;
}

}  // namespace tfd::mps

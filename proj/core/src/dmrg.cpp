#include "tfd/dmrg.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "tfd/error.hpp"
#include "tfd/lanczos.hpp"

namespace tfd::mps {

namespace {

using Env = std::vector<Matrix>;
using Site = TensorTrainState::Site;

Env update_left(const Env& l, const Site& a, const MpoSite& w) {
  const Index dl = a[0].rows(), dr = a[0].cols();
  Matrix t(dl * dr, 2 * w.wl);
  for (Index k = 0; k < w.wl; ++k) {
    for (int s = 0; s < 2; ++s) Eigen::Map<Matrix>(t.col(k * 2 + s).data(), dl, dr).noalias() = l[k] * a[s];
  }
  Matrix c = Matrix::Zero(2 * w.wl, 2 * w.wr);
  for (Index k = 0; k < w.wl; ++k) {
    for (Index b = 0; b < w.wr; ++b) {
      const Matrix2& o = w.at(k, b);
      for (int sp = 0; sp < 2; ++sp) {
        for (int s = 0; s < 2; ++s) c(k * 2 + s, b * 2 + sp) = o(sp, s);
      }
    }
  }
  const Matrix x = t * c;
  Env out(w.wr);
  for (Index b = 0; b < w.wr; ++b) {
    out[b] = a[0].adjoint() * Eigen::Map<const Matrix>(x.col(b * 2).data(), dl, dr) +
             a[1].adjoint() * Eigen::Map<const Matrix>(x.col(b * 2 + 1).data(), dl, dr);
  }
  return out;
}

Env update_right(const Env& r, const Site& a, const MpoSite& w) {
  const Index dl = a[0].rows(), dr = a[0].cols();
  Matrix t(dr * dl, 2 * w.wr);
  for (Index b = 0; b < w.wr; ++b) {
    for (int s = 0; s < 2; ++s) {
      Eigen::Map<Matrix>(t.col(b * 2 + s).data(), dr, dl).noalias() = r[b] * a[s].transpose();
    }
  }
  Matrix c = Matrix::Zero(2 * w.wr, 2 * w.wl);
  for (Index k = 0; k < w.wl; ++k) {
    for (Index b = 0; b < w.wr; ++b) {
      const Matrix2& o = w.at(k, b);
      for (int sp = 0; sp < 2; ++sp) {
        for (int s = 0; s < 2; ++s) c(b * 2 + s, k * 2 + sp) = o(sp, s);
      }
    }
  }
  const Matrix y = t * c;
  Env out(w.wl);
  for (Index k = 0; k < w.wl; ++k) {
    out[k] = a[0].conjugate() * Eigen::Map<const Matrix>(y.col(k * 2).data(), dr, dl) +
             a[1].conjugate() * Eigen::Map<const Matrix>(y.col(k * 2 + 1).data(), dr, dl);
  }
  return out;
}

Matrix overlap_left(const Matrix& lo, const Site& phi, const Site& a) {
  return phi[0].adjoint() * lo * a[0] + phi[1].adjoint() * lo * a[1];
}

Matrix overlap_right(const Matrix& ro, const Site& phi, const Site& a) {
  return phi[0].conjugate() * ro * a[0].transpose() + phi[1].conjugate() * ro * a[1].transpose();
}

// Two-site effective Hamiltonian; theta is stored as four Dl-by-Dr blocks
// (s1 * 2 + s2), each column-major.
class TwoSiteOperator {
 public:
  TwoSiteOperator(const Env& l, const Env& r, const MpoSite& w1, const MpoSite& w2, Index dl, Index dr)
      : l_(l), r_(r), dl_(dl), dr_(dr), wl_(w1.wl), wr_(w2.wr) {
    m_ = Matrix::Zero(4 * wl_, 4 * wr_);
    for (Index a = 0; a < wl_; ++a) {
      for (Index mid = 0; mid < w1.wr; ++mid) {
        const Matrix2& o1 = w1.at(a, mid);
        if (o1.isZero(0.0)) continue;
        for (Index b = 0; b < wr_; ++b) {
          const Matrix2& o2 = w2.at(mid, b);
          if (o2.isZero(0.0)) continue;
          for (int p = 0; p < 16; ++p) {
            const int s1p = p >> 3, s1 = (p >> 2) & 1, s2p = (p >> 1) & 1, s2 = p & 1;
            m_(a * 4 + s1 * 2 + s2, b * 4 + s1p * 2 + s2p) += o1(s1p, s1) * o2(s2p, s2);
          }
        }
      }
    }
    rt_.resize(wr_);
    for (Index b = 0; b < wr_; ++b) rt_[b] = r_[b].transpose();

    real_ = is_real(m_);
    for (const auto& m : l_) real_ = real_ && is_real(m);
    for (const auto& m : r_) real_ = real_ && is_real(m);
    if (real_) {
      lr_.reserve(wl_);
      for (const auto& m : l_) lr_.push_back(m.real());
      rtr_.reserve(wr_);
      for (const auto& m : rt_) rtr_.push_back(m.real());
      mr_ = m_.real();
    }
  }

  Index dim() const { return 4 * dl_ * dr_; }

  void apply(const Vector& x, Vector& y) const {
    if (real_) {
      RealVector out(dim());
      apply_real(x.real(), out);
      y = out.cast<cplx>();
      if (!is_real(x)) {
        apply_real(x.imag(), out);
        y += cplx(0.0, 1.0) * out.cast<cplx>();
      }
    } else {
      apply_complex(x, y);
    }
    for (const auto& [vec, w] : projectors) y += (w * vec.dot(x)) * vec;
  }

  std::vector<std::pair<Vector, double>> projectors;

 private:
  template <class M>
  static bool is_real(const M& m) {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
  }

  // Same contraction as apply_complex for real environments and input.
  void apply_real(const RealVector& x, RealVector& y) const {
    const Index blk = dl_ * dr_;
    RealMatrix p(blk, 4 * wl_);
    for (Index a = 0; a < wl_; ++a) {
      for (int s = 0; s < 4; ++s) {
        Eigen::Map<RealMatrix>(p.col(a * 4 + s).data(), dl_, dr_).noalias() =
            lr_[a] * Eigen::Map<const RealMatrix>(x.data() + s * blk, dl_, dr_);
      }
    }
    const RealMatrix q = p * mr_;
    y.setZero(dim());
    for (int s = 0; s < 4; ++s) {
      Eigen::Map<RealMatrix> out(y.data() + s * blk, dl_, dr_);
      for (Index b = 0; b < wr_; ++b) {
        out.noalias() += Eigen::Map<const RealMatrix>(q.col(b * 4 + s).data(), dl_, dr_) * rtr_[b];
      }
    }
  }

  void apply_complex(const Vector& x, Vector& y) const {
    const Index blk = dl_ * dr_;
    Matrix p(blk, 4 * wl_);
    for (Index a = 0; a < wl_; ++a) {
      for (int s = 0; s < 4; ++s) {
        Eigen::Map<Matrix>(p.col(a * 4 + s).data(), dl_, dr_).noalias() =
            l_[a] * Eigen::Map<const Matrix>(x.data() + s * blk, dl_, dr_);
      }
    }
    const Matrix q = p * m_;
    y.setZero(dim());
    for (int s = 0; s < 4; ++s) {
      Eigen::Map<Matrix> out(y.data() + s * blk, dl_, dr_);
      for (Index b = 0; b < wr_; ++b) {
        out.noalias() += Eigen::Map<const Matrix>(q.col(b * 4 + s).data(), dl_, dr_) * rt_[b];
      }
    }
  }

  const Env& l_;
  const Env& r_;
  Index dl_, dr_, wl_, wr_;
  Matrix m_;
  std::vector<Matrix> rt_;
  bool real_ = false;
  std::vector<RealMatrix> lr_, rtr_;
  RealMatrix mr_;
};

bool is_real_operator(const TensorTrainOperator& h) {
  for (const auto& site : h.sites()) {
    for (const auto& b : site.blocks) {
      if (b.imag().cwiseAbs().maxCoeff() != 0.0) return false;
    }
  }
  return true;
}

Vector pack(const Site& a, const Site& b) {
  const Index dl = a[0].rows(), dr = b[0].cols();
  Vector v(4 * dl * dr);
  for (int s = 0; s < 4; ++s) Eigen::Map<Matrix>(v.data() + s * dl * dr, dl, dr) = a[s / 2] * b[s % 2];
  return v;
}

Matrix unpack(const Vector& v, Index dl, Index dr) {
  Matrix big(2 * dl, 2 * dr);
  for (int s = 0; s < 4; ++s) {
    big.block((s / 2) * dl, (s % 2) * dr, dl, dr) = Eigen::Map<const Matrix>(v.data() + s * dl * dr, dl, dr);
  }
  return big;
}

std::pair<double, Vector> lowest(const TwoSiteOperator& op, const Vector& start, const DmrgOptions& opts) {
  const Index dim = op.dim();
  if (dim <= 96) {
    Matrix h(dim, dim);
    Vector e = Vector::Zero(dim), col(dim);
    for (Index k = 0; k < dim; ++k) {
      e[k] = 1.0;
      op.apply(e, col);
      h.col(k) = col;
      e[k] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (h + h.adjoint()));
    return {solver.eigenvalues()[0], solver.eigenvectors().col(0)};
  }
  num::LanczosOptions lo;
  lo.krylov_max = opts.krylov;
  lo.max_restarts = opts.local_restarts;
  lo.tol = opts.local_tol;
  lo.throw_on_failure = false;
  const auto res = num::lanczos_lowest([&op](const Vector& x, Vector& y) { op.apply(x, y); }, dim, lo, &start);
  return {res.value, res.vector};
}

}  // namespace

double excited_penalty_weight(double e0, double norm_bound) { return 10.0 * (std::abs(e0) + 2.0 * norm_bound); }

DmrgResult dmrg(const TensorTrainOperator& h, TensorTrainState psi, const DmrgOptions& opts,
                const std::vector<TensorTrainState>& orthogonal_to) {
  const int n = h.size();
  if (psi.size() != n) throw Error(ErrorCode::Incompatible, "MPO and initial state lengths differ");
  if (n < 2) throw Error(ErrorCode::Incompatible, "two-site DMRG needs at least two sites");
  for (const auto& phi : orthogonal_to) {
    if (phi.size() != n) throw Error(ErrorCode::Incompatible, "orthogonal_to state has the wrong length");
  }
  if (!orthogonal_to.empty() && !(opts.penalty_weight > 0.0)) {
    throw Error(ErrorCode::Incompatible, "penalty_weight must be positive when orthogonal_to is set");
  }

  if (psi.max_bond() < opts.noise_bond && opts.noise_amplitude > 0.0) {
    psi.normalize();
    // Real noise keeps real problems in real arithmetic.
    psi = add(psi, random_state(n, opts.noise_bond, opts.noise_seed, is_real_operator(h)), opts.noise_amplitude);
  }
  psi.canonicalize(0);
  psi.normalize();
  std::vector<Env> left(n), right(n);
  left[0] = Env{Matrix::Ones(1, 1)};
  right[n - 1] = Env{Matrix::Ones(1, 1)};
  for (int i = n - 1; i > 0; --i) right[i - 1] = update_right(right[i], psi.site(i), h.site(i));

  const std::size_t n_phi = orthogonal_to.size();
  std::vector<std::vector<Matrix>> lo(n_phi, std::vector<Matrix>(n)), ro(n_phi, std::vector<Matrix>(n));
  for (std::size_t k = 0; k < n_phi; ++k) {
    lo[k][0] = Matrix::Ones(1, 1);
    ro[k][n - 1] = Matrix::Ones(1, 1);
    for (int i = n - 1; i > 0; --i) ro[k][i - 1] = overlap_right(ro[k][i], orthogonal_to[k].site(i), psi.site(i));
  }

  DmrgResult result;
  double previous = std::numeric_limits<double>::infinity();
  double energy = previous;

  auto optimize = [&](int i, bool sweep_right, Index cap) {
    const Site& a = psi.site(i);
    const Site& b = psi.site(i + 1);
    const Index dl = a[0].rows(), dr = b[0].cols();
    TwoSiteOperator op(left[i], right[i + 1], h.site(i), h.site(i + 1), dl, dr);
    for (std::size_t k = 0; k < n_phi; ++k) {
      const Site& pa = orthogonal_to[k].site(i);
      const Site& pb = orthogonal_to[k].site(i + 1);
      Vector eff(4 * dl * dr);
      const Matrix lo_h = lo[k][i].adjoint();
      const Matrix ro_c = ro[k][i + 1].conjugate();
      for (int s = 0; s < 4; ++s) {
        Eigen::Map<Matrix>(eff.data() + s * dl * dr, dl, dr) = lo_h * (pa[s / 2] * pb[s % 2]) * ro_c;
      }
      op.projectors.emplace_back(std::move(eff), opts.penalty_weight);
    }
    const auto [value, vec] = lowest(op, pack(a, b), opts);
    energy = value;
    psi.split_two_site(i, unpack(vec, dl, dr), {cap, opts.cutoff}, sweep_right, true);
  };

  const auto t0 = std::chrono::steady_clock::now();
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    Index cap = opts.max_bond;
    if (!opts.bond_schedule.empty()) {
      const std::size_t k = std::min<std::size_t>(sweep - 1, opts.bond_schedule.size() - 1);
      cap = std::min(cap, opts.bond_schedule[k]);
    }
    const double disc_before = psi.discarded_weight();
    for (int i = 0; i + 1 < n; ++i) {
      optimize(i, true, cap);
      left[i + 1] = update_left(left[i], psi.site(i), h.site(i));
      for (std::size_t k = 0; k < n_phi; ++k) {
        lo[k][i + 1] = overlap_left(lo[k][i], orthogonal_to[k].site(i), psi.site(i));
      }
    }
    for (int i = n - 2; i >= 0; --i) {
      optimize(i, false, cap);
      right[i] = update_right(right[i + 1], psi.site(i + 1), h.site(i + 1));
      for (std::size_t k = 0; k < n_phi; ++k) {
        ro[k][i] = overlap_right(ro[k][i + 1], orthogonal_to[k].site(i + 1), psi.site(i + 1));
      }
    }
    SweepRecord rec;
    rec.sweep = sweep;
    rec.energy = energy;
    rec.max_bond = psi.max_bond();
    rec.discarded_weight = psi.discarded_weight() - disc_before;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(rec);

    const bool schedule_done = opts.bond_schedule.empty() || sweep >= static_cast<int>(opts.bond_schedule.size());
    if (sweep >= opts.min_sweeps && schedule_done &&
        std::abs(previous - energy) < opts.energy_tol * std::max(1.0, std::abs(energy))) {
      result.converged = true;
      break;
    }
    previous = energy;
  }
  result.energy = energy;
  result.state = std::move(psi);
  return result;
}

}  // namespace tfd::mps

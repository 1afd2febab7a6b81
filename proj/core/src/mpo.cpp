#include "tfd/mpo.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "tfd/error.hpp"

namespace tfd::mps {

namespace {

Matrix2 pauli_matrix(models::Pauli p) {
  Matrix2 m;
  switch (p) {
    case models::Pauli::X: m << 0, 1, 1, 0; break;
    case models::Pauli::Y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case models::Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

// Site tensor as a matrix with rows (a, p) and columns b, p = s' * 2 + s.
Matrix left_form(const MpoSite& w) {
  Matrix m(w.wl * 4, w.wr);
  for (Index a = 0; a < w.wl; ++a) {
    for (Index b = 0; b < w.wr; ++b) {
      const Matrix2& o = w.at(a, b);
      for (int p = 0; p < 4; ++p) m(a * 4 + p, b) = o(p / 2, p % 2);
    }
  }
  return m;
}

MpoSite from_left_form(const Matrix& m) {
  MpoSite w(m.rows() / 4, m.cols());
  for (Index a = 0; a < w.wl; ++a) {
    for (Index b = 0; b < w.wr; ++b) {
      for (int p = 0; p < 4; ++p) w.at(a, b)(p / 2, p % 2) = m(a * 4 + p, b);
    }
  }
  return w;
}

// Rows a, columns (p, b).
Matrix right_form(const MpoSite& w) {
  Matrix m(w.wl, 4 * w.wr);
  for (Index a = 0; a < w.wl; ++a) {
    for (Index b = 0; b < w.wr; ++b) {
      const Matrix2& o = w.at(a, b);
      for (int p = 0; p < 4; ++p) m(a, p * w.wr + b) = o(p / 2, p % 2);
    }
  }
  return m;
}

MpoSite from_right_form(const Matrix& m) {
  MpoSite w(m.rows(), m.cols() / 4);
  for (Index a = 0; a < w.wl; ++a) {
    for (Index b = 0; b < w.wr; ++b) {
      for (int p = 0; p < 4; ++p) w.at(a, b)(p / 2, p % 2) = m(a, p * w.wr + b);
    }
  }
  return w;
}

// Contracts the left bond of w with r: W'(a, b) = sum_c r(a, c) W(c, b).
MpoSite contract_left(const Matrix& r, const MpoSite& w) {
  MpoSite out(r.rows(), w.wr);
  for (Index a = 0; a < r.rows(); ++a) {
    for (Index c = 0; c < r.cols(); ++c) {
      if (r(a, c) == 0.0) continue;
      for (Index b = 0; b < w.wr; ++b) out.at(a, b) += r(a, c) * w.at(c, b);
    }
  }
  return out;
}

MpoSite contract_right(const MpoSite& w, const Matrix& r) {
  MpoSite out(w.wl, r.cols());
  for (Index a = 0; a < w.wl; ++a) {
    for (Index c = 0; c < w.wr; ++c) {
      for (Index b = 0; b < r.cols(); ++b) {
        if (r(c, b) != 0.0) out.at(a, b) += w.at(a, c) * r(c, b);
      }
    }
  }
  return out;
}

using Key = std::vector<models::SiteOp>;

}  // namespace

TensorTrainOperator::TensorTrainOperator(std::vector<MpoSite> sites, std::string label)
    : sites_(std::move(sites)), label_(std::move(label)) {
  if (sites_.empty()) throw Error(ErrorCode::EmptyLattice, "MPO needs at least one site");
  if (sites_.front().wl != 1 || sites_.back().wr != 1) {
    throw Error(ErrorCode::Incompatible, "MPO boundary bonds must have dimension 1");
  }
  for (int i = 0; i + 1 < size(); ++i) {
    if (sites_[i].wr != sites_[i + 1].wl) throw Error(ErrorCode::Incompatible, "MPO bond mismatch");
  }
}

Index TensorTrainOperator::max_bond() const {
  Index m = 1;
  for (const auto& w : sites_) m = std::max(m, w.wr);
  return m;
}

TensorTrainOperator compile_mpo(const models::PauliSum& h, const CompileOptions& opts) {
  const int n = h.n_sites();
  if (n < 1) throw Error(ErrorCode::EmptyLattice, "cannot compile an operator on zero sites");
  const models::PauliSum canon = h.canonical();

  // Channel ids per bond: 0 = not started, 1 = finished, >= 2 = pending ops.
  constexpr int kStart = 0, kDone = 1;
  std::vector<std::map<Key, int>> channels(n > 1 ? n - 1 : 0);
  auto channel = [&](int bond, const Key& key) {
    auto& m = channels[bond];
    auto it = m.find(key);
    if (it != m.end()) return it->second;
    const int id = static_cast<int>(m.size()) + 2;
    m.emplace(key, id);
    return id;
  };
  // Key at bond b: ops on sites > b, positions relative to b + 1.
  auto key_at = [](const std::vector<models::SiteOp>& ops, int bond) {
    Key key;
    for (const auto& [site, p] : ops) {
      if (site > bond) key.emplace_back(site - bond - 1, p);
    }
    return key;
  };

  std::vector<std::map<std::pair<int, int>, Matrix2>> entries(n);
  double constant = 0.0;
  for (const auto& t : canon.terms()) {
    if (t.ops.empty()) {
      constant += t.coefficient;
      continue;
    }
    if (t.span() > opts.max_span && !opts.compress) {
      throw Error(ErrorCode::SpanOverflow, "term spans " + std::to_string(t.span()) +
                                               " sites; enable compression for long-range terms");
    }
    const int first = t.min_site(), last = t.max_site();
    if (first == last) {
      auto& e = entries[first][{kStart, kDone}];
      e += t.coefficient * pauli_matrix(t.ops.front().second);
      continue;
    }
    std::size_t next = 0;
    int in = kStart;
    for (int site = first; site <= last; ++site) {
      Matrix2 op = Matrix2::Identity();
      if (next < t.ops.size() && t.ops[next].first == site) op = pauli_matrix(t.ops[next++].second);
      const int out = site == last ? kDone : channel(site, key_at(t.ops, site));
      if (site == first) {
        auto it = entries[site].find({in, out});
        if (it == entries[site].end()) {
          entries[site].emplace(std::make_pair(in, out), t.coefficient * op);
        } else {
          it->second += t.coefficient * op;
        }
      } else {
        entries[site][{in, out}] = op;
      }
      in = out;
    }
  }

  std::vector<MpoSite> sites(n);
  for (int i = 0; i < n; ++i) {
    const bool first = i == 0, last = i == n - 1;
    const Index wl = first ? 1 : static_cast<Index>(channels[i - 1].size()) + 2;
    const Index wr = last ? 1 : static_cast<Index>(channels[i].size()) + 2;
    auto row = [&](int ch) { return first ? 0 : ch; };
    auto col = [&](int ch) { return last ? 0 : ch; };
    MpoSite w(wl, wr);
    if (!last) w.at(row(kStart), col(kStart)) = Matrix2::Identity();
    if (!first) w.at(row(kDone), col(kDone)) = Matrix2::Identity();
    for (const auto& [ab, op] : entries[i]) w.at(row(ab.first), col(ab.second)) += op;
    if (first) w.at(0, col(kDone)) += constant * Matrix2::Identity();
    sites[i] = std::move(w);
  }
  TensorTrainOperator out(std::move(sites), h.label());
  return opts.compress ? compress(out, opts.cutoff) : out;
}

TensorTrainOperator compile_mpo(const models::DoubledSystem& sys, const CompileOptions& opts) {
  const models::PauliSum base =
      (sys.left_merged() + sys.right_merged() + sys.lr_coupling_terms).canonical();
  TensorTrainOperator h = compile_mpo(base, opts);
  if (sys.penalty_xi != 0.0) {
    const models::PauliSum diff = (sys.left_merged() - sys.right_merged()).canonical();
    const TensorTrainOperator d = compile_mpo(diff, opts);
    const TensorTrainOperator sq = compress(product(d, d), opts.cutoff);
    h = compress(sum(h, scaled(sq, sys.penalty_xi / (2.0 * sys.n))), opts.cutoff);
  }
  return TensorTrainOperator(h.sites(), "parent");
}

TensorTrainOperator product(const TensorTrainOperator& a, const TensorTrainOperator& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::Incompatible, "MPO product length mismatch");
  std::vector<MpoSite> sites(a.size());
  for (int i = 0; i < a.size(); ++i) {
    const MpoSite& x = a.site(i);
    const MpoSite& y = b.site(i);
    MpoSite w(x.wl * y.wl, x.wr * y.wr);
    for (Index a1 = 0; a1 < x.wl; ++a1) {
      for (Index a2 = 0; a2 < x.wr; ++a2) {
        const Matrix2& ox = x.at(a1, a2);
        if (ox.isZero(0.0)) continue;
        for (Index b1 = 0; b1 < y.wl; ++b1) {
          for (Index b2 = 0; b2 < y.wr; ++b2) {
            const Matrix2& oy = y.at(b1, b2);
            if (oy.isZero(0.0)) continue;
            w.at(a1 * y.wl + b1, a2 * y.wr + b2) = ox * oy;
          }
        }
      }
    }
    sites[i] = std::move(w);
  }
  return TensorTrainOperator(std::move(sites), a.label() + "*" + b.label());
}

TensorTrainOperator sum(const TensorTrainOperator& a, const TensorTrainOperator& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::Incompatible, "MPO sum length mismatch");
  const int n = a.size();
  std::vector<MpoSite> sites(n);
  for (int i = 0; i < n; ++i) {
    const MpoSite& x = a.site(i);
    const MpoSite& y = b.site(i);
    if (n == 1) {
      MpoSite w(1, 1);
      w.at(0, 0) = x.at(0, 0) + y.at(0, 0);
      sites[i] = std::move(w);
      continue;
    }
    const bool first = i == 0, last = i == n - 1;
    const Index wl = first ? 1 : x.wl + y.wl;
    const Index wr = last ? 1 : x.wr + y.wr;
    MpoSite w(wl, wr);
    const Index row_off = first ? 0 : x.wl;
    const Index col_off = last ? 0 : x.wr;
    for (Index r = 0; r < x.wl; ++r) {
      for (Index c = 0; c < x.wr; ++c) w.at(r, c) = x.at(r, c);
    }
    for (Index r = 0; r < y.wl; ++r) {
      for (Index c = 0; c < y.wr; ++c) w.at(row_off + r, col_off + c) += y.at(r, c);
    }
    sites[i] = std::move(w);
  }
  return TensorTrainOperator(std::move(sites), a.label() + "+" + b.label());
}

TensorTrainOperator scaled(const TensorTrainOperator& a, cplx factor) {
  std::vector<MpoSite> sites = a.sites();
  for (auto& o : sites.front().blocks) o *= factor;
  return TensorTrainOperator(std::move(sites), a.label());
}

TensorTrainOperator compress(const TensorTrainOperator& a, double cutoff) {
  std::vector<MpoSite> sites = a.sites();
  const int n = static_cast<int>(sites.size());
  for (int i = 0; i + 1 < n; ++i) {
    const Matrix m = left_form(sites[i]);
    Eigen::HouseholderQR<Matrix> qr(m);
    const Index k = std::min(m.rows(), m.cols());
    const Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), k);
    const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    sites[i] = from_left_form(q);
    sites[i + 1] = contract_left(r, sites[i + 1]);
  }
  for (int i = n - 1; i > 0; --i) {
    const auto svd = num::svd_truncate(right_form(sites[i]), {1 << 20, cutoff});
    sites[i] = from_right_form(svd.v.adjoint());
    sites[i - 1] = contract_right(sites[i - 1], svd.u * svd.s.cast<cplx>().asDiagonal());
  }
  return TensorTrainOperator(std::move(sites), a.label());
}

cplx expectation(const TensorTrainOperator& op, const TensorTrainState& bra, const TensorTrainState& ket) {
  if (op.size() != bra.size() || op.size() != ket.size()) {
    throw Error(ErrorCode::Incompatible, "MPO and MPS lengths differ");
  }
  std::vector<Matrix> env{Matrix::Ones(1, 1)};
  for (int i = 0; i < op.size(); ++i) {
    const MpoSite& w = op.site(i);
    const auto& x = bra.site(i);
    const auto& y = ket.site(i);
    std::vector<Matrix> next(w.wr, Matrix::Zero(x[0].cols(), y[0].cols()));
    for (Index a = 0; a < w.wl; ++a) {
      const Matrix ey[2] = {env[a] * y[0], env[a] * y[1]};
      for (Index b = 0; b < w.wr; ++b) {
        const Matrix2& o = w.at(a, b);
        for (int sp = 0; sp < 2; ++sp) {
          for (int s = 0; s < 2; ++s) {
            if (o(sp, s) != 0.0) next[b].noalias() += o(sp, s) * (x[sp].adjoint() * ey[s]);
          }
        }
      }
    }
    env = std::move(next);
  }
  return env[0](0, 0);
}

double expectation(const TensorTrainOperator& op, const TensorTrainState& psi) {
  return expectation(op, psi, psi).real() / overlap(psi, psi).real();
}

Matrix to_dense(const TensorTrainOperator& op) {
  if (op.size() > 12) throw Error(ErrorCode::TooLarge, "dense MPO limited to 12 sites");
  std::vector<Matrix> acc{Matrix::Ones(1, 1)};
  for (const MpoSite& w : op.sites()) {
    const Index d = acc[0].rows() * 2;
    std::vector<Matrix> next(w.wr, Matrix::Zero(d, d));
    for (Index a = 0; a < w.wl; ++a) {
      for (Index b = 0; b < w.wr; ++b) {
        if (!w.at(a, b).isZero(0.0)) next[b] += num::kron(acc[a], w.at(a, b));
      }
    }
    acc = std::move(next);
  }
  return acc[0];
}

}  // namespace tfd::mps

#include "tfd/models.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "tfd/error.hpp"

namespace tfd::models {

PauliSum build_mfi_1d(int n, double jz, double hx, double hz) {
  if (n < 1) throw Error(ErrorCode::EmptyLattice, "mixed-field Ising chain needs n >= 1");
  PauliSum h(n, "mfi1d");
  for (int i = 0; i + 1 < n; ++i) h.add({{i, Pauli::Z}, {i + 1, Pauli::Z}}, jz);
  for (int i = 0; i < n; ++i) h.add({{i, Pauli::X}}, hx);
  for (int i = 0; i < n; ++i) h.add({{i, Pauli::Z}}, hz);
  return h;
}

PauliSum build_mfi_2d(int nx, int ny, double jz, double hx, double hz) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::EmptyLattice, "2D lattice needs nx, ny >= 1");
  const int n = nx * ny;
  PauliSum h(n, "mfi2d");
  auto site = [ny](int x, int y) { return x * ny + y; };
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      if (y + 1 < ny) h.add({{site(x, y), Pauli::Z}, {site(x, y + 1), Pauli::Z}}, jz);
    }
  }
  for (int x = 0; x + 1 < nx; ++x) {
    for (int y = 0; y < ny; ++y) h.add({{site(x, y), Pauli::Z}, {site(x + 1, y), Pauli::Z}}, jz);
  }
  for (int i = 0; i < n; ++i) h.add({{i, Pauli::X}}, hx);
  for (int i = 0; i < n; ++i) h.add({{i, Pauli::Z}}, hz);
  return h;
}

double spin_syk_variance(int n, int q, double j_scale) {
  double fact = 1.0;
  for (int k = 2; k < q; ++k) fact *= k;
  return j_scale * j_scale * fact /
         (q * std::pow(static_cast<double>(n), q - 1) * std::pow(2.0, q - 1));
}

PauliSum sample_spin_syk(const DisorderSpec& spec) {
  if (spec.q <= 0 || spec.q % 2 != 0) {
    throw Error(ErrorCode::InvalidBodySize, "q must be even and positive, got " + std::to_string(spec.q));
  }
  if (spec.q > spec.n) {
    throw Error(ErrorCode::InvalidBodySize,
                "q=" + std::to_string(spec.q) + " exceeds n=" + std::to_string(spec.n));
  }
  const auto seed = static_cast<std::uint64_t>(spec.seed);
  const auto idx = static_cast<std::uint64_t>(spec.realization_index);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(idx >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss(0.0, std::sqrt(spin_syk_variance(spec.n, spec.q, spec.j_scale)));

  PauliSum h(spec.n, "spin_syk");
  std::vector<int> subset(spec.q);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    for (unsigned pattern = 0; pattern < (1u << spec.q); ++pattern) {
      if (__builtin_popcount(pattern) % 2 != 0) continue;
      std::vector<SiteOp> ops;
      ops.reserve(spec.q);
      for (int k = 0; k < spec.q; ++k) {
        const bool is_y = (pattern >> (spec.q - 1 - k)) & 1u;
        ops.emplace_back(subset[k], is_y ? Pauli::Y : Pauli::X);
      }
      h.add(std::move(ops), gauss(rng));
    }
    // Next lexicographic q-subset of {0..n-1}.
    int k = spec.q - 1;
    while (k >= 0 && subset[k] == spec.n - spec.q + k) --k;
    if (k < 0) break;
    ++subset[k];
    for (int j = k + 1; j < spec.q; ++j) subset[j] = subset[j - 1] + 1;
  }
  return h;
}

PauliSum conjugate_spec(const PauliSum& h) {
  PauliSum out(h.n_sites(), h.label());
  for (const auto& t : h.terms()) {
    out.add(PauliString(t.ops, t.count(Pauli::Y) % 2 == 0 ? t.coefficient : -t.coefficient));
  }
  return out;
}

std::vector<int> DoubledSystem::site_map(Copy copy) const {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = zigzag_site(copy, i);
  return m;
}

PauliSum DoubledSystem::left_merged() const { return left.remapped(site_map(Copy::Left), 2 * n); }

PauliSum DoubledSystem::right_merged() const {
  return right_conjugated.remapped(site_map(Copy::Right), 2 * n);
}

PauliSum DoubledSystem::total() const {
  PauliSum out = left_merged();
  out += right_merged();
  out += lr_coupling_terms;
  out += penalty_terms;
  out.set_label("parent");
  return out.canonical();
}

std::vector<PauliSum> mfi_couplings(int n) {
  std::vector<PauliSum> ops;
  for (int i = 0; i < n; ++i) {
    PauliSum x(n, "X");
    x.add({{i, Pauli::X}}, 1.0);
    PauliSum z(n, "Z");
    z.add({{i, Pauli::Z}}, 1.0);
    ops.push_back(std::move(x));
    ops.push_back(std::move(z));
  }
  return ops;
}

std::vector<PauliSum> syk_couplings(int n) {
  std::vector<PauliSum> ops;
  for (int i = 0; i < n; ++i) {
    PauliSum x(n, "X");
    x.add({{i, Pauli::X}}, 1.0);
    PauliSum y(n, "Y");
    y.add({{i, Pauli::Y}}, 1.0);
    ops.push_back(std::move(x));
    ops.push_back(std::move(y));
  }
  return ops;
}

DoubledSystem build_parent(const PauliSum& h0, const std::vector<PauliSum>& coupling_ops,
                           double c, double xi, bool include_constant) {
  const int n = h0.n_sites();
  if (n < 1) throw Error(ErrorCode::EmptyLattice, "H0 has no sites");
  DoubledSystem sys;
  sys.n = n;
  sys.left = h0;
  sys.right_conjugated = conjugate_spec(h0);
  sys.coupling_c = c;
  sys.penalty_xi = xi;
  sys.include_constant = include_constant;

  const auto lmap = sys.site_map(Copy::Left);
  const auto rmap = sys.site_map(Copy::Right);

  PauliSum coupling(2 * n, "lr_coupling");
  for (const auto& op : coupling_ops) {
    if (op.size() == 0) throw Error(ErrorCode::InvalidCoupling, "empty coupling operator");
    for (const auto& t : op.terms()) {
      if (!std::isfinite(t.coefficient) || t.max_site() >= n) {
        throw Error(ErrorCode::InvalidCoupling, "coupling operator is not a Hermitian operator on one copy");
      }
    }
    PauliSum diff = op.remapped(lmap, 2 * n) - conjugate_spec(op).remapped(rmap, 2 * n);
    coupling += diff.times(diff).scaled(c);
  }
  coupling = coupling.canonical();
  if (!include_constant) {
    PauliSum stripped(2 * n, "lr_coupling");
    for (const auto& t : coupling.terms()) {
      if (!t.ops.empty()) stripped.add(t);
    }
    coupling = std::move(stripped);
  }
  sys.lr_coupling_terms = std::move(coupling);

  sys.penalty_terms = PauliSum(2 * n, "penalty");
  if (xi != 0.0) {
    PauliSum diff = sys.left_merged() - sys.right_merged();
    sys.penalty_terms = diff.times(diff).scaled(xi / (2.0 * n)).canonical();
    sys.penalty_terms.set_label("penalty");
  }
  return sys;
}

PauliSum single_spin_h0() {
  PauliSum h(1, "single_spin");
  h.add_constant(0.5);
  h.add({{0, Pauli::Z}}, -0.5);
  return h;
}

DoubledSystem single_spin_toy(double c, bool include_constant) {
  return build_parent(single_spin_h0(), mfi_couplings(1), 0.5 * c, 0.0, include_constant);
}

}  // namespace tfd::models

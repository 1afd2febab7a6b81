#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tfd/dmrg.hpp"
#include "tfd/ed.hpp"
#include "tfd/error.hpp"
#include "tfd/models.hpp"
#include "tfd/mpo.hpp"
#include "tfd/mps.hpp"
#include "tfd/tebd.hpp"

using namespace tfd;
using namespace tfd::mps;
using models::build_mfi_1d;
using models::build_parent;
using models::mfi_couplings;

namespace {

double fidelity(const Vector& a, const Vector& b) { return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm()); }

models::DoubledSystem mfi_parent(int n, double c, double xi = 0.0) {
  return build_parent(build_mfi_1d(n, 1.0, 1.0, 0.5), mfi_couplings(n), c, xi);
}

TensorTrainState random_product(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<TensorTrainState::Site> sites(n);
  for (auto& s : sites) {
    for (auto& m : s) m = Matrix::Constant(1, 1, cplx(g(rng), g(rng)));
  }
  return TensorTrainState(std::move(sites));
}

DmrgOptions tight() {
  DmrgOptions o;
  o.max_bond = 64;
  o.cutoff = 1e-12;
  o.energy_tol = 1e-12;
  o.local_tol = 1e-12;
  return o;
}

}  // namespace

TEST_CASE("Bell product") {
  const Vector one = mps_bell(1).to_dense();
  CHECK(std::abs(one[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(one[3] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(one[1]) == 0.0);

  for (int n = 1; n <= 6; ++n) {
    const TensorTrainState bell = mps_bell(n);
    CHECK(bell.norm() == doctest::Approx(1.0).epsilon(1e-14));
    for (int b = 0; b + 1 < 2 * n; ++b) CHECK(bell.bond_dim(b) == (b % 2 == 0 ? 2 : 1));
    const Matrix h0 = ed::dense_matrix(build_mfi_1d(n, 1.0, 1.0, 0.5));
    const auto tfd0 = ed::tfd_state(h0, 0.0, ed::Ordering::Zigzag);
    CHECK(std::abs(1.0 - fidelity(bell.to_dense(), tfd0.amplitudes)) <= 1e-10);
  }

  models::PauliSum xx(4);
  xx.add({{0, models::Pauli::X}, {1, models::Pauli::X}}, 1.0);
  CHECK(expectation(compile_mpo(xx), mps_bell(2)) == doctest::Approx(1.0));
}

TEST_CASE("canonical form, dense round trip and overlaps") {
  const TensorTrainState r = random_state(8, 6, 42);
  for (int k : {0, 3, 7}) {
    TensorTrainState c = r;
    c.canonicalize(k);
    CHECK(c.is_canonical(1e-10));
    CHECK((c.to_dense() - r.to_dense()).norm() < 1e-12);
  }
  const Vector v = r.to_dense();
  const TensorTrainState back = TensorTrainState::from_dense(v, 8);
  CHECK((back.to_dense() - v).norm() < 1e-12);
  CHECK(std::abs(overlap(r, r) - 1.0) < 1e-12);
  CHECK(std::abs(overlap(r, back) - 1.0) < 1e-12);
  CHECK(std::abs(overlap(product_state({0, 1, 0}), product_state({0, 1, 1}))) == 0.0);
  CHECK_THROWS_AS(overlap(product_state({0, 1}), product_state({0, 1, 1})), Error);

  const Matrix h0 = ed::dense_matrix(build_mfi_1d(3, 1.0, 1.0, 0.5));
  const auto t = ed::tfd_state(h0, 0.8, ed::Ordering::Zigzag);
  const Vector bell = mps_bell(3).to_dense();
  const TensorTrainState tm = TensorTrainState::from_dense(t.amplitudes, 6);
  CHECK(std::abs(overlap(mps_bell(3), tm) - bell.dot(t.amplitudes)) < 1e-12);
}

TEST_CASE("two-site and distance-two gates match dense application") {
  std::mt19937_64 rng(9);
  const Matrix h4 = oracle::random_hermitian(4, rng);
  const Matrix u = num::expm_hermitian(h4, cplx(0, 0.7));
  TensorTrainState psi = random_state(5, 4, 3);
  Vector v = psi.to_dense();
  const Truncation exact{1 << 10, 0.0};
  psi.apply_two_site(1, u, exact, true);
  psi.apply_distance_two(2, u, exact, false);
  psi.apply_distance_two(0, u, exact, true);
  // Dense reference: sites (1,2), then (2,4), then (0,2).
  auto embed2 = [&](int a, int b) {
    Matrix full = Matrix::Zero(32, 32);
    for (Index col = 0; col < 32; ++col) {
      const int sa = (col >> (4 - a)) & 1, sb = (col >> (4 - b)) & 1;
      for (int out = 0; out < 4; ++out) {
        Index row = col;
        row &= ~(Index{1} << (4 - a));
        row &= ~(Index{1} << (4 - b));
        row |= Index(out / 2) << (4 - a);
        row |= Index(out % 2) << (4 - b);
        full(row, col) += u(out, sa * 2 + sb);
      }
    }
    return full;
  };
  v = embed2(0, 2) * (embed2(2, 4) * (embed2(1, 2) * v));
  CHECK((psi.to_dense() - v).norm() < 1e-12);
  CHECK(psi.is_canonical());
}

TEST_CASE("MPO compilation") {
  models::PauliSum field(5);
  for (int i = 0; i < 5; ++i) field.add({{i, models::Pauli::X}}, 0.3);
  CHECK(compile_mpo(field).max_bond() == 2);
  CHECK(num::max_abs(to_dense(compile_mpo(field)) - ed::dense_matrix(field)) < 1e-14);

  for (int n = 1; n <= 3; ++n) {
    const auto sys = mfi_parent(n, 1.0);
    const TensorTrainOperator mpo = compile_mpo(sys);
    const Matrix dense = ed::dense_matrix(sys, ed::Ordering::Zigzag);
    CHECK(num::max_abs(to_dense(mpo) - dense) < 1e-12);
    std::mt19937_64 rng(n);
    for (int k = 0; k < 5; ++k) {
      const TensorTrainState p = random_product(2 * n, rng);
      const Vector v = p.to_dense();
      CHECK(std::abs(expectation(mpo, p) - v.dot(dense * v).real() / v.squaredNorm()) < 1e-8);
    }
  }

  SUBCASE("penalty via MPO product and compression") {
    const double xi = 1.7;
    const auto sys = mfi_parent(3, 0.5, xi);
    const Matrix d = ed::dense_matrix(sys.left_merged()) - ed::dense_matrix(sys.right_merged());
    const Matrix expect = ed::dense_matrix(sys.left_merged() + sys.right_merged() + sys.lr_coupling_terms) +
                          xi / 6.0 * d * d;
    const TensorTrainOperator mpo = compile_mpo(sys);
    CHECK(num::max_abs(to_dense(mpo) - expect) < 1e-8);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 5; ++k) {
      const TensorTrainState p = random_product(6, rng);
      const Vector v = p.to_dense();
      CHECK(std::abs(expectation(mpo, p) - v.dot(expect * v).real() / v.squaredNorm()) < 1e-8);
    }
  }

  SUBCASE("hermiticity on random states") {
    const auto mpo = compile_mpo(mfi_parent(4, 0.8, 2.0));
    const auto a = random_state(8, 4, 1), b = random_state(8, 4, 2);
    CHECK(std::abs(expectation(mpo, a, b) - std::conj(expectation(mpo, b, a))) < 1e-10);
  }

  SUBCASE("span overflow") {
    models::PauliSum longrange(6);
    longrange.add({{0, models::Pauli::Z}, {5, models::Pauli::Z}}, 1.0);
    CHECK_THROWS_AS(compile_mpo(longrange), Error);
    const auto mpo = compile_mpo(longrange, {4, true, 1e-12});
    CHECK(num::max_abs(to_dense(mpo) - ed::dense_matrix(longrange)) < 1e-12);
  }
}

TEST_CASE("DMRG ground states against ED") {
  for (int n = 2; n <= 5; ++n) {
    const auto sys = mfi_parent(n, 1.0);
    const auto res = dmrg(compile_mpo(sys), random_state(2 * n, 4, n), tight());
    CHECK(res.converged);
    const auto gs = ed::ground_state(sys);
    CHECK(std::abs(res.energy - gs.energy) <= 1e-7);
    CHECK(fidelity(res.state.to_dense(), gs.psi.amplitudes) >= 1 - 1e-8);
    for (std::size_t k = 1; k < res.log.size(); ++k) CHECK(res.log[k].energy <= res.log[k - 1].energy + 1e-12);
  }

  SUBCASE("decoupled chains") {
    const auto h0 = build_mfi_1d(4, 1.0, 1.0, 0.5);
    const auto res = dmrg(compile_mpo(build_parent(h0, mfi_couplings(4), 0.0, 0.0)),
                          product_state(std::vector<int>(8, 0)), tight());
    const double e0 = num::hermitian_eigenvalues(ed::dense_matrix(h0))[0];
    CHECK(res.energy == doctest::Approx(2 * e0).epsilon(1e-10));
  }

  SUBCASE("excited state by projector penalty") {
    const auto sys = mfi_parent(4, 1.0);
    const auto mpo = compile_mpo(sys);
    const auto g0 = dmrg(mpo, random_state(8, 4, 1), tight());
    DmrgOptions o = tight();
    o.penalty_weight = excited_penalty_weight(g0.energy, sys.total().coefficient_l1());
    const auto g1 = dmrg(mpo, random_state(8, 4, 2), o, {g0.state});
    const auto gap = ed::gap(sys);
    CHECK(std::abs((g1.energy - g0.energy) - gap.delta) <= 1e-6);
    CHECK_THROWS_AS(dmrg(mpo, random_state(8, 4, 2), tight(), {g0.state}), Error);
  }

  SUBCASE("penalized parent") {
    const auto sys = mfi_parent(3, 1.0, 3.0);
    const auto res = dmrg(compile_mpo(sys), random_state(6, 4, 7), tight());
    CHECK(std::abs(res.energy - ed::ground_state(sys).energy) <= 1e-7);
  }
}

TEST_CASE("imaginary-time TFD") {
  const MfiParams p{1.0, 1.0, 0.5};
  CHECK(std::abs(overlap(itebd_tfd(p, 3, 0.0, 0.01, {}), mps_bell(3)) - 1.0) < 1e-14);
  CHECK_THROWS_AS(itebd_tfd(p, 3, 1.0, 0.3, {}), Error);

  for (int n = 2; n <= 6; ++n) {
    const Matrix h0 = ed::dense_matrix(build_mfi_1d(n, 1.0, 1.0, 0.5));
    const auto exact = ed::tfd_state(h0, 1.0, ed::Ordering::Zigzag);
    const auto t = itebd_tfd(p, n, 1.0, 0.01, {256, 1e-12});
    CHECK(fidelity(t.to_dense(), exact.amplitudes) >= 1 - 1e-6);
  }

  SUBCASE("second-order convergence") {
    const Matrix h0 = ed::dense_matrix(build_mfi_1d(4, 1.0, 1.0, 0.5));
    const Vector exact = ed::tfd_state(h0, 1.0, ed::Ordering::Zigzag).amplitudes;
    auto err = [&](double delta) {
      Vector v = itebd_tfd(p, 4, 1.0, delta, {256, 0.0}).to_dense();
      const cplx ph = exact.dot(v);
      v *= std::conj(ph) / std::abs(ph);
      return (v / v.norm() - exact).norm();
    };
    const double e1 = err(0.1), e2 = err(0.05), e3 = err(0.025);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
    CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("MPS and ED fidelity scans agree") {
  const MfiParams p{1.0, 1.0, 0.5};
  for (int n : {2, 3, 4, 5}) {
    const auto sys = mfi_parent(n, 1.0);
    const auto gs = ed::ground_state(sys);
    const auto ed_curve = ed::fidelity_scan(gs.psi, ed::dense_matrix(build_mfi_1d(n, 1.0, 1.0, 0.5)),
                                            ed::default_beta_grid());
    const auto mps_gs = TensorTrainState::from_dense(gs.psi.amplitudes, 2 * n);
    MpsScanOptions o;
    o.delta = 1e-3;
    o.trunc = {256, 1e-12};
    const auto curve = mps_fidelity_scan(mps_gs, p, n, o);
    CHECK_FALSE(curve.at_boundary);
    CHECK(std::abs(curve.f_max - ed_curve.f_max) <= 1e-6);
    CHECK(std::abs(curve.beta_star / ed_curve.beta_star - 1.0) <= 1e-4);
  }
}

TEST_CASE("Trotter schedule") {
  const TrotterSchedule s(3.0, 0.1);
  CHECK(s.n_steps() == 30);
  CHECK(s.s(1) == doctest::Approx(0.05 / 3.0));
  for (int m = 1; m <= s.n_steps(); ++m) {
    CHECK(s.s(m) > 0.0);
    CHECK(s.s(m) < 1.0);
  }
  CHECK_THROWS_AS(TrotterSchedule(1.0, 0.3), Error);
  CHECK_THROWS_AS(TrotterSchedule(0.0, 0.1), Error);
}

TEST_CASE("adiabatic evolution") {
  const MfiParams p{1.0, 1.0, 0.5};
  SUBCASE("no evolution reproduces the Bell baseline") {
    const auto sys = mfi_parent(3, 1.0);
    const auto gs = TensorTrainState::from_dense(ed::ground_state(sys).psi.amplitudes, 6);
    AdiabaticObservers obs;
    obs.ground_state = &gs;
    const auto traj = tebd_adiabatic(p, 3, 1.0, TrotterSchedule(1e-6, 1e-6), {64, 1e-10}, obs);
    const double base = std::norm(overlap(gs, mps_bell(3)));
    CHECK(traj.front().f_adiab == doctest::Approx(base).epsilon(1e-12));
    CHECK(traj.back().f_adiab == doctest::Approx(base).epsilon(1e-5));
  }

  SUBCASE("matches a dense RK4 integrator") {
    for (int n : {2, 3, 4}) {
      const double c = 1.0, total = 1.5;
      const auto sys = mfi_parent(n, c);
      const Matrix hlr = ed::dense_matrix(sys.lr_coupling_terms);
      const Matrix h0 = ed::dense_matrix(sys.left_merged() + sys.right_merged());
      auto deriv = [&](double t, const Vector& v) -> Vector {
        return cplx(0, -1) * (hlr * v + (t / total) * (h0 * v));
      };
      Vector v = mps_bell(n).to_dense();
      const double h = 1e-3;
      for (int k = 0; k < static_cast<int>(std::lround(total / h)); ++k) {
        const double t = k * h;
        const Vector k1 = deriv(t, v);
        const Vector k2 = deriv(t + h / 2, v + (h / 2) * k1);
        const Vector k3 = deriv(t + h / 2, v + (h / 2) * k2);
        const Vector k4 = deriv(t + h, v + h * k3);
        v += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      TensorTrainState final_state;
      const auto traj =
          tebd_adiabatic(p, n, c, TrotterSchedule(total, 0.01), {1 << 10, 0.0}, AdiabaticObservers{}, &final_state);
      CHECK(fidelity(final_state.to_dense(), v) >= 1 - 1e-4);
      CHECK(std::abs(traj.back().norm - 1.0) <= 1e-8);
    }
  }
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tfd/ed.hpp"
#include "tfd/error.hpp"
#include "tfd/models.hpp"

using namespace tfd;
using namespace tfd::ed;
using models::build_mfi_1d;
using models::build_parent;
using models::mfi_couplings;

namespace {

Vector bell_zigzag(int n_pairs) {
  Vector pair(4);
  pair << 1, 0, 0, 1;
  pair /= std::sqrt(2.0);
  Vector out = Vector::Ones(1);
  for (int i = 0; i < n_pairs; ++i) out = num::kron(out, pair);
  return out;
}

double fidelity(const Vector& a, const Vector& b) { return std::norm(a.dot(b)); }

}  // namespace

TEST_CASE("dense matrix of a single Z") {
  models::PauliSum z(1);
  z.add({{0, models::Pauli::Z}}, 1.0);
  const Matrix m = dense_matrix(z);
  CHECK(m(0, 0).real() == 1.0);
  CHECK(m(1, 1).real() == -1.0);
  CHECK(std::abs(m(0, 1)) == 0.0);
}

TEST_CASE("matrix-free apply agrees with dense matrix") {
  std::mt19937_64 rng(2);
  const auto syk = models::sample_spin_syk({6, 4, 1.0, 3, 0});
  const auto sys = build_parent(syk, models::syk_couplings(6), 0.7, 0.9);
  const PauliOperator op(sys.total());
  const Matrix m = dense_matrix(sys, Ordering::Zigzag);
  const Vector v = oracle::random_state(op.dim(), rng);
  Vector y;
  op.apply(v, y);
  CHECK((y - m * v).norm() < 1e-12);
}

TEST_CASE("ordering conversion is an exact permutation similarity") {
  const auto sys = build_parent(build_mfi_1d(3, 1.0, 1.0, 0.5), mfi_couplings(3), 1.0, 0.0);
  const Matrix zig = dense_matrix(sys, Ordering::Zigzag);
  const Matrix blk = dense_matrix(sys, Ordering::Block);
  Matrix p = Matrix::Zero(64, 64);
  for (Index b = 0; b < 64; ++b) {
    Vector e = Vector::Zero(64);
    e[b] = 1.0;
    p.col(b) = to_ordering(StateVector{e, Ordering::Zigzag, 6}, Ordering::Block).amplitudes;
  }
  CHECK(num::max_abs(p * zig * p.adjoint() - blk) == 0.0);

  std::mt19937_64 rng(1);
  const StateVector v{oracle::random_state(64, rng), Ordering::Zigzag, 6};
  const StateVector round = to_ordering(to_ordering(v, Ordering::Block), Ordering::Zigzag);
  CHECK((round.amplitudes - v.amplitudes).norm() == 0.0);
}

TEST_CASE("tfd_state limits") {
  const Matrix h0 = dense_matrix(build_mfi_1d(3, 1.0, 1.0, 0.5));
  SUBCASE("beta = 0 is the Bell product") {
    const StateVector t = tfd_state(h0, 0.0, Ordering::Zigzag);
    CHECK(fidelity(t.amplitudes, bell_zigzag(3)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("large beta is the doubled ground state") {
    const auto eig = num::hermitian_eig(h0);
    const StateVector t = tfd_state(h0, 200.0, Ordering::Block);
    const Vector g = num::kron(eig.vectors.col(0), eig.vectors.col(0).conjugate());
    CHECK(1.0 - fidelity(t.amplitudes, g) < 1e-8);
  }
  SUBCASE("single spin at beta = 2") {
    const Matrix h1 = dense_matrix(models::single_spin_h0());
    const StateVector t = tfd_state(h1, 2.0, Ordering::Block);
    const double z = std::sqrt(1.0 + std::exp(-2.0));
    CHECK(t.amplitudes[0].real() == doctest::Approx(1.0 / z));
    CHECK(t.amplitudes[3].real() == doctest::Approx(std::exp(-1.0) / z));
    CHECK(std::abs(t.amplitudes[1]) < 1e-15);
  }
  SUBCASE("complex H0 is rejected") {
    Matrix y = oracle::pauli('Y');
    try {
      tfd_state(y, 1.0, Ordering::Block);
      FAIL("expected AntiunitaryMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::AntiunitaryMismatch);
    }
  }
}

TEST_CASE("ground state limits") {
  SUBCASE("strong coupling gives the Bell product") {
    const auto sys = build_parent(build_mfi_1d(2, 1.0, 1.0, 0.5), mfi_couplings(2), 1e3, 0.0);
    const auto gs = ground_state(sys);
    CHECK(fidelity(gs.psi.amplitudes, bell_zigzag(2)) >= 1 - 1e-3);
  }
  SUBCASE("strong coupling, N=3") {
    const auto sys = build_parent(build_mfi_1d(3, 1.0, 1.05, 0.5), mfi_couplings(3), 1e3, 0.0);
    CHECK(fidelity(ground_state(sys).psi.amplitudes, bell_zigzag(3)) >= 1 - 1e-3);
  }
  SUBCASE("decoupled limit") {
    const auto h0 = build_mfi_1d(3, 1.0, 1.0, 0.5);
    const auto eig = num::hermitian_eig(dense_matrix(h0));
    const auto sys = build_parent(h0, mfi_couplings(3), 0.0, 0.0);
    const auto gs = ground_state(sys);
    CHECK(gs.energy == doctest::Approx(2 * eig.energies[0]).epsilon(1e-12));
    const Vector g = num::kron(eig.vectors.col(0), eig.vectors.col(0).conjugate());
    CHECK(fidelity(to_ordering(gs.psi, Ordering::Block).amplitudes, g) == doctest::Approx(1.0));
  }
  SUBCASE("single spin toy at c=1 is an exact TFD") {
    const auto gs = ground_state(models::single_spin_toy(1.0));
    const Matrix h1 = dense_matrix(models::single_spin_h0());
    const double beta = 2 * std::asinh(1.0);
    CHECK(beta == doctest::Approx(1.76275).epsilon(1e-5));
    const auto t = tfd_state(h1, beta, Ordering::Zigzag);
    CHECK(std::abs(1.0 - fidelity(gs.psi.amplitudes, t.amplitudes)) <= 1e-10);
  }
}

TEST_CASE("Lanczos path agrees with dense path") {
  // 12 merged sites: above the dense-solve threshold.
  const auto sys = build_parent(build_mfi_1d(6, 1.0, 1.05, 0.5), mfi_couplings(6), 1.0, 0.0);
  const auto gs = ground_state(sys);
  const auto ev = num::hermitian_eigenvalues(dense_matrix(sys, Ordering::Zigzag));
  CHECK(gs.energy == doctest::Approx(ev[0]).epsilon(1e-10));
  const double h_norm = sys.total().coefficient_l1();
  CHECK(gs.residual <= 1e-8 * h_norm);
  const auto g = gap(sys);
  CHECK(g.delta == doctest::Approx(ev[1] - ev[0]).epsilon(1e-7));
  CHECK(g.delta >= -1e-10);
}

TEST_CASE("gap examples") {
  SUBCASE("decoupled gap equals H0 gap") {
    const auto h0 = build_mfi_1d(3, 1.0, 1.0, 0.5);
    const auto ev = num::hermitian_eigenvalues(dense_matrix(h0));
    CHECK(gap(build_parent(h0, mfi_couplings(3), 0.0, 0.0)).delta == doctest::Approx(ev[1] - ev[0]));
  }
  SUBCASE("single spin strong coupling gap grows as 4c") {
    for (double c : {10.0, 100.0, 1000.0}) {
      const auto sys = build_parent(models::single_spin_h0(), mfi_couplings(1), c, 0.0);
      const double d = gap(sys).delta;
      CHECK(std::abs(d - 4 * c) <= 1.0);
    }
  }
  SUBCASE("N=3 chaotic c=1 matches full diagonalization") {
    const auto sys = build_parent(build_mfi_1d(3, 1.0, 1.05, 0.5), mfi_couplings(3), 1.0, 0.0);
    const auto ev = num::hermitian_eigenvalues(dense_matrix(sys, Ordering::Block));
    CHECK(std::abs(gap(sys).delta - (ev[1] - ev[0])) <= 1e-8);
  }
}

TEST_CASE("fidelity scan") {
  SUBCASE("self-consistency") {
    const Matrix h0 = dense_matrix(build_mfi_1d(3, 1.0, 1.05, 0.5));
    const double beta0 = 0.83;
    const auto curve = fidelity_scan(tfd_state(h0, beta0, Ordering::Block), h0, default_beta_grid());
    CHECK(curve.beta_star == doctest::Approx(beta0).epsilon(1e-6));
    CHECK(std::abs(curve.f_max - 1.0) <= 1e-9);
    CHECK_FALSE(curve.at_boundary);
  }
  SUBCASE("single spin closed form") {
    const Matrix h1 = dense_matrix(models::single_spin_h0());
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0, 10.0}) {
      const auto gs = ground_state(models::single_spin_toy(c));
      const auto curve = fidelity_scan(gs.psi, h1, default_beta_grid());
      CHECK(std::abs(curve.beta_star - 2 * std::asinh(1 / c)) <= 1e-6);
      CHECK(std::abs(curve.f_max - 1.0) <= 1e-10);
    }
  }
  SUBCASE("beta star decreases in c") {
    const Matrix h1 = dense_matrix(models::single_spin_h0());
    double prev = 1e9;
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0, 10.0}) {
      const double b = fidelity_scan(ground_state(models::single_spin_toy(c)).psi, h1, default_beta_grid()).beta_star;
      CHECK(b < prev);
      prev = b;
    }
  }
  SUBCASE("decoupled ground state peaks at the grid boundary") {
    const auto h0 = build_mfi_1d(2, 1.0, 1.0, 0.5);
    const auto gs = ground_state(build_parent(h0, mfi_couplings(2), 0.0, 0.0));
    const auto curve = fidelity_scan(gs.psi, dense_matrix(h0), default_beta_grid());
    CHECK(curve.at_boundary);
    CHECK(curve.beta_star == doctest::Approx(1e3));
  }
  SUBCASE("ordering does not change overlaps") {
    const auto h0 = build_mfi_1d(3, 1.0, 1.05, 0.5);
    const auto gs = ground_state(build_parent(h0, mfi_couplings(3), 1.0, 0.0));
    const Matrix m = dense_matrix(h0);
    const auto a = fidelity_scan(gs.psi, m, default_beta_grid());
    const auto b = fidelity_scan(to_ordering(gs.psi, Ordering::Block), m, default_beta_grid());
    for (std::size_t k = 0; k < a.overlaps.size(); ++k) CHECK(std::abs(a.overlaps[k] - b.overlaps[k]) <= 1e-12);
  }
  CHECK_THROWS_AS(fidelity_scan(tfd_state(Matrix::Identity(2, 2), 0, Ordering::Block), Matrix::Identity(2, 2), {}),
                  Error);
}

TEST_CASE("off-diagonal weight") {
  const Matrix h0 = dense_matrix(build_mfi_1d(3, 1.0, 1.05, 0.5));
  const auto eig = num::hermitian_eig(h0);
  CHECK(offdiag_weight(tfd_state(h0, 0.7, Ordering::Block), eig) <= 1e-10);
  CHECK(offdiag_weight(tfd_state(h0, 0.0, Ordering::Zigzag), eig) <= 1e-10);
  const Vector off = num::kron(eig.vectors.col(0), eig.vectors.col(1).conjugate());
  CHECK(offdiag_weight(StateVector{off, Ordering::Block, 6}, eig) == doctest::Approx(1.0));
}

TEST_CASE("fidelity bound and variational inequality on ED runs") {
  for (int n : {2, 3, 4}) {
    for (double c : {0.3, 1.0, 3.0}) {
      for (double xi : {0.0, 1.0 * n}) {
        const auto h0 = build_mfi_1d(n, 1.0, 1.05, 0.5);
        const auto sys = build_parent(h0, mfi_couplings(n), c, xi);
        const Matrix m = dense_matrix(h0);
        const auto eig = num::hermitian_eig(m);
        const auto gs = ground_state(sys);
        CHECK(gs.psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
        const auto curve = fidelity_scan(gs.psi, eig, default_beta_grid());
        CHECK(curve.f_max <= 1.0 - offdiag_weight(gs.psi, eig) + 1e-9);
        if (n <= 3) {
          const auto total = sys.total();
          for (std::size_t k = 0; k < curve.betas.size(); k += 6) {
            const auto t = tfd_state(m, curve.betas[k], Ordering::Zigzag);
            CHECK(gs.energy <= expectation(total, t.amplitudes) + 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("one-sided moments of a TFD match thermal values") {
  const Matrix h0 = dense_matrix(build_mfi_1d(3, 1.0, 1.05, 0.5));
  const auto eig = num::hermitian_eig(h0);
  const double beta = 0.9;
  double z = 0, e1 = 0, e2 = 0;
  for (Index k = 0; k < eig.dim(); ++k) {
    const double w = std::exp(-beta * eig.energies[k]);
    z += w;
    e1 += w * eig.energies[k];
    e2 += w * eig.energies[k] * eig.energies[k];
  }
  const auto mom = one_sided_moments(tfd_state(h0, beta, Ordering::Zigzag), h0);
  CHECK(mom.mean == doctest::Approx(e1 / z).epsilon(1e-12));
  CHECK(mom.variance == doctest::Approx(e2 / z - (e1 / z) * (e1 / z)).epsilon(1e-10));
}

TEST_CASE("size limits") {
  const auto big = build_parent(build_mfi_1d(11, 1, 1, 0.5), mfi_couplings(11), 1.0, 0.0);
  CHECK_THROWS_AS(ground_state(big), Error);
  CHECK_THROWS_AS(dense_matrix(build_mfi_1d(13, 1, 1, 1)), Error);
}

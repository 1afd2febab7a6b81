#include "tfd/tebd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tfd/error.hpp"
#include "tfd/optimize.hpp"

namespace tfd::mps {

namespace {

Matrix2 field_gate(const MfiParams& p, cplx scale) {
  Matrix h(2, 2);
  h << p.hz, p.hx, p.hx, -p.hz;
  return num::expm_hermitian(h, scale);
}

// exp(scale * jz Z Z) on a pair, basis index s1 * 2 + s2.
Matrix zz_gate(double jz, cplx scale) {
  Matrix g = Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    const double zz = (k == 0 || k == 3) ? 1.0 : -1.0;
    g(k, k) = std::exp(scale * jz * zz);
  }
  return g;
}

Matrix xx_plus_zz() {
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = h(3, 3) = 1.0;
  h(1, 1) = h(2, 2) = -1.0;
  h(0, 3) = h(3, 0) = h(1, 2) = h(2, 1) = 1.0;
  return h;
}

double fidelity(const TensorTrainState& a, const TensorTrainState& b) {
  const double na = overlap(a, a).real(), nb = overlap(b, b).real();
  return std::norm(overlap(a, b)) / (na * nb);
}

}  // namespace

TfdEvolver::TfdEvolver(const MfiParams& params, int n, const Truncation& trunc)
    : params_(params), n_(n), trunc_(trunc), psi_(mps_bell(n)) {}

void TfdEvolver::step(double d) {
  const Matrix2 half_field = field_gate(params_, -d / 4.0);
  const Matrix zz = zz_gate(params_.jz, -d / 2.0);
  for (int i = 0; i < n_; ++i) psi_.apply_one_site(2 * i, half_field, false);
  for (int i = n_ - 2; i >= 0; --i) psi_.apply_distance_two(2 * i, zz, trunc_, false);
  for (int i = 0; i < n_; ++i) psi_.apply_one_site(2 * i, half_field, false);
  psi_.normalize();
  beta_ += d;
}

void TfdEvolver::reset(TensorTrainState psi, double beta) {
  psi_ = std::move(psi);
  beta_ = beta;
}

TensorTrainState itebd_tfd(const MfiParams& params, int n, double beta, double delta, const Truncation& trunc) {
  if (!(delta > 0.0) || !(beta >= 0.0)) throw Error(ErrorCode::InvalidSchedule, "beta must be >= 0 and delta > 0");
  const double ratio = beta / delta;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9) {
    throw Error(ErrorCode::InvalidSchedule, "beta/delta = " + std::to_string(ratio) + " is not an integer");
  }
  TfdEvolver ev(params, n, trunc);
  for (long k = 0; k < static_cast<long>(steps); ++k) ev.step(delta);
  return ev.state();
}

MpsFidelityCurve mps_fidelity_scan(const TensorTrainState& psi, const MfiParams& params, int n,
                                   const MpsScanOptions& opts) {
  if (psi.size() != 2 * n) throw Error(ErrorCode::Incompatible, "state length is not 2n");
  if (!(opts.delta > 0.0) || !(opts.beta_max > opts.delta)) throw Error(ErrorCode::InvalidGrid, "bad scan range");
  MpsFidelityCurve curve;
  TfdEvolver ev(params, n, opts.trunc);
  curve.betas.push_back(0.0);
  curve.overlaps.push_back(fidelity(ev.state(), psi));
  // States at the best step and the one before it, for the refinement.
  TensorTrainState best = ev.state(), before_best = ev.state(), previous = ev.state();
  std::size_t k_best = 0;
  while (ev.beta() + 0.5 * opts.delta < opts.beta_max) {
    ev.step(opts.delta);
    const double f = fidelity(ev.state(), psi);
    curve.betas.push_back(ev.beta());
    curve.overlaps.push_back(f);
    curve.max_bond = std::max(curve.max_bond, ev.state().max_bond());
    if (f > curve.overlaps[k_best]) {
      k_best = curve.overlaps.size() - 1;
      before_best = std::move(previous);
      best = ev.state();
    } else if (f < opts.stop_ratio * curve.overlaps[k_best] ||
               (opts.stop_factor > 0.0 && k_best > 0 && ev.beta() > opts.stop_factor * curve.betas[k_best])) {
      break;
    }
    previous = ev.state();
  }
  curve.discarded_weight = ev.state().discarded_weight();
  curve.beta_star = curve.betas[k_best];
  curve.f_max = curve.overlaps[k_best];
  if (k_best == 0 || k_best + 1 == curve.betas.size()) {
    curve.at_boundary = true;
    return curve;
  }
  const double b_lo = curve.betas[k_best - 1], b_mid = curve.betas[k_best], b_hi = curve.betas[k_best + 1];
  auto overlap_at = [&](double beta) {
    const bool low = beta <= b_mid;
    const double d = beta - (low ? b_lo : b_mid);
    TfdEvolver local(params, n, opts.trunc);
    local.reset(low ? before_best : best, low ? b_lo : b_mid);
    if (d > 0.0) local.step(d);
    return fidelity(local.state(), psi);
  };
  const auto [b, fb] = golden_section_max(overlap_at, b_lo, b_hi, opts.rel_tol);
  if (fb >= curve.f_max) {
    curve.beta_star = b;
    curve.f_max = fb;
  }
  return curve;
}

TrotterSchedule::TrotterSchedule(double total_time, double step) : total_time_(total_time), step_(step) {
  if (!(total_time > 0.0) || !(step > 0.0)) throw Error(ErrorCode::InvalidSchedule, "T and dt must be positive");
  const double ratio = total_time / step;
  const double n = std::round(ratio);
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
    throw Error(ErrorCode::InvalidSchedule, "T/dt = " + std::to_string(ratio) + " is not a positive integer");
  }
  n_steps_ = static_cast<int>(n);
}

double TrotterSchedule::s(int m) const {
  if (m < 1 || m > n_steps_) throw Error(ErrorCode::InvalidSchedule, "step index out of range");
  return (m - 0.5) * step_ / total_time_;
}

std::vector<AdiabaticPoint> tebd_adiabatic(const MfiParams& params, int n, double c, const TrotterSchedule& schedule,
                                           const Truncation& trunc, const AdiabaticObservers& observers,
                                           TensorTrainState* final_state) {
  const int sites = 2 * n;
  const double dt = schedule.step();
  TensorTrainState psi = mps_bell(n);
  const Matrix lr = num::expm_hermitian(xx_plus_zz(), cplx(0.0, 2.0 * c * dt));

  std::vector<AdiabaticPoint> out;
  auto record = [&](double t) {
    AdiabaticPoint p;
    p.t = t;
    p.norm = std::sqrt(overlap(psi, psi).real());
    if (observers.ground_state) p.f_adiab = fidelity(*observers.ground_state, psi);
    if (observers.tfd) p.f_exp = fidelity(*observers.tfd, psi);
    if (observers.hamiltonian) p.energy = expectation(*observers.hamiltonian, psi);
    p.max_bond = psi.max_bond();
    p.discarded_weight = psi.discarded_weight();
    out.push_back(p);
  };
  record(0.0);

  for (int m = 1; m <= schedule.n_steps(); ++m) {
    const double s = schedule.s(m);
    const Matrix2 field = field_gate(params, cplx(0.0, -s * dt / 2.0));
    const Matrix zz = zz_gate(params.jz, cplx(0.0, -s * dt / 2.0));
    const bool right = m % 2 == 1;
    auto zz_layer = [&] {
      if (right) {
        for (int j = 0; j + 2 < sites; ++j) psi.apply_distance_two(j, zz, trunc, true);
      } else {
        for (int j = sites - 3; j >= 0; --j) psi.apply_distance_two(j, zz, trunc, false);
      }
    };
    for (int j = 0; j < sites; ++j) psi.apply_one_site(j, field, true);
    zz_layer();
    if (right) {
      for (int i = n - 1; i >= 0; --i) psi.apply_two_site(2 * i, lr, trunc, false);
    } else {
      for (int i = 0; i < n; ++i) psi.apply_two_site(2 * i, lr, trunc, true);
    }
    zz_layer();
    for (int j = 0; j < sites; ++j) psi.apply_one_site(j, field, true);
    if (observers.every_layer || m == schedule.n_steps()) record(m * dt);
  }
  if (final_state) *final_state = std::move(psi);
  return out;
}

}  // namespace tfd::mps

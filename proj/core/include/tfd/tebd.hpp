#pragma once

#include <vector>

#include "tfd/mpo.hpp"
#include "tfd/mps.hpp"

namespace tfd::mps {

/// Mixed-field Ising couplings jz ZZ + hx X + hz Z.
struct MfiParams {
  double jz = 1.0;
  double hx = 1.0;
  double hz = 0.5;
};

/// Imaginary-time evolution of one side of |Bell> toward the TFD. One step
/// applies exp(-d/4 h1) exp(-d/2 ZZ) exp(-d/4 h1) to the L sites, so n steps
/// of size d produce exp(-n d H_L / 2)|Bell>, the TFD at beta = n d.
class TfdEvolver {
 public:
  TfdEvolver(const MfiParams& params, int n, const Truncation& trunc);

  double beta() const { return beta_; }
  const TensorTrainState& state() const { return psi_; }
  /// Advances beta by d (second-order step) and renormalizes.
  void step(double d);
  /// Restarts from a stored state at the given beta.
  void reset(TensorTrainState psi, double beta);

 private:
  MfiParams params_;
  int n_;
  Truncation trunc_;
  TensorTrainState psi_;
  double beta_ = 0.0;
};

/// TFD at beta via beta / delta Trotter steps; beta / delta must be an
/// integer within 1e-9.
TensorTrainState itebd_tfd(const MfiParams& params, int n, double beta, double delta, const Truncation& trunc);

struct MpsScanOptions {
  double delta = 0.01;
  double beta_max = 50.0;
  /// Stop once the overlap falls below this fraction of the running maximum.
  double stop_ratio = 0.5;
  /// Also stop once beta exceeds this multiple of the best beta so far
  /// (0 disables).
  double stop_factor = 3.0;
  /// Relative tolerance of the golden-section refinement.
  double rel_tol = 1e-6;
  Truncation trunc{};
};

struct MpsFidelityCurve {
  std::vector<double> betas;
  std::vector<double> overlaps;
  double beta_star = 0.0;
  double f_max = 0.0;
  bool at_boundary = false;
  Index max_bond = 0;
  double discarded_weight = 0.0;
};

/// |<TFD_beta|psi>|^2 along the imaginary-time trajectory, then golden-section
/// refinement between the neighbours of the best step.
MpsFidelityCurve mps_fidelity_scan(const TensorTrainState& psi, const MfiParams& params, int n,
                                   const MpsScanOptions& opts = {});

/// Linear ramp with midpoint sampling s(m) = (m - 1/2) dt / T.
class TrotterSchedule {
 public:
  /// Throws InvalidSchedule unless T / dt is a positive integer (within 1e-9).
  TrotterSchedule(double total_time, double step);

  double total_time() const { return total_time_; }
  double step() const { return step_; }
  int n_steps() const { return n_steps_; }
  /// m in 1..n_steps.
  double s(int m) const;

 private:
  double total_time_;
  double step_;
  int n_steps_;
};

struct AdiabaticPoint {
  double t = 0.0;
  double f_adiab = 0.0;
  double f_exp = 0.0;
  double energy = 0.0;
  Index max_bond = 0;
  double discarded_weight = 0.0;
  double norm = 1.0;
};

/// Reference states for the fidelities; any pointer may be null.
struct AdiabaticObservers {
  const TensorTrainState* ground_state = nullptr;
  const TensorTrainState* tfd = nullptr;
  const TensorTrainOperator* hamiltonian = nullptr;
  /// Record after every layer; otherwise only the initial and final points.
  bool every_layer = true;
};

/// Real-time second-order Trotter evolution of |Bell> under
/// H_LR + s(t) (H_L + H*_R), with c the per-operator coupling.
std::vector<AdiabaticPoint> tebd_adiabatic(const MfiParams& params, int n, double c, const TrotterSchedule& schedule,
                                           const Truncation& trunc, const AdiabaticObservers& observers,
                                           TensorTrainState* final_state = nullptr);

}  // namespace tfd::mps

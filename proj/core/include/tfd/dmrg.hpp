#pragma once

#include <cstdint>
#include <vector>

#include "tfd/mpo.hpp"
#include "tfd/mps.hpp"

namespace tfd::mps {

struct DmrgOptions {
  Index max_bond = 625;
  double cutoff = 1e-10;
  int max_sweeps = 30;
  int min_sweeps = 2;
  /// Converged when |dE| per sweep < energy_tol * max(1, |E|).
  double energy_tol = 1e-10;
  /// Optional per-sweep bond caps (warm-up); the last entry repeats, capped by max_bond.
  std::vector<Index> bond_schedule;
  /// Weight of the projectors onto `orthogonal_to` states.
  double penalty_weight = 0.0;
  /// Initial states with bonds below noise_bond get noise_amplitude times a
  /// random state added, so two-site updates can escape product states.
  Index noise_bond = 4;
  double noise_amplitude = 1e-3;
  std::uint64_t noise_seed = 0x6d7073;
  int krylov = 24;
  int local_restarts = 3;
  double local_tol = 1e-10;
};

struct SweepRecord {
  int sweep = 0;
  double energy = 0.0;
  Index max_bond = 0;
  double discarded_weight = 0.0;
  double seconds = 0.0;
};

struct DmrgResult {
  double energy = 0.0;
  TensorTrainState state;
  bool converged = false;
  std::vector<SweepRecord> log;
};

/// Two-site DMRG for the lowest state of h + penalty_weight * sum |phi><phi|.
/// Returns the best state with converged = false when max_sweeps runs out.
DmrgResult dmrg(const TensorTrainOperator& h, TensorTrainState init, const DmrgOptions& opts,
                const std::vector<TensorTrainState>& orthogonal_to = {});

/// Projector weight large enough to lift the ground state above the first
/// excitation: 10 (|E0| + 2 * norm_bound), with norm_bound >= ||H||.
double excited_penalty_weight(double e0, double norm_bound);

}  // namespace tfd::mps

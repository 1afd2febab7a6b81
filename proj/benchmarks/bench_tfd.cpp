#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "tfd/dmrg.hpp"
#include "tfd/ed.hpp"
#include "tfd/models.hpp"
#include "tfd/mpo.hpp"
#include "tfd/rmt.hpp"
#include "tfd/tebd.hpp"

using namespace tfd;

namespace {

models::DoubledSystem mfi_parent(int n, double c) {
  return models::build_parent(models::build_mfi_1d(n, 1.0, 1.0, 0.5), models::mfi_couplings(n), c, 0.0);
}

void BM_SparseGroundState(benchmark::State& state) {
  const auto sys = mfi_parent(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ed::ground_state(sys).energy);
}
BENCHMARK(BM_SparseGroundState)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EdFidelityScan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sys = mfi_parent(n, 1.0);
  const auto gs = ed::ground_state(sys);
  const Matrix h0 = ed::dense_matrix(models::build_mfi_1d(n, 1.0, 1.0, 0.5));
  const num::EigenSystem eig = num::hermitian_eig(h0);
  const auto grid = ed::default_beta_grid();
  for (auto _ : state) benchmark::DoNotOptimize(ed::fidelity_scan(gs.psi, eig, grid).f_max);
}
BENCHMARK(BM_EdFidelityScan)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_DmrgGroundState(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = mps::compile_mpo(mfi_parent(n, 1.0));
  mps::DmrgOptions o;
  o.max_bond = state.range(1);
  o.energy_tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(mps::dmrg(h, mps::mps_bell(n), o).energy);
}
BENCHMARK(BM_DmrgGroundState)->Args({10, 32})->Args({20, 64})->Unit(benchmark::kMillisecond);

void BM_ImaginaryTimeScan(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = mps::compile_mpo(mfi_parent(n, 1.0));
  mps::DmrgOptions o;
  o.max_bond = 32;
  const auto gs = mps::dmrg(h, mps::mps_bell(n), o);
  mps::MpsScanOptions so;
  so.trunc = {64, 1e-10};
  for (auto _ : state) benchmark::DoNotOptimize(mps::mps_fidelity_scan(gs.state, {1.0, 1.0, 0.5}, n, so).f_max);
}
BENCHMARK(BM_ImaginaryTimeScan)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_AdiabaticRamp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mps::TrotterSchedule schedule(2.0, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mps::tebd_adiabatic({1.0, 1.0, 0.5}, n, 1.0, schedule, {64, 1e-10}, {}).size());
  }
}
BENCHMARK(BM_AdiabaticRamp)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_DiagonalRoots(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const RealVector eigs = num::hermitian_eigenvalues(rmt::sample_gue(state.range(0), 1.0, rng));
  for (auto _ : state) benchmark::DoNotOptimize(rmt::solve_diagonal(eigs, 2.0, 1).lambda_star);
}
BENCHMARK(BM_DiagonalRoots)->Arg(64)->Arg(512)->Arg(2048)->Unit(benchmark::kMicrosecond);

void BM_FiniteK(benchmark::State& state) {
  rmt::RmtConfig cfg;
  cfg.l = state.range(0);
  cfg.n = static_cast<int>(std::log2(static_cast<double>(cfg.l)));
  cfg.k = static_cast<int>(state.range(1));
  cfg.j = 2.0 * rmt::critical_coupling(cfg.sigma, cfg.n);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(rmt::finite_k_experiment(cfg).f_max);
  }
}
BENCHMARK(BM_FiniteK)->Args({16, 8})->Args({32, 8})->Args({32, 32})->Unit(benchmark::kMillisecond);

void BM_GueAnalytics(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(rmt::gue_analytics(2.0, 1.0, 0.0).beta_star);
}
BENCHMARK(BM_GueAnalytics)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

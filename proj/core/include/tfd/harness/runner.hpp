#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tfd/harness/config.hpp"
#include "tfd/harness/records.hpp"

namespace tfd::harness {

/// Toolkit version written into every record.
std::string toolkit_version();

/// One task of the sweep. Dimensions a scenario does not use hold a single
/// placeholder value.
struct GridPoint {
  std::size_t index = 0;
  int n = 0;
  double c = kNaN;
  XiValue xi{};
  double t = kNaN;
  double j_over_jc = kNaN;
  int k = 0;
  int realization = 0;
  std::uint64_t seed = 0;
};

/// Deterministic enumeration order: n, c, xi, t, j/J_c, K, realization.
std::vector<GridPoint> enumerate_grid(const ExperimentConfig& cfg);

/// Runs one grid point. Engine errors are caught and returned with
/// status "error".
ResultRecord evaluate_point(const ExperimentConfig& cfg, const GridPoint& p);

struct RunOptions {
  /// Overrides cfg.threads / cfg.output when set.
  int threads = 0;
  std::string output;
  /// Skips grid points already present in the output for the same config hash.
  bool resume = false;
  /// Stop after this many new records (0: no limit); simulates interruption.
  std::size_t max_new_records = 0;
  /// Called from the writer thread after each record is persisted.
  std::function<void(const ResultRecord&)> on_record;
};

struct RunSummary {
  std::vector<ResultRecord> records;  // complete file contents, grid order
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  /// 0 success, 3 when any record carries status "error".
  int exit_code = 0;
};

/// Evaluates the grid on a worker pool; a single writer appends records in
/// grid order and flushes each one, so an interrupted run leaves a clean
/// prefix that resume continues from. Resume on a file with a different
/// config hash throws ConfigError.
RunSummary run(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct DisorderSummary {
  ResultRecord key;  // swept parameters of the group
  int count = 0;
  double f_max_mean = kNaN, f_max_std = kNaN;
  double beta_star_mean = kNaN, beta_star_std = kNaN;
  double w_off_mean = kNaN, w_off_std = kNaN;
};

/// Mean and standard deviation over realizations for each parameter group
/// (records with status "ok" only).
std::vector<DisorderSummary> summarize(const std::vector<ResultRecord>& records);

}  // namespace tfd::harness

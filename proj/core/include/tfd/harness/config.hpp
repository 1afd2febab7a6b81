#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tfd/numkernel.hpp"

namespace tfd::harness {

enum class Scenario {
  BetaVsC,
  FidelityVsC,
  EdSmallModel,
  Adiabatic,
  GapVsC,
  DecaySlope,
  PenaltySweep,
  RmtAnalytics,
  RmtFiniteK,
  Thermometry,
};

enum class ModelFamily { Mfi1d, Mfi2d, SpinSyk, SingleSpin };

/// Auto picks ED while the doubled system fits the sparse solver.
enum class Engine { Auto, Ed, Mps };

std::string_view to_string(Scenario s);
std::string_view to_string(ModelFamily m);
std::string_view to_string(Engine e);
Scenario parse_scenario(std::string_view s);

/// Penalty strength written as scale * N^power ("0", "2.5", "N", "N^2", "0.5N").
struct XiValue {
  double scale = 0.0;
  int power = 0;

  double resolve(int n) const;
  std::string str() const;
  static XiValue parse(std::string_view token);
  bool operator==(const XiValue&) const = default;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::BetaVsC;

  ModelFamily model = ModelFamily::Mfi1d;
  double jz = 1.0;
  double hx = 1.0;
  double hz = 0.5;
  int nx = 2;
  int ny = 4;
  int q = 4;
  double j_scale = 1.0;
  double sigma = 1.0;

  std::vector<int> n_list{8};
  std::vector<double> c_list{1.0};
  std::vector<XiValue> xi_list{XiValue{}};
  std::vector<double> beta_grid;  // empty: 61 log-spaced points in [1e-3, 1e3]
  std::vector<double> t_list{3.0};
  std::vector<double> j_over_jc_list{2.0};
  std::vector<int> k_list{8};

  Engine engine = Engine::Auto;
  Index chi = 64;
  double cutoff = 1e-10;
  double delta = 0.01;
  double dt = 0.1;
  double beta_max = 50.0;
  int max_sweeps = 30;

  std::uint64_t seed = 1;
  int realizations = 10;

  std::string output = "results.csv";
  int threads = 1;

  /// Throws ConfigError on empty grids or out-of-range values.
  void validate() const;
  /// Every setting (defaults included) as sorted key/value text.
  std::vector<std::pair<std::string, std::string>> echo() const;
  /// FNV-1a over echo(), excluding output and threads.
  std::uint64_t hash() const;
  std::string hash_hex() const;
  std::vector<double> resolved_beta_grid() const;
};

/// INI text with sections [experiment], [model], [grid], [numerics].
/// Unknown keys and malformed values raise ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Formats a double so that it parses back to the same value.
std::string format_double(double x);

}  // namespace tfd::harness

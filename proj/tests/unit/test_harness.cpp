#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "tfd/ed.hpp"
#include "tfd/error.hpp"
#include "tfd/harness/config.hpp"
#include "tfd/harness/fit.hpp"
#include "tfd/harness/records.hpp"
#include "tfd/harness/runner.hpp"
#include "tfd/rmt.hpp"

using namespace tfd;
using namespace tfd::harness;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "tfd_harness_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// File text with the wall_time field blanked on every data row.
std::string without_wall_time(const std::string& path) {
  const CsvContents c = read_csv(path);
  std::string out;
  for (const auto& [k, v] : c.metadata) out += k + "=" + v + "\n";
  for (ResultRecord r : c.records) {
    r.wall_time = 0.0;
    out += to_csv_row(r) + "\n";
  }
  return out;
}

ExperimentConfig single_spin_sweep(const std::vector<double>& cs) {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::BetaVsC;
  cfg.model = ModelFamily::SingleSpin;
  cfg.c_list = cs;
  return cfg;
}

double toy_beta(double c) { return 2.0 * std::asinh(1.0 / c); }

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse(R"(
; comment
[experiment]
scenario = penalty_sweep
seed = 7
realizations = 3
output = out.csv

[model]
family = mfi_1d
hz = 0.25

[grid]
n = 4, 6 8
c = 0.5,1
xi = 0, N, N^2, 0.5N
beta = log 0.01 100 5

[numerics]
engine = ed
chi = 32
)");
  CHECK(cfg.scenario == Scenario::PenaltySweep);
  CHECK(cfg.seed == 7);
  CHECK(cfg.realizations == 3);
  CHECK(cfg.hz == 0.25);
  CHECK(cfg.hx == 1.0);
  CHECK(cfg.n_list == std::vector<int>{4, 6, 8});
  CHECK(cfg.c_list == std::vector<double>{0.5, 1.0});
  REQUIRE(cfg.xi_list.size() == 4);
  CHECK(cfg.xi_list[1].resolve(6) == 6.0);
  CHECK(cfg.xi_list[2].resolve(6) == 36.0);
  CHECK(cfg.xi_list[3].resolve(6) == 3.0);
  CHECK(cfg.xi_list[3].str() == "0.5N");
  REQUIRE(cfg.beta_grid.size() == 5);
  CHECK(cfg.beta_grid[2] == doctest::Approx(1.0));
  CHECK(cfg.engine == Engine::Ed);
  CHECK(cfg.chi == 32);

  auto throws_config = [](const std::string& text) {
    try {
      parse(text);
    } catch (const Error& e) {
      return e.code() == ErrorCode::ConfigError;
    }
    return false;
  };
  CHECK(throws_config("[experiment]\nscenario = nope\n"));
  CHECK(throws_config("[experiment]\nseed = 1\n"));
  CHECK(throws_config("[experiment]\nscenario = beta_vs_c\nbogus = 1\n"));
  CHECK(throws_config("[experiment]\nscenario = beta_vs_c\n[grid]\nc = 1, x\n"));
  CHECK(throws_config("[experiment]\nscenario = beta_vs_c\n[grid]\nn =\n"));
  CHECK(throws_config("[experiment]\nscenario = beta_vs_c\n[grid]\nbeta = 3, 1\n"));
  CHECK(throws_config("[weird]\nx = 1\n"));
}

TEST_CASE("config echo and hash") {
  ExperimentConfig a;
  ExperimentConfig b = a;
  CHECK(a.hash() == b.hash());
  b.output = "elsewhere.csv";
  b.threads = 4;
  CHECK(a.hash() == b.hash());
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  b = a;
  b.c_list = {1.0, 2.0};
  CHECK(a.hash() != b.hash());
  CHECK(a.hash_hex().size() == 16);
  bool has_default_grid = false;
  for (const auto& [k, v] : a.echo()) {
    if (k == "grid.beta") has_default_grid = v.find("1000") != std::string::npos;
  }
  CHECK(has_default_grid);
}

TEST_CASE("shipped example configs parse") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(TFD_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg = load_config(entry.path().string()));
    CHECK_FALSE(enumerate_grid(cfg).empty());
    ++count;
  }
  CHECK(count >= 9);
}

TEST_CASE("CSV round trip") {
  ResultRecord r;
  r.grid_index = 3;
  r.scenario = "beta_vs_c";
  r.n = 5;
  r.c = 0.1;
  r.beta_star = 1.0 / 3.0;
  r.f_max = 0.987654321012345;
  r.max_bond = 17;
  r.boundary = true;
  r.status = "error";
  r.message = "Incompatible: a, \"quoted\" message";
  r.seed = 18446744073709551615ULL;
  const ResultRecord back = parse_csv_row(to_csv_row(r));
  CHECK(back.grid_index == 3);
  CHECK(back.c == 0.1);
  CHECK(back.beta_star == r.beta_star);
  CHECK(back.f_max == r.f_max);
  CHECK(std::isnan(back.gap));
  CHECK(back.boundary);
  CHECK(back.message == r.message);
  CHECK(back.seed == r.seed);
  CHECK(to_csv_row(back) == to_csv_row(r));
  CHECK_THROWS_AS(parse_csv_row("1,2,3"), Error);

  const std::string path = temp_path("torn.csv");
  {
    CsvWriter w(path, {{"config_hash", "abc"}}, false);
    w.write(r);
  }
  {
    std::ofstream out(path, std::ios::app);
    out << "4,beta_vs_c,partial";
  }
  const CsvContents c = read_csv(path);
  CHECK(c.meta("config_hash") == "abc");
  CHECK(c.records.size() == 1);
}

TEST_CASE("decay slope fit") {
  std::vector<std::pair<double, double>> pts;
  for (int n : {20, 30, 40, 50, 60}) pts.emplace_back(n, std::exp(-n / 100.0));
  const SlopeFit f = fit_decay_slope(pts);
  CHECK(std::abs(f.a - 0.01) < 1e-12);
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_decay_slope({{1, 0.5}, {1, 0.4}, {1, 0.3}, {1, 0.2}}), Error);
  CHECK_THROWS_AS(fit_decay_slope({{1, 0.5}, {2, 0.4}, {3, 0.3}}), Error);
  CHECK_THROWS_AS(fit_decay_slope({{1, 0.5}, {2, 0.4}, {3, 0.3}, {4, 0.0}}), Error);
}

TEST_CASE("beta of c fit") {
  std::vector<std::pair<double, double>> synth;
  for (double c : {0.1, 0.3, 1.0, 3.0, 10.0}) synth.emplace_back(c, 3.0 * std::asinh(0.5 / c));
  const BetaOfCFit f = fit_beta_of_c(synth);
  CHECK(f.converged);
  CHECK(std::abs(f.a - 3.0) < 1e-8);
  CHECK(std::abs(f.b - 0.5) < 1e-8);
  CHECK_THROWS_AS(fit_beta_of_c({{1.0, 1.0}, {2.0, 0.5}}), Error);
  CHECK_THROWS_AS(fit_beta_of_c({{0.0, 1.0}, {1.0, 1.0}, {2.0, 0.5}}), Error);

  // Single-spin ED sweep through the harness.
  ExperimentConfig cfg = single_spin_sweep({0.25, 0.5, 1.0, 2.0, 4.0, 10.0});
  const RunSummary run_out = run(cfg, {.output = temp_path("betac.csv")});
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : run_out.records) pts.emplace_back(r.c, r.beta_star);
  const BetaOfCFit ed_fit = fit_beta_of_c(pts);
  CHECK(ed_fit.a == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(ed_fit.b == doctest::Approx(1.0).epsilon(1e-5));
  const double tail = ed_fit.a * std::asinh(ed_fit.b / 100.0);
  CHECK(tail == doctest::Approx(ed_fit.a * ed_fit.b / 100.0).epsilon(0.05));
}

TEST_CASE("thermometry map") {
  SUBCASE("exact TFD inputs") {
    std::vector<double> errors;
    for (int points : {10, 20, 40}) {
      std::vector<ThermometryPoint> pts;
      std::vector<double> exact;
      for (int i = 0; i < points; ++i) {
        const double c = 4.0 - 3.5 * i / (points - 1);
        const double b = toy_beta(c);
        const double p1 = 1.0 / (1.0 + std::exp(b));
        pts.push_back({c, p1, p1 * (1.0 - p1)});
        exact.push_back(b);
      }
      const auto beta = thermometry_map(pts, exact[0]);
      double err = 0.0;
      for (int i = 0; i < points; ++i) err = std::max(err, std::abs(beta[i] - exact[i]));
      errors.push_back(err);
    }
    // Second-order convergence under grid refinement.
    CHECK(errors[0] / errors[1] > 3.5);
    CHECK(errors[1] / errors[2] > 3.5);
    CHECK(errors[2] < 5e-3);
  }
  SUBCASE("constant energy") {
    const auto beta = thermometry_map({{3, 1, 0.2}, {2, 1, 0.3}, {1, 1, 0.1}}, 0.7);
    for (double b : beta) CHECK(b == doctest::Approx(0.7));
  }
  SUBCASE("invalid grids") {
    CHECK_THROWS_AS(thermometry_map({{1, 0, 1}, {2, 0, 1}}, 1.0), Error);
    CHECK_THROWS_AS(thermometry_map({{2, 0, 1}, {1, 0, 0}}, 1.0), Error);
    CHECK_THROWS_AS(thermometry_map({}, 1.0), Error);
  }
}

TEST_CASE("single-spin sweep and decoupled boundary") {
  const RunSummary s = run(single_spin_sweep({0.25, 1.0, 10.0}), {.output = temp_path("toy.csv")});
  CHECK(s.exit_code == 0);
  REQUIRE(s.records.size() == 3);
  for (const auto& r : s.records) {
    CHECK(r.beta_star == doctest::Approx(toy_beta(r.c)).epsilon(1e-6));
    CHECK(r.f_max == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.engine == "ed");
    CHECK(!r.boundary);
  }
  ExperimentConfig dec;
  dec.scenario = Scenario::BetaVsC;
  dec.n_list = {3};
  dec.c_list = {0.0};
  const RunSummary d = run(dec, {.output = temp_path("decoupled.csv")});
  REQUIRE(d.records.size() == 1);
  CHECK(d.records[0].boundary);
  CHECK(d.records[0].beta_star == 1000.0);
}

TEST_CASE("reproducible output and resume") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::FidelityVsC;
  cfg.n_list = {2, 3};
  cfg.c_list = {0.5, 1.0, 2.0};
  const std::string full = temp_path("full.csv");
  const std::string again = temp_path("again.csv");
  const std::string part = temp_path("part.csv");
  const RunSummary a = run(cfg, {.output = full});
  CHECK(a.records.size() == 6);
  CHECK(a.computed == 6);
  run(cfg, {.output = again});
  // The echoed output path is the only metadata difference.
  const auto strip_output = [](std::string s) {
    const auto p = s.find("experiment.output=");
    return s.erase(p, s.find('\n', p) - p);
  };
  CHECK(strip_output(without_wall_time(full)) == strip_output(without_wall_time(again)));

  cfg.output = part;
  const RunSummary first = run(cfg, {.max_new_records = 4});
  CHECK(first.records.size() == 4);
  const RunSummary second = run(cfg, {.resume = true});
  CHECK(second.skipped == 4);
  CHECK(second.computed == 2);
  CHECK(second.records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) CHECK(second.records[i].grid_index == i);

  CHECK(strip_output(without_wall_time(part)) == strip_output(without_wall_time(full)));

  const RunSummary noop = run(cfg, {.resume = true});
  CHECK(noop.computed == 0);
  CHECK(noop.records.size() == 6);

  ExperimentConfig other = cfg;
  other.seed = 99;
  CHECK_THROWS_AS(run(other, {.resume = true}), Error);
}

TEST_CASE("thread pool matches serial output") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::EdSmallModel;
  cfg.model = ModelFamily::SpinSyk;
  cfg.n_list = {4};
  cfg.c_list = {0.5, 2.0};
  cfg.realizations = 3;
  const RunSummary serial = run(cfg, {.threads = 1, .output = temp_path("serial.csv")});
  const RunSummary pooled = run(cfg, {.threads = 3, .output = temp_path("pooled.csv")});
  REQUIRE(serial.records.size() == 6);
  REQUIRE(pooled.records.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    ResultRecord a = serial.records[i], b = pooled.records[i];
    a.wall_time = b.wall_time = 0.0;
    CHECK(to_csv_row(a) == to_csv_row(b));
    CHECK(a.f_max <= 1.0 - a.w_off + 1e-9);
  }
  CHECK(serial.records[0].seed != serial.records[1].seed);
  CHECK(serial.records[0].f_max != serial.records[1].f_max);

  const auto groups = summarize(serial.records);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].count == 3);
  const double mean = (serial.records[0].f_max + serial.records[1].f_max + serial.records[2].f_max) / 3.0;
  CHECK(groups[0].f_max_mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(groups[0].f_max_std > 0.0);
}

TEST_CASE("engine errors are recorded per point") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::BetaVsC;
  cfg.model = ModelFamily::Mfi2d;
  cfg.nx = 2;
  cfg.ny = 2;
  cfg.engine = Engine::Mps;
  cfg.c_list = {1.0, 2.0};
  const RunSummary s = run(cfg, {.output = temp_path("errors.csv")});
  CHECK(s.exit_code == 3);
  CHECK(s.failed == 2);
  CHECK(s.records[0].status == "error");
  CHECK(s.records[0].engine == "mps");
  CHECK(s.records[0].message.find("Incompatible") != std::string::npos);
  const CsvContents back = read_csv(temp_path("errors.csv"));
  CHECK(back.records[1].status == "error");
}

TEST_CASE("ED and MPS engines agree on small chains") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::BetaVsC;
  cfg.delta = 1e-3;
  cfg.chi = 64;
  for (int n : {2, 4}) {
    GridPoint p;
    p.n = n;
    p.c = 0.8;
    cfg.engine = Engine::Ed;
    const ResultRecord ed_rec = evaluate_point(cfg, p);
    cfg.engine = Engine::Mps;
    const ResultRecord mps_rec = evaluate_point(cfg, p);
    REQUIRE(ed_rec.status == "ok");
    REQUIRE(mps_rec.status == "ok");
    CHECK(std::abs(ed_rec.f_max - mps_rec.f_max) <= 1e-6);
    CHECK(std::abs(ed_rec.beta_star - mps_rec.beta_star) <= 1e-4 * ed_rec.beta_star);
    CHECK(std::abs(ed_rec.energy - mps_rec.energy) <= 1e-8);
  }
}

TEST_CASE("random-matrix scenarios") {
  ExperimentConfig cfg;
  cfg.scenario = Scenario::RmtAnalytics;
  cfg.j_over_jc_list = {1.5, 2.0, 4.0};
  const RunSummary a = run(cfg, {.output = temp_path("rmt_a.csv")});
  REQUIRE(a.records.size() == 3);
  const rmt::GueAnalytics g = rmt::gue_analytics(2.0, 1.0, 0.0);
  CHECK(a.records[1].beta_star == g.beta_star);
  CHECK(a.records[1].gap == doctest::Approx(1.0));

  cfg.scenario = Scenario::RmtFiniteK;
  cfg.n_list = {3};
  cfg.j_over_jc_list = {2.0};
  cfg.k_list = {2, 16};
  cfg.realizations = 2;
  const RunSummary k = run(cfg, {.output = temp_path("rmt_k.csv")});
  REQUIRE(k.records.size() == 4);
  CHECK(k.records[0].seed == 1);
  CHECK(k.records[1].seed == 2);
  CHECK(k.records[2].seed == 1);
  for (const auto& r : k.records) {
    CHECK(r.status == "ok");
    CHECK(r.f_max <= 1.0 - r.w_off + 1e-9);
  }
}

TEST_SUITE("examples") {
  TEST_CASE("ED small model 2x4 stays above 0.9") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::EdSmallModel;
    cfg.model = ModelFamily::Mfi2d;
    cfg.engine = Engine::Ed;
    cfg.c_list = {0.25, 0.5, 1.0, 2.0, 4.0};
    const RunSummary s = run(cfg, {.output = temp_path("smallmodel.csv")});
    double best = 0.0;
    for (const auto& r : s.records) {
      REQUIRE(r.status == "ok");
      CHECK(r.n == 8);
      best = std::max(best, r.f_max);
    }
    CHECK(best > 0.9);
  }

  TEST_CASE("thermometry on an N=8 chain tracks the scanned beta") {
    ExperimentConfig cfg;
    cfg.scenario = Scenario::Thermometry;
    cfg.engine = Engine::Ed;
    cfg.n_list = {8};
    cfg.c_list.clear();
    for (int i = 0; i < 20; ++i) cfg.c_list.push_back(4.0 - 0.2 * i);
    const RunSummary s = run(cfg, {.output = temp_path("thermometry8.csv")});
    std::vector<ThermometryPoint> pts;
    for (const auto& r : s.records) {
      REQUIRE(r.status == "ok");
      pts.push_back({r.c, r.mean_energy_l, r.var_energy_l});
    }
    const auto beta = thermometry_map(pts, s.records.front().beta_star);
    double worst = 0.0;
    for (std::size_t i = 0; i < beta.size(); ++i) {
      const auto& r = s.records[i];
      if (r.f_max > 0.9) worst = std::max(worst, std::abs(beta[i] / r.beta_star - 1.0));
    }
    MESSAGE("max relative deviation " << worst);
    CHECK(worst <= 0.10);
  }
}

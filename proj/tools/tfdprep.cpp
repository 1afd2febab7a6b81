// tfdprep: run experiment configs and post-process their result files.
//
//   tfdprep run <config.ini> [--threads N] [--seed S] [--out results.csv]
//   tfdprep resume <config.ini> [...]
//   tfdprep fit slope <results.csv>
//   tfdprep fit betac <results.csv>
//   tfdprep thermometry <results.csv> [--out table.csv]
//
// Exit codes: 0 success, 1 fit or I/O failure, 2 usage or config error,
// 3 run finished but some grid points recorded status "error".

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfd/error.hpp"
#include "tfd/harness/config.hpp"
#include "tfd/harness/fit.hpp"
#include "tfd/harness/records.hpp"
#include "tfd/harness/runner.hpp"

using namespace tfd;
using namespace tfd::harness;
using nlohmann::ordered_json;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct RunArgs {
  std::string config;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t max_records = 0;
  bool quiet = false;
};

std::string summary_path(const std::string& out) {
  const auto dot = out.rfind('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + ".summary.csv";
  return out.substr(0, dot) + ".summary" + out.substr(dot);
}

void write_summary(const std::string& path, const std::vector<DisorderSummary>& groups) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "scenario,model,n,c,xi,t,j_over_jc,k,count,f_max_mean,f_max_std,beta_star_mean,beta_star_std,"
       "w_off_mean,w_off_std\n";
  const auto d = [](double x) { return format_double(x); };
  for (const auto& g : groups) {
    const ResultRecord& k = g.key;
    f << k.scenario << ',' << k.model << ',' << k.n << ',' << d(k.c) << ',' << d(k.xi) << ',' << d(k.t) << ','
      << d(k.j_over_jc) << ',' << k.k << ',' << g.count << ',' << d(g.f_max_mean) << ',' << d(g.f_max_std)
      << ',' << d(g.beta_star_mean) << ',' << d(g.beta_star_std) << ',' << d(g.w_off_mean) << ','
      << d(g.w_off_std) << '\n';
  }
}

int do_run(const RunArgs& a, bool resume) {
  ExperimentConfig cfg = load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.out.empty()) cfg.output = a.out;
  if (a.threads > 0) cfg.threads = a.threads;
  cfg.validate();

  RunOptions opts;
  opts.resume = resume;
  opts.max_new_records = a.max_records;
  if (!a.quiet) {
    opts.on_record = [](const ResultRecord& r) {
      std::cerr << "[" << r.grid_index << "] " << r.scenario << " n=" << r.n << " c=" << format_double(r.c)
                << " beta*=" << format_double(r.beta_star) << " f=" << format_double(r.f_max) << " "
                << r.status << (r.message.empty() ? "" : ": " + r.message) << "\n";
    };
  }
  const RunSummary s = run(cfg, opts);
  std::cerr << "records " << s.records.size() << " computed " << s.computed << " skipped " << s.skipped
            << " failed " << s.failed << " -> " << cfg.output << "\n";
  const bool disordered =
      std::any_of(s.records.begin(), s.records.end(), [](const ResultRecord& r) { return r.realization > 0; });
  if (disordered) {
    const std::string path = summary_path(cfg.output);
    write_summary(path, summarize(s.records));
    std::cerr << "summary -> " << path << "\n";
  }
  return s.exit_code;
}

std::vector<ResultRecord> ok_records(const std::string& path) {
  std::vector<ResultRecord> out;
  for (auto& r : read_csv(path).records) {
    if (r.status == "ok") out.push_back(std::move(r));
  }
  if (out.empty()) throw Error(ErrorCode::FitError, "no usable records in " + path);
  return out;
}

// Mean f_max per size for each (scenario, c, xi-label) group.
int do_fit_slope(const std::string& path) {
  using Key = std::tuple<double, std::string>;
  std::map<Key, std::map<int, std::pair<double, int>>> groups;
  for (const auto& r : ok_records(path)) {
    // Penalty strengths scale with N, so group by the ratio xi/N.
    const double ratio = std::isnan(r.xi) ? 0.0 : r.xi / r.n;
    auto& cell = groups[{r.c, format_double(ratio)}][r.n];
    cell.first += r.f_max;
    cell.second += 1;
  }
  ordered_json out = ordered_json::array();
  for (const auto& [key, by_n] : groups) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, acc] : by_n) pts.emplace_back(n, acc.first / acc.second);
    ordered_json g;
    g["c"] = std::get<0>(key);
    g["xi_over_n"] = std::get<1>(key);
    g["sizes"] = pts.size();
    try {
      const SlopeFit f = fit_decay_slope(pts);
      g["a"] = f.a;
      g["intercept"] = f.intercept;
      g["r_squared"] = f.r_squared;
    } catch (const Error& e) {
      g["error"] = e.what();
    }
    out.push_back(g);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_fit_betac(const std::string& path) {
  std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> groups;
  for (const auto& r : ok_records(path)) {
    if (r.c > 0.0 && !r.boundary) groups[{r.model, r.n}].emplace_back(r.c, r.beta_star);
  }
  ordered_json out = ordered_json::array();
  for (const auto& [key, pts] : groups) {
    ordered_json g;
    g["model"] = key.first;
    g["n"] = key.second;
    g["points"] = pts.size();
    try {
      const BetaOfCFit f = fit_beta_of_c(pts);
      g["A"] = f.a;
      g["B"] = f.b;
      g["residual"] = f.residual;
      g["converged"] = f.converged;
    } catch (const Error& e) {
      g["error"] = e.what();
    }
    out.push_back(g);
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int do_thermometry(const std::string& path, const std::string& out_path) {
  std::map<std::pair<std::string, int>, std::vector<ResultRecord>> groups;
  for (auto& r : ok_records(path)) groups[{r.model, r.n}].push_back(r);

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
  }
  std::ostream& os = out_path.empty() ? std::cout : file;
  os << "model,n,c,mean_energy_l,var_energy_l,f_max,beta_star,beta_hat\n";
  for (auto& [key, recs] : groups) {
    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.c > b.c; });
    std::vector<ThermometryPoint> pts;
    for (const auto& r : recs) pts.push_back({r.c, r.mean_energy_l, r.var_energy_l});
    const std::vector<double> beta = thermometry_map(pts, recs.front().beta_star);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& r = recs[i];
      os << key.first << ',' << key.second << ',' << format_double(r.c) << ',' << format_double(r.mean_energy_l)
         << ',' << format_double(r.var_energy_l) << ',' << format_double(r.f_max) << ','
         << format_double(r.beta_star) << ',' << format_double(beta[i]) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermofield-double preparation experiments"};
  app.set_version_flag("--version", toolkit_version());
  app.require_subcommand(1);

  RunArgs run_args;
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("config", run_args.config, "INI experiment configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--threads", run_args.threads, "worker threads (overrides config)")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", run_args.seed, "base seed (overrides config)");
    cmd->add_option("--out", run_args.out, "results CSV (overrides config)");
    cmd->add_option("--max-records", run_args.max_records, "stop after this many new records");
    cmd->add_flag("-q,--quiet", run_args.quiet, "no per-record progress");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "run a sweep from scratch");
  add_run_flags(run_cmd);
  CLI::App* resume_cmd = app.add_subcommand("resume", "continue an interrupted sweep");
  add_run_flags(resume_cmd);

  std::string csv_path;
  std::string out_path;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit results");
  fit_cmd->require_subcommand(1);
  CLI::App* slope_cmd = fit_cmd->add_subcommand("slope", "fidelity decay slope -log f = a N + b");
  slope_cmd->add_option("results", csv_path)->required()->check(CLI::ExistingFile);
  CLI::App* betac_cmd = fit_cmd->add_subcommand("betac", "beta* = A asinh(B / c)");
  betac_cmd->add_option("results", csv_path)->required()->check(CLI::ExistingFile);
  CLI::App* thermo_cmd = app.add_subcommand("thermometry", "integrate beta-hat from one-sided energy moments");
  thermo_cmd->add_option("results", csv_path)->required()->check(CLI::ExistingFile);
  thermo_cmd->add_option("--out", out_path, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return do_run(run_args, false);
    if (*resume_cmd) return do_run(run_args, true);
    if (*slope_cmd) return do_fit_slope(csv_path);
    if (*betac_cmd) return do_fit_betac(csv_path);
    if (*thermo_cmd) return do_thermometry(csv_path, out_path);
  } catch (const Error& e) {
    std::cerr << "tfdprep: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "tfdprep: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}

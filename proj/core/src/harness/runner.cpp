#include "tfd/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <boost/accumulators/accumulators.hpp>
#include <boost/accumulators/statistics/mean.hpp>
#include <boost/accumulators/statistics/stats.hpp>
#include <boost/accumulators/statistics/variance.hpp>

#include "tfd/dmrg.hpp"
#include "tfd/ed.hpp"
#include "tfd/error.hpp"
#include "tfd/harness/version.hpp"
#include "tfd/models.hpp"
#include "tfd/mpo.hpp"
#include "tfd/rmt.hpp"
#include "tfd/tebd.hpp"

namespace tfd::harness {

namespace {

struct Dims {
  bool n = true, c = true, xi = true, t = false, j = false, k = false, disorder = false;
};

Dims dims_of(const ExperimentConfig& cfg) {
  Dims d;
  switch (cfg.scenario) {
    case Scenario::Adiabatic:
      d.xi = false;
      d.t = true;
      break;
    case Scenario::RmtAnalytics:
      d = Dims{false, false, false, false, true, false, false};
      break;
    case Scenario::RmtFiniteK:
      d = Dims{true, false, false, false, true, true, true};
      break;
    default:
      d.disorder = cfg.model == ModelFamily::SpinSyk;
      break;
  }
  if (cfg.model == ModelFamily::Mfi2d || cfg.model == ModelFamily::SingleSpin) {
    if (cfg.scenario != Scenario::RmtAnalytics && cfg.scenario != Scenario::RmtFiniteK) d.n = false;
  }
  return d;
}

int fixed_n(const ExperimentConfig& cfg) {
  switch (cfg.model) {
    case ModelFamily::Mfi2d:
      return cfg.nx * cfg.ny;
    case ModelFamily::SingleSpin:
      return 1;
    default:
      return cfg.n_list.front();
  }
}

mps::MfiParams mfi_params(const ExperimentConfig& cfg) { return {cfg.jz, cfg.hx, cfg.hz}; }

struct Model {
  models::PauliSum h0;
  models::DoubledSystem sys;
};

Model build_model(const ExperimentConfig& cfg, const GridPoint& p) {
  const double xi = p.xi.resolve(p.n);
  switch (cfg.model) {
    case ModelFamily::Mfi1d: {
      auto h0 = models::build_mfi_1d(p.n, cfg.jz, cfg.hx, cfg.hz);
      auto sys = models::build_parent(h0, models::mfi_couplings(p.n), p.c, xi);
      return {std::move(h0), std::move(sys)};
    }
    case ModelFamily::Mfi2d: {
      auto h0 = models::build_mfi_2d(cfg.nx, cfg.ny, cfg.jz, cfg.hx, cfg.hz);
      auto sys = models::build_parent(h0, models::mfi_couplings(p.n), p.c, xi);
      return {std::move(h0), std::move(sys)};
    }
    case ModelFamily::SpinSyk: {
      models::DisorderSpec spec;
      spec.n = p.n;
      spec.q = cfg.q;
      spec.j_scale = cfg.j_scale;
      spec.seed = cfg.seed;
      spec.realization_index = p.realization;
      auto h0 = models::sample_spin_syk(spec);
      auto sys = models::build_parent(h0, models::syk_couplings(p.n), p.c, xi);
      return {std::move(h0), std::move(sys)};
    }
    case ModelFamily::SingleSpin: {
      auto h0 = models::single_spin_h0();
      // The toy model is the parent at c/2 (coupling -c (XX + ZZ)).
      auto sys = xi == 0.0 ? models::single_spin_toy(p.c)
                           : models::build_parent(h0, models::mfi_couplings(1), 0.5 * p.c, xi);
      return {std::move(h0), std::move(sys)};
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown model");
}

bool use_ed(const ExperimentConfig& cfg, int n) {
  if (cfg.engine == Engine::Ed) return true;
  if (cfg.engine == Engine::Mps) return false;
  return 2 * n <= ed::kSparseMaxSites;
}

mps::DmrgOptions dmrg_options(const ExperimentConfig& cfg) {
  mps::DmrgOptions o;
  o.max_bond = cfg.chi;
  o.cutoff = cfg.cutoff;
  o.max_sweeps = cfg.max_sweeps;
  o.energy_tol = 1e-9;
  // Residual relative to |H|; the penalty makes |H| large, so 1e-8 is already tight.
  o.local_tol = 1e-8;
  o.bond_schedule = {std::min<Index>(16, cfg.chi), std::min<Index>(32, cfg.chi), cfg.chi};
  return o;
}

mps::MpsScanOptions scan_options(const ExperimentConfig& cfg) {
  mps::MpsScanOptions o;
  o.delta = cfg.delta;
  o.beta_max = cfg.beta_max;
  o.trunc = {cfg.chi, cfg.cutoff};
  return o;
}

bool wants_moments(Scenario s) { return s == Scenario::FidelityVsC || s == Scenario::Thermometry; }

void evaluate_ed(const ExperimentConfig& cfg, const Model& m, ResultRecord& r) {
  r.engine = "ed";
  const ed::GroundState gs = ed::ground_state(m.sys);
  const Matrix h0 = ed::dense_matrix(m.h0);
  const num::EigenSystem eig = num::hermitian_eig(h0);
  const ed::FidelityCurve curve = ed::fidelity_scan(gs.psi, eig, cfg.resolved_beta_grid());
  r.energy = gs.energy;
  r.beta_star = curve.beta_star;
  r.f_max = curve.f_max;
  r.boundary = curve.at_boundary;
  r.w_off = ed::offdiag_weight(gs.psi, eig);
  r.discarded_weight = 0.0;
  if (wants_moments(cfg.scenario)) {
    const ed::OneSidedMoments mom = ed::one_sided_moments(gs.psi, h0);
    r.mean_energy_l = mom.mean;
    r.var_energy_l = mom.variance;
  }
  if (cfg.scenario == Scenario::GapVsC) r.gap = ed::gap(m.sys).delta;
}

struct MpsGround {
  mps::DmrgResult dmrg;
  mps::MpsFidelityCurve curve;
};

void require_mps_model(const ExperimentConfig& cfg, ResultRecord& r) {
  r.engine = "mps";
  if (cfg.model != ModelFamily::Mfi1d) {
    throw Error(ErrorCode::Incompatible, "the MPS engine supports the 1D mixed-field Ising model only");
  }
}

MpsGround mps_ground(const ExperimentConfig& cfg, int n, const mps::TensorTrainOperator& h) {
  MpsGround g{mps::dmrg(h, mps::mps_bell(n), dmrg_options(cfg)), {}};
  g.curve = mps::mps_fidelity_scan(g.dmrg.state, mfi_params(cfg), n, scan_options(cfg));
  return g;
}

void fill_from_mps(const MpsGround& g, ResultRecord& r) {
  r.engine = "mps";
  r.energy = g.dmrg.energy;
  r.beta_star = g.curve.beta_star;
  r.f_max = g.curve.f_max;
  r.boundary = g.curve.at_boundary;
  r.max_bond = std::max<long long>(g.dmrg.state.max_bond(), g.curve.max_bond);
  double disc = g.curve.discarded_weight;
  for (const auto& s : g.dmrg.log) disc = std::max(disc, s.discarded_weight);
  r.discarded_weight = disc;
}

void evaluate_mps(const ExperimentConfig& cfg, const Model& m, int n, ResultRecord& r) {
  require_mps_model(cfg, r);
  const mps::TensorTrainOperator h = mps::compile_mpo(m.sys);
  const MpsGround g = mps_ground(cfg, n, h);
  fill_from_mps(g, r);
  if (wants_moments(cfg.scenario)) {
    const auto hl = mps::compile_mpo(m.sys.left_merged());
    const double mean = mps::expectation(hl, g.dmrg.state);
    const double sq = mps::expectation(mps::product(hl, hl), g.dmrg.state);
    r.mean_energy_l = mean;
    r.var_energy_l = sq - mean * mean;
  }
  if (cfg.scenario == Scenario::GapVsC) {
    mps::DmrgOptions o = dmrg_options(cfg);
    o.penalty_weight = mps::excited_penalty_weight(g.dmrg.energy, m.sys.total().coefficient_l1());
    const auto e1 = mps::dmrg(h, mps::random_state(2 * n, 8, cfg.seed + 17, true), o, {g.dmrg.state});
    r.gap = e1.energy - g.dmrg.energy;
  }
}

void evaluate_adiabatic(const ExperimentConfig& cfg, const Model& m, const GridPoint& p, ResultRecord& r) {
  require_mps_model(cfg, r);
  const mps::TensorTrainOperator h = mps::compile_mpo(m.sys);
  const MpsGround g = mps_ground(cfg, p.n, h);
  fill_from_mps(g, r);
  const mps::Truncation trunc{cfg.chi, cfg.cutoff};
  const int steps = std::max(1, static_cast<int>(std::lround(g.curve.beta_star / cfg.delta)));
  const mps::TensorTrainState tfd =
      mps::itebd_tfd(mfi_params(cfg), p.n, g.curve.beta_star, g.curve.beta_star / steps, trunc);
  mps::AdiabaticObservers obs;
  obs.ground_state = &g.dmrg.state;
  obs.tfd = &tfd;
  obs.hamiltonian = &h;
  obs.every_layer = false;
  const auto traj = mps::tebd_adiabatic(mfi_params(cfg), p.n, p.c, mps::TrotterSchedule(p.t, cfg.dt), trunc, obs);
  const mps::AdiabaticPoint& end = traj.back();
  r.f_adiab = end.f_adiab;
  r.f_exp = end.f_exp;
  r.max_bond = std::max<long long>(r.max_bond, end.max_bond);
  r.discarded_weight = std::max(r.discarded_weight, end.discarded_weight);
}

void evaluate(const ExperimentConfig& cfg, const GridPoint& p, ResultRecord& r) {
  switch (cfg.scenario) {
    case Scenario::RmtAnalytics: {
      const rmt::GueAnalytics g = rmt::gue_analytics(p.j_over_jc, cfg.sigma, 0.0);
      r.beta_star = g.beta_star;
      r.f_max = g.f_max;
      r.gap = g.gap0;
      // JN = 2 sigma (J / J_c)
      r.energy = 2.0 * g.lambda_star + 2.0 * cfg.sigma * p.j_over_jc;
      r.engine = "closed_form";
      return;
    }
    case Scenario::RmtFiniteK: {
      rmt::RmtConfig rc;
      rc.n = p.n;
      rc.l = Index{1} << p.n;
      rc.sigma = cfg.sigma;
      rc.j = p.j_over_jc * rmt::critical_coupling(cfg.sigma, p.n);
      rc.k = p.k;
      rc.seed = p.seed;
      const rmt::FiniteKResult f = rmt::finite_k_experiment(rc, nullptr, cfg.beta_grid);
      r.w_off = f.w_off;
      r.f_max = f.f_max;
      r.beta_star = f.beta_star;
      r.energy = f.gs_energy;
      r.boundary = f.at_boundary;
      r.engine = "ed";
      return;
    }
    default:
      break;
  }
  const Model m = build_model(cfg, p);
  if (cfg.scenario == Scenario::Adiabatic) {
    evaluate_adiabatic(cfg, m, p, r);
  } else if (use_ed(cfg, p.n)) {
    evaluate_ed(cfg, m, r);
  } else {
    evaluate_mps(cfg, m, p.n, r);
  }
}

template <class T>
std::vector<T> or_placeholder(bool used, const std::vector<T>& xs, T placeholder) {
  return used ? xs : std::vector<T>{placeholder};
}

}  // namespace

std::string toolkit_version() { return kVersion; }

std::vector<GridPoint> enumerate_grid(const ExperimentConfig& cfg) {
  const Dims d = dims_of(cfg);
  const auto ns = d.n ? cfg.n_list : std::vector<int>{cfg.scenario == Scenario::RmtAnalytics ? 0 : fixed_n(cfg)};
  const auto cs = or_placeholder(d.c, cfg.c_list, kNaN);
  const auto xis = or_placeholder(d.xi, cfg.xi_list, XiValue{});
  const auto ts = or_placeholder(d.t, cfg.t_list, kNaN);
  const auto js = or_placeholder(d.j, cfg.j_over_jc_list, kNaN);
  const auto ks = or_placeholder(d.k, cfg.k_list, 0);
  const int reps = d.disorder ? cfg.realizations : 1;
  std::vector<GridPoint> out;
  for (int n : ns) {
    for (double c : cs) {
      for (const XiValue& xi : xis) {
        for (double t : ts) {
          for (double j : js) {
            for (int k : ks) {
              for (int rep = 0; rep < reps; ++rep) {
                GridPoint p;
                p.index = out.size();
                p.n = n;
                p.c = c;
                p.xi = xi;
                p.t = t;
                p.j_over_jc = j;
                p.k = k;
                p.realization = rep;
                p.seed = cfg.seed + static_cast<std::uint64_t>(rep);
                out.push_back(p);
              }
            }
          }
        }
      }
    }
  }
  return out;
}

ResultRecord evaluate_point(const ExperimentConfig& cfg, const GridPoint& p) {
  const auto t0 = std::chrono::steady_clock::now();
  ResultRecord r;
  r.grid_index = p.index;
  r.scenario = std::string(to_string(cfg.scenario));
  r.model = std::string(to_string(cfg.model));
  r.n = p.n;
  r.c = p.c;
  const Dims d = dims_of(cfg);
  r.xi = d.xi ? p.xi.resolve(p.n) : kNaN;
  r.t = p.t;
  r.j_over_jc = p.j_over_jc;
  r.k = p.k;
  r.realization = p.realization;
  r.seed = p.seed;
  r.version = toolkit_version();
  r.config_hash = cfg.hash_hex();
  try {
    evaluate(cfg, p, r);
  } catch (const std::exception& e) {
    r.status = "error";
    r.message = e.what();
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

RunSummary run(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  if (opts.threads > 0) cfg.threads = opts.threads;
  if (!opts.output.empty()) cfg.output = opts.output;
  cfg.validate();

  const std::vector<GridPoint> points = enumerate_grid(cfg);
  std::vector<std::pair<std::string, std::string>> meta = {{"toolkit", toolkit_version()},
                                                           {"config_hash", cfg.hash_hex()}};
  for (const auto& kv : cfg.echo()) meta.push_back(kv);

  RunSummary summary;
  std::set<std::size_t> done;
  const bool append = opts.resume && std::filesystem::exists(cfg.output);
  if (append) {
    CsvContents existing = read_csv(cfg.output);
    if (existing.meta("config_hash") != cfg.hash_hex()) {
      throw Error(ErrorCode::ConfigError, "resume: " + cfg.output + " was produced by a different configuration");
    }
    for (auto& r : existing.records) {
      if (r.grid_index >= points.size() || !done.insert(r.grid_index).second) {
        throw Error(ErrorCode::ConfigError, "resume: unexpected grid index in " + cfg.output);
      }
      summary.records.push_back(std::move(r));
    }
  }
  summary.skipped = done.size();

  std::vector<GridPoint> todo;
  for (const auto& p : points) {
    if (!done.count(p.index)) todo.push_back(p);
  }
  std::size_t limit = todo.size();
  if (opts.max_new_records > 0) limit = std::min(limit, opts.max_new_records);

  CsvWriter writer(cfg.output, meta, append);

  std::mutex mu;
  std::condition_variable cv;
  std::map<std::size_t, ResultRecord> ready;  // keyed by position in todo
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= limit) return;
      ResultRecord r = evaluate_point(cfg, todo[i]);
      {
        std::lock_guard<std::mutex> lock(mu);
        ready.emplace(i, std::move(r));
      }
      cv.notify_all();
    }
  };

  const int n_threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(limit, 1))));
  std::vector<std::jthread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);

  for (std::size_t w = 0; w < limit; ++w) {
    ResultRecord r;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return ready.count(w) > 0; });
      r = std::move(ready.at(w));
      ready.erase(w);
    }
    writer.write(r);
    ++summary.computed;
    if (opts.on_record) opts.on_record(r);
    summary.records.push_back(std::move(r));
  }
  stop = true;
  pool.clear();

  std::sort(summary.records.begin(), summary.records.end(),
            [](const ResultRecord& a, const ResultRecord& b) { return a.grid_index < b.grid_index; });
  for (const auto& r : summary.records) {
    if (r.status != "ok") ++summary.failed;
  }
  summary.exit_code = summary.failed > 0 ? 3 : 0;
  return summary;
}

std::vector<DisorderSummary> summarize(const std::vector<ResultRecord>& records) {
  namespace acc = boost::accumulators;
  using Acc = acc::accumulator_set<double, acc::stats<acc::tag::mean, acc::tag::variance>>;
  struct Group {
    ResultRecord key;
    Acc f, b, w;
    int count = 0;
  };
  using Key = std::tuple<std::string, std::string, std::string, int, std::string, std::string, std::string,
                         std::string, int>;
  std::map<Key, Group> groups;
  std::vector<Key> order;
  for (const auto& r : records) {
    if (r.status != "ok") continue;
    const Key key{r.scenario, r.model, r.engine, r.n, format_double(r.c), format_double(r.xi),
                  format_double(r.t), format_double(r.j_over_jc), r.k};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.key = r;
      order.push_back(key);
    }
    it->second.f(r.f_max);
    it->second.b(r.beta_star);
    it->second.w(r.w_off);
    ++it->second.count;
  }
  auto sample_std = [](const Acc& a, int count) {
    if (count < 2) return 0.0;
    return std::sqrt(acc::variance(a) * count / (count - 1.0));
  };
  std::vector<DisorderSummary> out;
  for (const Key& key : order) {
    const Group& g = groups.at(key);
    DisorderSummary s;
    s.key = g.key;
    s.count = g.count;
    s.f_max_mean = acc::mean(g.f);
    s.f_max_std = sample_std(g.f, g.count);
    s.beta_star_mean = acc::mean(g.b);
    s.beta_star_std = sample_std(g.b, g.count);
    s.w_off_mean = acc::mean(g.w);
    s.w_off_std = sample_std(g.w, g.count);
    out.push_back(s);
  }
  return out;
}

}  // namespace tfd::harness

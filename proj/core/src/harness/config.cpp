#include "tfd/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tfd/ed.hpp"
#include "tfd/error.hpp"

namespace tfd::harness {

namespace {

constexpr std::pair<Scenario, std::string_view> kScenarios[] = {
    {Scenario::BetaVsC, "beta_vs_c"},
    {Scenario::FidelityVsC, "fidelity_vs_c"},
    {Scenario::EdSmallModel, "ed_smallmodel"},
    {Scenario::Adiabatic, "adiabatic"},
    {Scenario::GapVsC, "gap_vs_c"},
    {Scenario::DecaySlope, "decay_slope"},
    {Scenario::PenaltySweep, "penalty_sweep"},
    {Scenario::RmtAnalytics, "rmt_analytics"},
    {Scenario::RmtFiniteK, "rmt_finite_k"},
    {Scenario::Thermometry, "thermometry"},
};

constexpr std::pair<ModelFamily, std::string_view> kModels[] = {
    {ModelFamily::Mfi1d, "mfi_1d"},
    {ModelFamily::Mfi2d, "mfi_2d"},
    {ModelFamily::SpinSyk, "spin_syk"},
    {ModelFamily::SingleSpin, "single_spin"},
};

constexpr std::pair<Engine, std::string_view> kEngines[] = {
    {Engine::Auto, "auto"},
    {Engine::Ed, "ed"},
    {Engine::Mps, "mps"},
};

template <class E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <class E, std::size_t N>
E value_of(const std::pair<E, std::string_view> (&table)[N], std::string_view name, const char* what) {
  for (const auto& [v, n] : table) {
    if (n == name) return v;
  }
  throw Error(ErrorCode::ConfigError, std::string("unknown ") + what + " '" + std::string(name) + "'");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_double(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::ConfigError, key + ": not a number '" + t + "'");
  }
  return v;
}

long long to_int(const std::string& key, std::string_view text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorCode::ConfigError, key + ": not an integer '" + t + "'");
  }
  return v;
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(xs[i]);
    } else if constexpr (std::is_same_v<T, XiValue>) {
      out += xs[i].str();
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

std::vector<double> parse_beta_grid(const std::string& key, const std::string& text) {
  const auto tokens = split_list(text);
  if (!tokens.empty() && tokens[0] == "log") {
    if (tokens.size() != 4) throw Error(ErrorCode::ConfigError, key + ": expected 'log lo hi points'");
    try {
      return ed::log_grid(to_double(key, tokens[1]), to_double(key, tokens[2]),
                          static_cast<int>(to_int(key, tokens[3])));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      throw Error(ErrorCode::ConfigError, key + ": " + e.what());
    }
  }
  std::vector<double> out;
  for (const auto& t : tokens) out.push_back(to_double(key, t));
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string_view to_string(Scenario s) { return name_of(kScenarios, s); }
std::string_view to_string(ModelFamily m) { return name_of(kModels, m); }
std::string_view to_string(Engine e) { return name_of(kEngines, e); }
Scenario parse_scenario(std::string_view s) { return value_of(kScenarios, s, "scenario"); }

double XiValue::resolve(int n) const { return scale * std::pow(static_cast<double>(n), power); }

std::string XiValue::str() const {
  if (power == 0) return format_double(scale);
  std::string out = scale == 1.0 ? "" : format_double(scale);
  out += "N";
  if (power != 1) out += "^" + std::to_string(power);
  return out;
}

XiValue XiValue::parse(std::string_view token) {
  const std::string t = trim(token);
  const auto pos = t.find('N');
  XiValue xi;
  if (pos == std::string::npos) {
    xi.scale = to_double("xi", t);
    return xi;
  }
  const std::string head = t.substr(0, pos);
  const std::string tail = t.substr(pos + 1);
  xi.scale = head.empty() ? 1.0 : to_double("xi", head.back() == '*' ? head.substr(0, head.size() - 1) : head);
  if (tail.empty()) {
    xi.power = 1;
  } else if (tail[0] == '^') {
    xi.power = static_cast<int>(to_int("xi", tail.substr(1)));
  } else {
    throw Error(ErrorCode::ConfigError, "xi: cannot parse '" + t + "'");
  }
  return xi;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); };
  if (n_list.empty() || c_list.empty() || xi_list.empty() || t_list.empty() || j_over_jc_list.empty() ||
      k_list.empty()) {
    fail("grids must be non-empty");
  }
  for (int n : n_list) {
    if (n < 1 || n > 200) fail("n out of range");
  }
  for (double c : c_list) {
    if (!(c >= 0.0) || !std::isfinite(c)) fail("c must be non-negative");
  }
  for (const XiValue& xi : xi_list) {
    if (!(xi.scale >= 0.0) || xi.power < 0) fail("xi must be non-negative");
  }
  for (double t : t_list) {
    if (!(t > 0.0)) fail("t must be positive");
  }
  for (double x : j_over_jc_list) {
    if (!(x > 0.0)) fail("j_over_jc must be positive");
  }
  for (int k : k_list) {
    if (k < 1) fail("k must be positive");
  }
  for (double b : beta_grid) {
    if (!(b > 0.0) || !std::isfinite(b)) fail("beta grid must be positive");
  }
  if (!std::is_sorted(beta_grid.begin(), beta_grid.end())) fail("beta grid must ascend");
  if (nx < 1 || ny < 1 || q < 2 || q % 2 != 0) fail("bad lattice or q");
  if (!(sigma > 0.0) || !(j_scale > 0.0)) fail("sigma and j_scale must be positive");
  if (chi < 1 || !(cutoff >= 0.0) || !(delta > 0.0) || !(dt > 0.0) || !(beta_max > 0.0)) {
    fail("bad numerics");
  }
  if (max_sweeps < 1 || realizations < 1 || threads < 1) fail("counts must be positive");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"experiment.scenario", std::string(to_string(scenario))},
      {"experiment.seed", std::to_string(seed)},
      {"experiment.realizations", std::to_string(realizations)},
      {"experiment.output", output},
      {"experiment.threads", std::to_string(threads)},
      {"model.family", std::string(to_string(model))},
      {"model.jz", format_double(jz)},
      {"model.hx", format_double(hx)},
      {"model.hz", format_double(hz)},
      {"model.nx", std::to_string(nx)},
      {"model.ny", std::to_string(ny)},
      {"model.q", std::to_string(q)},
      {"model.j_scale", format_double(j_scale)},
      {"model.sigma", format_double(sigma)},
      {"grid.n", join(n_list)},
      {"grid.c", join(c_list)},
      {"grid.xi", join(xi_list)},
      {"grid.beta", join(resolved_beta_grid())},
      {"grid.t", join(t_list)},
      {"grid.j_over_jc", join(j_over_jc_list)},
      {"grid.k", join(k_list)},
      {"numerics.engine", std::string(to_string(engine))},
      {"numerics.chi", std::to_string(chi)},
      {"numerics.cutoff", format_double(cutoff)},
      {"numerics.delta", format_double(delta)},
      {"numerics.dt", format_double(dt)},
      {"numerics.beta_max", format_double(beta_max)},
      {"numerics.max_sweeps", std::to_string(max_sweeps)},
  };
  std::sort(kv.begin(), kv.end());
  return kv;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : echo()) {
    if (k == "experiment.output" || k == "experiment.threads") continue;
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string ExperimentConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::vector<double> ExperimentConfig::resolved_beta_grid() const {
  return beta_grid.empty() ? ed::default_beta_grid() : beta_grid;
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  ExperimentConfig cfg;
  bool have_scenario = false;
  static const std::set<std::string> kSections = {"experiment", "model", "grid", "numerics"};
  for (const auto& [section, body] : tree) {
    if (!kSections.count(section)) throw Error(ErrorCode::ConfigError, "unknown section [" + section + "]");
    for (const auto& [name, node] : body) {
      const std::string key = section + "." + name;
      const std::string v = trim(node.data());
      if (key == "experiment.scenario") {
        cfg.scenario = parse_scenario(v);
        have_scenario = true;
      } else if (key == "experiment.seed") {
        cfg.seed = static_cast<std::uint64_t>(to_int(key, v));
      } else if (key == "experiment.realizations") {
        cfg.realizations = static_cast<int>(to_int(key, v));
      } else if (key == "experiment.output") {
        cfg.output = v;
      } else if (key == "experiment.threads") {
        cfg.threads = static_cast<int>(to_int(key, v));
      } else if (key == "model.family") {
        cfg.model = value_of(kModels, v, "model family");
      } else if (key == "model.jz") {
        cfg.jz = to_double(key, v);
      } else if (key == "model.hx") {
        cfg.hx = to_double(key, v);
      } else if (key == "model.hz") {
        cfg.hz = to_double(key, v);
      } else if (key == "model.nx") {
        cfg.nx = static_cast<int>(to_int(key, v));
      } else if (key == "model.ny") {
        cfg.ny = static_cast<int>(to_int(key, v));
      } else if (key == "model.q") {
        cfg.q = static_cast<int>(to_int(key, v));
      } else if (key == "model.j_scale") {
        cfg.j_scale = to_double(key, v);
      } else if (key == "model.sigma") {
        cfg.sigma = to_double(key, v);
      } else if (key == "grid.n") {
        cfg.n_list.clear();
        for (const auto& t : split_list(v)) cfg.n_list.push_back(static_cast<int>(to_int(key, t)));
      } else if (key == "grid.c") {
        cfg.c_list.clear();
        for (const auto& t : split_list(v)) cfg.c_list.push_back(to_double(key, t));
      } else if (key == "grid.xi") {
        cfg.xi_list.clear();
        for (const auto& t : split_list(v)) cfg.xi_list.push_back(XiValue::parse(t));
      } else if (key == "grid.beta") {
        cfg.beta_grid = parse_beta_grid(key, v);
      } else if (key == "grid.t") {
        cfg.t_list.clear();
        for (const auto& t : split_list(v)) cfg.t_list.push_back(to_double(key, t));
      } else if (key == "grid.j_over_jc") {
        cfg.j_over_jc_list.clear();
        for (const auto& t : split_list(v)) cfg.j_over_jc_list.push_back(to_double(key, t));
      } else if (key == "grid.k") {
        cfg.k_list.clear();
        for (const auto& t : split_list(v)) cfg.k_list.push_back(static_cast<int>(to_int(key, t)));
      } else if (key == "numerics.engine") {
        cfg.engine = value_of(kEngines, v, "engine");
      } else if (key == "numerics.chi") {
        cfg.chi = static_cast<Index>(to_int(key, v));
      } else if (key == "numerics.cutoff") {
        cfg.cutoff = to_double(key, v);
      } else if (key == "numerics.delta") {
        cfg.delta = to_double(key, v);
      } else if (key == "numerics.dt") {
        cfg.dt = to_double(key, v);
      } else if (key == "numerics.beta_max") {
        cfg.beta_max = to_double(key, v);
      } else if (key == "numerics.max_sweeps") {
        cfg.max_sweeps = static_cast<int>(to_int(key, v));
      } else {
        throw Error(ErrorCode::ConfigError, "unknown key " + key);
      }
    }
  }
  if (!have_scenario) throw Error(ErrorCode::ConfigError, "experiment.scenario is required");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  return parse_config(in);
}

}  // namespace tfd::harness

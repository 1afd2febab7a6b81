#include "tfd/harness/records.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>

#include "tfd/error.hpp"
#include "tfd/harness/config.hpp"

namespace tfd::harness {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += (ch == '\n' || ch == '\r') ? ' ' : ch;
  }
  return out + "\"";
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (in_quotes) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        in_quotes = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (in_quotes) throw Error(ErrorCode::ParseError, "unterminated quote");
  out.push_back(cur);
  return out;
}

double parse_d(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
  return v;
}

template <class T>
T parse_i(const std::string& s) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad integer '" + s + "'");
  return v;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "grid_index", "scenario",      "model",         "engine",         "n",
      "c",          "xi",            "t",             "j_over_jc",      "k",
      "realization", "seed",         "beta_star",     "f_max",          "gap",
      "w_off",      "energy",        "mean_energy_l", "var_energy_l",   "f_adiab",
      "f_exp",      "max_bond",      "discarded_weight", "boundary",    "status",
      "message",    "wall_time",     "version",       "config_hash"};
  return cols;
}

std::string to_csv_row(const ResultRecord& r) {
  const std::vector<std::string> f = {
      std::to_string(r.grid_index), quote(r.scenario), quote(r.model), quote(r.engine),
      std::to_string(r.n), format_double(r.c), format_double(r.xi), format_double(r.t),
      format_double(r.j_over_jc), std::to_string(r.k), std::to_string(r.realization), std::to_string(r.seed),
      format_double(r.beta_star), format_double(r.f_max), format_double(r.gap), format_double(r.w_off),
      format_double(r.energy), format_double(r.mean_energy_l), format_double(r.var_energy_l),
      format_double(r.f_adiab), format_double(r.f_exp), std::to_string(r.max_bond),
      format_double(r.discarded_weight), r.boundary ? "1" : "0", quote(r.status), quote(r.message),
      format_double(r.wall_time), quote(r.version), quote(r.config_hash)};
  std::string line;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) line += ',';
    line += f[i];
  }
  return line;
}

ResultRecord parse_csv_row(const std::string& line) {
  const auto f = split_row(line);
  if (f.size() != csv_columns().size()) {
    throw Error(ErrorCode::ParseError, "expected " + std::to_string(csv_columns().size()) + " fields, got " +
                                           std::to_string(f.size()));
  }
  ResultRecord r;
  std::size_t i = 0;
  r.grid_index = parse_i<std::size_t>(f[i++]);
  r.scenario = f[i++];
  r.model = f[i++];
  r.engine = f[i++];
  r.n = parse_i<int>(f[i++]);
  r.c = parse_d(f[i++]);
  r.xi = parse_d(f[i++]);
  r.t = parse_d(f[i++]);
  r.j_over_jc = parse_d(f[i++]);
  r.k = parse_i<int>(f[i++]);
  r.realization = parse_i<int>(f[i++]);
  r.seed = parse_i<std::uint64_t>(f[i++]);
  r.beta_star = parse_d(f[i++]);
  r.f_max = parse_d(f[i++]);
  r.gap = parse_d(f[i++]);
  r.w_off = parse_d(f[i++]);
  r.energy = parse_d(f[i++]);
  r.mean_energy_l = parse_d(f[i++]);
  r.var_energy_l = parse_d(f[i++]);
  r.f_adiab = parse_d(f[i++]);
  r.f_exp = parse_d(f[i++]);
  r.max_bond = parse_i<long long>(f[i++]);
  r.discarded_weight = parse_d(f[i++]);
  r.boundary = f[i++] == "1";
  r.status = f[i++];
  r.message = f[i++];
  r.wall_time = parse_d(f[i++]);
  r.version = f[i++];
  r.config_hash = f[i++];
  return r;
}

std::string CsvContents::meta(const std::string& key) const {
  for (const auto& [k, v] : metadata) {
    if (k == key) return v;
  }
  return {};
}

CsvContents read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CsvContents out;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;  // partial last line
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        out.metadata.emplace_back(key, line.substr(eq + 1));
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      if (split_row(line) != csv_columns()) throw Error(ErrorCode::ParseError, "unexpected CSV header");
      continue;
    }
    out.records.push_back(parse_csv_row(line));
  }
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::pair<std::string, std::string>>& metadata,
                     bool append) {
  const bool exists = std::filesystem::exists(path);
  if (append && exists) {
    // Drop a torn final line so appended rows start on a fresh line.
    std::ifstream in(path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const auto last_nl = text.find_last_of('\n');
    const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (keep != text.size()) std::filesystem::resize_file(path, keep);
    out_.open(path, std::ios::app | std::ios::binary);
  } else {
    out_.open(path, std::ios::trunc | std::ios::binary);
    for (const auto& [k, v] : metadata) out_ << "# " << k << "=" << v << "\n";
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }
  if (!out_) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out_.flush();
}

void CsvWriter::write(const ResultRecord& r) {
  out_ << to_csv_row(r) << "\n";
  out_.flush();
}

}  // namespace tfd::harness

#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace tfd::harness {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One grid point. Quantities a scenario does not produce stay NaN.
struct ResultRecord {
  std::size_t grid_index = 0;
  std::string scenario;
  std::string model;
  std::string engine;
  int n = 0;
  double c = kNaN;
  double xi = kNaN;
  double t = kNaN;
  double j_over_jc = kNaN;
  int k = 0;
  int realization = 0;
  std::uint64_t seed = 0;

  double beta_star = kNaN;
  double f_max = kNaN;
  double gap = kNaN;
  double w_off = kNaN;
  double energy = kNaN;
  double mean_energy_l = kNaN;
  double var_energy_l = kNaN;
  double f_adiab = kNaN;
  double f_exp = kNaN;
  long long max_bond = 0;
  double discarded_weight = kNaN;
  bool boundary = false;

  /// "ok" or "error"; message carries the engine error text.
  std::string status = "ok";
  std::string message;
  double wall_time = 0.0;
  std::string version;
  std::string config_hash;
};

const std::vector<std::string>& csv_columns();
std::string to_csv_row(const ResultRecord& r);
/// Throws ParseError on a malformed row.
ResultRecord parse_csv_row(const std::string& line);

struct CsvContents {
  /// Preamble "# key=value" lines, in file order.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ResultRecord> records;

  /// Value of a metadata key, or empty.
  std::string meta(const std::string& key) const;
};

/// Reads a results file. A truncated final line (interrupted write) is
/// dropped.
CsvContents read_csv(const std::string& path);

/// Append-only writer; each record is flushed as soon as it is written.
class CsvWriter {
 public:
  /// Creates the file with preamble and header, or reopens it for appending
  /// when append is true and the file exists.
  CsvWriter(const std::string& path, const std::vector<std::pair<std::string, std::string>>& metadata,
            bool append);

  void write(const ResultRecord& r);

 private:
  std::ofstream out_;
};

}  // namespace tfd::harness

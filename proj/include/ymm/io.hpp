#pragma once

#include "ymm/equilibration.hpp"
#include "ymm/oracle6d.hpp"
#include "ymm/spectrum.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ymm {

extern const char* const kToolVersion;

/// 17 significant digits, '.' decimal separator, "nan"/"inf" spelled out.
std::string format_double(double v);

/// RFC 4180 writer: CRLF line ends, fields quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& fields);
  std::string str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

/// Parsed table; cells looked up by header name.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};
CsvTable parse_csv(const std::string& text);

/// Header q,n,E,size,q_quality,degenerate_pair,residual. Rows ordered by
/// (q, n, E); flags as 0/1.
std::string records_csv(const std::vector<SpectralRecord>& records);
/// Inverse of records_csv. charge_flag is restored from q_quality > reject_threshold.
std::vector<SpectralRecord> parse_records_csv(const std::string& text, double reject_threshold = 0.2);

/// Header t,deviation,certified_bound,paper_bound.
std::string trajectory_csv(const EquilibrationReport& r);
/// Header level,E_reduced,E_direct,q_reduced,q_direct,diff.
std::string cross_check_csv(const CrossCheckReport& r);

std::string read_file(const std::string& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::string& path, const std::string& content);
/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Raw little-endian float64, column-major, with a JSON header next to it.
void write_eigenvectors(const std::string& bin_path, const std::string& header_path, const Eigen::MatrixXd& v);
Eigen::MatrixXd read_eigenvectors(const std::string& header_path);

/// Canonical JSON text: 2-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

/// Run record written when a command starts and rewritten when it ends.
/// Timestamps come from SOURCE_DATE_EPOCH when it is set.
class RunManifest {
 public:
  RunManifest(std::string command, std::string dir, nlohmann::json config, nlohmann::json seeds);

  void add_input(const std::string& path);
  /// Path relative to the output directory.
  void add_output(const std::string& name);
  void begin();
  void finish(const std::string& status, const std::string& error = "");
  std::string path() const;
  nlohmann::json to_json() const;

 private:
  std::string command_, dir_;
  nlohmann::json config_, seeds_;
  nlohmann::json inputs_ = nlohmann::json::array(), outputs_ = nlohmann::json::array();
  std::string started_, finished_, status_ = "running", error_;
};

/// ISO-8601 UTC, from SOURCE_DATE_EPOCH if set, else the clock.
std::string timestamp_now();

}  // namespace ymm

#include "ymm/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ymm {

const char* const kToolVersion = "0.1.0";

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string q = "\"";
  for (char ch : f) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string b(bool v) { return v ? "1" : "0"; }

double to_double(const std::string& s, const std::string& what) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::invalid_argument(what + ": not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != s.size()) throw std::invalid_argument(what + ": not an integer: '" + s + "'");
  return v;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::invalid_argument("csv: row width does not match header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    out_ += quote(fields[i]);
  }
  out_ += "\r\n";
  return *this;
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("csv: missing column '" + name + "'");
  return std::size_t(it - header.begin());
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(field);
      field.clear();
      any = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(field);
        rows.push_back(row);
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(field);
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("csv: missing header");
  CsvTable t;
  t.header = rows.front();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != t.header.size())
      throw std::invalid_argument("csv: row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                                  " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(rows[r]);
  }
  return t;
}

std::string records_csv(const std::vector<SpectralRecord>& records) {
  std::vector<SpectralRecord> sorted = records;
  std::stable_sort(sorted.begin(), sorted.end(), [](const SpectralRecord& a, const SpectralRecord& c) {
    if (a.q_abs != c.q_abs) return a.q_abs < c.q_abs;
    if (a.n != c.n) return a.n < c.n;
    return a.E < c.E;
  });
  CsvWriter w({"q", "n", "E", "size", "q_quality", "degenerate_pair", "residual"});
  for (const SpectralRecord& r : sorted)
    w.row({std::to_string(r.q_abs), std::to_string(r.n), format_double(r.E), format_double(r.size),
           format_double(r.q_quality), b(r.degenerate_pair), format_double(r.residual)});
  return w.str();
}

std::vector<SpectralRecord> parse_records_csv(const std::string& text, double reject_threshold) {
  const CsvTable t = parse_csv(text);
  const std::size_t cq = t.column("q"), cn = t.column("n"), ce = t.column("E"), cs = t.column("size"),
                    cqq = t.column("q_quality"), cd = t.column("degenerate_pair"), cr = t.column("residual");
  std::vector<SpectralRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = "records row " + std::to_string(i + 1);
    SpectralRecord r;
    r.q_abs = to_int(row[cq], where + " q");
    r.n = to_int(row[cn], where + " n");
    r.E = to_double(row[ce], where + " E");
    r.size = to_double(row[cs], where + " size");
    r.q_quality = to_double(row[cqq], where + " q_quality");
    const int dp = to_int(row[cd], where + " degenerate_pair");
    if (dp != 0 && dp != 1) throw std::invalid_argument(where + " degenerate_pair: expected 0 or 1");
    r.degenerate_pair = dp == 1;
    r.residual = to_double(row[cr], where + " residual");
    r.charge_flag = r.q_quality > reject_threshold;
    r.column = Eigen::Index(i);
    out.push_back(r);
  }
  return out;
}

std::string trajectory_csv(const EquilibrationReport& r) {
  CsvWriter w({"t", "deviation", "certified_bound", "paper_bound"});
  for (std::size_t i = 0; i < r.times.size(); ++i)
    w.row({format_double(r.times[i]), format_double(r.deviation[i]), format_double(r.bound[i]),
           i < r.quadratic_bound.size() ? format_double(r.quadratic_bound[i]) : std::string()});
  return w.str();
}

std::string cross_check_csv(const CrossCheckReport& r) {
  CsvWriter w({"level", "E_reduced", "E_direct", "q_reduced", "q_direct", "diff"});
  for (const CrossCheckLevel& l : r.levels)
    w.row({std::to_string(l.level), format_double(l.E_reduced), format_double(l.E_direct),
           std::to_string(l.q_reduced), std::to_string(l.q_direct), format_double(l.diff)});
  return w.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file(path)); }

void write_eigenvectors(const std::string& bin_path, const std::string& header_path, const Eigen::MatrixXd& v) {
  static_assert(std::endian::native == std::endian::little, "eigenvector files are little-endian");
  std::string bytes(std::size_t(v.size()) * sizeof(double), '\0');
  std::memcpy(bytes.data(), v.data(), bytes.size());
  write_file(bin_path, bytes);
  const nlohmann::json h = {{"file", std::filesystem::path(bin_path).filename().string()},
                            {"dtype", "float64"},
                            {"endian", "little"},
                            {"order", "column-major"},
                            {"rows", v.rows()},
                            {"cols", v.cols()},
                            {"sha256", sha256_hex(bytes)}};
  write_file(header_path, dump_json(h));
}

Eigen::MatrixXd read_eigenvectors(const std::string& header_path) {
  const nlohmann::json h = nlohmann::json::parse(read_file(header_path));
  const auto dir = std::filesystem::path(header_path).parent_path();
  const std::string bytes = read_file((dir / h.at("file").get<std::string>()).string());
  const Eigen::Index rows = h.at("rows"), cols = h.at("cols");
  if (bytes.size() != std::size_t(rows * cols) * sizeof(double))
    throw std::runtime_error("eigenvector file size does not match its header");
  if (sha256_hex(bytes) != h.at("sha256").get<std::string>())
    throw std::runtime_error("eigenvector checksum mismatch");
  Eigen::MatrixXd v(rows, cols);
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string timestamp_now() {
  std::time_t t;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) {
    t = std::time_t(std::strtoll(e, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, std::string dir, nlohmann::json config, nlohmann::json seeds)
    : command_(std::move(command)), dir_(std::move(dir)), config_(std::move(config)), seeds_(std::move(seeds)) {}

void RunManifest::add_input(const std::string& path) {
  const std::string bytes = read_file(path);
  std::string shown = path;
  std::error_code ec;
  const auto rel = std::filesystem::relative(path, dir_, ec);
  if (!ec && !rel.empty() && rel.native().rfind("..", 0) != 0) shown = rel.string();
  inputs_.push_back({{"path", shown}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
}

void RunManifest::add_output(const std::string& name) {
  const std::string bytes = read_file((std::filesystem::path(dir_) / name).string());
  outputs_.push_back({{"path", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
}

std::string RunManifest::path() const { return (std::filesystem::path(dir_) / (command_ + ".manifest.json")).string(); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j = {{"schema", "ymm-run-manifest/1"},
                      {"command", command_},
                      {"tool_version", kToolVersion},
                      {"config", config_},
                      {"seeds", seeds_},
                      {"started", started_},
                      {"finished", finished_.empty() ? nlohmann::json(nullptr) : nlohmann::json(finished_)},
                      {"status", status_},
                      {"inputs", inputs_},
                      {"outputs", outputs_}};
  if (!error_.empty()) j["error"] = error_;
  return j;
}

void RunManifest::begin() {
  started_ = timestamp_now();
  status_ = "running";
  write_file(path(), dump_json(to_json()));
}

void RunManifest::finish(const std::string& status, const std::string& error) {
  finished_ = timestamp_now();
  status_ = status;
  error_ = error;
  write_file(path(), dump_json(to_json()));
}

}  // namespace ymm

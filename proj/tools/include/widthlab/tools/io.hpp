#pragma once

#include <concepts>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace widthlab::tools {

// Table with a header row; numbers are rendered with %.17g so files are
// byte-identical across runs.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns);

  CsvTable& row();
  CsvTable& add(double v);
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  CsvTable& add(T v) {
    return add(std::to_string(v));
  }
  CsvTable& add(bool v);
  CsvTable& add(const std::string& v);
  CsvTable& add(const char* v) { return add(std::string(v)); }

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return cells_.size(); }
  std::string render() const;

private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> cells_;
};

std::string format_double(double v);

// Writes to a temporary file in the same directory, then renames it over path.
void write_atomic(const std::string& path, const std::string& content);

// Run-level provenance attached to every output file.
struct RunInfo {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// Writes <dir>/<name>.csv and the sidecar <dir>/<name>.meta.json; returns the CSV path.
std::string write_table(const std::string& dir, const std::string& name, const CsvTable& table, const RunInfo& run);
// Writes <dir>/<name>.json with the same provenance block; returns the path.
std::string write_report(const std::string& dir, const std::string& name, const nlohmann::json& body, const RunInfo& run);

nlohmann::json provenance(const RunInfo& run);

} // namespace widthlab::tools

#include "widthlab/tools/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "widthlab/version.hpp"

namespace widthlab::tools {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row() {
  if (!cells_.empty() && cells_.back().size() != columns_.size())
    throw std::logic_error("CSV row has " + std::to_string(cells_.back().size()) + " cells, expected " +
                           std::to_string(columns_.size()));
  cells_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_double(v)); }
CsvTable& CsvTable::add(bool v) { return add(std::string(v ? "true" : "false")); }

CsvTable& CsvTable::add(const std::string& v) {
  if (cells_.empty()) throw std::logic_error("CSV add() before row()");
  if (cells_.back().size() >= columns_.size()) throw std::logic_error("CSV row overflow");
  const bool quote = v.find_first_of(",\"\n") != std::string::npos;
  if (!quote) {
    cells_.back().push_back(v);
  } else {
    std::string q = "\"";
    for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    cells_.back().push_back(q + "\"");
  }
  return *this;
}

std::string CsvTable::render() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : cells_) {
    if (r.size() != columns_.size()) throw std::logic_error("incomplete CSV row");
    line(r);
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

nlohmann::json provenance(const RunInfo& run) {
  nlohmann::json modules = nlohmann::json::object();
  for (const auto& [name, version] : kModuleVersions) modules[std::string(name)] = std::string(version);
  return {{"command", run.command},
          {"config_hash", run.config_hash},
          {"seed", run.seed},
          {"widthlab_version", std::string(kVersion)},
          {"module_versions", modules}};
}

std::string write_table(const std::string& dir, const std::string& name, const CsvTable& table, const RunInfo& run) {
  const std::string csv = (fs::path(dir) / (name + ".csv")).string();
  write_atomic(csv, table.render());
  nlohmann::json meta = provenance(run);
  meta["file"] = name + ".csv";
  meta["columns"] = table.columns();
  meta["rows"] = table.rows();
  write_atomic((fs::path(dir) / (name + ".meta.json")).string(), meta.dump(2) + "\n");
  return csv;
}

std::string write_report(const std::string& dir, const std::string& name, const nlohmann::json& body, const RunInfo& run) {
  nlohmann::json doc = body;
  doc["provenance"] = provenance(run);
  const std::string path = (fs::path(dir) / (name + ".json")).string();
  write_atomic(path, doc.dump(2) + "\n");
  return path;
}

} // namespace widthlab::tools

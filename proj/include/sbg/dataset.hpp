// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sbg/game.hpp"

namespace sbg {

using Cell = std::variant<double, std::string>;

enum class DataFormat { csv, json };

inline DataFormat data_format_from_string(const std::string& s) {
  if (s == "csv") return DataFormat::csv;
  if (s == "json") return DataFormat::json;
  throw ModelError("unknown data format: " + s);
}

// Tabular result container with ordered columns and a metadata block (plan
// hash, seeds, column legend). Emission is deterministic; doubles are
// printed with 17 significant digits so a CSV round-trip is lossless.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  void set_meta(const std::string& key, const std::string& value) { meta_[key] = value; }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw ModelError("dataset row arity mismatch");
    rows_.push_back(std::move(row));
  }

  static std::string cell_to_string(const Cell& cell) {
    if (std::holds_alternative<std::string>(cell)) return std::get<std::string>(cell);
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", std::get<double>(cell));
    return buffer;
  }

  std::string to_csv() const {
    std::ostringstream out;
    for (const auto& [key, value] : meta_) out << "# " << key << "=" << value << "\n";
    for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
    out << "\n";
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_to_string(row[c]);
      out << "\n";
    }
    return out.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json doc;
    doc["meta"] = meta_;
    doc["columns"] = columns_;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : rows_) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& cell : row) {
        if (std::holds_alternative<double>(cell))
          r.push_back(std::get<double>(cell));
        else
          r.push_back(std::get<std::string>(cell));
      }
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc;
  }

  void write(const std::string& path, DataFormat format) const {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot open for writing: " + path);
    if (format == DataFormat::csv)
      out << to_csv();
    else
      out << to_json().dump(2) << "\n";
    if (!out) throw ModelError("write failed: " + path);
  }

  static Dataset from_csv_text(const std::string& text) {
    Dataset out;
    std::istringstream in(text);
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line[0] == '#') {
        std::size_t eq = line.find('=');
        if (eq != std::string::npos)
          out.meta_[line.substr(2, eq - 2)] = line.substr(eq + 1);
        continue;
      }
      std::vector<std::string> fields;
      std::stringstream row(line);
      std::string field;
      while (std::getline(row, field, ',')) fields.push_back(field);
      if (!header_done) {
        out.columns_ = fields;
        header_done = true;
        continue;
      }
      std::vector<Cell> cells;
      for (const auto& f : fields) {
        char* end = nullptr;
        double value = std::strtod(f.c_str(), &end);
        if (end && *end == '\0' && end != f.c_str())
          cells.emplace_back(value);
        else
          cells.emplace_back(f);
      }
      out.add_row(std::move(cells));
    }
    return out;
  }

  static Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open for reading: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_csv_text(buffer.str());
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::map<std::string, std::string> meta_;
};

}  // namespace sbg

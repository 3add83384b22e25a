#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "catena/error.hpp"

namespace catena::cli {

using json = nlohmann::json;

/// A scalar with the grid and tolerance it was computed with.
inline json scalar(double value, const json& provenance) {
  return json{{"value", value}, {"provenance", provenance}};
}

inline json scalar(long long value, const json& provenance) {
  return json{{"value", value}, {"provenance", provenance}};
}

inline json scalar(std::size_t value, const json& provenance) {
  return scalar(static_cast<long long>(value), provenance);
}

/// A list of computed values sharing one provenance.
inline json series(const std::vector<double>& values, const json& provenance) {
  return json{{"value", values}, {"provenance", provenance}};
}

/// Writes `content` to `path` via a temporary file in the same directory and
/// a rename, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::InvalidConfig, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

/// Tab-separated table with a header row; numbers printed with 17 significant digits.
class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != columns_.size()) {
      throw Error(ErrorKind::InvalidConfig, "table row has the wrong number of columns");
    }
    rows_.push_back(row);
  }

  [[nodiscard]] std::size_t rows() const { return rows_.size(); }

  [[nodiscard]] std::string str() const {
    std::ostringstream out;
    out << std::setprecision(17);
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "\t" : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "\t" : "") << r[i];
      out << '\n';
    }
    return out.str();
  }

  void write(const std::filesystem::path& path) const { write_atomic(path, str()); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace catena::cli

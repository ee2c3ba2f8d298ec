#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riskgmm/simulator.hpp"

namespace riskgmm {

inline constexpr const char* kCsvHeader = "# riskgmm-csv v1";

/// Writes to a sibling temporary file and renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Accumulates a CSV table with the versioned header comment.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  std::size_t rows() const { return n_rows_; }

  /// Shortest round-trip representation; non-finite values become "inf", "-inf", "nan".
  static std::string num(double v);

private:
  std::size_t n_cols_;
  std::size_t n_rows_ = 0;
  std::string body_;
};

/// Long format: method,path,k,subopt (surviving paths only).
void append_ensemble_long(CsvTable& t, const std::string& method, const Ensemble& ens);

/// method,k,mean,std,rms,n_alive.
void append_ensemble_summary(CsvTable& t, const std::string& method, const Ensemble& ens);

/// Pretty-printed JSON with a trailing newline, written atomically.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace riskgmm

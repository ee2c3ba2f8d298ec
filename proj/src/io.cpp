#include "riskgmm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace riskgmm {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

CsvTable::CsvTable(std::vector<std::string> columns) : n_cols_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("CSV table needs at least one column");
  body_ = std::string(kCsvHeader) + "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) body_ += (i ? "," : "") + columns[i];
  body_ += "\n";
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) throw std::invalid_argument("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_ += ',';
    body_ += cells[i];
  }
  body_ += '\n';
  ++n_rows_;
}

std::string CsvTable::str() const { return body_; }

std::string CsvTable::num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

void append_ensemble_long(CsvTable& t, const std::string& method, const Ensemble& ens) {
  for (Eigen::Index p = 0; p < ens.subopt.rows(); ++p) {
    if (ens.diverged[static_cast<std::size_t>(p)]) continue;
    for (std::size_t j = 0; j < ens.steps.size(); ++j) {
      t.add_row({method, std::to_string(p), std::to_string(ens.steps[j]),
                 CsvTable::num(ens.subopt(p, static_cast<Eigen::Index>(j)))});
    }
  }
}

void append_ensemble_summary(CsvTable& t, const std::string& method, const Ensemble& ens) {
  for (int k : ens.steps) {
    t.add_row({method, std::to_string(k), CsvTable::num(ens.mean(k)), CsvTable::num(ens.stddev(k)),
               CsvTable::num(ens.rms(k)), std::to_string(ens.n_alive())});
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

}  // namespace riskgmm

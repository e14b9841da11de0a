#pragma once

// Replays published metric tables from their accuracy grids.
//
// A dataset directory holds three tab-separated files:
//   accuracy.tsv           model, method, acc@K=1..10
//   expected_auc.tsv       method, interval, one AUC per model, sigma
//   expected_ablation.tsv  method, interval, one AUC per model
// Lines starting with '#' are headers; the AUC headers name the model
// columns. A "Delta" method means Ours minus Vanilla, and the ablation
// intervals delta_standard / delta_long mean that row's method minus Ours.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "amrcc/error.hpp"
#include "amrcc/eval.hpp"

namespace amrcc::tables {

inline constexpr double kTolerance = 0.02;

using AccuracyGrid = std::map<std::string, std::map<std::string, std::vector<double>>>;  // method -> model -> acc

struct ExpectedRow {
  std::string method;
  std::string interval;
  std::vector<double> values;  // one per model column
  std::optional<double> sigma;
};

struct ExpectedTable {
  std::vector<std::string> models;
  std::vector<ExpectedRow> rows;
};

struct CellCheck {
  std::string table;
  std::string method;
  std::string interval;
  std::string column;
  double expected = 0.0;
  double actual = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CellCheck> checks;

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += !c.pass;
    return n;
  }
  bool ok() const { return failures() == 0; }
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, '\t')) out.push_back(cell);
  return out;
}

inline double to_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw error(errc::schema, where + ": not a number: '" + s + "'");
  }
}

inline std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw error(errc::io, "cannot open " + p.string());
  return in;
}

}  // namespace detail

inline AccuracyGrid load_accuracy(std::istream& in, const std::string& name = "accuracy") {
  AccuracyGrid grid;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = detail::split_tabs(line);
    const std::string where = name + ":" + std::to_string(lineno);
    if (cells.size() < 3) throw error(errc::schema, where + ": expected model, method and values");
    std::vector<double> acc;
    for (std::size_t i = 2; i < cells.size(); ++i) acc.push_back(detail::to_number(cells[i], where));
    grid[cells[1]][cells[0]] = std::move(acc);
  }
  return grid;
}

inline ExpectedTable load_expected(std::istream& in, const std::string& name = "expected") {
  ExpectedTable t;
  std::string line;
  std::size_t lineno = 0;
  bool has_sigma = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!t.models.empty()) continue;
      auto cells = detail::split_tabs(line.substr(1));
      for (auto& c : cells) c = std::string(text::trim_space(c));
      if (cells.size() < 3) throw error(errc::schema, name + ": header names no models");
      has_sigma = cells.back() == "sigma";
      t.models.assign(cells.begin() + 2, cells.end() - (has_sigma ? 1 : 0));
      continue;
    }
    const std::string where = name + ":" + std::to_string(lineno);
    if (t.models.empty()) throw error(errc::schema, where + ": data before header");
    const auto cells = detail::split_tabs(line);
    const std::size_t want = 2 + t.models.size() + (has_sigma ? 1 : 0);
    if (cells.size() != want)
      throw error(errc::shape_mismatch,
                  where + ": " + std::to_string(cells.size()) + " cells, expected " + std::to_string(want));
    ExpectedRow row{cells[0], cells[1], {}, std::nullopt};
    for (std::size_t i = 0; i < t.models.size(); ++i) row.values.push_back(detail::to_number(cells[2 + i], where));
    if (has_sigma) row.sigma = detail::to_number(cells.back(), where);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline eval::Interval interval_named(const std::string& name) {
  if (name == "standard" || name == "delta_standard") return eval::kStandardInterval;
  if (name == "long" || name == "delta_long") return eval::kLongInterval;
  throw error(errc::schema, "unknown interval '" + name + "'");
}

inline double grid_auc(const AccuracyGrid& grid, const std::string& method, const std::string& model,
                       eval::Interval interval) {
  const auto m = grid.find(method);
  if (m == grid.end()) throw error(errc::missing_bucket, "no accuracy rows for method " + method);
  const auto row = m->second.find(model);
  if (row == m->second.end()) throw error(errc::missing_bucket, "no accuracy row for " + method + " / " + model);
  return eval::auc(row->second, interval);
}

// Recomputed value of one expected cell.
inline double recompute(const AccuracyGrid& grid, const std::string& method, const std::string& interval,
                        const std::string& model) {
  const auto iv = interval_named(interval);
  if (method == "Delta") return grid_auc(grid, "Ours", model, iv) - grid_auc(grid, "Vanilla", model, iv);
  if (interval.starts_with("delta_")) return grid_auc(grid, method, model, iv) - grid_auc(grid, "Ours", model, iv);
  return grid_auc(grid, method, model, iv);
}

inline void check_table(const AccuracyGrid& grid, const ExpectedTable& table, const std::string& name,
                        VerificationReport& report, double tolerance = kTolerance) {
  for (const auto& row : table.rows) {
    std::vector<double> actual;
    for (std::size_t i = 0; i < table.models.size(); ++i) {
      const double v = recompute(grid, row.method, row.interval, table.models[i]);
      actual.push_back(v);
      report.checks.push_back({name, row.method, row.interval, table.models[i], row.values[i], v,
                               std::fabs(v - row.values[i]) <= tolerance});
    }
    if (row.sigma) {
      const double s = eval::sigma_across_models(actual);
      report.checks.push_back({name, row.method, row.interval, "sigma", *row.sigma, s,
                               std::fabs(s - *row.sigma) <= tolerance});
    }
  }
}

inline VerificationReport verify_dataset(const std::filesystem::path& dir, double tolerance = kTolerance) {
  auto acc_in = detail::open(dir / "accuracy.tsv");
  const auto grid = load_accuracy(acc_in, (dir / "accuracy.tsv").string());
  VerificationReport report;
  for (const char* file : {"expected_auc.tsv", "expected_ablation.tsv"}) {
    const auto path = dir / file;
    if (!std::filesystem::exists(path)) continue;
    auto in = detail::open(path);
    check_table(grid, load_expected(in, path.string()), path.string(), report, tolerance);
  }
  if (report.checks.empty()) throw error(errc::io, "no expected tables under " + dir.string());
  return report;
}

// A dataset directory itself, or a root whose subdirectories are datasets.
inline std::vector<std::filesystem::path> dataset_dirs(const std::filesystem::path& root) {
  if (std::filesystem::exists(root / "accuracy.tsv")) return {root};
  std::vector<std::filesystem::path> out;
  if (std::filesystem::is_directory(root))
    for (const auto& entry : std::filesystem::directory_iterator(root))
      if (entry.is_directory() && std::filesystem::exists(entry.path() / "accuracy.tsv"))
        out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw error(errc::io, "no fixture datasets under " + root.string());
  return out;
}

}  // namespace amrcc::tables

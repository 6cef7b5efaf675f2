#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "zo/harness.hpp"

namespace zo {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ContractViolation(fmt::format("CSV has no column '{}'", name));
}

// Plain comma-separated values as written by this library; no quoting.
CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  const auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(l);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.header.empty()) {
      table.header = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != table.header.size())
      throw DomainError(fmt::format("CSV row {} has {} cells, header has {}", table.rows.size() + 1, cells.size(),
                                    table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw DomainError("CSV is empty");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_csv(text.str());
}

TrendReport trend_check(const std::vector<long>& N, const std::vector<double>& values, double slope_lo,
                        double slope_hi) {
  require(N.size() == values.size(), "trend_check: N and values differ in length");
  TrendReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i]) || N[i] < 1) {
      report.warnings.push_back(fmt::format("N = {}: value {} excluded (not positive and finite)", N[i], values[i]));
      continue;
    }
    xs.push_back(std::log(static_cast<double>(N[i])));
    ys.push_back(std::log(values[i]));
  }
  report.points_used = static_cast<long>(xs.size());
  if (xs.size() < 3) {
    report.note = fmt::format("only {} usable points; at least 3 are needed", xs.size());
    return report;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0) {
    report.note = "all N values are equal";
    return report;
  }
  report.slope = sxy / sxx;
  report.intercept = my - report.slope * mx;
  const double sse = std::max(0.0, syy - report.slope * sxy);
  report.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  report.slope_stderr = xs.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : kNaN;
  report.pass = report.slope >= slope_lo && report.slope <= slope_hi;
  // Two-sided 95% band from the t quantile for the usual small point counts.
  static const double t95[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
  const auto dof = static_cast<std::size_t>(n - 2.0);
  const double t = dof >= 1 && dof <= 10 ? t95[dof - 1] : 1.96;
  report.note = fmt::format("slope {:.4f} (95% band {:.4f} .. {:.4f}), R^2 {:.4f}, {} points, target [{}, {}]",
                            report.slope, report.slope - t * report.slope_stderr,
                            report.slope + t * report.slope_stderr, report.r_squared, report.points_used, slope_lo,
                            slope_hi);
  return report;
}

TrendReport trend_check(const CsvTable& summary, const std::string& criterion, double slope_lo, double slope_hi,
                        const std::optional<std::string>& algorithm, const std::optional<long>& d) {
  const std::size_t value_col = summary.column(criterion + "_median");
  const std::size_t n_col = summary.column("N");
  const std::size_t alg_col = summary.column("algorithm");
  const std::size_t d_col = summary.column("d");
  std::vector<long> N;
  std::vector<double> values;
  for (const auto& row : summary.rows) {
    if (algorithm && row[alg_col] != *algorithm) continue;
    if (d && std::stol(row[d_col]) != *d) continue;
    N.push_back(std::stol(row[n_col]));
    values.push_back(std::strtod(row[value_col].c_str(), nullptr));
  }
  return trend_check(N, values, slope_lo, slope_hi);
}

}  // namespace zo

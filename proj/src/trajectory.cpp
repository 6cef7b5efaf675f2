#include "trajectory.hpp"

#include <fmt/core.h>

#include "zo/errors.hpp"

namespace zo::detail {

double criterion_value(const TraceRow& row, const std::string& name) {
  if (name == "fw_gap") return row.fw_gap;
  if (name == "gp_norm") return row.gp_norm;
  if (name == "gp_norm_sq") return row.gp_norm * row.gp_norm;
  if (name == "f_gap") return row.f_gap;
  if (name == "x_norm") return row.x_norm;
  if (name == "grad_l1_sq") return row.grad_l1_sq;
  if (name == "avg_f_gap") return row.avg_f_gap;
  if (name == "grad_norm") return row.grad_norm;
  if (name == "lambda_min") return row.lambda_min;
  if (name == "nnz") return static_cast<double>(row.nnz);
  throw ContractViolation(fmt::format("unknown criterion '{}'", name));
}

Trajectory::Trajectory(long N, const RunOptions& options)
    : rows_(static_cast<std::size_t>(N + 1)), verify_(options.verify), keep_(options.keep_iterates) {
  for (long k = 0; k <= N; ++k) rows_[static_cast<std::size_t>(k)].k = k;
}

void Trajectory::finish(RunRecord& record, long output_index,
                        const std::vector<std::pair<long, double>>& weights,
                        const std::vector<std::string>& criteria) const {
  finish(record, output_index, row(output_index), weights, criteria);
}

void Trajectory::finish(RunRecord& record, long output_index, const TraceRow& output_row,
                        const std::vector<std::pair<long, double>>& weights,
                        const std::vector<std::string>& criteria) const {
  const long N = static_cast<long>(rows_.size()) - 1;
  record.output_index = output_index;
  record.rows.clear();
  for (long k : trace_points(N)) record.rows.push_back(row(k));
  TraceRow out = output_row;
  out.is_output = true;
  record.rows.push_back(out);
  record.verified = verify_;
  for (const auto& name : criteria) {
    const double at_output = criterion_value(out, name);
    record.output_criteria[name] = at_output;
    double expectation = 0.0;
    for (const auto& [k, w] : weights) expectation += w * criterion_value(row(k), name);
    if (weights.empty()) expectation = at_output;
    record.expected_criteria[name] = verify_ ? expectation : kNaN;
  }
}

RunRecord Trajectory::partial(const RunRecord& header, long k) const {
  RunRecord record = header;
  record.rows.assign(rows_.begin(), rows_.begin() + k + 1);
  return record;
}

std::vector<std::pair<long, double>> uniform_weights(long lo, long hi) {
  std::vector<std::pair<long, double>> w;
  const double p = 1.0 / static_cast<double>(hi - lo + 1);
  for (long k = lo; k <= hi; ++k) w.emplace_back(k, p);
  return w;
}

}  // namespace zo::detail

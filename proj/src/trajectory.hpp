#ifndef ZO_SRC_TRAJECTORY_HPP
#define ZO_SRC_TRAJECTORY_HPP

#include <string>
#include <utility>
#include <vector>

#include "zo/run_record.hpp"

namespace zo::detail {

double criterion_value(const TraceRow& row, const std::string& name);

// Collects one row per iterate 0..N, then thins it to the trace points and
// folds the output distribution into expected criteria.
class Trajectory {
 public:
  Trajectory(long N, const RunOptions& options);

  TraceRow& row(long k) { return rows_[static_cast<std::size_t>(k)]; }
  const TraceRow& row(long k) const { return rows_[static_cast<std::size_t>(k)]; }

  void keep_iterate(const Vector& x, RunRecord& record) const {
    if (keep_) record.iterates.push_back(x);
  }
  void keep_estimate(const Vector& g, RunRecord& record) const {
    if (keep_) record.gradient_estimates.push_back(g);
  }

  // weights: (iterate index, probability) pairs defining the expectation.
  void finish(RunRecord& record, long output_index, const std::vector<std::pair<long, double>>& weights,
              const std::vector<std::string>& criteria) const;
  // Variant for outputs that are not iterates (running averages): the output
  // row is supplied, and an empty weight list makes it the expectation too.
  void finish(RunRecord& record, long output_index, const TraceRow& output_row,
              const std::vector<std::pair<long, double>>& weights,
              const std::vector<std::string>& criteria) const;
  // Rows 0..k as a record, for failure reports.
  RunRecord partial(const RunRecord& header, long k) const;

 private:
  std::vector<TraceRow> rows_;
  bool verify_;
  bool keep_;
};

// Uniform weights on the iterate indices lo..hi.
std::vector<std::pair<long, double>> uniform_weights(long lo, long hi);

}  // namespace zo::detail

#endif  // ZO_SRC_TRAJECTORY_HPP

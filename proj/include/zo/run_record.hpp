#ifndef ZO_RUN_RECORD_HPP
#define ZO_RUN_RECORD_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zo/types.hpp"

namespace zo {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Column family of a trace; each adds columns to the conditional-gradient base.
enum class TraceSchema { conditional_gradient, high_dimensional, cubic };

// Bumped whenever a column is added, removed or renamed.
inline constexpr int kTraceSchemaVersion = 1;

struct TraceRow {
  long k = 0;
  std::uint64_t calls = 0;
  long lmo_calls = 0;
  double fw_gap = kNaN;
  double gp_norm = kNaN;
  double f_gap = kNaN;
  double x_norm = kNaN;
  double grad_l1_sq = kNaN;
  long nnz = 0;
  double avg_f_gap = kNaN;
  double grad_norm = kNaN;
  double lambda_min = kNaN;
  double model_decrease = kNaN;
  long subsolver_iters = 0;
  bool is_output = false;
};

// Per-iteration schedule values as used by the solver (NaN / 0 where unused).
struct ScheduleStep {
  long k = 0;
  double alpha = kNaN;
  double gamma = kNaN;
  double mu = kNaN;
  double nu = kNaN;
  long m = 0;
  long b = 0;
};

struct RunRecord {
  std::string algorithm;
  TraceSchema schema = TraceSchema::conditional_gradient;
  std::uint64_t seed = 0;
  long N = 0;
  nlohmann::json schedule;
  std::vector<ScheduleStep> steps;
  // Index of the returned iterate in the trajectory (N for deterministic outputs).
  long output_index = 0;
  std::vector<TraceRow> rows;
  std::uint64_t total_calls = 0;
  std::uint64_t gradient_calls = 0;
  std::uint64_t hessian_calls = 0;
  long lmo_calls = 0;
  bool verified = false;
  // Criteria averaged over the output distribution, from the full trajectory.
  std::map<std::string, double> expected_criteria;
  // Criteria at the returned point.
  std::map<std::string, double> output_criteria;
  // x_0 .. x_N when requested.
  std::vector<Vector> iterates;
  // Gradient estimate used at step k (index k - 1) when iterates are kept.
  std::vector<Vector> gradient_estimates;
};

struct RunOptions {
  std::uint64_t seed = 0;
  // Compute reference-based criteria. Never influences the trajectory.
  bool verify = true;
  bool keep_iterates = false;
  std::optional<Vector> x0;
  // Overrides the optimum used for f_gap.
  std::optional<double> f_star;
};

struct SolverResult {
  Vector x;
  RunRecord record;
};

// Iterations that get a trace row: all of 0..N for N <= 1000, otherwise
// about 100 log-spaced points including 0 and N.
std::vector<long> trace_points(long N);

std::vector<std::string> trace_columns(TraceSchema schema);
void write_trace_csv(std::ostream& out, const RunRecord& record);
std::string trace_csv(const RunRecord& record);

// %.17g, with nan / inf spelled as in CSV readers.
std::string format_number(double value);

std::string to_string(TraceSchema schema);

}  // namespace zo

#endif  // ZO_RUN_RECORD_HPP

#ifndef ZO_HARNESS_HPP
#define ZO_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zo/constraints.hpp"
#include "zo/oracle.hpp"
#include "zo/run_record.hpp"

namespace zo {

inline constexpr int kConfigSchemaVersion = 1;

// Rejected configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Algorithm {
  zscg,
  zscg_convex,
  zscg_accelerated,
  zsgd_inexact,
  zsgd,
  zsgd_truncated,
  zscrn,
};

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& name);
bool needs_constraint(Algorithm algorithm);
// Criteria reported in traces and summaries for an algorithm.
std::vector<std::string> summary_criteria(Algorithm algorithm);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::zscg;
  nlohmann::json problem;
  std::optional<nlohmann::json> constraint;
  nlohmann::json schedule;  // {"mode": ..., overrides...}
  std::vector<std::uint64_t> seeds;
  std::vector<long> N;
  std::optional<Vector> x0;
  bool verify = true;
  std::string output = "results";
  // Target accuracy for the local-optimality report of zscrn runs.
  std::optional<double> eps;
};

// Parses and validates; throws ConfigError naming the first bad key.
ExperimentConfig parse_config(const nlohmann::json& json);
ExperimentConfig load_config(const std::filesystem::path& path);

ProblemSpec build_problem(const nlohmann::json& json);
ConstraintSet<double> build_constraint(const nlohmann::json& json, Index d);

struct RunOutcome {
  std::uint64_t seed = 0;
  long N = 0;
  bool ok = false;
  std::string error;
  std::string trace_file;
  RunRecord record;
  double wall_seconds = 0.0;
  // zscrn only: local-optimality measures at the returned point.
  nlohmann::json local_optimality;
};

// One summary line per N, aggregated over seeds. Criterion statistics come
// from the is_output row of each trace ("<name>_median" / "_iqr") and from
// the expectation over the output distribution ("expected_<name>_...").
struct SummaryRow {
  std::string algorithm;
  Index d = 0;
  long N = 0;
  long n_seeds = 0;
  long n_failed = 0;
  // Keyed by criterion name, and by "expected_<name>" for expectations.
  std::map<std::string, double> median;
  std::map<std::string, double> iqr;
  // Algorithm-specific counts (zscrn: runs passing each local-optimality test).
  std::map<std::string, double> extra;
  double calls_median = kNaN;
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;  // ordered by (N, seed)
  std::vector<SummaryRow> summary;
  std::filesystem::path summary_file;
  std::filesystem::path manifest_file;
  long failed() const;
};

struct RunSettings {
  std::optional<std::filesystem::path> out_dir;  // overrides config.output
  int jobs = 1;
  std::optional<bool> verify;  // overrides config.verify
};

// Runs every (N, seed) pair on a bounded worker pool. Each trace is written
// to a temporary file and renamed into place; then summary.csv and
// manifest.json are written the same way. Solver errors are recorded per run.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunSettings& settings = {});

// Runs a single configured solver; throws on solver errors.
SolverResult run_single(const ExperimentConfig& config, long N, std::uint64_t seed, bool verify);

std::string trace_file_name(long N, std::uint64_t seed);

// Median with linear interpolation; NaN entries are skipped.
double median_of(std::vector<double> values);
// Interquartile range (q75 - q25) with linear interpolation; NaN entries skipped.
double iqr_of(std::vector<double> values);

std::vector<std::string> summary_extras(Algorithm algorithm);
std::vector<std::string> summary_columns(const std::vector<std::string>& criteria,
                                         const std::vector<std::string>& extras = {});
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::vector<std::string>& criteria, const std::vector<std::string>& extras = {});

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text);

struct TrendReport {
  double slope = kNaN;
  double intercept = kNaN;
  double slope_stderr = kNaN;
  double r_squared = kNaN;
  long points_used = 0;
  std::vector<std::string> warnings;
  bool pass = false;
  std::string note;
};

// Least-squares slope of log(value) against log(N). Non-positive or NaN
// values are dropped with a warning; fewer than 3 remaining points fail.
TrendReport trend_check(const std::vector<long>& N, const std::vector<double>& values, double slope_lo,
                        double slope_hi);
// Same, reading "<criterion>_median" from a summary table (optionally one algorithm / d).
TrendReport trend_check(const CsvTable& summary, const std::string& criterion, double slope_lo, double slope_hi,
                        const std::optional<std::string>& algorithm = std::nullopt,
                        const std::optional<long>& d = std::nullopt);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Monte-Carlo property checks of the estimators (Stein identities,
// smoothing bounds, l_inf moments). quick uses 10x fewer samples.
std::vector<ValidationCheck> validate_estimators(bool quick, std::uint64_t seed = 2024);

// Writes `contents` to `path` through a temporary file in the same directory.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace zo

#endif  // ZO_HARNESS_HPP

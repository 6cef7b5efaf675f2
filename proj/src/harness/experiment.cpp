#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/core.h>

#include "zo/cg_solvers.hpp"
#include "zo/cubic_solver.hpp"
#include "zo/harness.hpp"
#include "zo/highdim_solvers.hpp"

namespace zo {

namespace {

using nlohmann::json;

std::optional<double> opt_number(const json& s, const char* key) {
  if (!s.contains(key)) return std::nullopt;
  if (!s.at(key).is_number()) throw ConfigError(fmt::format("schedule.{}", key), "expected a number");
  return s.at(key).get<double>();
}

std::optional<long> opt_count(const json& s, const char* key) {
  if (!s.contains(key)) return std::nullopt;
  if (!s.at(key).is_number_integer() || s.at(key).get<long>() < 1)
    throw ConfigError(fmt::format("schedule.{}", key), "expected a positive integer");
  return s.at(key).get<long>();
}

template <class T>
T required(const std::optional<T>& value, const char* key, const char* why) {
  if (!value) throw ConfigError(fmt::format("schedule.{}", key), fmt::format("required {}", why));
  return *value;
}

bool paper_mode(const json& s) { return !s.contains("mode") || s.at("mode") == "paper"; }

double noise_or_one(const ProblemSpec& problem) { return problem.noise_std() > 0 ? problem.noise_std() : 1.0; }

double known_optimum(const ProblemSpec& problem, const char* key) {
  if (!problem.optimum_value())
    throw ConfigError(fmt::format("schedule.{}", key), "required: the problem has no known optimum");
  return *problem.optimum_value();
}

long support_size(const ProblemSpec& problem) {
  if (const auto* sparse = std::get_if<SparseSupportFamily>(&problem.family()))
    return static_cast<long>(sparse->support.size());
  return static_cast<long>(problem.dimension());
}

SolverResult run_cg(const ExperimentConfig& config, const ProblemSpec& problem, long N, const RunOptions& options) {
  const json& s = config.schedule;
  const Index d = problem.dimension();
  const ConstraintSet<double> set = build_constraint(*config.constraint, d);
  const Vector x0 = options.x0 ? *options.x0 : default_start(set, d);
  const auto B_Lsigma = [&] {
    if (auto v = opt_number(s, "B_Lsigma")) return *v;
    return default_B_Lsigma(problem, set, x0, opt_number(s, "sigma").value_or(0.0));
  };
  const auto icg_cap = opt_count(s, "icg_max_iters");

  switch (config.algorithm) {
    case Algorithm::zscg:
    case Algorithm::zscg_convex: {
      const bool convex = config.algorithm == Algorithm::zscg_convex;
      ZscgSchedule schedule;
      if (paper_mode(s)) {
        schedule = convex ? ZscgSchedule::paper_convex(N, d, B_Lsigma()) : ZscgSchedule::paper_nonconvex(N, d, B_Lsigma());
        if (auto nu = opt_number(s, "nu")) schedule.nu = *nu;
        if (auto m = opt_count(s, "m")) schedule.m.assign(schedule.m.size(), *m);
      } else {
        schedule = ZscgSchedule::practical(convex, N, required(opt_number(s, "nu"), "nu", "in practical mode"),
                                           required(opt_count(s, "m"), "m", "in practical mode"));
      }
      return zscg(problem, set, schedule, options);
    }
    case Algorithm::zscg_accelerated: {
      const double L = opt_number(s, "L").value_or(problem.lipschitz_grad());
      const double diam = set.diameter(d);
      const double D_X0 = opt_number(s, "D_X0").value_or(diam * diam);
      AcceleratedSchedule schedule;
      if (paper_mode(s)) {
        schedule = AcceleratedSchedule::paper(N, d, L, D_X0, B_Lsigma());
        if (auto nu = opt_number(s, "nu")) schedule.nu = *nu;
      } else {
        schedule = AcceleratedSchedule::practical(N, L, D_X0, required(opt_number(s, "nu"), "nu", "in practical mode"),
                                                  required(opt_count(s, "m0"), "m0", "in practical mode"));
      }
      if (icg_cap) schedule.icg_max_iters = *icg_cap;
      return zscg_accelerated(problem, set, schedule, options);
    }
    case Algorithm::zsgd_inexact: {
      const double L = opt_number(s, "L").value_or(problem.lipschitz_grad());
      InexactSchedule schedule;
      if (paper_mode(s)) {
        schedule = InexactSchedule::paper(N, d, L);
        if (auto nu = opt_number(s, "nu")) schedule.nu = *nu;
        if (auto m = opt_count(s, "m")) schedule.m = *m;
      } else {
        schedule = InexactSchedule::practical(N, L, required(opt_number(s, "nu"), "nu", "in practical mode"),
                                              required(opt_count(s, "m"), "m", "in practical mode"));
      }
      if (auto gamma = opt_number(s, "gamma")) schedule.gamma = *gamma;
      if (auto mu = opt_number(s, "mu")) schedule.mu = *mu;
      if (icg_cap) schedule.icg_max_iters = *icg_cap;
      return zsgd_inexact_nonconvex(problem, set, schedule, options);
    }
    default: break;
  }
  throw ContractViolation("run_cg: not a constrained algorithm");
}

SolverResult run_highdim(const ExperimentConfig& config, const ProblemSpec& problem, long N,
                         const RunOptions& options) {
  const json& s = config.schedule;
  const Index d = problem.dimension();
  const bool truncated = config.algorithm == Algorithm::zsgd_truncated;
  const HighDimMode mode = truncated ? HighDimMode::convex_truncated : HighDimMode::nonconvex;
  const long s_hat = opt_count(s, "s_hat").value_or(truncated ? support_size(problem) : static_cast<long>(d));
  const Vector x0 = options.x0 ? *options.x0 : Vector::Zero(d);

  HighDimSchedule schedule;
  if (paper_mode(s)) {
    const double L = opt_number(s, "L").value_or(problem.lipschitz_grad_linf());
    const double sigma = opt_number(s, "sigma").value_or(noise_or_one(problem));
    const double C_hat = opt_number(s, "C_hat").value_or(2.0);
    double D0 = 0.0;
    if (auto v = opt_number(s, "D0")) {
      D0 = *v;
    } else if (truncated) {
      if (!problem.minimizer()) throw ConfigError("schedule.D0", "required: the problem has no known minimizer");
      D0 = (x0 - *problem.minimizer()).squaredNorm();
    } else {
      D0 = problem.value(x0) - known_optimum(problem, "D0");
    }
    schedule = truncated ? HighDimSchedule::paper_truncated(N, d, L, s_hat, D0, sigma, C_hat)
                         : HighDimSchedule::paper_nonconvex(N, d, L, s_hat, D0, sigma, C_hat);
    if (auto nu = opt_number(s, "nu")) schedule.nu = *nu;
    if (auto gamma = opt_number(s, "gamma")) schedule.gamma = *gamma;
  } else {
    const double nu = required(opt_number(s, "nu"), "nu", "in practical mode");
    const auto gamma = opt_number(s, "gamma");
    const auto gamma0 = opt_number(s, "gamma0");
    if (gamma.has_value() == gamma0.has_value())
      throw ConfigError("schedule.gamma", "practical mode needs exactly one of gamma, gamma0");
    schedule = gamma ? HighDimSchedule::practical(mode, N, *gamma, nu, s_hat)
                     : HighDimSchedule::practical_sqrt_n(mode, N, *gamma0, nu, s_hat);
  }
  return truncated ? zsgd_truncated(problem, schedule, options) : zsgd(problem, schedule, options);
}

double scrn_eps(const ExperimentConfig& config) {
  if (auto v = opt_number(config.schedule, "eps")) return *v;
  return config.eps.value_or(1e-4);
}

CubicParams cubic_params(const ExperimentConfig& config, const ProblemSpec& problem, long N, const Vector& x0) {
  const json& s = config.schedule;
  const double eps = scrn_eps(config);
  CubicParams params;
  if (paper_mode(s)) {
    const double L = opt_number(s, "L").value_or(problem.lipschitz_grad());
    const double L_H = opt_number(s, "L_H").value_or(problem.lipschitz_hess());
    const auto gap0_given = opt_number(s, "gap0");
    const double gap0 = gap0_given ? *gap0_given : problem.value(x0) - known_optimum(problem, "gap0");
    const double B = opt_number(s, "B").value_or(problem.reference_gradient(x0).norm());
    const double sigma = opt_number(s, "sigma").value_or(noise_or_one(problem));
    params = CubicParams::paper(eps, problem.dimension(), L, L_H, gap0, B, sigma);
    // The N grid takes the place of the theoretical iteration count.
    params.N = N;
    params.alpha.resize(static_cast<std::size_t>(N), params.alpha.front());
    params.m.resize(static_cast<std::size_t>(N), params.m.front());
    params.b.resize(static_cast<std::size_t>(N), params.b.front());
    if (auto nu = opt_number(s, "nu")) params.nu = *nu;
    if (auto alpha = opt_number(s, "alpha")) params.alpha.assign(params.alpha.size(), *alpha);
    if (auto m = opt_count(s, "m")) params.m.assign(params.m.size(), *m);
    if (auto b = opt_count(s, "b")) params.b.assign(params.b.size(), *b);
  } else {
    params = CubicParams::practical(N, required(opt_number(s, "alpha"), "alpha", "in practical mode"),
                                    required(opt_number(s, "nu"), "nu", "in practical mode"),
                                    required(opt_count(s, "m"), "m", "in practical mode"),
                                    required(opt_count(s, "b"), "b", "in practical mode"), eps);
  }
  if (s.contains("subsolver")) {
    const json& sub = s.at("subsolver");
    if (sub.contains("tol")) {
      if (!sub.at("tol").is_number() || sub.at("tol").get<double>() <= 0)
        throw ConfigError("schedule.subsolver.tol", "expected a positive number");
      params.subsolver.tolerance = sub.at("tol").get<double>();
    }
    if (sub.contains("max_iters")) {
      if (!sub.at("max_iters").is_number_integer() || sub.at("max_iters").get<long>() < 1)
        throw ConfigError("schedule.subsolver.max_iters", "expected a positive integer");
      params.subsolver.max_iters = sub.at("max_iters").get<long>();
    }
  }
  return params;
}

RunOptions options_for(const ExperimentConfig& config, std::uint64_t seed, bool verify) {
  RunOptions options;
  options.seed = seed;
  options.verify = verify;
  options.x0 = config.x0;
  return options;
}

// Runs one configuration; the local-optimality report is filled for zscrn.
SolverResult dispatch(const ExperimentConfig& config, const ProblemSpec& problem, long N, std::uint64_t seed,
                      bool verify, json* local_opt) {
  const RunOptions options = options_for(config, seed, verify);
  switch (config.algorithm) {
    case Algorithm::zscg:
    case Algorithm::zscg_convex:
    case Algorithm::zscg_accelerated:
    case Algorithm::zsgd_inexact: return run_cg(config, problem, N, options);
    case Algorithm::zsgd:
    case Algorithm::zsgd_truncated: return run_highdim(config, problem, N, options);
    case Algorithm::zscrn: {
      const Vector x0 = config.x0 ? *config.x0 : Vector::Zero(problem.dimension());
      const CubicParams params = cubic_params(config, problem, N, x0);
      CubicSolverResult result = zscrn(problem, params, options);
      if (local_opt && verify) {
        const SecondOrderReport report = second_order_criterion(problem, result.x);
        const double L_H = opt_number(config.schedule, "L_H").value_or(problem.lipschitz_hess());
        const LocalOptimality lo = local_optimality(report, config.eps.value_or(params.eps), L_H);
        *local_opt = json{{"grad_norm", report.grad_norm},     {"lambda_min", report.lambda_min},
                          {"lambda_max", report.lambda_max},   {"by_curvature", lo.by_curvature},
                          {"by_lipschitz", lo.by_lipschitz},   {"by_curvature_ok", lo.by_curvature_ok},
                          {"by_lipschitz_ok", lo.by_lipschitz_ok}, {"disagree", lo.disagree}};
      }
      return std::move(static_cast<SolverResult&>(result));
    }
  }
  throw ContractViolation("unknown algorithm");
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json criteria_json(const std::map<std::string, double>& values) {
  json out = json::object();
  for (const auto& [name, v] : values) out[name] = finite_or_null(v);
  return out;
}

double quantile(std::vector<double> values, double q) {
  values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }), values.end());
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const ExperimentConfig& config, Index d, const std::vector<RunOutcome>& runs) {
  const auto criteria = summary_criteria(config.algorithm);
  std::vector<SummaryRow> rows;
  for (long N : config.N) {
    SummaryRow row;
    row.algorithm = to_string(config.algorithm);
    row.d = d;
    row.N = N;
    std::map<std::string, std::vector<double>> samples;
    std::vector<double> calls;
    for (const RunOutcome& run : runs) {
      if (run.N != N) continue;
      ++row.n_seeds;
      row.wall_seconds += run.wall_seconds;
      if (!run.ok) {
        ++row.n_failed;
        continue;
      }
      calls.push_back(static_cast<double>(run.record.total_calls));
      for (const auto& c : criteria) {
        const auto out = run.record.output_criteria.find(c);
        samples[c].push_back(out == run.record.output_criteria.end() ? kNaN : out->second);
        const auto exp = run.record.expected_criteria.find(c);
        samples["expected_" + c].push_back(exp == run.record.expected_criteria.end() ? kNaN : exp->second);
      }
      if (config.algorithm == Algorithm::zscrn && run.local_optimality.is_object()) {
        row.extra["local_opt_by_curvature"] += run.local_optimality.at("by_curvature_ok").get<bool>() ? 1 : 0;
        row.extra["local_opt_by_lipschitz"] += run.local_optimality.at("by_lipschitz_ok").get<bool>() ? 1 : 0;
        row.extra["local_opt_disagree"] += run.local_optimality.at("disagree").get<bool>() ? 1 : 0;
      }
    }
    for (const auto& name : summary_extras(config.algorithm)) row.extra.try_emplace(name, 0.0);
    row.calls_median = median_of(calls);
    for (const auto& [name, values] : samples) {
      row.median[name] = median_of(values);
      row.iqr[name] = iqr_of(values);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json outcome_json(const RunOutcome& run) {
  json j{{"N", run.N},
         {"seed", run.seed},
         {"ok", run.ok},
         {"trace_file", run.trace_file},
         {"wall_seconds", run.wall_seconds}};
  if (!run.ok) j["error"] = run.error;
  if (run.ok) {
    const RunRecord& r = run.record;
    j["schedule"] = r.schedule;
    j["output_index"] = r.output_index;
    j["total_calls"] = r.total_calls;
    j["gradient_calls"] = r.gradient_calls;
    j["hessian_calls"] = r.hessian_calls;
    j["lmo_calls"] = r.lmo_calls;
    j["verified"] = r.verified;
    j["output_criteria"] = criteria_json(r.output_criteria);
    j["expected_criteria"] = criteria_json(r.expected_criteria);
    if (!run.local_optimality.is_null()) j["local_optimality"] = run.local_optimality;
  }
  return j;
}

}  // namespace

long ExperimentResult::failed() const {
  return static_cast<long>(std::count_if(runs.begin(), runs.end(), [](const RunOutcome& r) { return !r.ok; }));
}

std::string trace_file_name(long N, std::uint64_t seed) { return fmt::format("trace_N{}_seed{}.csv", N, seed); }

SolverResult run_single(const ExperimentConfig& config, long N, std::uint64_t seed, bool verify) {
  const ProblemSpec problem = build_problem(config.problem);
  return dispatch(config, problem, N, seed, verify, nullptr);
}

double median_of(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double iqr_of(std::vector<double> values) { return quantile(values, 0.75) - quantile(values, 0.25); }

std::vector<std::string> summary_extras(Algorithm algorithm) {
  if (algorithm == Algorithm::zscrn) return {"local_opt_by_curvature", "local_opt_by_lipschitz", "local_opt_disagree"};
  return {};
}

std::vector<std::string> summary_columns(const std::vector<std::string>& criteria,
                                         const std::vector<std::string>& extras) {
  std::vector<std::string> columns{"algorithm", "d", "N", "n_seeds", "n_failed", "calls_median"};
  for (const auto& c : criteria) {
    columns.push_back(c + "_median");
    columns.push_back(c + "_iqr");
  }
  for (const auto& c : criteria) {
    columns.push_back("expected_" + c + "_median");
    columns.push_back("expected_" + c + "_iqr");
  }
  columns.insert(columns.end(), extras.begin(), extras.end());
  columns.push_back("wall_seconds");
  return columns;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::vector<std::string>& criteria, const std::vector<std::string>& extras) {
  const auto columns = summary_columns(criteria, extras);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  const auto lookup = [](const std::map<std::string, double>& m, const std::string& key) {
    const auto it = m.find(key);
    return it == m.end() ? kNaN : it->second;
  };
  for (const SummaryRow& row : rows) {
    out << row.algorithm << ',' << row.d << ',' << row.N << ',' << row.n_seeds << ',' << row.n_failed << ','
        << format_number(row.calls_median);
    for (const std::string prefix : {"", "expected_"}) {
      for (const auto& c : criteria) {
        out << ',' << format_number(lookup(row.median, prefix + c)) << ','
            << format_number(lookup(row.iqr, prefix + c));
      }
    }
    for (const auto& e : extras) out << ',' << format_number(lookup(row.extra, e));
    out << ',' << format_number(row.wall_seconds) << '\n';
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const auto tmp = path.parent_path() / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    out << contents;
    out.close();
    if (!out) throw Error(fmt::format("failed writing '{}'", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunSettings& settings) {
  const ProblemSpec problem = build_problem(config.problem);
  const bool verify = settings.verify.value_or(config.verify);
  const std::filesystem::path out_dir = settings.out_dir.value_or(std::filesystem::path(config.output));
  const std::filesystem::path trace_dir = out_dir / "traces";
  std::filesystem::create_directories(trace_dir);

  ExperimentResult result;
  for (long N : config.N)
    for (std::uint64_t seed : config.seeds) {
      RunOutcome run;
      run.N = N;
      run.seed = seed;
      run.trace_file = (std::filesystem::path("traces") / trace_file_name(N, seed)).string();
      result.runs.push_back(std::move(run));
    }

  std::atomic<std::size_t> next{0};
  std::mutex config_error_mutex;
  std::optional<ConfigError> config_error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < result.runs.size(); i = next++) {
      RunOutcome& run = result.runs[i];
      const auto start = std::chrono::steady_clock::now();
      std::string trace;
      try {
        SolverResult solved = dispatch(config, problem, run.N, run.seed, verify, &run.local_optimality);
        run.record = std::move(solved.record);
        run.ok = true;
        trace = trace_csv(run.record);
      } catch (const ConfigError& e) {
        std::lock_guard lock(config_error_mutex);
        if (!config_error) config_error = e;
        run.error = e.what();
      } catch (const DivergenceError& e) {
        run.error = e.what();
        trace = e.trace();
      } catch (const std::exception& e) {
        run.error = e.what();
      }
      run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (!trace.empty()) write_file_atomic(out_dir / run.trace_file, trace);
    }
  };
  const auto workers =
      static_cast<std::size_t>(std::clamp<long>(settings.jobs, 1, static_cast<long>(result.runs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (config_error) throw *config_error;

  result.summary = summarize(config, problem.dimension(), result.runs);
  std::ostringstream summary;
  write_summary_csv(summary, result.summary, summary_criteria(config.algorithm), summary_extras(config.algorithm));
  result.summary_file = out_dir / "summary.csv";
  write_file_atomic(result.summary_file, summary.str());

  json manifest{{"schema_version", kConfigSchemaVersion},
                {"trace_schema_version", kTraceSchemaVersion},
                {"algorithm", to_string(config.algorithm)},
                {"problem", config.problem},
                {"schedule", config.schedule},
                {"verify", verify},
                {"runs", json::array()}};
  if (config.constraint) manifest["constraint"] = *config.constraint;
  for (const RunOutcome& run : result.runs) manifest["runs"].push_back(outcome_json(run));
  result.manifest_file = out_dir / "manifest.json";
  write_file_atomic(result.manifest_file, manifest.dump(2) + "\n");
  return result;
}

}  // namespace zo

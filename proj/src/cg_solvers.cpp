#include "zo/cg_solvers.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "trajectory.hpp"
#include "zo/errors.hpp"
#include "zo/estimators.hpp"

namespace zo {

namespace {

long ceil_count(double value) {
  if (!std::isfinite(value) || value > 9e15)
    throw ContractViolation(fmt::format("batch size {} is not representable", value));
  return std::max(1L, static_cast<long>(std::ceil(value)));
}

void require_positive_N(long N) { require(N >= 1, fmt::format("iteration limit N must be >= 1, got {}", N)); }

long draw_index(Rng& rng, const std::vector<double>& weights, long first) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return first + static_cast<long>(i);
  }
  return first + static_cast<long>(weights.size()) - 1;
}

Vector start_point(const ConstraintSet<double>& set, const ProblemSpec& problem, const RunOptions& options) {
  const Index d = problem.dimension();
  Vector x0 = options.x0 ? *options.x0 : default_start(set, d);
  require(x0.size() == d, fmt::format("x0 has dimension {}, problem has {}", x0.size(), d));
  require(set.contains(x0, 1e-9), "x0 must lie in the feasible set");
  return x0;
}

// Reference-based criteria for the constrained solvers.
class CgVerifier {
 public:
  CgVerifier(const ProblemSpec& problem, const ConstraintSet<double>& set, const RunOptions& options)
      : problem_(problem), set_(set), on_(options.verify) {
    if (on_) f_star_ = options.f_star ? options.f_star : constrained_optimum(problem, set);
  }

  void fill(TraceRow& row, const Vector& x, double gamma) const {
    row.x_norm = x.norm();
    if (!on_) return;
    const Vector g = problem_.reference_gradient(x);
    row.fw_gap = g.dot(x - lmo(set_, g));
    row.gp_norm = (gamma * (x - prox_exact(set_, x, g, gamma))).norm();
    if (f_star_) row.f_gap = problem_.value(x) - *f_star_;
  }

 private:
  const ProblemSpec& problem_;
  const ConstraintSet<double>& set_;
  bool on_;
  std::optional<double> f_star_;
};

double reference_gamma(const ProblemSpec& problem) {
  return problem.lipschitz_grad() > 0 ? 2.0 * problem.lipschitz_grad() : 1.0;
}

RunRecord new_record(const std::string& algorithm, const RunOptions& options, long N, nlohmann::json echo) {
  RunRecord record;
  record.algorithm = algorithm;
  record.schema = TraceSchema::conditional_gradient;
  record.seed = options.seed;
  record.N = N;
  record.schedule = std::move(echo);
  return record;
}

IcgResult<double> icg_step(const ConstraintSet<double>& set, const Vector& x, const Vector& g,
                           const IcgParams<double>& params, long k) {
  try {
    return icg(set, x, g, params);
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded(fmt::format("iteration {}: {}", k, e.what()), e.best(), e.final_value(),
                         e.iterations());
  }
}

}  // namespace

std::string to_string(ScheduleMode mode) { return mode == ScheduleMode::paper ? "paper" : "practical"; }

// ---------------------------------------------------------------------------
// Schedules

ZscgSchedule ZscgSchedule::paper_nonconvex(long N, Index d, double B_Lsigma) {
  require_positive_N(N);
  require(B_Lsigma >= 1.0, "B_Lsigma must be >= 1");
  const double dd = static_cast<double>(d);
  ZscgSchedule s;
  s.convex = false;
  s.mode = ScheduleMode::paper;
  s.N = N;
  s.B_Lsigma = B_Lsigma;
  s.nu = std::sqrt(2.0 * B_Lsigma / (static_cast<double>(N) * std::pow(dd + 3.0, 3)));
  s.alpha.assign(static_cast<std::size_t>(N), 1.0 / std::sqrt(static_cast<double>(N)));
  s.m.assign(static_cast<std::size_t>(N), ceil_count(2.0 * B_Lsigma * (dd + 5.0) * static_cast<double>(N)));
  return s;
}

ZscgSchedule ZscgSchedule::paper_convex(long N, Index d, double B_Lsigma) {
  require_positive_N(N);
  require(B_Lsigma >= 1.0, "B_Lsigma must be >= 1");
  const double dd = static_cast<double>(d);
  const double n = static_cast<double>(N);
  ZscgSchedule s;
  s.convex = true;
  s.mode = ScheduleMode::paper;
  s.N = N;
  s.B_Lsigma = B_Lsigma;
  s.nu = std::sqrt(2.0 * B_Lsigma / (n * n * std::pow(dd + 3.0, 3)));
  for (long k = 1; k <= N; ++k) s.alpha.push_back(6.0 / (static_cast<double>(k) + 5.0));
  s.m.assign(static_cast<std::size_t>(N), ceil_count(2.0 * B_Lsigma * (dd + 5.0) * n * n));
  return s;
}

ZscgSchedule ZscgSchedule::practical(bool convex, long N, double nu, long m) {
  require_positive_N(N);
  ZscgSchedule s;
  s.convex = convex;
  s.mode = ScheduleMode::practical;
  s.N = N;
  s.nu = nu;
  for (long k = 1; k <= N; ++k)
    s.alpha.push_back(convex ? 6.0 / (static_cast<double>(k) + 5.0) : 1.0 / std::sqrt(static_cast<double>(N)));
  s.m.assign(static_cast<std::size_t>(N), m);
  return s;
}

void ZscgSchedule::validate() const {
  require_positive_N(N);
  require(nu > 0 && std::isfinite(nu), "zscg: nu must be positive");
  require(alpha.size() == static_cast<std::size_t>(N) && m.size() == static_cast<std::size_t>(N),
          "zscg: schedule sequences must have length N");
  for (double a : alpha) require(a > 0 && a <= 1, "zscg: alpha_k must lie in (0, 1]");
  for (long mk : m) require(mk >= 1, "zscg: m_k must be >= 1");
}

std::vector<double> ZscgSchedule::output_weights() const {
  if (convex) return gamma_output_weights(alpha);
  return std::vector<double>(static_cast<std::size_t>(N), 1.0 / static_cast<double>(N));
}

nlohmann::json ZscgSchedule::echo() const {
  return {{"variant", convex ? "convex" : "nonconvex"},
          {"mode", to_string(mode)},
          {"N", N},
          {"nu", nu},
          {"alpha_1", alpha.front()},
          {"m_1", m.front()},
          {"B_Lsigma", std::isnan(B_Lsigma) ? nlohmann::json(nullptr) : nlohmann::json(B_Lsigma)},
          {"output", convex ? "gamma_weighted" : "uniform_1_N"}};
}

std::vector<double> gamma_products(const std::vector<double>& alpha) {
  std::vector<double> gamma{1.0};
  for (double a : alpha) gamma.push_back(gamma.back() * (1.0 - a / 2.0));
  return gamma;
}

std::vector<double> gamma_output_weights(const std::vector<double>& alpha) {
  const auto gamma = gamma_products(alpha);
  const double gN = gamma.back();
  std::vector<double> w;
  for (std::size_t k = 1; k < gamma.size(); ++k)
    w.push_back(alpha[k - 1] * gN / (2.0 * gamma[k] * (1.0 - gN)));
  return w;
}

AcceleratedSchedule AcceleratedSchedule::paper(long N, Index d, double L, double D_X0, double B_Lsigma) {
  require_positive_N(N);
  require(L > 0 && D_X0 > 0, "accelerated schedule needs L > 0 and D_X0 > 0");
  require(B_Lsigma >= 1.0, "B_Lsigma must be >= 1");
  const double dd = static_cast<double>(d);
  const double n = static_cast<double>(N);
  AcceleratedSchedule s;
  s.mode = ScheduleMode::paper;
  s.N = N;
  s.L = L;
  s.D_X0 = D_X0;
  s.B_Lsigma = B_Lsigma;
  s.nu = (1.0 / std::sqrt(2.0 * n)) * std::max(1.0 / (dd + 3.0), std::sqrt(D_X0 / (dd * (n + 1.0))));
  const double batch = std::max((dd + 5.0) * B_Lsigma * n, dd + 3.0);
  for (long k = 1; k <= N; ++k) {
    const double kk = static_cast<double>(k);
    s.alpha.push_back(2.0 / (kk + 1.0));
    s.gamma.push_back(4.0 * L / kk);
    s.mu.push_back(L * D_X0 / (kk * n));
    s.m.push_back(ceil_count(kk * (kk + 1.0) / D_X0 * batch));
  }
  return s;
}

AcceleratedSchedule AcceleratedSchedule::practical(long N, double L, double D_X0, double nu, long m0) {
  require_positive_N(N);
  require(L > 0 && D_X0 > 0, "accelerated schedule needs L > 0 and D_X0 > 0");
  require(m0 >= 1, "accelerated: m0 must be >= 1");
  const double n = static_cast<double>(N);
  AcceleratedSchedule s;
  s.mode = ScheduleMode::practical;
  s.N = N;
  s.L = L;
  s.D_X0 = D_X0;
  s.nu = nu;
  for (long k = 1; k <= N; ++k) {
    const double kk = static_cast<double>(k);
    s.alpha.push_back(2.0 / (kk + 1.0));
    s.gamma.push_back(4.0 * L / kk);
    s.mu.push_back(L * D_X0 / (kk * n));
    s.m.push_back(ceil_count(static_cast<double>(m0) * kk * (kk + 1.0) / 2.0));
  }
  return s;
}

void AcceleratedSchedule::validate() const {
  require_positive_N(N);
  require(nu > 0 && std::isfinite(nu), "accelerated: nu must be positive");
  const auto n = static_cast<std::size_t>(N);
  require(alpha.size() == n && gamma.size() == n && mu.size() == n && m.size() == n,
          "accelerated: schedule sequences must have length N");
  for (std::size_t i = 0; i < n; ++i) {
    require(alpha[i] > 0 && alpha[i] <= 1, "accelerated: alpha_k must lie in (0, 1]");
    require(gamma[i] > 0, "accelerated: gamma_k must be positive");
    require(mu[i] >= 0, "accelerated: mu_k must be nonnegative");
    require(m[i] >= 1, "accelerated: m_k must be >= 1");
  }
}

nlohmann::json AcceleratedSchedule::echo() const {
  return {{"mode", to_string(mode)}, {"N", N},      {"nu", nu},
          {"L", L},                  {"D_X0", D_X0}, {"B_Lsigma", std::isnan(B_Lsigma) ? nlohmann::json(nullptr) : nlohmann::json(B_Lsigma)},
          {"m_1", m.front()},        {"m_N", m.back()}, {"output", "last"}};
}

InexactSchedule InexactSchedule::paper(long N, Index d, double L) {
  require_positive_N(N);
  require(L > 0, "inexact schedule needs L > 0");
  const double dd = static_cast<double>(d);
  const double n = static_cast<double>(N);
  InexactSchedule s;
  s.mode = ScheduleMode::paper;
  s.N = N;
  s.nu = std::sqrt(1.0 / (2.0 * n * std::pow(dd + 3.0, 3)));
  s.gamma = 2.0 * L;
  s.mu = 1.0 / (4.0 * n);
  s.m = ceil_count(6.0 * (dd + 5.0) * n);
  return s;
}

InexactSchedule InexactSchedule::practical(long N, double L, double nu, long m) {
  require_positive_N(N);
  require(L > 0, "inexact schedule needs L > 0");
  InexactSchedule s;
  s.mode = ScheduleMode::practical;
  s.N = N;
  s.nu = nu;
  s.gamma = 2.0 * L;
  s.mu = 1.0 / (4.0 * static_cast<double>(N));
  s.m = m;
  return s;
}

void InexactSchedule::validate() const {
  require_positive_N(N);
  require(nu > 0 && std::isfinite(nu), "inexact: nu must be positive");
  require(gamma > 0, "inexact: gamma must be positive");
  require(mu >= 0, "inexact: mu must be nonnegative");
  require(m >= 1, "inexact: m must be >= 1");
}

nlohmann::json InexactSchedule::echo() const {
  return {{"mode", to_string(mode)}, {"N", N}, {"nu", nu}, {"gamma", gamma},
          {"mu", mu},                {"m", m}, {"output", "uniform_0_Nm1"}};
}

// ---------------------------------------------------------------------------
// Reference constants

Vector default_start(const ConstraintSet<double>& set, Index d) {
  return project(set, Vector::Zero(d));
}

std::optional<Vector> constrained_minimizer(const ProblemSpec& problem, const ConstraintSet<double>& set) {
  const Index d = problem.dimension();
  if (problem.minimizer() && set.contains(*problem.minimizer(), 1e-12)) return *problem.minimizer();
  if (!problem.convex()) return std::nullopt;
  const double L = problem.lipschitz_grad();
  if (L <= 0) return lmo(set, problem.reference_gradient(Vector::Zero(d)));
  // Accelerated projected gradient with adaptive restart.
  Vector x = default_start(set, d);
  Vector y = x;
  double t = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Vector next = project(set, y - problem.reference_gradient(y) / L);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Vector step = next - x;
    if ((y - next).dot(step) > 0) {
      t = 1.0;
      y = next;
    } else {
      y = next + ((t - 1.0) / t_next) * step;
      t = t_next;
    }
    x = next;
    if (step.norm() <= 1e-15 * std::max(1.0, x.norm())) break;
  }
  return x;
}

std::optional<double> constrained_optimum(const ProblemSpec& problem, const ConstraintSet<double>& set) {
  if (problem.minimizer() && problem.optimum_value() && set.contains(*problem.minimizer(), 1e-12))
    return problem.optimum_value();
  const auto xs = constrained_minimizer(problem, set);
  if (!xs) return std::nullopt;
  return problem.value(*xs);
}

double default_B_Lsigma(const ProblemSpec& problem, const ConstraintSet<double>& set, const Vector& x0,
                        double sigma) {
  const double L = problem.lipschitz_grad();
  require(L > 0, "B_Lsigma default needs L > 0; supply B_Lsigma explicitly");
  const auto xs = constrained_minimizer(problem, set);
  const Vector& anchor = xs ? *xs : x0;
  const double B = L * set.diameter(problem.dimension()) + problem.reference_gradient(anchor).norm();
  return std::max(std::sqrt(B * B + sigma * sigma) / L, 1.0);
}

// ---------------------------------------------------------------------------
// Solvers

SolverResult zscg(const ProblemSpec& problem, const ConstraintSet<double>& set,
                  const ZscgSchedule& schedule, const RunOptions& options) {
  schedule.validate();
  const long N = schedule.N;
  Vector z = start_point(set, problem, options);
  const Rng base(options.seed);
  Rng rng = base.split(streams::kIterations);
  Rng pick = base.split(streams::kOutputIndex);
  const auto weights = schedule.output_weights();
  const long R = draw_index(pick, weights, 1);

  RunRecord record = new_record(schedule.convex ? "zscg_convex" : "zscg", options, N, schedule.echo());
  ZeroOrderOracle oracle(problem);
  const CgVerifier verifier(problem, set, options);
  const double gamma_ref = reference_gamma(problem);
  detail::Trajectory traj(N, options);
  verifier.fill(traj.row(0), z, gamma_ref);
  traj.keep_iterate(z, record);

  Vector output;
  const SmoothingParams smoothing{schedule.nu};
  for (long k = 1; k <= N; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const double alpha = schedule.alpha[i];
    const Vector g = grad_averaged(oracle, z, smoothing, schedule.m[i], rng).vector;
    const Vector vertex = lmo(set, g);
    ++record.lmo_calls;
    z = (1.0 - alpha) * z + alpha * vertex;
    if (k == R) output = z;
    record.steps.push_back({k, alpha, kNaN, kNaN, schedule.nu, schedule.m[i], 0});
    TraceRow& row = traj.row(k);
    row.calls = oracle.calls();
    row.lmo_calls = record.lmo_calls;
    verifier.fill(row, z, gamma_ref);
    traj.keep_estimate(g, record);
    traj.keep_iterate(z, record);
  }
  record.total_calls = record.gradient_calls = oracle.calls();

  // The gap bound is stated at the iterate preceding the sampled index.
  std::vector<std::pair<long, double>> gap_weights;
  for (long k = 1; k <= N; ++k) gap_weights.emplace_back(k - 1, weights[static_cast<std::size_t>(k - 1)]);
  traj.finish(record, R, gap_weights, {"fw_gap", "gp_norm", "f_gap"});
  record.expected_criteria["fw_gap_last"] = options.verify ? traj.row(N).fw_gap : kNaN;
  record.expected_criteria["f_gap_last"] = options.verify ? traj.row(N).f_gap : kNaN;
  return {std::move(output), std::move(record)};
}

SolverResult zscg_accelerated(const ProblemSpec& problem, const ConstraintSet<double>& set,
                              const AcceleratedSchedule& schedule, const RunOptions& options) {
  schedule.validate();
  const long N = schedule.N;
  Vector x = start_point(set, problem, options);
  Vector z = x;
  const Rng base(options.seed);
  Rng rng = base.split(streams::kIterations);

  RunRecord record = new_record("zscg_accelerated", options, N, schedule.echo());
  ZeroOrderOracle oracle(problem);
  const CgVerifier verifier(problem, set, options);
  const double gamma_ref = reference_gamma(problem);
  detail::Trajectory traj(N, options);
  verifier.fill(traj.row(0), z, gamma_ref);
  traj.keep_iterate(z, record);

  const SmoothingParams smoothing{schedule.nu};
  for (long k = 1; k <= N; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const double alpha = schedule.alpha[i];
    const Vector w = (1.0 - alpha) * z + alpha * x;
    const Vector g = grad_averaged(oracle, w, smoothing, schedule.m[i], rng).vector;
    const auto step = icg_step(set, x, g, {schedule.gamma[i], schedule.mu[i], schedule.icg_max_iters}, k);
    x = step.point;
    record.lmo_calls += step.lmo_calls;
    z = (1.0 - alpha) * z + alpha * x;
    record.steps.push_back({k, alpha, schedule.gamma[i], schedule.mu[i], schedule.nu, schedule.m[i], 0});
    TraceRow& row = traj.row(k);
    row.calls = oracle.calls();
    row.lmo_calls = record.lmo_calls;
    verifier.fill(row, z, gamma_ref);
    traj.keep_estimate(g, record);
    traj.keep_iterate(z, record);
  }
  record.total_calls = record.gradient_calls = oracle.calls();
  traj.finish(record, N, {{N, 1.0}}, {"fw_gap", "gp_norm", "f_gap"});
  return {std::move(z), std::move(record)};
}

SolverResult zsgd_inexact_nonconvex(const ProblemSpec& problem, const ConstraintSet<double>& set,
                                    const InexactSchedule& schedule, const RunOptions& options) {
  schedule.validate();
  const long N = schedule.N;
  Vector x = start_point(set, problem, options);
  const Rng base(options.seed);
  Rng rng = base.split(streams::kIterations);
  Rng pick = base.split(streams::kOutputIndex);
  const long R = pick.uniform_int(0, N - 1);

  RunRecord record = new_record("zsgd_inexact", options, N, schedule.echo());
  ZeroOrderOracle oracle(problem);
  const CgVerifier verifier(problem, set, options);
  detail::Trajectory traj(N, options);
  verifier.fill(traj.row(0), x, schedule.gamma);
  traj.keep_iterate(x, record);

  Vector output = x;
  const SmoothingParams smoothing{schedule.nu};
  const IcgParams<double> prox{schedule.gamma, schedule.mu, schedule.icg_max_iters};
  for (long k = 1; k <= N; ++k) {
    const Vector g = grad_averaged(oracle, x, smoothing, schedule.m, rng).vector;
    const auto step = icg_step(set, x, g, prox, k);
    x = step.point;
    if (k == R) output = x;
    record.lmo_calls += step.lmo_calls;
    record.steps.push_back({k, kNaN, schedule.gamma, schedule.mu, schedule.nu, schedule.m, 0});
    TraceRow& row = traj.row(k);
    row.calls = oracle.calls();
    row.lmo_calls = record.lmo_calls;
    verifier.fill(row, x, schedule.gamma);
    traj.keep_estimate(g, record);
    traj.keep_iterate(x, record);
  }
  record.total_calls = record.gradient_calls = oracle.calls();
  traj.finish(record, R, detail::uniform_weights(0, N - 1), {"gp_norm", "gp_norm_sq", "fw_gap", "f_gap"});
  return {std::move(output), std::move(record)};
}

}  // namespace zo

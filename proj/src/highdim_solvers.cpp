#include "zo/highdim_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "trajectory.hpp"
#include "zo/errors.hpp"
#include "zo/estimators.hpp"

namespace zo {

namespace {

double log_dim(Index d) {
  require(d >= 2, fmt::format("the high-dimensional step rules need d >= 2, got {}", d));
  return std::log(static_cast<double>(d));
}

void require_constants(long N, double L, long s_hat, double D0, double sigma, double C_hat) {
  require(N >= 1, fmt::format("iteration limit N must be >= 1, got {}", N));
  require(L > 0, "L must be positive");
  require(s_hat >= 1, "s_hat must be >= 1");
  require(D0 > 0, "D0 must be positive");
  require(sigma > 0, "sigma must be positive");
  require(C_hat > 0, "C_hat must be positive");
}

long count_nonzeros(const Vector& x) { return static_cast<long>((x.array() != 0.0).count()); }

class HighDimVerifier {
 public:
  HighDimVerifier(const ProblemSpec& problem, const RunOptions& options) : problem_(problem), on_(options.verify) {
    if (!on_) return;
    if (options.f_star) f_star_ = *options.f_star;
    else if (problem.optimum_value()) f_star_ = *problem.optimum_value();
  }

  void fill(TraceRow& row, const Vector& x) const {
    row.x_norm = x.norm();
    row.nnz = count_nonzeros(x);
    if (!on_) return;
    const double l1 = problem_.reference_gradient(x).lpNorm<1>();
    row.grad_l1_sq = l1 * l1;
    row.f_gap = problem_.value(x) - f_star_;
  }

  void fill_average(TraceRow& row, const Vector& mean) const {
    if (on_) row.avg_f_gap = problem_.value(mean) - f_star_;
  }

  bool on() const { return on_; }

 private:
  const ProblemSpec& problem_;
  bool on_;
  // NaN when the optimum is unknown, which propagates into the gap columns.
  double f_star_ = kNaN;
};

// Shared iteration of both methods. truncate: apply P_s after each step.
SolverResult run(const ProblemSpec& problem, const HighDimSchedule& schedule, const RunOptions& options,
                 bool truncate) {
  const Index d = problem.dimension();
  schedule.validate(d);
  Vector x = options.x0 ? *options.x0 : Vector::Zero(d);
  require(x.size() == d, fmt::format("x0 has dimension {}, problem has {}", x.size(), d));
  if (truncate) x = truncate_top_s(x, schedule.s_hat);

  RunRecord record;
  record.algorithm = truncate ? "zsgd_truncated" : "zsgd";
  record.schema = TraceSchema::high_dimensional;
  record.seed = options.seed;
  record.N = schedule.N;
  record.schedule = schedule.echo();

  const long N = schedule.N;
  Rng root(options.seed);
  Rng rng = root.split(streams::kIterations);
  Rng output_rng = root.split(streams::kOutputIndex);
  ZeroOrderOracle oracle(problem);
  const SmoothingParams params{schedule.nu, NormMode::linf};
  const HighDimVerifier verifier(problem, options);
  detail::Trajectory traj(N, options);

  // Running sum of x_0..x_{k-1}; the avg_f_gap column of row k uses it.
  Vector sum = Vector::Zero(d);
  const auto points = trace_points(N);
  std::size_t next_point = 0;
  auto record_average = [&](long k) {
    while (next_point < points.size() && points[next_point] < k) ++next_point;
    if (truncate && k >= 1 && next_point < points.size() && points[next_point] == k)
      verifier.fill_average(traj.row(k), sum / static_cast<double>(k));
  };

  // Only the output x_R is needed, so the draw happens up front from its own stream.
  const long R = truncate ? N : output_rng.uniform_int(0, N - 1);
  Vector x_R;

  verifier.fill(traj.row(0), x);
  traj.keep_iterate(x, record);
  for (long k = 1; k <= N; ++k) {
    if (k - 1 == R) x_R = x;
    sum += x;
    const auto est = grad_two_point(oracle, x, params, rng);
    traj.keep_estimate(est.vector, record);
    x.noalias() -= schedule.gamma * est.vector;
    if (truncate) x = truncate_top_s(x, schedule.s_hat);

    record.steps.push_back({k, kNaN, schedule.gamma, kNaN, schedule.nu, 1, 0});
    TraceRow& row = traj.row(k);
    row.calls = oracle.calls();
    const double inf_norm = x.lpNorm<Eigen::Infinity>();
    if (!(inf_norm <= kDivergenceThreshold)) {
      row.x_norm = x.norm();
      record.total_calls = oracle.calls();
      throw DivergenceError(
          fmt::format("{} diverged at iteration {}: ||x||_inf = {:.6g} exceeds {:.0e}", record.algorithm, k,
                      inf_norm, kDivergenceThreshold),
          k, inf_norm, trace_csv(traj.partial(record, k)));
    }
    verifier.fill(row, x);
    record_average(k);
    traj.keep_iterate(x, record);
  }

  record.total_calls = oracle.calls();
  record.gradient_calls = oracle.calls();
  const std::vector<std::string> criteria{"grad_l1_sq", "f_gap", "avg_f_gap", "nnz"};
  if (!truncate) {
    traj.finish(record, R, detail::uniform_weights(0, N - 1), criteria);
    return {x_R, std::move(record)};
  }
  Vector mean = sum / static_cast<double>(N);
  TraceRow out = traj.row(N);
  out.avg_f_gap = kNaN;
  verifier.fill(out, mean);
  verifier.fill_average(out, mean);
  traj.finish(record, N, out, {}, criteria);
  return {std::move(mean), std::move(record)};
}

}  // namespace

std::string to_string(HighDimMode mode) {
  return mode == HighDimMode::nonconvex ? "nonconvex" : "convex_truncated";
}

HighDimSchedule HighDimSchedule::paper_nonconvex(long N, Index d, double L, long s_hat, double D0, double sigma,
                                                 double C_hat) {
  require_constants(N, L, s_hat, D0, sigma, C_hat);
  const double logd = log_dim(d);
  const double n = static_cast<double>(N);
  const double s = static_cast<double>(s_hat);
  HighDimSchedule h;
  h.mode = HighDimMode::nonconvex;
  h.schedule_mode = ScheduleMode::paper;
  h.N = N;
  h.s_hat = s_hat;
  h.C_hat = C_hat;
  h.D0 = D0;
  h.sigma = sigma;
  h.L = L;
  h.gamma = (1.0 / (2.0 * L * C_hat * logd)) *
            std::min(1.0 / (12.0 * s * logd), std::sqrt(D0 * L * C_hat / (2.0 * n * sigma * sigma)));
  h.nu = (1.0 / std::sqrt(L * C_hat * logd)) * std::min(std::sqrt(2.0 * sigma * sigma / L), std::sqrt(D0 / n));
  return h;
}

HighDimSchedule HighDimSchedule::paper_truncated(long N, Index d, double L, long s_hat, double D0, double sigma,
                                                 double C_hat) {
  require_constants(N, L, s_hat, D0, sigma, C_hat);
  const double logd = log_dim(d);
  const double n = static_cast<double>(N);
  const double s = static_cast<double>(s_hat);
  HighDimSchedule h;
  h.mode = HighDimMode::convex_truncated;
  h.schedule_mode = ScheduleMode::paper;
  h.N = N;
  h.s_hat = s_hat;
  h.C_hat = C_hat;
  h.D0 = D0;
  h.sigma = sigma;
  h.L = L;
  h.gamma = (1.0 / (4.0 * C_hat * s * logd)) *
            std::min(1.0 / (12.0 * L * s * logd), std::sqrt(D0 * C_hat * s / (3.0 * n * sigma * sigma)));
  h.nu = std::sqrt(logd) * std::min(sigma / logd, std::sqrt(s * s * D0 / n));
  return h;
}

HighDimSchedule HighDimSchedule::practical(HighDimMode mode, long N, double gamma, double nu, long s_hat) {
  HighDimSchedule h;
  h.mode = mode;
  h.schedule_mode = ScheduleMode::practical;
  h.N = N;
  h.gamma = gamma;
  h.nu = nu;
  h.s_hat = s_hat;
  return h;
}

HighDimSchedule HighDimSchedule::practical_sqrt_n(HighDimMode mode, long N, double gamma0, double nu,
                                                  long s_hat) {
  require(N >= 1, fmt::format("iteration limit N must be >= 1, got {}", N));
  return practical(mode, N, gamma0 / std::sqrt(static_cast<double>(N)), nu, s_hat);
}

void HighDimSchedule::validate(Index d) const {
  require(N >= 1, fmt::format("iteration limit N must be >= 1, got {}", N));
  require(gamma >= 0 && std::isfinite(gamma), "step size gamma must be finite and >= 0");
  require(nu > 0 && std::isfinite(nu), "smoothing radius nu must be positive");
  require(s_hat >= 1 && s_hat <= d, fmt::format("s_hat must lie in [1, {}], got {}", d, s_hat));
}

nlohmann::json HighDimSchedule::echo() const {
  auto number = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"variant", to_string(mode)}, {"mode", to_string(schedule_mode)}, {"N", N},
          {"gamma", gamma},            {"nu", nu},                          {"s_hat", s_hat},
          {"C_hat", C_hat},            {"D0", number(D0)},                  {"sigma", number(sigma)},
          {"L", number(L)},
          {"output", mode == HighDimMode::nonconvex ? "uniform_0_N-1" : "average_0_N-1"}};
}

Vector truncate_top_s(const Vector& y, long s_hat) {
  const Index d = y.size();
  require(s_hat >= 1 && s_hat <= d, fmt::format("s_hat must lie in [1, {}], got {}", d, s_hat));
  if (s_hat == d) return y;
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  const auto larger = [&](Index a, Index b) {
    const double ya = std::abs(y[a]), yb = std::abs(y[b]);
    return ya > yb || (ya == yb && a < b);
  };
  std::nth_element(order.begin(), order.begin() + s_hat, order.end(), larger);
  Vector out = Vector::Zero(d);
  for (long i = 0; i < s_hat; ++i) {
    const Index j = order[static_cast<std::size_t>(i)];
    out[j] = y[j];
  }
  return out;
}

SolverResult zsgd(const ProblemSpec& problem, const HighDimSchedule& schedule, const RunOptions& options) {
  return run(problem, schedule, options, false);
}

SolverResult zsgd_truncated(const ProblemSpec& problem, const HighDimSchedule& schedule,
                            const RunOptions& options) {
  return run(problem, schedule, options, true);
}

}  // namespace zo

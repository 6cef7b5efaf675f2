#include "zo/cubic_solver.hpp"

#include <Eigen/Eigenvalues>

#include "trajectory.hpp"

namespace zo {

namespace {

long rounded_count(double value, const char* what) {
  if (!std::isfinite(value) || value > 9e15)
    throw ContractViolation(fmt::format("{} = {:.3e} is not representable as a batch size", what, value));
  return std::max(1L, static_cast<long>(std::ceil(value)));
}

class CubicVerifier {
 public:
  CubicVerifier(const ProblemSpec& problem, const RunOptions& options) : problem_(problem), on_(options.verify) {
    if (!on_) return;
    if (options.f_star) f_star_ = *options.f_star;
    else if (problem.optimum_value()) f_star_ = *problem.optimum_value();
  }

  void fill(TraceRow& row, const Vector& x) const {
    row.x_norm = x.norm();
    if (!on_) return;
    row.f_gap = problem_.value(x) - f_star_;
    row.grad_norm = problem_.reference_gradient(x).norm();
    try {
      row.lambda_min = second_order_criterion(problem_, x).lambda_min;
    } catch (const NotAvailable&) {
      row.lambda_min = kNaN;
    }
  }

 private:
  const ProblemSpec& problem_;
  bool on_;
  double f_star_ = kNaN;
};

}  // namespace

CubicParams CubicParams::paper(double eps, Index d, double L, double L_H, double gap0, double B, double sigma) {
  require(eps > 0 && L > 0 && L_H > 0, "cubic theoretical schedule needs eps, L, L_H > 0");
  require(gap0 > 0, "cubic theoretical schedule needs f(x0) - f* > 0");
  const double dd = static_cast<double>(d);
  CubicParams p;
  p.mode = ScheduleMode::paper;
  p.eps = eps;
  p.nu = 0.5 * std::min(std::sqrt(L_H * eps / (36.0 * std::pow(dd + 16.0, 5))), eps / (L * std::pow(dd + 3.0, 1.5)));
  p.N = rounded_count(12.0 * std::sqrt(L_H) * gap0 / std::pow(eps, 1.5), "N");
  const long b = rounded_count(
      2.0 * L * L / L_H * std::pow(4.0 * (dd + 16.0) * (dd + 16.0), 4) * std::cbrt(1.0 + 2.0 * std::log(2.0 * dd)) / eps,
      "b_k");
  const long m = rounded_count(26.0 * (dd + 5.0) * (B * B + sigma * sigma) / (eps * eps), "m_k");
  p.alpha.assign(static_cast<std::size_t>(p.N), L_H);
  p.b.assign(static_cast<std::size_t>(p.N), b);
  p.m.assign(static_cast<std::size_t>(p.N), m);
  p.subsolver.eps = eps;
  return p;
}

CubicParams CubicParams::practical(long N, double alpha, double nu, long m, long b, double eps) {
  require(N >= 1, fmt::format("iteration limit N must be >= 1, got {}", N));
  CubicParams p;
  p.mode = ScheduleMode::practical;
  p.N = N;
  p.nu = nu;
  p.eps = eps;
  p.alpha.assign(static_cast<std::size_t>(N), alpha);
  p.m.assign(static_cast<std::size_t>(N), m);
  p.b.assign(static_cast<std::size_t>(N), b);
  p.subsolver.eps = eps;
  return p;
}

void CubicParams::validate() const {
  require(N >= 1, fmt::format("iteration limit N must be >= 1, got {}", N));
  require(nu > 0 && std::isfinite(nu), "zscrn: nu must be positive");
  const auto n = static_cast<std::size_t>(N);
  require(alpha.size() == n && m.size() == n && b.size() == n, "zscrn: schedule sequences must have length N");
  for (double a : alpha) require(a > 0 && std::isfinite(a), "zscrn: alpha_k must be positive");
  for (long v : m) require(v >= 1, "zscrn: m_k must be >= 1");
  for (long v : b) require(v >= 1, "zscrn: b_k must be >= 1");
  require(eps > 0, "zscrn: eps must be positive");
}

nlohmann::json CubicParams::echo() const {
  const char* scheme_name = scheme == HessianScheme::three_point ? "three_point"
                            : scheme == HessianScheme::two_point ? "two_point"
                                                                 : "one_point";
  return {{"mode", to_string(mode)},
          {"N", N},
          {"nu", nu},
          {"alpha_1", alpha.front()},
          {"m_1", m.front()},
          {"b_1", b.front()},
          {"eps", eps},
          {"hessian_scheme", scheme_name},
          {"subsolver",
           {{"tol", std::isfinite(subsolver.tolerance) ? nlohmann::json(subsolver.tolerance) : nlohmann::json("auto")},
            {"max_iters", subsolver.max_iters}}},
          {"output", "uniform_1_N"}};
}

SecondOrderReport second_order_criterion(const ProblemSpec& problem, const Vector& x) {
  SecondOrderReport report;
  report.grad_norm = problem.reference_gradient(x).norm();
  const Matrix H = problem.reference_hessian(x);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  report.lambda_min = eig.eigenvalues().minCoeff();
  report.lambda_max = eig.eigenvalues().maxCoeff();
  return report;
}

LocalOptimality local_optimality(const SecondOrderReport& report, double eps, double L_H) {
  require(eps > 0 && L_H >= 0, "local optimality needs eps > 0 and L_H >= 0");
  LocalOptimality out;
  const double root_grad = std::sqrt(report.grad_norm);
  const double curvature_term =
      report.lambda_max > 0 ? -report.lambda_min / std::sqrt(report.lambda_max) : (report.lambda_min < 0 ? INFINITY : 0.0);
  out.by_curvature = std::max(root_grad, curvature_term);
  // A quadratic has L_H = 0; negative curvature then fails the test outright.
  const double lipschitz_term =
      L_H > 0 ? -5.0 * report.lambda_min / (8.0 * std::sqrt(L_H)) : (report.lambda_min < 0 ? INFINITY : 0.0);
  out.by_lipschitz = std::max(root_grad, lipschitz_term);
  out.by_curvature_ok = out.by_curvature <= std::sqrt(eps);
  out.by_lipschitz_ok = out.by_lipschitz <= 5.0 * std::sqrt(eps);
  out.disagree = out.by_curvature_ok != out.by_lipschitz_ok;
  return out;
}

CubicSolverResult zscrn(const ProblemSpec& problem, const CubicParams& params, const RunOptions& options) {
  params.validate();
  const Index d = problem.dimension();
  Vector x = options.x0 ? *options.x0 : Vector::Zero(d);
  require(x.size() == d, fmt::format("x0 has dimension {}, problem has {}", x.size(), d));

  CubicSolverResult result;
  RunRecord& record = result.record;
  record.algorithm = "zscrn";
  record.schema = TraceSchema::cubic;
  record.seed = options.seed;
  record.N = params.N;
  record.schedule = params.echo();

  const long N = params.N;
  Rng root(options.seed);
  Rng grad_rng = root.split(streams::kIterations);
  Rng hess_rng = root.split(streams::kHessian);
  Rng sub_rng = root.split(streams::kSubsolver);
  Rng output_rng = root.split(streams::kOutputIndex);
  const long R = output_rng.uniform_int(1, N);

  ZeroOrderOracle grad_oracle(problem);
  ZeroOrderOracle hess_oracle(problem);
  const SmoothingParams smoothing{params.nu};
  const CubicVerifier verifier(problem, options);
  detail::Trajectory traj(N, options);

  verifier.fill(traj.row(0), x);
  traj.keep_iterate(x, record);
  Vector x_R;
  for (long k = 1; k <= N; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    auto grad = grad_averaged(grad_oracle, x, smoothing, params.m[i], grad_rng);
    auto hess = hess_averaged(hess_oracle, x, smoothing, params.b[i], hess_rng, params.scheme);
    traj.keep_estimate(grad.vector, record);
    const CubicModel<StructuredHessian<double>> model{std::move(grad.vector), std::move(hess), params.alpha[i]};
    SubproblemSolution step;
    try {
      step = solve_cubic_subproblem(model, params.subsolver, sub_rng);
    } catch (const BudgetExceeded& e) {
      throw BudgetExceeded(fmt::format("zscrn iteration {}: {}", k, e.what()), e.best(), e.final_value(),
                           e.iterations());
    }
    x += step.s;
    result.certificates.push_back(step.certificate);
    record.steps.push_back({k, params.alpha[i], kNaN, kNaN, params.nu, params.m[i], params.b[i]});

    TraceRow& row = traj.row(k);
    row.calls = grad_oracle.calls() + hess_oracle.calls();
    row.model_decrease = step.certificate.model_value;
    row.subsolver_iters = step.certificate.iterations;
    const double inf_norm = x.lpNorm<Eigen::Infinity>();
    if (!(inf_norm <= 1e8)) {
      row.x_norm = x.norm();
      record.total_calls = row.calls;
      throw DivergenceError(fmt::format("zscrn diverged at iteration {}: ||x||_inf = {:.6g}", k, inf_norm), k,
                            inf_norm, trace_csv(traj.partial(record, k)));
    }
    verifier.fill(row, x);
    traj.keep_iterate(x, record);
    if (k == R) x_R = x;
  }

  record.gradient_calls = grad_oracle.calls();
  record.hessian_calls = hess_oracle.calls();
  record.total_calls = record.gradient_calls + record.hessian_calls;
  traj.finish(record, R, detail::uniform_weights(1, N), {"grad_norm", "lambda_min", "f_gap"});
  result.x = std::move(x_R);
  return result;
}

}  // namespace zo

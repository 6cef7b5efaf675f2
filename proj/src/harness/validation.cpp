#include <cmath>
#include <functional>

#include <fmt/core.h>

#include "zo/estimators.hpp"
#include "zo/harness.hpp"

namespace zo {

namespace {

// Mean of a vector-valued sample with a standard error taken from the
// spread of batch means.
class BatchedMean {
 public:
  BatchedMean(Index dim, long batches) : sum_(Vector::Zero(dim)), batch_means_(batches) {}

  void run(long samples, const std::function<Vector()>& draw) {
    const long per_batch = samples / static_cast<long>(batch_means_.size());
    for (auto& mean : batch_means_) {
      mean = Vector::Zero(sum_.size());
      for (long i = 0; i < per_batch; ++i) mean += draw();
      mean /= static_cast<double>(per_batch);
      sum_ += mean;
    }
  }

  Vector mean() const { return sum_ / static_cast<double>(batch_means_.size()); }

  Vector standard_error() const {
    const Vector m = mean();
    Vector var = Vector::Zero(m.size());
    for (const auto& b : batch_means_) var += (b - m).cwiseAbs2();
    const double k = static_cast<double>(batch_means_.size());
    return (var / (k - 1.0) / k).cwiseSqrt();
  }

 private:
  Vector sum_;
  std::vector<Vector> batch_means_;
};

// Largest |mean - target| in units of the standard error.
double max_z(const BatchedMean& estimate, const Vector& target) {
  const Vector err = (estimate.mean() - target).cwiseAbs();
  const Vector se = estimate.standard_error();
  double z = 0.0;
  for (Index i = 0; i < err.size(); ++i) z = std::max(z, err[i] / std::max(se[i], 1e-15));
  return z;
}

Vector hessian_entries(const StructuredHessian<double>& h) {
  const Index d = h.dim();
  Vector out(d * d);
  for (Index j = 0; j < d; ++j) out.segment(j * d, d) = h.matvec(Vector::Unit(d, j));
  return out;
}

Vector flatten(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

constexpr double kZLimit = 5.0;
constexpr long kBatches = 20;

ValidationCheck gradient_consistency(long scale, Rng rng) {
  // Median error over repeats at each batch size; the slope should be -1/2.
  const Matrix A = Vector::LinSpaced(5, 1.0, 3.0).asDiagonal();
  const ProblemSpec problem = ProblemSpec::quadratic(A, Vector::Constant(5, 0.5));
  const Vector x = Vector::LinSpaced(5, -0.4, 0.4);
  const Vector truth = problem.reference_gradient(x);
  ZeroOrderOracle oracle(problem);
  std::vector<long> ms;
  std::vector<double> errors;
  for (long m = 100; m <= 10 * scale; m *= 10) {
    std::vector<double> runs;
    for (int r = 0; r < 20; ++r) runs.push_back((grad_averaged(oracle, x, {0.01}, m, rng).vector - truth).norm());
    ms.push_back(m);
    errors.push_back(median_of(runs));
  }
  const TrendReport trend = trend_check(ms, errors, -0.6, -0.4);
  return {"gradient Stein consistency (error slope in m)", trend.pass, trend.note};
}

ValidationCheck gradient_bias_saddle(long samples, Rng rng) {
  const ProblemSpec problem = ProblemSpec::strict_saddle_2d();
  const Vector x = (Vector(2) << 0.6, -0.3).finished();
  const double L = problem.lipschitz_grad();
  ZeroOrderOracle oracle(problem);
  bool pass = true;
  std::string detail;
  for (double nu : {0.1, 0.01}) {
    // d/dx E (x + nu u)^4 / 4 = x^3 + 3 x nu^2.
    Vector smoothed = problem.reference_gradient(x);
    smoothed[0] += 3.0 * x[0] * nu * nu;
    const double bias = (smoothed - problem.reference_gradient(x)).norm();
    const double bound = nu / 2.0 * L * std::pow(2.0 + 3.0, 1.5);
    BatchedMean estimate(2, kBatches);
    estimate.run(samples, [&] { return grad_two_point(oracle, x, {nu}, rng).vector; });
    const double z = max_z(estimate, smoothed);
    pass = pass && bias <= bound && z <= kZLimit;
    detail += fmt::format("nu={}: bias {:.3e} <= bound {:.3e}, MC z {:.2f}; ", nu, bias, bound, z);
  }
  return {"gradient smoothing bias on the strict saddle", pass, detail};
}

ValidationCheck hessian_consistency(long samples, Rng rng) {
  Matrix A(3, 3);
  A << 2.0, 0.5, 0.0, 0.5, 1.0, -0.3, 0.0, -0.3, 1.5;
  const ProblemSpec problem = ProblemSpec::quadratic(A, Vector::Zero(3));
  const Vector x = Vector::Constant(3, 0.2);
  ZeroOrderOracle oracle(problem);
  BatchedMean estimate(9, kBatches);
  estimate.run(samples, [&] { return hessian_entries(hess_three_point(oracle, x, {0.1}, rng)); });
  const double z = max_z(estimate, flatten(A));
  return {"Hessian Stein consistency on a quadratic", z <= kZLimit, fmt::format("max z {:.2f}", z)};
}

ValidationCheck hessian_bias_saddle(long samples, Rng rng) {
  const ProblemSpec problem = ProblemSpec::strict_saddle_2d();
  const Vector x = (Vector(2) << 0.4, 0.1).finished();
  const double L_H = problem.lipschitz_hess();
  ZeroOrderOracle oracle(problem);
  bool pass = true;
  std::string detail;
  for (double nu : {0.3, 0.1}) {
    Matrix smoothed = problem.reference_hessian(x);
    smoothed(0, 0) += 3.0 * nu * nu;
    const double gap = 3.0 * nu * nu;
    const double bound = L_H * nu * std::pow(2.0 + 6.0, 2.5) / 4.0;
    BatchedMean estimate(4, kBatches);
    estimate.run(samples, [&] { return hessian_entries(hess_three_point(oracle, x, {nu}, rng)); });
    const double z = max_z(estimate, flatten(smoothed));
    pass = pass && gap <= bound && z <= kZLimit;
    detail += fmt::format("nu={}: gap {:.3e} <= bound {:.3e}, MC z {:.2f}; ", nu, gap, bound, z);
  }
  return {"Hessian smoothing bias on the strict saddle", pass, detail};
}

ValidationCheck linf_moments(long samples, Rng rng) {
  bool pass = true;
  std::string detail;
  for (Index d : {10, 100, 1000}) {
    double m2 = 0, m4 = 0, m6 = 0;
    Vector u(d);
    for (long i = 0; i < samples; ++i) {
      rng.fill_gaussian(u);
      const double a = u.cwiseAbs().maxCoeff();
      const double a2 = a * a;
      m2 += a2;
      m4 += a2 * a2;
      m6 += a2 * a2 * a2;
    }
    const double n = static_cast<double>(samples);
    const double base = 2.0 * std::log(static_cast<double>(d));
    const double moments[] = {m2 / n, m4 / n, m6 / n};
    for (int j = 0; j < 3; ++j) {
      const int k = 2 * (j + 1);
      const double bound = 2.0 * std::pow(base, k / 2.0);
      pass = pass && moments[j] <= bound;
      detail += fmt::format("d={} k={}: {:.3f} <= {:.3f}; ", d, k, moments[j], bound);
    }
  }
  return {"l_inf moments of a Gaussian direction", pass, detail};
}

ValidationCheck linf_smoothing(long samples, Rng rng) {
  bool pass = true;
  std::string detail;
  for (Index d : {10, 100, 1000}) {
    const std::vector<Index> support{0, d / 3, d / 2, d - 1};
    const ProblemSpec inner = ProblemSpec::quadratic(Vector::LinSpaced(4, 0.5, 2.0).asDiagonal(), Vector::Zero(4));
    const ProblemSpec problem = ProblemSpec::sparse_support(d, support, inner);
    const Vector x = Vector::Constant(d, 0.1);
    const double nu = 0.05;
    const double exact = nu * nu * (0.5 + 1.0 + 1.5 + 2.0) / 2.0;
    const double bound = 2.0 * nu * nu * problem.lipschitz_grad_linf() * std::log(static_cast<double>(d));
    const double mc = smoothed_value_reference(problem, x, nu, samples, rng) - problem.value(x);
    const bool ok = exact <= bound && std::abs(mc - exact) <= 0.1 * exact;
    pass = pass && ok;
    detail += fmt::format("d={}: f_nu - f = {:.3e} (MC {:.3e}) <= {:.3e}; ", d, exact, mc, bound);
  }
  return {"l_inf smoothing error on sparse quadratics", pass, detail};
}

}  // namespace

std::vector<ValidationCheck> validate_estimators(bool quick, std::uint64_t seed) {
  const long samples = quick ? 10000 : 100000;
  const Rng root(seed);
  return {
      gradient_consistency(quick ? 1000 : 10000, root.split(1)),
      gradient_bias_saddle(samples, root.split(2)),
      hessian_consistency(samples, root.split(3)),
      hessian_bias_saddle(samples, root.split(4)),
      linf_moments(samples, root.split(5)),
      linf_smoothing(samples, root.split(6)),
  };
}

}  // namespace zo

#include "zo/estimators.hpp"

#include <cmath>

#include <fmt/core.h>

#include "zo/errors.hpp"

namespace zo {

namespace {

void check_nu(const SmoothingParams& params) {
  if (!(params.nu > 0.0) || !std::isfinite(params.nu))
    throw ContractViolation(fmt::format("smoothing radius must be positive and finite, got {}", params.nu));
}

double checked(double value, const char* where, double nu) {
  if (!std::isfinite(value))
    throw NumericError(fmt::format("{}: oracle returned {} (nu = {})", where, value, nu));
  return value;
}

// Stein coefficient for one direction u. `probe` is scratch storage of size d.
double hessian_coefficient(ZeroOrderOracle& oracle, const Vector& x, const Vector& u, double nu,
                           HessianScheme scheme, Vector& probe, Rng& rng) {
  const double nu2 = nu * nu;
  probe = x + nu * u;
  const double f_plus = checked(oracle(probe, rng), "hessian estimate", nu);
  switch (scheme) {
    case HessianScheme::one_point:
      return f_plus / nu2;
    case HessianScheme::two_point: {
      const double f0 = checked(oracle(x, rng), "hessian estimate", nu);
      return (f_plus - f0) / nu2;
    }
    case HessianScheme::three_point: {
      probe = x - nu * u;
      const double f_minus = checked(oracle(probe, rng), "hessian estimate", nu);
      const double f0 = checked(oracle(x, rng), "hessian estimate", nu);
      return (f_plus + f_minus - 2.0 * f0) / (2.0 * nu2);
    }
  }
  return 0.0;
}

}  // namespace

int calls_per_sample(HessianScheme scheme) {
  switch (scheme) {
    case HessianScheme::one_point: return 1;
    case HessianScheme::two_point: return 2;
    case HessianScheme::three_point: return 3;
  }
  return 0;
}

GradientEstimate grad_two_point(ZeroOrderOracle& oracle, const Vector& x,
                                const SmoothingParams& params, const Vector& u, Rng& rng) {
  check_nu(params);
  require(u.size() == x.size(), "grad_two_point: direction dimension mismatch");
  const Vector probe = x + params.nu * u;
  const double f_plus = checked(oracle(probe, rng), "gradient estimate", params.nu);
  const double f0 = checked(oracle(x, rng), "gradient estimate", params.nu);
  return {((f_plus - f0) / params.nu) * u, 1, params.nu, 2};
}

GradientEstimate grad_two_point(ZeroOrderOracle& oracle, const Vector& x,
                                const SmoothingParams& params, Rng& rng) {
  check_nu(params);
  const Vector u = rng.gaussian(x.size());
  return grad_two_point(oracle, x, params, u, rng);
}

GradientEstimate grad_averaged(ZeroOrderOracle& oracle, const Vector& x,
                               const SmoothingParams& params, long m, Rng& rng) {
  check_nu(params);
  if (m < 1) throw ContractViolation(fmt::format("grad_averaged: m must be >= 1, got {}", m));
  const Index d = x.size();
  Vector sum = Vector::Zero(d);
  Vector u(d);
  Vector probe(d);
  for (long j = 0; j < m; ++j) {
    rng.fill_gaussian(u);
    probe = x + params.nu * u;
    const double f_plus = checked(oracle(probe, rng), "gradient estimate", params.nu);
    const double f0 = checked(oracle(x, rng), "gradient estimate", params.nu);
    sum += ((f_plus - f0) / params.nu) * u;
  }
  GradientEstimate out;
  out.vector = sum / static_cast<double>(m);
  out.samples_used = m;
  out.nu = params.nu;
  out.oracle_calls = 2 * static_cast<std::uint64_t>(m);
  return out;
}

double smoothed_value_reference(const ProblemSpec& problem, const Vector& x, double nu, long samples,
                                Rng& rng) {
  require(samples >= 1, "smoothed_value_reference: need at least one sample");
  const Index d = x.size();
  Vector u(d);
  double total = 0.0;
  for (long j = 0; j < samples; ++j) {
    rng.fill_gaussian(u);
    total += problem.value(x + nu * u);
  }
  return total / static_cast<double>(samples);
}

StructuredHessian<double> hess_averaged(ZeroOrderOracle& oracle, const Vector& x,
                                        const SmoothingParams& params, long b, Rng& rng,
                                        HessianScheme scheme) {
  check_nu(params);
  if (b < 1) throw ContractViolation(fmt::format("hess_averaged: b must be >= 1, got {}", b));
  const Index d = x.size();
  Matrix directions(d, b);
  Vector coefficients(b);
  Vector u(d);
  Vector probe(d);
  for (long i = 0; i < b; ++i) {
    rng.fill_gaussian(u);
    coefficients[i] = hessian_coefficient(oracle, x, u, params.nu, scheme, probe, rng) /
                      static_cast<double>(b);
    directions.col(i) = u;
  }
  const auto calls = static_cast<std::uint64_t>(calls_per_sample(scheme)) * static_cast<std::uint64_t>(b);
  return StructuredHessian<double>::from_stein_terms(std::move(directions), std::move(coefficients),
                                                     calls);
}

StructuredHessian<double> hess_three_point(ZeroOrderOracle& oracle, const Vector& x,
                                           const SmoothingParams& params, Rng& rng) {
  return hess_averaged(oracle, x, params, 1, rng, HessianScheme::three_point);
}

StructuredHessian<double> hess_two_point(ZeroOrderOracle& oracle, const Vector& x,
                                         const SmoothingParams& params, Rng& rng) {
  return hess_averaged(oracle, x, params, 1, rng, HessianScheme::two_point);
}

StructuredHessian<double> hess_one_point(ZeroOrderOracle& oracle, const Vector& x,
                                         const SmoothingParams& params, Rng& rng) {
  return hess_averaged(oracle, x, params, 1, rng, HessianScheme::one_point);
}

}  // namespace zo

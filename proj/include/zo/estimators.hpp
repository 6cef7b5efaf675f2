#ifndef ZO_ESTIMATORS_HPP
#define ZO_ESTIMATORS_HPP

#include <cstdint>

#include "zo/oracle.hpp"
#include "zo/rng.hpp"
#include "zo/structured_hessian.hpp"
#include "zo/types.hpp"

namespace zo {

// Which moment bounds the caller relies on; the estimators themselves are
// identical in both geometries.
enum class NormMode { euclidean, linf };

struct SmoothingParams {
  double nu = 1e-3;
  NormMode norm_mode = NormMode::euclidean;
};

struct GradientEstimate {
  Vector vector;
  long samples_used = 0;
  double nu = 0.0;
  std::uint64_t oracle_calls = 0;
};

enum class HessianScheme { one_point, two_point, three_point };

// Calls consumed per direction by each Hessian scheme.
int calls_per_sample(HessianScheme scheme);

// [F(x + nu u) - F(x)] / nu * u for one standard Gaussian u drawn from rng.
// Draw order: u, then F(x + nu u), then F(x).
GradientEstimate grad_two_point(ZeroOrderOracle& oracle, const Vector& x,
                                const SmoothingParams& params, Rng& rng);

// Same quotient for a caller-supplied direction; rng only feeds the oracle noise.
GradientEstimate grad_two_point(ZeroOrderOracle& oracle, const Vector& x,
                                const SmoothingParams& params, const Vector& u, Rng& rng);

// Mean of m independent two-point estimates (fresh noise for every evaluation).
GradientEstimate grad_averaged(ZeroOrderOracle& oracle, const Vector& x,
                               const SmoothingParams& params, long m, Rng& rng);

// Monte-Carlo estimate of f_nu(x) = E_u f(x + nu u) using the noiseless objective.
double smoothed_value_reference(const ProblemSpec& problem, const Vector& x, double nu, long samples,
                                Rng& rng);

// Single-direction Stein estimates (uu' - I) * coefficient.
//   three-point: [F(x+nu u) + F(x-nu u) - 2F(x)] / (2 nu^2), 3 calls
//   two-point:   [F(x+nu u) - F(x)] / nu^2, 2 calls
//   one-point:   F(x+nu u) / nu^2, 1 call
StructuredHessian<double> hess_three_point(ZeroOrderOracle& oracle, const Vector& x,
                                           const SmoothingParams& params, Rng& rng);
StructuredHessian<double> hess_two_point(ZeroOrderOracle& oracle, const Vector& x,
                                         const SmoothingParams& params, Rng& rng);
StructuredHessian<double> hess_one_point(ZeroOrderOracle& oracle, const Vector& x,
                                         const SmoothingParams& params, Rng& rng);

// Average of b single-direction estimates, kept in O(b d) form.
StructuredHessian<double> hess_averaged(ZeroOrderOracle& oracle, const Vector& x,
                                        const SmoothingParams& params, long b, Rng& rng,
                                        HessianScheme scheme = HessianScheme::three_point);

}  // namespace zo

#endif  // ZO_ESTIMATORS_HPP

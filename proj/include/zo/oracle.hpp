#ifndef ZO_ORACLE_HPP
#define ZO_ORACLE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zo/rng.hpp"
#include "zo/types.hpp"

namespace zo {

class ProblemSpec;

// f(x) = 1/2 x'Ax + c'x + offset, A symmetric.
struct QuadraticFamily {
  Matrix A;
  Vector c;
  double offset = 0.0;
  // Set when A is diagonal; evaluation then costs O(d).
  bool diagonal = false;
};

// f(x) = 1/2 ||Ax - b||^2.
struct LeastSquaresFamily {
  Matrix A;
  Vector b;
};

// f(x, y) = x^4/4 - x^2/2 + y^2/2. Saddle at the origin, minima at (+-1, 0).
struct StrictSaddle2dFamily {};

// f(x) = inner(x_S). The gradient is supported on S.
struct SparseSupportFamily {
  std::vector<Index> support;
  std::shared_ptr<const ProblemSpec> inner;
};

// Analytic test problem: a noiseless objective plus the additive Gaussian
// noise level of its oracle. Reference constants (L, L_H) are computed on the
// box [-box_radius, box_radius]^d where the family is not globally smooth.
// Immutable after construction.
class ProblemSpec {
 public:
  using Family =
      std::variant<QuadraticFamily, SparseSupportFamily, StrictSaddle2dFamily, LeastSquaresFamily>;

  static ProblemSpec quadratic(Matrix A, Vector c, double offset = 0.0, double noise_std = 0.0,
                               double box_radius = 1.0);
  // 1/2 (x - x*)'A(x - x*).
  static ProblemSpec quadratic_with_minimizer(Matrix A, const Vector& minimizer,
                                              double noise_std = 0.0, double box_radius = 1.0);
  static ProblemSpec linear(Vector c, double noise_std = 0.0);
  static ProblemSpec least_squares(Matrix A, Vector b, double noise_std = 0.0,
                                   double box_radius = 1.0);
  static ProblemSpec strict_saddle_2d(double noise_std = 0.0, double box_radius = 2.0);
  static ProblemSpec sparse_support(Index dimension, std::vector<Index> support,
                                    const ProblemSpec& inner, double noise_std = 0.0);

  Index dimension() const { return dimension_; }
  double noise_std() const { return noise_std_; }
  double box_radius() const { return box_radius_; }
  // Euclidean gradient Lipschitz constant.
  double lipschitz_grad() const { return lipschitz_grad_; }
  // Gradient Lipschitz constant for the (l_inf, l_1) norm pair.
  double lipschitz_grad_linf() const { return lipschitz_grad_linf_; }
  double lipschitz_hess() const { return lipschitz_hess_; }
  const std::optional<double>& optimum_value() const { return optimum_value_; }
  const std::optional<Vector>& minimizer() const { return minimizer_; }
  bool convex() const { return convex_; }
  const Family& family() const { return family_; }
  std::string family_name() const;

  ProblemSpec with_noise(double noise_std) const;

  // Noiseless objective. No call accounting; verification only.
  double value(const Vector& x) const;
  Vector reference_gradient(const Vector& x) const;
  Matrix reference_hessian(const Vector& x) const;

 private:
  ProblemSpec() = default;
  void check_point(const Vector& x) const;
  double raw_value(const Vector& x) const;
  void finalize();

  Index dimension_ = 0;
  double noise_std_ = 0.0;
  double box_radius_ = 1.0;
  double lipschitz_grad_ = 0.0;
  double lipschitz_grad_linf_ = 0.0;
  double lipschitz_hess_ = 0.0;
  std::optional<double> optimum_value_;
  std::optional<Vector> minimizer_;
  bool convex_ = false;
  Family family_;
};

struct CallCounter {
  std::uint64_t function_evals = 0;
};

// F(x, xi) = f(x) + tau * N(0, 1), one fresh draw per evaluation.
double evaluate(const ProblemSpec& problem, const Vector& x, Rng& rng, CallCounter& counter);

// Stochastic zeroth-order oracle bound to one problem. Owns the call counter of
// a run; solvers see function values only.
class ZeroOrderOracle {
 public:
  explicit ZeroOrderOracle(const ProblemSpec& problem) : problem_(&problem) {}

  double operator()(const Vector& x, Rng& rng) { return evaluate(*problem_, x, rng, counter_); }

  Index dimension() const { return problem_->dimension(); }
  std::uint64_t calls() const { return counter_.function_evals; }
  const CallCounter& counter() const { return counter_; }
  void reset() { counter_ = {}; }

 private:
  const ProblemSpec* problem_;
  CallCounter counter_;
};

}  // namespace zo

#endif  // ZO_ORACLE_HPP

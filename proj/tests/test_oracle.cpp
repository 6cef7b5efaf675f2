#include <doctest.h>

#include <cmath>
#include <limits>

#include "zo/errors.hpp"
#include "zo/oracle.hpp"

using namespace zo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Central difference of the noiseless value, coordinate i.
double central_difference(const ProblemSpec& p, const Vector& x, Index i, double h) {
  Vector a = x, b = x;
  a[i] += h;
  b[i] -= h;
  return (p.value(a) - p.value(b)) / (2 * h);
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("evaluate on the noiseless quadratic and strict saddle") {
  const auto q = ProblemSpec::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  Rng rng(1);
  CallCounter counter;
  CHECK(evaluate(q, vec({3, 4}), rng, counter) == doctest::Approx(12.5));
  CHECK(evaluate(q, vec({0, 0}), rng, counter) == 0.0);
  CHECK(counter.function_evals == 2);

  const auto saddle = ProblemSpec::strict_saddle_2d();
  CHECK(evaluate(saddle, vec({1, 0}), rng, counter) == doctest::Approx(-0.25));
  CHECK(counter.function_evals == 3);
}

TEST_CASE("evaluate rejects bad points") {
  const auto q = ProblemSpec::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  Rng rng(1);
  CallCounter counter;
  CHECK_THROWS_AS(evaluate(q, vec({1, 2, 3}), rng, counter), ContractViolation);
  CHECK_THROWS_AS(evaluate(q, vec({1, std::numeric_limits<double>::quiet_NaN()}), rng, counter),
                  DomainError);
  CHECK(counter.function_evals == 0);
}

TEST_CASE("reference gradients") {
  const auto q = ProblemSpec::quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(q.reference_gradient(vec({3, 4})).isApprox(vec({3, 4})));
  CHECK(ProblemSpec::strict_saddle_2d().reference_gradient(vec({0, 0})).isZero());

  Matrix A(2, 2);
  A << 1, 0, 0, 2;
  const auto ls = ProblemSpec::least_squares(A, vec({1, 2}));
  const Vector g = ls.reference_gradient(vec({0, 0}));
  CHECK(g.isApprox(vec({-1, -4})));
  for (Index i = 0; i < 2; ++i)
    CHECK(central_difference(ls, vec({0, 0}), i, 1e-4) == doctest::Approx(g[i]).epsilon(1e-8));
}

TEST_CASE("reference hessians") {
  const auto saddle = ProblemSpec::strict_saddle_2d();
  Matrix at_origin(2, 2);
  at_origin << -1, 0, 0, 1;
  CHECK(saddle.reference_hessian(vec({0, 0})).isApprox(at_origin));
  const Matrix at_min = saddle.reference_hessian(vec({1, 0}));
  CHECK(at_min(0, 0) == doctest::Approx(2.0));
  CHECK(at_min(1, 1) == doctest::Approx(1.0));
  // Second difference of the value cross-checks the (0, 0) entry.
  const double h = 1e-4;
  const double second = (saddle.value(vec({1 + h, 0})) - 2 * saddle.value(vec({1, 0})) +
                         saddle.value(vec({1 - h, 0}))) / (h * h);
  CHECK(second == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("noise is unbiased") {
  const double tau = 0.5;
  const long M = 100000;
  Matrix A = Matrix::Identity(3, 3);
  const auto q = ProblemSpec::quadratic(A, Vector::Ones(3), 0.0, tau);
  const Vector x = vec({0.2, -0.1, 0.4});
  ZeroOrderOracle oracle(q);
  Rng rng(77);
  double sum = 0;
  for (long i = 0; i < M; ++i) sum += oracle(x, rng);
  CHECK(std::abs(sum / M - q.value(x)) <= 4 * tau / std::sqrt(double(M)));
  CHECK(oracle.calls() == static_cast<std::uint64_t>(M));
}

TEST_CASE("equal seeds give equal evaluation sequences") {
  const auto q = ProblemSpec::strict_saddle_2d(0.3);
  Rng a(5), b(5);
  CallCounter ca, cb;
  for (int i = 0; i < 100; ++i) {
    const Vector x = vec({0.01 * i, -0.02 * i});
    CHECK(evaluate(q, x, a, ca) == evaluate(q, x, b, cb));
  }
}

TEST_CASE("sparse support gradients vanish off the support") {
  const auto inner = ProblemSpec::quadratic_with_minimizer(2.0 * Matrix::Identity(3, 3), Vector::Ones(3));
  const auto p = ProblemSpec::sparse_support(50, {4, 17, 31}, inner);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = rng.gaussian(50);
    const Vector g = p.reference_gradient(x);
    for (Index i = 0; i < 50; ++i)
      if (i != 4 && i != 17 && i != 31) CHECK(g[i] == 0.0);
  }
  REQUIRE(p.minimizer());
  CHECK((*p.minimizer())[17] == 1.0);
  CHECK(*p.optimum_value() == doctest::Approx(0.0));
}

TEST_CASE("central differences converge at second order") {
  const auto saddle = ProblemSpec::strict_saddle_2d();
  const Vector x = vec({0.7, 0.3});
  const Vector g = saddle.reference_gradient(x);
  const double h = 1e-2;
  const double e1 = std::abs(central_difference(saddle, x, 0, h) - g[0]);
  const double e2 = std::abs(central_difference(saddle, x, 0, h / 2) - g[0]);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("box-relative constants of the strict saddle") {
  const auto saddle = ProblemSpec::strict_saddle_2d(0.0, 2.0);
  CHECK(saddle.lipschitz_grad() == doctest::Approx(11.0));
  CHECK(saddle.lipschitz_hess() == doctest::Approx(12.0));
}

TEST_CASE("dense reference hessian is refused in very high dimension") {
  const auto inner = ProblemSpec::quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
  const auto p = ProblemSpec::sparse_support(5000, {0}, inner);
  CHECK_THROWS_AS(p.reference_hessian(Vector::Zero(5000)), NotAvailable);
}

}

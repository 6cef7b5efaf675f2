#include "zo/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "zo/errors.hpp"

namespace zo {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Vector gather(const Vector& x, const std::vector<Index>& support) {
  Vector out(static_cast<Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) out[static_cast<Index>(i)] = x[support[i]];
  return out;
}

double max_abs_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

ProblemSpec ProblemSpec::quadratic(Matrix A, Vector c, double offset, double noise_std,
                                   double box_radius) {
  require(A.rows() == A.cols(), "quadratic: A must be square");
  require(A.rows() == c.size(), "quadratic: dim(c) must match A");
  require(A.rows() > 0, "quadratic: dimension must be positive");
  require(A.isApprox(A.transpose(), 1e-12) || A.isZero(), "quadratic: A must be symmetric");
  ProblemSpec p;
  p.dimension_ = A.rows();
  p.noise_std_ = noise_std;
  p.box_radius_ = box_radius;
  const bool diagonal = A.isDiagonal(0.0);
  p.family_ = QuadraticFamily{std::move(A), std::move(c), offset, diagonal};
  p.finalize();
  return p;
}

ProblemSpec ProblemSpec::quadratic_with_minimizer(Matrix A, const Vector& minimizer,
                                                  double noise_std, double box_radius) {
  require(A.rows() == minimizer.size(), "quadratic_with_minimizer: dimension mismatch");
  Vector c = -(A * minimizer);
  const double offset = 0.5 * minimizer.dot(A * minimizer);
  return quadratic(std::move(A), std::move(c), offset, noise_std, box_radius);
}

ProblemSpec ProblemSpec::linear(Vector c, double noise_std) {
  const Index d = c.size();
  return quadratic(Matrix::Zero(d, d), std::move(c), 0.0, noise_std);
}

ProblemSpec ProblemSpec::least_squares(Matrix A, Vector b, double noise_std, double box_radius) {
  require(A.rows() == b.size(), "least_squares: rows(A) must match dim(b)");
  require(A.cols() > 0, "least_squares: dimension must be positive");
  ProblemSpec p;
  p.dimension_ = A.cols();
  p.noise_std_ = noise_std;
  p.box_radius_ = box_radius;
  p.family_ = LeastSquaresFamily{std::move(A), std::move(b)};
  p.finalize();
  return p;
}

ProblemSpec ProblemSpec::strict_saddle_2d(double noise_std, double box_radius) {
  ProblemSpec p;
  p.dimension_ = 2;
  p.noise_std_ = noise_std;
  p.box_radius_ = box_radius;
  p.family_ = StrictSaddle2dFamily{};
  p.finalize();
  return p;
}

ProblemSpec ProblemSpec::sparse_support(Index dimension, std::vector<Index> support,
                                        const ProblemSpec& inner, double noise_std) {
  require(!support.empty(), "sparse_support: support must be nonempty");
  std::sort(support.begin(), support.end());
  require(std::adjacent_find(support.begin(), support.end()) == support.end(),
          "sparse_support: support indices must be distinct");
  require(support.front() >= 0 && support.back() < dimension,
          "sparse_support: support index out of range");
  require(static_cast<Index>(support.size()) == inner.dimension(),
          "sparse_support: |S| must equal the inner problem dimension");
  ProblemSpec p;
  p.dimension_ = dimension;
  p.noise_std_ = noise_std;
  p.box_radius_ = inner.box_radius();
  p.family_ = SparseSupportFamily{std::move(support),
                                  std::make_shared<const ProblemSpec>(inner.with_noise(0.0))};
  p.finalize();
  return p;
}

ProblemSpec ProblemSpec::with_noise(double noise_std) const {
  ProblemSpec p = *this;
  p.noise_std_ = noise_std;
  p.finalize();
  return p;
}

void ProblemSpec::finalize() {
  require(std::isfinite(noise_std_) && noise_std_ >= 0.0, "problem: noise_std must be >= 0");
  require(std::isfinite(box_radius_) && box_radius_ > 0.0, "problem: box_radius must be > 0");
  optimum_value_.reset();
  minimizer_.reset();
  std::visit(
      Overloaded{
          [&](const QuadraticFamily& q) {
            lipschitz_grad_ = max_abs_eigenvalue(q.A);
            lipschitz_grad_linf_ = q.A.cwiseAbs().sum();
            lipschitz_hess_ = 0.0;
            Eigen::SelfAdjointEigenSolver<Matrix> eig(q.A, Eigen::EigenvaluesOnly);
            const double lmin = eig.eigenvalues().minCoeff();
            convex_ = lmin >= -1e-12;
            if (lmin > 1e-12) {
              Vector xs = q.A.ldlt().solve(-q.c);
              optimum_value_ = raw_value(xs);
              minimizer_ = std::move(xs);
            } else if (q.A.isZero() && q.c.isZero()) {
              optimum_value_ = q.offset;
              minimizer_ = Vector::Zero(dimension_);
            }
          },
          [&](const LeastSquaresFamily& ls) {
            const Matrix gram = ls.A.transpose() * ls.A;
            lipschitz_grad_ = max_abs_eigenvalue(gram);
            lipschitz_grad_linf_ = gram.cwiseAbs().sum();
            lipschitz_hess_ = 0.0;
            convex_ = true;
            Vector xs = ls.A.completeOrthogonalDecomposition().solve(ls.b);
            optimum_value_ = raw_value(xs);
            minimizer_ = std::move(xs);
          },
          [&](const StrictSaddle2dFamily&) {
            const double r = box_radius_;
            lipschitz_grad_ = std::max(3.0 * r * r - 1.0, 1.0);
            lipschitz_grad_linf_ = lipschitz_grad_ + 1.0;
            lipschitz_hess_ = 6.0 * r;
            convex_ = false;
            optimum_value_ = -0.25;
            minimizer_ = Vector::Unit(2, 0);
          },
          [&](const SparseSupportFamily& s) {
            lipschitz_grad_ = s.inner->lipschitz_grad();
            lipschitz_grad_linf_ = s.inner->lipschitz_grad_linf();
            lipschitz_hess_ = s.inner->lipschitz_hess();
            convex_ = s.inner->convex();
            optimum_value_ = s.inner->optimum_value();
            if (s.inner->minimizer()) {
              Vector xs = Vector::Zero(dimension_);
              for (std::size_t i = 0; i < s.support.size(); ++i)
                xs[s.support[i]] = (*s.inner->minimizer())[static_cast<Index>(i)];
              minimizer_ = std::move(xs);
            }
          },
      },
      family_);
}

std::string ProblemSpec::family_name() const {
  return std::visit(Overloaded{
                        [](const QuadraticFamily&) { return std::string("quadratic"); },
                        [](const LeastSquaresFamily&) { return std::string("least_squares"); },
                        [](const StrictSaddle2dFamily&) { return std::string("strict_saddle_2d"); },
                        [](const SparseSupportFamily&) { return std::string("sparse_support"); },
                    },
                    family_);
}

void ProblemSpec::check_point(const Vector& x) const {
  if (x.size() != dimension_)
    throw ContractViolation(
        fmt::format("point has dimension {}, problem expects {}", x.size(), dimension_));
  if (!x.allFinite()) throw DomainError("point has a non-finite coordinate");
}

double ProblemSpec::raw_value(const Vector& x) const {
  return std::visit(
      Overloaded{
          [&](const QuadraticFamily& q) {
            const double curvature = q.diagonal ? (q.A.diagonal().array() * x.array().square()).sum()
                                                : x.dot(q.A * x);
            return 0.5 * curvature + q.c.dot(x) + q.offset;
          },
          [&](const LeastSquaresFamily& ls) { return 0.5 * (ls.A * x - ls.b).squaredNorm(); },
          [&](const StrictSaddle2dFamily&) {
            const double a = x[0] * x[0];
            return 0.25 * a * a - 0.5 * a + 0.5 * x[1] * x[1];
          },
          [&](const SparseSupportFamily& s) { return s.inner->value(gather(x, s.support)); },
      },
      family_);
}

double ProblemSpec::value(const Vector& x) const {
  check_point(x);
  return raw_value(x);
}

Vector ProblemSpec::reference_gradient(const Vector& x) const {
  check_point(x);
  return std::visit(Overloaded{
                        [&](const QuadraticFamily& q) -> Vector { return q.A * x + q.c; },
                        [&](const LeastSquaresFamily& ls) -> Vector {
                          return ls.A.transpose() * (ls.A * x - ls.b);
                        },
                        [&](const StrictSaddle2dFamily&) -> Vector {
                          Vector g(2);
                          g << x[0] * x[0] * x[0] - x[0], x[1];
                          return g;
                        },
                        [&](const SparseSupportFamily& s) -> Vector {
                          const Vector inner = s.inner->reference_gradient(gather(x, s.support));
                          Vector g = Vector::Zero(dimension_);
                          for (std::size_t i = 0; i < s.support.size(); ++i)
                            g[s.support[i]] = inner[static_cast<Index>(i)];
                          return g;
                        },
                    },
                    family_);
}

Matrix ProblemSpec::reference_hessian(const Vector& x) const {
  check_point(x);
  if (dimension_ > 4096)
    throw NotAvailable(fmt::format("dense reference Hessian refused at d = {}", dimension_));
  return std::visit(Overloaded{
                        [&](const QuadraticFamily& q) -> Matrix { return q.A; },
                        [&](const LeastSquaresFamily& ls) -> Matrix {
                          return ls.A.transpose() * ls.A;
                        },
                        [&](const StrictSaddle2dFamily&) -> Matrix {
                          Matrix h = Matrix::Zero(2, 2);
                          h(0, 0) = 3.0 * x[0] * x[0] - 1.0;
                          h(1, 1) = 1.0;
                          return h;
                        },
                        [&](const SparseSupportFamily& s) -> Matrix {
                          const Matrix inner = s.inner->reference_hessian(gather(x, s.support));
                          Matrix h = Matrix::Zero(dimension_, dimension_);
                          for (std::size_t i = 0; i < s.support.size(); ++i)
                            for (std::size_t j = 0; j < s.support.size(); ++j)
                              h(s.support[i], s.support[j]) =
                                  inner(static_cast<Index>(i), static_cast<Index>(j));
                          return h;
                        },
                    },
                    family_);
}

double evaluate(const ProblemSpec& problem, const Vector& x, Rng& rng, CallCounter& counter) {
  const double f = problem.value(x);
  ++counter.function_evals;
  if (problem.noise_std() == 0.0) return f;
  return f + problem.noise_std() * rng.normal();
}

}  // namespace zo

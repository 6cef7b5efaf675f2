#ifndef ZO_CUBIC_SOLVER_HPP
#define ZO_CUBIC_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <json.hpp>

#include "zo/cg_solvers.hpp"
#include "zo/errors.hpp"
#include "zo/estimators.hpp"
#include "zo/oracle.hpp"
#include "zo/rng.hpp"
#include "zo/run_record.hpp"
#include "zo/structured_hessian.hpp"

namespace zo {

// m(s) = <g, s> + 1/2 <Hs, s> + alpha/6 ||s||^3, the cubic model around the
// current iterate. Hess is any operator with matvec / norm_bound / min_eigen
// (StructuredHessian or DenseHessian).
template <typename Hess>
struct CubicModel {
  Vector g;
  Hess H;
  double alpha = 1.0;

  Index dim() const { return g.size(); }
  double value(const Vector& s) const { return value(s, H.matvec(s)); }
  double value(const Vector& s, const Vector& Hs) const {
    const double r = s.norm();
    return g.dot(s) + 0.5 * Hs.dot(s) + alpha / 6.0 * r * r * r;
  }
  // g + Hs + alpha/2 ||s|| s
  Vector gradient(const Vector& s, const Vector& Hs) const { return g + Hs + 0.5 * alpha * s.norm() * s; }
};

struct SubsolverOptions {
  // First-order tolerance; NaN selects min(eps / 10, 1e-6) * max(1, ||g||).
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  double eps = 1e-6;
  long max_iters = 200000;
  int max_restarts = 8;
};

struct SubproblemCertificate {
  // ||g + Hs + alpha/2 ||s|| s||, recomputed with a fresh product.
  double residual = 0.0;
  double model_value = 0.0;
  // Power-iteration estimate of lambda_min(H).
  double lambda_min = 0.0;
  // lambda_min(H) + alpha/2 ||s||; the global minimizer has it >= 0.
  double curvature_witness = 0.0;
  double tolerance = 0.0;
  long iterations = 0;
  int restarts = 0;
  bool perturbed = false;
};

struct SubproblemSolution {
  Vector s;
  SubproblemCertificate certificate;
};

inline double default_subsolver_tolerance(double eps, double g_norm) {
  return std::min(eps / 10.0, 1e-6) * std::max(1.0, g_norm);
}

namespace detail {

// Minimizer of the model along -g: radius -beta/alpha + sqrt((beta/alpha)^2 + 2||g||/alpha)
// with beta the curvature of H along g.
template <typename Hess>
Vector cauchy_point(const CubicModel<Hess>& model) {
  const double gn = model.g.norm();
  const Vector dir = model.g / gn;
  const double beta = dir.dot(model.H.matvec(dir));
  const double ratio = beta / model.alpha;
  const double radius = -ratio + std::sqrt(ratio * ratio + 2.0 * gn / model.alpha);
  return -radius * dir;
}

}  // namespace detail

// Gradient descent on the cubic model with step 1/(||H|| estimate + alpha ||s||)
// and monotone backtracking, started at the Cauchy point (or a 1e-3 random
// point when ||g|| < 1e-8). An answer is accepted once the residual is below
// the tolerance, the model value is <= 0 and the curvature witness holds; a
// failed witness restarts the descent along the minimal eigenvector.
template <typename Hess>
SubproblemSolution solve_cubic_subproblem(const CubicModel<Hess>& model, const SubsolverOptions& options, Rng& rng) {
  require(model.alpha > 0 && std::isfinite(model.alpha), "cubic subproblem: alpha must be positive");
  require(model.H.dim() == model.dim(), "cubic subproblem: H and g dimensions differ");
  require(options.max_iters >= 1, "cubic subproblem: max_iters must be >= 1");
  const Index d = model.dim();
  const double g_norm = model.g.norm();
  const double tol =
      std::isfinite(options.tolerance) ? options.tolerance : default_subsolver_tolerance(options.eps, g_norm);
  require(tol > 0, "cubic subproblem: tolerance must be positive");
  // ||H|| from both ends of the spectrum; the term bound is often far looser.
  const auto low = model.H.min_eigen();
  const double term_bound = model.H.norm_bound();
  const auto high = min_eigenvalue<double>([&](const Vector& v) { return Vector(-model.H.matvec(v)); }, d,
                                           term_bound);
  const double h_bound =
      std::min(term_bound, 1.1 * std::max(std::abs(low.value), std::abs(high.value))) + 1e-12 * term_bound;

  SubproblemSolution out;
  auto& cert = out.certificate;
  cert.tolerance = tol;

  // Accepts s when all three conditions hold; fills the certificate either way.
  auto certify = [&](const Vector& s) {
    const Vector Hs = model.H.matvec(s);
    cert.residual = model.gradient(s, Hs).norm();
    cert.model_value = model.value(s, Hs);
    const auto eig = model.H.min_eigen();
    cert.lambda_min = eig.value;
    cert.curvature_witness = eig.value + 0.5 * model.alpha * s.norm();
    return std::pair{cert.residual <= tol && cert.model_value <= 0.0 && cert.curvature_witness >= -tol, eig.vector};
  };

  Vector s = Vector::Zero(d);
  if (g_norm < 1e-8) {
    if (certify(s).first) {
      out.s = std::move(s);
      return out;
    }
    s = rng.gaussian(d);
    s *= 1e-3 / s.norm();
    cert.perturbed = true;
  } else {
    s = detail::cauchy_point(model);
  }

  long iters = 0;
  while (true) {
    Vector Hs = model.H.matvec(s);
    double value = model.value(s, Hs);
    Vector grad = model.gradient(s, Hs);
    while (grad.norm() > tol) {
      if (iters >= options.max_iters)
        throw BudgetExceeded(fmt::format("cubic subproblem: no convergence after {} iterations (residual {:.3e}, "
                                         "tolerance {:.3e})",
                                         iters, grad.norm(), tol),
                             s, grad.norm(), iters);
      ++iters;
      double step = 1.0 / (h_bound + model.alpha * s.norm());
      for (int halvings = 0; halvings < 60; ++halvings) {
        Vector trial = s - step * grad;
        Vector trial_Hs = model.H.matvec(trial);
        const double trial_value = model.value(trial, trial_Hs);
        if (trial_value <= value + 1e-14 * std::max(1.0, std::abs(value)) || halvings == 59) {
          s = std::move(trial);
          Hs = std::move(trial_Hs);
          value = trial_value;
          break;
        }
        step *= 0.5;
      }
      grad = model.gradient(s, Hs);
    }
    const auto [accepted, eigvec] = certify(s);
    cert.iterations = iters;
    if (accepted) break;
    if (cert.restarts >= options.max_restarts)
      throw BudgetExceeded(fmt::format("cubic subproblem: certificate failed after {} restarts (residual {:.3e}, "
                                       "model {:.3e}, curvature witness {:.3e})",
                                       cert.restarts, cert.residual, cert.model_value, cert.curvature_witness),
                           s, cert.residual, iters);
    ++cert.restarts;
    // Move along the most negative curvature direction, on the side that lowers the model.
    const double radius = std::max(s.norm(), 2.0 * std::abs(cert.lambda_min) / model.alpha);
    const Vector plus = s + radius * eigvec, minus = s - radius * eigvec;
    s = model.value(plus) <= model.value(minus) ? plus : minus;
  }
  out.s = std::move(s);
  return out;
}

struct CubicParams {
  ScheduleMode mode = ScheduleMode::practical;
  long N = 1;
  double nu = 1e-2;
  std::vector<double> alpha;  // alpha[k-1]
  std::vector<long> m;        // gradient batch
  std::vector<long> b;        // Hessian batch
  double eps = 1e-4;          // target accuracy; sets the default subsolver tolerance
  HessianScheme scheme = HessianScheme::three_point;
  SubsolverOptions subsolver;

  // alpha = L_H, nu = 1/2 min{sqrt(L_H eps / (36 (d+16)^5)), eps / (L (d+3)^{3/2})},
  // N = 12 sqrt(L_H) gap0 / eps^{3/2}, b = (2 L^2 / L_H) (4 (d+16)^2)^4 cbrt(1 + 2 log 2d) / eps,
  // m = 26 (d+5) (B^2 + sigma^2) / eps^2. All counts rounded up.
  static CubicParams paper(double eps, Index d, double L, double L_H, double gap0, double B, double sigma = 1.0);
  static CubicParams practical(long N, double alpha, double nu, long m, long b, double eps = 1e-4);

  void validate() const;
  nlohmann::json echo() const;
};

struct SecondOrderReport {
  double grad_norm = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

// ||grad f(x)|| and the extreme eigenvalues of the reference Hessian.
SecondOrderReport second_order_criterion(const ProblemSpec& problem, const Vector& x);

// Both normalizations of the eps-local-optimality measure:
//   by_curvature = max{sqrt(||grad||), -lambda_min / sqrt(lambda_max)}, compared with sqrt(eps)
//   by_lipschitz = max{sqrt(||grad||), -5 lambda_min / (8 sqrt(L_H))}, compared with 5 sqrt(eps)
struct LocalOptimality {
  double by_curvature = 0.0;
  double by_lipschitz = 0.0;
  bool by_curvature_ok = false;
  bool by_lipschitz_ok = false;
  // The two tests disagree on this point.
  bool disagree = false;
};

LocalOptimality local_optimality(const SecondOrderReport& report, double eps, double L_H);

struct CubicSolverResult : SolverResult {
  std::vector<SubproblemCertificate> certificates;
};

// Stochastic cubic-regularized Newton steps from averaged two-point gradients
// and Stein Hessians; returns x_R with R uniform on {1..N}. x0 defaults to 0.
CubicSolverResult zscrn(const ProblemSpec& problem, const CubicParams& params, const RunOptions& options = {});

}  // namespace zo

#endif  // ZO_CUBIC_SOLVER_HPP

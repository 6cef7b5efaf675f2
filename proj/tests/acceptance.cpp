// Acceptance checks. Prints one PASS/FAIL line per criterion; with
// --criterion K only that one runs. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "zo/cg_solvers.hpp"
#include "zo/constraints.hpp"
#include "zo/cubic_solver.hpp"
#include "zo/estimators.hpp"
#include "zo/harness.hpp"
#include "zo/highdim_solvers.hpp"

using namespace zo;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // seconds; 0 when none is stated
  std::function<Verdict()> check;
};

Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

// Sample mean of vector draws and the l2 size of its standard error,
// sqrt(trace(Cov) / n).
struct MeanWithError {
  Vector mean;
  Vector entry_se;
  double se_norm;
};

MeanWithError sample_mean(long n, Index dim, const std::function<Vector()>& draw) {
  Vector sum = Vector::Zero(dim);
  Vector sum_sq = Vector::Zero(dim);
  for (long i = 0; i < n; ++i) {
    const Vector v = draw();
    sum += v;
    sum_sq += v.cwiseAbs2();
  }
  const double nn = static_cast<double>(n);
  const Vector m = sum / nn;
  const Vector var = (sum_sq / nn - m.cwiseAbs2()) * (nn / (nn - 1.0));
  const Vector se = (var / nn).cwiseSqrt();
  return {m, se, se.norm()};
}

// ---------------------------------------------------------------------------

Verdict stein_gradient() {
  Rng rng(11);
  const Index d = 10;
  const Matrix A = Vector::LinSpaced(d, 1.0, 3.0).asDiagonal();
  const ProblemSpec problem = ProblemSpec::quadratic(A, Vector::Zero(d));
  const Vector x = Vector::LinSpaced(d, -0.5, 0.5);
  ZeroOrderOracle oracle(problem);
  const auto est = sample_mean(100000, d, [&] { return grad_two_point(oracle, x, {0.01}, rng).vector; });
  const double err = (est.mean - A * x).norm();
  return {err <= 5.0 * est.se_norm, fmt::format("||mean - Ax|| = {:.4e}, 5 SE = {:.4e}", err, 5.0 * est.se_norm)};
}

Verdict stein_hessian() {
  Rng rng(12);
  const Matrix A = diag({1, 2, 3, 4, 5});
  const ProblemSpec problem = ProblemSpec::quadratic(A, Vector::Zero(5));
  const Vector x = Vector::Constant(5, 0.3);
  ZeroOrderOracle oracle(problem);
  const auto est = sample_mean(100000, 25, [&] {
    const auto h = hess_three_point(oracle, x, {0.05}, rng);
    Vector flat(25);
    for (Index j = 0; j < 5; ++j) flat.segment(j * 5, 5) = h.matvec(Vector::Unit(5, j));
    return flat;
  });
  const Matrix mean = Eigen::Map<const Matrix>(est.mean.data(), 5, 5);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (mean + mean.transpose()) - A);
  const Matrix asym = mean - mean.transpose();
  const double op = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), asym.norm());
  // The Frobenius size of the entrywise standard errors dominates the
  // operator-norm standard error.
  return {op <= 5.0 * est.se_norm, fmt::format("||mean - A||_op = {:.4f}, 5 SE = {:.4f}", op, 5.0 * est.se_norm)};
}

Verdict smoothing_bounds() {
  Rng rng(13);
  bool pass = true;
  std::string detail;
  {
    const Index d = 8;
    const Matrix A = Vector::LinSpaced(d, 0.5, 2.0).asDiagonal();
    const ProblemSpec q = ProblemSpec::quadratic(A, Vector::Constant(d, 0.2));
    const Vector x = Vector::LinSpaced(d, -0.3, 0.6);
    const double nu = 0.1;
    const double exact = nu * nu * A.trace() / 2.0;
    const double bound = nu * nu * q.lipschitz_grad() * static_cast<double>(d) / 2.0;
    const auto est = sample_mean(100000, 1, [&] { return Vector::Constant(1, q.value(x + nu * rng.gaussian(d))); });
    const double mc = est.mean[0] - q.value(x);
    const bool ok = exact <= bound && std::abs(mc - exact) <= 5.0 * est.se_norm;
    pass = pass && ok;
    detail += fmt::format("quadratic: f_nu - f MC {:.5f} vs nu^2 tr(A)/2 {:.5f} (5 SE {:.5f}) <= {:.5f}; ", mc, exact,
                          5.0 * est.se_norm, bound);
  }
  const ProblemSpec saddle = ProblemSpec::strict_saddle_2d();
  const Vector x = (Vector(2) << 0.7, -0.4).finished();
  ZeroOrderOracle oracle(saddle);
  for (double nu : {0.1, 0.01}) {
    const auto est = sample_mean(100000, 2, [&] { return grad_two_point(oracle, x, {nu}, rng).vector; });
    const double bias = (est.mean - saddle.reference_gradient(x)).norm();
    const double bound = nu / 2.0 * saddle.lipschitz_grad() * std::pow(2.0 + 3.0, 1.5);
    pass = pass && bias <= bound;
    detail += fmt::format("saddle nu={}: ||E grad - grad f|| {:.4e} (SE {:.1e}) <= {:.4e}; ", nu, bias, est.se_norm,
                          bound);
  }
  return {pass, detail};
}

Verdict linf_moments() {
  Rng rng(14);
  bool pass = true;
  std::string detail;
  for (Index d : {10, 100, 1000}) {
    double m[3] = {0, 0, 0};
    Vector u(d);
    const long n = 100000;
    for (long i = 0; i < n; ++i) {
      rng.fill_gaussian(u);
      const double a2 = u.cwiseAbs().maxCoeff() * u.cwiseAbs().maxCoeff();
      m[0] += a2;
      m[1] += a2 * a2;
      m[2] += a2 * a2 * a2;
    }
    for (int j = 0; j < 3; ++j) {
      const double k = 2.0 * (j + 1);
      const double value = m[j] / static_cast<double>(n);
      const double bound = 2.0 * std::pow(2.0 * std::log(static_cast<double>(d)), k / 2.0);
      pass = pass && value <= bound;
      detail += fmt::format("d={} k={}: {:.2f}/{:.2f}; ", d, k, value, bound);
    }
  }
  return {pass, detail};
}

double grid_minimize_1d(const std::function<double(double)>& f, double lo, double hi) {
  double center = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  for (int level = 0; level < 14; ++level) {
    double best = INFINITY, arg = center;
    for (int i = -200; i <= 200; ++i) {
      const double t = std::clamp(center + half / 200.0 * i, lo, hi);
      const double v = f(t);
      if (v < best) best = v, arg = t;
    }
    center = arg;
    half *= 0.1;
  }
  return center;
}

Verdict oracle_equivalence() {
  Rng rng(15);
  double worst_proj = 0.0;
  double worst_excess = -INFINITY;
  long lmo_mismatch = 0;
  for (int t = 0; t < 40; ++t) {
    const Vector y = 1.5 * rng.gaussian(2);
    const double r = 0.3 + rng.uniform();
    const auto l1 = ConstraintSet<double>::l1_ball(r);
    // Outside the ball the projection lies on one of the four edges; search each.
    Vector brute = y;
    if (y.lpNorm<1>() > r) {
      const Vector corners[4] = {r * Vector::Unit(2, 0), r * Vector::Unit(2, 1), -r * Vector::Unit(2, 0),
                                 -r * Vector::Unit(2, 1)};
      double best = INFINITY;
      for (int e = 0; e < 4; ++e) {
        const Vector a = corners[e];
        const Vector b = corners[(e + 1) % 4];
        const double t = grid_minimize_1d([&](double u) { return (a + u * (b - a) - y).squaredNorm(); }, 0, 1);
        const Vector p = a + t * (b - a);
        if ((p - y).squaredNorm() < best) best = (p - y).squaredNorm(), brute = p;
      }
    }
    worst_proj = std::max(worst_proj, (project(l1, y) - brute).norm());
    worst_excess = std::max(worst_excess, (project(l1, y) - y).squaredNorm() - (brute - y).squaredNorm());
    const auto simplex = ConstraintSet<double>::simplex(r);
    const double t_best =
        grid_minimize_1d([&](double s) { return (Vector(2) << s, r - s).finished().operator-(y).squaredNorm(); }, 0, r);
    const Vector simplex_brute = (Vector(2) << t_best, r - t_best).finished();
    worst_proj = std::max(worst_proj, (project(simplex, y) - simplex_brute).norm());
    worst_excess =
        std::max(worst_excess, (project(simplex, y) - y).squaredNorm() - (simplex_brute - y).squaredNorm());
  }
  // LMO against vertex enumeration (l1 and simplex vertices are +-r e_i and r e_i).
  for (int t = 0; t < 200; ++t) {
    const Index d = 6;
    const Vector g = rng.gaussian(d);
    const double r = 0.5 + rng.uniform();
    double best_l1 = INFINITY, best_simplex = INFINITY;
    for (Index i = 0; i < d; ++i) {
      best_l1 = std::min({best_l1, r * g[i], -r * g[i]});
      best_simplex = std::min(best_simplex, r * g[i]);
    }
    if (g.dot(lmo(ConstraintSet<double>::l1_ball(r), g)) != best_l1) ++lmo_mismatch;
    if (g.dot(lmo(ConstraintSet<double>::simplex(r), g)) != best_simplex) ++lmo_mismatch;
  }
  // Truncation against all C(8,3) supports.
  std::vector<std::array<Index, 3>> supports;
  for (Index a = 0; a < 8; ++a)
    for (Index b = a + 1; b < 8; ++b)
      for (Index c = b + 1; c < 8; ++c) supports.push_back({a, b, c});
  long trunc_mismatch = 0;
  for (int t = 0; t < 1000; ++t) {
    const Vector y = rng.gaussian(8);
    double best = INFINITY;
    for (const auto& s : supports) {
      Vector z = Vector::Zero(8);
      for (Index i : s) z[i] = y[i];
      best = std::min(best, (y - z).squaredNorm());
    }
    const Vector got = truncate_top_s(y, 3);
    const long nnz = (got.array() != 0.0).count();
    if ((y - got).squaredNorm() != best || nnz != 3) ++trunc_mismatch;
  }
  // Refinement on squared distances resolves the minimizer only to about
  // sqrt(machine epsilon); the objective comparison is exact to round-off.
  const bool pass = worst_excess <= 1e-14 && worst_proj <= 1e-7 && lmo_mismatch == 0 && trunc_mismatch == 0;
  return {pass, fmt::format("projection vs grid refinement: max distance {:.2e}, max objective excess {:.2e}; LMO "
                            "mismatches {}; truncation mismatches {} of 1000",
                            worst_proj, worst_excess, lmo_mismatch, trunc_mismatch)};
}

Verdict icg_certificate_distance() {
  Rng rng(16);
  const Index d = 20;
  long cert_fail = 0, dist_fail = 0;
  double worst_ratio = 0.0;
  const std::vector<ConstraintSet<double>> sets{ConstraintSet<double>::l1_ball(1.0), ConstraintSet<double>::l2_ball(1.0),
                                                ConstraintSet<double>::simplex(1.0),
                                                ConstraintSet<double>::box(d, -0.5, 0.5)};
  for (int t = 0; t < 100; ++t) {
    const auto& set = sets[static_cast<std::size_t>(t) % sets.size()];
    const Vector x = project(set, rng.gaussian(d));
    const Vector g = 3.0 * rng.gaussian(d);
    const double gamma = 0.5 + 5.0 * rng.uniform();
    const double mu = std::pow(10.0, -1.0 - 3.0 * rng.uniform());
    const auto res = icg(set, x, g, IcgParams<double>{gamma, mu});
    if (icg_certificate(set, x, g, gamma, res.point) < -mu || !set.contains(res.point)) ++cert_fail;
    const double dist = (prox_exact(set, x, g, gamma) - res.point).squaredNorm();
    worst_ratio = std::max(worst_ratio, dist / (mu / gamma));
    if (dist > mu / gamma) ++dist_fail;
  }
  return {cert_fail == 0 && dist_fail == 0,
          fmt::format("certificate failures {}, distance failures {} of 100; max ||prox - y||^2 / (mu/gamma) = {:.3f}",
                      cert_fail, dist_fail, worst_ratio)};
}

Verdict gradient_mapping_sandwich() {
  Rng rng(17);
  const Index d = 12;
  long fails = 0;
  double slack_lower = INFINITY, slack_upper = INFINITY;
  for (int t = 0; t < 100; ++t) {
    Matrix B(d, d);
    rng.fill_gaussian(B);
    const ProblemSpec q = ProblemSpec::quadratic(0.5 * (B + B.transpose()), rng.gaussian(d));
    const auto set = t % 2 ? ConstraintSet<double>::l2_ball(1.0) : ConstraintSet<double>::l1_ball(1.5);
    const Vector x = project(set, rng.gaussian(d));
    const double gamma = 0.5 + 10.0 * rng.uniform();
    const double gap = fw_gap(q, set, x);
    const double gp = gradient_mapping(q, set, x, gamma).norm();
    const double grad_bound = q.reference_gradient(x).norm();
    const double lower = gamma * gap - gp * gp;
    const double upper = (grad_bound / gamma + set.diameter(d)) * gp - gap;
    slack_lower = std::min(slack_lower, lower);
    slack_upper = std::min(slack_upper, upper);
    if (lower < -1e-8 || upper < -1e-8) ++fails;
  }
  return {fails == 0, fmt::format("violations {} of 100; min slacks {:.3e}, {:.3e}", fails, slack_lower, slack_upper)};
}

Verdict zscg_rate() {
  const Index d = 20;
  const ProblemSpec problem =
      ProblemSpec::quadratic_with_minimizer(Vector::LinSpaced(d, 1.0, 2.0).asDiagonal(), Vector::Constant(d, 0.01), 1e-3);
  const auto set = ConstraintSet<double>::l1_ball(0.5);
  const double B = default_B_Lsigma(problem, set, default_start(set, d));
  std::vector<long> Ns{25, 100, 400};
  std::vector<double> gaps;
  std::string detail;
  for (long N : Ns) {
    std::vector<double> per_seed;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      per_seed.push_back(zscg(problem, set, ZscgSchedule::paper_nonconvex(N, d, B), o).record.expected_criteria.at("fw_gap"));
    }
    gaps.push_back(mean(per_seed));
    detail += fmt::format("N={}: {:.4e}; ", N, gaps.back());
  }
  const TrendReport r = trend_check(Ns, gaps, -0.8, -0.25);
  return {r.pass, detail + r.note};
}

ProblemSpec sparse_quadratic(Index d, std::vector<Index> support, double noise) {
  const ProblemSpec inner = ProblemSpec::quadratic_with_minimizer(diag({1.0, 0.8, 0.6, 0.5, 0.4}), Vector::Ones(5));
  return ProblemSpec::sparse_support(d, std::move(support), inner, noise);
}

Verdict implicit_regularization() {
  const double noise = 0.01;
  const long N = 10000;
  std::vector<long> ds{100, 1000, 10000};
  std::vector<double> values;
  std::string detail;
  for (long d : ds) {
    std::vector<Index> support;
    for (Index i = 0; i < 5; ++i) support.push_back(i * (d / 5) + 1);
    const ProblemSpec p = sparse_quadratic(d, support, noise);
    const Vector x0 = Vector::Zero(d);
    const double D0 = p.value(x0) - *p.optimum_value();
    const auto schedule = HighDimSchedule::paper_nonconvex(N, d, p.lipschitz_grad_linf(), 5, D0, noise);
    std::vector<double> per_seed;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      per_seed.push_back(zsgd(p, schedule, o).record.expected_criteria.at("grad_l1_sq"));
    }
    values.push_back(median_of(per_seed));
    detail += fmt::format("d={}: {:.4f}; ", d, values.back());
  }
  // The exponent in d, fitted the same way as rates in N.
  const TrendReport r = trend_check(ds, values, -INFINITY, 0.3);
  return {r.pass, detail + r.note};
}

Verdict truncated_trend() {
  const Index d = 500;
  const ProblemSpec p = sparse_quadratic(d, {3, 77, 150, 299, 480}, 1e-3);
  std::vector<long> Ns{1000, 4000, 16000};
  std::vector<double> gaps;
  std::string detail;
  for (long N : Ns) {
    const auto schedule = HighDimSchedule::practical_sqrt_n(HighDimMode::convex_truncated, N, 1.0, 0.01, 10);
    std::vector<double> per_seed;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      per_seed.push_back(zsgd_truncated(p, schedule, o).record.output_criteria.at("f_gap"));
    }
    gaps.push_back(mean(per_seed));
    detail += fmt::format("N={}: mean {:.4e}, median {:.4e}; ", N, gaps.back(), median_of(per_seed));
  }
  const TrendReport r = trend_check(Ns, gaps, -1.3, -0.5);
  return {r.pass, detail + r.note};
}

double line_minimum(double a, double b, double alpha) {
  double best = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double disc = b * b - 2.0 * alpha * sign * a;
    if (disc < 0) continue;
    const double t = (-b + std::sqrt(disc)) / alpha;
    if (t > 0) best = std::min(best, sign * a * t + 0.5 * b * t * t + alpha / 6.0 * t * t * t);
  }
  return best;
}

CubicSolverResult saddle_run(std::uint64_t seed) {
  const ProblemSpec p = ProblemSpec::strict_saddle_2d(1e-3);
  Rng start(1000 + seed);
  RunOptions o;
  o.seed = seed;
  o.x0 = 1e-6 * start.gaussian(2);
  return zscrn(p, CubicParams::practical(50, 12.0, 0.1, 100, 1000), o);
}

Verdict cubic_subproblem() {
  using Model = CubicModel<DenseHessian<double>>;
  Rng rng(18);
  std::string detail;

  SubsolverOptions tight;
  tight.tolerance = 1e-10;
  const Model scalar{Vector::Ones(1), DenseHessian<double>(-Matrix::Identity(1, 1)), 1.0};
  const double s = solve_cubic_subproblem(scalar, tight, rng).s[0];
  const double stated = -(std::sqrt(3.0) - 1.0);
  const auto residual = [](double v) { return std::abs(1.0 - v + v * std::abs(v) / 2.0); };
  const bool scalar_ok = std::abs(s - stated) <= 1e-6;
  detail += fmt::format("scalar root {:.9f} (stationarity residual {:.1e}); stated -(sqrt3-1) = {:.9f} has residual "
                        "{:.3f}; |diff| {:.3e}; ",
                        s, residual(s), stated, residual(stated), std::abs(s - stated));

  long beaten = 0;
  const int instances = 20;
  for (int t = 0; t < instances; ++t) {
    Matrix B(10, 10);
    rng.fill_gaussian(B);
    const Model m{rng.gaussian(10), DenseHessian<double>(0.5 * (B + B.transpose())), 0.5 + rng.uniform()};
    const auto sol = solve_cubic_subproblem(m, {}, rng);
    double bound = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const Vector u = rng.gaussian(10).normalized();
      bound = std::min(bound, line_minimum(m.g.dot(u), u.dot(m.H.matrix() * u), m.alpha));
    }
    if (m.value(sol.s) <= bound + 1e-9) ++beaten;
  }
  detail += fmt::format("random d=10: {}/{} beat the 1e5-direction bound; ", beaten, instances);

  long steps = 0, residual_fail = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (const auto& c : saddle_run(seed).certificates) {
      ++steps;
      if (c.residual > c.tolerance) ++residual_fail;
    }
  detail += fmt::format("accepted steps with residual above tolerance: {} of {}", residual_fail, steps);
  return {scalar_ok && beaten == instances && residual_fail == 0, detail};
}

Verdict saddle_escape() {
  const ProblemSpec p = ProblemSpec::strict_saddle_2d(1e-3);
  int escaped = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = saddle_run(seed);
    if (second_order_criterion(p, r.x).lambda_min > 0) ++escaped;
  }
  // Plain zeroth-order gradient descent with the same oracle budget, for contrast.
  int stuck = 0;
  const long budget = 50 * (2 * 100 + 3 * 1000);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng start(1000 + seed);
    RunOptions o;
    o.seed = seed;
    o.x0 = 1e-6 * start.gaussian(2);
    const auto r = zsgd(p, HighDimSchedule::practical(HighDimMode::nonconvex, budget / 2, 1.0 / 12.0, 0.1, 2), o);
    if (r.x.norm() < 0.1) ++stuck;
  }
  return {escaped >= 18, fmt::format("{}/20 runs end with lambda_min > 0 (need >= 18); zeroth-order gradient "
                                     "descent with the same budget left {}/20 runs within 0.1 of the saddle",
                                     escaped, stuck)};
}

Verdict accounting() {
  long runs = 0, mismatches = 0;
  const auto expect = [&](const RunRecord& r, std::uint64_t gradient, std::uint64_t hessian) {
    ++runs;
    if (r.gradient_calls != gradient || r.hessian_calls != hessian || r.total_calls != gradient + hessian) ++mismatches;
  };
  const auto from_steps = [](const RunRecord& r, int per_sample, bool hessian) {
    std::uint64_t total = 0;
    for (const auto& s : r.steps) total += static_cast<std::uint64_t>(per_sample * (hessian ? s.b : s.m));
    return total;
  };
  const Index d = 6;
  const ProblemSpec q =
      ProblemSpec::quadratic_with_minimizer(Vector::LinSpaced(d, 1.0, 3.0).asDiagonal(), Vector::Constant(d, 0.1), 1e-3);
  const auto ball = ConstraintSet<double>::l1_ball(1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RunOptions o;
    o.seed = seed;
    for (long N : {1L, 7L, 30L}) {
      for (bool convex : {false, true}) {
        auto r = zscg(q, ball, ZscgSchedule::paper_nonconvex(N, d, 1.0), o).record;
        if (convex) r = zscg(q, ball, ZscgSchedule::paper_convex(N, d, 1.0), o).record;
        expect(r, from_steps(r, 2, false), 0);
      }
      auto acc = zscg_accelerated(q, ball, AcceleratedSchedule::practical(N, q.lipschitz_grad(), 4.0, 0.01, 3), o).record;
      expect(acc, from_steps(acc, 2, false), 0);
      auto inexact = zsgd_inexact_nonconvex(q, ball, InexactSchedule::practical(N, q.lipschitz_grad(), 0.01, 9), o).record;
      expect(inexact, from_steps(inexact, 2, false), 0);
      auto sgd = zsgd(q, HighDimSchedule::practical(HighDimMode::nonconvex, N, 0.05, 0.01, d), o).record;
      expect(sgd, from_steps(sgd, 2, false), 0);
      auto trunc = zsgd_truncated(q, HighDimSchedule::practical(HighDimMode::convex_truncated, N, 0.05, 0.01, 3), o).record;
      expect(trunc, from_steps(trunc, 2, false), 0);
      CubicParams params = CubicParams::practical(N, 5.0, 0.05, 10, 20);
      for (long k = 0; k < N; ++k) {
        params.m[static_cast<std::size_t>(k)] = 3 + k;
        params.b[static_cast<std::size_t>(k)] = 5 + 2 * k;
      }
      auto cubic = zscrn(q, params, o).record;
      expect(cubic, from_steps(cubic, 2, false), from_steps(cubic, 3, true));
    }
  }
  return {mismatches == 0, fmt::format("{} runs across all solvers, {} with miscounted oracle calls", runs, mismatches)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-13)")->check(CLI::Range(1, 13));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "Stein gradient identity", 10, stein_gradient},
      {2, "Stein Hessian identity", 30, stein_hessian},
      {3, "smoothing bounds", 0, smoothing_bounds},
      {4, "l_inf moment bound", 0, linf_moments},
      {5, "LMO, projection and truncation oracles", 0, oracle_equivalence},
      {6, "ICG certificate and distance bound", 0, icg_certificate_distance},
      {7, "gradient-mapping sandwich", 0, gradient_mapping_sandwich},
      {8, "ZSCG nonconvex rate trend", 300, zscg_rate},
      {9, "high-dimensional implicit regularization", 600, implicit_regularization},
      {10, "truncated ZSGD convex trend", 0, truncated_trend},
      {11, "cubic subproblem correctness", 0, cubic_subproblem},
      {12, "saddle escape", 120, saddle_escape},
      {13, "oracle-call accounting", 0, accounting},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt::format("{:.1f}s", seconds);
    if (c.time_limit > 0) {
      timing += fmt::format(" of {:.0f}s allowed", c.time_limit);
      if (seconds >= c.time_limit) v.pass = false;
    }
    fmt::print("{} criterion {:02d} {}: {} [{}]\n", v.pass ? "PASS" : "FAIL", c.id, c.title, v.detail, timing);
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "zo/cg_solvers.hpp"
#include "zo/errors.hpp"

using namespace zo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

ProblemSpec small_convex_quadratic(Index d, double noise = 0.0) {
  Rng rng(314);
  Matrix B(d, d);
  rng.fill_gaussian(B);
  const Matrix A = B.transpose() * B / static_cast<double>(d) + 0.1 * Matrix::Identity(d, d);
  return ProblemSpec::quadratic_with_minimizer(A, Vector::Constant(d, 0.05), noise);
}

RunOptions with_seed(std::uint64_t seed, bool keep = true) {
  RunOptions o;
  o.seed = seed;
  o.keep_iterates = keep;
  return o;
}

}  // namespace

TEST_SUITE("cg_solvers") {

TEST_CASE("gamma products match the closed form and weights sum to one") {
  const long N = 200;
  const auto s = ZscgSchedule::paper_convex(N, 3, 1.0);
  const auto gamma = gamma_products(s.alpha);
  for (long k = 0; k <= N; ++k) {
    const double kk = static_cast<double>(k);
    CHECK(gamma[static_cast<std::size_t>(k)] ==
          doctest::Approx(60.0 / ((kk + 3) * (kk + 4) * (kk + 5))).epsilon(1e-13));
  }
  const auto w = s.output_weights();
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double p : w) CHECK(p > 0);
}

TEST_CASE("theoretical schedules match their closed forms") {
  const long N = 50;
  const Index d = 7;
  const double B = 2.5, L = 3.0, D0 = 0.8;
  const auto nc = ZscgSchedule::paper_nonconvex(N, d, B);
  CHECK(nc.nu == doctest::Approx(std::sqrt(2 * B / (N * 1000.0))));
  CHECK(nc.alpha[17] == doctest::Approx(1 / std::sqrt(50.0)));
  CHECK(nc.m[0] == static_cast<long>(std::ceil(2 * B * 12 * N)));

  const auto cv = ZscgSchedule::paper_convex(N, d, B);
  CHECK(cv.nu == doctest::Approx(std::sqrt(2 * B / (2500.0 * 1000.0))));
  CHECK(cv.alpha[0] == doctest::Approx(1.0));
  CHECK(cv.alpha[9] == doctest::Approx(6.0 / 15.0));
  CHECK(cv.m[3] == static_cast<long>(std::ceil(2 * B * 12 * 2500.0)));

  const auto acc = AcceleratedSchedule::paper(N, d, L, D0, B);
  CHECK(acc.alpha[0] == 1.0);
  CHECK(acc.gamma[4] == doctest::Approx(4 * L / 5));
  CHECK(acc.mu[4] == doctest::Approx(L * D0 / (5.0 * N)));
  CHECK(acc.nu == doctest::Approx(std::max(0.1, std::sqrt(D0 / (7.0 * 51))) / std::sqrt(100.0)));
  CHECK(acc.m[2] == static_cast<long>(std::ceil(12.0 / D0 * std::max(12 * B * N, 10.0))));

  const auto in = InexactSchedule::paper(N, d, L);
  CHECK(in.nu == doctest::Approx(std::sqrt(1 / (100.0 * 1000.0))));
  CHECK(in.gamma == 2 * L);
  CHECK(in.mu == doctest::Approx(1 / 200.0));
  CHECK(in.m == 6 * 12 * N);
}

TEST_CASE("logged schedule values equal the schedule") {
  const auto p = small_convex_quadratic(4);
  const auto set = ConstraintSet<double>::l1_ball(1);
  const auto s = ZscgSchedule::paper_convex(6, 4, 1.0);
  const auto res = zscg(p, set, s, with_seed(1));
  REQUIRE(res.record.steps.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(res.record.steps[i].alpha == s.alpha[i]);
    CHECK(res.record.steps[i].m == s.m[i]);
    CHECK(res.record.steps[i].nu == s.nu);
  }
}

TEST_CASE("single full step lands on the LMO vertex") {
  const auto p = small_convex_quadratic(5, 0.01);
  const auto set = ConstraintSet<double>::l1_ball(1);
  const auto s = ZscgSchedule::practical(false, 1, 0.01, 10);
  REQUIRE(s.alpha[0] == 1.0);
  const auto res = zscg(p, set, s, with_seed(3));
  CHECK(res.record.output_index == 1);
  CHECK(res.x == lmo(set, res.record.gradient_estimates[0]));
}

TEST_CASE("linear objective over a box reaches the minimizing vertex") {
  const auto p = ProblemSpec::linear(vec({1, -2, 0.5}));
  const auto box = ConstraintSet<double>::box(3, -1, 1);
  const auto s = ZscgSchedule::practical(true, 50, 0.01, 2000);
  const auto res = zscg(p, box, s, with_seed(5));
  const Vector last = res.record.iterates.back();
  CHECK((last - vec({-1, 1, -1})).norm() <= 1e-6);
  CHECK(fw_gap(p, box, last) <= 1e-6);
}

TEST_CASE("oracle accounting equals twice the total batch") {
  const auto p = small_convex_quadratic(3, 0.1);
  const auto set = ConstraintSet<double>::l2_ball(1);
  const auto s = ZscgSchedule::paper_nonconvex(10, 3, 1.0);
  const auto res = zscg(p, set, s, with_seed(9));
  const long total = std::accumulate(s.m.begin(), s.m.end(), 0L);
  CHECK(res.record.total_calls == 2u * static_cast<std::uint64_t>(total));
  CHECK(res.record.rows.back().is_output);
  CHECK(res.record.lmo_calls == 10);
}

TEST_CASE("every iterate of every solver is feasible") {
  const auto p = small_convex_quadratic(6, 0.05);
  for (const auto& set : {ConstraintSet<double>::l1_ball(1), ConstraintSet<double>::simplex(1),
                          ConstraintSet<double>::box(6, -0.5, 0.5)}) {
    CAPTURE(set.name());
    const auto a = zscg(p, set, ZscgSchedule::practical(false, 30, 0.01, 20), with_seed(1));
    const auto b = zscg_accelerated(p, set, AcceleratedSchedule::practical(30, p.lipschitz_grad(), 1.0, 0.01, 2),
                                    with_seed(2));
    const auto c = zsgd_inexact_nonconvex(p, set, InexactSchedule::practical(30, p.lipschitz_grad(), 0.01, 20),
                                          with_seed(3));
    for (const auto* r : {&a, &b, &c})
      for (const auto& x : r->record.iterates) CHECK(set.contains(x, 1e-9));
  }
}

TEST_CASE("equal seeds reproduce the trace byte for byte") {
  const auto p = small_convex_quadratic(4, 0.2);
  const auto set = ConstraintSet<double>::l1_ball(1);
  const auto s = ZscgSchedule::practical(false, 40, 0.05, 5);
  const auto a = zscg(p, set, s, with_seed(77));
  const auto b = zscg(p, set, s, with_seed(77));
  const auto c = zscg(p, set, s, with_seed(78));
  CHECK(trace_csv(a.record) == trace_csv(b.record));
  CHECK(a.x == b.x);
  CHECK(trace_csv(a.record) != trace_csv(c.record));
}

TEST_CASE("verification never changes the trajectory") {
  const auto p = small_convex_quadratic(4, 0.2);
  const auto set = ConstraintSet<double>::l2_ball(1);
  RunOptions on = with_seed(12), off = with_seed(12);
  off.verify = false;
  const auto s = AcceleratedSchedule::practical(20, p.lipschitz_grad(), 1.0, 0.01, 3);
  const auto a = zscg_accelerated(p, set, s, on);
  const auto b = zscg_accelerated(p, set, s, off);
  CHECK(a.record.iterates == b.record.iterates);
  CHECK(a.record.verified);
  CHECK_FALSE(b.record.verified);
  CHECK(std::isnan(b.record.rows[3].fw_gap));
  CHECK(std::isfinite(a.record.rows[3].fw_gap));
}

TEST_CASE("accelerated method with huge mu takes one LMO per step") {
  const auto p = small_convex_quadratic(5, 0.01);
  const auto set = ConstraintSet<double>::l2_ball(1);
  auto s = AcceleratedSchedule::practical(15, p.lipschitz_grad(), 1.0, 0.01, 4);
  for (auto& m : s.mu) m = 1e12;
  const auto res = zscg_accelerated(p, set, s, with_seed(4));
  CHECK(res.record.lmo_calls == 15);
  for (const auto& x : res.record.iterates) CHECK(set.contains(x));
  CHECK(res.record.output_index == 15);
  CHECK(res.x == res.record.iterates.back());
}

TEST_CASE("accelerated accounting separates oracle calls and LMO calls") {
  const auto p = small_convex_quadratic(5, 0.01);
  const auto set = ConstraintSet<double>::l2_ball(1);
  const auto s = AcceleratedSchedule::practical(12, p.lipschitz_grad(), 0.5, 0.01, 3);
  const auto res = zscg_accelerated(p, set, s, with_seed(6));
  const long total = std::accumulate(s.m.begin(), s.m.end(), 0L);
  CHECK(res.record.total_calls == 2u * static_cast<std::uint64_t>(total));
  CHECK(res.record.lmo_calls >= 12);
  CHECK(res.record.rows.back().lmo_calls == res.record.lmo_calls);
}

TEST_CASE("accelerated method improves with N") {
  const auto p = small_convex_quadratic(10, 0.01);
  const auto set = ConstraintSet<double>::l2_ball(0.5);
  auto median_gap = [&](long N) {
    std::vector<double> gaps;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = AcceleratedSchedule::practical(N, p.lipschitz_grad(), 0.25, 0.001, 10);
      gaps.push_back(zscg_accelerated(p, set, s, with_seed(seed, false)).record.output_criteria.at("f_gap"));
    }
    std::sort(gaps.begin(), gaps.end());
    return 0.5 * (gaps[9] + gaps[10]);
  };
  CHECK(median_gap(64) < median_gap(16));
}

TEST_CASE("inexact method with N = 1 outputs x0") {
  const auto p = ProblemSpec::strict_saddle_2d(0.01);
  const auto box = ConstraintSet<double>::box(2, -2, 2);
  RunOptions o = with_seed(2);
  o.x0 = vec({0.5, 0.5});
  const auto res = zsgd_inexact_nonconvex(p, box, InexactSchedule::paper(1, 2, p.lipschitz_grad()), o);
  CHECK(res.record.output_index == 0);
  CHECK(res.x == vec({0.5, 0.5}));
  bool has_row_zero = false;
  for (const auto& r : res.record.rows) has_row_zero = has_row_zero || (r.k == 0 && r.is_output);
  CHECK(has_row_zero);
}

TEST_CASE("inexact iterates replay their prox certificate") {
  const auto p = ProblemSpec::strict_saddle_2d(0.05);
  const auto box = ConstraintSet<double>::box(2, -2, 2);
  const auto s = InexactSchedule::practical(60, p.lipschitz_grad(), 0.01, 50);
  RunOptions o = with_seed(8);
  o.x0 = vec({0.1, 1.0});
  const auto res = zsgd_inexact_nonconvex(p, box, s, o);
  const auto& xs = res.record.iterates;
  REQUIRE(xs.size() == 61);
  for (std::size_t k = 1; k < xs.size(); ++k)
    CHECK(icg_certificate(box, xs[k - 1], res.record.gradient_estimates[k - 1], s.gamma, xs[k]) >= -s.mu);
}

TEST_CASE("output index follows the declared support") {
  const auto p = small_convex_quadratic(2, 0.01);
  const auto set = ConstraintSet<double>::l1_ball(1);
  std::vector<int> hits(6, 0);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto r = zscg(p, set, ZscgSchedule::practical(false, 5, 0.1, 1), with_seed(seed, false));
    REQUIRE(r.record.output_index >= 1);
    REQUIRE(r.record.output_index <= 5);
    ++hits[static_cast<std::size_t>(r.record.output_index)];
    const auto q = zsgd_inexact_nonconvex(p, set, InexactSchedule::practical(5, 1.0, 0.1, 1), with_seed(seed, false));
    REQUIRE(q.record.output_index >= 0);
    REQUIRE(q.record.output_index <= 4);
  }
  for (int k = 1; k <= 5; ++k) CHECK(hits[static_cast<std::size_t>(k)] > 30);
}

TEST_CASE("constrained optimum by projected gradient") {
  const Matrix A = vec({1, 2}).asDiagonal();
  const auto p = ProblemSpec::quadratic_with_minimizer(A, vec({2, 0}));
  const auto ball = ConstraintSet<double>::l2_ball(1);
  const auto xs = constrained_minimizer(p, ball);
  REQUIRE(xs);
  CHECK((*xs - vec({1, 0})).norm() <= 1e-8);
  CHECK(*constrained_optimum(p, ball) == doctest::Approx(0.5));
  CHECK_FALSE(constrained_optimum(ProblemSpec::strict_saddle_2d(), ConstraintSet<double>::box(2, 2, 3)));
}

TEST_CASE("infeasible start is rejected") {
  const auto p = small_convex_quadratic(2);
  RunOptions o;
  o.x0 = vec({3, 3});
  CHECK_THROWS_AS(zscg(p, ConstraintSet<double>::l1_ball(1), ZscgSchedule::practical(false, 3, 0.1, 1), o),
                  ContractViolation);
}

TEST_CASE("icg budget failures name the iteration") {
  const auto p = small_convex_quadratic(3, 0.0);
  const auto set = ConstraintSet<double>::l2_ball(1);
  auto s = InexactSchedule::practical(5, p.lipschitz_grad(), 0.01, 5);
  s.mu = 0.0;
  s.icg_max_iters = 2;
  RunOptions o;
  o.x0 = vec({0.9, 0, 0});
  try {
    zsgd_inexact_nonconvex(p, set, s, o);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(std::string(e.what()).find("iteration 1") != std::string::npos);
  }
}

TEST_CASE("trace points") {
  CHECK(trace_points(5).size() == 6);
  const auto pts = trace_points(100000);
  CHECK(pts.front() == 0);
  CHECK(pts.back() == 100000);
  CHECK(pts.size() <= 101);
  CHECK(pts.size() >= 80);
}

}

#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "zo/cg_solvers.hpp"
#include "zo/harness.hpp"
#include "zo/highdim_solvers.hpp"

using namespace zo;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

TEST_SUITE("solver_trends") {

// The theoretical convex batch grows like N^2 (about a minute per run at N = 100),
// so this trend uses 3 seeds.
TEST_CASE("convex zscg: frank-wolfe gap shrinks from N = 25 to N = 100") {
  const Index d = 20;
  const Matrix A = Vector::LinSpaced(d, 0.5, 2.0).asDiagonal();
  const ProblemSpec problem = ProblemSpec::quadratic_with_minimizer(A, Vector::LinSpaced(d, -1.0, 1.0), 1e-3);
  const auto ball = ConstraintSet<double>::l1_ball(1.0);
  const double B_Lsigma = default_B_Lsigma(problem, ball, default_start(ball, d));
  std::map<long, double> gap;
  for (long N : {25L, 100L}) {
    std::vector<double> per_seed;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      RunOptions o;
      o.seed = seed;
      per_seed.push_back(zscg(problem, ball, ZscgSchedule::paper_convex(N, d, B_Lsigma), o).record.expected_criteria.at("fw_gap"));
    }
    gap[N] = mean(per_seed);
  }
  INFO("N=25: " << gap[25] << ", N=100: " << gap[100]);
  CHECK(gap[100] < gap[25]);
}

TEST_CASE("inexact method on the strict saddle: gradient mapping shrinks from N = 100 to N = 400") {
  const ProblemSpec saddle = ProblemSpec::strict_saddle_2d(1e-3);
  const auto box = ConstraintSet<double>::box(2, -2.0, 2.0);
  std::map<long, double> gp;
  for (long N : {100L, 400L}) {
    std::vector<double> per_seed;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      const auto r = zsgd_inexact_nonconvex(saddle, box, InexactSchedule::paper(N, 2, saddle.lipschitz_grad()), o);
      per_seed.push_back(r.record.output_criteria.at("gp_norm_sq"));
    }
    gp[N] = median_of(per_seed);
  }
  INFO("N=100: " << gp[100] << ", N=400: " << gp[400]);
  CHECK(gp[400] < gp[100]);
}

TEST_CASE("truncated method: optimality gap of the average shrinks from N = 1000 to N = 10000") {
  const ProblemSpec inner =
      ProblemSpec::quadratic_with_minimizer(Vector(Vector::LinSpaced(5, 1.0, 0.4)).asDiagonal(), Vector::Ones(5));
  const ProblemSpec p = ProblemSpec::sparse_support(500, {3, 77, 150, 299, 480}, inner, 1e-3);
  std::map<long, double> gap;
  for (long N : {1000L, 10000L}) {
    std::vector<double> per_seed;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      RunOptions o;
      o.seed = seed;
      const auto schedule = HighDimSchedule::practical_sqrt_n(HighDimMode::convex_truncated, N, 1.0, 0.01, 10);
      per_seed.push_back(zsgd_truncated(p, schedule, o).record.output_criteria.at("f_gap"));
    }
    gap[N] = median_of(per_seed);
  }
  INFO("N=1000: " << gap[1000] << ", N=10000: " << gap[10000]);
  CHECK(gap[10000] < gap[1000]);
}

}  // TEST_SUITE

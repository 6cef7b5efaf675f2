#ifndef ZO_HIGHDIM_SOLVERS_HPP
#define ZO_HIGHDIM_SOLVERS_HPP

#include <string>

#include <json.hpp>

#include "zo/cg_solvers.hpp"
#include "zo/oracle.hpp"
#include "zo/run_record.hpp"

namespace zo {

enum class HighDimMode { nonconvex, convex_truncated };

std::string to_string(HighDimMode mode);

// Constant-step single-sample SGD in the (l_inf, l_1) geometry. The theoretical
// rules use natural logarithms and need d >= 2.
struct HighDimSchedule {
  HighDimMode mode = HighDimMode::nonconvex;
  ScheduleMode schedule_mode = ScheduleMode::paper;
  long N = 1;
  double gamma = 0.0;
  double nu = 1e-3;
  long s_hat = 1;
  double C_hat = 2.0;
  // Initial-gap bound: f(x0) - f* for zsgd, ||x0 - x*||^2 for the truncated method.
  double D0 = kNaN;
  double sigma = kNaN;
  double L = kNaN;

  // gamma = 1/(2 L C log d) min{1/(12 s log d), sqrt(D0 L C / (2 N sigma^2))}
  // nu    = 1/sqrt(L C log d) min{sqrt(2 sigma^2 / L), sqrt(D0 / N)}
  static HighDimSchedule paper_nonconvex(long N, Index d, double L, long s_hat, double D0,
                                         double sigma = 1.0, double C_hat = 2.0);
  // gamma = 1/(4 C s log d) min{1/(12 L s log d), sqrt(D0 C s / (3 N sigma^2))}
  // nu    = sqrt(log d) min{sigma / log d, sqrt(s^2 D0 / N)}
  static HighDimSchedule paper_truncated(long N, Index d, double L, long s_hat, double D0,
                                         double sigma = 1.0, double C_hat = 2.0);
  static HighDimSchedule practical(HighDimMode mode, long N, double gamma, double nu, long s_hat);
  // gamma = gamma0 / sqrt(N).
  static HighDimSchedule practical_sqrt_n(HighDimMode mode, long N, double gamma0, double nu, long s_hat);

  void validate(Index d) const;
  nlohmann::json echo() const;
};

// Keeps the s_hat largest-magnitude entries (lowest index wins ties), zeroes the rest.
Vector truncate_top_s(const Vector& y, long s_hat);

inline constexpr double kDivergenceThreshold = 1e8;

// x_k = x_{k-1} - gamma G(x_{k-1}); returns x_R with R uniform on {0..N-1}.
// x0 defaults to the origin.
SolverResult zsgd(const ProblemSpec& problem, const HighDimSchedule& schedule, const RunOptions& options = {});

// x_k = P_s(x_{k-1} - gamma G(x_{k-1})); returns the average of x_0..x_{N-1}.
SolverResult zsgd_truncated(const ProblemSpec& problem, const HighDimSchedule& schedule,
                            const RunOptions& options = {});

}  // namespace zo

#endif  // ZO_HIGHDIM_SOLVERS_HPP

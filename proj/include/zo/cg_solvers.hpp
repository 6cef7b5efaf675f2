#ifndef ZO_CG_SOLVERS_HPP
#define ZO_CG_SOLVERS_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zo/constraints.hpp"
#include "zo/oracle.hpp"
#include "zo/run_record.hpp"

namespace zo {

// paper: the theoretical step sizes, radii and batch sizes; practical: user-chosen
// radii and batches.
enum class ScheduleMode { paper, practical };

std::string to_string(ScheduleMode mode);

// Stochastic conditional gradient (Frank-Wolfe with averaged two-point gradients).
// Nonconvex variant: constant step, output z_R with R uniform on {1..N}.
// Convex variant: step 6/(k+5), output z_R with R drawn from gamma-weights.
struct ZscgSchedule {
  bool convex = false;
  ScheduleMode mode = ScheduleMode::paper;
  long N = 1;
  double nu = 1e-3;
  std::vector<double> alpha;  // alpha[k-1] for k = 1..N
  std::vector<long> m;        // m[k-1]
  double B_Lsigma = kNaN;

  // nu = sqrt(2B/(N(d+3)^3)), alpha = 1/sqrt(N), m = 2B(d+5)N.
  static ZscgSchedule paper_nonconvex(long N, Index d, double B_Lsigma);
  // nu = sqrt(2B/(N^2(d+3)^3)), alpha_k = 6/(k+5), m = 2B(d+5)N^2.
  static ZscgSchedule paper_convex(long N, Index d, double B_Lsigma);
  // Theoretical step sizes with a user smoothing radius and constant batch.
  static ZscgSchedule practical(bool convex, long N, double nu, long m);

  // P(R = k) for k = 1..N.
  std::vector<double> output_weights() const;
  void validate() const;
  nlohmann::json echo() const;
};

// Gamma_k = prod_{i<=k} (1 - alpha_i / 2), k = 0..N.
std::vector<double> gamma_products(const std::vector<double>& alpha);
// alpha_k Gamma_N / (2 Gamma_k (1 - Gamma_N)), k = 1..N.
std::vector<double> gamma_output_weights(const std::vector<double>& alpha);

// Accelerated method with inexact (conditional-gradient) prox updates.
struct AcceleratedSchedule {
  ScheduleMode mode = ScheduleMode::paper;
  long N = 1;
  double nu = 1e-3;
  double L = 1;
  double D_X0 = 1;
  double B_Lsigma = kNaN;
  std::vector<double> alpha;  // 2/(k+1)
  std::vector<double> gamma;  // 4L/k
  std::vector<double> mu;     // L D_X0 / (k N)
  std::vector<long> m;
  long icg_max_iters = 0;  // 0: default cap

  // m_k = ceil(k(k+1)/D_X0 * max{(d+5) B N, d+3}).
  static AcceleratedSchedule paper(long N, Index d, double L, double D_X0, double B_Lsigma);
  // m_k = ceil(m0 k(k+1)/2) with a user nu.
  static AcceleratedSchedule practical(long N, double L, double D_X0, double nu, long m0);

  void validate() const;
  nlohmann::json echo() const;
};

// Projected-gradient style method with inexact prox updates, nonconvex case.
// Output x_R with R uniform on {0..N-1}.
struct InexactSchedule {
  ScheduleMode mode = ScheduleMode::paper;
  long N = 1;
  double nu = 1e-3;
  double gamma = 1;
  double mu = 0;
  long m = 1;
  long icg_max_iters = 0;

  // nu = sqrt(1/(2N(d+3)^3)), gamma = 2L, mu = 1/(4N), m = 6(d+5)N.
  static InexactSchedule paper(long N, Index d, double L);
  static InexactSchedule practical(long N, double L, double nu, long m);

  void validate() const;
  nlohmann::json echo() const;
};

// Reference constants for schedule defaults: B = L D_X + ||grad f(x_ref)||
// where x_ref is the constrained optimum when known (else x0), and
// B_Lsigma = max{sqrt(B^2 + sigma^2)/L, 1}.
double default_B_Lsigma(const ProblemSpec& problem, const ConstraintSet<double>& set,
                        const Vector& x0, double sigma = 0.0);

// Constrained optimum value: the unconstrained one when the minimizer is
// feasible, an accelerated projected-gradient solve for convex problems,
// nothing otherwise.
std::optional<double> constrained_optimum(const ProblemSpec& problem, const ConstraintSet<double>& set);
std::optional<Vector> constrained_minimizer(const ProblemSpec& problem, const ConstraintSet<double>& set);

// Default start: the projection of the origin.
Vector default_start(const ConstraintSet<double>& set, Index d);

SolverResult zscg(const ProblemSpec& problem, const ConstraintSet<double>& set,
                  const ZscgSchedule& schedule, const RunOptions& options = {});

SolverResult zscg_accelerated(const ProblemSpec& problem, const ConstraintSet<double>& set,
                              const AcceleratedSchedule& schedule, const RunOptions& options = {});

SolverResult zsgd_inexact_nonconvex(const ProblemSpec& problem, const ConstraintSet<double>& set,
                                    const InexactSchedule& schedule, const RunOptions& options = {});

}  // namespace zo

#endif  // ZO_CG_SOLVERS_HPP

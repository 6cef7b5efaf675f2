#include "zo/constraints.hpp"

namespace zo {

double fw_gap(const ProblemSpec& problem, const ConstraintSet<double>& set, const Vector& x) {
  const Vector g = problem.reference_gradient(x);
  return g.dot(x - lmo(set, g));
}

Vector gradient_mapping(const ProblemSpec& problem, const ConstraintSet<double>& set,
                        const Vector& x, double gamma) {
  const Vector g = problem.reference_gradient(x);
  return gamma * (x - prox_exact(set, x, g, gamma));
}

}  // namespace zo

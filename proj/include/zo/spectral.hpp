#ifndef ZO_SPECTRAL_HPP
#define ZO_SPECTRAL_HPP

#include <cmath>
#include <cstdint>

#include "zo/rng.hpp"
#include "zo/types.hpp"

namespace zo {

template <typename Scalar>
struct EigenEstimate {
  Scalar value = 0;
  VectorX<Scalar> vector;
  int iterations = 0;
  bool converged = false;
};

struct PowerIterationOptions {
  double tolerance = 1e-6;
  int max_iterations = 5000;
  std::uint64_t start_seed = 0x5eed;
};

// Smallest eigenvalue of a symmetric operator given only its action v -> Hv.
// Runs power iteration on (shift I - H); `shift` must bound lambda_max(H) from
// above so the shifted operator is positive semidefinite.
template <typename Scalar, typename MatVec>
EigenEstimate<Scalar> min_eigenvalue(MatVec&& matvec, Index dim, Scalar shift,
                                     const PowerIterationOptions& opts = {}) {
  EigenEstimate<Scalar> out;
  Rng rng(opts.start_seed);
  VectorX<Scalar> v = rng.gaussian(dim).template cast<Scalar>();
  v.normalize();
  Scalar rho = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    VectorX<Scalar> w = shift * v - matvec(v);
    const Scalar next_rho = v.dot(w);
    const Scalar norm = w.norm();
    out.iterations = it;
    if (norm == Scalar(0)) {
      // v lies in the null space of (shift I - H): lambda_min == shift.
      rho = 0;
      out.converged = true;
      break;
    }
    v = w / norm;
    const bool settled = it > 1 && std::abs(next_rho - rho) <=
                                       Scalar(opts.tolerance) * std::max(Scalar(1), std::abs(next_rho));
    rho = next_rho;
    if (settled) {
      out.converged = true;
      break;
    }
  }
  // Final Rayleigh quotient on H itself.
  out.value = v.dot(matvec(v));
  out.vector = std::move(v);
  return out;
}

}  // namespace zo

#endif  // ZO_SPECTRAL_HPP

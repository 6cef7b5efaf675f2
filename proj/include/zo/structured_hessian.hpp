#ifndef ZO_STRUCTURED_HESSIAN_HPP
#define ZO_STRUCTURED_HESSIAN_HPP

#include <cmath>
#include <cstdint>

#include <fmt/core.h>

#include "zo/errors.hpp"
#include "zo/spectral.hpp"
#include "zo/types.hpp"

namespace zo {

// H = sum_i c_i u_i u_i' + shift * I, stored as the direction matrix U (d x b),
// the coefficient vector c and the scalar shift. Products with H cost O(b d);
// the d x d matrix is only formed by materialize() and only for small d.
template <typename Scalar>
class StructuredHessian {
 public:
  StructuredHessian() = default;

  StructuredHessian(MatrixX<Scalar> directions, VectorX<Scalar> coefficients, Scalar identity_shift,
                    std::uint64_t oracle_calls = 0)
      : directions_(std::move(directions)),
        coefficients_(std::move(coefficients)),
        identity_shift_(identity_shift),
        oracle_calls_(oracle_calls) {
    require(directions_.cols() == coefficients_.size(),
            "StructuredHessian: one coefficient per direction");
  }

  // Shift chosen as -sum(c), which is the (uu' - I) weighting of the Stein estimators.
  static StructuredHessian from_stein_terms(MatrixX<Scalar> directions, VectorX<Scalar> coefficients,
                                            std::uint64_t oracle_calls = 0) {
    const Scalar shift = -coefficients.sum();
    return StructuredHessian(std::move(directions), std::move(coefficients), shift, oracle_calls);
  }

  Index dim() const { return directions_.rows(); }
  Index rank() const { return directions_.cols(); }
  const MatrixX<Scalar>& directions() const { return directions_; }
  const VectorX<Scalar>& coefficients() const { return coefficients_; }
  Scalar identity_shift() const { return identity_shift_; }
  std::uint64_t oracle_calls() const { return oracle_calls_; }

  template <typename Derived>
  VectorX<Scalar> matvec(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != dim())
      throw ContractViolation(
          fmt::format("hessian_matvec: vector has dimension {}, operator {}", v.size(), dim()));
    VectorX<Scalar> inner = directions_.transpose() * v;
    inner.array() *= coefficients_.array();
    VectorX<Scalar> out = directions_ * inner;
    out += identity_shift_ * v;
    return out;
  }

  // Upper bound on ||H||_2 from the terms: sum |c_i| ||u_i||^2 + |shift|.
  Scalar norm_bound() const {
    Scalar bound = std::abs(identity_shift_);
    for (Index i = 0; i < rank(); ++i)
      bound += std::abs(coefficients_[i]) * directions_.col(i).squaredNorm();
    return bound;
  }

  // Spectral shift mu with mu I - H >= 0.
  Scalar spectral_shift() const {
    Scalar mu = identity_shift_;
    for (Index i = 0; i < rank(); ++i)
      mu += std::abs(coefficients_[i]) * directions_.col(i).squaredNorm();
    return mu;
  }

  EigenEstimate<Scalar> min_eigen(const PowerIterationOptions& opts = {}) const {
    return min_eigenvalue<Scalar>([this](const VectorX<Scalar>& v) { return matvec(v); }, dim(),
                                  spectral_shift(), opts);
  }

  MatrixX<Scalar> materialize() const {
    if (dim() > kDenseLimit)
      throw ContractViolation(
          fmt::format("StructuredHessian: refusing dense materialization at d = {}", dim()));
    MatrixX<Scalar> h = directions_ * coefficients_.asDiagonal() * directions_.transpose();
    h.diagonal().array() += identity_shift_;
    // Mirror the upper triangle so the result is bitwise symmetric.
    h.template triangularView<Eigen::StrictlyLower>() = h.transpose();
    return h;
  }

 private:
  MatrixX<Scalar> directions_;
  VectorX<Scalar> coefficients_;
  Scalar identity_shift_ = 0;
  std::uint64_t oracle_calls_ = 0;
};

template <typename Scalar, typename Derived>
VectorX<Scalar> hessian_matvec(const StructuredHessian<Scalar>& h,
                               const Eigen::MatrixBase<Derived>& v) {
  return h.matvec(v);
}

// Dense symmetric operator with the same interface, for tests and small problems.
template <typename Scalar>
class DenseHessian {
 public:
  explicit DenseHessian(MatrixX<Scalar> m) : m_(std::move(m)) {
    require(m_.rows() == m_.cols(), "DenseHessian: matrix must be square");
  }
  Index dim() const { return m_.rows(); }
  template <typename Derived>
  VectorX<Scalar> matvec(const Eigen::MatrixBase<Derived>& v) const {
    require(v.size() == dim(), "DenseHessian: dimension mismatch");
    return m_ * v;
  }
  // Max absolute column sum, an upper bound on ||H||_2.
  Scalar norm_bound() const { return m_.cwiseAbs().colwise().sum().maxCoeff(); }
  Scalar spectral_shift() const { return norm_bound(); }
  EigenEstimate<Scalar> min_eigen(const PowerIterationOptions& opts = {}) const {
    return min_eigenvalue<Scalar>([this](const VectorX<Scalar>& v) { return matvec(v); }, dim(),
                                  spectral_shift(), opts);
  }
  const MatrixX<Scalar>& matrix() const { return m_; }

 private:
  MatrixX<Scalar> m_;
};

}  // namespace zo

#endif  // ZO_STRUCTURED_HESSIAN_HPP

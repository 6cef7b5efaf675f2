#ifndef ZO_TYPES_HPP
#define ZO_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>

namespace zo {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;
using Index = Eigen::Index;

// Dense materialization of d x d operators is only allowed at or below this size.
inline constexpr Index kDenseLimit = 64;

}  // namespace zo

#endif  // ZO_TYPES_HPP

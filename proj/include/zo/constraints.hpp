#ifndef ZO_CONSTRAINTS_HPP
#define ZO_CONSTRAINTS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "zo/errors.hpp"
#include "zo/oracle.hpp"
#include "zo/types.hpp"

namespace zo {

enum class SetKind { l1_ball, l2_ball, box, simplex };

// Compact convex feasible set. Balls and the simplex are centered at the
// origin and adapt to the dimension of their argument; a box fixes it.
// The simplex is {x >= 0, sum(x) = r}.
template <typename Scalar>
class ConstraintSet {
 public:
  static ConstraintSet l1_ball(Scalar radius) { return ConstraintSet(SetKind::l1_ball, radius); }
  static ConstraintSet l2_ball(Scalar radius) { return ConstraintSet(SetKind::l2_ball, radius); }
  static ConstraintSet simplex(Scalar radius) { return ConstraintSet(SetKind::simplex, radius); }
  static ConstraintSet box(VectorX<Scalar> lo, VectorX<Scalar> hi) {
    require(lo.size() == hi.size() && lo.size() > 0, "box: bounds must have equal, positive size");
    require((lo.array() <= hi.array()).all(), "box: lower bound exceeds upper bound");
    ConstraintSet s(SetKind::box, Scalar(0));
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
  }
  static ConstraintSet box(Index d, Scalar lo, Scalar hi) {
    return box(VectorX<Scalar>::Constant(d, lo), VectorX<Scalar>::Constant(d, hi));
  }

  SetKind kind() const { return kind_; }
  Scalar radius() const { return radius_; }
  const VectorX<Scalar>& lower() const { return lo_; }
  const VectorX<Scalar>& upper() const { return hi_; }

  std::string name() const {
    switch (kind_) {
      case SetKind::l1_ball: return "l1_ball";
      case SetKind::l2_ball: return "l2_ball";
      case SetKind::box: return "box";
      case SetKind::simplex: return "simplex";
    }
    return "unknown";
  }

  // max ||x - y||_2 over the set in dimension d.
  Scalar diameter(Index d) const {
    switch (kind_) {
      case SetKind::l1_ball:
      case SetKind::l2_ball: return 2 * radius_;
      case SetKind::box: return (hi_ - lo_).norm();
      case SetKind::simplex: return d >= 2 ? radius_ * std::sqrt(Scalar(2)) : Scalar(0);
    }
    return 0;
  }

  void check_dimension(Index d) const {
    if (kind_ == SetKind::box && d != lo_.size())
      throw ContractViolation(fmt::format("box has dimension {}, vector has {}", lo_.size(), d));
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& x, Scalar tol = Scalar(1e-9)) const {
    check_dimension(x.size());
    switch (kind_) {
      case SetKind::l1_ball: return x.template lpNorm<1>() <= radius_ + tol;
      case SetKind::l2_ball: return x.norm() <= radius_ + tol;
      case SetKind::box:
        return ((x.array() >= lo_.array() - tol) && (x.array() <= hi_.array() + tol)).all();
      case SetKind::simplex:
        return (x.array() >= -tol).all() && std::abs(x.sum() - radius_) <= tol * std::max<Scalar>(1, radius_);
    }
    return false;
  }

 private:
  ConstraintSet(SetKind kind, Scalar radius) : kind_(kind), radius_(radius) {
    if (kind != SetKind::box)
      require(radius > 0 && std::isfinite(static_cast<double>(radius)), "set radius must be positive");
  }

  SetKind kind_;
  Scalar radius_;
  VectorX<Scalar> lo_;
  VectorX<Scalar> hi_;
};

namespace detail {

// Euclidean projection of y onto {x >= 0, sum x = r}: sort, find the
// water level theta, clip.
template <typename Scalar>
VectorX<Scalar> project_simplex(const VectorX<Scalar>& y, Scalar r) {
  const Index d = y.size();
  std::vector<Scalar> sorted(y.data(), y.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar cumulative = 0;
  Scalar theta = 0;
  for (Index j = 0; j < d; ++j) {
    cumulative += sorted[j];
    const Scalar candidate = (cumulative - r) / static_cast<Scalar>(j + 1);
    if (sorted[j] - candidate > 0) theta = candidate;
  }
  return (y.array() - theta).cwiseMax(Scalar(0)).matrix();
}

template <typename Scalar>
Index lowest_argmax_abs(const VectorX<Scalar>& g) {
  Index best = 0;
  Scalar best_abs = std::abs(g[0]);
  for (Index i = 1; i < g.size(); ++i) {
    if (std::abs(g[i]) > best_abs) {
      best_abs = std::abs(g[i]);
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// argmin_{v in X} <g, v>. Ties go to the lowest index; g = 0 on a ball returns r e_0.
template <typename Scalar, typename Derived>
VectorX<Scalar> lmo(const ConstraintSet<Scalar>& set, const Eigen::MatrixBase<Derived>& direction) {
  const VectorX<Scalar> g = direction;
  set.check_dimension(g.size());
  if (!g.allFinite()) throw DomainError("lmo: direction has a non-finite coordinate");
  const Index d = g.size();
  VectorX<Scalar> v = VectorX<Scalar>::Zero(d);
  const Scalar r = set.radius();
  switch (set.kind()) {
    case SetKind::l1_ball: {
      const Index i = detail::lowest_argmax_abs(g);
      v[i] = g[i] > 0 ? -r : r;
      break;
    }
    case SetKind::l2_ball: {
      const Scalar n = g.norm();
      if (n > 0) v = (-r / n) * g;
      else v[0] = r;
      break;
    }
    case SetKind::box:
      for (Index i = 0; i < d; ++i) v[i] = g[i] >= 0 ? set.lower()[i] : set.upper()[i];
      break;
    case SetKind::simplex: {
      Index i = 0;
      g.minCoeff(&i);
      v[i] = r;
      break;
    }
  }
  return v;
}

template <typename Scalar, typename Derived>
VectorX<Scalar> project(const ConstraintSet<Scalar>& set, const Eigen::MatrixBase<Derived>& point) {
  const VectorX<Scalar> y = point;
  set.check_dimension(y.size());
  const Scalar r = set.radius();
  switch (set.kind()) {
    case SetKind::l1_ball: {
      if (y.template lpNorm<1>() <= r) return y;
      const VectorX<Scalar> magnitude = detail::project_simplex<Scalar>(y.cwiseAbs(), r);
      return magnitude.cwiseProduct(y.unaryExpr([](Scalar t) { return t < 0 ? Scalar(-1) : Scalar(1); }));
    }
    case SetKind::l2_ball: {
      const Scalar n = y.norm();
      return n <= r ? y : VectorX<Scalar>((r / n) * y);
    }
    case SetKind::box:
      return y.cwiseMax(set.lower()).cwiseMin(set.upper());
    case SetKind::simplex:
      return detail::project_simplex<Scalar>(y, r);
  }
  return y;
}

// argmin_{u in X} <g, u> + gamma/2 ||u - x||^2.
template <typename Scalar, typename DerivedX, typename DerivedG>
VectorX<Scalar> prox_exact(const ConstraintSet<Scalar>& set, const Eigen::MatrixBase<DerivedX>& x,
                           const Eigen::MatrixBase<DerivedG>& g, Scalar gamma) {
  require(gamma > 0, "prox_exact: gamma must be positive");
  return project(set, x - g / gamma);
}

template <typename Scalar>
struct IcgParams {
  Scalar gamma = 1;
  Scalar mu = 0;
  // 0 selects 10 * ceil(gamma D^2 / mu), or 100000 when mu = 0.
  long max_iters = 0;
};

template <typename Scalar>
struct IcgResult {
  VectorX<Scalar> point;
  long lmo_calls = 0;
  // h at the accepting LMO call: min_u <g + gamma(y - x), u - y>.
  Scalar h = 0;
};

template <typename Scalar>
long icg_default_cap(const ConstraintSet<Scalar>& set, Index d, Scalar gamma, Scalar mu) {
  if (!(mu > 0)) return 100000;
  const Scalar diam = set.diameter(d);
  const double ratio = static_cast<double>(gamma * diam * diam / mu);
  return 10 * std::max<long>(1, static_cast<long>(std::ceil(std::min(ratio, 1e9))));
}

// Conditional-gradient iterations on the prox quadratic, started at x, until
// the linearized gap h(y) >= -mu. Throws BudgetExceeded when the cap is hit.
template <typename Scalar, typename DerivedX, typename DerivedG>
IcgResult<Scalar> icg(const ConstraintSet<Scalar>& set, const Eigen::MatrixBase<DerivedX>& x_in,
                      const Eigen::MatrixBase<DerivedG>& g_in, const IcgParams<Scalar>& params) {
  const VectorX<Scalar> x = x_in;
  const VectorX<Scalar> g = g_in;
  require(params.gamma > 0, "icg: gamma must be positive");
  require(params.mu >= 0, "icg: mu must be nonnegative");
  require(x.size() == g.size(), "icg: x and g dimensions differ");
  const long cap = params.max_iters > 0 ? params.max_iters
                                        : icg_default_cap(set, x.size(), params.gamma, params.mu);
  IcgResult<Scalar> out;
  VectorX<Scalar> y = x;
  VectorX<Scalar> direction(x.size());
  for (long t = 1; t <= cap; ++t) {
    direction = g + params.gamma * (y - x);
    const VectorX<Scalar> vertex = lmo(set, direction);
    ++out.lmo_calls;
    const Scalar h = direction.dot(vertex - y);
    out.h = h;
    if (h >= -params.mu) {
      out.point = std::move(y);
      return out;
    }
    const Scalar tt = static_cast<Scalar>(t);
    y = ((tt - 1) / (tt + 1)) * y + (2 / (tt + 1)) * vertex;
  }
  throw BudgetExceeded(fmt::format("icg: no certificate after {} LMO calls (mu = {})", cap,
                                   static_cast<double>(params.mu)),
                       y.template cast<double>(), static_cast<double>(out.h), cap);
}

// min_u <g + gamma(y - x), u - y>, recomputed with a fresh LMO call.
template <typename Scalar, typename DerivedX, typename DerivedG, typename DerivedY>
Scalar icg_certificate(const ConstraintSet<Scalar>& set, const Eigen::MatrixBase<DerivedX>& x,
                       const Eigen::MatrixBase<DerivedG>& g, Scalar gamma,
                       const Eigen::MatrixBase<DerivedY>& y) {
  const VectorX<Scalar> direction = g + gamma * (y - x);
  return direction.dot(lmo(set, direction) - y);
}

// Verification metrics on the noiseless problem.
double fw_gap(const ProblemSpec& problem, const ConstraintSet<double>& set, const Vector& x);
Vector gradient_mapping(const ProblemSpec& problem, const ConstraintSet<double>& set,
                        const Vector& x, double gamma);

}  // namespace zo

#endif  // ZO_CONSTRAINTS_HPP

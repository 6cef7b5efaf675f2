#ifndef ZO_RNG_HPP
#define ZO_RNG_HPP

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <cstdint>

#include "zo/types.hpp"

namespace zo {

// Seeded random stream. Child streams derived with split() are a pure
// function of (seed, stream id), so a run is fully determined by its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng split(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL)));
  }

  double normal() { return normal_(engine_); }

  double uniform() { return uniform_(engine_); }

  // Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi) {
    boost::random::uniform_int_distribution<long> dist(lo, hi);
    return dist(engine_);
  }

  Vector gaussian(Index d) {
    Vector u(d);
    for (Index i = 0; i < d; ++i) u[i] = normal_(engine_);
    return u;
  }

  template <typename Derived>
  void fill_gaussian(Eigen::DenseBase<Derived>& out) {
    for (Index i = 0; i < out.size(); ++i) out.derived().coeffRef(i) = normal_(engine_);
  }

  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Named sub-streams used by the solvers.
namespace streams {
inline constexpr std::uint64_t kIterations = 1;
inline constexpr std::uint64_t kOutputIndex = 2;
inline constexpr std::uint64_t kSubsolver = 3;
inline constexpr std::uint64_t kHessian = 4;
}  // namespace streams

}  // namespace zo

#endif  // ZO_RNG_HPP

#pragma once

#include <cstdint>
#include <random>

#include "tnconf/matrix.hpp"

namespace tnconf {

/// Seeded source for exact and floating test data. Every generator in the
/// library takes one of these by reference, so a seed fixes a whole run.
class Rng {
 public:
  static constexpr std::uint64_t kDefaultSeed = 20240611;

  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  bool coin() { return integer(0, 1) == 1; }

  /// p/q with |p| <= num_bound and 1 <= q <= den_bound.
  Rat rational(std::int64_t num_bound = 5, std::int64_t den_bound = 3);
  Rat nonzero_rational(std::int64_t num_bound = 5, std::int64_t den_bound = 3);
  /// A rational in (lo, hi] with denominator at most den_bound.
  Rat rational_in(const Rat& lo, const Rat& hi, std::int64_t den_bound = 4);

  RatVector vector(std::size_t n, std::int64_t num_bound = 5, std::int64_t den_bound = 3);
  RatVector nonzero_vector(std::size_t n, std::int64_t num_bound = 5, std::int64_t den_bound = 3);
  RatMatrix matrix(std::size_t rows, std::size_t cols, std::int64_t num_bound = 5, std::int64_t den_bound = 3);

  double uniform(double lo, double hi);
  double normal();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tnconf

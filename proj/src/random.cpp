#include "tnconf/random.hpp"

#include <stdexcept>

namespace tnconf {

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
}

Rat Rng::rational(std::int64_t num_bound, std::int64_t den_bound) {
  Rat r(mpz_class(static_cast<long>(integer(-num_bound, num_bound))),
        mpz_class(static_cast<long>(integer(1, den_bound))));
  r.canonicalize();
  return r;
}

Rat Rng::nonzero_rational(std::int64_t num_bound, std::int64_t den_bound) {
  if (num_bound < 1) throw std::invalid_argument("nonzero_rational: num_bound must be positive");
  for (;;) {
    Rat r = rational(num_bound, den_bound);
    if (r != 0) return r;
  }
}

Rat Rng::rational_in(const Rat& lo, const Rat& hi, std::int64_t den_bound) {
  if (!(lo < hi)) throw std::invalid_argument("rational_in: empty interval");
  // lo + (hi - lo) * p/q with 0 < p <= q
  std::int64_t q = integer(1, den_bound);
  std::int64_t p = integer(1, q);
  Rat frac(mpz_class(static_cast<long>(p)), mpz_class(static_cast<long>(q)));
  frac.canonicalize();
  return lo + (hi - lo) * frac;
}

RatVector Rng::vector(std::size_t n, std::int64_t num_bound, std::int64_t den_bound) {
  RatVector v(n);
  for (auto& x : v) x = rational(num_bound, den_bound);
  return v;
}

RatVector Rng::nonzero_vector(std::size_t n, std::int64_t num_bound, std::int64_t den_bound) {
  for (;;) {
    RatVector v = vector(n, num_bound, den_bound);
    if (!is_zero(v)) return v;
  }
}

RatMatrix Rng::matrix(std::size_t rows, std::size_t cols, std::int64_t num_bound, std::int64_t den_bound) {
  RatMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rational(num_bound, den_bound);
  }
  return m;
}

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

}  // namespace tnconf

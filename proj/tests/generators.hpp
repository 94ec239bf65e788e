#ifndef GESS_TESTS_GENERATORS_HPP
#define GESS_TESTS_GENERATORS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "gess/core.hpp"

namespace gess::testing {

// Seeded random inputs for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double prob() { return uniform(0.0, 1.0); }

  // Positive weights summing to 1, none below `floor`.
  std::vector<double> weights(std::size_t n, double floor = 0.02) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) sum += (x = uniform(0.0, 1.0));
    const double free = 1.0 - floor * static_cast<double>(n);
    double total = 0.0;
    for (auto& x : w) total += (x = floor + free * x / sum);
    w.back() += 1.0 - total;
    return w;
  }

  PayoffMatrix2 matrix(double range = 5.0) {
    return {uniform(-range, range), uniform(-range, range), uniform(-range, range), uniform(-range, range)};
  }

  // Matrix with a - b - c + d < 0 by at least `margin`.
  PayoffMatrix2 anti_coordination(double margin = 0.1) {
    for (;;) {
      PayoffMatrix2 m = matrix();
      if (m.delta() < -margin) return m;
    }
  }

  GroupProfile profile(std::size_t n) {
    std::vector<double> q(n);
    for (auto& x : q) x = prob();
    return GroupProfile(q);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gess::testing

#endif  // GESS_TESTS_GENERATORS_HPP

#pragma once

#include "trotterkit/core.hpp"
#include "trotterkit/linalg.hpp"
#include "trotterkit/polyexp.hpp"

#include <doctest.h>

#include <cstdint>
#include <random>
#include <string>

namespace tk_test {

using trotterkit::cplx;
using trotterkit::MatrixXc;

/// Shared on-disk zero cache for the test binaries (set by CMake).
inline const trotterkit::ZeroCache& zero_cache() {
  static const trotterkit::ZeroCache cache(TROTTERKIT_TEST_ZEROS);
  return cache;
}

/// Seeded value generator for property cases.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  cplx in_disk(double radius) {
    const double r = radius * std::sqrt(uniform(0.0, 1.0));
    const double t = uniform(-M_PI, M_PI);
    return std::polar(r, t);
  }
  MatrixXc hermitian(int dim) { return trotterkit::random_hermitian(dim, rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Runs `body(gen)` for `cases` independently seeded cases; the case seed is reported on failure.
template <typename Body>
void for_all(int cases, std::uint64_t seed, Body&& body) {
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t case_seed = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    INFO("property case " << i << " (seed " << case_seed << ")");
    Gen gen(case_seed);
    body(gen);
  }
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace tk_test

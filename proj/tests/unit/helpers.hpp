#pragma once

#include <random>

#include "olab/types.hpp"

namespace olab::test {

inline Point random_point(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Point x(n);
  for (int i = 0; i < n; ++i) x(i) = d(rng);
  return x;
}

inline Ellipsoid unit_disk() { return Ellipsoid::ball(zero_point(2), 1.0); }

}  // namespace olab::test

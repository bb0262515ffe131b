#pragma once

// Closed-form radial antiderivatives ∫_0^U of the section kernels, as functions of (U, d).
// With m = N - 1:
//   pot   = ∫ u^{m-1} (u² + d²)^{-(N-2)/2} du
//   inv   = ∫ u^{m-1} (u² + d²)^{-N/2} du
//   first = ∫ u^m     (u² + d²)^{-N/2} du

#include <cmath>
#include <limits>

namespace olab::rk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// asinh(x) - x/sqrt(1+x²)
inline double asinh_minus(double x) {
  if (x < 1e-2) {
    const double x2 = x * x;
    return x * x2 * (1.0 / 3.0 - x2 * (3.0 / 10.0 - x2 * (15.0 / 56.0)));
  }
  return std::asinh(x) - x / std::sqrt(1.0 + x * x);
}

// x - atan(x)
inline double x_minus_atan(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    double term = x * x2, sum = 0.0;
    for (int k = 1; k <= 8; ++k) {
      sum += ((k % 2) ? 1.0 : -1.0) * term / (2 * k + 1);
      term *= x2;
    }
    return sum;
  }
  return x - std::atan(x);
}

// atan(x) - x/(1+x²)
inline double atan_minus(double x) {
  if (x < 0.1) {
    const double x2 = x * x;
    double term = x * x2, sum = 0.0;
    for (int k = 1; k <= 8; ++k) {
      sum += ((k % 2) ? 1.0 : -1.0) * 2.0 * k * term / (2 * k + 1);
      term *= x2;
    }
    return sum;
  }
  return std::atan(x) - x / (1.0 + x * x);
}

// log(1+y) - y/(1+y)
inline double log1p_minus(double y) {
  if (y < 1e-2) {
    double term = y * y, sum = 0.0;
    for (int k = 2; k <= 9; ++k) {
      sum += ((k % 2) ? -1.0 : 1.0) * (k - 1.0) * term / k;
      term *= y;
    }
    return sum;
  }
  return std::log1p(y) - y / (1.0 + y);
}

inline double pot3(double U, double d) {
  return U * U / (std::sqrt(U * U + d * d) + d);
}
inline double inv3(double U, double d) {
  if (d == 0.0) return U > 0.0 ? kInf : 0.0;
  const double r = std::sqrt(U * U + d * d);
  return U * U / (d * r * (r + d));
}
inline double first3(double U, double d) {
  if (d == 0.0) return U > 0.0 ? kInf : 0.0;
  return asinh_minus(U / d);
}

inline double pot4(double U, double d) {
  if (d == 0.0) return U;
  return d * x_minus_atan(U / d);
}
inline double inv4(double U, double d) {
  if (d == 0.0) return U > 0.0 ? kInf : 0.0;
  return atan_minus(U / d) / (2.0 * d);
}
inline double first4(double U, double d) {
  if (d == 0.0) return U > 0.0 ? kInf : 0.0;
  const double x = U / d;
  return 0.5 * log1p_minus(x * x);
}

struct RadialKernels {
  double (*pot)(double, double);
  double (*inv)(double, double);
  double (*first)(double, double);
};

inline RadialKernels kernels(int N) {
  if (N == 3) return {pot3, inv3, first3};
  return {pot4, inv4, first4};
}

}  // namespace olab::rk

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace olab::quad {

/// Result of an adaptive rule: value, error estimate and ∫|f|.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  int intervals = 0;
  bool converged = true;

  Estimate& operator+=(const Estimate& o) {
    value += o.value;
    error += o.error;
    l1 += o.l1;
    intervals += o.intervals;
    converged = converged && o.converged;
    return *this;
  }
};

struct Tolerance {
  double rel = 1e-9;
  double abs = 0.0;
  int max_intervals = 4000;
  /// Measure the relative target against ∫|f| instead of |∫f|.
  bool relative_to_l1 = false;
};

/// Nonnegative abscissae and weights of the 7-point Gauss / 15-point Kronrod pair.
struct GKTable {
  std::array<double, 8> x;
  std::array<double, 8> wk;
  std::array<double, 4> wg;  // Gauss weights at x[0], x[2], x[4], x[6]
};
const GKTable& gk15();

/// Fixed Gauss–Legendre rule on [-1, 1].
struct GLRule {
  std::vector<double> x, w;
};
const GLRule& gauss_legendre(int n);

struct GKPiece {
  double a, b, value, error, l1;
};

template <class F>
GKPiece gk15_apply(F& f, double a, double b) {
  const GKTable& t = gk15();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> fv;
  fv[0] = f(c);
  for (int k = 1; k < 8; ++k) {
    fv[2 * k - 1] = f(c - h * t.x[k]);
    fv[2 * k] = f(c + h * t.x[k]);
  }
  double resk = t.wk[0] * fv[0];
  double resg = t.wg[0] * fv[0];
  double resabs = t.wk[0] * std::abs(fv[0]);
  for (int k = 1; k < 8; ++k) {
    const double s = fv[2 * k - 1] + fv[2 * k];
    resk += t.wk[k] * s;
    resabs += t.wk[k] * (std::abs(fv[2 * k - 1]) + std::abs(fv[2 * k]));
    if (k % 2 == 0) resg += t.wg[k / 2] * s;
  }
  const double mean = 0.5 * resk;
  double resasc = t.wk[0] * std::abs(fv[0] - mean);
  for (int k = 1; k < 8; ++k)
    resasc += t.wk[k] * (std::abs(fv[2 * k - 1] - mean) + std::abs(fv[2 * k] - mean));
  const double ah = std::abs(h);
  resasc *= ah;
  resabs *= ah;
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(resk)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk * h, err, resabs};
}

/// Globally adaptive bisection over the consecutive breakpoints (at least two).
template <class F>
Estimate gk_adaptive(F&& f, std::span<const double> breaks, const Tolerance& tol) {
  std::vector<GKPiece> heap;
  heap.reserve(64);
  auto cmp = [](const GKPiece& l, const GKPiece& r) { return l.error < r.error; };
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    GKPiece p = gk15_apply(f, breaks[i], breaks[i + 1]);
    value += p.value;
    error += p.error;
    l1 += p.l1;
    heap.push_back(p);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto target = [&] {
    const double scale = tol.relative_to_l1 ? l1 : std::abs(value);
    return std::max({tol.abs, tol.rel * scale, 50.0 * eps * l1});
  };
  bool converged = true;
  while (!heap.empty() && error > target()) {
    if (static_cast<int>(heap.size()) >= tol.max_intervals) {
      converged = false;
      break;
    }
    std::pop_heap(heap.begin(), heap.end(), cmp);
    const GKPiece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      converged = false;
      heap.push_back(worst);
      break;
    }
    const GKPiece left = gk15_apply(f, worst.a, mid);
    const GKPiece right = gk15_apply(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
  // Re-sum in a fixed order so the result does not depend on the update history.
  std::sort(heap.begin(), heap.end(), [](const GKPiece& l, const GKPiece& r) { return l.a < r.a; });
  Estimate e;
  for (const auto& p : heap) {
    e.value += p.value;
    e.error += p.error;
    e.l1 += p.l1;
  }
  e.intervals = static_cast<int>(heap.size());
  e.converged = converged && e.error <= target() * 1.0000001;
  return e;
}

template <class F>
Estimate gk_adaptive(F&& f, double a, double b, const Tolerance& tol) {
  const std::array<double, 2> br{a, b};
  return gk_adaptive(f, std::span<const double>(br), tol);
}

/// Trapezoid rule on one period with repeated doubling (spectrally accurate for smooth periodic f).
template <class F>
Estimate periodic_trapezoid(F&& f, double t0, double period, const Tolerance& tol, int n0 = 16,
                            int n_max = 4096) {
  int n = n0;
  double sum = 0.0, abs_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double v = f(t0 + period * k / n);
    sum += v;
    abs_sum += std::abs(v);
  }
  double prev = sum * period / n;
  while (true) {
    double add = 0.0, add_abs = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = f(t0 + period * (k + 0.5) / n);
      add += v;
      add_abs += std::abs(v);
    }
    sum += add;
    abs_sum += add_abs;
    n *= 2;
    const double cur = sum * period / n;
    const double l1 = abs_sum * period / n;
    const double err = std::abs(cur - prev);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double scale = tol.relative_to_l1 ? l1 : std::abs(cur);
    const double target = std::max({tol.abs, tol.rel * scale, 50.0 * eps * l1});
    if (err <= target || n >= n_max) {
      Estimate e;
      e.value = cur;
      e.error = err;
      e.l1 = l1;
      e.intervals = n;
      e.converged = err <= target;
      return e;
    }
    prev = cur;
  }
}

}  // namespace olab::quad

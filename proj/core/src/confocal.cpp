#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "olab/error.hpp"
#include "olab/potential.hpp"

namespace olab::pot {

namespace {

using quad::Estimate;
using quad::Tolerance;

/// Confocal data of an ellipsoid-type family: squared semi-axes c_j, principal coordinates z_j,
/// and the linear/constant part of the bracket B(s) = Σ z_j²/(c_j+s) - lin - slope·s.
struct Confocal {
  int m = 0;
  double c[kMaxDim] = {};
  double z[kMaxDim] = {};
  double lin = 0.0;
  double slope = 0.0;

  double bracket(double s) const {
    double v = -lin - slope * s;
    for (int j = 0; j < m; ++j) v += z[j] * z[j] / (c[j] + s);
    return v;
  }
  double root_product(double s) const {
    double p = 1.0;
    for (int j = 0; j < m; ++j) p *= c[j] + s;
    return std::sqrt(p);
  }
};

double bracket_root(const Confocal& cf) {
  double hi = 1.0;
  int guard = 0;
  while (cf.bracket(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 2000) throw NumericalError("confocal root bracket failed", hi, 0.0);
  }
  double lo = 0.0;
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve([&](double s) { return cf.bracket(s); }, lo, hi,
                                             boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

/// ∫_0^Λ f(s)/√Π(c_j+s) ds with breaks at the c_j below Λ.
template <class F>
double confocal_integral(const Confocal& cf, double Lambda, F&& f) {
  std::vector<double> br{0.0, Lambda};
  for (int j = 0; j < cf.m; ++j)
    if (cf.c[j] < Lambda) br.push_back(cf.c[j]);
  std::sort(br.begin(), br.end());
  auto g = [&](double s) { return f(s) / cf.root_product(s); };
  const Estimate e = quad::gk_adaptive(g, std::span<const double>(br), Tolerance{1e-13, 0.0, 2000, true});
  if (!e.converged && !(e.error <= 1e-10 * e.l1))
    throw NumericalError("confocal integral did not converge", e.value, e.error);
  return e.value;
}

void check_base(const Ellipsoid& base, double gamma, const Point& x, int extra) {
  if (base.center.norm() != 0.0) fail_domain("confocal route needs a centred base ellipsoid");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail_domain("γ must be finite and nonnegative");
  if (x.size() != base.dim() + extra) fail_domain("confocal route: dimension mismatch");
  if (!x.allFinite()) fail_domain("confocal route: point must be finite");
}

Confocal paraboloid_data(const Ellipsoid& base, double gamma, const Point& x) {
  Confocal cf;
  cf.m = base.dim();
  const Point zp = base.rotation.transpose() * x.head(cf.m);
  for (int j = 0; j < cf.m; ++j) {
    cf.c[j] = 0.5 * gamma * base.semi_axes(j) * base.semi_axes(j);
    cf.z[j] = zp(j);
  }
  cf.lin = 2.0 * x(cf.m);
  cf.slope = 1.0;
  return cf;
}

double half_product(const Confocal& cf) {
  double p = 1.0;
  for (int j = 0; j < cf.m; ++j) p *= std::sqrt(cf.c[j]);
  return 0.25 * p;
}

}  // namespace

double solution_confocal(const Ellipsoid& base, double gamma, const Point& x) {
  check_base(base, gamma, x, 1);
  if (gamma == 0.0) return ellipsoid_interior(base).quadratic(x.head(base.dim()));
  const Confocal cf = paraboloid_data(base, gamma, x);
  if (cf.bracket(0.0) <= 0.0) return 0.0;
  const double L = bracket_root(cf);
  return half_product(cf) * confocal_integral(cf, L, [&](double s) { return std::max(0.0, cf.bracket(s)); });
}

Point solution_confocal_gradient(const Ellipsoid& base, double gamma, const Point& x) {
  check_base(base, gamma, x, 1);
  const int m = base.dim();
  Point g = Point::Zero(m + 1);
  if (gamma == 0.0) {
    const InteriorQuadratic iq = ellipsoid_interior(base);
    const Point z = base.rotation.transpose() * x.head(m);
    g.head(m) = base.rotation * (2.0 * iq.mu.cwiseProduct(z));
    return g;
  }
  const Confocal cf = paraboloid_data(base, gamma, x);
  if (cf.bracket(0.0) <= 0.0) return g;
  const double L = bracket_root(cf);
  const double k = half_product(cf);
  Point gz(m);
  for (int j = 0; j < m; ++j)
    gz(j) = k * confocal_integral(cf, L, [&](double s) { return 2.0 * cf.z[j] / (cf.c[j] + s); });
  g.head(m) = base.rotation * gz;
  g(m) = k * confocal_integral(cf, L, [](double) { return -2.0; });
  return g;
}

double potential_confocal(const Ellipsoid& base, double gamma, const Point& x) {
  check_base(base, gamma, x, 1);
  if (gamma == 0.0) return 0.0;
  return solution_confocal(base, gamma, x) - ellipsoid_interior(base).quadratic(x.head(base.dim()));
}

Point potential_confocal_gradient(const Ellipsoid& base, double gamma, const Point& x) {
  check_base(base, gamma, x, 1);
  const int m = base.dim();
  if (gamma == 0.0) return Point::Zero(m + 1);
  Point g = solution_confocal_gradient(base, gamma, x);
  const InteriorQuadratic iq = ellipsoid_interior(base);
  const Point z = base.rotation.transpose() * x.head(m);
  g.head(m) -= base.rotation * (2.0 * iq.mu.cwiseProduct(z));
  return g;
}

double translated_potential_confocal(const Ellipsoid& base, double gamma, const Point& tau, double sigma,
                                     const Point& x) {
  check_base(base, gamma, x, 1);
  const int m = base.dim();
  if (tau.size() != m) fail_domain("τ' dimension mismatch");
  if (gamma == 0.0) return 0.0;
  Point s(m + 1);
  s.head(m) = tau;
  s(m) = sigma;
  if (s.norm() == 0.0) return potential_confocal(base, gamma, x);
  return potential_confocal(base, gamma, x + s) - potential_confocal(base, gamma, s) -
         x.dot(potential_confocal_gradient(base, gamma, s));
}

double ellipsoid_solution_confocal(const Ellipsoid& E, double gamma, const Point& x) {
  if (E.center.norm() != 0.0) fail_domain("confocal route needs a centred ellipsoid");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail_domain("γ must be finite and nonnegative");
  if (x.size() != E.dim()) fail_domain("confocal route: dimension mismatch");
  if (gamma == 0.0) return ellipsoid_interior(E).quadratic(x);
  Confocal cf;
  cf.m = E.dim();
  const Point z = E.rotation.transpose() * x;
  for (int j = 0; j < cf.m; ++j) {
    cf.c[j] = gamma * E.semi_axes(j) * E.semi_axes(j);
    cf.z[j] = z(j);
  }
  cf.lin = 1.0;
  cf.slope = 0.0;
  if (cf.bracket(0.0) <= 0.0) return 0.0;
  const double L = bracket_root(cf);
  double k = 0.25;
  for (int j = 0; j < cf.m; ++j) k *= std::sqrt(cf.c[j]);
  return k * confocal_integral(cf, L, [&](double s) { return std::max(0.0, cf.bracket(s)); });
}

}  // namespace olab::pot

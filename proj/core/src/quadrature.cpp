#include "olab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "olab/error.hpp"
#include "radial_kernels.hpp"

namespace olab::quad {

using std::numbers::pi;

const GKTable& gk15() {
  static const GKTable table = [] {
    GKTable t{};
    const auto& xk = boost::math::quadrature::gauss_kronrod<double, 15>::abscissa();
    const auto& wk = boost::math::quadrature::gauss_kronrod<double, 15>::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 7>::weights();
    for (int i = 0; i < 8; ++i) {
      t.x[i] = xk[i];
      t.wk[i] = wk[i];
    }
    for (int i = 0; i < 4; ++i) t.wg[i] = wg[i];
    return t;
  }();
  return table;
}

const GLRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GLRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GLRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.x[i] = -x;
    rule.x[n - 1 - i] = x;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

// ------------------------------------------------------------------ spec and tails

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) fail_domain("quadrature tolerance must lie in (0, 1e-2]");
  if (max_subdivisions < 1) fail_domain("max subdivisions must be positive");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail_domain("truncation height must be finite and >= 0");
}

double QuadratureSpec::truncation_height(double x_norm) const {
  return t_max > 0.0 ? t_max : std::max(100.0, 50.0 * x_norm);
}

std::string to_string(DecayTag tag) {
  switch (tag) {
    case DecayTag::InvN: return "paraboloid-1/|y|^N";
    case DecayTag::InvNm1: return "paraboloid-1/|y|^{N-1}";
    case DecayTag::InvNm2: return "paraboloid-1/|y|^{N-2}";
  }
  return "unknown";
}

int decay_exponent(DecayTag tag, int N) {
  switch (tag) {
    case DecayTag::InvN: return N;
    case DecayTag::InvNm1: return N - 1;
    case DecayTag::InvNm2: return N - 2;
  }
  return 0;
}

SectionGrowth section_growth(const Paraboloid& P) {
  const int m = P.base.dim();
  return {P.base.volume() * std::pow(P.gamma, 0.5 * m), P.sigma};
}

double tail_bound(DecayTag tag, int N, double T, double coefficient, const SectionGrowth& g) {
  const int k = decay_exponent(tag, N);
  const double half_m = 0.5 * (N - 1);
  if (k <= half_m + 1.0) fail_domain("decay exponent too small: the tail integral diverges");
  if (!(T > 0.0)) fail_domain("tail height must be positive");
  if (coefficient < 0.0) fail_domain("tail coefficient must be nonnegative");
  const double widen = g.shift > 0.0 ? std::pow(1.0 + g.shift / T, half_m) : 1.0;
  return coefficient * g.growth * widen * std::pow(T, half_m - k + 1.0) / (k - half_m - 1.0);
}

TailBound make_tail_bound(DecayTag tag, int N, double T, double coefficient, const SectionGrowth& g) {
  return {T, tail_bound(tag, N, T, coefficient, g), tag, false};
}

// ------------------------------------------------------------------ segments

double Segment::u0() const { return map == Map::Linear ? t0 : 0.0; }

double Segment::u1() const {
  switch (map) {
    case Map::Linear: return t1;
    case Map::SqrtStart:
    case Map::SqrtEnd: return std::sqrt(t1 - t0);
    case Map::Inverse: return 1.0;
  }
  return t1;
}

double Segment::t_of(double u, double& jac) const {
  switch (map) {
    case Map::Linear: jac = 1.0; return u;
    case Map::SqrtStart: jac = 2.0 * u; return t0 + u * u;
    case Map::SqrtEnd: jac = 2.0 * u; return t1 - u * u;
    case Map::Inverse: {
      const double L = std::max(std::abs(t0), 1.0);
      jac = 2.0 * L / (u * u * u);
      return t0 + L * (1.0 / (u * u) - 1.0);
    }
  }
  jac = 1.0;
  return u;
}

Estimate integrate_segments(const std::function<double(double)>& g, const std::vector<Segment>& segs,
                            const Tolerance& tol) {
  if (segs.empty()) return {};
  auto h = [&](double v) {
    const int i = std::clamp(static_cast<int>(std::floor(v)), 0, static_cast<int>(segs.size()) - 1);
    const Segment& s = segs[i];
    const double w = s.u1() - s.u0();
    const double u = s.u0() + (v - i) * w;
    double jac = 0.0;
    const double t = s.t_of(u, jac);
    const double val = g(t);
    return val == 0.0 ? 0.0 : val * jac * w;
  };
  std::vector<double> br(segs.size() + 1);
  for (std::size_t i = 0; i <= segs.size(); ++i) br[i] = static_cast<double>(i);
  return gk_adaptive(h, std::span<const double>(br), tol);
}

std::vector<Segment> build_segments(std::vector<double> points, bool sqrt_at_start, bool sqrt_at_end,
                                    bool to_infinity) {
  std::sort(points.begin(), points.end());
  std::vector<double> p;
  for (double x : points) {
    if (p.empty() || x > p.back() + 1e-14 * std::max(1.0, std::abs(x))) p.push_back(x);
  }
  std::vector<Segment> segs;
  if (p.size() == 1 && !to_infinity) return segs;
  if (p.size() == 2 && sqrt_at_start && sqrt_at_end) {
    const double mid = 0.5 * (p[0] + p[1]);
    p.insert(p.begin() + 1, mid);
  }
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    Segment s;
    s.t0 = p[i];
    s.t1 = p[i + 1];
    if (i == 0 && sqrt_at_start) s.map = Segment::Map::SqrtStart;
    else if (i + 2 == p.size() && sqrt_at_end && !to_infinity) s.map = Segment::Map::SqrtEnd;
    segs.push_back(s);
  }
  if (to_infinity) {
    Segment s;
    s.map = Segment::Map::Inverse;
    s.t0 = p.back();
    s.t1 = std::numeric_limits<double>::infinity();
    segs.push_back(s);
  }
  return segs;
}

std::pair<double, double> ellipsoid_height_range(const Ellipsoid& E) {
  const int n = E.dim();
  double e2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = E.rotation(n - 1, k) * E.semi_axes(k);
    e2 += r * r;
  }
  const double e = std::sqrt(e2);
  return {E.center(n - 1) - e, E.center(n - 1) + e};
}

// ------------------------------------------------------------------ angular integration

namespace {

Tolerance inner_tolerance(const Tolerance& tol) {
  Tolerance t = tol;
  t.rel = tol.rel * 0.1;
  t.abs = tol.abs * 0.1;
  return t;
}

/// Orthonormal completion of a unit vector in R^3.
void complete_basis(const Point& e, Point& f1, Point& f2) {
  Point trial = std::abs(e(0)) < 0.9 ? unit_vector(3, 0) : unit_vector(3, 1);
  f1 = trial - trial.dot(e) * e;
  f1.normalize();
  f2 = Point(3);
  f2 << e(1) * f1(2) - e(2) * f1(1), e(2) * f1(0) - e(0) * f1(2), e(0) * f1(1) - e(1) * f1(0);
}

/// ∫ over unit directions ω of radial(ω, ρ1, ρ2), where [ρ1, ρ2] is the chord of the unit ball
/// along z0 + rω (r >= 0).
template <class Radial>
Estimate angular_integrate(const Point& z0, Radial&& radial, const Tolerance& tol) {
  const int m = static_cast<int>(z0.size());
  const double D = z0.norm();
  const bool inside = D <= 1.0;
  if (m == 1) {
    Estimate e;
    Point w(1);
    if (inside) {
      w(0) = 1.0;
      e.value += radial(w, 0.0, 1.0 - z0(0));
      w(0) = -1.0;
      e.value += radial(w, 0.0, 1.0 + z0(0));
    } else {
      w(0) = z0(0) > 0 ? -1.0 : 1.0;
      e.value = radial(w, D - 1.0, D + 1.0);
    }
    e.l1 = std::abs(e.value);
    return e;
  }
  if (m == 2) {
    if (inside) {
      const double th0 = D > 0.0 ? std::atan2(z0(1), z0(0)) : 0.0;
      auto g = [&](double th) {
        Point w(2);
        w << std::cos(th), std::sin(th);
        const double c = z0.dot(w);
        const double rho = c > 0.0 ? (1.0 - D * D) / (c + std::sqrt(c * c + 1.0 - D * D))
                                   : -c + std::sqrt(c * c + 1.0 - D * D);
        return radial(w, 0.0, rho);
      };
      if (D < 0.6) return periodic_trapezoid(g, th0, 2.0 * pi, tol);
      const std::array<double, 7> br{th0 - pi, th0 - 0.5 * pi, th0 - 0.1 * pi, th0,
                                     th0 + 0.1 * pi, th0 + 0.5 * pi, th0 + pi};
      return gk_adaptive(g, std::span<const double>(br), tol);
    }
    const double thc = std::atan2(-z0(1), -z0(0));
    Estimate total;
    for (int side : {-1, 1}) {
      auto g = [&](double eta) {
        const double se = std::sin(eta), ce = std::cos(eta);
        const double root = std::sqrt(D * D - se * se);
        const double psi = std::asin(se / D);
        Point w(2);
        w << std::cos(thc + side * psi), std::sin(thc + side * psi);
        return radial(w, root - ce, root + ce) * ce / root;
      };
      total += gk_adaptive(g, 0.0, 0.5 * pi, tol);
    }
    return total;
  }
  if (m == 3) {
    const Tolerance itol = inner_tolerance(tol);
    Point e = inside ? (D > 0.0 ? Point(z0 / D) : unit_vector(3, 2)) : Point(-z0 / D);
    Point f1, f2;
    complete_basis(e, f1, f2);
    if (inside) {
      auto outer = [&](double mu) {
        const double c = D * mu;
        const double rho = c > 0.0 ? (1.0 - D * D) / (c + std::sqrt(c * c + 1.0 - D * D))
                                   : -c + std::sqrt(c * c + 1.0 - D * D);
        const double sn = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        auto inner = [&](double phi) {
          const Point w = mu * e + sn * (std::cos(phi) * f1 + std::sin(phi) * f2);
          return radial(w, 0.0, rho);
        };
        return periodic_trapezoid(inner, 0.0, 2.0 * pi, itol, 8, 2048).value;
      };
      if (D < 0.6) {
        const std::array<double, 3> br{-1.0, 0.0, 1.0};
        return gk_adaptive(outer, std::span<const double>(br), tol);
      }
      const double near = std::max(0.0, 1.0 - 4.0 * (1.0 - D));
      const std::array<double, 4> br{-1.0, 0.0, near, 1.0};
      return gk_adaptive(outer, std::span<const double>(br), tol);
    }
    auto outer = [&](double eta) {
      const double se = std::sin(eta), ce = std::cos(eta);
      const double root = std::sqrt(D * D - se * se);
      const double spsi = se / D;
      const double cpsi = std::sqrt(std::max(0.0, 1.0 - spsi * spsi));
      const double jac = spsi * ce / root;
      auto inner = [&](double phi) {
        const Point w = cpsi * e + spsi * (std::cos(phi) * f1 + std::sin(phi) * f2);
        return radial(w, root - ce, root + ce);
      };
      return periodic_trapezoid(inner, 0.0, 2.0 * pi, itol, 8, 2048).value * jac;
    };
    return gk_adaptive(outer, 0.0, 0.5 * pi, tol);
  }
  fail_domain("sections of dimension above 3 are not supported");
}

}  // namespace

// ------------------------------------------------------------------ kernel families

KernelMoments section_kernels(const Section& S, const Point& p, double d, int N, unsigned families,
                              const Tolerance& tol) {
  KernelMoments out;
  const int m = S.dim();
  out.first = Point::Zero(m);
  if (S.degenerate()) return out;
  if (N != 3 && N != 4) fail_domain("section kernels are implemented for N = 3 and N = 4");
  if (m != N - 1) fail_domain("section dimension must be N - 1");
  const double detA = S.semi_axes.prod();
  const Point z0 = (S.rotation.transpose() * (p - S.center)).cwiseQuotient(S.semi_axes);
  const double dd = std::abs(d);
  const auto& a = S.semi_axes;
  const rk::RadialKernels K = rk::kernels(N);
  auto stretch = [&](const Point& w) { return Point(a.cwiseProduct(w)); };

  if (families & kPotential) {
    auto radial = [&](const Point& w, double r1, double r2) {
      const double s = stretch(w).norm();
      const double v = K.pot(s * r2, dd) - (r1 > 0.0 ? K.pot(s * r1, dd) : 0.0);
      return v / std::pow(s, m);
    };
    Estimate e = angular_integrate(z0, radial, tol);
    out.potential = detA * e.value;
    out.quality += e;
  }
  if (families & kInverseN) {
    auto radial = [&](const Point& w, double r1, double r2) {
      const double s = stretch(w).norm();
      const double v = K.inv(s * r2, dd) - (r1 > 0.0 ? K.inv(s * r1, dd) : 0.0);
      return v / std::pow(s, m);
    };
    Estimate e = angular_integrate(z0, radial, tol);
    out.inverse_n = detA * e.value;
    out.quality += e;
  }
  if (families & kFirst) {
    // Symmetric sections make components vanish; the scale ∫|y'-p'|(...)^{-N/2} sets an absolute floor.
    auto magnitude = [&](const Point& w, double r1, double r2) {
      const double s = stretch(w).norm();
      const double f = K.first(s * r2, dd) - (r1 > 0.0 ? K.first(s * r1, dd) : 0.0);
      return f / std::pow(s, m);
    };
    const Estimate scale = angular_integrate(z0, magnitude, Tolerance{1e-3, 0.0, tol.max_intervals, true});
    Tolerance ftol = tol;
    ftol.relative_to_l1 = true;
    ftol.abs = std::max(tol.abs, tol.rel * std::abs(scale.value));
    for (int c = 0; c < m; ++c) {
      auto radial = [&](const Point& w, double r1, double r2) {
        const Point v = stretch(w);
        const double s = v.norm();
        const double dir = S.rotation.row(c).dot(v);
        const double f = K.first(s * r2, dd) - (r1 > 0.0 ? K.first(s * r1, dd) : 0.0);
        return dir * f / std::pow(s, m + 1);
      };
      Estimate e = angular_integrate(z0, radial, ftol);
      out.first(c) = detA * e.value;
      out.quality += e;
    }
  }
  return out;
}

// ------------------------------------------------------------------ generic sections

Estimate integrate_section(const SectionIntegrand& f, const Section& S, const std::optional<Point>& singular,
                           const Tolerance& tol) {
  const int m = S.dim();
  if (S.degenerate()) return {};
  if (m < 1 || m > 3) fail_domain("integrate_section supports sections of dimension 1 to 3");
  if (singular && singular->size() != m) fail_domain("singular point dimension mismatch");
  const double detA = S.semi_axes.prod();
  const Point z0 = singular ? Point((S.rotation.transpose() * (*singular - S.center)).cwiseQuotient(S.semi_axes))
                            : Point::Zero(m);
  const Tolerance rtol = inner_tolerance(tol);
  auto radial = [&](const Point& w, double r1, double r2) {
    auto g = [&](double r) {
      const Point z = z0 + r * w;
      const Point y = S.center + S.rotation * S.semi_axes.cwiseProduct(z);
      return std::pow(r, m - 1) * f(y);
    };
    return gk_adaptive(g, r1, r2, rtol).value;
  };
  Estimate e = angular_integrate(z0, radial, tol);
  e.value *= detA;
  e.error *= detA;
  e.l1 *= detA;
  return e;
}

double integrate_section(const SectionIntegrand& f, const Ellipsoid& E, double rel_tol,
                         const std::optional<Point>& singular) {
  Section S;
  S.empty = false;
  S.center = E.center;
  S.semi_axes = E.semi_axes;
  S.rotation = E.rotation;
  const Estimate e = integrate_section(f, S, singular, Tolerance{rel_tol, 0.0, 4000});
  if (!e.converged) throw NumericalError("section quadrature did not converge", e.value, e.error);
  return e.value;
}

// ------------------------------------------------------------------ bodies

BodyIntegral integrate_body(const BodyIntegrand& f, const ConvexBody& B, const QuadratureSpec& spec,
                            const BodyOptions& opt) {
  spec.validate();
  const int N = body_dim(B);
  const int m = N - 1;
  if (opt.singular && opt.singular->size() != N) fail_domain("singular point dimension mismatch");
  double lo = 0.0, hi = 0.0;
  bool natural_lo = true, natural_hi = true, infinite = false;
  const Paraboloid* par = std::get_if<Paraboloid>(&B);
  if (const auto* e = std::get_if<Ellipsoid>(&B)) {
    std::tie(lo, hi) = ellipsoid_height_range(*e);
  } else if (par) {
    if (par->gamma == 0.0) return {};
    lo = -par->sigma;
    hi = std::numeric_limits<double>::infinity();
    infinite = true;
  } else {
    fail_domain("integrate_body needs an ellipsoid or paraboloid; use geometry module mask sections");
  }
  if (opt.t_lo && *opt.t_lo > lo) {
    lo = *opt.t_lo;
    natural_lo = false;
  }
  if (opt.t_hi && *opt.t_hi < hi) {
    hi = *opt.t_hi;
    natural_hi = false;
    infinite = false;
  }
  BodyIntegral out;
  if (!(hi > lo)) return out;

  const double x_norm = opt.singular ? opt.singular->norm() : 0.0;
  double T = hi;
  if (infinite) {
    if (!opt.decay) fail_domain("paraboloid integrand needs a decay certificate");
    T = std::max(spec.truncation_height(x_norm), lo + 1.0);
    out.tail = make_tail_bound(*opt.decay, N, T, opt.decay_coefficient, section_growth(*par));
    out.tail.charged = spec.tail == TailMode::Truncate;
  }
  std::vector<double> pts{lo, T};
  auto add = [&](double t) {
    if (t > lo && t < T) pts.push_back(t);
  };
  add(0.0);
  if (opt.singular) add((*opt.singular)(m));
  for (double b : opt.breaks) add(b);
  const bool map_tail = infinite && spec.tail == TailMode::Map;
  const auto segs = build_segments(pts, natural_lo, natural_hi && !infinite, map_tail);

  const Tolerance stol{spec.rel_tol * 0.1, 0.0, spec.max_subdivisions};
  bool inner_ok = true;
  auto g = [&](double t) {
    const Section S = body_section(B, t);
    if (S.degenerate()) return 0.0;
    std::optional<Point> sp;
    if (opt.singular) sp = Point(opt.singular->head(m));
    auto fs = [&](const Point& yp) {
      Point y(N);
      y.head(m) = yp;
      y(m) = t;
      return f(y);
    };
    const Estimate e = integrate_section(fs, S, sp, stol);
    inner_ok = inner_ok && e.converged;
    return e.value;
  };
  const Estimate e = integrate_segments(g, segs, Tolerance{spec.rel_tol, 0.0, spec.max_subdivisions});
  out.value = e.value;
  out.error = e.error + (out.tail.charged ? out.tail.bound : 0.0);
  out.quality = e;
  if (!e.converged || !inner_ok)
    throw NumericalError("body quadrature did not converge", e.value, e.error);
  return out;
}

// ------------------------------------------------------------------ ball averages

namespace {

double halton(std::size_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

double ball_mean(const std::function<double(const Point&)>& f, const Point& center, double R, int points) {
  const int N = static_cast<int>(center.size());
  if (N < 1 || N > kMaxDim) fail_domain("ball_mean: bad dimension");
  if (!(R > 0.0) || points < 1) fail_domain("ball_mean needs R > 0 and a positive point count");
  static constexpr unsigned bases[kMaxDim] = {2, 3, 5, 7};
  std::vector<Point> xs;
  xs.reserve(points);
  for (std::size_t i = 1; xs.size() < static_cast<std::size_t>(points); ++i) {
    Point z(N);
    for (int a = 0; a < N; ++a) z(a) = 2.0 * halton(i, bases[a]) - 1.0;
    if (z.squaredNorm() <= 1.0) xs.push_back(center + R * z);
  }
  std::vector<double> v(xs.size());
  parallel_for(xs.size(), [&](std::size_t k) { v[k] = f(xs[k]); });
  return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

}  // namespace olab::quad

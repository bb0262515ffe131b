#include "olab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "olab/error.hpp"
#include "radial_kernels.hpp"

namespace olab::pot {

using quad::Estimate;
using quad::QuadratureSpec;
using quad::Tolerance;

namespace {

constexpr double pi = std::numbers::pi;

int checked_dim(const ConvexBody& M) {
  if (!std::holds_alternative<Ellipsoid>(M) && !std::holds_alternative<Paraboloid>(M))
    fail_domain("potential needs an ellipsoid or a paraboloid body");
  const int N = body_dim(M);
  if (N != 3 && N != 4) fail_domain("potentials are implemented for N = 3 and N = 4");
  return N;
}

/// Taylor constant: |G(x,y)| <= C_N |x|²/|y|^N for |y| >= 2|x|.
double taylor_constant(int N) { return 0.5 * (N - 2) * (N - 1) * std::pow(2.0, N); }

/// Heights where the vertical line through p' meets the boundary of B.
std::vector<double> line_crossings(const ConvexBody& B, const Point& p) {
  std::vector<double> out;
  if (const auto* E = std::get_if<Ellipsoid>(&B)) {
    const int n = E->dim();
    Matrix M = E->rotation * E->semi_axes.cwiseInverse().cwiseAbs2().asDiagonal() * E->rotation.transpose();
    Point w = Point::Zero(n);
    w.head(n - 1) = p - E->center.head(n - 1);
    const double Mw = (M * w)(n - 1);
    const double c = w.dot(M * w) - 1.0;
    const double a = M(n - 1, n - 1);
    const double disc = Mw * Mw - a * c;
    if (disc > 0.0) {
      const double r = std::sqrt(disc);
      out.push_back(E->center(n - 1) + (-Mw - r) / a);
      out.push_back(E->center(n - 1) + (-Mw + r) / a);
    }
  } else if (const auto* P = std::get_if<Paraboloid>(&B)) {
    if (P->gamma > 0.0) {
      const double r2 = P->base.to_unit(p + P->tau).squaredNorm();
      out.push_back(r2 / P->gamma - P->sigma);
    }
  }
  return out;
}

struct Heights {
  std::vector<quad::Segment> segments;
  bool infinite = false;
  double T = 0.0;
};

/// Segments covering the height range of B with the given interior breakpoints;
/// paraboloids end at T, followed by the mapped tail in Map mode.
Heights height_segments(const ConvexBody& B, std::vector<double> breaks, double T, const QuadratureSpec& spec) {
  Heights h;
  double lo = 0.0, hi = 0.0;
  if (const auto* E = std::get_if<Ellipsoid>(&B)) {
    std::tie(lo, hi) = quad::ellipsoid_height_range(*E);
  } else {
    const auto& P = std::get<Paraboloid>(B);
    lo = -P.sigma;
    hi = std::max(T, lo + 1.0);
    h.infinite = true;
    h.T = hi;
  }
  std::vector<double> pts{lo, hi};
  for (double b : breaks)
    if (b > lo && b < hi) pts.push_back(b);
  const bool map_tail = h.infinite && spec.tail == quad::TailMode::Map;
  h.segments = quad::build_segments(pts, true, !h.infinite, map_tail);
  return h;
}

Estimate integrate_heights(const ConvexBody& B, const std::function<double(double)>& g,
                           const std::vector<double>& breaks, double T, const QuadratureSpec& spec,
                           const Tolerance& tol, Heights* info = nullptr) {
  Heights h = height_segments(B, breaks, T, spec);
  if (info) *info = h;
  return quad::integrate_segments(g, h.segments, tol);
}

Point section_point(const Point& yp, double t) {
  Point y(yp.size() + 1);
  y.head(yp.size()) = yp;
  y(yp.size()) = t;
  return y;
}

}  // namespace

double alpha(int N) {
  if (N < 3) fail_domain("α_N needs N >= 3");
  return 1.0 / (N * (N - 2) * unit_ball_volume(N));
}

double kernel_G(const Point& x, const Point& y) {
  const int N = static_cast<int>(x.size());
  if (N < 3) fail_domain("kernel G needs N >= 3");
  if (y.size() != N) fail_domain("kernel G: dimension mismatch");
  const double b = y.norm();
  const double a = (x - y).norm();
  if (b == 0.0) throw SingularInputError("kernel G is singular at y = 0");
  if (a == 0.0) throw SingularInputError("kernel G is singular at y = x");
  return std::pow(a, 2 - N) - std::pow(b, 2 - N) - (N - 2) * x.dot(y) / std::pow(b, N);
}

double kernel_G_stable(const Point& x, const Point& y) {
  const int N = static_cast<int>(x.size());
  if (N != 3 && N != 4) return kernel_G(x, y);
  if (y.size() != N) fail_domain("kernel G: dimension mismatch");
  const double b = y.norm();
  const double a = (x - y).norm();
  if (b == 0.0) throw SingularInputError("kernel G is singular at y = 0");
  if (a == 0.0) throw SingularInputError("kernel G is singular at y = x");
  const double x2 = x.squaredNorm();
  const double q = 2.0 * x.dot(y) - x2;
  if (N == 3) {
    const double b3 = b * b * b;
    return q * q * (2.0 * b + a) / (2.0 * a * b3 * (a + b) * (a + b)) - x2 / (2.0 * b3);
  }
  const double b4 = b * b * b * b;
  return (q * q / (a * a) - x2) / b4;
}

PotentialValue potential(const ConvexBody& M, const Point& x, const QuadratureSpec& spec) {
  spec.validate();
  const int N = checked_dim(M);
  if (x.size() != N) fail_domain("potential: point dimension mismatch");
  if (!x.allFinite()) fail_domain("potential: point must be finite");
  PotentialValue out;
  const double r = x.norm();
  if (r == 0.0) return out;
  const auto* par = std::get_if<Paraboloid>(&M);
  if (par && par->gamma == 0.0) return out;

  const int m = N - 1;
  const Point xp = x.head(m);
  const double xn = x(m);
  const Point origin = Point::Zero(m);
  const double Td = 4.0 * r;
  const bool lateral = xp.norm() > 0.0;
  const Tolerance ktol{spec.rel_tol * 1e-4, 0.0, spec.max_subdivisions, true};
  const Tolerance ftol{spec.rel_tol * 0.1, 0.0, spec.max_subdivisions, true};
  bool inner_ok = true;

  auto g = [&](double t) -> double {
    if (t == 0.0) return 0.0;
    const Section S = body_section(M, t);
    if (S.degenerate()) return 0.0;
    if (std::abs(t) >= Td) {
      auto f = [&](const Point& yp) { return kernel_G_stable(x, section_point(yp, t)); };
      const Estimate e = quad::integrate_section(f, S, origin, ftol);
      inner_ok = inner_ok && e.converged;
      return e.value;
    }
    const auto near = quad::section_kernels(S, xp, xn - t, N, quad::kPotential, ktol);
    const unsigned fam = quad::kPotential | quad::kInverseN | (lateral ? quad::kFirst : 0u);
    const auto far = quad::section_kernels(S, origin, t, N, fam, ktol);
    inner_ok = inner_ok && near.quality.converged && far.quality.converged;
    double lin = xn * t * far.inverse_n;
    if (lateral) lin += xp.dot(far.first);
    return near.potential - far.potential - (N - 2) * lin;
  };

  std::vector<double> breaks{0.0, xn, -Td, Td};
  for (double c : line_crossings(M, xp)) breaks.push_back(c);
  for (double c : line_crossings(M, origin)) breaks.push_back(c);
  const double T = std::max(spec.truncation_height(r), 2.0 * Td);
  const double a = alpha(N);
  const Tolerance otol{spec.rel_tol, 1e-3 * spec.rel_tol * r * r / a, spec.max_subdivisions};
  Heights info;
  const Estimate e = integrate_heights(M, g, breaks, T, spec, otol, &info);
  out.value = a * e.value;
  out.error = a * e.error;
  if (info.infinite) {
    out.tail = quad::make_tail_bound(quad::DecayTag::InvN, N, info.T, a * taylor_constant(N) * r * r,
                                     quad::section_growth(*par));
    out.tail.charged = spec.tail == quad::TailMode::Truncate;
    if (out.tail.charged) out.error += out.tail.bound;
  }
  if (!e.converged || !inner_ok) throw NumericalError("potential quadrature did not converge", out.value, out.error);
  return out;
}

// ------------------------------------------------------------------ interior coefficients

namespace {

/// ∫_0^∞ f(s) ds through s = L² tan²θ, with breaks where s crosses each a_i².
template <class F>
double carlson_integral(F&& f, const Point& a, double rel_tol) {
  const double L = std::exp(a.array().log().mean());
  auto h = [&](double th) {
    const double tn = std::tan(th);
    const double c = std::cos(th);
    const double s = L * L * tn * tn;
    return f(s) * 2.0 * L * L * tn / (c * c);
  };
  std::vector<double> br{0.0, 0.5 * pi};
  for (int i = 0; i < a.size(); ++i) br.push_back(std::atan(a(i) / L));
  std::sort(br.begin(), br.end());
  const Estimate e = quad::gk_adaptive(h, std::span<const double>(br), Tolerance{rel_tol, 0.0, 2000});
  if (!e.converged) throw NumericalError("interior coefficient integral did not converge", e.value, e.error);
  return e.value;
}

double sqrt_product(const Point& a, double s) {
  double p = 1.0;
  for (int j = 0; j < a.size(); ++j) p *= a(j) * a(j) + s;
  return std::sqrt(p);
}

void check_axes(const Point& a) {
  if (a.size() < 2) fail_domain("interior coefficients need dimension >= 2");
  if (!(a.array() > 0.0).all() || !a.allFinite()) fail_domain("semi-axes must be positive and finite");
}

}  // namespace

Point interior_mu(const Point& a, double rel_tol) {
  check_axes(a);
  const int m = static_cast<int>(a.size());
  const double pa = a.prod();
  Point mu(m);
  for (int i = 0; i < m; ++i)
    mu(i) = 0.25 * pa * carlson_integral([&](double s) { return 1.0 / ((a(i) * a(i) + s) * sqrt_product(a, s)); },
                                         a, rel_tol);
  return mu;
}

Matrix interior_mu_jacobian(const Point& a, double rel_tol) {
  check_axes(a);
  const int m = static_cast<int>(a.size());
  const double pa = a.prod();
  const Point mu = interior_mu(a, rel_tol);
  Matrix J(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      auto f = [&](double s) {
        const double ai = a(i) * a(i) + s, ak = a(k) * a(k) + s;
        double v = a(k) * a(k) / (ai * ak);
        if (i == k) v += 2.0 * a(i) * a(i) / (ai * ai);
        return v / sqrt_product(a, s);
      };
      J(i, k) = mu(i) - 0.25 * pa * carlson_integral(f, a, rel_tol);
    }
  }
  return J;
}

double InteriorQuadratic::quadratic(const Point& x) const {
  if (x.size() != m) fail_domain("interior quadratic: dimension mismatch");
  const Point z = rotation.transpose() * x;
  return (mu.array() * z.array().square()).sum();
}

QuadraticBlowdown InteriorQuadratic::blowdown() const {
  Matrix Q = 2.0 * rotation * mu.asDiagonal() * rotation.transpose();
  Q = 0.5 * (Q + Q.transpose()).eval();
  return QuadraticBlowdown(Q);
}

InteriorQuadratic ellipsoid_interior(const Ellipsoid& E) {
  const Point& a = E.semi_axes;
  check_axes(a);
  InteriorQuadratic iq;
  iq.m = static_cast<int>(a.size());
  iq.rotation = E.rotation;
  const Point raw = interior_mu(a);
  iq.mu = raw / (2.0 * raw.sum());
  if (iq.m >= 3) {
    iq.c0 = 0.25 * a.prod() * carlson_integral([&](double s) { return 1.0 / sqrt_product(a, s); }, a, 1e-13);
  } else {
    auto g = [&](double th) {
      const double c = std::cos(th), s = std::sin(th);
      const double rho2 = 1.0 / (c * c / (a(0) * a(0)) + s * s / (a(1) * a(1)));
      return 0.5 * rho2 * 0.5 * std::log(rho2) - 0.25 * rho2;
    };
    const Estimate e = quad::periodic_trapezoid(g, 0.0, 2.0 * pi, Tolerance{1e-14, 0.0, 0, true}, 32, 1 << 16);
    iq.c0 = -e.value / (2.0 * pi);
  }
  return iq;
}

// ------------------------------------------------------------------ solutions

ParaboloidSolution::ParaboloidSolution(Ellipsoid base, double gamma, Point tau, double sigma, Route route,
                                       QuadratureSpec spec)
    : base_(std::move(base)), gamma_(gamma), tau_(std::move(tau)), sigma_(sigma), route_(route),
      spec_(spec) {
  if (base_.dim() != 2 && base_.dim() != 3) fail_domain("paraboloid solutions need N = 3 or N = 4");
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) fail_domain("γ must be finite and nonnegative");
  if (tau_.size() != base_.dim()) fail_domain("τ' dimension mismatch");
  if (!std::isfinite(sigma_)) fail_domain("σ must be finite");
  if (base_.center.norm() != 0.0) fail_domain("the base ellipsoid must be centred");
  spec_.validate();
  interior_ = ellipsoid_interior(base_);
}

double ParaboloidSolution::blowdown(const Point& x) const {
  if (x.size() != dim()) fail_domain("paraboloid solution: dimension mismatch");
  return interior_.quadratic(x.head(base_.dim()) + tau_);
}

double ParaboloidSolution::operator()(const Point& x) const {
  if (x.size() != dim()) fail_domain("paraboloid solution: dimension mismatch");
  const int m = base_.dim();
  Point y = x;
  y.head(m) += tau_;
  y(m) += sigma_;
  const double p = interior_.quadratic(y.head(m));
  if (gamma_ == 0.0) return p;
  if (route_ == Route::Confocal) return solution_confocal(base_, gamma_, y);
  return p + potential(Paraboloid::centred(base_, gamma_), y, spec_).value;
}

double ParaboloidSolution::potential_part(const Point& x) const { return (*this)(x) - blowdown(x); }

ParaboloidSolution ParaboloidSolution::with_sigma(double sigma) const {
  ParaboloidSolution s = *this;
  if (!std::isfinite(sigma)) fail_domain("σ must be finite");
  s.sigma_ = sigma;
  return s;
}

ParaboloidSolution ParaboloidSolution::with_gamma(double gamma) const {
  ParaboloidSolution s = *this;
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail_domain("γ must be finite and nonnegative");
  s.gamma_ = gamma;
  return s;
}

double eval_paraboloid_solution(double gamma, const Ellipsoid& base, const Point& tau, double sigma,
                                const Point& x, const QuadratureSpec& spec, Route route) {
  return ParaboloidSolution(base, gamma, tau, sigma, route, spec)(x);
}

EllipsoidSolution::EllipsoidSolution(Ellipsoid E, double gamma, Point tau, Route route, QuadratureSpec spec)
    : E_(std::move(E)), gamma_(gamma), tau_(std::move(tau)), route_(route), spec_(spec) {
  if (E_.dim() != 3 && E_.dim() != 4) fail_domain("ellipsoid solutions need N = 3 or N = 4");
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) fail_domain("γ must be finite and nonnegative");
  if (tau_.size() != E_.dim()) fail_domain("τ dimension mismatch");
  if (E_.center.norm() != 0.0) fail_domain("the ellipsoid must be centred");
  spec_.validate();
  interior_ = ellipsoid_interior(E_);
}

double EllipsoidSolution::operator()(const Point& x) const {
  if (x.size() != E_.dim()) fail_domain("ellipsoid solution: dimension mismatch");
  const Point y = x + tau_;
  if (gamma_ == 0.0) return interior_.quadratic(y);
  if (route_ == Route::Confocal) return ellipsoid_solution_confocal(E_, gamma_, y);
  return interior_.quadratic(y) + potential(E_.scaled(std::sqrt(gamma_)), y, spec_).value;
}

// ------------------------------------------------------------------ correctors

Point inverse_moment(const ConvexBody& M, const QuadratureSpec& spec) {
  spec.validate();
  const int N = checked_dim(M);
  const int m = N - 1;
  const auto* par = std::get_if<Paraboloid>(&M);
  if (par && N == 3) fail_domain("∫ y/|y|^N over a paraboloid diverges for N = 3");
  Point out = Point::Zero(N);
  if (par && par->gamma == 0.0) return out;
  const Point origin = Point::Zero(m);
  const Tolerance ktol{spec.rel_tol * 0.1, 0.0, spec.max_subdivisions, true};
  const Tolerance otol{spec.rel_tol, 0.0, spec.max_subdivisions, true};
  std::vector<double> breaks{0.0};
  for (double c : line_crossings(M, origin)) breaks.push_back(c);
  const double T = spec.truncation_height(0.0);
  bool inner_ok = true;
  // The e^N component goes first; its ∫|t K| sets the absolute floor for the lateral ones.
  double scale = 0.0;
  for (int c = m; c >= 0; --c) {
    auto g = [&](double t) -> double {
      if (t == 0.0) return 0.0;
      const Section S = body_section(M, t);
      if (S.degenerate()) return 0.0;
      const unsigned fam = c == m ? quad::kInverseN : quad::kFirst;
      const auto k = quad::section_kernels(S, origin, t, N, fam, ktol);
      inner_ok = inner_ok && k.quality.converged;
      return c == m ? t * k.inverse_n : k.first(c);
    };
    Tolerance ctol = otol;
    ctol.abs = spec.rel_tol * scale;
    const Estimate e = integrate_heights(M, g, breaks, T, spec, ctol);
    if (!e.converged || !inner_ok) throw NumericalError("moment quadrature did not converge", e.value, e.error);
    out(c) = e.value;
    if (c == m) scale = e.l1;
  }
  return out;
}

AffineFunction affine_corrector_AR(const ConvexBody& M, double R, const QuadratureSpec& spec) {
  spec.validate();
  const int N = checked_dim(M);
  if (N != 3) fail_domain("the affine corrector A^R is defined for N = 3");
  if (!(R > 0.0) || !std::isfinite(R)) fail_domain("R must be positive and finite");
  const auto* par = std::get_if<Paraboloid>(&M);
  if (par && par->gamma == 0.0) return AffineFunction::zero(3);
  const Point origin = Point::Zero(2);
  const double Td = 4.0 * R;
  const Tolerance ktol{spec.rel_tol * 1e-4, 0.0, spec.max_subdivisions, true};
  const Tolerance ftol{spec.rel_tol * 0.1, 0.0, spec.max_subdivisions, true};
  const Tolerance otol{spec.rel_tol, 0.0, spec.max_subdivisions, true};
  std::vector<double> breaks{0.0, -R, Td, -Td};
  for (double c : line_crossings(M, origin)) breaks.push_back(c);
  const double T = std::max(spec.truncation_height(R), 2.0 * Td);
  bool inner_ok = true;

  // component 0: constant A^R(0); 1..3: slope.
  auto pointwise = [R](int comp, const Point& y) {
    const double b = y.norm();
    const double c = std::sqrt(y(0) * y(0) + y(1) * y(1) + (y(2) + R) * (y(2) + R));
    const double c3 = c * c * c, b3 = b * b * b;
    if (comp == 0) return R * ((R + y(2)) / c3 - (2.0 * y(2) + R) / (b * c * (b + c)));
    const double bmc = -(2.0 * R * y(2) + R * R) / (b + c);
    const double diff = bmc * (b * b + b * c + c * c) / (b3 * c3);  // 1/c³ - 1/b³
    if (comp < 3) return y(comp - 1) * diff;
    return y(2) * diff + R / c3;
  };
  // ∂₃ first: its ∫|integrand| is the absolute floor of the other components.
  double result[4];
  double scale = 0.0;
  for (int comp : {3, 0, 1, 2}) {
    auto g = [&](double t) -> double {
      if (t == 0.0 || t == -R) return 0.0;
      const Section S = body_section(M, t);
      if (S.degenerate()) return 0.0;
      if (std::abs(t) >= Td) {
        auto f = [&](const Point& yp) { return pointwise(comp, section_point(yp, t)); };
        const Estimate e = quad::integrate_section(f, S, origin, ftol);
        inner_ok = inner_ok && e.converged;
        return e.value;
      }
      unsigned fam = 0;
      if (comp == 0) fam = quad::kPotential | quad::kInverseN;
      else if (comp < 3) fam = quad::kFirst;
      else fam = quad::kInverseN;
      const auto k0 = quad::section_kernels(S, origin, t, 3, fam, ktol);
      const auto kR = quad::section_kernels(S, origin, t + R, 3, fam, ktol);
      inner_ok = inner_ok && k0.quality.converged && kR.quality.converged;
      if (comp == 0) return -k0.potential + kR.potential + R * (R + t) * kR.inverse_n;
      if (comp < 3) return -k0.first(comp - 1) + kR.first(comp - 1);
      return -t * k0.inverse_n + (t + R) * kR.inverse_n;
    };
    Tolerance ctol = otol;
    ctol.abs = spec.rel_tol * scale * (comp == 0 ? R : 1.0);
    const Estimate e = integrate_heights(M, g, breaks, T, spec, ctol);
    if (!e.converged || !inner_ok)
      throw NumericalError("affine corrector quadrature did not converge", e.value, e.error);
    result[comp] = alpha(3) * e.value;
    if (comp == 3) scale = e.l1;
  }
  return AffineFunction(result[0], make_point({result[1], result[2], result[3]}));
}

double d3_AR(double gamma, double R, const Ellipsoid& base, const QuadratureSpec& spec) {
  spec.validate();
  if (base.dim() != 2) fail_domain("∂₃A^R is defined for N = 3 (two-dimensional base)");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail_domain("γ must be finite and nonnegative");
  if (!(R > 0.0) || !std::isfinite(R)) fail_domain("R must be positive and finite");
  if (gamma == 0.0) return 0.0;
  const Paraboloid P = Paraboloid::centred(base, gamma);
  const Tolerance atol{spec.rel_tol * 0.01, 0.0, 0, false};
  auto g = [&](double t) -> double {
    if (!(t > 0.0)) return 0.0;
    const Point ax = base.semi_axes * std::sqrt(gamma * t);
    const double rin = t > R ? std::sqrt((t - R) / t) : 0.0;
    auto ang = [&](double th) {
      const double s = std::hypot(ax(0) * std::cos(th), ax(1) * std::sin(th));
      return (rk::inv3(s, t) - (rin > 0.0 ? rk::inv3(s * rin, t) : 0.0)) / (s * s);
    };
    const Estimate e = quad::periodic_trapezoid(ang, 0.0, 2.0 * pi, atol, 16, 1 << 14);
    return t * ax.prod() * e.value;
  };
  const double T = std::max(spec.truncation_height(R), 4.0 * R);
  Heights info;
  const Estimate e = integrate_heights(P, g, {R, 4.0 * R}, T, spec,
                                       Tolerance{spec.rel_tol, 0.0, spec.max_subdivisions}, &info);
  double error = e.error;
  if (spec.tail == quad::TailMode::Truncate) error += base.volume() * gamma * R / info.T;
  if (!e.converged) throw NumericalError("∂₃A^R quadrature did not converge", -alpha(3) * e.value, error);
  return -alpha(3) * e.value;
}

WEllDecomposition decompose_W_ell(const ConvexBody& M, const QuadratureSpec& spec, Route route) {
  const int N = checked_dim(M);
  if (N < 4) fail_domain("the W/ℓ split needs N >= 4; use affine_corrector_AR for N = 3");
  WEllDecomposition d;
  d.ell = AffineFunction(0.0, alpha(N) * (N - 2) * inverse_moment(M, spec));
  const auto* par = std::get_if<Paraboloid>(&M);
  if (route == Route::Confocal && par) {
    const Paraboloid P = *par;
    const AffineFunction ell = d.ell;
    d.W = [P, ell](const Point& x) {
      return translated_potential_confocal(P.base, P.gamma, P.tau, P.sigma, x) + ell(x);
    };
  } else {
    const ConvexBody body = M;
    const AffineFunction ell = d.ell;
    d.W = [body, ell, spec](const Point& x) { return potential(body, x, spec).value + ell(x); };
  }
  return d;
}

}  // namespace olab::pot

#include "olab/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "olab/error.hpp"
#include "olab/geometry.hpp"

namespace olab::match {

pot::ParaboloidSolution MatchedParaboloid::solution(pot::Route route) const {
  return pot::ParaboloidSolution(base, gamma, tau, sigma, route);
}

EllipsoidMatch solve_matching_ellipsoid(const QuadraticBlowdown& p, double tol, int max_steps) {
  if (!p.positive_definite()) fail_domain("the matching ellipsoid needs a positive definite Q");
  const int m = p.dim();
  const Point q = p.eigenvalues();
  EllipsoidMatch out{Ellipsoid(Point::Zero(m), Point::Ones(m), p.eigenvectors()), 0.0, 0};
  if (m == 1) return out;
  Point l(m);
  for (int i = 0; i < m; ++i) l(i) = -0.5 * std::log(q(i));
  l.array() -= l.mean();
  auto residual = [&](const Point& ll) { return (pot::interior_mu(ll.array().exp().matrix()) - 0.5 * q).eval(); };
  Point r = residual(l);
  double rn = r.cwiseAbs().maxCoeff();
  while (rn > tol) {
    if (out.newton_steps++ >= max_steps)
      throw NumericalError("matching ellipsoid Newton iteration did not converge", rn, rn);
    const Matrix J = pot::interior_mu_jacobian(l.array().exp().matrix());
    Matrix A(m, m);
    Point F(m);
    A.topRows(m - 1) = J.topRows(m - 1);
    A.row(m - 1).setOnes();
    F.head(m - 1) = r.head(m - 1);
    F(m - 1) = l.sum();
    const Point step = -A.fullPivLu().solve(F);
    double damp = 1.0;
    Point trial;
    Point rt;
    double tn = 0.0;
    for (int k = 0; k < 40; ++k) {
      trial = l + damp * step;
      rt = residual(trial);
      tn = rt.cwiseAbs().maxCoeff();
      if (tn < rn) break;
      damp *= 0.5;
    }
    if (!(tn < rn)) throw NumericalError("matching ellipsoid line search failed", rn, rn);
    l = trial;
    r = rt;
    rn = tn;
  }
  l.array() -= l.mean();
  out.E = Ellipsoid(Point::Zero(m), l.array().exp().matrix(), p.eigenvectors());
  out.residual = residual(l).cwiseAbs().maxCoeff();
  return out;
}

double lambda_gamma(double gamma, const Ellipsoid& base, const quad::QuadratureSpec& spec) {
  const int N = base.dim() + 1;
  if (N < 4) fail_domain("λ_γ diverges for N = 3");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail_domain("γ must be finite and nonnegative");
  if (gamma == 0.0) return 0.0;
  return pot::alpha(N) * (N - 2) * pot::inverse_moment(Paraboloid::centred(base, gamma), spec)(N - 1);
}

GammaSolve solve_gamma_N4(double b_N, const Ellipsoid& base, const quad::QuadratureSpec& spec, double rel) {
  if (!(b_N < 0.0) || !std::isfinite(b_N)) fail_domain("solve_gamma_N4 needs b_N < 0");
  const double target = -b_N;
  GammaSolve s;
  auto f = [&](double g) {
    ++s.evaluations;
    return lambda_gamma(g, base, spec) - target;
  };
  double lo = 0.0, hi = 1.0;
  double fhi = f(hi);
  for (int k = 0; fhi < 0.0; ++k) {
    if (k >= 200) throw NumericalError("λ_γ bracket expansion hit its cap", hi, fhi);
    lo = hi;
    hi *= 2.0;
    fhi = f(hi);
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= rel * target || hi - lo <= 1e-15 * hi) {
      s.gamma = mid;
      s.residual = fm;
      break;
    }
    (fm < 0.0 ? lo : hi) = mid;
  }
  s.bracket_lo = lo;
  s.bracket_hi = hi;
  return s;
}

double estimate_c_E(const Ellipsoid& base, const quad::QuadratureSpec& spec) {
  double c = std::numeric_limits<double>::infinity();
  for (double R : {10.0, 100.0, 1000.0}) c = std::min(c, -2.0 * pot::d3_AR(1.0, R, base, spec) / std::log(R));
  return 0.5 * c;
}

GammaSolve solve_gamma_N3(double beta, double R, const Ellipsoid& base, const quad::QuadratureSpec& spec, double B,
                          double rel) {
  if (base.dim() != 2) fail_domain("solve_gamma_N3 needs a two-dimensional base");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail_domain("β must be finite and nonnegative");
  if (B < 0.0) B = beta;
  if (beta > B) fail_domain("β exceeds the bound B");
  GammaSolve s;
  if (beta == 0.0) return s;
  if (!(R > 1.0)) fail_domain("solve_gamma_N3 needs R > 1");
  s.c_E = estimate_c_E(base, spec);
  s.gamma_B = 2.0 * B / s.c_E;
  s.R_B = std::max(s.gamma_B * s.gamma_B, 1.0);
  if (R < s.R_B) {
    std::ostringstream os;
    os << "R = " << R << " is below R_B = " << s.R_B << " (γ_B = " << s.gamma_B << ")";
    fail_domain(os.str());
  }
  const double target = beta * std::log(R);
  auto f = [&](double g) {
    ++s.evaluations;
    return pot::d3_AR(g, R, base, spec) + target;
  };
  double lo = 0.0, hi = s.gamma_B;
  const double fhi = f(hi);
  if (fhi > 0.0) {
    std::ostringstream os;
    os << "target -β log R = " << -target << " unreachable on [0, " << hi << "]: ∂₃A^R(γ_B) = " << fhi - target;
    fail_domain(os.str());
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= rel * target || hi - lo <= 1e-15 * hi) {
      s.gamma = mid;
      s.residual = fm;
      break;
    }
    (fm > 0.0 ? lo : hi) = mid;
  }
  s.bracket_lo = lo;
  s.bracket_hi = hi;
  return s;
}

Point tau_prime(const QuadraticBlowdown& p, const Point& b_prime) {
  if (b_prime.size() != p.dim()) fail_domain("b' dimension mismatch");
  if (!p.positive_definite()) throw SingularInputError("τ' = Q⁻¹b' needs an invertible Q");
  return p.solve(b_prime);
}

std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::Below: return "u<=v";
    case Ordering::Above: return "u>=v";
    case Ordering::Crossing: return "crossing";
    case Ordering::Equal: return "equal";
  }
  return "equal";
}

OrderingResult ordering_test(const ScalarField& u, const ScalarField& v, double tol, int band_layers) {
  if (!(u.grid() == v.grid())) fail_domain("ordering_test needs fields on the same grid");
  if (!(tol >= 0.0)) fail_domain("ordering tolerance must be nonnegative");
  const Grid& g = u.grid();
  OrderingResult r;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.boundary_layer(i) < band_layers) continue;
    const double d = u[i] - v[i];
    if (d > tol) {
      ++r.above;
      r.max_above = std::max(r.max_above, d);
    } else if (d < -tol) {
      ++r.below;
      r.max_below = std::max(r.max_below, -d);
    }
  }
  constexpr std::size_t kMinSet = 4;
  if (r.above >= kMinSet && r.below >= kMinSet) r.verdict = Ordering::Crossing;
  else if (r.above == 0 && r.below == 0) r.verdict = Ordering::Equal;
  else if (r.below >= kMinSet) r.verdict = Ordering::Below;
  else if (r.above >= kMinSet) r.verdict = Ordering::Above;
  else r.verdict = r.above >= r.below ? Ordering::Above : Ordering::Below;
  return r;
}

namespace {

bool below_or_equal(Ordering o) { return o == Ordering::Below || o == Ordering::Equal; }

struct Contact {
  double sup = 0.0;
  double excess = 0.0;
  double interior_min = std::numeric_limits<double>::infinity();
  double band_min = std::numeric_limits<double>::infinity();
};

Contact contact_of(const ScalarField& u, const ScalarField& w, int band_layers) {
  Contact c;
  const Grid& g = u.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = u[i] - w[i];
    const bool interior = g.boundary_layer(i) >= band_layers;
    if (interior) {
      c.sup = std::max(c.sup, std::abs(d));
      c.excess = std::max(c.excess, -d);
      c.interior_min = std::min(c.interior_min, d);
    } else {
      c.band_min = std::min(c.band_min, d);
    }
  }
  c.excess = std::max(c.excess, 0.0);
  return c;
}

}  // namespace

SlideResult slide_sigma_bar(const ScalarField& u, const Family& family, double lo, double hi, const SlideOptions& opt) {
  if (!(lo < hi)) fail_domain("slide range must satisfy lo < hi");
  SlideResult s;
  auto verdict = [&](double sigma) {
    ++s.evaluations;
    const ScalarField w = family(sigma);
    return ordering_test(w, u, opt.field_tol, opt.band_layers).verdict;
  };
  s.lo_verdict = verdict(lo);
  s.hi_verdict = verdict(hi);
  if (s.lo_verdict != Ordering::Above || !below_or_equal(s.hi_verdict)) {
    std::ostringstream os;
    os << "no sliding bracket: u_lo vs u is " << to_string(s.lo_verdict) << ", u_hi vs u is "
       << to_string(s.hi_verdict);
    fail_domain(os.str());
  }
  for (int k = 0; hi - lo > opt.sigma_tol; ++k) {
    if (k >= opt.max_iterations) throw NumericalError("σ̄ bisection did not converge", hi, hi - lo);
    const double mid = 0.5 * (lo + hi);
    (below_or_equal(verdict(mid)) ? hi : lo) = mid;
  }
  s.lo = lo;
  s.hi = hi;
  s.sigma_bar = hi;
  const Contact c = contact_of(u, family(hi), opt.band_layers);
  s.sup_difference = c.sup;
  s.positive_excess = c.excess;
  s.contact = c.interior_min;
  s.voided = c.interior_min > opt.field_tol && c.band_min <= opt.field_tol;
  return s;
}

CompactMatch compact_case_match(const ScalarField& u, const QuadraticBlowdown& p, const SlideOptions& opt) {
  const Grid& g = u.grid();
  const int N = g.dim();
  if (p.dim() != N) fail_domain("compact matching needs a full N-dimensional blow-down");
  if (!p.positive_definite()) fail_domain("compact matching needs a positive definite Q");
  const EllipsoidMatch em = solve_matching_ellipsoid(p);
  const auto cm = geom::coincidence_mask(u);
  if (cm.mask.count() == 0) fail_domain("the coincidence set is empty");
  Point m = Point::Zero(N);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!cm.mask.inside[i]) continue;
    if (g.boundary_layer(i) < 2) fail_domain("the coincidence set reaches the box boundary");
    const Point y = g.coord(i);
    const double r = y.norm();
    if (r > 0.0) m += y / std::pow(r, N);
  }
  m *= g.cell_volume() / (N * unit_ball_volume(N));
  CompactMatch out{em.E, 0.0, p.solve(-m), 0.0, 0.0, 0.0, 0};
  auto sample = [&](double gamma) {
    const pot::EllipsoidSolution s(out.E, gamma, out.tau);
    return ScalarField::sample(g, [&](const Point& x) { return s(x); });
  };
  auto below = [&](double gamma) {
    ++out.evaluations;
    return below_or_equal(ordering_test(sample(gamma), u, opt.field_tol, opt.band_layers).verdict);
  };
  double lo = 0.5, hi = 1.0;
  for (int k = 0; !below(hi); ++k) {
    if (k >= 60) throw NumericalError("compact matching: no upper γ bracket", hi, 0.0);
    lo = hi;
    hi *= 2.0;
  }
  if (lo == 0.5)
    for (int k = 0; below(lo); ++k) {
      if (k >= 60) throw NumericalError("compact matching: no lower γ bracket", lo, 0.0);
      hi = lo;
      lo *= 0.5;
    }
  for (int k = 0; hi - lo > opt.sigma_tol * hi; ++k) {
    if (k >= opt.max_iterations) throw NumericalError("compact matching bisection did not converge", hi, hi - lo);
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? hi : lo) = mid;
  }
  out.gamma = hi;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.sup_error = (u - sample(hi)).max_abs();
  return out;
}

}  // namespace olab::match

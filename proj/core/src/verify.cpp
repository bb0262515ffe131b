#include "olab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "olab/acf.hpp"
#include "olab/error.hpp"
#include "olab/geometry.hpp"
#include "olab/matching.hpp"
#include "olab/potential.hpp"
#include "olab/solver.hpp"

namespace olab::verify {

namespace {

constexpr double pi = std::numbers::pi;

// Pinned tolerances.
constexpr double kQuadTol = 1e-7;
constexpr double kSolverTol = 1e-9;
constexpr double kBallRel = 1e-6;
constexpr double kBallSeconds = 10.0;
constexpr double kScalingFactor = 2.0;
constexpr double kScalingSeconds = 60.0;
constexpr double kPdeFactor = 10.0;
constexpr double kPdeSeconds = 300.0;
constexpr double kExpansionFactor = 10.0;
constexpr double kExpansionSeconds = 600.0;
constexpr double kPhiRel = 0.04;
constexpr double kMonotoneSlack = 0.03;
constexpr double kAcfSeconds = 600.0;
constexpr double kSubharmonicFactor = 5.0;
constexpr double kControlFactor = 10.0;
constexpr double kD3Factor = 2.0;
constexpr double kSlopeStability = 0.2;
constexpr double kBmoSpread = 3.0;
constexpr double kExponent = 0.5;
constexpr double kExponentTol = 0.15;
constexpr double kMatchTol = 1e-8;
constexpr double kRoundTrip = 1e-4;
constexpr double kTauEps = 64.0;
constexpr double kSlideTol = 1e-7;
constexpr double kSlideFieldTol = 1e-10;
constexpr double kSlideSupFactor = 5.0;
constexpr double kSlideSigmaFactor = 2.0;
constexpr double kDichotomyTol = 0.05;
constexpr double kSectionExact = 1e-12;
constexpr double kGrowthEnvelope = 2.0;
constexpr double kDiameterSpread = 1.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Check {
public:
  explicit Check(CriterionResult& r) : r_(r) {}
  bool le(const std::string& what, double value, double bound) {
    const bool ok = value <= bound;
    r_.details.push_back(what + " = " + num(value) + (ok ? " <= " : " > ") + num(bound));
    all_ = all_ && ok;
    return ok;
  }
  bool ge(const std::string& what, double value, double bound) {
    const bool ok = value >= bound;
    r_.details.push_back(what + " = " + num(value) + (ok ? " >= " : " < ") + num(bound));
    all_ = all_ && ok;
    return ok;
  }
  bool that(const std::string& what, bool ok) {
    r_.details.push_back(what + (ok ? ": yes" : ": NO"));
    all_ = all_ && ok;
    return ok;
  }
  void note(const std::string& s) { r_.details.push_back(s); }
  bool all() const { return all_; }

private:
  CriterionResult& r_;
  bool all_ = true;
};

Ellipsoid base2() { return Ellipsoid::axis_aligned(zero_point(2), make_point({1.2, 1.0 / 1.2})); }
Ellipsoid base3() { return Ellipsoid::axis_aligned(zero_point(3), make_point({1.2, 1.0, 1.0 / 1.2})); }

quad::QuadratureSpec qspec() {
  quad::QuadratureSpec s;
  s.rel_tol = kQuadTol;
  return s;
}

Point random_point(std::mt19937_64& rng, const Point& lo, const Point& hi) {
  Point x(lo.size());
  for (int a = 0; a < lo.size(); ++a) x(a) = std::uniform_real_distribution<double>(lo(a), hi(a))(rng);
  return x;
}

ScalarField sample(const Grid& g, const pot::ParaboloidSolution& s) {
  return ScalarField::sample(g, [&](const Point& x) { return s(x); });
}

ScalarField solve_from(const Grid& g, const std::function<double(const Point&)>& ref, double omega = 1.6) {
  solver::SolverOptions opt;
  opt.tol = kSolverTol;
  opt.omega = omega;
  const auto res = solver::solve(solver::boundary_from_solution(ref, g), opt);
  if (!res.converged) throw NumericalError("PSOR did not converge", res.complementarity, res.complementarity);
  return res.solution;
}

/// Membership of γP is constant on the 26 directions at radii h and 2h.
bool away_from_boundary(const Paraboloid& P, const Point& x, double h) {
  const bool in = P.contains(x);
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        if (!a && !b && !c) continue;
        const Point d = make_point({double(a), double(b), double(c)}).normalized();
        for (double s : {h, 2.0 * h})
          if (P.contains(x + s * d) != in) return false;
      }
  return true;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// ------------------------------------------------------------------ solved pairs shared by 5 and 6

struct SolvedPairs {
  Grid grid;
  std::vector<ScalarField> differences;
};

const SolvedPairs& solved_pairs() {
  static const SolvedPairs pairs = [] {
    SolvedPairs sp{Grid::cube(3, 1.0, 41), {}};
    std::mt19937_64 rng(20240611);
    auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto field = [&] {
      const double ratio = U(1.0, 1.5);
      const Ellipsoid E = Ellipsoid::axis_aligned(zero_point(2), make_point({std::sqrt(ratio), 1.0 / std::sqrt(ratio)}));
      const pot::ParaboloidSolution s(E, U(0.5, 2.0), make_point({U(-0.2, 0.2), U(-0.2, 0.2)}), U(-0.3, 0.3));
      return solve_from(sp.grid, [&](const Point& x) { return s(x); });
    };
    for (int k = 0; k < 10; ++k) {
      const ScalarField u1 = field();
      const ScalarField u2 = field();
      sp.differences.push_back(u1 - u2);
    }
    return sp;
  }();
  return pairs;
}

// ------------------------------------------------------------------ criteria

void c1_ball(Check& ck) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  const Ellipsoid B = Ellipsoid::ball(zero_point(3), 1.0);
  double worst = 0.0;
  int n = 0;
  while (n < 20) {
    const Point x = random_point(rng, Point::Constant(3, -0.9), Point::Constant(3, 0.9));
    if (x.norm() > 0.9 || x.norm() < 0.05) continue;
    const double exact = -x.squaredNorm() / 6.0;
    worst = std::max(worst, std::abs(pot::potential(B, x, qspec()).value - exact) / std::abs(exact));
    ++n;
  }
  ck.le("max relative error over 20 points", worst, kBallRel);
  ck.le("runtime [s]", seconds_since(t0), kBallSeconds);
}

void c2_scaling(Check& ck) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  const Ellipsoid E = base2();
  const Paraboloid P = Paraboloid::centred(E, 1.0);
  for (double g : {0.5, 2.0}) {
    const Paraboloid gP = Paraboloid::centred(E, g);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Point x = random_point(rng, make_point({-1.5, -1.5, -1.0}), make_point({1.5, 1.5, 2.0}));
      const double lhs = pot::potential(gP, g * x, qspec()).value;
      const double rhs = g * g * pot::potential(P, x, qspec()).value;
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }
    ck.le("γ = " + num(g) + ": max |V_γP(γx) - γ²V_P(x)| / |γ²V_P(x)|", worst, kScalingFactor * kQuadTol);
  }
  ck.le("runtime [s]", seconds_since(t0), kScalingSeconds);
}

void c3_pde(Check& ck) {
  const auto t0 = Clock::now();
  const Ellipsoid E = base2();
  const Paraboloid P = Paraboloid::centred(E, 1.0);
  const Grid g(make_point({-1.5, -1.5, -0.5}), make_point({1.5, 1.5, 2.5}), {41, 41, 41});
  const double h = g.h_max();
  const double bound = kPdeFactor * (h * h + kQuadTol);
  const ScalarField V = ScalarField::sample(g, [&](const Point& x) { return pot::potential_confocal(E, 1.0, x); });
  const MaskedField L = discrete_laplacian(V);
  double worst = 0.0;
  std::size_t used = 0;
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!L.valid[i]) continue;
    const Point x = g.coord(i);
    if (!away_from_boundary(P, x, h)) continue;
    eligible.push_back(i);
    ++used;
    worst = std::max(worst, std::abs(L.values[i] + (P.contains(x) ? 1.0 : 0.0)));
  }
  ck.note("nodes checked: " + std::to_string(used));
  ck.le("max |Δ_h V + χ| (confocal samples, 41³)", worst, bound);
  std::mt19937_64 rng(3);
  double worst_q = 0.0, worst_agree = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng)];
    const Point x = g.coord(i);
    double lap = 0.0;
    const double vc = pot::potential(P, x, qspec()).value;
    worst_agree = std::max(worst_agree, std::abs(vc - V[i]) / std::max(1.0, std::abs(V[i])));
    for (int a = 0; a < 3; ++a)
      for (double s : {-h, h}) {
        Point y = x;
        y(a) += s;
        lap += pot::potential(P, y, qspec()).value - vc;
      }
    lap /= h * h;
    worst_q = std::max(worst_q, std::abs(lap + (P.contains(x) ? 1.0 : 0.0)));
  }
  ck.le("max |Δ_h V + χ| (definition quadrature, 20 stencils)", worst_q, bound);
  ck.le("quadrature vs confocal samples at those nodes", worst_agree, kPdeFactor * kQuadTol);
  ck.le("runtime [s]", seconds_since(t0), kPdeSeconds);
}

void c4_expansion(Check& ck) {
  const auto t0 = Clock::now();
  const Ellipsoid E = base2();
  const double L = 0.08;
  const Grid g = Grid::cube(3, L, 61);
  const pot::ParaboloidSolution ref(E, 1.0, zero_point(2), 0.0);
  const ScalarField u = solve_from(g, [&](const Point& x) { return ref(x); });
  const ScalarField r = sample(g, ref);
  const double err = (u - r).max_abs();
  ck.note("box [-0.08, 0.08]³ around the vertex, 61³ nodes, h = " + num(g.h_max()));
  ck.le("sup |u_PSOR - (p + V_γP)|", err, kExpansionFactor * (kSolverTol + kQuadTol));
  std::mt19937_64 rng(4);
  double agree = 0.0;
  const pot::ParaboloidSolution quad_ref(E, 1.0, zero_point(2), 0.0, pot::Route::Quadrature, qspec());
  for (int k = 0; k < 30; ++k) {
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, g.size() - 1)(rng);
    agree = std::max(agree, std::abs(quad_ref(g.coord(i)) - r[i]));
  }
  ck.le("definition quadrature vs confocal reference at 30 nodes", agree, kQuadTol);
  ck.le("runtime [s]", seconds_since(t0), kExpansionSeconds);
}

void c5_acf(Check& ck) {
  const auto t0 = Clock::now();
  const Grid g = Grid::cube(3, 2.2, 129);
  const ScalarField v = ScalarField::sample(g, [](const Point& x) { return x(2); });
  for (double r : {0.5, 1.0, 2.0})
    ck.le("r = " + num(r) + ": |Φ(x₃)/π² - 1|", std::abs(acf::phi(v, r) / (pi * pi) - 1.0), kPhiRel);
  const SolvedPairs& sp = solved_pairs();
  const std::vector<double> radii{0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  double worst = 0.0;
  int nontrivial = 0;
  for (const ScalarField& d : sp.differences) {
    const auto prof = acf::phi_profile(d, radii);
    worst = std::max(worst, prof.verdict);
    if (prof.phi.back() > 0.0) ++nontrivial;
  }
  ck.note("pairs with both-signed differences: " + std::to_string(nontrivial) + " of 10");
  ck.le("max monotonicity verdict over 10 solved differences", worst, kMonotoneSlack);
  ck.le("runtime [s]", seconds_since(t0), kAcfSeconds);
}

void c6_subharmonic(Check& ck) {
  const SolvedPairs& sp = solved_pairs();
  const double h = sp.grid.h_max();
  const double bound = kSubharmonicFactor * h * h;
  double worst = 0.0;
  for (const ScalarField& d : sp.differences)
    for (acf::Part p : {acf::Part::Plus, acf::Part::Minus, acf::Part::Abs})
      worst = std::max(worst, acf::subharmonicity_check(d, p));
  ck.le("max violation over 10 differences and parts +, -, abs", worst, bound);
  const ScalarField bump =
      ScalarField::sample(sp.grid, [&](const Point& x) { return -std::exp(-x.squaredNorm() / (2.0 * h * h)); });
  ck.ge("Gaussian bump (width h) control, part -", acf::subharmonicity_check(bump, acf::Part::Minus),
        kControlFactor * bound);
}

void c7_d3(Check& ck) {
  const Ellipsoid E = base2();
  for (auto [lam, R] : {std::pair{2.0, 10.0}, std::pair{0.5, 40.0}}) {
    const double lhs = pot::d3_AR(lam, R, E, qspec());
    const double rhs = lam * pot::d3_AR(1.0, R / lam, E, qspec());
    ck.le("(λ, R) = (" + num(lam) + ", " + num(R) + "): relative defect", std::abs(lhs - rhs) / std::abs(rhs),
          kD3Factor * kQuadTol);
  }
  const double d1 = -pot::d3_AR(1.0, 10.0, E, qspec());
  const double d2 = -pot::d3_AR(1.0, 100.0, E, qspec());
  const double d3 = -pot::d3_AR(1.0, 1000.0, E, qspec());
  const double s1 = (d2 - d1) / std::log(10.0);
  const double s2 = (d3 - d2) / std::log(10.0);
  ck.note("-∂₃A^R at R = 10, 100, 1000: " + num(d1) + ", " + num(d2) + ", " + num(d3));
  ck.that("log-R slopes positive", s1 > 0.0 && s2 > 0.0);
  ck.le("slope variation |s₂ - s₁| / s₂", std::abs(s2 - s1) / s2, kSlopeStability);
}

void c8_bmo(Check& ck) {
  const Ellipsoid E = base2();
  const Paraboloid P = Paraboloid::centred(E, 1.0);
  std::vector<double> v;
  for (double R : {8.0, 32.0, 128.0}) {
    const AffineFunction A = pot::affine_corrector_AR(P, R, qspec());
    const double m = quad::ball_mean(
        [&](const Point& x) { return std::abs(pot::potential_confocal(E, 1.0, x) - A(x)); }, zero_point(3), R);
    v.push_back(m / R);
    ck.note("R = " + num(R) + ": (1/R)⨍|V - A^R| = " + num(m / R));
  }
  ck.le("max/min across R", *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end()),
        kBmoSpread);
}

void c9_growth(Check& ck) {
  const Ellipsoid E = base3();
  const auto d = pot::decompose_W_ell(Paraboloid::centred(E, 1.0), qspec(), pot::Route::Confocal);
  std::vector<double> lr, lm;
  for (int k = 0; k <= 4; ++k) {
    const double R = 10.0 * std::pow(10.0, k / 4.0);
    const double m = quad::ball_mean([&](const Point& x) { return std::abs(d.W(x)); }, zero_point(4), R);
    lr.push_back(std::log(R));
    lm.push_back(std::log(m));
  }
  const double e = fitted_slope(lr, lm);
  ck.le("|fitted exponent - 0.5| over R ∈ [10, 100]", std::abs(e - kExponent), kExponentTol);
  ck.note("fitted exponent = " + num(e));
}

void c10_matching(Check& ck) {
  for (auto [q1, q2] : {std::pair{2.0 / 3.0, 1.0 / 3.0}, std::pair{0.55, 0.45}, std::pair{0.8, 0.2}}) {
    const QuadraticBlowdown p = QuadraticBlowdown::diagonal({q1, q2});
    const auto em = match::solve_matching_ellipsoid(p, 1e-12);
    // Eigenvalues ascend: axis 0 belongs to q2, axis 1 to q1; μ_i = a_j/(2(a₁+a₂)) = q_i/2 gives a_1/a_2 = q_2/q_1.
    const double ratio = em.E.semi_axes(1) / em.E.semi_axes(0);
    ck.le("Q = diag(" + num(q1) + ", " + num(q2) + "): |a(q₁)/a(q₂) - q₂/q₁|", std::abs(ratio - q2 / q1), kMatchTol);
  }
  const auto e4 = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({0.4, 0.4, 0.2}));
  ck.le("N = 4 ellipsoid residual", e4.residual, kMatchTol);
  const double g4 = 1.7;
  const auto s4 = match::solve_gamma_N4(-match::lambda_gamma(g4, e4.E, qspec()), e4.E, qspec());
  ck.le("N = 4 γ round trip through λ_γ", std::abs(s4.gamma - g4), kRoundTrip);
  const Ellipsoid E = base2();
  const double g3 = 1.3, R = 100.0;
  const double beta = -pot::d3_AR(g3, R, E, qspec()) / std::log(R);
  const auto s3 = match::solve_gamma_N3(beta, R, E, qspec());
  ck.le("N = 3 γ round trip through ∂₃A^R", std::abs(s3.gamma - g3), kRoundTrip);
  std::mt19937_64 rng(10);
  const QuadraticBlowdown p3 = QuadraticBlowdown::diagonal({0.5, 0.3, 0.2});
  double worst = 0.0;
  const Point b = make_point({0.7, -1.1, 0.4});
  const Point tau = match::tau_prime(p3, b);
  for (int k = 0; k < 5; ++k) {
    const Point x = random_point(rng, Point::Constant(3, -2.0), Point::Constant(3, 2.0));
    const double scale = b.norm() * x.norm();
    worst = std::max(worst, std::abs(p3.gradient(x).dot(tau) - b.dot(x)) / scale);
  }
  ck.le("max |∇p·τ' - b'·x'| / (|b'||x'|)", worst, kTauEps * std::numeric_limits<double>::epsilon());
}

struct SlideSetup {
  Ellipsoid E = base2();
  double sigma0 = 0.37;
  Grid grid = Grid::cube(3, 1.0, 41);
  pot::ParaboloidSolution family(double s) const { return pot::ParaboloidSolution(E, 1.0, zero_point(2), s); }
};

void c11_slide(Check& ck) {
  const SlideSetup st;
  const ScalarField u = sample(st.grid, st.family(st.sigma0));
  match::SlideOptions opt;
  opt.sigma_tol = kSlideTol;
  opt.field_tol = kSlideFieldTol;
  const auto fam = [&](double s) { return sample(st.grid, st.family(s)); };
  const auto res = match::slide_sigma_bar(u, fam, st.sigma0 - 1.0, st.sigma0 + 1.5, opt);
  ck.that("endpoint σ₀ - 1: u_σ >= u", res.lo_verdict == match::Ordering::Above);
  ck.that("endpoint σ₀ + 1.5: u_σ <= u", res.hi_verdict == match::Ordering::Below);
  ck.le("|σ̄ - σ₀|", std::abs(res.sigma_bar - st.sigma0), kSlideSigmaFactor * kSlideTol);
  ck.le("‖u - u_σ̄‖∞", res.sup_difference, kSlideSupFactor * kSlideTol);
  ck.that("contact inside the box interior", !res.voided);
}

void c12_dichotomy(Check& ck) {
  const Grid g = Grid::cube(3, 1.0, 41);
  const Point b = make_point({0.3, -0.2, 0.9});
  const ScalarField lin = ScalarField::sample(g, [&](const Point& x) {
    return b.dot(x) + 0.01 * b.norm() * std::sin(3.0 * x(0)) * std::cos(2.0 * x(1));
  });
  const auto dl = acf::dichotomy_classify(lin, kDichotomyTol);
  ck.that("planted linear difference classified linear", dl.verdict == acf::Dichotomy::Linear);
  ck.le("|b_fit - b| / |b|", (dl.b - b).norm() / b.norm(), kDichotomyTol);
  const SlideSetup st;
  int signed_ok = 0, pairs = 0, mixed = 0, in_class = 0;
  for (auto [s1, s2] : {std::pair{0.0, 0.3}, std::pair{-0.4, 0.1}, std::pair{0.2, 1.0}}) {
    const auto w = sample(g, st.family(s1)) - sample(g, st.family(s2));
    ++pairs;
    if (acf::dichotomy_classify(w, kDichotomyTol).verdict == acf::Dichotomy::SignedPlus) ++signed_ok;
  }
  ck.that("ordered analytic pairs u_σ₁ - u_σ₂ (σ₁ < σ₂) signed+: " + std::to_string(signed_ok) + "/" +
              std::to_string(pairs),
          signed_ok == pairs);
  const Grid gs = Grid::cube(3, 1.0, 33);
  const auto pa = st.family(0.0), pb = st.family(0.4);
  const ScalarField ua = solve_from(gs, [&](const Point& x) { return pa(x); });
  const ScalarField ub = solve_from(gs, [&](const Point& x) { return pb(x); });
  ck.that("ordered solved pair classified signed+",
          acf::dichotomy_classify(ua - ub, kDichotomyTol).verdict == acf::Dichotomy::SignedPlus);
  const auto target = st.family(st.sigma0);
  for (double r : {4.0, 16.0})
    for (double s : {st.sigma0, st.sigma0 - 0.05, st.sigma0 + 0.05, st.sigma0 + 0.5}) {
      const auto other = st.family(s);
      const ScalarField w = ScalarField::sample(g, [&](const Point& x) { return (target(r * x) - other(r * x)) / r; });
      ++in_class;
      if (acf::dichotomy_classify(w, kDichotomyTol).verdict == acf::Dichotomy::Mixed) ++mixed;
    }
  ck.that("(u - u_∞)(r·)/r never mixed on " + std::to_string(in_class) + " in-class inputs", mixed == 0);
}

void c13_geometry(Check& ck) {
  const Ellipsoid disk = Ellipsoid::ball(zero_point(2), 1.0);
  double worst = 0.0;
  std::vector<double> ts;
  for (int k = 1; k <= 30; ++k) ts.push_back(0.1 * k);
  for (double g : {0.5, 1.0, 2.0}) {
    const auto prof = geom::section_profile(Paraboloid::centred(disk, g), ts);
    for (std::size_t j = 0; j < ts.size(); ++j)
      worst = std::max(worst, std::abs(prof.H[j] - pi * g * ts[j]) / (pi * g * ts[j]));
  }
  ck.le("max |H(t) - πγt| / (πγt) on analytic paraboloids", worst, kSectionExact);

  const Ellipsoid E = base2();
  const double gam = 1.0;
  const Grid g(make_point({-2.0, -2.0, -0.5}), make_point({2.0, 2.0, 3.5}), {41, 41, 41});
  const Paraboloid P = Paraboloid::centred(E, gam);
  std::vector<std::uint8_t> exact(g.size()), ell(g.size());
  const Ellipsoid body = Ellipsoid::axis_aligned(make_point({0.2, -0.1, 1.5}), make_point({1.5, 1.0, 1.6}));
  for (std::size_t i = 0; i < g.size(); ++i) {
    exact[i] = P.contains(g.coord(i));
    ell[i] = body.contains(g.coord(i));
  }
  const pot::ParaboloidSolution ref(E, gam, zero_point(2), 0.0);
  const ScalarField u = solve_from(g, [&](const Point& x) { return ref(x); });
  const Mask solved = geom::coincidence_mask(u).mask;
  std::vector<double> heights;
  for (int k = 1; k <= 25; ++k) heights.push_back(0.1 * k);
  std::vector<double> eheights;
  for (int k = 0; k <= 30; ++k) eheights.push_back(0.0 + 0.1 * k);
  const Mask exact_mask(g, exact);
  const std::vector<std::pair<std::string, geom::SectionProfile>> profiles{
      {"exact paraboloid mask", geom::section_profile(exact_mask, heights)},
      {"solved paraboloid mask", geom::section_profile(solved, heights)},
      {"ellipsoid mask", geom::section_profile(Mask(g, ell), eheights)},
      {"analytic ellipsoid", geom::section_profile(body, eheights)},
  };
  for (const auto& [name, prof] : profiles) {
    const auto cc = geom::chord_check(prof);
    ck.le(name + ": chord excess beyond 3h·perimeter over " + std::to_string(cc.triples) + " triples",
          cc.worst_excess, 0.0);
  }
  const double cgrowth = pi * gam * E.semi_axes.prod();
  for (std::size_t k = 0; k < 2; ++k)
    ck.le(profiles[k].first + ": growth monitor max H/(1+t)", profiles[k].second.growth_monitor(),
          kGrowthEnvelope * cgrowth);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto ratio = geom::diameter_ratio(profiles[k].second);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t j = ratio.size() / 4; j < 3 * ratio.size() / 4; ++j) {
      lo = std::min(lo, ratio[j]);
      hi = std::max(hi, ratio[j]);
    }
    ck.le(profiles[k].first + ": spread of d²/H over mid heights", hi / lo, kDiameterSpread);
  }
  const auto analytic = geom::diameter_ratio(geom::section_profile(P, heights));
  const double c0 = 4.0 * E.semi_axes.maxCoeff() * E.semi_axes.maxCoeff() / (pi * E.semi_axes.prod());
  double dev = 0.0;
  for (double r : analytic) dev = std::max(dev, std::abs(r - c0) / c0);
  ck.le("analytic paraboloid: |d²/H - C₀| / C₀", dev, kSectionExact);
}

using Runner = void (*)(Check&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r{
      {"ball-potential", c1_ball},       {"scaling-law", c2_scaling},       {"pde-identity", c3_pde},
      {"potential-expansion", c4_expansion}, {"acf-value-monotonicity", c5_acf}, {"subharmonic-parts", c6_subharmonic},
      {"d3A-scaling-log-growth", c7_d3}, {"bmo-bound", c8_bmo},             {"n4-growth-exponent", c9_growth},
      {"matching-round-trips", c10_matching}, {"ordering-sliding", c11_slide}, {"dichotomy", c12_dichotomy},
      {"geometry-suite", c13_geometry},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& criterion_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

CriterionResult run_criterion(int id) {
  const auto& reg = registry();
  if (id < 1 || id > static_cast<int>(reg.size())) fail_domain("unknown acceptance criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.name = reg[id - 1].first;
  const auto t0 = Clock::now();
  Check ck(r);
  try {
    reg[id - 1].second(ck);
    r.pass = ck.all();
  } catch (const std::exception& e) {
    r.details.push_back(std::string("error: ") + e.what());
    r.pass = false;
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> todo = ids;
  if (todo.empty())
    for (int i = 1; i <= static_cast<int>(registry().size()); ++i) todo.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : todo) {
    out.push_back(run_criterion(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream os;
  char t[32];
  std::snprintf(t, sizeof t, "%.1f", r.seconds);
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << " (" << t << " s)";
  for (std::size_t k = 0; k < r.details.size(); ++k) os << (k ? "; " : ": ") << r.details[k];
  return os.str();
}

}  // namespace olab::verify

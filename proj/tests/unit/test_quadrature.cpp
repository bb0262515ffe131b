#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "olab/error.hpp"
#include "olab/quadrature.hpp"

using namespace olab;
using std::numbers::pi;

namespace {

Ellipsoid random_ellipsoid(std::mt19937_64& rng) {
  const Point c = test::random_point(rng, 3, -0.5, 0.5);
  const Point a = test::random_point(rng, 3, 0.4, 1.6);
  const Eigen::Vector3d axis = test::random_point(rng, 3, -1.0, 1.0).normalized();
  const double angle = std::uniform_real_distribution<double>(0.0, pi)(rng);
  return Ellipsoid(c, a, Eigen::AngleAxisd(angle, axis).toRotationMatrix());
}

// log((2√(T²+T) + 2T + 1) / (4T)) · 2π = ∫_{γP, y_N > T} |y|^{-3} dy for γ = 1, E' = unit disk.
double paraboloid_inv3_tail(double T) {
  return 2.0 * pi * std::log((2.0 * std::sqrt(T * T + T) + 2.0 * T + 1.0) / (4.0 * T));
}

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("integrate_section examples") {
  const double tol = 1e-9;
  const Ellipsoid disk2 = Ellipsoid::ball(zero_point(2), 2.0);
  CHECK(quad::integrate_section([](const Point&) { return 1.0; }, disk2, tol) ==
        doctest::Approx(4.0 * pi).epsilon(tol));
  const double sing = quad::integrate_section([](const Point& y) { return 1.0 / y.norm(); }, test::unit_disk(), tol,
                                              zero_point(2));
  CHECK(sing == doctest::Approx(2.0 * pi).epsilon(tol));
}

TEST_CASE("integrate_section against a Monte Carlo oracle") {
  const Point x = make_point({1.5, 0.3});
  const auto f = [&](const Point& y) { return 1.0 / (x - y).norm(); };
  const double value = quad::integrate_section(f, test::unit_disk(), 1e-9);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 1000000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const Point y = make_point({u(rng), u(rng)});
    const double v = y.squaredNorm() <= 1.0 ? 4.0 * f(y) : 0.0;
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double sd = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(value - mean) <= 3.0 * sd);
}

TEST_CASE("integrate_body over the unit ball") {
  quad::QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  const auto r = quad::integrate_body([](const Point&) { return 1.0; }, Ellipsoid::ball(zero_point(3), 1.0), spec);
  CHECK(r.value == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-9));
  const auto r4 = quad::integrate_body([](const Point&) { return 1.0; }, Ellipsoid::ball(zero_point(4), 1.0), spec);
  CHECK(r4.value == doctest::Approx(pi * pi / 2.0).epsilon(1e-9));
}

TEST_CASE("integrate_body matches exact ellipsoid moments") {
  std::mt19937_64 rng(99);
  quad::QuadratureSpec spec;
  spec.rel_tol = 1e-8;
  for (int trial = 0; trial < 20; ++trial) {
    const Ellipsoid E = random_ellipsoid(rng);
    const int i = trial % 3, j = (trial / 3) % 3;
    const double w0 = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    const auto f = [&](const Point& y) { return w0 + y(i) * y(j); };
    const Matrix A = E.rotation * E.semi_axes.asDiagonal();
    const double vol = E.volume();
    const double exact = w0 * vol + vol * ((A * A.transpose())(i, j) / 5.0 + E.center(i) * E.center(j));
    const auto r = quad::integrate_body(f, E, spec);
    CHECK(std::abs(r.value - exact) <= 10.0 * spec.rel_tol * std::abs(exact) + 1e-12);
  }
}

TEST_CASE("paraboloid slab against the 1D oracle") {
  quad::QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  const Paraboloid P = Paraboloid::centred(test::unit_disk(), 1.0);
  for (double T : {4.0, 50.0}) {
    quad::BodyOptions opt;
    opt.t_lo = 1.0;
    opt.t_hi = T;
    const auto r = quad::integrate_body([](const Point& y) { return 1.0 / y.squaredNorm(); }, P, spec, opt);
    const double exact = pi * ((T + 1.0) * std::log(T + 1.0) - T * std::log(T) - 2.0 * std::log(2.0));
    CHECK(r.value == doctest::Approx(exact).epsilon(2e-9));
  }
}

TEST_CASE("additivity over slabs and positivity") {
  quad::QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  const Paraboloid P(Ellipsoid::axis_aligned(zero_point(2), make_point({1.3, 1.0 / 1.3})), 1.5, zero_point(2), 0.0);
  const auto f = [](const Point& y) { return std::exp(-y.squaredNorm()) * (1.0 + y(0)); };
  auto slab = [&](double lo, double hi) {
    quad::BodyOptions o;
    o.t_lo = lo;
    o.t_hi = hi;
    return quad::integrate_body(f, P, spec, o).value;
  };
  const double whole = slab(0.0, 3.0);
  CHECK(whole > 0.0);
  CHECK(std::abs(whole - slab(0.0, 1.2) - slab(1.2, 3.0)) <= 2.0 * spec.rel_tol * whole);
}

TEST_CASE("tail bounds decay and are sound") {
  const quad::SectionGrowth g = quad::section_growth(Paraboloid::centred(test::unit_disk(), 1.0));
  CHECK(g.growth == doctest::Approx(pi));
  double prev = std::numeric_limits<double>::infinity();
  for (double T : {10.0, 20.0, 40.0, 80.0, 1e4}) {
    const double b = quad::tail_bound(quad::DecayTag::InvN, 3, T, 1.0, g);
    CHECK(b < prev);
    CHECK(b >= paraboloid_inv3_tail(T));
    CHECK(quad::tail_bound(quad::DecayTag::InvN, 3, 2.0 * T, 1.0, g) == doctest::Approx(0.5 * b).epsilon(1e-12));
    prev = b;
  }
  CHECK_THROWS_AS(quad::tail_bound(quad::DecayTag::InvNm2, 3, 10.0, 1.0, g), DomainError);
}

TEST_CASE("mapped tail of an infinite paraboloid integral") {
  quad::QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  const Paraboloid P = Paraboloid::centred(test::unit_disk(), 1.0);
  quad::BodyOptions opt;
  opt.t_lo = 2.0;
  opt.decay = quad::DecayTag::InvN;
  const auto r = quad::integrate_body([](const Point& y) { return std::pow(y.squaredNorm(), -1.5); }, P, spec, opt);
  CHECK(r.value == doctest::Approx(paraboloid_inv3_tail(2.0)).epsilon(1e-8));
  CHECK(r.tail.bound > 0.0);
}

TEST_CASE("ball_mean of simple functions") {
  CHECK(quad::ball_mean([](const Point&) { return 3.0; }, zero_point(3), 2.0) == doctest::Approx(3.0));
  const double m = quad::ball_mean([](const Point& x) { return x.squaredNorm(); }, zero_point(3), 1.0, 8192);
  CHECK(m == doctest::Approx(0.6).epsilon(0.02));
}

}

#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "olab/error.hpp"
#include "olab/potential.hpp"

using namespace olab;

namespace {

quad::QuadratureSpec spec_tol(double tol) {
  quad::QuadratureSpec s;
  s.rel_tol = tol;
  return s;
}

Ellipsoid base2() { return Ellipsoid::axis_aligned(zero_point(2), make_point({1.2, 1.0 / 1.2})); }

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("kernel_G examples") {
  CHECK(pot::kernel_G(zero_point(3), make_point({0.3, -1.0, 2.0})) == 0.0);
  CHECK(pot::kernel_G(make_point({0.0, 0.0, 1.0}), make_point({0.0, 0.0, 2.0})) == doctest::Approx(0.25).epsilon(1e-15));
  std::mt19937_64 rng(1);
  for (int N : {3, 4})
    for (int k = 0; k < 10; ++k) {
      const Point x = test::random_point(rng, N, -1.0, 1.0);
      const Point y = test::random_point(rng, N, -3.0, 3.0);
      const double lhs = pot::kernel_G(2.0 * x, y);
      const double rhs = std::pow(2.0, 2 - N) * pot::kernel_G(x, y / 2.0);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      CHECK(pot::kernel_G_stable(x, y) == doctest::Approx(pot::kernel_G(x, y)).epsilon(1e-9));
    }
  CHECK_THROWS_AS(pot::kernel_G(zero_point(3), zero_point(3)), SingularInputError);
}

TEST_CASE("ball potential oracle") {
  const Ellipsoid B = Ellipsoid::ball(zero_point(3), 1.0);
  for (const Point& x : {make_point({0.2, 0.1, -0.3}), make_point({0.0, 0.7, 0.0}), make_point({0.5, -0.5, 0.5})}) {
    const auto v = pot::potential(B, x, spec_tol(1e-9));
    CHECK(std::abs(v.value + x.squaredNorm() / 6.0) <= 1e-6);
  }
}

TEST_CASE("potential vanishes at the origin") {
  const auto spec = spec_tol(1e-8);
  CHECK(std::abs(pot::potential(Ellipsoid::ball(make_point({0.2, 0.0, 0.0}), 1.0), zero_point(3), spec).value) <= 1e-8);
  CHECK(std::abs(pot::potential(Paraboloid::centred(base2(), 1.0), zero_point(3), spec).value) <= 1e-8);
}

TEST_CASE("paraboloid scaling law") {
  const auto spec = spec_tol(1e-7);
  const Ellipsoid E = base2();
  for (double g : {0.5, 2.0})
    for (const Point& x : {make_point({0.4, -0.3, 0.8}), make_point({1.5, 0.2, -0.7}), make_point({-0.2, 0.9, 2.0})}) {
      const double lhs = pot::potential(Paraboloid::centred(E, g), g * x, spec).value;
      const double rhs = g * g * pot::potential(Paraboloid::centred(E, 1.0), x, spec).value;
      CHECK(std::abs(lhs - rhs) <= 2e-7 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("quadrature and confocal routes agree") {
  const Ellipsoid E = base2();
  for (const Point& x : {make_point({0.4, -0.3, 0.8}), make_point({1.5, 0.2, -0.7})}) {
    const double q = pot::potential(Paraboloid::centred(E, 1.3), x, spec_tol(1e-9)).value;
    CHECK(q == doctest::Approx(pot::potential_confocal(E, 1.3, x)).epsilon(1e-6));
  }
}

TEST_CASE("ellipsoid_interior examples") {
  for (double r : {0.5, 1.0, 3.0}) {
    const auto d = pot::ellipsoid_interior(Ellipsoid::ball(zero_point(2), r));
    CHECK(d.mu(0) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(d.mu(1) == doctest::Approx(0.25).epsilon(1e-10));
    const auto b = pot::ellipsoid_interior(Ellipsoid::ball(zero_point(3), r));
    for (int i = 0; i < 3; ++i) CHECK(b.mu(i) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  }
  const auto e = pot::ellipsoid_interior(Ellipsoid::axis_aligned(zero_point(2), make_point({1.0, 2.0})));
  CHECK(e.mu(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(e.mu(1) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
}

TEST_CASE("Newton homoeoid: V_tE - V_E is constant inside E") {
  const auto spec = spec_tol(1e-8);
  const Ellipsoid E(zero_point(3), make_point({1.0, 0.7, 0.5}),
                    Eigen::AngleAxisd(0.3, Eigen::Vector3d(0, 1, 1).normalized()).toRotationMatrix());
  std::mt19937_64 rng(4);
  std::vector<double> d;
  while (d.size() < 10) {
    const Point x = test::random_point(rng, 3, -0.6, 0.6);
    if (!E.contains(x)) continue;
    d.push_back(pot::potential(E.scaled(1.5), x, spec).value - pot::potential(E, x, spec).value);
  }
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  CHECK(*hi - *lo <= 5e-8);
}

TEST_CASE("affine corrector and d3_AR") {
  const Ellipsoid E = test::unit_disk();
  const auto spec = spec_tol(1e-8);
  const auto A0 = pot::affine_corrector_AR(Paraboloid::centred(E, 0.0), 10.0, spec);
  CHECK(A0.c == 0.0);
  CHECK(A0.b.norm() == 0.0);
  CHECK(pot::d3_AR(0.0, 10.0, E, spec) == 0.0);
  const double d = pot::d3_AR(1.0, 10.0, E, spec);
  CHECK(d < 0.0);
  const auto A = pot::affine_corrector_AR(Paraboloid::centred(E, 1.0), 10.0, spec);
  CHECK(A.b(2) == doctest::Approx(d).epsilon(2e-8));
  CHECK(std::abs(A.b(0)) < 1e-10);
  CHECK(pot::d3_AR(2.0, 10.0, E, spec) == doctest::Approx(2.0 * pot::d3_AR(1.0, 5.0, E, spec)).epsilon(2e-8));
}

TEST_CASE("d3_AR log slope is negative and stable") {
  const auto spec = spec_tol(1e-8);
  const Ellipsoid E = base2();
  const double d1 = pot::d3_AR(1.0, 10.0, E, spec);
  const double d2 = pot::d3_AR(1.0, 100.0, E, spec);
  const double d3 = pot::d3_AR(1.0, 1000.0, E, spec);
  const double s1 = (d2 - d1) / std::log(10.0), s2 = (d3 - d2) / std::log(10.0);
  CHECK(s1 < 0.0);
  CHECK(s2 < 0.0);
  CHECK(std::abs(s1 - s2) <= 0.2 * std::abs(s2));
}

TEST_CASE("W - ell decomposition in N = 4") {
  const auto spec = spec_tol(1e-7);
  const Ellipsoid E = Ellipsoid::ball(zero_point(3), 1.0);
  const Paraboloid P = Paraboloid::centred(E, 1.0);
  const auto dec = pot::decompose_W_ell(P, spec);
  CHECK(dec.ell.c == 0.0);
  CHECK(std::abs(dec.ell.b(0)) < 1e-9);
  CHECK(std::abs(dec.ell.b(1)) < 1e-9);
  CHECK(std::abs(dec.ell.b(2)) < 1e-9);
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const Point x = test::random_point(rng, 4, -1.5, 1.5);
    const double V = pot::potential(P, x, spec).value;
    CHECK(std::abs(V - (dec.W(x) - dec.ell(x))) <= 3e-7 * std::max(1.0, std::abs(V)));
  }
}

TEST_CASE("eval_paraboloid_solution examples") {
  const Ellipsoid E = base2();
  const Point tau = make_point({0.1, -0.2});
  const double sigma = 0.3;
  const auto spec = spec_tol(1e-8);
  for (const Point& x : {make_point({-0.1, 0.2, 1.0}), make_point({0.3, 0.0, 0.5})}) {
    REQUIRE(body_contains(Paraboloid(E, 1.0, tau, sigma), x));
    CHECK(std::abs(pot::eval_paraboloid_solution(1.0, E, tau, sigma, x, spec)) <= 5e-8);
    CHECK(pot::eval_paraboloid_solution(1.0, E, tau, sigma, x, spec, pot::Route::Confocal) == 0.0);
  }
  double prev = -1.0;
  for (double t : {1.0, 2.0, 4.0, 8.0}) {
    const double v = pot::eval_paraboloid_solution(1.0, E, tau, sigma, make_point({0.0, 0.0, -t}), spec,
                                                   pot::Route::Confocal);
    CHECK(v > 0.0);
    CHECK(v >= prev);
    prev = v;
  }
  const pot::InteriorQuadratic iq = pot::ellipsoid_interior(E);
  const Point x = make_point({0.7, -0.4, 1.1});
  CHECK(pot::eval_paraboloid_solution(0.0, E, tau, sigma, x, spec) == doctest::Approx(iq.quadratic(x.head(2) + tau)));
}

}

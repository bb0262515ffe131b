#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "olab/error.hpp"
#include "olab/matching.hpp"
#include "olab/potential.hpp"

using namespace olab;

namespace {

quad::QuadratureSpec spec_tol(double tol) {
  quad::QuadratureSpec s;
  s.rel_tol = tol;
  return s;
}

// Zooming grid scan of ‖μ(a) - q/2‖∞ over log a with Σ log a = 0 (N = 4, three semi-axes).
Point scan_axes(const std::vector<double>& q) {
  double c0 = 0.0, c1 = 0.0, w = 1.0;
  for (int round = 0; round < 6; ++round) {
    double best = std::numeric_limits<double>::infinity(), b0 = c0, b1 = c1;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j) {
        const double l0 = c0 + w * i / 10.0, l1 = c1 + w * j / 10.0;
        const Point a = make_point({std::exp(l0), std::exp(l1), std::exp(-l0 - l1)});
        const Point mu = pot::interior_mu(a, 1e-12);
        double err = 0.0;
        for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(mu(k) - q[k] / 2.0));
        if (err < best) {
          best = err;
          b0 = l0;
          b1 = l1;
        }
      }
    c0 = b0;
    c1 = b1;
    w *= 0.2;
  }
  return make_point({std::exp(c0), std::exp(c1), std::exp(-c0 - c1)});
}

ScalarField sample(const Grid& g, const pot::ParaboloidSolution& s) {
  return ScalarField::sample(g, [&](const Point& x) { return s(x); });
}

}  // namespace

TEST_SUITE("matching") {

TEST_CASE("solve_matching_ellipsoid examples") {
  const auto iso = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({0.5, 0.5}));
  CHECK(iso.E.semi_axes(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(iso.E.semi_axes(1) == doctest::Approx(1.0).epsilon(1e-8));
  const auto iso4 = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  for (int i = 0; i < 3; ++i) CHECK(iso4.E.semi_axes(i) == doctest::Approx(1.0).epsilon(1e-8));
  const auto e2 = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({2.0 / 3, 1.0 / 3}));
  CHECK(e2.E.semi_axes.maxCoeff() / e2.E.semi_axes.minCoeff() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(e2.residual <= 1e-8);
}

TEST_CASE("N = 4 matching ellipsoid against a grid scan") {
  const std::vector<double> q{0.4, 0.4, 0.2};
  const auto m = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal(q));
  const Point scan = scan_axes(q);
  // Semi-axes are reported in the principal frame of Q; compare as sorted sets.
  std::vector<double> a(m.E.semi_axes.data(), m.E.semi_axes.data() + 3), b(scan.data(), scan.data() + 3);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-3);
}

TEST_CASE("lambda_gamma examples") {
  const Ellipsoid E = Ellipsoid::ball(zero_point(3), 1.0);
  const auto spec = spec_tol(1e-8);
  CHECK(match::lambda_gamma(0.0, E, spec) == 0.0);
  double prev = 0.0;
  for (double g : {0.5, 1.0, 2.0, 4.0}) {
    const double l = match::lambda_gamma(g, E, spec);
    CHECK(l > prev);
    prev = l;
  }
  auto s1 = spec, s2 = spec;
  s1.t_max = 200.0;
  s2.t_max = 800.0;
  CHECK(match::lambda_gamma(1.0, E, s1) == doctest::Approx(match::lambda_gamma(1.0, E, s2)).epsilon(1e-7));
}

TEST_CASE("solve_gamma_N4 examples") {
  const Ellipsoid E = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({0.4, 0.35, 0.25})).E;
  const auto spec = spec_tol(1e-9);
  const double g0 = 1.3;
  const double l0 = match::lambda_gamma(g0, E, spec);
  const auto r = match::solve_gamma_N4(-l0, E, spec, 1e-9);
  CHECK(r.gamma == doctest::Approx(g0).epsilon(1e-5));
  CHECK(match::solve_gamma_N4(-2.0 * l0, E, spec).gamma > g0);
  CHECK(match::solve_gamma_N4(-1e-9, E, spec).gamma < 1e-6);
  CHECK_THROWS_AS(match::solve_gamma_N4(0.5, E, spec), DomainError);
}

TEST_CASE("solve_gamma_N3 examples") {
  const Ellipsoid E = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({0.6, 0.4})).E;
  const auto spec = spec_tol(1e-9);
  const double R = 100.0;
  CHECK(match::solve_gamma_N3(0.0, R, E, spec).gamma == 0.0);
  const double g0 = 0.8;
  const double beta = -pot::d3_AR(g0, R, E, spec) / std::log(R);
  const auto r = match::solve_gamma_N3(beta, R, E, spec, -1.0, 1e-9);
  CHECK(r.gamma == doctest::Approx(g0).epsilon(1e-4));
  REQUIRE(r.gamma_B > 0.0);
  CHECK(R >= r.R_B);
  CHECK(pot::d3_AR(r.gamma_B, R, E, spec) <= -beta * std::log(R));
}

TEST_CASE("tau_prime examples") {
  const auto iso = QuadraticBlowdown::diagonal({0.5, 0.5});
  CHECK(match::tau_prime(iso, zero_point(2)).norm() == 0.0);
  CHECK((match::tau_prime(iso, make_point({1.0, 0.0})) - make_point({2.0, 0.0})).norm() <= 1e-15);
  Matrix Q(2, 2);
  Q << 0.7, 0.1, 0.1, 0.3;
  const QuadraticBlowdown p(Q);
  const Point b = make_point({0.3, -0.8});
  const Point tau = match::tau_prime(p, b);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const Point x = test::random_point(rng, 2, -2.0, 2.0);
    CHECK(p.gradient(x).dot(tau) == doctest::Approx(b.dot(x)).epsilon(1e-14));
  }
}

TEST_CASE("ordering_test examples") {
  const Grid g = Grid::cube(3, 1.0, 17);
  const Ellipsoid E = test::unit_disk();
  const pot::ParaboloidSolution uP(E, 1.0, zero_point(2), 0.0);
  const auto u = sample(g, uP);
  CHECK(match::ordering_test(u, u, 1e-12).verdict == match::Ordering::Equal);
  const auto shifted = sample(g, uP.with_sigma(0.4));
  CHECK(match::ordering_test(shifted, u, 1e-12).verdict == match::Ordering::Below);
  CHECK(match::ordering_test(u, shifted, 1e-12).verdict == match::Ordering::Above);
  const pot::ParaboloidSolution lateral(E, 1.0, make_point({1.0, 0.0}), 0.0);
  CHECK(match::ordering_test(sample(g, lateral), u, 1e-12).verdict == match::Ordering::Crossing);
}

TEST_CASE("slide_sigma_bar examples") {
  const Grid g = Grid::cube(3, 1.0, 17);
  const pot::ParaboloidSolution base(test::unit_disk(), 1.0, zero_point(2), 0.0);
  const double sigma0 = 0.37;
  const auto u = sample(g, base.with_sigma(sigma0));
  const match::Family fam = [&](double s) { return sample(g, base.with_sigma(s)); };
  match::SlideOptions opt;
  opt.sigma_tol = 1e-7;
  opt.field_tol = 1e-10;
  const auto r = match::slide_sigma_bar(u, fam, sigma0 - 1.0, sigma0 + 1.5, opt);
  CHECK(std::abs(r.sigma_bar - sigma0) <= 2.0 * opt.sigma_tol);
  CHECK(r.sup_difference <= 5.0 * opt.sigma_tol);
  CHECK_FALSE(r.voided);

  const double tol = 1e-6;
  const auto bumped = u + ScalarField::sample(g, [&](const Point& x) { return 10.0 * tol * std::exp(-4.0 * x.squaredNorm()); });
  match::SlideOptions o2;
  o2.sigma_tol = tol;
  o2.field_tol = 20.0 * tol;
  const auto rb = match::slide_sigma_bar(bumped, fam, sigma0 - 1.0, sigma0 + 1.5, o2);
  CHECK(std::abs(rb.sigma_bar - sigma0) <= 100.0 * tol);
}

TEST_CASE("compact_case_match examples") {
  const Grid g = Grid::cube(3, 1.2, 21);
  const auto p = QuadraticBlowdown::diagonal({0.4, 0.35, 0.25});
  const Ellipsoid E = match::solve_matching_ellipsoid(p).E;
  const double gamma = 0.3;
  const pot::EllipsoidSolution truth(E, gamma, zero_point(3));
  const auto u = ScalarField::sample(g, [&](const Point& x) { return truth(x); });
  const auto m = match::compact_case_match(u, p);
  for (int i = 0; i < 3; ++i) CHECK(m.E.semi_axes(i) == doctest::Approx(E.semi_axes(i)).epsilon(1e-3));
  CHECK(m.tau.norm() <= 1e-12);
  CHECK(m.gamma == doctest::Approx(gamma).epsilon(1e-3));
  CHECK(m.sup_error <= 1e-6);

  auto ordering_at = [&](double gm) {
    const pot::EllipsoidSolution s(E, gm, zero_point(3));
    return match::ordering_test(ScalarField::sample(g, [&](const Point& x) { return s(x); }), u, 1e-10).verdict;
  };
  CHECK(ordering_at(0.8 * gamma) != match::Ordering::Below);
  CHECK(ordering_at(1.25 * gamma) == match::Ordering::Below);

  const auto ball = match::solve_matching_ellipsoid(QuadraticBlowdown::diagonal({1.0 / 3, 1.0 / 3, 1.0 / 3})).E;
  const pot::EllipsoidSolution sym(ball, 0.25, zero_point(3));
  const auto us = ScalarField::sample(g, [&](const Point& x) { return sym(x); });
  CHECK(match::compact_case_match(us, QuadraticBlowdown::diagonal({1.0 / 3, 1.0 / 3, 1.0 / 3})).tau.norm() <= 1e-12);
}

}

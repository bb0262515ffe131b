#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "olab/acf.hpp"
#include "olab/error.hpp"
#include "olab/potential.hpp"
#include "olab/solver.hpp"

using namespace olab;
using std::numbers::pi;

namespace {

ScalarField xN(const Grid& g) {
  return ScalarField::sample(g, [](const Point& x) { return x(x.size() - 1); });
}

ScalarField solved(const Grid& g, double gamma, double sigma) {
  const pot::ParaboloidSolution s(test::unit_disk(), gamma, zero_point(2), sigma);
  return solver::solve(solver::boundary_from_solution([&](const Point& x) { return s(x); }, g)).solution;
}

}  // namespace

TEST_SUITE("acf") {

TEST_CASE("weighted_dirichlet examples") {
  const Grid g = Grid::cube(3, 1.25, 41);
  const auto v = xN(g);
  CHECK(acf::weighted_dirichlet(ScalarField::constant(g, 1.0), 1.0, acf::Sign::Minus) == 0.0);
  const double r = 1.0;
  const double I = acf::weighted_dirichlet(v, r, acf::Sign::Plus);
  CHECK(I == doctest::Approx(pi * r * r).epsilon(0.02));
  // r/h = 8 and 16; below r/h = 8 the whole ball is sub-sampled and the error plateaus.
  const double coarse = std::abs(acf::weighted_dirichlet(xN(Grid::cube(3, 1.5, 25)), r, acf::Sign::Plus) - pi);
  const double fine = std::abs(acf::weighted_dirichlet(xN(Grid::cube(3, 1.5, 49)), r, acf::Sign::Plus) - pi);
  CHECK(fine * 2.0 <= coarse);
}

TEST_CASE("phi of a one-signed and of a linear field") {
  const Grid g = Grid::cube(3, 2.5, 41);
  CHECK(acf::phi(ScalarField::sample(g, [](const Point& x) { return 1.0 + x.squaredNorm(); }), 1.0) == 0.0);
  const auto v = xN(g);
  for (double r : {0.5, 1.0, 2.0}) CHECK(acf::phi(v, r) == doctest::Approx(pi * pi).epsilon(0.04));
}

TEST_CASE("phi_profile examples") {
  const Grid g = Grid::cube(3, 2.5, 41);
  const auto p = acf::phi_profile(xN(g), {0.5, 1.0, 1.5, 2.0});
  CHECK(p.verdict <= 0.03);
  CHECK(acf::phi_profile(xN(g), {1.0}).verdict == 0.0);
}

TEST_CASE("phi of solved differences is monotone and finite") {
  const Grid g = Grid::cube(3, 1.0, 25);
  const auto v = solved(g, 1.0, 0.3) - solved(g, 1.5, 0.1);
  const auto p = acf::phi_profile(v, {0.35, 0.5, 0.65, 0.8});
  for (double ph : p.phi) CHECK(std::isfinite(ph));
  CHECK(p.verdict <= 0.03);
}

TEST_CASE("subharmonicity_check examples") {
  const Grid g = Grid::cube(3, 1.0, 21);
  CHECK(acf::subharmonicity_check(ScalarField::sample(g, [](const Point& x) { return x.squaredNorm(); }), acf::Part::Raw) == 0.0);
  const auto bump = ScalarField::sample(g, [](const Point& x) { return -std::exp(-x.squaredNorm() / 0.1); });
  CHECK(acf::subharmonicity_check(bump, acf::Part::Minus) > 0.0);
  const auto v = solved(g, 1.0, 0.3) - solved(g, 1.5, 0.1);
  const double h = g.h_max();
  CHECK(acf::subharmonicity_check(v, acf::Part::Plus) <= 5.0 * h * h);
  CHECK(acf::subharmonicity_check(v, acf::Part::Minus) <= 5.0 * h * h);
}

TEST_CASE("caccioppoli_ratio examples") {
  const Grid g = Grid::cube(3, 1.25, 41);
  const auto v = ScalarField::sample(g, [](const Point& x) { return 0.3 * x(0) - 0.5 * x(1) + 0.2 * x(2); });
  CHECK(acf::caccioppoli_ratio(v, 0.5) == doctest::Approx(5.0 / 4.0).epsilon(0.05));
  const auto one = ScalarField::constant(g, 1.0);
  CHECK(acf::caccioppoli_ratio(one, 0.5) == 0.0);
  CHECK_THROWS_AS(acf::caccioppoli_ratio(v, 1.0), DomainError);
}

TEST_CASE("dichotomy_classify examples") {
  const Grid g = Grid::cube(3, 1.0, 21);
  const auto lin = acf::dichotomy_classify(xN(g));
  CHECK(lin.verdict == acf::Dichotomy::Linear);
  CHECK((lin.b - make_point({0.0, 0.0, 1.0})).norm() <= 0.05);
  const auto bump = acf::dichotomy_classify(ScalarField::sample(g, [](const Point& x) { return std::exp(-x.squaredNorm()); }));
  CHECK(bump.verdict == acf::Dichotomy::SignedPlus);
  const auto neg = acf::dichotomy_classify(ScalarField::sample(g, [](const Point& x) { return -x.squaredNorm() - 0.1; }));
  CHECK(neg.verdict == acf::Dichotomy::SignedMinus);
  const auto mixed = acf::dichotomy_classify(ScalarField::sample(g, [](const Point& x) { return x(0) * x(1); }));
  CHECK(mixed.verdict == acf::Dichotomy::Mixed);
  CHECK(acf::dichotomy_classify(ScalarField::constant(g, 0.0)).verdict == acf::Dichotomy::Linear);
}

}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "olab/error.hpp"
#include "olab/geometry.hpp"
#include "olab/potential.hpp"
#include "olab/solver.hpp"

using namespace olab;

namespace {

double half_space(const Point& x) {
  const double t = std::max(x(x.size() - 1), 0.0);
  return 0.5 * t * t;
}

// Radial N = 2 solution with coincidence disk of radius a.
double radial2(const Point& x, double a) {
  const double r = x.norm();
  if (r <= a) return 0.0;
  return r * r / 4.0 - a * a / 4.0 - 0.5 * a * a * std::log(r / a);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("zero boundary data gives the zero solution") {
  const Grid g = Grid::cube(3, 1.0, 9);
  const auto r = solver::solve(ScalarField::constant(g, 0.0));
  CHECK(r.converged);
  CHECK(r.solution.max_abs() == 0.0);
}

TEST_CASE("half-space data recovers the half-space solution") {
  const Grid g = Grid::cube(3, 1.0, 17);
  const auto r = solver::solve(solver::boundary_from_solution(half_space, g));
  REQUIRE(r.converged);
  const double h = g.h_max();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double z = g.coord(i)(2);
    CHECK(std::abs(r.solution[i] - half_space(g.coord(i))) <= 1e-7);
    if (r.active[i]) CHECK(z <= 2.0 * h);
    if (z < -2.0 * h) CHECK(r.active[i]);
  }
}

TEST_CASE("N = 2 radial reference: coincidence disk radius") {
  const double a = 0.5;
  const Grid g = Grid::cube(2, 1.5, 61);
  const auto r = solver::solve(solver::boundary_from_solution([&](const Point& x) { return radial2(x, a); }, g));
  REQUIRE(r.converged);
  const double h = g.h_max();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.coord(i).norm();
    if (r.active[i]) CHECK(d <= a + 2.0 * h);
    if (d < a - 2.0 * h) CHECK(r.active[i]);
  }
}

TEST_CASE("monotone updates from the supersolution start") {
  const Grid g = Grid::cube(3, 1.0, 13);
  const Ellipsoid E = test::unit_disk();
  const pot::ParaboloidSolution s(E, 1.0, zero_point(2), 0.4);
  const auto r = solver::solve(solver::boundary_from_solution([&](const Point& x) { return s(x); }, g));
  REQUIRE(r.converged);
  REQUIRE(r.update_history.size() > 10);
  int increases = 0;
  for (std::size_t k = 1; k < r.update_history.size(); ++k)
    if (r.update_history[k] > r.update_history[k - 1] * (1.0 + 1e-12)) ++increases;
  CHECK(increases == 0);
  CHECK(r.complementarity <= 1e-9);
}

TEST_CASE("comparison principle") {
  const Grid g = Grid::cube(3, 1.0, 13);
  const Ellipsoid E = test::unit_disk();
  const pot::ParaboloidSolution s1(E, 1.0, zero_point(2), 0.2);
  const pot::ParaboloidSolution s2(E, 1.0, zero_point(2), -0.1);
  const auto b1 = solver::boundary_from_solution([&](const Point& x) { return s1(x); }, g);
  const auto b2 = solver::boundary_from_solution([&](const Point& x) { return s2(x); }, g);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(b1[i] <= b2[i] + 1e-15);
  const auto u1 = solver::solve(b1).solution;
  const auto u2 = solver::solve(b2).solution;
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(u1[i] <= u2[i] + 1e-9);
}

TEST_CASE("boundary_from_solution examples") {
  const Grid g = Grid::cube(3, 0.5, 5);
  const pot::ParaboloidSolution s(test::unit_disk(), 1.0, zero_point(2), 0.0);
  const auto b = solver::boundary_from_solution([&](const Point& x) { return s(x); }, g);
  CHECK(b.min() >= 0.0);
  CHECK(solver::boundary_from_solution([](const Point&) { return 1.0; }, g).max() == 1.0);
  const Point corner = g.upper();
  const auto bad = [&](const Point& x) {
    return (x - corner).norm() < 1e-12 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  CHECK_THROWS_AS(solver::boundary_from_solution(bad, g), DomainError);
  CHECK_THROWS_AS(solver::boundary_from_solution([](const Point&) { return -1.0; }, g), DomainError);
}

TEST_CASE("residual_report examples") {
  const Grid g = Grid::cube(3, 1.0, 17);
  const auto zero = solver::residual_report(ScalarField::constant(g, 0.0));
  CHECK(zero.positivity == 0.0);
  CHECK(zero.complementarity == 0.0);
  const auto p = ScalarField::sample(g, [](const Point& x) { return 0.5 * (0.4 * x(0) * x(0) + 0.35 * x(1) * x(1) + 0.25 * x(2) * x(2)); });
  const auto rp = solver::residual_report(p);
  CHECK(rp.pde <= 1e-9);
  const auto hs = solver::residual_report(ScalarField::sample(g, half_space));
  CHECK(hs.pde <= 1e-9);
  CHECK(hs.positivity == 0.0);
}

TEST_CASE("solver input validation") {
  const Grid g = Grid::cube(3, 1.0, 5);
  solver::SolverOptions bad;
  bad.omega = 2.0;
  CHECK_THROWS_AS(solver::solve(ScalarField::constant(g, 0.0), bad), DomainError);
  CHECK_THROWS_AS(solver::solve(ScalarField::constant(g, -1.0)), DomainError);
}

}

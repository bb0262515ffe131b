#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "olab/error.hpp"
#include "olab/geometry.hpp"
#include "olab/potential.hpp"
#include "olab/solver.hpp"

using namespace olab;
using std::numbers::pi;

namespace {

double half_space(const Point& x) {
  const double t = std::max(x(x.size() - 1), 0.0);
  return 0.5 * t * t;
}

// Box around γP - (0, σ) with σ = 0.5 and enough lateral room below x_N = 1.4.
Grid paraboloid_box(int n) {
  return Grid(make_point({-1.6, -1.6, -0.6}), make_point({1.6, 1.6, 1.4}), {n, n, (n * 5) / 8 + 1});
}

Grid shifted(const Grid& g, const Point& c) { return Grid(g.lower() - c, g.upper() - c, g.node_counts()); }

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("half-space solution mask") {
  const Grid g = Grid::cube(3, 1.0, 17);
  const auto cm = geom::coincidence_mask(ScalarField::sample(g, half_space));
  const HalfSpace H(make_point({0.0, 0.0, 1.0}), 0.0);
  CHECK(geom::mask_mismatch(cm.mask, H, 2.0 * g.h_max()) == 0u);
  CHECK(cm.hull_defect <= 2.0 * g.h_max() / 2.0);
}

TEST_CASE("full blow-down mask is a neighbourhood of the origin") {
  const Grid g = Grid::cube(3, 1.0, 21);
  const auto p = QuadraticBlowdown::diagonal({0.4, 0.35, 0.25});
  const auto cm = geom::coincidence_mask(ScalarField::sample(g, [&](const Point& x) { return p(x); }));
  REQUIRE(cm.mask.count() > 0u);
  const double h = g.h_max();
  const double reach = std::sqrt(2.0 * h * h / p.eigenvalues()(0));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (cm.mask.inside[i]) CHECK(g.coord(i).norm() <= reach);
}

TEST_CASE("paraboloid solution mask matches the body within a 2h band") {
  const Grid g = paraboloid_box(25);
  const pot::ParaboloidSolution s(test::unit_disk(), 1.0, zero_point(2), 0.5);
  const auto r = solver::solve(solver::boundary_from_solution([&](const Point& x) { return s(x); }, g));
  REQUIRE(r.converged);
  const Paraboloid P(test::unit_disk(), 1.0, zero_point(2), 0.5);
  const double band = 2.0 * g.h_max();
  CHECK(geom::mask_mismatch(geom::coincidence_mask(r.solution, 1e-14).mask, P, band) == 0u);
  // Below the vertex u detaches slower than quadratically, so the h² mask overshoots only there.
  auto cm = geom::coincidence_mask(r.solution);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.coord(i)(2) < -0.5) cm.mask.inside[i] = 0;
  CHECK(geom::mask_mismatch(cm.mask, P, band) == 0u);
}

TEST_CASE("section_profile of closed-form bodies") {
  const double gamma = 1.7;
  const std::vector<double> t{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  const auto p = geom::section_profile(Paraboloid::centred(test::unit_disk(), gamma), t);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK(p.H[k] == doctest::Approx(pi * gamma * t[k]).epsilon(1e-13));
  CHECK(p.max_sqrtH_violation() <= 1e-12);
  CHECK(p.growth_monitor() <= pi * gamma * (1.0 + 1e-12));
  CHECK(geom::chord_check(p).holds);
  const Ellipsoid E(make_point({0.0, 0.0, 0.5}), make_point({1.0, 0.6, 1.3}),
                    Eigen::AngleAxisd(0.5, Eigen::Vector3d(1, 0, 1).normalized()).toRotationMatrix());
  const auto [lo, hi] = quad::ellipsoid_height_range(E);
  std::vector<double> te;
  for (int k = 0; k <= 10; ++k) te.push_back(lo + (hi - lo) * k / 10.0);
  const auto pe = geom::section_profile(E, te);
  CHECK(pe.max_sqrtH_violation() <= 1e-12);
  CHECK(geom::chord_check(pe).holds);
}

TEST_CASE("solved paraboloid mask: sections and fit") {
  const Grid g = paraboloid_box(33);
  const pot::ParaboloidSolution s(test::unit_disk(), 1.0, zero_point(2), 0.5);
  const auto r = solver::solve(solver::boundary_from_solution([&](const Point& x) { return s(x); }, g));
  REQUIRE(r.converged);

  // The projected zero set; the h² threshold widens sections by its detachment band.
  const auto zero_set = geom::coincidence_mask(r.solution, 1e-14);
  const auto prof = geom::section_profile(zero_set.mask, {0.0, 0.2, 0.4});
  for (std::size_t k = 0; k < prof.t.size(); ++k)
    CHECK(prof.H[k] == doctest::Approx(pi * (prof.t[k] + 0.5)).epsilon(0.10));
  CHECK(geom::chord_check(prof).holds);

  const auto cm = geom::coincidence_mask(r.solution);
  const Grid gv = shifted(g, make_point({0.0, 0.0, -0.5}));
  const auto fit = geom::paraboloid_fit(Mask(gv, cm.mask.inside), 1.1,
                                        geom::detachment_band(solver::active_threshold(g)));
  REQUIRE(fit.ok);
  CHECK(fit.ray_contained);
  CHECK(fit.gamma0 == doctest::Approx(1.0).epsilon(0.25));
  CHECK(fit.covered_fraction == 1.0);
}

TEST_CASE("paraboloid_fit examples") {
  const Grid g = Grid(make_point({-1.5, -1.5, 0.0}), make_point({1.5, 1.5, 2.0}), {31, 31, 21});
  const Ellipsoid base = Ellipsoid::axis_aligned(zero_point(2), make_point({1.25, 0.8}));
  const double gamma = 0.9;
  const Paraboloid P = Paraboloid::centred(base, gamma);
  std::vector<std::uint8_t> in(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) in[i] = P.contains(g.coord(i));
  const auto fit = geom::paraboloid_fit(Mask(g, in));
  REQUIRE(fit.ok);
  CHECK(fit.gamma0 >= gamma * 1.25 * 1.25 / std::pow(2.0, 1.0 / 16.0));
  CHECK(fit.gamma0 <= gamma * 1.25 * 1.25 * std::pow(2.0, 1.0 / 16.0));
  CHECK(fit.covered_fraction == 1.0);

  const Grid gh = Grid::cube(3, 1.0, 17);
  const auto hs = geom::coincidence_mask(ScalarField::sample(gh, half_space));
  const auto bad = geom::paraboloid_fit(hs.mask);
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.failure.empty());
  CHECK_THROWS_AS(geom::paraboloid_fit(Mask(gh, std::vector<std::uint8_t>(gh.size(), 0))), DomainError);
}

TEST_CASE("diameter ratio of a disk family") {
  const auto p = geom::section_profile(Paraboloid::centred(test::unit_disk(), 1.0), {0.5, 1.0, 2.0});
  for (double d : geom::diameter_ratio(p)) CHECK(d == doctest::Approx(4.0 / pi).epsilon(1e-12));
}

}

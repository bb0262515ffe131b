#include <benchmark/benchmark.h>

#include "olab/acf.hpp"
#include "olab/matching.hpp"
#include "olab/potential.hpp"
#include "olab/solver.hpp"

using namespace olab;

namespace {

Ellipsoid base2() { return Ellipsoid::axis_aligned(zero_point(2), make_point({1.2, 1.0 / 1.2})); }

quad::QuadratureSpec spec_tol(double tol) {
  quad::QuadratureSpec s;
  s.rel_tol = tol;
  return s;
}

void BM_KernelG(benchmark::State& st) {
  const Point x = make_point({0.3, -0.2, 0.7});
  Point y = make_point({1.1, 0.4, 2.0});
  for (auto _ : st) {
    y(0) += 1e-12;
    benchmark::DoNotOptimize(pot::kernel_G_stable(x, y));
  }
}
BENCHMARK(BM_KernelG);

void BM_PotentialQuadrature(benchmark::State& st) {
  const Paraboloid P = Paraboloid::centred(base2(), 1.0);
  const auto spec = spec_tol(std::pow(10.0, -static_cast<double>(st.range(0))));
  const Point x = make_point({0.4, -0.3, 0.8});
  for (auto _ : st) benchmark::DoNotOptimize(pot::potential(P, x, spec).value);
}
BENCHMARK(BM_PotentialQuadrature)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_PotentialConfocal(benchmark::State& st) {
  const Ellipsoid E = base2();
  const Point x = make_point({0.4, -0.3, 0.8});
  for (auto _ : st) benchmark::DoNotOptimize(pot::potential_confocal(E, 1.0, x));
}
BENCHMARK(BM_PotentialConfocal)->Unit(benchmark::kMicrosecond);

void BM_D3AR(benchmark::State& st) {
  const Ellipsoid E = base2();
  const auto spec = spec_tol(1e-8);
  const double R = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(pot::d3_AR(1.0, R, E, spec));
}
BENCHMARK(BM_D3AR)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LambdaGamma(benchmark::State& st) {
  const Ellipsoid E = Ellipsoid::ball(zero_point(3), 1.0);
  const auto spec = spec_tol(1e-8);
  for (auto _ : st) benchmark::DoNotOptimize(match::lambda_gamma(1.0, E, spec));
}
BENCHMARK(BM_LambdaGamma)->Unit(benchmark::kMillisecond);

void BM_PsorSolve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid g = Grid::cube(3, 1.0, n);
  const pot::ParaboloidSolution s(base2(), 1.0, zero_point(2), 0.3);
  const auto b = solver::boundary_from_solution([&](const Point& x) { return s(x); }, g);
  for (auto _ : st) benchmark::DoNotOptimize(solver::solve(b).iterations);
  st.counters["nodes"] = static_cast<double>(g.size());
}
BENCHMARK(BM_PsorSolve)->Arg(17)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_WeightedDirichlet(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid g = Grid::cube(3, 1.5, n);
  const auto v = ScalarField::sample(g, [](const Point& x) { return x(2) + 0.2 * x(0) * x(1); });
  for (auto _ : st) benchmark::DoNotOptimize(acf::weighted_dirichlet(v, 1.0, acf::Sign::Plus));
}
BENCHMARK(BM_WeightedDirichlet)->Arg(25)->Arg(49)->Unit(benchmark::kMillisecond);

void BM_MatchingEllipsoid(benchmark::State& st) {
  const auto p = QuadraticBlowdown::diagonal({0.4, 0.35, 0.25});
  for (auto _ : st) benchmark::DoNotOptimize(match::solve_matching_ellipsoid(p, 1e-12).residual);
}
BENCHMARK(BM_MatchingEllipsoid)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

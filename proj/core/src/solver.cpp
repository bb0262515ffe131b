#include "olab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "olab/error.hpp"

namespace olab::solver {

namespace {

struct Stencil {
  int dim = 0;
  std::array<std::size_t, kMaxDim> stride{};
  std::array<double, kMaxDim> inv_h2{};
  double diag = 0.0;

  explicit Stencil(const Grid& g) : dim(g.dim()) {
    for (int a = 0; a < dim; ++a) {
      stride[a] = g.stride(a);
      inv_h2[a] = 1.0 / (g.h()(a) * g.h()(a));
      diag += 2.0 * inv_h2[a];
    }
  }
  double neighbour_sum(const double* u, std::size_t i) const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += (u[i + stride[a]] + u[i - stride[a]]) * inv_h2[a];
    return s;
  }
  double laplacian(const double* u, std::size_t i) const { return neighbour_sum(u, i) - diag * u[i]; }
};

/// Flat indices of interior nodes in lexicographic order (axis 0 fastest).
std::vector<std::size_t> interior_nodes(const Grid& g) {
  std::vector<std::size_t> idx;
  idx.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!g.is_boundary(i)) idx.push_back(i);
  return idx;
}

double scaled_residual(const Stencil& st, const std::vector<double>& u, const std::vector<std::size_t>& inner) {
  double r = 0.0;
  for (std::size_t i : inner) {
    const double w = (1.0 - st.laplacian(u.data(), i)) / st.diag;
    r = std::max(r, std::abs(std::min(u[i], w)));
  }
  return r;
}

}  // namespace

double active_threshold(const Grid& grid) { return grid.h_max() * grid.h_max(); }

LcpResult solve(const ScalarField& boundary, const SolverOptions& opt, const std::optional<ScalarField>& initial) {
  const Grid& g = boundary.grid();
  if (!(opt.omega > 0.0 && opt.omega < 2.0)) fail_domain("relaxation ω must lie in (0, 2)");
  if (!(opt.tol > 0.0)) fail_domain("solver tolerance must be positive");
  if (opt.max_iterations < 1 || opt.check_every < 1) fail_domain("iteration limits must be positive");
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.is_boundary(i)) continue;
    if (boundary[i] < 0.0) fail_domain("boundary data must be nonnegative");
    gmax = std::max(gmax, boundary[i]);
  }
  std::vector<double> u(g.size(), gmax);
  if (initial) {
    if (!(initial->grid() == g)) fail_domain("initial guess lives on a different grid");
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = std::max(0.0, (*initial)[i]);
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.is_boundary(i)) u[i] = boundary[i];

  const Stencil st(g);
  const auto inner = interior_nodes(g);
  const double inv_diag = 1.0 / st.diag;
  LcpResult res{ScalarField(g, u), 0, 0.0, 0.0, {}, false, {}};
  double r = scaled_residual(st, u, inner);
  int it = 0;
  while (r > opt.tol && it < opt.max_iterations) {
    double change = 0.0;
    for (std::size_t i : inner) {
      const double gs = (st.neighbour_sum(u.data(), i) - 1.0) * inv_diag;
      const double v = std::max(0.0, u[i] + opt.omega * (gs - u[i]));
      change = std::max(change, std::abs(v - u[i]));
      u[i] = v;
    }
    ++it;
    res.update_history.push_back(change);
    if (it % opt.check_every == 0 || change <= opt.tol) r = scaled_residual(st, u, inner);
  }
  res.iterations = it;
  res.complementarity = r;
  res.converged = r <= opt.tol;
  res.solution = ScalarField(g, std::move(u));
  res.pde = residual_report(res.solution).pde;
  const double thr = active_threshold(g);
  res.active.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) res.active[i] = res.solution[i] < thr ? 1 : 0;
  return res;
}

ScalarField boundary_from_solution(const std::function<double(const Point&)>& sol, const Grid& grid, double tol) {
  std::vector<double> v(grid.size(), 0.0);
  std::vector<std::size_t> bnd;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid.is_boundary(i)) bnd.push_back(i);
  std::vector<std::uint8_t> bad(bnd.size(), 0);
  parallel_for(bnd.size(), [&](std::size_t k) {
    double val;
    try {
      val = sol(grid.coord(bnd[k]));
    } catch (const DomainError&) {
      bad[k] = 1;
      return;
    }
    if (!std::isfinite(val)) bad[k] = 1;
    else if (val < -tol) bad[k] = 2;
    else v[bnd[k]] = std::max(0.0, val);
  });
  for (std::size_t k = 0; k < bnd.size(); ++k) {
    if (bad[k] == 1) fail_domain("reference solution is undefined at a boundary node");
    if (bad[k] == 2) fail_domain("reference solution is negative on the boundary: inconsistent reference");
  }
  return ScalarField(grid, std::move(v));
}

Residuals residual_report(const ScalarField& u) {
  const Grid& g = u.grid();
  const Stencil st(g);
  const double thr = active_threshold(g);
  Residuals r;
  r.positivity = std::max(0.0, -u.min());
  const auto& v = u.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_boundary(i)) continue;
    const double lap = st.laplacian(v.data(), i);
    if (v[i] > thr) r.pde = std::max(r.pde, std::abs(lap - 1.0));
    r.complementarity = std::max(r.complementarity, std::abs(std::min(v[i], 1.0 - lap)));
  }
  return r;
}

}  // namespace olab::solver

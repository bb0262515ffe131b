#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "olab/types.hpp"

namespace olab::solver {

struct SolverOptions {
  /// Target for the scaled natural residual max_i |min(u_i, (1 - Δ_h u)_i / D)|, D the stencil diagonal.
  double tol = 1e-9;
  double omega = 1.6;
  int max_iterations = 200000;
  /// Residual is checked every this many sweeps.
  int check_every = 10;
};

struct LcpResult {
  ScalarField solution;
  int iterations = 0;
  /// Scaled natural residual at exit.
  double complementarity = 0.0;
  /// max |Δ_h u - 1| over interior nodes with u > h².
  double pde = 0.0;
  /// u_i < h² (the numerical coincidence set).
  std::vector<std::uint8_t> active;
  bool converged = false;
  /// Max-norm of the update per sweep.
  std::vector<double> update_history;
};

/// Projected SOR for u >= 0, 1 - Δ_h u >= 0, u (1 - Δ_h u) = 0 with u = boundary on ∂box.
/// Only the boundary nodes of `boundary` are read. Starts from the constant supersolution max_∂ g
/// unless an initial guess is given.
LcpResult solve(const ScalarField& boundary, const SolverOptions& options = {},
                const std::optional<ScalarField>& initial = std::nullopt);

/// Samples a reference solution on the boundary nodes (interior nodes are set to 0).
/// Values below -tol or non-finite values are rejected; values in [-tol, 0) are clamped to 0.
ScalarField boundary_from_solution(const std::function<double(const Point&)>& sol, const Grid& grid,
                                   double tol = 1e-10);

struct Residuals {
  double pde = 0.0;
  double positivity = 0.0;
  double complementarity = 0.0;
};

/// pde = max_{u > h²} |Δ_h u - 1|, positivity = max(0, -min u),
/// complementarity = max_i |min(u_i, 1 - (Δ_h u)_i)| over interior nodes.
Residuals residual_report(const ScalarField& u);

/// Coincidence threshold h_max².
double active_threshold(const Grid& grid);

}  // namespace olab::solver

#pragma once

#include <functional>
#include <map>
#include <string>

#include "olab/potential.hpp"
#include "olab/quadrature.hpp"
#include "olab/types.hpp"

namespace olab::match {

/// γP - (τ', σ) together with the residuals and targets that produced it.
struct MatchedParaboloid {
  Ellipsoid base;
  double gamma = 0.0;
  Point tau;
  double sigma = 0.0;
  std::map<std::string, double> residuals;
  std::map<std::string, std::string> provenance;

  int dim() const { return base.dim() + 1; }
  pot::ParaboloidSolution solution(pot::Route route = pot::Route::Confocal) const;
};

struct EllipsoidMatch {
  /// Centred, principal frame of Q, volume of the unit ball.
  Ellipsoid E;
  /// ‖μ(a) - q/2‖∞.
  double residual = 0.0;
  int newton_steps = 0;
};

/// Ellipsoid whose interior quadratic is p, by damped Newton on log a with Σ log a_i = 0.
EllipsoidMatch solve_matching_ellipsoid(const QuadraticBlowdown& p, double tol = 1e-8, int max_steps = 100);

/// λ_γ = α_N (N-2) ∫_{γP} y_N/|y|^N dy, N >= 4.
double lambda_gamma(double gamma, const Ellipsoid& base, const quad::QuadratureSpec& spec = {});

struct GammaSolve {
  double gamma = 0.0;
  /// Final value of the bisected function.
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int evaluations = 0;
  /// N = 3 only: the numerical c_{E'}, γ_B := 2B/c_{E'} and R_B := max(γ_B², 1).
  double c_E = 0.0;
  double gamma_B = 0.0;
  double R_B = 0.0;
};

/// γ with λ_γ = -b_N (b_N < 0); |λ_γ + b_N| <= rel |b_N|.
GammaSolve solve_gamma_N4(double b_N, const Ellipsoid& base, const quad::QuadratureSpec& spec = {},
                          double rel = 1e-6);

/// c_{E'} with ∂₃A^R_{γP} <= -(c_{E'}/2) γ log R, estimated from samples at γ = 1 with a safety factor ½.
double estimate_c_E(const Ellipsoid& base, const quad::QuadratureSpec& spec = {});

/// γ ∈ [0, γ_B] with ∂₃A^R_{γP} = -β log R; B defaults to β.
GammaSolve solve_gamma_N3(double beta, double R, const Ellipsoid& base, const quad::QuadratureSpec& spec = {},
                          double B = -1.0, double rel = 1e-6);

/// τ' = Q⁻¹b'.
Point tau_prime(const QuadraticBlowdown& p, const Point& b_prime);

enum class Ordering { Below, Above, Crossing, Equal };
/// "u<=v", "u>=v", "crossing", "equal".
std::string to_string(Ordering o);

struct OrderingResult {
  Ordering verdict = Ordering::Equal;
  std::size_t above = 0;
  std::size_t below = 0;
  double max_above = 0.0;
  double max_below = 0.0;
};

/// Compares u and v node by node outside the outer `band_layers` layers, with dead band tol.
/// Violations on fewer than 4 nodes do not make a crossing.
OrderingResult ordering_test(const ScalarField& u, const ScalarField& v, double tol, int band_layers = 0);

using Family = std::function<ScalarField(double)>;

struct SlideOptions {
  double sigma_tol = 1e-6;
  double field_tol = 1e-8;
  int band_layers = 2;
  int max_iterations = 200;
};

struct SlideResult {
  double sigma_bar = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Ordering lo_verdict = Ordering::Equal;
  Ordering hi_verdict = Ordering::Equal;
  /// ‖u - u_σ̄‖∞, ‖(u_σ̄ - u)₊‖∞ and min(u - u_σ̄) over the interior nodes.
  double sup_difference = 0.0;
  double positive_excess = 0.0;
  double contact = 0.0;
  /// Contact happens only within the boundary band, so the verdict carries no information.
  bool voided = false;
  int evaluations = 0;
};

/// σ̄ = inf{σ : u_σ <= u} by bisection on the ordering verdict over [lo, hi].
SlideResult slide_sigma_bar(const ScalarField& u, const Family& family, double lo, double hi,
                            const SlideOptions& opt = {});

struct CompactMatch {
  Ellipsoid E;
  double gamma = 0.0;
  Point tau;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double sup_error = 0.0;
  int evaluations = 0;
};

/// Matches a solution with bounded coincidence set and full blow-down p by u_{γE-τ}:
/// E from Q, τ = Q⁻¹b with b the linear coefficient -α_N(N-2)∫_C y/|y|^N of u - p (C from the mask),
/// then γ by bisection on the ordering verdict.
CompactMatch compact_case_match(const ScalarField& u, const QuadraticBlowdown& p, const SlideOptions& opt = {});

}  // namespace olab::match

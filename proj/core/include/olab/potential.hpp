#pragma once

#include <functional>

#include "olab/quadrature.hpp"
#include "olab/types.hpp"

namespace olab::pot {

/// α_N = 1/(N(N-2)|B_1|).
double alpha(int N);

/// G(x,y) = |x-y|^{2-N} - |y|^{2-N} - (N-2) x·y/|y|^N with N = dim x.
double kernel_G(const Point& x, const Point& y);
/// Same kernel written without cancellation between the three terms (N = 3, 4).
double kernel_G_stable(const Point& x, const Point& y);

struct PotentialValue {
  double value = 0.0;
  double error = 0.0;
  quad::TailBound tail;
};

/// V_M(x) = α_N ∫_M G(x,y) dy for an ellipsoid or paraboloid M, N ∈ {3, 4}.
PotentialValue potential(const ConvexBody& M, const Point& x, const quad::QuadratureSpec& spec = {});

/// Classical Newtonian potential of an ellipsoid inside it: c0 - Σ μ_i z_i², z in the principal frame.
struct InteriorQuadratic {
  double c0 = 0.0;
  Point mu;
  Matrix rotation;
  int m = 0;

  /// Σ μ_i z_i², z = Rᵀx: the quadratic V^{NP}(0) - V^{NP}(x) inside the ellipsoid.
  double quadratic(const Point& x) const;
  QuadraticBlowdown blowdown() const;
};

/// Interior coefficients of the classical m-dimensional Newtonian potential of E (m >= 2).
InteriorQuadratic ellipsoid_interior(const Ellipsoid& E);

/// Unnormalised μ_i(a) = (Πa/4) ∫_0^∞ ds / ((a_i²+s) √Π(a_j²+s)).
Point interior_mu(const Point& semi_axes, double rel_tol = 1e-13);
/// ∂μ_i/∂log a_k.
Matrix interior_mu_jacobian(const Point& semi_axes, double rel_tol = 1e-13);

// ------------------------------------------------------------------ paraboloid solutions

enum class Route {
  Quadrature,  ///< sliced definition integral
  Confocal,    ///< one-dimensional confocal representation of u_{γP}
};

/// u_{γP} - p evaluated through the confocal representation, γP centred at the origin.
double potential_confocal(const Ellipsoid& base, double gamma, const Point& x);
/// Its gradient.
Point potential_confocal_gradient(const Ellipsoid& base, double gamma, const Point& x);
/// u_{γP}(x) itself; exactly zero on γP.
double solution_confocal(const Ellipsoid& base, double gamma, const Point& x);
/// ∇u_{γP}(x).
Point solution_confocal_gradient(const Ellipsoid& base, double gamma, const Point& x);
/// u_{γE} = p + V_{γE} for a centred ellipsoid E in R^N, from its exterior confocal representation.
double ellipsoid_solution_confocal(const Ellipsoid& E, double gamma, const Point& x);
/// V_{γP-s}(x) = V_{γP}(x+s) - V_{γP}(s) - x·∇V_{γP}(s) with s = (τ', σ).
double translated_potential_confocal(const Ellipsoid& base, double gamma, const Point& tau, double sigma,
                                     const Point& x);

/// u_σ(x) = p(x'+τ') + V_{γP}(x'+τ', x_N+σ), p being the interior quadratic matched to E'.
class ParaboloidSolution {
public:
  ParaboloidSolution(Ellipsoid base, double gamma, Point tau, double sigma, Route route = Route::Confocal,
                     quad::QuadratureSpec spec = {});

  double operator()(const Point& x) const;
  /// p(x'+τ') alone.
  double blowdown(const Point& x) const;
  double potential_part(const Point& x) const;

  const Ellipsoid& base() const { return base_; }
  double gamma() const { return gamma_; }
  const Point& tau() const { return tau_; }
  double sigma() const { return sigma_; }
  int dim() const { return base_.dim() + 1; }
  ParaboloidSolution with_sigma(double sigma) const;
  ParaboloidSolution with_gamma(double gamma) const;

private:
  Ellipsoid base_;
  double gamma_;
  Point tau_;
  double sigma_;
  Route route_;
  quad::QuadratureSpec spec_;
  InteriorQuadratic interior_;
};

double eval_paraboloid_solution(double gamma, const Ellipsoid& base, const Point& tau, double sigma,
                                const Point& x, const quad::QuadratureSpec& spec = {},
                                Route route = Route::Quadrature);

/// u_{γE-τ}(x) = p(x+τ) + V_{γE}(x+τ) with p matched to the centred ellipsoid E.
class EllipsoidSolution {
public:
  EllipsoidSolution(Ellipsoid E, double gamma, Point tau, Route route = Route::Confocal,
                    quad::QuadratureSpec spec = {});
  double operator()(const Point& x) const;
  const Ellipsoid& base() const { return E_; }
  double gamma() const { return gamma_; }
  const Point& tau() const { return tau_; }

private:
  Ellipsoid E_;
  double gamma_;
  Point tau_;
  Route route_;
  quad::QuadratureSpec spec_;
  InteriorQuadratic interior_;
};

// ------------------------------------------------------------------ correctors and decompositions

/// Moment slopes of a body: ∫_M y/|y|^N dy (N >= 4, or any N for bounded M).
Point inverse_moment(const ConvexBody& M, const quad::QuadratureSpec& spec = {});

/// Affine corrector A^R_M for N = 3.
AffineFunction affine_corrector_AR(const ConvexBody& M, double R, const quad::QuadratureSpec& spec = {});

/// ∂₃A^R_{γP} through the set difference γP ∖ (γP + Re³).
double d3_AR(double gamma, double R, const Ellipsoid& base, const quad::QuadratureSpec& spec = {});

struct WEllDecomposition {
  /// ℓ_M(x) = x·(α_N(N-2) ∫_M y/|y|^N dy).
  AffineFunction ell;
  /// W_M = V_M + ℓ_M.
  std::function<double(const Point&)> W;
};

/// Splits V_M = W_M - ℓ_M for N >= 4.
WEllDecomposition decompose_W_ell(const ConvexBody& M, const quad::QuadratureSpec& spec = {},
                                  Route route = Route::Quadrature);

}  // namespace olab::pot

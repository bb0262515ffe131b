#pragma once

#include <string>
#include <vector>

#include "olab/types.hpp"

namespace olab::acf {

enum class Sign { Plus, Minus };
enum class Part { Plus, Minus, Abs, Raw };

/// ∫_{B_r(c)} |∇v_±|² / |x-c|^{N-2} dx.
/// Nodes whose dual cell is cut by the sphere, by the sign change of the local affine model, or lies
/// near the centre are sub-sampled; the centre cell is integrated by dyadic shells.
double weighted_dirichlet(const ScalarField& v, double r, Sign sign, const Point& center);
double weighted_dirichlet(const ScalarField& v, double r, Sign sign);

/// Φ(v, r) = r^{-4} I₊(r) I₋(r).
double phi(const ScalarField& v, double r, const Point& center);
double phi(const ScalarField& v, double r);

struct ACFProfile {
  std::vector<double> radii;
  std::vector<double> i_plus;
  std::vector<double> i_minus;
  std::vector<double> phi;
  /// Relative decrease from the previous radius (0 for the first entry and for increases).
  std::vector<double> violation;
  /// max over entries of violation.
  double verdict = 0.0;
};

ACFProfile phi_profile(const ScalarField& v, const std::vector<double>& radii, const Point& center);
ACFProfile phi_profile(const ScalarField& v, const std::vector<double>& radii);

/// max over interior nodes of (w_i - weighted mean of the 2N neighbours)₊ for the chosen part w of v.
double subharmonicity_check(const ScalarField& v, Part part);

/// (r² ⨍_{B_r}|∇v|²) / ⨍_{B_{2r}} v² with central-difference gradients.
double caccioppoli_ratio(const ScalarField& v, double r, const Point& center);
double caccioppoli_ratio(const ScalarField& v, double r);

enum class Dichotomy { SignedPlus, SignedMinus, Linear, Mixed };
std::string to_string(Dichotomy d);

struct DichotomyResult {
  Dichotomy verdict = Dichotomy::Mixed;
  /// Least-squares slope of w ≈ b·x (meaningful for every verdict).
  Point b;
  /// ‖w - b·x‖₁ / ‖w‖₁ and min(‖w₊‖₁, ‖w₋‖₁) / ‖w‖₁.
  double linear_residual = 0.0;
  double minority = 0.0;
};

/// Classifies w on the nodes of the largest origin-centred ball of radius <= 1 inside the box.
/// Fields with ‖w‖∞ <= zero_floor are reported linear with b = 0.
DichotomyResult dichotomy_classify(const ScalarField& w, double tol = 0.05, double zero_floor = 1e-14);

}  // namespace olab::acf

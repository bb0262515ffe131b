#pragma once

#include <functional>
#include <optional>
#include <string>

#include "olab/gauss_kronrod.hpp"
#include "olab/types.hpp"

namespace olab::quad {

/// How the part of a paraboloid above the truncation height is treated.
enum class TailMode {
  Map,       ///< integrate [T, ∞) through t = T/s² and report the analytic bound alongside
  Truncate,  ///< drop [T, ∞) and add the analytic bound to the error budget
};

struct QuadratureSpec {
  double rel_tol = 1e-7;
  int max_subdivisions = 4000;
  /// Truncation height; values <= 0 select max(100, 50|x|).
  double t_max = 0.0;
  TailMode tail = TailMode::Map;

  void validate() const;
  double truncation_height(double x_norm) const;
};

/// Decay classes |f(y)| <= c/|y|^k of paraboloid integrands, k ∈ {N, N-1, N-2}.
enum class DecayTag { InvN, InvNm1, InvNm2 };
std::string to_string(DecayTag tag);
int decay_exponent(DecayTag tag, int N);

struct TailBound {
  double T = 0.0;
  double bound = 0.0;
  DecayTag tag = DecayTag::InvN;
  /// True when the bound enters the error budget (truncated tail).
  bool charged = false;
};

/// Growth of paraboloid sections: H^{N-1}(section at t) = growth · (t + shift)^{(N-1)/2}.
struct SectionGrowth {
  double growth = 0.0;
  double shift = 0.0;
};
SectionGrowth section_growth(const Paraboloid& P);

/// Upper bound for ∫_{P ∩ {y_N > T}} c/|y|^k dy; refuses divergent exponents.
double tail_bound(DecayTag tag, int N, double T, double coefficient, const SectionGrowth& g);
TailBound make_tail_bound(DecayTag tag, int N, double T, double coefficient, const SectionGrowth& g);

// ------------------------------------------------------------------ section kernels

/// Which of the kernel families of section_kernels to evaluate.
enum KernelFamily : unsigned {
  kPotential = 1u,  ///< ∫ (|y'-p'|² + d²)^{-(N-2)/2}
  kInverseN = 2u,   ///< ∫ (|y'-p'|² + d²)^{-N/2}
  kFirst = 4u,      ///< ∫ (y'-p') (|y'-p'|² + d²)^{-N/2}
};

struct KernelMoments {
  double potential = 0.0;
  double inverse_n = 0.0;
  Point first;
  Estimate quality;
};

/// Kernel integrals over an (N-1)-dimensional ellipsoidal section for N ∈ {3, 4}.
/// Rays are cast from the projection p' of the singular point; radial integrals are closed form.
KernelMoments section_kernels(const Section& S, const Point& p, double d, int N, unsigned families,
                              const Tolerance& tol);

// ------------------------------------------------------------------ generic integrands

using SectionIntegrand = std::function<double(const Point&)>;
using BodyIntegrand = std::function<double(const Point&)>;

/// ∫_S f over an ellipsoidal section (dimension 1, 2 or 3); polar about the singular point when given.
Estimate integrate_section(const SectionIntegrand& f, const Section& S, const std::optional<Point>& singular,
                           const Tolerance& tol);
/// Throws NumericalError on nonconvergence.
double integrate_section(const SectionIntegrand& f, const Ellipsoid& E, double rel_tol,
                         const std::optional<Point>& singular = std::nullopt);

struct BodyOptions {
  std::optional<Point> singular;
  /// Restrict to lo <= y_N <= hi.
  std::optional<double> t_lo, t_hi;
  /// Decay certificate for paraboloids (required unless t_hi is finite).
  std::optional<DecayTag> decay;
  double decay_coefficient = 1.0;
  /// Extra breakpoints in y_N.
  std::vector<double> breaks;
};

struct BodyIntegral {
  double value = 0.0;
  double error = 0.0;
  TailBound tail;
  Estimate quality;
};

/// Slices B along y_N, integrates each section and then the section integrals in t.
BodyIntegral integrate_body(const BodyIntegrand& f, const ConvexBody& B, const QuadratureSpec& spec,
                            const BodyOptions& options = {});

// ------------------------------------------------------------------ t-parametrisation helpers

/// A piece of the y_N axis mapped to a finite parameter interval.
struct Segment {
  enum class Map { Linear, SqrtStart, SqrtEnd, Inverse } map = Map::Linear;
  double t0 = 0.0, t1 = 0.0;
  /// Parameter interval and t(u), dt/du.
  double u0() const;
  double u1() const;
  double t_of(double u, double& jac) const;
};

/// Integrates g(t) over the concatenated segments with one global adaptive rule.
Estimate integrate_segments(const std::function<double(double)>& g, const std::vector<Segment>& segs,
                            const Tolerance& tol);

/// Breakpoint list → segments: sqrt maps at finite ends where sections degenerate, inverse map to ∞.
std::vector<Segment> build_segments(std::vector<double> points, bool sqrt_at_start, bool sqrt_at_end,
                                    bool to_infinity);

/// y_N extent of an ellipsoid.
std::pair<double, double> ellipsoid_height_range(const Ellipsoid& E);

// ------------------------------------------------------------------ ball averages

/// Quasi-Monte Carlo mean of f over B_R(center): the first `points` Halton points (bases 2, 3, 5, 7)
/// of the enclosing cube that fall inside the ball.
double ball_mean(const std::function<double(const Point&)>& f, const Point& center, double R, int points = 4096);

}  // namespace olab::quad

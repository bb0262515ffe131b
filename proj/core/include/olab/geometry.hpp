#pragma once

#include <optional>
#include <string>
#include <vector>

#include "olab/types.hpp"

namespace olab::geom {

struct CoincidenceMask {
  Mask mask;
  /// Fraction of nodes of the (support-direction) convex hull of the mask that lie outside it.
  double hull_defect = 0.0;
};

/// Nodes with u < threshold; the default threshold is h_max².
CoincidenceMask coincidence_mask(const ScalarField& u, std::optional<double> threshold = {});

/// Hull defect of an arbitrary node set, as reported by coincidence_mask.
double hull_defect(const Mask& m);

/// Nodes where the mask disagrees with body_contains, ignoring nodes within distance `band` of the body
/// boundary (probed along the 3^N - 1 lattice directions).
std::size_t mask_mismatch(const Mask& m, const ConvexBody& body, double band);

struct SectionProfile {
  std::vector<double> t;
  std::vector<double> H;
  std::vector<double> diam;
  std::vector<double> perimeter;
  /// Relative midpoint chord violation of √H at each interior height (0 at the ends).
  std::vector<double> sqrtH_violation;
  /// H(t)/(1+t).
  std::vector<double> growth;
  /// Grid spacing behind the measures (0 for closed-form bodies).
  double h = 0.0;

  double growth_monitor() const;
  double max_sqrtH_violation() const;
};

/// Sections C ∩ {x_N = t}; masks use the nearest node layer with cell-measure counting,
/// sliceable bodies use closed forms.
SectionProfile section_profile(const ConvexBody& C, const std::vector<double>& heights);

struct ChordCheck {
  /// max over triples of (λ√H₁ + (1-λ)√H₂)² - H(t) - slack(t), clipped at 0.
  double worst_excess = 0.0;
  std::size_t triples = 0;
  bool holds = true;
};

/// Tests the chord inequality of √H over all increasing triples with slack 3h·perimeter on H.
ChordCheck chord_check(const SectionProfile& p);

/// d(t)²/H(t) per height (NaN where H = 0).
std::vector<double> diameter_ratio(const SectionProfile& p);

struct ParaboloidFit {
  bool ok = false;
  std::string failure;
  double a0 = 0.0;
  double gamma0 = 0.0;
  double covered_fraction = 0.0;
  bool ray_contained = false;
};

/// Smallest γ₀ on the grid 2^{k/16} with C ∩ {x_N > a₀} ⊂ {(|x'| - band)₊² < γ₀ x_N} below the first lateral
/// box contact; a₀ is the lowest layer whose γ₀ stays within `plateau` of the value fitted over the
/// upper half of that range. Lateral distances are reduced by `band` (the thickness a threshold mask adds
/// outside the free boundary) before the containment test.
ParaboloidFit paraboloid_fit(const Mask& C, double plateau = 1.1, double band = 0.0);

/// Detachment band √(2·threshold) of a mask taken at u < threshold around a C^{1,1} solution.
double detachment_band(double threshold);

}  // namespace olab::geom

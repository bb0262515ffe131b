#pragma once

#include <string>
#include <vector>

#include "olab/config.hpp"
#include "olab/io.hpp"

namespace olab::exp {

/// Files to commit plus a few human-readable summary lines.
struct Report {
  io::OutputSet files;
  std::vector<std::string> summary;
};

/// potential.csv (samples, ball reference), scaling.csv, pde_residual.csv, bmo.csv (N = 3 paraboloid).
Report run_potential(const cfg::ExperimentConfig& c);
/// growth.csv and growth.json: ⨍|u - p - ℓ| (N = 4) or ⨍|u - p - A^R| (N = 3) with a fitted exponent.
Report run_growth(const cfg::ExperimentConfig& c);
/// acf_profile.csv and acf.json for the difference of the target and comparison solutions.
Report run_acf(const cfg::ExperimentConfig& c);
/// matched.json: E' from Q, γ from the slope target, τ' = Q⁻¹b'.
Report run_match(const cfg::ExperimentConfig& c);
/// slide.json: σ̄ for the configured target against its own σ-family.
Report run_slide(const cfg::ExperimentConfig& c);
/// pipeline.json: solve, mask, fit, match, acf, dichotomy and slide with every residual.
Report run_pipeline(const cfg::ExperimentConfig& c);

}  // namespace olab::exp

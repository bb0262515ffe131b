#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "olab/quadrature.hpp"
#include "olab/types.hpp"

namespace olab::cfg {

/// One experiment read from a flat `key = value` file. Lists are comma separated.
struct ExperimentConfig {
  std::string experiment = "default";
  int dim = 3;
  /// ball | paraboloid | ellipsoid (potential only).
  std::string body = "paraboloid";
  double radius = 1.0;
  std::vector<double> axes;
  /// Eigenvalues of the blow-down Q, N-1 entries summing to 1; empty means uniform.
  std::vector<double> q_spectrum;
  double gamma = 1.0;
  std::vector<double> tau;
  double sigma = 0.0;

  int grid_nodes = 41;
  /// One half-width (centred cube) or 2N numbers: lower corner then upper corner.
  std::vector<double> grid_box{1.0};

  double quad_tol = 1e-7;
  double quad_tmax = 0.0;
  double solver_tol = 1e-9;
  double solver_omega = 1.6;
  double tol = 1e-7;

  std::vector<double> radii;
  std::vector<double> heights;
  std::vector<double> R_values;
  int samples = 20;
  std::uint64_t seed = 0;
  std::string out_dir = "olab-out";

  /// paraboloid | halfspace.
  std::string target_kind = "paraboloid";
  /// analytic | solved.
  std::string target_source = "solved";
  /// Amplitude of a Gaussian bump added to the target, in units of tol.
  double target_bump = 0.0;

  std::optional<double> compare_gamma;
  std::vector<double> compare_tau;
  std::optional<double> compare_sigma;

  std::optional<double> match_slope;
  std::optional<double> match_beta;
  double match_R = 100.0;
  std::vector<double> match_b_prime;

  std::optional<double> slide_lo;
  std::optional<double> slide_hi;
  /// Dead band of the ordering test; defaults to tol.
  std::optional<double> slide_field_tol;
  /// solved | analytic.
  std::string slide_family = "solved";

  Grid grid() const;
  quad::QuadratureSpec quadrature() const;
  /// Q as a diagonal blow-down in its principal frame.
  QuadraticBlowdown blowdown() const;
  /// τ' as a point (zeros when unset).
  Point tau_point() const;
};

/// Parses and validates; throws ConfigError naming the offending line or key.
ExperimentConfig parse_config(const std::string& text);

/// Re-checks every field; called after command-line overrides.
void validate(const ExperimentConfig& c);

/// The accepted keys, one per line with a short description.
const std::vector<std::pair<std::string, std::string>>& documented_keys();

}  // namespace olab::cfg

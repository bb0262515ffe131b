#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <variant>
#include <vector>

#include "olab/parallel.hpp"

namespace olab {

inline constexpr int kMaxDim = 4;

/// Small point/vector in R^n, n <= kMaxDim; never allocates.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using MultiIndex = std::array<int, kMaxDim>;

Point make_point(std::initializer_list<double> coords);
Point zero_point(int n);
Point unit_vector(int n, int axis);

/// Volume of the unit ball of R^n.
double unit_ball_volume(int n);

// ---------------------------------------------------------------- grids

/// Uniform axis-aligned lattice on a box; axis 0 varies fastest in the flat index.
class Grid {
public:
  Grid(Point lower, Point upper, const std::vector<int>& nodes);
  /// Cube [-half_width, half_width]^dim with the same node count per axis.
  static Grid cube(int dim, double half_width, int nodes);

  int dim() const { return dim_; }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  const Point& h() const { return h_; }
  int nodes(int axis) const { return nodes_[axis]; }
  std::vector<int> node_counts() const;
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }
  double h_max() const;
  double cell_volume() const;

  MultiIndex multi_index(std::size_t flat) const;
  std::size_t index(const MultiIndex& m) const;
  Point coord(std::size_t flat) const;
  Point coord(const MultiIndex& m) const;
  bool is_boundary(std::size_t flat) const;
  /// Distance (in nodes) from the nearest box face.
  int boundary_layer(std::size_t flat) const;
  bool in_box(const Point& x) const;
  std::optional<std::size_t> nearest(const Point& x) const;

  bool operator==(const Grid& other) const;

private:
  int dim_;
  Point lower_, upper_, h_;
  MultiIndex nodes_{};
  std::array<std::size_t, kMaxDim> stride_{};
  std::size_t size_;
};

/// Node values on a grid; always finite.
class ScalarField {
public:
  ScalarField(Grid grid, std::vector<double> values);
  static ScalarField constant(const Grid& grid, double c);

  template <class F>
  static ScalarField sample(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { v[i] = f(grid.coord(i)); });
    return ScalarField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double min() const;
  double max() const;
  double max_abs() const;

  ScalarField operator-(const ScalarField& other) const;
  ScalarField operator+(const ScalarField& other) const;
  ScalarField operator*(double s) const;
  ScalarField positive_part() const;
  ScalarField negative_part() const;

private:
  Grid grid_;
  std::vector<double> values_;
};

/// Field defined on a subset of nodes; invalid entries hold 0 and are excluded from norms.
struct MaskedField {
  ScalarField values;
  std::vector<std::uint8_t> valid;

  double max_abs_valid() const;
};

/// Second-order (2N+1)-point Laplacian; boundary nodes are flagged invalid.
MaskedField discrete_laplacian(const ScalarField& f);

/// Mean of f over the nodes inside the closed ball B_R(center).
double ball_average(const ScalarField& f, const Point& center, double R);

// ---------------------------------------------------------------- algebraic data

/// p(x') = x'ᵀQx'/2 with tr Q = 1 and Q positive semidefinite.
class QuadraticBlowdown {
public:
  explicit QuadraticBlowdown(const Matrix& Q);
  static QuadraticBlowdown diagonal(const std::vector<double>& q);

  int dim() const { return static_cast<int>(Q_.rows()); }
  const Matrix& Q() const { return Q_; }
  /// Ascending eigenvalues and the matching orthonormal eigenvectors (columns).
  const Point& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  bool positive_definite() const { return positive_definite_; }
  /// Largest c with p(x') >= c|x'|².
  double c_p() const { return eigenvalues_(0) / 2.0; }

  double operator()(const Point& x) const;
  Point gradient(const Point& x) const;
  Point solve(const Point& b) const;

private:
  Matrix Q_;
  Point eigenvalues_;
  Matrix eigenvectors_;
  bool positive_definite_;
};

double eval_blowdown(const QuadraticBlowdown& p, const Point& x);

struct AffineFunction {
  double c = 0.0;
  Point b;

  AffineFunction() = default;
  AffineFunction(double c_, Point b_) : c(c_), b(std::move(b_)) {}
  static AffineFunction zero(int n) { return {0.0, zero_point(n)}; }

  double operator()(const Point& x) const { return c + b.dot(x); }
  /// x ↦ A(x + z).
  AffineFunction translated(const Point& z) const { return {c + b.dot(z), b}; }
};

// ---------------------------------------------------------------- convex bodies

/// {x : |diag(a)^-1 Rᵀ(x - c)| <= 1}; the columns of R are the principal directions.
struct Ellipsoid {
  Point center;
  Point semi_axes;
  Matrix rotation;

  Ellipsoid(Point center, Point semi_axes, Matrix rotation);
  static Ellipsoid ball(const Point& center, double radius);
  static Ellipsoid axis_aligned(const Point& center, const Point& semi_axes);

  int dim() const { return static_cast<int>(center.size()); }
  double volume() const;
  /// Coordinates in the unit-ball frame: diag(a)^-1 Rᵀ(x - c).
  Point to_unit(const Point& x) const;
  Point from_unit(const Point& z) const;
  bool contains(const Point& x) const;
  Ellipsoid scaled(double s) const;
};

/// γP - (τ', σ) with P = {x : x_N >= 0, x' ∈ √x_N E'} and E' centred at the origin.
struct Paraboloid {
  Ellipsoid base;
  double gamma;
  Point tau;
  double sigma;

  Paraboloid(Ellipsoid base, double gamma, Point tau, double sigma);
  static Paraboloid centred(Ellipsoid base, double gamma);

  int dim() const { return base.dim() + 1; }
  bool contains(const Point& x) const;
};

/// {x : normal·x <= offset}.
struct HalfSpace {
  Point normal;
  double offset;

  HalfSpace(Point normal, double offset);
  int dim() const { return static_cast<int>(normal.size()); }
  bool contains(const Point& x) const { return normal.dot(x) <= offset; }
};

/// Node set on a grid; membership by nearest node.
struct Mask {
  Grid grid;
  std::vector<std::uint8_t> inside;

  Mask(Grid grid, std::vector<std::uint8_t> inside);
  int dim() const { return grid.dim(); }
  bool contains(const Point& x) const;
  std::size_t count() const;
};

using ConvexBody = std::variant<Ellipsoid, Paraboloid, HalfSpace, Mask>;

int body_dim(const ConvexBody& B);
bool body_contains(const ConvexBody& B, const Point& x);
/// The body moved by z, i.e. B + z.
ConvexBody body_translated(const ConvexBody& B, const Point& z);

/// Ellipsoidal slice in R^{N-1}; semi-axes may vanish (point section).
struct Section {
  bool empty = true;
  Point center;
  Point semi_axes;
  Matrix rotation;

  int dim() const { return static_cast<int>(center.size()); }
  double measure() const;
  double max_axis() const;
  bool degenerate() const;
  bool contains(const Point& x) const;
  /// The section as an ellipsoid; requires positive semi-axes.
  Ellipsoid as_ellipsoid() const;
};

/// Exact slice {x' : (x', t) ∈ B}; only Ellipsoid and Paraboloid bodies are sliceable.
Section body_section(const ConvexBody& B, double t);
Section ellipsoid_section(const Ellipsoid& E, double t);
Section paraboloid_section(const Paraboloid& P, double t);

}  // namespace olab

#include "olab/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "olab/error.hpp"

namespace olab {

Point make_point(std::initializer_list<double> coords) {
  if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxDim))
    fail_domain("point dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  Point p(static_cast<int>(coords.size()));
  int i = 0;
  for (double c : coords) p(i++) = c;
  return p;
}

Point zero_point(int n) { return Point::Zero(n); }

Point unit_vector(int n, int axis) {
  Point e = Point::Zero(n);
  e(axis) = 1.0;
  return e;
}

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// ---------------------------------------------------------------- Grid

Grid::Grid(Point lower, Point upper, const std::vector<int>& nodes)
    : dim_(static_cast<int>(lower.size())), lower_(std::move(lower)), upper_(std::move(upper)) {
  if (dim_ < 2 || dim_ > kMaxDim) fail_domain("grid dimension must be in [2, 4]");
  if (upper_.size() != dim_ || static_cast<int>(nodes.size()) != dim_)
    fail_domain("grid corner/node dimensions disagree");
  h_ = Point::Zero(dim_);
  size_ = 1;
  for (int a = 0; a < dim_; ++a) {
    if (!(upper_(a) > lower_(a))) fail_domain("grid upper corner must exceed lower corner");
    if (nodes[a] < 3) fail_domain("grid needs at least 3 nodes per axis");
    nodes_[a] = nodes[a];
    h_(a) = (upper_(a) - lower_(a)) / (nodes[a] - 1);
    stride_[a] = size_;
    size_ *= static_cast<std::size_t>(nodes[a]);
  }
}

Grid Grid::cube(int dim, double half_width, int nodes) {
  return Grid(Point::Constant(dim, -half_width), Point::Constant(dim, half_width),
              std::vector<int>(dim, nodes));
}

std::vector<int> Grid::node_counts() const { return {nodes_.begin(), nodes_.begin() + dim_}; }

double Grid::h_max() const { return h_.maxCoeff(); }

double Grid::cell_volume() const { return h_.prod(); }

MultiIndex Grid::multi_index(std::size_t flat) const {
  MultiIndex m{};
  for (int a = 0; a < dim_; ++a) {
    m[a] = static_cast<int>(flat % nodes_[a]);
    flat /= nodes_[a];
  }
  return m;
}

std::size_t Grid::index(const MultiIndex& m) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat += stride_[a] * static_cast<std::size_t>(m[a]);
  return flat;
}

Point Grid::coord(const MultiIndex& m) const {
  Point x(dim_);
  for (int a = 0; a < dim_; ++a)
    x(a) = (m[a] == nodes_[a] - 1) ? upper_(a) : lower_(a) + m[a] * h_(a);
  return x;
}

Point Grid::coord(std::size_t flat) const { return coord(multi_index(flat)); }

bool Grid::is_boundary(std::size_t flat) const { return boundary_layer(flat) == 0; }

int Grid::boundary_layer(std::size_t flat) const {
  const MultiIndex m = multi_index(flat);
  int layer = nodes_[0];
  for (int a = 0; a < dim_; ++a) layer = std::min({layer, m[a], nodes_[a] - 1 - m[a]});
  return layer;
}

bool Grid::in_box(const Point& x) const {
  if (x.size() != dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (x(a) < lower_(a) || x(a) > upper_(a)) return false;
  return true;
}

std::optional<std::size_t> Grid::nearest(const Point& x) const {
  if (x.size() != dim_) return std::nullopt;
  MultiIndex m{};
  for (int a = 0; a < dim_; ++a) {
    const double s = (x(a) - lower_(a)) / h_(a);
    if (s < -0.5 || s > nodes_[a] - 0.5) return std::nullopt;
    m[a] = std::clamp(static_cast<int>(std::lround(s)), 0, nodes_[a] - 1);
  }
  return index(m);
}

bool Grid::operator==(const Grid& o) const {
  if (dim_ != o.dim_) return false;
  for (int a = 0; a < dim_; ++a)
    if (nodes_[a] != o.nodes_[a]) return false;
  return lower_ == o.lower_ && upper_ == o.upper_;
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) fail_domain("field length does not match grid node count");
  for (double v : values_)
    if (!std::isfinite(v)) fail_domain("field values must be finite");
}

ScalarField ScalarField::constant(const Grid& grid, double c) {
  return ScalarField(grid, std::vector<double>(grid.size(), c));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {
void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) fail_domain("fields live on different grids");
}
}  // namespace

ScalarField ScalarField::operator-(const ScalarField& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
  require_same_grid(grid_, o.grid_);
  std::vector<double> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + o.values_[i];
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator*(double s) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= s;
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::positive_part() const {
  std::vector<double> v(values_);
  for (double& x : v) x = std::max(x, 0.0);
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::negative_part() const {
  std::vector<double> v(values_);
  for (double& x : v) x = std::max(-x, 0.0);
  return ScalarField(grid_, std::move(v));
}

double MaskedField::max_abs_valid() const {
  double m = 0.0;
  for (std::size_t i = 0; i < valid.size(); ++i)
    if (valid[i]) m = std::max(m, std::abs(values[i]));
  return m;
}

MaskedField discrete_laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto& u = f.values();
  std::vector<double> out(g.size(), 0.0);
  std::vector<std::uint8_t> valid(g.size(), 0);
  std::array<double, kMaxDim> inv_h2{};
  for (int a = 0; a < g.dim(); ++a) inv_h2[a] = 1.0 / (g.h()(a) * g.h()(a));
  parallel_for(g.size(), [&](std::size_t i) {
    if (g.is_boundary(i)) return;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t st = g.stride(a);
      s += (u[i + st] - 2.0 * u[i] + u[i - st]) * inv_h2[a];
    }
    out[i] = s;
    valid[i] = 1;
  });
  return {ScalarField(g, std::move(out)), std::move(valid)};
}

double ball_average(const ScalarField& f, const Point& center, double R) {
  const Grid& g = f.grid();
  if (center.size() != g.dim()) fail_domain("ball centre dimension mismatch");
  if (R < 2.0 * g.h_max()) fail_domain("ball radius must be at least 2 grid spacings");
  for (int a = 0; a < g.dim(); ++a)
    if (center(a) - R < g.lower()(a) - 1e-12 || center(a) + R > g.upper()(a) + 1e-12)
      fail_domain("ball exits the grid box");
  std::vector<double> inside;
  for (std::size_t i = 0; i < g.size(); ++i)
    if ((g.coord(i) - center).squaredNorm() <= R * R) inside.push_back(f[i]);
  if (inside.empty()) fail_domain("ball contains no nodes");
  return pairwise_sum(inside.data(), inside.size()) / static_cast<double>(inside.size());
}

// ---------------------------------------------------------------- QuadraticBlowdown

QuadraticBlowdown::QuadraticBlowdown(const Matrix& Q) : Q_(Q) {
  if (Q_.rows() != Q_.cols() || Q_.rows() < 1) fail_domain("Q must be square");
  const double asym = (Q_ - Q_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) fail_domain("Q must be symmetric");
  if (std::abs(Q_.trace() - 1.0) > 1e-12) fail_domain("Q must have unit trace");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Q_);
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  if (eigenvalues_(0) < -1e-12) fail_domain("Q must be positive semidefinite");
  if (eigenvalues_(0) < 0.0) eigenvalues_(0) = 0.0;
  positive_definite_ = eigenvalues_(0) > 1e-12;
}

QuadraticBlowdown QuadraticBlowdown::diagonal(const std::vector<double>& q) {
  if (q.empty() || q.size() > static_cast<std::size_t>(kMaxDim)) fail_domain("bad spectrum size");
  Matrix Q = Matrix::Zero(q.size(), q.size());
  for (std::size_t i = 0; i < q.size(); ++i) Q(i, i) = q[i];
  return QuadraticBlowdown(Q);
}

double QuadraticBlowdown::operator()(const Point& x) const {
  if (x.size() != Q_.rows()) fail_domain("blow-down evaluated at a point of the wrong dimension");
  return 0.5 * x.dot(Q_ * x);
}

Point QuadraticBlowdown::gradient(const Point& x) const {
  if (x.size() != Q_.rows()) fail_domain("blow-down gradient at a point of the wrong dimension");
  return Q_ * x;
}

Point QuadraticBlowdown::solve(const Point& b) const {
  if (b.size() != Q_.rows()) fail_domain("right-hand side dimension mismatch");
  if (!positive_definite_) fail_domain("Q is singular");
  Point y = eigenvectors_.transpose() * b;
  for (int i = 0; i < y.size(); ++i) y(i) /= eigenvalues_(i);
  return eigenvectors_ * y;
}

double eval_blowdown(const QuadraticBlowdown& p, const Point& x) { return p(x); }

// ---------------------------------------------------------------- bodies

Ellipsoid::Ellipsoid(Point c, Point a, Matrix R)
    : center(std::move(c)), semi_axes(std::move(a)), rotation(std::move(R)) {
  const int n = static_cast<int>(center.size());
  if (n < 1 || semi_axes.size() != n || rotation.rows() != n || rotation.cols() != n)
    fail_domain("ellipsoid data dimensions disagree");
  for (int i = 0; i < n; ++i)
    if (!(semi_axes(i) > 0.0)) fail_domain("ellipsoid semi-axes must be positive");
  const double orth = (rotation.transpose() * rotation - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (orth > 1e-10) fail_domain("ellipsoid rotation must be orthonormal");
}

Ellipsoid Ellipsoid::ball(const Point& c, double r) {
  const int n = static_cast<int>(c.size());
  return Ellipsoid(c, Point::Constant(n, r), Matrix::Identity(n, n));
}

Ellipsoid Ellipsoid::axis_aligned(const Point& c, const Point& a) {
  const int n = static_cast<int>(c.size());
  return Ellipsoid(c, a, Matrix::Identity(n, n));
}

double Ellipsoid::volume() const { return unit_ball_volume(dim()) * semi_axes.prod(); }

Point Ellipsoid::to_unit(const Point& x) const {
  Point z = rotation.transpose() * (x - center);
  return z.cwiseQuotient(semi_axes);
}

Point Ellipsoid::from_unit(const Point& z) const {
  return center + rotation * z.cwiseProduct(semi_axes);
}

bool Ellipsoid::contains(const Point& x) const {
  if (x.size() != dim()) fail_domain("point dimension does not match ellipsoid");
  return to_unit(x).squaredNorm() <= 1.0;
}

Ellipsoid Ellipsoid::scaled(double s) const { return Ellipsoid(center * s, semi_axes * s, rotation); }

Paraboloid::Paraboloid(Ellipsoid b, double g, Point t, double s)
    : base(std::move(b)), gamma(g), tau(std::move(t)), sigma(s) {
  if (base.dim() + 1 > kMaxDim) fail_domain("paraboloid dimension exceeds the supported maximum");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail_domain("paraboloid scale must be nonnegative");
  if (tau.size() != base.dim()) fail_domain("paraboloid lateral shift has the wrong dimension");
  if (base.center.cwiseAbs().maxCoeff() > 0.0) fail_domain("paraboloid base ellipsoid must be centred");
}

Paraboloid Paraboloid::centred(Ellipsoid b, double g) {
  const int m = b.dim();
  return Paraboloid(std::move(b), g, Point::Zero(m), 0.0);
}

bool Paraboloid::contains(const Point& x) const {
  if (x.size() != dim()) fail_domain("point dimension does not match paraboloid");
  const int m = base.dim();
  const double height = x(m) + sigma;
  if (height < 0.0) return false;
  const Point y = x.head(m) + tau;
  const double r2 = base.to_unit(y).squaredNorm();
  if (gamma == 0.0) return r2 == 0.0;
  return r2 <= gamma * height;
}

HalfSpace::HalfSpace(Point n, double off) : normal(std::move(n)), offset(off) {
  const double len = normal.norm();
  if (!(len > 0.0)) fail_domain("half-space normal must be nonzero");
  normal /= len;
  offset /= len;
}

Mask::Mask(Grid g, std::vector<std::uint8_t> in) : grid(std::move(g)), inside(std::move(in)) {
  if (inside.size() != grid.size()) fail_domain("mask length does not match grid");
}

bool Mask::contains(const Point& x) const {
  const auto idx = grid.nearest(x);
  return idx && inside[*idx] != 0;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count_if(inside.begin(), inside.end(), [](auto v) { return v != 0; }));
}

int body_dim(const ConvexBody& B) {
  return std::visit([](const auto& b) { return b.dim(); }, B);
}

bool body_contains(const ConvexBody& B, const Point& x) {
  if (x.size() != body_dim(B)) fail_domain("point dimension does not match body");
  return std::visit([&](const auto& b) { return b.contains(x); }, B);
}

ConvexBody body_translated(const ConvexBody& B, const Point& z) {
  if (z.size() != body_dim(B)) fail_domain("translation dimension does not match body");
  struct Visitor {
    const Point& z;
    ConvexBody operator()(const Ellipsoid& e) const {
      return Ellipsoid(e.center + z, e.semi_axes, e.rotation);
    }
    ConvexBody operator()(const Paraboloid& p) const {
      const int m = p.base.dim();
      return Paraboloid(p.base, p.gamma, p.tau - z.head(m), p.sigma - z(m));
    }
    ConvexBody operator()(const HalfSpace& h) const {
      return HalfSpace(h.normal, h.offset + h.normal.dot(z));
    }
    ConvexBody operator()(const Mask& k) const {
      return Mask(Grid(k.grid.lower() + z, k.grid.upper() + z, k.grid.node_counts()), k.inside);
    }
  };
  return std::visit(Visitor{z}, B);
}

// ---------------------------------------------------------------- sections

double Section::measure() const {
  if (empty) return 0.0;
  return unit_ball_volume(dim()) * semi_axes.prod();
}

double Section::max_axis() const { return empty ? 0.0 : semi_axes.maxCoeff(); }

bool Section::degenerate() const { return empty || semi_axes.minCoeff() <= 0.0; }

bool Section::contains(const Point& x) const {
  if (empty) return false;
  const Point z = rotation.transpose() * (x - center);
  double s = 0.0;
  for (int i = 0; i < z.size(); ++i) {
    if (semi_axes(i) <= 0.0) {
      if (z(i) != 0.0) return false;
      continue;
    }
    s += (z(i) / semi_axes(i)) * (z(i) / semi_axes(i));
  }
  return s <= 1.0;
}

Ellipsoid Section::as_ellipsoid() const {
  if (degenerate()) fail_domain("degenerate section has no ellipsoid form");
  return Ellipsoid(center, semi_axes, rotation);
}

Section ellipsoid_section(const Ellipsoid& E, double t) {
  const int n = E.dim();
  const int m = n - 1;
  if (m < 1) fail_domain("cannot slice a one-dimensional ellipsoid");
  Matrix M = E.rotation * E.semi_axes.cwiseInverse().cwiseAbs2().asDiagonal() * E.rotation.transpose();
  const Matrix Mp = M.topLeftCorner(m, m);
  const Point mv = M.col(m).head(m);
  const double delta = t - E.center(m);
  Eigen::LDLT<Matrix> solver(Mp);
  const Point w = solver.solve(mv);
  const double rho2 = 1.0 - delta * delta * (M(m, m) - mv.dot(w));
  Section s;
  if (rho2 < 0.0) return s;
  s.empty = false;
  s.center = E.center.head(m) - delta * w;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Mp);
  s.rotation = es.eigenvectors();
  s.semi_axes = Point(m);
  const double rho = std::sqrt(rho2);
  for (int i = 0; i < m; ++i) s.semi_axes(i) = rho / std::sqrt(es.eigenvalues()(i));
  return s;
}

Section paraboloid_section(const Paraboloid& P, double t) {
  Section s;
  const double height = t + P.sigma;
  if (height < 0.0) return s;
  s.empty = false;
  s.center = -P.tau;
  s.rotation = P.base.rotation;
  s.semi_axes = P.base.semi_axes * std::sqrt(P.gamma * height);
  return s;
}

Section body_section(const ConvexBody& B, double t) {
  if (const auto* e = std::get_if<Ellipsoid>(&B)) return ellipsoid_section(*e, t);
  if (const auto* p = std::get_if<Paraboloid>(&B)) return paraboloid_section(*p, t);
  throw DomainError("body_section supports ellipsoids and paraboloids; use geometry module mask sections");
}

}  // namespace olab

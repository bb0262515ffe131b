#include "olab/acf.hpp"

#include <algorithm>
#include <cmath>

#include "olab/error.hpp"

namespace olab::acf {

namespace {

constexpr int kSub = 8;
constexpr int kShells = 14;

double sign_of(Sign s) { return s == Sign::Plus ? 1.0 : -1.0; }

Point central_gradient(const ScalarField& v, std::size_t i) {
  const Grid& g = v.grid();
  Point d(g.dim());
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t st = g.stride(a);
    d(a) = (v[i + st] - v[i - st]) / (2.0 * g.h()(a));
  }
  return d;
}

/// Some node of the axis stencil at i carries the sign s.
bool stencil_has_sign(const ScalarField& v, std::size_t i, double s) {
  if (s * v[i] > 0.0) return true;
  const Grid& g = v.grid();
  for (int a = 0; a < g.dim(); ++a)
    if (s * v[i + g.stride(a)] > 0.0 || s * v[i - g.stride(a)] > 0.0) return true;
  return false;
}

void require_ball(const Grid& g, const Point& c, double R, const char* what) {
  if (c.size() != g.dim()) fail_domain(std::string(what) + ": centre dimension mismatch");
  for (int a = 0; a < g.dim(); ++a)
    if (c(a) - R - 2.0 * g.h()(a) < g.lower()(a) - 1e-12 || c(a) + R + 2.0 * g.h()(a) > g.upper()(a) + 1e-12)
      fail_domain(std::string(what) + ": ball exits the grid box");
}

/// Calls f(offset from the cell centre, weight) on the k^N midpoints of the cell with half-widths hw.
template <class F>
void subsample(int N, const Point& hw, int k, F&& f) {
  int idx[kMaxDim] = {0, 0, 0, 0};
  double w = 1.0;
  for (int a = 0; a < N; ++a) w *= 2.0 * hw(a) / k;
  while (true) {
    Point off(N);
    for (int a = 0; a < N; ++a) off(a) = -hw(a) + (idx[a] + 0.5) * 2.0 * hw(a) / k;
    f(off, idx, w);
    int a = 0;
    while (a < N && ++idx[a] == k) idx[a++] = 0;
    if (a == N) break;
  }
}

/// ∫ over the cell (centre x, half-widths hw) ∩ B_r(c) ∩ {s·model > 0} of |y-c|^{2-N}.
double cell_weight(const Point& x, const Point& hw, const Point& c, double r, double vi, const Point& gi, double s,
                   int k) {
  const int N = static_cast<int>(x.size());
  double sum = 0.0;
  subsample(N, hw, k, [&](const Point& off, const int*, double w) {
    const Point y = x + off;
    const double d = (y - c).norm();
    if (d > r || d == 0.0) return;
    if (s * (vi + gi.dot(off)) <= 0.0) return;
    sum += w * std::pow(d, 2 - N);
  });
  return sum;
}

/// Same for the cell centred at c: dyadic shells cube_ℓ ∖ cube_{ℓ+1}.
double centre_cell_weight(const Point& hw0, double r, double vi, const Point& gi, double s) {
  const int N = static_cast<int>(hw0.size());
  double sum = 0.0;
  Point hw = hw0;
  for (int level = 0; level < kShells; ++level) {
    subsample(N, hw, kSub, [&](const Point& off, const int* idx, double w) {
      bool inner = true;
      for (int a = 0; a < N; ++a) inner = inner && idx[a] >= kSub / 4 && idx[a] < 3 * kSub / 4;
      if (inner) return;
      const double d = off.norm();
      if (d > r) return;
      if (s * (vi + gi.dot(off)) <= 0.0) return;
      sum += w * std::pow(d, 2 - N);
    });
    hw *= 0.5;
  }
  return sum;
}

}  // namespace

double weighted_dirichlet(const ScalarField& v, double r, Sign sign, const Point& c) {
  const Grid& g = v.grid();
  const int N = g.dim();
  if (N < 3) fail_domain("the ACF weight needs N >= 3");
  if (!(r >= 4.0 * g.h_max())) fail_domain("ACF radius must be at least 4 grid spacings");
  require_ball(g, c, r, "weighted_dirichlet");
  const double s = sign_of(sign);
  const Point hw = 0.5 * g.h();
  const double half_diag = hw.norm();
  const double cell = g.cell_volume();
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.size(); ++i)
    if ((g.coord(i) - c).norm() <= r + half_diag) nodes.push_back(i);
  std::vector<double> contrib(nodes.size(), 0.0);
  parallel_for(nodes.size(), [&](std::size_t k) {
    const std::size_t i = nodes[k];
    const Point x = g.coord(i);
    const double vi = v[i];
    const Point gi = central_gradient(v, i);
    const double g2 = gi.squaredNorm();
    if (g2 == 0.0 || !stencil_has_sign(v, i, s)) return;
    const Point rel = x - c;
    const double dist = rel.norm();
    bool centre = true;
    for (int a = 0; a < N; ++a) centre = centre && std::abs(rel(a)) < 1e-9 * g.h()(a);
    double w;
    if (centre) {
      w = centre_cell_weight(hw, r, vi, gi, s);
    } else {
      const bool cut_sphere = std::abs(dist - r) <= half_diag;
      const bool cut_sign = std::abs(vi) <= gi.cwiseAbs().dot(hw);
      const bool near_centre = dist <= 6.0 * g.h_max();
      if (cut_sphere || cut_sign || near_centre) {
        w = cell_weight(x, hw, c, r, vi, gi, s, near_centre ? 2 * kSub : kSub);
      } else {
        w = (dist <= r && s * vi > 0.0) ? cell * std::pow(dist, 2 - N) : 0.0;
      }
    }
    contrib[k] = g2 * w;
  });
  return pairwise_sum(contrib.data(), contrib.size());
}

double weighted_dirichlet(const ScalarField& v, double r, Sign sign) {
  return weighted_dirichlet(v, r, sign, Point::Zero(v.grid().dim()));
}

double phi(const ScalarField& v, double r, const Point& c) {
  const double ip = weighted_dirichlet(v, r, Sign::Plus, c);
  const double im = weighted_dirichlet(v, r, Sign::Minus, c);
  return ip * im / std::pow(r, 4);
}

double phi(const ScalarField& v, double r) { return phi(v, r, Point::Zero(v.grid().dim())); }

ACFProfile phi_profile(const ScalarField& v, const std::vector<double>& radii, const Point& c) {
  ACFProfile p;
  for (std::size_t j = 0; j < radii.size(); ++j)
    if (j > 0 && !(radii[j] > radii[j - 1])) fail_domain("ACF radii must be strictly increasing");
  for (double r : radii) {
    const double ip = weighted_dirichlet(v, r, Sign::Plus, c);
    const double im = weighted_dirichlet(v, r, Sign::Minus, c);
    p.radii.push_back(r);
    p.i_plus.push_back(ip);
    p.i_minus.push_back(im);
    p.phi.push_back(ip * im / std::pow(r, 4));
    double viol = 0.0;
    const std::size_t j = p.phi.size() - 1;
    if (j > 0 && p.phi[j - 1] > 0.0) viol = std::max(0.0, (p.phi[j - 1] - p.phi[j]) / p.phi[j - 1]);
    p.violation.push_back(viol);
    p.verdict = std::max(p.verdict, viol);
  }
  return p;
}

ACFProfile phi_profile(const ScalarField& v, const std::vector<double>& radii) {
  return phi_profile(v, radii, Point::Zero(v.grid().dim()));
}

double subharmonicity_check(const ScalarField& v, Part part) {
  const Grid& g = v.grid();
  std::vector<double> w(v.values());
  for (double& x : w) {
    switch (part) {
      case Part::Plus: x = std::max(x, 0.0); break;
      case Part::Minus: x = std::max(-x, 0.0); break;
      case Part::Abs: x = std::abs(x); break;
      case Part::Raw: break;
    }
  }
  std::array<double, kMaxDim> ih2{};
  double diag = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    ih2[a] = 1.0 / (g.h()(a) * g.h()(a));
    diag += 2.0 * ih2[a];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_boundary(i)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) s += (w[i + g.stride(a)] + w[i - g.stride(a)]) * ih2[a];
    worst = std::max(worst, w[i] - s / diag);
  }
  return worst;
}

double caccioppoli_ratio(const ScalarField& v, double r, const Point& c) {
  const Grid& g = v.grid();
  if (!(r >= 2.0 * g.h_max())) fail_domain("Caccioppoli radius must be at least 2 grid spacings");
  require_ball(g, c, 2.0 * r, "caccioppoli_ratio");
  std::vector<double> grad2, val2;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = (g.coord(i) - c).norm();
    if (d <= r) grad2.push_back(central_gradient(v, i).squaredNorm());
    if (d <= 2.0 * r) val2.push_back(v[i] * v[i]);
  }
  const double mg = pairwise_sum(grad2.data(), grad2.size()) / grad2.size();
  const double mv = pairwise_sum(val2.data(), val2.size()) / val2.size();
  if (mv == 0.0) fail_domain("Caccioppoli ratio undefined: v vanishes on B_2r");
  return r * r * mg / mv;
}

double caccioppoli_ratio(const ScalarField& v, double r) {
  return caccioppoli_ratio(v, r, Point::Zero(v.grid().dim()));
}

std::string to_string(Dichotomy d) {
  switch (d) {
    case Dichotomy::SignedPlus: return "signed+";
    case Dichotomy::SignedMinus: return "signed-";
    case Dichotomy::Linear: return "linear";
    case Dichotomy::Mixed: return "mixed";
  }
  return "mixed";
}

DichotomyResult dichotomy_classify(const ScalarField& w, double tol, double zero_floor) {
  const Grid& g = w.grid();
  const int N = g.dim();
  if (!(tol > 0.0 && tol < 1.0)) fail_domain("dichotomy tolerance must lie in (0, 1)");
  double R = 1.0;
  for (int a = 0; a < N; ++a) R = std::min({R, -g.lower()(a), g.upper()(a)});
  if (!(R > 0.0)) fail_domain("dichotomy needs the origin strictly inside the box");
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.coord(i).norm() <= R) nodes.push_back(i);
  if (nodes.size() < static_cast<std::size_t>(2 * N)) fail_domain("dichotomy ball contains too few nodes");
  DichotomyResult res;
  res.b = Point::Zero(N);
  Matrix A = Matrix::Zero(N, N);
  Point rhs = Point::Zero(N);
  double wmax = 0.0;
  for (std::size_t i : nodes) {
    const Point x = g.coord(i);
    A += x * x.transpose();
    rhs += w[i] * x;
    wmax = std::max(wmax, std::abs(w[i]));
  }
  if (wmax <= zero_floor) {
    res.verdict = Dichotomy::Linear;
    return res;
  }
  res.b = A.ldlt().solve(rhs);
  std::vector<double> r1, plus, minus, total;
  for (std::size_t i : nodes) {
    const double v = w[i];
    r1.push_back(std::abs(v - res.b.dot(g.coord(i))));
    plus.push_back(std::max(v, 0.0));
    minus.push_back(std::max(-v, 0.0));
    total.push_back(std::abs(v));
  }
  const double n1 = pairwise_sum(total.data(), total.size());
  const double np = pairwise_sum(plus.data(), plus.size());
  const double nm = pairwise_sum(minus.data(), minus.size());
  res.linear_residual = pairwise_sum(r1.data(), r1.size()) / n1;
  res.minority = std::min(np, nm) / n1;
  if (res.linear_residual <= tol) res.verdict = Dichotomy::Linear;
  else if (res.minority <= tol) res.verdict = np >= nm ? Dichotomy::SignedPlus : Dichotomy::SignedMinus;
  else res.verdict = Dichotomy::Mixed;
  return res;
}

}  // namespace olab::acf

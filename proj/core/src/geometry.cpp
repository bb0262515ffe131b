#include "olab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "olab/error.hpp"

namespace olab::geom {

namespace {

/// Deterministic near-uniform unit directions in R^n.
std::vector<Point> directions(int n, int count) {
  std::vector<Point> out;
  if (n == 1) return {make_point({1.0}), make_point({-1.0})};
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      out.push_back(make_point({std::cos(a), std::sin(a)}));
    }
    return out;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back(make_point({r * std::cos(golden * k), r * std::sin(golden * k), z}));
    }
    return out;
  }
  std::mt19937_64 rng(0x6f6c6162);
  std::normal_distribution<double> nd;
  for (int k = 0; k < count; ++k) {
    Point d(n);
    for (int a = 0; a < n; ++a) d(a) = nd(rng);
    out.push_back(d.normalized());
  }
  for (int a = 0; a < n; ++a) {
    out.push_back(unit_vector(n, a));
    out.push_back(-unit_vector(n, a));
  }
  return out;
}

int direction_count(int n) { return n <= 2 ? 720 : (n == 3 ? 2000 : 6000); }

double hull_defect_of(const Grid& g, const std::vector<std::uint8_t>& in) {
  const int N = g.dim();
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (in[i]) members.push_back(i);
  if (members.empty()) return 0.0;
  const auto dirs = directions(N, direction_count(N));
  std::vector<double> support(dirs.size(), -std::numeric_limits<double>::infinity());
  parallel_for(dirs.size(), [&](std::size_t k) {
    double s = support[k];
    for (std::size_t i : members) s = std::max(s, dirs[k].dot(g.coord(i)));
    support[k] = s;
  });
  const double slack = 1e-9 * g.h_max();
  std::vector<std::uint8_t> hull(g.size(), 0);
  parallel_for(g.size(), [&](std::size_t i) {
    const Point x = g.coord(i);
    for (std::size_t k = 0; k < dirs.size(); ++k)
      if (dirs[k].dot(x) > support[k] + slack) return;
    hull[i] = 1;
  });
  std::size_t total = 0, outside = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!hull[i]) continue;
    ++total;
    if (!in[i]) ++outside;
  }
  return total ? static_cast<double>(outside) / total : 0.0;
}

/// Index of the node layer along the last axis nearest to t.
int layer_of(const Grid& g, double t) {
  const int N = g.dim();
  const double k = (t - g.lower()(N - 1)) / g.h()(N - 1);
  const int j = static_cast<int>(std::lround(k));
  if (j < 0 || j >= g.nodes(N - 1)) fail_domain("section height outside the grid range");
  return j;
}

struct LayerStats {
  double measure = 0.0;
  double perimeter = 0.0;
  double diameter = 0.0;
};

LayerStats mask_layer(const Mask& m, int layer) {
  const Grid& g = m.grid;
  const int N = g.dim();
  const int n = N - 1;
  LayerStats st;
  double face = 1.0;
  for (int a = 0; a < n; ++a) face *= g.h()(a);
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.inside[i]) continue;
    const MultiIndex mi = g.multi_index(i);
    if (mi[N - 1] != layer) continue;
    nodes.push_back(i);
    for (int a = 0; a < n; ++a) {
      const double w = face / g.h()(a);
      for (int s : {-1, 1}) {
        const int k = mi[a] + s;
        if (k < 0 || k >= g.nodes(a) || !m.inside[s > 0 ? i + g.stride(a) : i - g.stride(a)]) st.perimeter += w;
      }
    }
  }
  st.measure = face * static_cast<double>(nodes.size());
  if (nodes.size() > 1) {
    for (const Point& d : directions(n, direction_count(n))) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i : nodes) {
        const double s = d.dot(g.coord(i).head(n));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      st.diameter = std::max(st.diameter, hi - lo);
    }
  }
  return st;
}

/// Surface measure of an ellipsoid with the given semi-axes (n = 1, 2, 3).
double ellipsoid_boundary(const Point& a) {
  const int n = static_cast<int>(a.size());
  if (n == 1) return 2.0;
  if (n == 2) {
    const double h = std::pow((a(0) - a(1)) / (a(0) + a(1)), 2);
    return std::numbers::pi * (a(0) + a(1)) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
  }
  const double p = 1.6075;
  const double s = std::pow(a(0) * a(1), p) + std::pow(a(0) * a(2), p) + std::pow(a(1) * a(2), p);
  return 4.0 * std::numbers::pi * std::pow(s / 3.0, 1.0 / p);
}

}  // namespace

double hull_defect(const Mask& m) { return hull_defect_of(m.grid, m.inside); }

CoincidenceMask coincidence_mask(const ScalarField& u, std::optional<double> threshold) {
  const Grid& g = u.grid();
  const double thr = threshold.value_or(g.h_max() * g.h_max());
  std::vector<std::uint8_t> in(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) in[i] = u[i] < thr ? 1 : 0;
  const double defect = hull_defect_of(g, in);
  return {Mask(g, std::move(in)), defect};
}

std::size_t mask_mismatch(const Mask& m, const ConvexBody& body, double band) {
  const Grid& g = m.grid;
  const int N = g.dim();
  std::vector<Point> probes;
  for (int code = 0; code < static_cast<int>(std::pow(3, N)); ++code) {
    Point d(N);
    for (int a = 0, c = code; a < N; ++a, c /= 3) d(a) = (c % 3) - 1.0;
    if (d.norm() > 0.0) probes.push_back(band * d.normalized());
  }
  std::size_t bad = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.coord(i);
    const bool b = body_contains(body, x);
    if (b == static_cast<bool>(m.inside[i])) continue;
    bool interior = true;
    for (const Point& d : probes)
      if (body_contains(body, x + d) != b) {
        interior = false;
        break;
      }
    if (interior) ++bad;
  }
  return bad;
}

double SectionProfile::growth_monitor() const {
  double m = 0.0;
  for (double v : growth) m = std::max(m, v);
  return m;
}

double SectionProfile::max_sqrtH_violation() const {
  double m = 0.0;
  for (double v : sqrtH_violation) m = std::max(m, v);
  return m;
}

SectionProfile section_profile(const ConvexBody& C, const std::vector<double>& heights) {
  SectionProfile p;
  for (std::size_t j = 1; j < heights.size(); ++j)
    if (!(heights[j] > heights[j - 1])) fail_domain("section heights must be strictly increasing");
  const Mask* mask = std::get_if<Mask>(&C);
  if (mask) p.h = mask->grid.h_max();
  for (double t : heights) {
    double H = 0.0, d = 0.0, per = 0.0;
    if (mask) {
      const LayerStats st = mask_layer(*mask, layer_of(mask->grid, t));
      H = st.measure;
      d = st.diameter;
      per = st.perimeter;
    } else {
      const Section s = body_section(C, t);
      if (!s.empty) {
        H = s.measure();
        d = 2.0 * s.max_axis();
        per = s.degenerate() ? 0.0 : ellipsoid_boundary(s.semi_axes);
      }
    }
    p.t.push_back(t);
    p.H.push_back(H);
    p.diam.push_back(d);
    p.perimeter.push_back(per);
    p.growth.push_back(H / (1.0 + std::abs(t)));
  }
  const std::size_t n = p.t.size();
  p.sqrtH_violation.assign(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double lam = (p.t[j + 1] - p.t[j]) / (p.t[j + 1] - p.t[j - 1]);
    const double chord = lam * std::sqrt(p.H[j - 1]) + (1.0 - lam) * std::sqrt(p.H[j + 1]);
    const double mid = std::sqrt(p.H[j]);
    if (chord > mid) p.sqrtH_violation[j] = mid > 0.0 ? (chord - mid) / mid : 1.0;
  }
  return p;
}

ChordCheck chord_check(const SectionProfile& p) {
  ChordCheck c;
  const std::size_t n = p.t.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double lam = (p.t[k] - p.t[j]) / (p.t[k] - p.t[i]);
        const double chord = lam * std::sqrt(p.H[i]) + (1.0 - lam) * std::sqrt(p.H[k]);
        const double slack = p.h > 0.0 ? 3.0 * p.h * p.perimeter[j] : 1e-12 * std::max(1.0, p.H[j]);
        const double excess = chord * chord - p.H[j] - slack;
        c.worst_excess = std::max(c.worst_excess, excess);
        ++c.triples;
      }
  c.holds = c.worst_excess <= 0.0;
  return c;
}

std::vector<double> diameter_ratio(const SectionProfile& p) {
  std::vector<double> r;
  for (std::size_t j = 0; j < p.t.size(); ++j)
    r.push_back(p.H[j] > 0.0 ? p.diam[j] * p.diam[j] / p.H[j] : std::numeric_limits<double>::quiet_NaN());
  return r;
}

double detachment_band(double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) fail_domain("detachment_band: threshold must be nonnegative");
  return std::sqrt(2.0 * threshold);
}

ParaboloidFit paraboloid_fit(const Mask& C, double plateau, double band) {
  const Grid& g = C.grid;
  const int N = g.dim();
  const int n = N - 1;
  ParaboloidFit fit;
  if (C.count() == 0) fail_domain("paraboloid_fit needs a nonempty mask");
  if (!(band >= 0.0) || !std::isfinite(band)) fail_domain("paraboloid_fit: band must be finite and nonnegative");
  auto lateral_sq = [&](const Point& x) {
    const double r = std::max(0.0, x.head(n).norm() - band);
    return r * r;
  };
  for (int a = 0; a < n; ++a)
    if (g.lower()(a) > 0.0 || g.upper()(a) < 0.0) {
      fit.failure = "the x_N axis is outside the grid box";
      return fit;
    }
  const double hN = g.h()(N - 1);
  const int top = g.nodes(N - 1) - 1;
  const int zero_layer = static_cast<int>(std::ceil(-g.lower()(N - 1) / hN - 1e-9));
  if (zero_layer < 0 || zero_layer >= top) {
    fit.failure = "no positive heights inside the grid box";
    return fit;
  }
  Point axis = Point::Zero(N);
  fit.ray_contained = true;
  int cut_layer = top + 1;
  std::vector<double> layer_q(g.nodes(N - 1), 0.0);
  std::vector<std::uint8_t> layer_has(g.nodes(N - 1), 0);
  for (int L = zero_layer; L <= top; ++L) {
    axis(N - 1) = g.lower()(N - 1) + L * hN;
    const auto k = g.nearest(axis);
    if (!k || !C.inside[*k]) fit.ray_contained = false;
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!C.inside[i]) continue;
    const MultiIndex mi = g.multi_index(i);
    const int L = mi[N - 1];
    bool lateral = false;
    for (int a = 0; a < n; ++a) lateral = lateral || mi[a] == 0 || mi[a] == g.nodes(a) - 1;
    if (lateral) cut_layer = std::min(cut_layer, L);
    const Point x = g.coord(i);
    if (x(N - 1) <= 0.0) continue;
    layer_q[L] = std::max(layer_q[L], lateral_sq(x) / x(N - 1));
    layer_has[L] = 1;
  }
  if (!fit.ray_contained) {
    fit.failure = "the ray {t e_N : t >= 0} is not contained in the mask";
    return fit;
  }
  const int first = zero_layer + (g.lower()(N - 1) + zero_layer * hN <= 1e-12 * hN ? 1 : 0);
  if (cut_layer - first < 4) {
    fit.failure = "the mask reaches the lateral box faces too low to fit a paraboloid";
    return fit;
  }
  auto gamma_above = [&](int from) {
    double q = 0.0;
    for (int L = from; L < cut_layer; ++L)
      if (layer_has[L]) q = std::max(q, layer_q[L]);
    return q;
  };
  auto grid_value = [](double q) {
    if (q <= 0.0) return std::pow(2.0, -40.0);
    const double k = std::floor(16.0 * std::log2(q)) + 1.0;
    return std::pow(2.0, k / 16.0);
  };
  const int ref = first + (cut_layer - first) / 2;
  const double g_ref = grid_value(gamma_above(ref));
  int chosen = ref;
  for (int L = first; L <= ref; ++L)
    if (grid_value(gamma_above(L)) <= plateau * g_ref) {
      chosen = L;
      break;
    }
  fit.a0 = g.lower()(N - 1) + chosen * hN - 0.5 * hN;
  fit.gamma0 = grid_value(gamma_above(chosen));
  std::size_t above = 0, covered = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!C.inside[i]) continue;
    const Point x = g.coord(i);
    if (x(N - 1) <= fit.a0) continue;
    ++above;
    if (lateral_sq(x) < fit.gamma0 * x(N - 1)) ++covered;
  }
  fit.covered_fraction = above ? static_cast<double>(covered) / above : 0.0;
  fit.ok = above > 0;
  if (!fit.ok) fit.failure = "no mask nodes above the cutoff height";
  return fit;
}

}  // namespace olab::geom

#include "olab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include <json.hpp>

#include "olab/acf.hpp"
#include "olab/error.hpp"
#include "olab/geometry.hpp"
#include "olab/matching.hpp"
#include "olab/potential.hpp"
#include "olab/solver.hpp"

namespace olab::exp {

namespace {

using nlohmann::ordered_json;
using cfg::ExperimentConfig;
using Fn = std::function<double(const Point&)>;

ordered_json point_json(const Point& p) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

/// JSON cannot carry nan/inf; they become null.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json header(const ExperimentConfig& c, const char* command) {
  ordered_json j;
  j["schema"] = std::string(io::kSchemaLine).substr(2);
  j["command"] = command;
  j["experiment"] = c.experiment;
  j["dim"] = c.dim;
  return j;
}

Ellipsoid base_of(const ExperimentConfig& c) { return match::solve_matching_ellipsoid(c.blowdown(), 1e-12).E; }

Point point_or_zero(const std::vector<double>& v, int n) {
  Point p = zero_point(n);
  for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<int>(i)) = v[i];
  return p;
}

Fn paraboloid_fn(const Ellipsoid& base, double gamma, const Point& tau, double sigma) {
  const pot::ParaboloidSolution s(base, gamma, tau, sigma);
  return [s](const Point& x) { return s(x); };
}

Fn target_fn(const ExperimentConfig& c) {
  if (c.target_kind == "halfspace") {
    const int N = c.dim;
    return [N](const Point& x) {
      const double t = std::min(x(N - 1), 0.0);
      return 0.5 * t * t;
    };
  }
  return paraboloid_fn(base_of(c), c.gamma, c.tau_point(), c.sigma);
}

solver::SolverOptions solver_options(const ExperimentConfig& c) {
  solver::SolverOptions o;
  o.tol = c.solver_tol;
  o.omega = c.solver_omega;
  return o;
}

ScalarField field_of(const ExperimentConfig& c, const Grid& g, const Fn& f, const std::string& source) {
  if (source == "analytic") return ScalarField::sample(g, f);
  const auto res = solver::solve(solver::boundary_from_solution(f, g), solver_options(c));
  if (!res.converged)
    throw NumericalError("PSOR did not reach solver.tol", res.complementarity, res.complementarity - c.solver_tol);
  return res.solution;
}

ScalarField with_bump(const ExperimentConfig& c, const ScalarField& u) {
  if (c.target_bump == 0.0) return u;
  const Grid& g = u.grid();
  const Point mid = 0.5 * (g.lower() + g.upper());
  const double w = 4.0 * g.h_max();
  const double amp = c.target_bump * c.tol;
  return u + ScalarField::sample(g, [&](const Point& x) { return amp * std::exp(-(x - mid).squaredNorm() / (2 * w * w)); });
}

double fitted_exponent(const std::vector<double>& R, const std::vector<double>& m) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < R.size(); ++i)
    if (m[i] > 0.0) {
      x.push_back(std::log(R[i]));
      y.push_back(std::log(m[i]));
    }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::vector<std::string> coordinate_columns(int N) {
  std::vector<std::string> cols;
  for (int a = 0; a < N; ++a) cols.push_back("x" + std::to_string(a));
  return cols;
}

/// Four radii from max(4h, 0.4 r_max) to r_max, r_max = min(box/4, distance from the origin to the faces - 2h).
std::vector<double> default_radii(const ExperimentConfig& c, const Grid& g) {
  if (!c.radii.empty()) return c.radii;
  const double h = g.h_max();
  double r_max = std::numeric_limits<double>::infinity();
  for (int a = 0; a < g.dim(); ++a) {
    r_max = std::min(r_max, 0.25 * (g.upper()(a) - g.lower()(a)));
    r_max = std::min(r_max, std::min(-g.lower()(a), g.upper()(a)) - 2.0 * h);
  }
  const double r_min = std::max(4.0 * h, 0.4 * r_max);
  if (!(r_min < r_max)) throw ConfigError("grid too coarse for default ACF radii around the origin; set radii");
  std::vector<double> r;
  for (int k = 0; k < 4; ++k) r.push_back(r_min + (r_max - r_min) * k / 3.0);
  return r;
}

ConvexBody scaled_body(const ConvexBody& M, double s) {
  if (const auto* e = std::get_if<Ellipsoid>(&M)) return e->scaled(s);
  const auto& p = std::get<Paraboloid>(M);
  return Paraboloid::centred(p.base, s * p.gamma);
}

/// Membership of M is constant along ±h, ±2h on every axis.
bool away_from_boundary(const ConvexBody& M, const Point& x, double h) {
  const bool in = body_contains(M, x);
  for (int a = 0; a < x.size(); ++a)
    for (double s : {-2.0 * h, -h, h, 2.0 * h}) {
      Point y = x;
      y(a) += s;
      if (body_contains(M, y) != in) return false;
    }
  return true;
}

ordered_json residuals_json(const solver::Residuals& r) {
  ordered_json j;
  j["pde"] = r.pde;
  j["positivity"] = r.positivity;
  j["complementarity"] = r.complementarity;
  return j;
}

ordered_json slide_json(const match::SlideResult& s) {
  ordered_json j;
  j["sigma_bar"] = s.sigma_bar;
  j["bracket"] = {s.lo, s.hi};
  j["lo_verdict"] = match::to_string(s.lo_verdict);
  j["hi_verdict"] = match::to_string(s.hi_verdict);
  j["sup_difference"] = s.sup_difference;
  j["positive_excess"] = s.positive_excess;
  j["contact"] = s.contact;
  j["voided"] = s.voided;
  j["evaluations"] = s.evaluations;
  return j;
}

/// The σ-family of the configured (or matched) paraboloid solution on g.
match::Family sigma_family(const ExperimentConfig& c, const Grid& g, const Ellipsoid& base, double gamma,
                           const Point& tau) {
  return [&c, g, base, gamma, tau](double s) { return field_of(c, g, paraboloid_fn(base, gamma, tau, s), c.slide_family); };
}

/// Brackets [lo, hi] in both directions, doubling the width up to 8 times.
std::pair<double, double> bracket_sigma(const ScalarField& u, const match::Family& fam, double lo, double hi,
                                        double tol) {
  for (int k = 0; k < 8; ++k) {
    const bool lo_ok = match::ordering_test(fam(lo), u, tol, 2).verdict == match::Ordering::Above;
    const auto hv = match::ordering_test(fam(hi), u, tol, 2).verdict;
    const bool hi_ok = hv == match::Ordering::Below || hv == match::Ordering::Equal;
    if (lo_ok && hi_ok) return {lo, hi};
    const double w = hi - lo;
    if (!lo_ok) lo -= w;
    if (!hi_ok) hi += w;
  }
  throw NumericalError("no σ bracket with opposite ordering verdicts", lo, hi - lo);
}

}  // namespace

// ------------------------------------------------------------------ potential

Report run_potential(const ExperimentConfig& c) {
  const int N = c.dim;
  const auto spec = c.quadrature();
  const ConvexBody body = [&]() -> ConvexBody {
    if (c.body == "ball") return Ellipsoid::ball(zero_point(N), c.radius);
    if (c.body == "ellipsoid") return Ellipsoid::axis_aligned(zero_point(N), point_or_zero(c.axes, N));
    return Paraboloid::centred(base_of(c), c.gamma);
  }();
  const Grid g = c.grid();
  Report rep;
  ordered_json summary = header(c, "potential");
  summary["body"] = c.body;

  std::mt19937_64 rng(c.seed);
  std::vector<Point> pts;
  for (int k = 0; k < c.samples; ++k) {
    Point x(N);
    for (int a = 0; a < N; ++a) x(a) = std::uniform_real_distribution<double>(g.lower()(a), g.upper()(a))(rng);
    pts.push_back(x);
  }
  const bool ball = c.body == "ball";
  auto ball_reference = [&](const Point& x) {
    const double r = x.norm(), R = c.radius;
    if (r <= R) return -r * r / (2.0 * N);
    return std::pow(R, N) * std::pow(r, 2 - N) / (N * (N - 2.0)) - R * R / (2.0 * (N - 2.0));
  };
  io::Table samples;
  samples.columns = coordinate_columns(N);
  for (const char* col : {"V", "error", "tail_bound"}) samples.columns.push_back(col);
  if (ball) {
    samples.columns.push_back("reference");
    samples.columns.push_back("abs_error");
  }
  double worst_ref = 0.0;
  for (const Point& x : pts) {
    const auto v = pot::potential(body, x, spec);
    std::vector<double> row(x.data(), x.data() + N);
    row.push_back(v.value);
    row.push_back(v.error);
    row.push_back(v.tail.bound);
    if (ball) {
      const double ref = ball_reference(x);
      row.push_back(ref);
      row.push_back(std::abs(v.value - ref));
      worst_ref = std::max(worst_ref, std::abs(v.value - ref));
    }
    samples.add(row);
  }
  rep.files.add("potential.csv", io::to_csv(samples));
  if (ball) summary["max_reference_error"] = worst_ref;

  io::Table scaling;
  scaling.columns = {"lambda"};
  for (const auto& col : coordinate_columns(N)) scaling.columns.push_back(col);
  for (const char* col : {"lhs", "rhs", "rel_defect", "error_budget"}) scaling.columns.push_back(col);
  double worst_scaling = 0.0;
  for (double lam : {0.5, 2.0}) {
    const ConvexBody big = scaled_body(body, lam);
    for (std::size_t k = 0; k < std::min<std::size_t>(pts.size(), 10); ++k) {
      const auto l = pot::potential(big, lam * pts[k], spec);
      const auto r = pot::potential(body, pts[k], spec);
      const double rhs = lam * lam * r.value;
      const double rel = std::abs(l.value - rhs) / std::max(std::abs(rhs), std::numeric_limits<double>::min());
      worst_scaling = std::max(worst_scaling, rel);
      std::vector<double> row{lam};
      row.insert(row.end(), pts[k].data(), pts[k].data() + N);
      row.insert(row.end(), {l.value, rhs, rel, l.error + lam * lam * r.error});
      scaling.add(row);
    }
  }
  rep.files.add("scaling.csv", io::to_csv(scaling));
  summary["max_scaling_defect"] = worst_scaling;

  Fn V;
  if (const auto* p = std::get_if<Paraboloid>(&body)) {
    const Ellipsoid base = p->base;
    const double gam = p->gamma;
    V = [base, gam](const Point& x) { return pot::potential_confocal(base, gam, x); };
  } else {
    const Ellipsoid E = std::get<Ellipsoid>(body);
    const pot::InteriorQuadratic iq = pot::ellipsoid_interior(E);
    V = [E, iq](const Point& x) { return pot::ellipsoid_solution_confocal(E, 1.0, x) - iq.quadratic(x); };
  }
  const ScalarField Vg = ScalarField::sample(g, V);
  const MaskedField L = discrete_laplacian(Vg);
  const double h = g.h_max();
  const double bound = 10.0 * (h * h + c.quad_tol);
  const int layers = g.nodes(N - 1);
  std::vector<double> layer_max(layers, 0.0);
  std::vector<double> layer_count(layers, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!L.valid[i]) continue;
    const Point x = g.coord(i);
    if (!away_from_boundary(body, x, h)) continue;
    const int k = g.multi_index(i)[N - 1];
    layer_max[k] = std::max(layer_max[k], std::abs(L.values[i] + (body_contains(body, x) ? 1.0 : 0.0)));
    layer_count[k] += 1.0;
  }
  io::Table pde;
  pde.columns = {"x_last", "nodes", "max_abs_residual", "bound"};
  double worst_pde = 0.0;
  for (int k = 0; k < layers; ++k) {
    if (layer_count[k] == 0.0) continue;
    pde.add({g.lower()(N - 1) + k * g.h()(N - 1), layer_count[k], layer_max[k], bound});
    worst_pde = std::max(worst_pde, layer_max[k]);
  }
  rep.files.add("pde_residual.csv", io::to_csv(pde));
  summary["max_pde_residual"] = worst_pde;
  summary["pde_bound"] = bound;

  if (N == 3 && std::holds_alternative<Paraboloid>(body)) {
    const auto& P = std::get<Paraboloid>(body);
    const std::vector<double> Rs = c.R_values.empty() ? std::vector<double>{8.0, 32.0, 128.0} : c.R_values;
    io::Table bmo;
    bmo.columns = {"R", "mean_abs_defect", "defect_over_R"};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double R : Rs) {
      const AffineFunction A = pot::affine_corrector_AR(P, R, spec);
      const double m = quad::ball_mean([&](const Point& x) { return std::abs(V(x) - A(x)); }, zero_point(3), R);
      bmo.add({R, m, m / R});
      lo = std::min(lo, m / R);
      hi = std::max(hi, m / R);
    }
    rep.files.add("bmo.csv", io::to_csv(bmo));
    summary["bmo_spread"] = number(hi / lo);
  }
  rep.files.add("potential.json", dump(summary));
  rep.summary.push_back("max ΔV + χ residual " + io::format_number(worst_pde) + " (bound " + io::format_number(bound) + ")");
  if (ball) rep.summary.push_back("max |V - ball reference| " + io::format_number(worst_ref));
  rep.summary.push_back("max scaling defect " + io::format_number(worst_scaling));
  return rep;
}

// ------------------------------------------------------------------ growth

Report run_growth(const ExperimentConfig& c) {
  const int N = c.dim;
  const auto spec = c.quadrature();
  const Ellipsoid base = base_of(c);
  std::vector<double> Rs = c.R_values;
  if (Rs.empty())
    for (int k = 0; k <= 4; ++k) Rs.push_back(10.0 * std::pow(10.0, k / 4.0));
  Report rep;
  ordered_json summary = header(c, "growth");
  summary["gamma"] = c.gamma;
  io::Table t;
  t.columns = {"R", "mean_abs_defect", "defect_over_R"};
  std::vector<double> means;
  if (c.gamma == 0.0) {
    for (double R : Rs) {
      t.add({R, 0.0, 0.0});
      means.push_back(0.0);
    }
    summary["note"] = "γ = 0: V and its correctors vanish identically";
  } else {
    const Paraboloid P = Paraboloid::centred(base, c.gamma);
    if (N == 4) {
      const auto d = pot::decompose_W_ell(P, spec, pot::Route::Confocal);
      summary["ell_slope"] = point_json(d.ell.b);
      for (double R : Rs) {
        const double m = quad::ball_mean([&](const Point& x) { return std::abs(d.W(x)); }, zero_point(4), R);
        t.add({R, m, m / R});
        means.push_back(m);
      }
    } else {
      for (double R : Rs) {
        const AffineFunction A = pot::affine_corrector_AR(P, R, spec);
        const double m = quad::ball_mean(
            [&](const Point& x) { return std::abs(pot::potential_confocal(base, c.gamma, x) - A(x)); }, zero_point(3), R);
        t.add({R, m, m / R});
        means.push_back(m);
      }
    }
  }
  const double e = fitted_exponent(Rs, means);
  summary["defect"] = N == 4 ? "mean |u - p - ell|" : "mean |u - p - A^R|";
  summary["fitted_exponent"] = number(e);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < Rs.size(); ++i) {
    lo = std::min(lo, means[i] / Rs[i]);
    hi = std::max(hi, means[i] / Rs[i]);
  }
  summary["defect_over_R_spread"] = number(hi > 0.0 ? hi / lo : std::numeric_limits<double>::quiet_NaN());
  rep.files.add("growth.csv", io::to_csv(t));
  rep.files.add("growth.json", dump(summary));
  rep.summary.push_back("fitted exponent " + io::format_number(e));
  return rep;
}

// ------------------------------------------------------------------ acf

Report run_acf(const ExperimentConfig& c) {
  const Grid g = c.grid();
  const int N = c.dim;
  const Ellipsoid base = base_of(c);
  const ScalarField u = with_bump(c, field_of(c, g, target_fn(c), c.target_source));
  const double cg = c.compare_gamma.value_or(c.gamma);
  const Point ct = c.compare_tau.empty() ? c.tau_point() : point_or_zero(c.compare_tau, N - 1);
  const double cs = c.compare_sigma.value_or(c.sigma + 0.5);
  const ScalarField v = field_of(c, g, paraboloid_fn(base, cg, ct, cs), c.target_source);
  const ScalarField w = u - v;
  const auto radii = default_radii(c, g);
  const auto prof = acf::phi_profile(w, radii);
  const double h = g.h_max();
  Report rep;
  rep.files.add("acf_profile.csv", io::to_csv(io::profile_table(prof)));
  ordered_json j = header(c, "acf");
  j["comparison"] = {{"gamma", cg}, {"tau", point_json(ct)}, {"sigma", cs}};
  j["monotonicity_verdict"] = prof.verdict;
  ordered_json sub;
  sub["plus"] = acf::subharmonicity_check(w, acf::Part::Plus);
  sub["minus"] = acf::subharmonicity_check(w, acf::Part::Minus);
  sub["abs"] = acf::subharmonicity_check(w, acf::Part::Abs);
  sub["bound"] = 5.0 * h * h;
  j["subharmonicity"] = sub;
  ordered_json cacc = ordered_json::array();
  for (double r : radii) {
    try {
      cacc.push_back({{"r", r}, {"ratio", acf::caccioppoli_ratio(w, r)}});
    } catch (const DomainError&) {
      cacc.push_back({{"r", r}, {"ratio", nullptr}});
    }
  }
  j["caccioppoli"] = cacc;
  const auto d = acf::dichotomy_classify(w);
  j["dichotomy"] = {{"verdict", acf::to_string(d.verdict)},
                    {"b", point_json(d.b)},
                    {"linear_residual", d.linear_residual},
                    {"minority", d.minority}};
  rep.files.add("acf.json", dump(j));
  rep.summary.push_back("monotonicity verdict " + io::format_number(prof.verdict) + ", dichotomy " +
                        acf::to_string(d.verdict));
  return rep;
}

// ------------------------------------------------------------------ match

namespace {

struct GammaRoute {
  match::GammaSolve solve;
  std::string route;
  std::string target_source;
  double target = 0.0;
};

GammaRoute match_gamma(const ExperimentConfig& c, const Ellipsoid& base, double rel) {
  const auto spec = c.quadrature();
  GammaRoute g;
  if (c.dim == 4) {
    g.route = "lambda_gamma";
    g.target_source = c.match_slope ? "config" : "synthetic from gamma";
    g.target = c.match_slope ? *c.match_slope : -match::lambda_gamma(c.gamma, base, spec);
    g.solve = match::solve_gamma_N4(g.target, base, spec, rel);
  } else {
    g.route = "d3A_log_growth";
    g.target_source = c.match_beta ? "config" : "synthetic from gamma";
    g.target = c.match_beta ? *c.match_beta : -pot::d3_AR(c.gamma, c.match_R, base, spec) / std::log(c.match_R);
    g.solve = match::solve_gamma_N3(g.target, c.match_R, base, spec, -1.0, rel);
  }
  return g;
}

}  // namespace

Report run_match(const ExperimentConfig& c) {
  const int N = c.dim;
  const QuadraticBlowdown Q = c.blowdown();
  const auto em = match::solve_matching_ellipsoid(Q, 1e-12);
  const GammaRoute gr = match_gamma(c, em.E, 1e-9);
  const Point b = c.match_b_prime.empty() ? Point(Q.gradient(c.tau_point())) : point_or_zero(c.match_b_prime, N - 1);
  const Point tau = match::tau_prime(Q, b);
  match::MatchedParaboloid m{em.E, gr.solve.gamma, tau, c.sigma, {}, {}};
  m.residuals["ellipsoid"] = em.residual;
  m.residuals["gamma_target"] = gr.target;
  m.residuals["gamma_function"] = gr.solve.residual;
  m.residuals["tau_identity"] = (Q.gradient(tau) - b).cwiseAbs().maxCoeff();
  m.provenance["ellipsoid"] = "matching ellipsoid of Q";
  m.provenance["gamma"] = gr.route;
  m.provenance["gamma_target"] = gr.target_source;
  m.provenance["tau_prime"] = c.match_b_prime.empty() ? "Q^-1 b' with b' = Q tau (synthetic)" : "Q^-1 b' (config)";
  m.provenance["sigma"] = "config";
  Report rep;
  rep.files.add("matched.json", io::matched_json(m));
  rep.summary.push_back("γ = " + io::format_number(m.gamma) + " via " + gr.route);
  return rep;
}

// ------------------------------------------------------------------ slide

Report run_slide(const ExperimentConfig& c) {
  const Grid g = c.grid();
  const Ellipsoid base = base_of(c);
  const ScalarField u = with_bump(c, field_of(c, g, target_fn(c), c.target_source));
  const auto fam = sigma_family(c, g, base, c.gamma, c.tau_point());
  match::SlideOptions opt;
  opt.sigma_tol = c.tol;
  opt.field_tol = c.slide_field_tol.value_or(c.tol);
  const auto s = match::slide_sigma_bar(u, fam, c.slide_lo.value_or(-2.0), c.slide_hi.value_or(4.0), opt);
  Report rep;
  ordered_json j = header(c, "slide");
  j["target_sigma"] = c.sigma;
  j["family"] = c.slide_family;
  j["slide"] = slide_json(s);
  rep.files.add("slide.json", dump(j));
  rep.summary.push_back("σ̄ = " + io::format_number(s.sigma_bar) + ", sup difference " +
                        io::format_number(s.sup_difference));
  return rep;
}

// ------------------------------------------------------------------ pipeline

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("stage ") + name + ": " + e.what(), e.estimate(), e.gap());
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("stage ") + name + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(std::string("stage ") + name + ": " + e.what());
  }
}

/// Mean lateral position of the mask over layers whose section stays two nodes clear of the lateral faces.
Point lateral_centroid(const Mask& m) {
  const Grid& g = m.grid;
  const int N = g.dim();
  const int layers = g.nodes(N - 1);
  std::vector<std::uint8_t> clipped(layers, 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.inside[i]) continue;
    const auto mi = g.multi_index(i);
    for (int a = 0; a < N - 1; ++a)
      if (mi[a] < 2 || mi[a] > g.nodes(a) - 3) clipped[mi[N - 1]] = 1;
  }
  Point sum = zero_point(N - 1);
  double n = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.inside[i] || clipped[g.multi_index(i)[N - 1]]) continue;
    sum += g.coord(i).head(N - 1);
    n += 1.0;
  }
  if (n == 0.0) fail_domain("no mask layer stays clear of the lateral box faces");
  return sum / n;
}

/// The same samples on a grid translated so that node c becomes the origin.
ScalarField recentred(const ScalarField& f, const Point& c) {
  const Grid& g = f.grid();
  return ScalarField(Grid(g.lower() - c, g.upper() - c, g.node_counts()), f.values());
}

double lowest_layer(const Mask& m) {
  const Grid& g = m.grid;
  const int N = g.dim();
  double z = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (m.inside[i]) z = std::min(z, g.coord(i)(N - 1));
  return z;
}

}  // namespace

Report run_pipeline(const ExperimentConfig& c) {
  const int N = c.dim;
  const Grid g = c.grid();
  Report rep;
  ordered_json j = header(c, "pipeline");
  j["target"] = {{"kind", c.target_kind}, {"source", c.target_source}, {"gamma", c.gamma},
                 {"tau", point_json(c.tau_point())}, {"sigma", c.sigma}, {"bump", c.target_bump}};
  auto finish = [&](const std::string& verdict) {
    j["verdict"] = verdict;
    rep.files.add("pipeline.json", dump(j));
    rep.summary.push_back("verdict " + verdict);
    return rep;
  };

  const ScalarField u = stage("solve", [&] { return with_bump(c, field_of(c, g, target_fn(c), c.target_source)); });
  j["solve"] = {{"residuals", residuals_json(solver::residual_report(u))}};

  const auto cm = stage("coincidence_mask", [&] { return geom::coincidence_mask(u); });
  j["coincidence_mask"] = {{"nodes", cm.mask.count()}, {"hull_defect", cm.hull_defect}};
  if (cm.mask.count() == 0) {
    j["rejection"] = "empty coincidence set";
    return finish("rejected");
  }

  // Normalise so the lowest mask point sits at the origin; lateral centring needs an unclipped layer.
  const double z_min = lowest_layer(cm.mask);
  std::optional<Point> centroid;
  try {
    centroid = lateral_centroid(cm.mask);
  } catch (const DomainError&) {
  }
  Point vertex = zero_point(N);
  if (centroid) vertex.head(N - 1) = *centroid;
  vertex(N - 1) = z_min;
  const auto vnode = g.nearest(vertex);
  if (!vnode) throw DomainError("stage paraboloid_fit: the vertex estimate lies outside the box");
  const Point centre = g.coord(*vnode);
  const Mask normalised(recentred(u, centre).grid(), cm.mask.inside);
  j["normalisation"] = {{"vertex_node", point_json(centre)}, {"lateral_centroid", centroid ? point_json(*centroid) : ordered_json(nullptr)}};
  const double band = geom::detachment_band(solver::active_threshold(g));
  const auto fit = stage("paraboloid_fit", [&] { return geom::paraboloid_fit(normalised, 1.1, band); });
  j["paraboloid_fit"] = {{"ok", fit.ok}, {"band", band}, {"failure", fit.failure}, {"a0", fit.a0}, {"gamma0", fit.gamma0},
                         {"covered_fraction", fit.covered_fraction}, {"ray_contained", fit.ray_contained}};
  if (!fit.ok) {
    j["rejection"] = fit.failure;
    return finish("rejected");
  }

  const QuadraticBlowdown Q = c.blowdown();
  const auto em = stage("matching", [&] { return match::solve_matching_ellipsoid(Q, 1e-12); });
  const GammaRoute gr = stage("matching", [&] { return match_gamma(c, em.E, 1e-9); });
  if (!centroid && c.match_b_prime.empty())
    throw DomainError("stage matching: no mask layer stays clear of the lateral box faces to locate τ'");
  const Point b = c.match_b_prime.empty() ? Point(Q.gradient(-*centroid)) : point_or_zero(c.match_b_prime, N - 1);
  const Point tau = match::tau_prime(Q, b);
  j["matching"] = {{"axes", point_json(em.E.semi_axes)},
                   {"ellipsoid_residual", em.residual},
                   {"gamma", gr.solve.gamma},
                   {"gamma_route", gr.route},
                   {"gamma_target", gr.target},
                   {"gamma_target_source", gr.target_source},
                   {"gamma_function_residual", gr.solve.residual},
                   {"b_prime", point_json(b)},
                   {"b_prime_source", c.match_b_prime.empty() ? "Q times minus the section centroid" : "config"},
                   {"tau_prime", point_json(tau)}};

  const double sigma_guess = -z_min;
  const auto fam = sigma_family(c, g, em.E, gr.solve.gamma, tau);
  const ScalarField w = recentred(u - fam(sigma_guess), centre);
  const auto radii = stage("acf", [&] { return default_radii(c, w.grid()); });
  const auto prof = stage("acf", [&] { return acf::phi_profile(w, radii); });
  j["acf"] = {{"sigma", sigma_guess},
              {"centre", point_json(centre)},
              {"radii", radii},
              {"phi", prof.phi},
              {"monotonicity_verdict", prof.verdict},
              {"subharmonicity_abs", acf::subharmonicity_check(w, acf::Part::Abs)}};
  const auto dich = stage("dichotomy", [&] { return acf::dichotomy_classify(w); });
  j["dichotomy"] = {{"verdict", acf::to_string(dich.verdict)}, {"b", point_json(dich.b)},
                    {"linear_residual", dich.linear_residual}, {"minority", dich.minority}};

  match::SlideOptions opt;
  opt.sigma_tol = c.tol;
  opt.field_tol = c.slide_field_tol.value_or(c.tol);
  const auto br = stage("slide", [&] {
    return bracket_sigma(u, fam, c.slide_lo.value_or(sigma_guess - 1.0), c.slide_hi.value_or(sigma_guess + 1.0), c.tol);
  });
  const auto s = stage("slide", [&] { return match::slide_sigma_bar(u, fam, br.first, br.second, opt); });
  j["slide"] = slide_json(s);
  j["slide"]["family"] = c.slide_family;
  j["slide"]["phi_at_sigma_bar"] = acf::phi(recentred(u - fam(s.sigma_bar), centre), radii.back());
  const bool matched = !s.voided && s.contact <= c.tol && s.sup_difference <= 5.0 * c.tol;
  j["final_sup_difference"] = s.sup_difference;
  j["final_bound"] = 5.0 * c.tol;
  return finish(matched ? "paraboloid" : "unmatched");
}

}  // namespace olab::exp

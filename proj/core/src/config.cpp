#include "olab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "olab/error.hpp"

namespace olab::cfg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) bad(key, "'" + t + "' is not a number");
  if (!std::isfinite(v)) bad(key, "value must be finite");
  return v;
}

long long to_integer(const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  long long v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) bad(key, "'" + t + "' is not an integer");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(to_double(key, item));
  if (out.empty()) bad(key, "empty list");
  return out;
}

std::string to_choice(const std::string& key, const std::string& s, std::initializer_list<const char*> allowed) {
  const std::string t = trim(s);
  for (const char* a : allowed)
    if (t == a) return t;
  std::string opts;
  for (const char* a : allowed) opts += std::string(opts.empty() ? "" : ", ") + a;
  bad(key, "'" + t + "' is not one of " + opts);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

struct KeyInfo {
  const char* key;
  const char* help;
  Setter set;
};

const std::vector<KeyInfo>& key_table() {
  static const std::vector<KeyInfo> keys{
      {"experiment", "free-form experiment name", [](auto& c, auto&, auto& v) { c.experiment = trim(v); }},
      {"dim", "ambient dimension N (3 or 4)", [](auto& c, auto& k, auto& v) { c.dim = int(to_integer(k, v)); }},
      {"body", "ball | paraboloid | ellipsoid",
       [](auto& c, auto& k, auto& v) { c.body = to_choice(k, v, {"ball", "paraboloid", "ellipsoid"}); }},
      {"radius", "ball radius", [](auto& c, auto& k, auto& v) { c.radius = to_double(k, v); }},
      {"axes", "ellipsoid semi-axes (N values)", [](auto& c, auto& k, auto& v) { c.axes = to_list(k, v); }},
      {"q_spectrum", "eigenvalues of Q (N-1 values, sum 1)",
       [](auto& c, auto& k, auto& v) { c.q_spectrum = to_list(k, v); }},
      {"gamma", "paraboloid scale γ", [](auto& c, auto& k, auto& v) { c.gamma = to_double(k, v); }},
      {"tau", "lateral shift τ' (N-1 values)", [](auto& c, auto& k, auto& v) { c.tau = to_list(k, v); }},
      {"sigma", "vertical shift σ", [](auto& c, auto& k, auto& v) { c.sigma = to_double(k, v); }},
      {"grid.nodes", "nodes per axis", [](auto& c, auto& k, auto& v) { c.grid_nodes = int(to_integer(k, v)); }},
      {"grid.box", "half-width, or lower corner then upper corner",
       [](auto& c, auto& k, auto& v) { c.grid_box = to_list(k, v); }},
      {"quad.tol", "quadrature relative tolerance", [](auto& c, auto& k, auto& v) { c.quad_tol = to_double(k, v); }},
      {"quad.tmax", "quadrature truncation height (0 = automatic)",
       [](auto& c, auto& k, auto& v) { c.quad_tmax = to_double(k, v); }},
      {"solver.tol", "PSOR complementarity tolerance",
       [](auto& c, auto& k, auto& v) { c.solver_tol = to_double(k, v); }},
      {"solver.omega", "PSOR relaxation factor in (0, 2)",
       [](auto& c, auto& k, auto& v) { c.solver_omega = to_double(k, v); }},
      {"tol", "ordering and bisection tolerance", [](auto& c, auto& k, auto& v) { c.tol = to_double(k, v); }},
      {"radii", "ACF radii, strictly increasing", [](auto& c, auto& k, auto& v) { c.radii = to_list(k, v); }},
      {"heights", "section heights", [](auto& c, auto& k, auto& v) { c.heights = to_list(k, v); }},
      {"R_values", "ball radii for growth and BMO tables", [](auto& c, auto& k, auto& v) { c.R_values = to_list(k, v); }},
      {"samples", "number of random potential sample points",
       [](auto& c, auto& k, auto& v) { c.samples = int(to_integer(k, v)); }},
      {"seed", "seed of the sample points",
       [](auto& c, auto& k, auto& v) {
         const long long s = to_integer(k, v);
         if (s < 0) bad(k, "must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"out_dir", "output directory", [](auto& c, auto&, auto& v) { c.out_dir = trim(v); }},
      {"target.kind", "paraboloid | halfspace",
       [](auto& c, auto& k, auto& v) { c.target_kind = to_choice(k, v, {"paraboloid", "halfspace"}); }},
      {"target.source", "analytic | solved",
       [](auto& c, auto& k, auto& v) { c.target_source = to_choice(k, v, {"analytic", "solved"}); }},
      {"target.bump", "Gaussian bump amplitude in units of tol",
       [](auto& c, auto& k, auto& v) { c.target_bump = to_double(k, v); }},
      {"compare.gamma", "γ of the comparison solution (acf)",
       [](auto& c, auto& k, auto& v) { c.compare_gamma = to_double(k, v); }},
      {"compare.tau", "τ' of the comparison solution (acf)",
       [](auto& c, auto& k, auto& v) { c.compare_tau = to_list(k, v); }},
      {"compare.sigma", "σ of the comparison solution (acf)",
       [](auto& c, auto& k, auto& v) { c.compare_sigma = to_double(k, v); }},
      {"match.slope", "N = 4 slope target b_N", [](auto& c, auto& k, auto& v) { c.match_slope = to_double(k, v); }},
      {"match.beta", "N = 3 log-growth target β", [](auto& c, auto& k, auto& v) { c.match_beta = to_double(k, v); }},
      {"match.R", "N = 3 matching radius", [](auto& c, auto& k, auto& v) { c.match_R = to_double(k, v); }},
      {"match.b_prime", "lateral slope b' (N-1 values)",
       [](auto& c, auto& k, auto& v) { c.match_b_prime = to_list(k, v); }},
      {"slide.lo", "lower end of the σ bracket", [](auto& c, auto& k, auto& v) { c.slide_lo = to_double(k, v); }},
      {"slide.hi", "upper end of the σ bracket", [](auto& c, auto& k, auto& v) { c.slide_hi = to_double(k, v); }},
      {"slide.field_tol", "dead band of the ordering test (default: tol)",
       [](auto& c, auto& k, auto& v) { c.slide_field_tol = to_double(k, v); }},
      {"slide.family", "solved | analytic",
       [](auto& c, auto& k, auto& v) { c.slide_family = to_choice(k, v, {"solved", "analytic"}); }},
  };
  return keys;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) bad(key, what);
}

void require_increasing(const std::vector<double>& v, const std::string& key) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i] > 0.0, key, "entries must be positive");
    if (i) require(v[i] > v[i - 1], key, "entries must be strictly increasing");
  }
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& documented_keys() {
  static const std::vector<std::pair<std::string, std::string>> d = [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : key_table()) out.emplace_back(k.key, k.help);
    return out;
  }();
  return d;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::map<std::string, int> seen;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeyInfo& k) { return key == k.key; });
    if (it == table.end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (seen[key]++) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    it->set(c, key, value);
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  const int N = c.dim;
  require(N == 3 || N == 4, "dim", "must be 3 or 4");
  require(c.radius > 0.0, "radius", "must be positive");
  if (!c.axes.empty()) {
    require(static_cast<int>(c.axes.size()) == N, "axes", "needs N values");
    for (double a : c.axes) require(a > 0.0, "axes", "semi-axes must be positive");
  }
  if (c.body == "ellipsoid") require(!c.axes.empty(), "axes", "required for body = ellipsoid");
  if (!c.q_spectrum.empty()) {
    require(static_cast<int>(c.q_spectrum.size()) == N - 1, "q_spectrum", "needs N-1 values");
    double s = 0.0;
    for (double q : c.q_spectrum) {
      require(q > 0.0, "q_spectrum", "eigenvalues must be positive");
      s += q;
    }
    require(std::abs(s - 1.0) <= 1e-12, "q_spectrum", "eigenvalues must sum to 1");
  }
  require(c.gamma >= 0.0, "gamma", "must be nonnegative");
  if (!c.tau.empty()) require(static_cast<int>(c.tau.size()) == N - 1, "tau", "needs N-1 values");
  require(c.grid_nodes >= 9 && c.grid_nodes <= 1025, "grid.nodes", "must lie in [9, 1025]");
  require(c.grid_box.size() == 1 || static_cast<int>(c.grid_box.size()) == 2 * N, "grid.box",
          "needs one half-width or 2N corner coordinates");
  if (c.grid_box.size() == 1) require(c.grid_box[0] > 0.0, "grid.box", "half-width must be positive");
  else
    for (int a = 0; a < N; ++a) require(c.grid_box[a] < c.grid_box[N + a], "grid.box", "lower corner must lie below upper");
  require(c.quad_tol > 0.0 && c.quad_tol <= 1e-2, "quad.tol", "must lie in (0, 1e-2]");
  require(c.quad_tmax >= 0.0, "quad.tmax", "must be nonnegative");
  require(c.solver_tol > 0.0, "solver.tol", "must be positive");
  require(c.solver_omega > 0.0 && c.solver_omega < 2.0, "solver.omega", "must lie in (0, 2)");
  require(c.tol > 0.0, "tol", "must be positive");
  require_increasing(c.radii, "radii");
  require_increasing(c.R_values, "R_values");
  for (std::size_t i = 1; i < c.heights.size(); ++i)
    require(c.heights[i] > c.heights[i - 1], "heights", "entries must be strictly increasing");
  require(c.samples > 0 && c.samples <= 100000, "samples", "must lie in [1, 100000]");
  require(!c.out_dir.empty(), "out_dir", "must not be empty");
  require(c.target_bump >= 0.0, "target.bump", "must be nonnegative");
  if (c.compare_gamma) require(*c.compare_gamma >= 0.0, "compare.gamma", "must be nonnegative");
  if (!c.compare_tau.empty())
    require(static_cast<int>(c.compare_tau.size()) == N - 1, "compare.tau", "needs N-1 values");
  if (c.match_slope) require(N == 4, "match.slope", "applies to dim = 4 only");
  if (c.match_beta) {
    require(N == 3, "match.beta", "applies to dim = 3 only");
    require(*c.match_beta > 0.0, "match.beta", "must be positive");
  }
  require(c.match_R > 1.0, "match.R", "must exceed 1");
  if (!c.match_b_prime.empty())
    require(static_cast<int>(c.match_b_prime.size()) == N - 1, "match.b_prime", "needs N-1 values");
  if (c.slide_lo && c.slide_hi) require(*c.slide_lo < *c.slide_hi, "slide.lo", "must lie below slide.hi");
  if (c.slide_field_tol) require(*c.slide_field_tol > 0.0, "slide.field_tol", "must be positive");
}

Grid ExperimentConfig::grid() const {
  if (grid_box.size() == 1) return Grid::cube(dim, grid_box[0], grid_nodes);
  Point lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) {
    lo(a) = grid_box[a];
    hi(a) = grid_box[dim + a];
  }
  return Grid(lo, hi, std::vector<int>(dim, grid_nodes));
}

quad::QuadratureSpec ExperimentConfig::quadrature() const {
  quad::QuadratureSpec s;
  s.rel_tol = quad_tol;
  s.t_max = quad_tmax;
  return s;
}

QuadraticBlowdown ExperimentConfig::blowdown() const {
  if (!q_spectrum.empty()) return QuadraticBlowdown::diagonal(q_spectrum);
  return QuadraticBlowdown::diagonal(std::vector<double>(dim - 1, 1.0 / (dim - 1)));
}

Point ExperimentConfig::tau_point() const {
  Point t = zero_point(dim - 1);
  for (std::size_t i = 0; i < tau.size(); ++i) t(static_cast<int>(i)) = tau[i];
  return t;
}

}  // namespace olab::cfg

#include "olab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "olab/error.hpp"

namespace olab::io {

using nlohmann::ordered_json;

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) fail_domain("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("malformed number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

ordered_json point_json(const Point& p) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

Point json_point(const ordered_json& a) {
  if (!a.is_array() || a.empty() || a.size() > static_cast<std::size_t>(kMaxDim))
    throw ConfigError("expected a numeric array of length 1..4");
  Point p(static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) p(static_cast<int>(i)) = a[i].get<double>();
  return p;
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out = kSchemaLine;
  out += '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kSchemaLine) throw ConfigError("missing CSV schema line");
  Table t;
  if (!std::getline(is, line)) throw ConfigError("missing CSV header");
  t.columns = split(line, ',');
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.columns.size()) throw ConfigError("CSV row width does not match the header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_number(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table profile_table(const acf::ACFProfile& p) {
  Table t{{"r", "I_plus", "I_minus", "phi", "violation"}, {}};
  for (std::size_t j = 0; j < p.radii.size(); ++j)
    t.add({p.radii[j], p.i_plus[j], p.i_minus[j], p.phi[j], p.violation[j]});
  return t;
}

Table section_table(const geom::SectionProfile& p) {
  Table t{{"t", "H", "diam", "sqrtH_violation", "growth_monitor"}, {}};
  for (std::size_t j = 0; j < p.t.size(); ++j) t.add({p.t[j], p.H[j], p.diam[j], p.sqrtH_violation[j], p.growth[j]});
  return t;
}

Table field_table(const ScalarField& f) {
  const Grid& g = f.grid();
  Table t;
  for (int a = 0; a < g.dim(); ++a) t.columns.push_back("x" + std::to_string(a));
  t.columns.push_back("u");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = g.coord(i);
    std::vector<double> row(x.data(), x.data() + x.size());
    row.push_back(f[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string field_sidecar_json(const ScalarField& f, const solver::Residuals& r) {
  const Grid& g = f.grid();
  ordered_json j;
  j["schema"] = "obstacle-lab schema v1";
  j["dim"] = g.dim();
  j["lower"] = point_json(g.lower());
  j["upper"] = point_json(g.upper());
  j["nodes"] = g.node_counts();
  j["h"] = point_json(g.h());
  j["residuals"] = {{"pde", r.pde}, {"pos", r.positivity}, {"comp", r.complementarity}};
  return j.dump(2) + "\n";
}

ScalarField read_field(const std::string& csv, const std::string& sidecar) {
  ordered_json j;
  try {
    j = ordered_json::parse(sidecar);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed field sidecar: ") + e.what());
  }
  try {
    const Grid g(json_point(j.at("lower")), json_point(j.at("upper")), j.at("nodes").get<std::vector<int>>());
    if (j.at("dim").get<int>() != g.dim()) throw ConfigError("sidecar dim disagrees with the bounds");
    const Table t = parse_csv(csv);
    if (t.columns.size() != static_cast<std::size_t>(g.dim() + 1) || t.rows.size() != g.size())
      throw ConfigError("field CSV does not match the sidecar grid");
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.coord(i);
      for (int a = 0; a < g.dim(); ++a)
        if (std::abs(t.rows[i][a] - x(a)) > 1e-9 * (1.0 + std::abs(x(a))))
          throw ConfigError("field CSV node coordinates do not match the sidecar grid");
      v[i] = t.rows[i][g.dim()];
    }
    return ScalarField(g, std::move(v));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("incomplete field sidecar: ") + e.what());
  }
}

std::string matched_json(const match::MatchedParaboloid& m) {
  ordered_json j;
  j["schema"] = "obstacle-lab schema v1";
  j["axes"] = point_json(m.base.semi_axes);
  ordered_json rot = ordered_json::array();
  for (int r = 0; r < m.base.rotation.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (int c = 0; c < m.base.rotation.cols(); ++c) row.push_back(m.base.rotation(r, c));
    rot.push_back(row);
  }
  j["rotation"] = rot;
  j["gamma"] = m.gamma;
  j["tau_prime"] = point_json(m.tau);
  j["sigma"] = m.sigma;
  ordered_json res = ordered_json::object();
  for (const auto& [k, v] : m.residuals) res[k] = v;
  j["residuals"] = res;
  ordered_json prov = ordered_json::object();
  for (const auto& [k, v] : m.provenance) prov[k] = v;
  j["provenance"] = prov;
  return j.dump(2) + "\n";
}

match::MatchedParaboloid parse_matched_json(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    const Point axes = json_point(j.at("axes"));
    const int m = static_cast<int>(axes.size());
    Matrix R(m, m);
    const auto& rot = j.at("rotation");
    if (!rot.is_array() || rot.size() != static_cast<std::size_t>(m)) throw ConfigError("rotation shape mismatch");
    for (int r = 0; r < m; ++r) {
      const Point row = json_point(rot[r]);
      if (row.size() != m) throw ConfigError("rotation shape mismatch");
      R.row(r) = row.transpose();
    }
    match::MatchedParaboloid out{Ellipsoid(Point::Zero(m), axes, R), j.at("gamma").get<double>(),
                                 json_point(j.at("tau_prime")), j.at("sigma").get<double>(), {}, {}};
    for (const auto& [k, v] : j.at("residuals").items()) out.residuals[k] = v.get<double>();
    for (const auto& [k, v] : j.at("provenance").items()) out.provenance[k] = v.get<std::string>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed matched-paraboloid JSON: ") + e.what());
  }
}

void OutputSet::add(const std::string& name, std::string content) {
  if (name.empty() || name.find('/') != std::string::npos) fail_domain("output names must be plain file names");
  files_[name] = std::move(content);
}

void OutputSet::commit(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  try {
    for (const auto& [name, content] : files_) {
      const fs::path tmp = dir / ("." + name + ".partial");
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      staged.push_back(tmp);
      os << content;
      os.close();
      if (!os) throw Error("failed to write " + tmp.string());
    }
  } catch (...) {
    for (const auto& p : staged) fs::remove(p);
    throw;
  }
  std::size_t k = 0;
  for (const auto& [name, content] : files_) fs::rename(staged[k++], dir / name);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + p.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace olab::io

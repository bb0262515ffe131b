#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "helpers.hpp"
#include "olab/error.hpp"
#include "olab/io.hpp"
#include "olab/matching.hpp"
#include "olab/solver.hpp"

using namespace olab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("olab-test-" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("numbers round-trip through their decimal form") {
  for (double v : {0.1, -2.5e-300, 1.0 / 3.0, 6.02214076e23, 0.0}) CHECK(std::stod(io::format_number(v)) == v);
  CHECK(io::format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv round trip keeps the schema line and columns") {
  io::Table t;
  t.columns = {"r", "phi"};
  t.add({0.5, 1.0 / 7.0});
  t.add({1.0, -3.25});
  const std::string csv = io::to_csv(t);
  CHECK(csv.rfind(io::kSchemaLine, 0) == 0);
  const io::Table back = io::parse_csv(csv);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK_THROWS(io::parse_csv("r,phi\n1,2\n"));
  CHECK_THROWS(io::parse_csv(std::string(io::kSchemaLine) + "\nr,phi\n1\n"));
}

TEST_CASE("field csv and sidecar rebuild the same field") {
  const Grid g(make_point({-1.0, 0.0, 0.5}), make_point({1.0, 1.0, 1.5}), {5, 4, 3});
  const auto f = ScalarField::sample(g, [](const Point& x) { return std::sin(x(0)) + x(1) * x(2); });
  const std::string csv = io::to_csv(io::field_table(f));
  const std::string side = io::field_sidecar_json(f, solver::residual_report(f));
  const ScalarField back = io::read_field(csv, side);
  CHECK(back.grid() == g);
  CHECK(back.values() == f.values());
  const auto other = ScalarField::constant(Grid::cube(3, 1.0, 4), 0.0);
  CHECK_THROWS(io::read_field(io::to_csv(io::field_table(other)), side));
}

TEST_CASE("matched paraboloid json round trip") {
  match::MatchedParaboloid m{Ellipsoid::axis_aligned(zero_point(2), make_point({1.2, 1.0 / 1.2})), 1.3,
                             make_point({0.1, -0.05}), 0.25, {}, {}};
  m.residuals["ellipsoid"] = 1e-13;
  m.provenance["gamma"] = "config";
  const auto back = io::parse_matched_json(io::matched_json(m));
  CHECK(back.gamma == m.gamma);
  CHECK(back.sigma == m.sigma);
  CHECK(back.tau == m.tau);
  CHECK(back.base.semi_axes == m.base.semi_axes);
  CHECK(back.residuals.at("ellipsoid") == 1e-13);
  CHECK(back.provenance.at("gamma") == "config");
}

TEST_CASE("output sets are written together") {
  const fs::path d = fresh_dir("outputs");
  io::OutputSet out;
  out.add("a.csv", "x\n");
  out.add("b.json", "{}\n");
  out.commit(d);
  CHECK(io::read_file(d / "a.csv") == "x\n");
  CHECK(io::read_file(d / "b.json") == "{}\n");
  for (const auto& e : fs::directory_iterator(d)) CHECK(e.path().filename().string().find(".partial") == std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("profile and section tables carry their columns") {
  acf::ACFProfile p;
  p.radii = {0.5, 1.0};
  p.i_plus = {1.0, 2.0};
  p.i_minus = {1.0, 2.0};
  p.phi = {16.0, 4.0};
  p.violation = {0.0, 0.75};
  const auto t = io::profile_table(p);
  CHECK(t.rows.size() == 2u);
  CHECK(t.columns.front() == "r");
}

}

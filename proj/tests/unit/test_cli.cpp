#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "olab/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "olab-cli-tests";

int run(const std::string& args) {
  const std::string cmd = std::string(OLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return (fs::path(OLAB_CONFIG_DIR) / (name + ".cfg")).string(); }

std::string write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / (name + ".cfg");
  std::ofstream(p) << text;
  return p.string();
}

fs::path out_dir(const std::string& name) {
  const fs::path d = kWork / name;
  fs::remove_all(d);
  return d;
}

json load(const fs::path& p) { return json::parse(olab::io::read_file(p)); }

std::string with_line(const std::string& file, const std::string& line) {
  return olab::io::read_file(file) + line + "\n";
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("potential --no-such-flag") == 2);
  CHECK(run("--list-keys") == 0);
}

TEST_CASE("potential on the ball matches the radial oracle") {
  const fs::path d = out_dir("ball");
  REQUIRE(run("potential --config " + config("potential_ball") + " --out " + d.string()) == 0);
  const auto t = olab::io::parse_csv(olab::io::read_file(d / "potential.csv"));
  const auto col = std::find(t.columns.begin(), t.columns.end(), "abs_error") - t.columns.begin();
  REQUIRE(col < static_cast<long>(t.columns.size()));
  REQUIRE_FALSE(t.rows.empty());
  for (const auto& row : t.rows) CHECK(row[col] <= 1e-6);
}

TEST_CASE("potential on a paraboloid writes the BMO table") {
  const fs::path d = out_dir("paraboloid");
  REQUIRE(run("potential --config " + config("potential_paraboloid") + " --out " + d.string()) == 0);
  const auto bmo = olab::io::parse_csv(olab::io::read_file(d / "bmo.csv"));
  CHECK(bmo.rows.size() >= 3u);
  CHECK(fs::exists(d / "pde_residual.csv"));
  CHECK(fs::exists(d / "scaling.csv"));
}

TEST_CASE("malformed config: nonzero exit and no files") {
  const fs::path d = out_dir("malformed");
  const std::string bad = write_config("malformed", "dim = 3\ngrid.nodes = many\n");
  CHECK(run("potential --config " + bad + " --out " + d.string()) == 2);
  CHECK_FALSE(fs::exists(d));
  const std::string unknown = write_config("unknown", "dim = 3\nspeed = 11\n");
  CHECK(run("growth --config " + unknown + " --out " + d.string()) == 2);
  CHECK_FALSE(fs::exists(d));
}

TEST_CASE("growth exponents and the degenerate paraboloid") {
  const fs::path d4 = out_dir("growth4");
  REQUIRE(run("growth --config " + config("growth_n4") + " --out " + d4.string()) == 0);
  CHECK(std::abs(load(d4 / "growth.json")["fitted_exponent"].get<double>() - 0.5) <= 0.15);

  const fs::path d3 = out_dir("growth3");
  const std::string n3 = write_config("growth3", "dim = 3\nq_spectrum = 0.6, 0.4\nR_values = 4, 16, 64\n");
  REQUIRE(run("growth --config " + n3 + " --out " + d3.string()) == 0);
  CHECK(load(d3 / "growth.json")["defect_over_R_spread"].get<double>() <= 3.0);

  const fs::path d0 = out_dir("growth0");
  std::string zero = olab::io::read_file(config("growth_n4"));
  zero.replace(zero.find("gamma = 1"), 9, "gamma = 0");
  REQUIRE(run("growth --config " + write_config("growth0", zero) + " --out " + d0.string()) == 0);
  const auto t = olab::io::parse_csv(olab::io::read_file(d0 / "growth.csv"));
  for (const auto& row : t.rows) CHECK(std::abs(row[1]) <= 1e-12);
}

TEST_CASE("acf, match and slide subcommands") {
  const fs::path da = out_dir("acf");
  REQUIRE(run("acf --config " + config("acf_pair") + " --out " + da.string()) == 0);
  CHECK(load(da / "acf.json")["monotonicity_verdict"].get<double>() <= 0.03);

  const fs::path dm = out_dir("match");
  REQUIRE(run("match --config " + config("match_n3") + " --out " + dm.string()) == 0);
  const auto m = olab::io::parse_matched_json(olab::io::read_file(dm / "matched.json"));
  CHECK(std::abs(m.gamma - 1.3) <= 1e-6);
  CHECK(std::abs(m.tau(0) - 0.1) <= 1e-3);
  CHECK(std::abs(m.tau(1) + 0.05) <= 1e-3);

  const fs::path ds = out_dir("slide");
  REQUIRE(run("slide --config " + config("slide_n3") + " --out " + ds.string() + " --tol 1e-7") == 0);
  CHECK(std::abs(load(ds / "slide.json")["slide"]["sigma_bar"].get<double>() - 0.37) <= 2e-7);
}

TEST_CASE("outputs do not depend on the thread count") {
  const fs::path d1 = out_dir("threads1"), d3 = out_dir("threads3");
  REQUIRE(run("acf --config " + config("acf_pair") + " --threads 1 --out " + d1.string()) == 0);
  REQUIRE(run("acf --config " + config("acf_pair") + " --threads 3 --out " + d3.string()) == 0);
  for (const char* f : {"acf.json", "acf_profile.csv"})
    CHECK(olab::io::read_file(d1 / f) == olab::io::read_file(d3 / f));
}

TEST_CASE("pipeline recovers u_{P-(0,2)}") {
  const fs::path d = out_dir("pipeline");
  REQUIRE(run("pipeline --config " + config("pipeline_n3") + " --out " + d.string()) == 0);
  const json j = load(d / "pipeline.json");
  CHECK(j["verdict"] == "paraboloid");
  CHECK(std::abs(j["slide"]["sigma_bar"].get<double>() - 2.0) <= 1e-3);
  CHECK(j["final_sup_difference"].get<double>() <= j["final_bound"].get<double>());
  CHECK(j["dichotomy"]["verdict"] != "mixed");
}

TEST_CASE("pipeline rejects a half-space target") {
  const fs::path d = out_dir("halfspace");
  REQUIRE(run("pipeline --config " + config("pipeline_halfspace") + " --out " + d.string()) == 0);
  const json j = load(d / "pipeline.json");
  CHECK(j["verdict"] == "rejected");
  CHECK_FALSE(j["rejection"].get<std::string>().empty());
}

TEST_CASE("pipeline recovers a lateral shift") {
  const fs::path d = out_dir("lateral");
  const std::string cfg = write_config("lateral", with_line(config("pipeline_n3"), "tau = 0.1, -0.05"));
  REQUIRE(run("pipeline --config " + cfg + " --out " + d.string()) == 0);
  const json tau = load(d / "pipeline.json")["matching"]["tau_prime"];
  CHECK(std::abs(tau[0].get<double>() - 0.1) <= 1e-3);
  CHECK(std::abs(tau[1].get<double>() + 0.05) <= 1e-3);
}

TEST_CASE("verify subcommand runs selected criteria") {
  const fs::path d = out_dir("verify");
  CHECK(run("verify --only 1 2 7 --out " + d.string()) == 0);
  const std::string text = olab::io::read_file(d / "verify.txt");
  CHECK(text.find("[PASS] 1") != std::string::npos);
  CHECK(text.find("[FAIL]") == std::string::npos);
  CHECK(run("verify --only 14") == 2);
}

#include <doctest.h>

#include <string>

#include "olab/config.hpp"
#include "olab/error.hpp"

using namespace olab;

namespace {

bool message_has(const std::string& text, const std::string& needle) {
  try {
    cfg::parse_config(text);
  } catch (const ConfigError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parses keys, lists and comments") {
  const auto c = cfg::parse_config(
      "# comment line\n"
      "experiment = demo\n"
      "dim = 3\n"
      "q_spectrum = 0.6, 0.4   # trailing comment\n"
      "gamma = 1.5\n"
      "tau = 0.1, -0.2\n"
      "grid.nodes = 17\n"
      "grid.box = -1, -1, -0.5, 1, 1, 1.5\n"
      "radii = 0.2, 0.4\n"
      "match.beta = 0.3\n");
  CHECK(c.experiment == "demo");
  CHECK(c.gamma == 1.5);
  CHECK(c.tau_point()(1) == -0.2);
  CHECK(c.match_beta.value() == 0.3);
  const Grid g = c.grid();
  CHECK(g.nodes(2) == 17);
  CHECK(g.lower()(2) == -0.5);
  CHECK(c.blowdown().Q()(0, 0) == 0.6);
}

TEST_CASE("defaults form a valid configuration") {
  const auto c = cfg::parse_config("");
  CHECK(c.dim == 3);
  CHECK(c.grid().size() == 41u * 41u * 41u);
  CHECK(c.blowdown().Q()(1, 1) == 0.5);
}

TEST_CASE("malformed files name the offending line") {
  CHECK(message_has("dim = 3\nbogus = 1\n", "line 2"));
  CHECK(message_has("gamma = 1\ngamma = 2\n", "duplicate"));
  CHECK(message_has("gamma\n", "line 1"));
  CHECK(message_has("gamma = abc\n", "gamma"));
}

TEST_CASE("validation rejects inconsistent values") {
  CHECK_THROWS_AS(cfg::parse_config("dim = 5\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("q_spectrum = 0.5, 0.6\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("grid.nodes = 4\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("solver.omega = 2\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("radii = 0.5, 0.2\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("dim = 3\nmatch.slope = -0.1\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("dim = 4\nq_spectrum = 0.4, 0.35, 0.25\nmatch.beta = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(cfg::parse_config("grid.box = 1, 2\n"), ConfigError);
}

TEST_CASE("every documented key is accepted") {
  const auto& keys = cfg::documented_keys();
  CHECK(keys.size() >= 30u);
  for (const auto& [k, doc] : keys) {
    CHECK_FALSE(doc.empty());
    CHECK_FALSE(message_has(k + " = x\n", "unknown key"));
  }
}

}

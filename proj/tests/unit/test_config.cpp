#include <doctest.h>

#include "atomion/config.hpp"

using namespace atomion;
using nlohmann::json;

TEST_CASE("default configuration") {
  const auto c = default_config();
  CHECK(c.sweep.g == std::vector<double>{0, 0.5, 1, 2, 3, 5, 8, 10, 15, 20, 40, 80});
  CHECK(c.sweep.beta == std::vector<double>{0, 0.034, 1});
  CHECK(c.sweep.states == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(c.cache == CachePolicy::reuse);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("JSON round trip") {
  auto c = default_config();
  c.sweep.g = {0.0, 7.5};
  c.grid.cmf_points = 128;
  c.emit = {Emit::energies, Emit::overlaps};
  c.cache = CachePolicy::recompute;
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.emits(Emit::overlaps));
  CHECK_FALSE(back.emits(Emit::spectrum));
}

TEST_CASE("unknown keys are reported with their path") {
  try {
    config_from_json(json::parse(R"({"grid": {"cmf_pionts": 128}})"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "grid.cmf_pionts");
  }
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"model": {"g": "x"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"emit": ["plots"]})")), ConfigError);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_config_text("{\n  \"output\": \"x\",\n  oops\n}", "cfg.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("cfg.json") != std::string::npos);
    CHECK(what.find("3:") != std::string::npos);
  }
}

TEST_CASE("overrides") {
  json j = to_json(default_config());
  apply_override(j, "sweep.g=[1,2]");
  apply_override(j, "output=run-7");
  apply_override(j, "solver.imaginary.time_step=2e-4");
  const auto c = config_from_json(j);
  CHECK(c.sweep.g == std::vector<double>{1, 2});
  CHECK(c.output == "run-7");
  CHECK(c.solver.imaginary.time_step == 2e-4);
  CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ConfigError);
}

TEST_CASE("validation") {
  auto c = default_config();
  c.sweep.g = {};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config();
  c.sweep.g = {-1.0};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config();
  c.sweep.states = {0, 5};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config();
  c.emit = {Emit::densities};
  try {
    validate(c);  // default beta list contains 0
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field().rfind("sweep", 0) == 0);
  }
  c.sweep.beta = {1.0};
  CHECK_NOTHROW(validate(c));
  c = default_config();
  c.model.eta = 2.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = default_config();
  c.grid.cmf_points = 101;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("ion-frame need") {
  auto c = default_config();
  CHECK_FALSE(c.needs_ion_frame());
  c.emit = {Emit::effective};
  CHECK(c.needs_ion_frame());
  c.emit = {Emit::spectrum};
  c.sweep.ion_frame = true;
  CHECK(c.needs_ion_frame());
}

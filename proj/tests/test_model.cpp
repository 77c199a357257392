#include "piston/model.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace piston;

TEST_CASE("paper_params matches the reference experimental settings") {
  const SystemParams p = paper_params();
  CHECK(p.omega_m == doctest::Approx(3.5e5).epsilon(1e-15));
  CHECK(p.kappa == doctest::Approx(8.5e4).epsilon(1e-15));
  CHECK(p.lambda == doctest::Approx(3.4e10).epsilon(1e-15));
  CHECK(p.omega == doctest::Approx(2.0e13).epsilon(1e-15));
  CHECK(p.kappa_m == doctest::Approx(1.0));
  CHECK(p.kappa / p.kappa_m == doctest::Approx(8.5e4));  // cavity damps much faster
  CHECK(p.g_x_zpf() == doctest::Approx(3.3e3).epsilon(1e-12));
  CHECK(p.x_zpf() == doctest::Approx(1.0 / std::sqrt(2.0 * p.mass * p.omega_m)).epsilon(1e-15));
}

TEST_CASE("paper_params passes validation inside a well-formed scenario") {
  ScenarioConfig c;
  c.params = paper_params();
  c.params.kappa = 0.0;
  c.params.kappa_m = 0.0;
  c.left = GasSpec::fock(1);
  c.right = GasSpec::fock(1, 0.5);
  c.grid = {0.0, 1e-9, 11};
  CHECK(validate_errors(c).empty());
  c.params = paper_params();
  c.engine = Engine::Analytic;
  CHECK(validate_errors(c).empty());
}

TEST_CASE("validate rejects the spec'd invariant violations") {
  ScenarioConfig base;
  base.params = paper_params();
  base.left = GasSpec::fock(1);
  base.right = GasSpec::fock(1, 0.3);
  base.grid = {0.0, 1.0, 5};

  SUBCASE("valid baseline") { CHECK(validate_errors(base).empty()); }

  SUBCASE("distribution family mismatch") {
    base.right = GasSpec::coherent(1.0, 0.3);
    const auto errs = validate_errors(base);
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("family") != std::string::npos);
  }
  SUBCASE("mean mismatch") {
    base.right = GasSpec::fock(2, 0.3);
    CHECK_FALSE(validate_errors(base).empty());
  }
  SUBCASE("theta out of range") {
    base.right.theta = 2.0;
    CHECK_FALSE(validate_errors(base).empty());
  }
  SUBCASE("left gas must stay vertical") {
    base.left.theta = 0.1;
    base.right.theta = 0.1;
    CHECK_FALSE(validate_errors(base).empty());
  }
  SUBCASE("bad time grid") {
    base.grid = {1.0, 1.0, 5};
    CHECK_FALSE(validate_errors(base).empty());
    base.grid = {0.0, 1.0, 1};
    CHECK_FALSE(validate_errors(base).empty());
  }
  SUBCASE("oracle engine requires a closed system") {
    base.engine = Engine::Oracle;
    CHECK_FALSE(validate_errors(base).empty());
    base.params.kappa = 0.0;
    base.params.kappa_m = 0.0;
    CHECK(validate_errors(base).empty());
  }
  SUBCASE("validate throws with every violation listed") {
    base.right = GasSpec::coherent(2.0, 3.0);
    CHECK_THROWS_AS((void)validate(base), ConfigError);
  }
}

TEST_CASE("config file round-trips exactly") {
  std::mt19937_64 rng(20260811);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    ScenarioConfig c;
    c.params.omega_m = std::exp(uni(rng) * 10.0);
    c.params.omega = std::exp(uni(rng) * 20.0);
    c.params.lambda = std::exp(uni(rng) * 15.0);
    c.params.kappa = uni(rng) < 0.3 ? 0.0 : std::exp(uni(rng) * 5.0);
    c.params.kappa_m = uni(rng) < 0.3 ? 0.0 : uni(rng);
    c.params.mass = std::exp(-uni(rng) * 25.0);
    c.params.g = std::exp(uni(rng) * 8.0);
    const auto family = static_cast<GasFamily>(trial % 3);
    const double mean = family == GasFamily::Fock ? std::floor(uni(rng) * 4) : uni(rng) * 7;
    c.left = GasSpec{family, mean, 0.0};
    c.right = GasSpec{family, mean, uni(rng) * 1.5};
    c.membrane.n_th = uni(rng) * 20;
    c.grid = {uni(rng), 1.0 + uni(rng) * 100, 2 + static_cast<int>(uni(rng) * 1000)};
    c.engine = static_cast<Engine>(trial % 2);
    c.outputs = {"delta_h_m", "g2_lr"};
    c.phonon_cutoff = trial % 5 == 0 ? 16 : 0;

    const std::string text = serialize_config(c);
    const ScenarioConfig back = parse_config_string(text);
    CHECK(serialize_config(back) == text);
    CHECK(scenario_hash(back) == scenario_hash(c));
  }
}

TEST_CASE("config parser reports malformed input") {
  CHECK_THROWS_AS(parse_config_string("[system]\nomega_m 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("key = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[nope]\na = 1\n"), ConfigError);

  const char* good =
      "[system]\n"
      "omega_m = 1.0\nomega = 5.0\nlambda = 10.0\nmass = 0.5\ng_x_zpf = 0.01\n"
      "[left_gas]\nfamily = fock\nn = 1\n"
      "[right_gas]\nfamily = fock\nn = 1\ntheta = 0.78539816339744828\n"
      "[membrane]\nn_th = 0\n"
      "[run]\nt_start = 0\nt_end = 2\nn_steps = 33\nengine = oracle\n";
  const ScenarioConfig c = parse_config_string(good);
  CHECK(c.params.g == doctest::Approx(0.01 / c.params.x_zpf()));
  CHECK(c.grid.n_steps == 33);
  CHECK(c.engine == Engine::Oracle);

  SUBCASE("unknown keys are a hard error") {
    std::string bad = std::string(good) + "[run]\nwhatever = 3\n";
    CHECK_THROWS_WITH_AS(parse_config_string(bad), doctest::Contains("unknown key"),
                         ConfigError);
  }
  SUBCASE("g and g_x_zpf are mutually exclusive") {
    std::string bad(good);
    bad.insert(bad.find("[left_gas]"), "g = 3\n");
    CHECK_THROWS_AS(parse_config_string(bad), ConfigError);
  }
}

TEST_CASE("time grid endpoints are exact") {
  TimeGrid g{0.25, 7.75, 16};
  const auto ts = g.times();
  REQUIRE(ts.size() == 16);
  CHECK(ts.front() == 0.25);
  CHECK(ts.back() == 7.75);
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
}

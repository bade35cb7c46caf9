#include "attobs/config.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace attobs;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("the canonical benchmark emits a stable textual form") {
  const std::string text1 = emit_scenario(example1_config());
  const ScenarioConfig parsed = parse_scenario(text1);
  const std::string text2 = emit_scenario(parsed);
  REQUIRE(text1 == text2);
}

TEST_CASE("a fully populated scenario survives emit and parse") {
  ScenarioConfig cfg;
  cfg.r0 = exp_so3(Vec3(0.4, -1.1, 0.7)).matrix();
  cfg.omega = OmegaSignal::sinusoid(Vec3(0.1, -0.2, 0.05),
                                    Vec3(0.5, 0.3, -0.4), 0.25, 1.3);
  cfg.g_signals.push_back(ReferenceSignal::rotating(
      Vec3(0.0, 0.0, 1.0), 0.1, Vec3(1.0, 0.0, 1.0)));
  cfg.g_signals.push_back(ReferenceSignal::piecewise(
      {0.0, 2.5}, {Vec3(1.0, 2.0, 2.0), Vec3::UnitY()}));
  cfg.b_signals.push_back(ReferenceSignal::constant(Vec3(0.0, 1.0, 0.0)));
  cfg.sensors.vector_noise_std = 0.01;
  cfg.sensors.gyro_noise_std = 0.005;
  cfg.sensors.accel_bias = Vec3(0.05, -0.03, 0.02);
  cfg.sensors.delay_tau = 0.1;
  cfg.sensors.sample_period_vector = 0.5;
  cfg.sensors.seed = 42;

  ObserverSpecCfg o1;
  o1.name = "fast";
  o1.type = "obs1";
  o1.g1 = Observer1Gains{5.5, 0.25, 12.0, true, 0.2, 0.0};
  o1.qc_hat0 = exp_so3(Vec3(0.3, 0.3, -0.3)).matrix();
  cfg.observers.push_back(o1);
  ObserverSpecCfg o2;
  o2.name = "ltv";
  o2.type = "obs2";
  o2.g2 = Observer2Gains{2.0, 0.5, 4.0, 1.5};
  cfg.observers.push_back(o2);
  ObserverSpecCfg ob;
  ob.name = "plain";
  ob.type = "baseline";
  ob.g1.gamma_p = 7.0;
  cfg.observers.push_back(ob);

  cfg.run.dt = 5e-4;
  cfg.run.horizon = 45.0;
  cfg.run.seed = 9;
  cfg.run.output = "weird name.csv";
  cfg.run.output_every = 4;

  const ScenarioConfig back = parse_scenario(emit_scenario(cfg));

  REQUIRE((back.r0 - cfg.r0).norm() == 0.0);
  for (const double t : {0.0, 0.7, 3.14, 10.0}) {
    REQUIRE((back.omega.at(t) - cfg.omega.at(t)).norm() == 0.0);
    REQUIRE((back.g_signals[0].at(t) - cfg.g_signals[0].at(t)).norm() < 1e-14);
    REQUIRE((back.g_signals[1].at(t) - cfg.g_signals[1].at(t)).norm() < 1e-14);
    REQUIRE((back.b_signals[0].at(t) - cfg.b_signals[0].at(t)).norm() < 1e-14);
  }
  REQUIRE(back.sensors.vector_noise_std == 0.01);
  REQUIRE(back.sensors.gyro_noise_std == 0.005);
  REQUIRE((back.sensors.accel_bias - cfg.sensors.accel_bias).norm() == 0.0);
  REQUIRE(back.sensors.delay_tau == 0.1);
  REQUIRE(back.sensors.sample_period_vector == 0.5);
  REQUIRE(back.sensors.seed == 42);

  REQUIRE(back.observers.size() == 3);
  REQUIRE(back.observers[0].name == "fast");
  REQUIRE(back.observers[0].type == "obs1");
  REQUIRE(back.observers[0].g1.gamma_p == 5.5);
  REQUIRE(back.observers[0].g1.gamma_i == 0.25);
  REQUIRE(back.observers[0].g1.T == 12.0);
  REQUIRE(back.observers[0].g1.adaptive_T);
  REQUIRE(back.observers[0].g1.adaptive_delta == 0.2);
  REQUIRE((back.observers[0].qc_hat0 - o1.qc_hat0).norm() == 0.0);
  REQUIRE(back.observers[1].type == "obs2");
  REQUIRE(back.observers[1].g2.gamma_z == 2.0);
  REQUIRE(back.observers[1].g2.gamma == 0.5);
  REQUIRE(back.observers[1].g2.gamma_c == 4.0);
  REQUIRE(back.observers[1].g2.gamma_v == 1.5);
  REQUIRE(back.observers[2].type == "baseline");
  REQUIRE(back.observers[2].g1.gamma_p == 7.0);
  REQUIRE(back.observers[2].g1.gamma_i == 0.0);

  REQUIRE(back.run.dt == 5e-4);
  REQUIRE(back.run.horizon == 45.0);
  REQUIRE(back.run.seed == 9);
  REQUIRE(back.run.output == "weird name.csv");
  REQUIRE(back.run.output_every == 4);

  // The emitted form itself is a fixed point after one stabilizing pass.
  const std::string stable = emit_scenario(back);
  REQUIRE(emit_scenario(parse_scenario(stable)) == stable);
}

TEST_CASE("an empty document yields the documented defaults") {
  const ScenarioConfig cfg = parse_scenario("");
  REQUIRE((cfg.r0 - Mat3::Identity()).norm() == 0.0);
  REQUIRE(cfg.g_signals.empty());
  REQUIRE(cfg.observers.empty());
  REQUIRE(cfg.run.dt == 1e-3);
  REQUIRE(cfg.run.horizon == 60.0);
  REQUIRE(cfg.run.output == "trace.csv");
  REQUIRE(cfg.run.output_every == 10);
}

TEST_CASE("comments and blank lines are ignored") {
  const ScenarioConfig cfg = parse_scenario(
      "# leading comment\n\n[run]\n  dt = 0.01  # trailing comment\n\n");
  REQUIRE(cfg.run.dt == 0.01);
}

TEST_CASE("malformed documents raise located errors") {
  REQUIRE_THROWS_MATCHES(parse_scenario("dt = 1\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("outside any section")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[run\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("unterminated")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[run]\nno equals sign\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("expected key = value")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[what]\nx = 1\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("unknown section")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[truth]\nbogus = 1\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("unknown key")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[run]\ndt = fast\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("cannot parse number")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[truth]\nr0 = matrix 1 0 0 0 1 0 0 0 2\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("rotation")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[truth]\nomega = piecewise 0 1 2\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("groups of 4")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[truth]\nomega = sinusoid 1 2 3\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("8 numbers")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[references]\ng = rotating 0 0 1 0.1\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("7 numbers")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[references]\nx = constant 1 0 0\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("start with g or b")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[run]\ndt = 0\n"), ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("positive")));
  REQUIRE_THROWS_MATCHES(parse_scenario("[run]\noutput_every = 0\n"),
                         ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring(">= 1")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[observer x]\ntype = kalman\n"), ConfigError,
      Catch::Matchers::MessageMatches(
          ContainsSubstring("obs1, obs2 or baseline")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[observer x]\ntype = obs1\ngamma_p = -1\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("positive")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[observer x]\ntype = obs2\ngamma_z = 0\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("positive")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[observer x]\ntype = obs1\nqc_hat0 = 1 0 0\n"),
      ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("9 matrix entries")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[observer x]\ntype = obs1\nadaptive_T = maybe\n"),
      ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring("true/false")));
  REQUIRE_THROWS_MATCHES(
      parse_scenario("[sensors]\ngyro_noise_std = -0.1\n"), ConfigError,
      Catch::Matchers::MessageMatches(ContainsSubstring(">= 0")));
}

TEST_CASE("the benchmark scenario carries the documented content") {
  const ScenarioConfig cfg = example1_config();
  Mat3 half_turn;
  half_turn << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  REQUIRE((cfg.r0 - half_turn).norm() == 0.0);
  REQUIRE((cfg.omega.at(17.0) - Vec3(0.23, -0.5, 0.15)).norm() == 0.0);
  REQUIRE(cfg.g_signals.size() == 1);
  REQUIRE((cfg.g_signals[0].at(4.999) - Vec3::UnitX()).norm() == 0.0);
  REQUIRE((cfg.g_signals[0].at(5.0) - Vec3::UnitZ()).norm() == 0.0);
  REQUIRE(cfg.sensors.vector_noise_std == 0.0);
  REQUIRE(cfg.observers.size() == 3);
  REQUIRE(cfg.observers[0].type == "obs1");
  REQUIRE(cfg.observers[1].type == "obs2");
  REQUIRE(cfg.observers[2].type == "baseline");
  REQUIRE(cfg.observers[2].g1.gamma_i == 0.0);
  const ScenarioConfig noisy = example1_config(true, 7);
  REQUIRE(noisy.sensors.vector_noise_std == 0.01);
  REQUIRE(noisy.sensors.gyro_noise_std == 0.005);
  REQUIRE(noisy.sensors.seed == 7);
  REQUIRE(noisy.run.seed == 7);
}

TEST_CASE("a configuration file on disk loads like the inline text") {
  const std::string path = "/tmp/attobs_cfg_load_test.cfg";
  {
    std::ofstream f(path);
    f << emit_scenario(example1_config());
  }
  const ScenarioConfig cfg = load_scenario(path);
  REQUIRE(cfg.observers.size() == 3);
  std::remove(path.c_str());
  REQUIRE_THROWS_MATCHES(load_scenario("/tmp/does_not_exist_attobs.cfg"),
                         ConfigError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("cannot open")));
}

#include "doctest.h"

#include "faasim/config.hpp"

using namespace faasim;

TEST_CASE("a minimal config parses with defaults") {
  auto cfg = parse_run_config(R"({"version": 1})");
  CHECK(cfg.scenario.num_workers == 10);
  CHECK(cfg.scenario.cores == 16);
  CHECK(cfg.scheduler.name == "noah");
  CHECK(cfg.delays.idle_timeout_s == doctest::Approx(300.0));
}

TEST_CASE("fields override defaults") {
  auto cfg = parse_run_config(R"({
    "version": 1,
    "scenario": {"lambda_max": 40, "seed": 9, "num_classes": 4},
    "scheduler": {"name": "best-fit", "oversubscription": 1},
    "delays": {"resume_s": 0.01},
    "output_dir": "results",
    "replications": 3
  })");
  CHECK(cfg.scenario.lambda_max == 40.0);
  CHECK(cfg.scenario.seed == 9);
  CHECK(cfg.scheduler.name == "best-fit");
  CHECK(cfg.scheduler.oversubscription == 1);
  CHECK(cfg.delays.resume_s == doctest::Approx(0.01));
  CHECK(cfg.output_dir == "results");
  CHECK(cfg.replications == 3);
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_AS(parse_run_config(R"({"version": 1, "scenaro": {}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"version": 1, "scenario": {"corse": 4}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"version": 1, "scheduler": {"alpha": 1}})"),
      ConfigError);
}

TEST_CASE("missing or wrong version is rejected") {
  CHECK_THROWS_AS(parse_run_config(R"({})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"version": 2})"), ConfigError);
}

TEST_CASE("invalid values are rejected") {
  CHECK_THROWS_AS(
      parse_run_config(R"({"version": 1, "scheduler": {"name": "zippy"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"version": 1, "scenario": {"num_workers": 0}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(
          R"({"version": 1, "scheduler": {"alpha_per_class": [1e-4]}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(R"({"version": 1, "delays": {"resume_s": -1}})"),
      ConfigError);
}

TEST_CASE("configs round-trip through JSON") {
  auto cfg = parse_run_config(R"({
    "version": 1,
    "scenario": {"lambda_max": 25, "demand_model": "exponential"},
    "scheduler": {"name": "noncoop", "epsilon": 1e-5}
  })");
  auto back = parse_run_config(run_config_to_json(cfg));
  CHECK(back.scenario.lambda_max == 25.0);
  CHECK(back.scenario.demand_model == DemandModel::Exponential);
  CHECK(back.scheduler.name == "noncoop");
  CHECK(back.scheduler.epsilon == doctest::Approx(1e-5));
}

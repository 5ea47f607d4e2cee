#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "simwave/config.hpp"

using namespace simwave;

TEST_CASE("full configuration round trip") {
    std::string text = R"(
# control experiment
geometry.dimension = 1
geometry.bounds = 0.0, 0.5, 1.0
geometry.dx = 0.0025

coefficients.alpha = 1, 1
coefficients.beta = 1, 4
coefficients.gamma = 2, 2
coefficients.tau = 0.5, 2

multiplier.x0 = 0.0
multiplier.delta0 = 0.05
multiplier.c2 = 1.5

run.T = 4.5
run.cfl = 0.8
run.seed = 42
run.tolerance = 1e-9
run.max_iter = 250
run.trials = 5

output.dir = results
output.snapshot_every = 10
)";
    ExperimentConfig cfg = parse_config_text(text);
    REQUIRE(cfg.geometry.dimension == 1);
    REQUIRE(cfg.geometry.bounds.size() == 3);
    REQUIRE(cfg.geometry.bounds[1] == Catch::Approx(0.5));
    REQUIRE(cfg.geometry.spacing == Catch::Approx(0.0025));
    REQUIRE(cfg.coefficients.beta[1] == Catch::Approx(4.0));
    REQUIRE(cfg.coefficients.tau[0] == Catch::Approx(0.5));
    REQUIRE(cfg.x0[0] == Catch::Approx(0.0));
    REQUIRE(cfg.delta0 == Catch::Approx(0.05));
    REQUIRE(cfg.c2 == Catch::Approx(1.5));
    REQUIRE(cfg.T == Catch::Approx(4.5));
    REQUIRE(cfg.cfl == Catch::Approx(0.8));
    REQUIRE(cfg.seed == 42);
    REQUIRE(cfg.tolerance == Catch::Approx(1e-9));
    REQUIRE(cfg.max_iter == 250);
    REQUIRE(cfg.trials == 5);
    REQUIRE(cfg.output_dir == "results");
    REQUIRE(cfg.snapshot_every == 10);
}

namespace {

std::string minimal() {
    return "geometry.dimension = 1\n"
           "geometry.bounds = 0.0, 1.0\n"
           "geometry.dx = 0.01\n"
           "coefficients.alpha = 1\n"
           "coefficients.beta = 1\n"
           "coefficients.gamma = 1\n"
           "coefficients.tau = 1\n";
}

} // namespace

TEST_CASE("defaults for optional keys") {
    ExperimentConfig cfg = parse_config_text(minimal());
    REQUIRE(cfg.delta0 == 0.0);
    REQUIRE(std::isnan(cfg.c2));
    REQUIRE(cfg.T == Catch::Approx(1.0));
    REQUIRE(cfg.cfl == Catch::Approx(0.9));
    REQUIRE(cfg.seed == 12345);
    REQUIRE(cfg.tolerance == Catch::Approx(1e-8));
    REQUIRE(cfg.max_iter == 500);
    REQUIRE(cfg.trials == 3);
    REQUIRE(cfg.output_dir == "out");
    REQUIRE(cfg.snapshot_every == 0);
    // in 1D the multiplier origin defaults to the uncontrolled endpoint
    REQUIRE(cfg.x0[0] == Catch::Approx(0.0));
}

TEST_CASE("c2 accepts the estimate keyword") {
    ExperimentConfig cfg = parse_config_text(minimal() + "multiplier.c2 = estimate\n");
    REQUIRE(std::isnan(cfg.c2));
}

TEST_CASE("parser rejections") {
    SECTION("unknown key") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "run.bogus = 1\n"), ConfigError);
    }
    SECTION("duplicate key") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "geometry.dx = 0.02\n"), ConfigError);
    }
    SECTION("missing required key") {
        REQUIRE_THROWS_AS(parse_config_text("geometry.dimension = 1\n"), ConfigError);
    }
    SECTION("malformed number") {
        std::string text = minimal();
        text.replace(text.find("0.01"), 4, "zero");
        REQUIRE_THROWS_AS(parse_config_text(text), ConfigError);
    }
    SECTION("x0 length must match the dimension") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "multiplier.x0 = 0.0, 0.0\n"),
                          ConfigError);
    }
    SECTION("negative delta0") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "multiplier.delta0 = -0.5\n"),
                          ConfigError);
    }
    SECTION("cfl outside (0, 1]") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "run.cfl = 1.5\n"), ConfigError);
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "run.cfl = 0\n"), ConfigError);
    }
    SECTION("nonpositive horizon") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "run.T = -1\n"), ConfigError);
    }
    SECTION("trials below one") {
        REQUIRE_THROWS_AS(parse_config_text(minimal() + "run.trials = 0\n"), ConfigError);
    }
}

TEST_CASE("comments and blank lines are skipped") {
    std::string text = "# header\n\n" + minimal() + "\n# trailing comment\n";
    REQUIRE_NOTHROW(parse_config_text(text));
}

TEST_CASE("missing file is a configuration error") {
    REQUIRE_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

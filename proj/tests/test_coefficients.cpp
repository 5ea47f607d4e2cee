#include <catch2/catch_amalgamated.hpp>

#include "simwave/coefficients.hpp"

using namespace simwave;

TEST_CASE("monotonicity scan") {
    SECTION("increasing sequences pass") {
        MediumCoefficients c{{1, 2}, {1, 4}, {1, 2}, {1, 4}};
        HypothesisReport r = validate_monotonicity(c);
        REQUIRE(r.monotone_ab);
        REQUIRE(r.monotone_gt);
        REQUIRE(r.max_monotone_violation <= 0.0);
    }
    SECTION("a decreasing alpha fails") {
        MediumCoefficients c{{2, 1}, {1, 1}, {1, 1}, {2, 1}};
        HypothesisReport r = validate_monotonicity(c);
        REQUIRE_FALSE(r.monotone_ab);
        REQUIRE(r.max_monotone_violation == Catch::Approx(0.5));
    }
    SECTION("single layer is vacuously monotone") {
        MediumCoefficients c{{3}, {2}, {3}, {2}};
        REQUIRE(validate_monotonicity(c).monotone_ab);
    }
}

TEST_CASE("compatibility scan") {
    SECTION("identity coefficients") {
        MediumCoefficients c{{1, 1}, {1, 1}, {1, 1}, {1, 1}};
        REQUIRE(validate_compatibility(c).compatible);
    }
    SECTION("rescaled two-layer pair") {
        MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
        HypothesisReport r = validate_compatibility(c);
        REQUIRE(r.compatible);
        REQUIRE(r.max_rel_residual <= kCoefficientTolerance);
    }
    SECTION("product mismatch in one layer") {
        MediumCoefficients c{{1, 1}, {1, 2}, {1, 1}, {1, 1}};
        REQUIRE_FALSE(validate_compatibility(c).compatible);
    }
    SECTION("cross identity violated with matching products") {
        MediumCoefficients c{{1, 1}, {1, 4}, {2, 4}, {0.5, 1}};
        REQUIRE_FALSE(validate_compatibility(c).compatible);
    }
}

TEST_CASE("wave speeds") {
    MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
    REQUIRE(wave_speed(c, 0) == Catch::Approx(1.0));
    REQUIRE(wave_speed(c, 1) == Catch::Approx(2.0));
    REQUIRE(wave_speed_b(c, 0) == Catch::Approx(1.0));
    REQUIRE(wave_speed_b(c, 1) == Catch::Approx(2.0));
    REQUIRE(max_wave_speed(c) == Catch::Approx(2.0));
}

TEST_CASE("validation rejects malformed coefficient sets") {
    MediumCoefficients uneven{{1, 1}, {1}, {1, 1}, {1, 1}};
    REQUIRE_THROWS_AS(uneven.check_valid(), ConfigError);
    MediumCoefficients negative{{1, -1}, {1, 1}, {1, 1}, {1, 1}};
    REQUIRE_THROWS_AS(negative.check_valid(), ConfigError);
}

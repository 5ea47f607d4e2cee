#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "simwave/multiplier.hpp"
#include "simwave/observability.hpp"

using namespace simwave;

TEST_CASE("observation functional quadrature") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.01});
    MediumCoefficients c{{1}, {1}, {1}, {1}};
    WaveOperator opa(g, c, SystemTag::A);
    WaveOperator opb(g, c, SystemTag::B);
    MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
    double dt = 0.01;
    long steps = 200;
    TraceRecord ta = make_trace_record(g, dt, steps);
    TraceRecord tb = make_trace_record(g, dt, steps);

    SECTION("zero traces give zero") {
        ObservationValue v = observation_functional(ta, tb, md, opa, opb);
        REQUIRE(v.combined == 0.0);
        REQUIRE(v.separated == 0.0);
    }
    SECTION("a constant unit trace integrates to T") {
        for (double& x : ta.half) x = 1.0;
        ObservationValue v = observation_functional(ta, tb, md, opa, opb);
        REQUIRE(v.combined == Catch::Approx(dt * steps).margin(1e-12));
        REQUIRE(v.separated == Catch::Approx(dt * steps).margin(1e-12));
    }
    SECTION("with unit weights combined and separated agree when one trace vanishes") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& x : ta.half) x = dist(rng);
        ObservationValue v = observation_functional(ta, tb, md, opa, opb);
        REQUIRE(v.combined == Catch::Approx(v.separated));
        REQUIRE(v.combined > 0.0);
    }
    SECTION("mismatched layouts are rejected") {
        TraceRecord bad = make_trace_record(g, dt, steps + 1);
        REQUIRE_THROWS_AS(observation_functional(bad, tb, md, opa, opb), LengthMismatch);
    }
}

TEST_CASE("constant chain on the all-ones single layer") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.01});
    MediumCoefficients c{{1}, {1}, {1}, {1}};
    MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
    double T = 2.0;
    ObservabilityConstants pc = observability_constants(c, md, g, T, 1.0);
    REQUIRE(pc.c1 == Catch::Approx(1.0));
    REQUIRE(pc.c2 == Catch::Approx(1.0));
    REQUIRE(pc.c3 == Catch::Approx(1.0));
    REQUIRE(pc.c4 == Catch::Approx(1.0));
    REQUIRE(pc.c5 == Catch::Approx(1.0 + 3.0 * T));
    REQUIRE(pc.c6 == Catch::Approx(1.0 + 3.0 * T));
    REQUIRE(pc.c7 == Catch::Approx(4.0));
    REQUIRE(pc.c8 == Catch::Approx(1.0));
    REQUIRE(pc.c9 == Catch::Approx(1.0));
    REQUIRE(pc.t0 == Catch::Approx(2.0 + 6.0 * T));
    REQUIRE_FALSE(pc.c2_estimated);
    REQUIRE_THROWS_AS(
        observability_constants(c, md, g, T, std::numeric_limits<double>::quiet_NaN(), false),
        MissingC2);
    ObservabilityConstants est = observability_constants(c, md, g, T);
    REQUIRE(est.c2_estimated);
    REQUIRE(est.c2 > 0.0);
}

TEST_CASE("observability quotient on the compatible two-layer pair") {
    LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.01});
    MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
    MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);

    ObservabilityReport rep = observability_quotient(g, c, md, 4.5, 2, 12345, 0.9, false, 1.0);
    REQUIRE(rep.quotient > 0.0);
    REQUIRE(std::isfinite(rep.quotient));

    // concentrating the data near the uncontrolled boundary starves the
    // observation over a horizon shorter than any crossing
    SampledData near = sample_initial_data(g, 12345, true);
    WaveOperator opa(g, c, SystemTag::A);
    WaveOperator opb(g, c, SystemTag::B);
    double q_short = single_quotient(opa, opb, md, near, 0.15, 0.9);
    REQUIRE(q_short < rep.quotient / 5.0);
}

TEST_CASE("empirical onset time lies inside the probed window") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.02});
    MediumCoefficients c{{1}, {1}, {1}, {1}};
    MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
    double t0 = empirical_t0(g, c, md, 6.0, 4242);
    REQUIRE(t0 > 0.0);
    REQUIRE(t0 <= 6.0);
}

TEST_CASE("interior identity residual") {
    SECTION("only d = 3 is supported") {
        LayeredGrid g1 = build_layered_grid({1, {0.0, 1.0}, 0.1});
        MediumCoefficients c{{1}, {1}, {1}, {1}};
        MultiplierData md = build_h(g1, {}, {0.0, 0.0, 0.0}, 0.0);
        AcousticField f = make_zero_field(g1, SystemTag::A);
        REQUIRE_THROWS_AS(multiplier_identity_residual(g1, c, md, f, 0.5), DimensionError);
    }
    SECTION("zero trajectory has zero residual") {
        LayeredGrid g = build_layered_grid({3, {0.25, 0.75}, 0.0625});
        MediumCoefficients c{{1}, {1}, {1}, {1}};
        MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
        AcousticField f = make_zero_field(g, SystemTag::A);
        IdentityResidual r = multiplier_identity_residual(g, c, md, f, 0.3);
        REQUIRE(r.total == 0.0);
        REQUIRE(r.j_norm == 0.0);
    }
    SECTION("delta0 = 0 kills the source term J") {
        LayeredGrid g = build_layered_grid({3, {0.25, 0.75}, 0.0625});
        MediumCoefficients c{{1}, {1}, {1}, {1}};
        MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
        SampledData data = sample_initial_data(g, 31);
        IdentityResidual r = multiplier_identity_residual(g, c, md, data.a, 0.3);
        REQUIRE(r.j_norm <= 1e-10);
        REQUIRE(r.cells > 0);
        REQUIRE(std::isfinite(r.total));
    }
}

TEST_CASE("interface flux identity") {
    SECTION("equal coefficients make both sides vanish") {
        LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.01});
        MediumCoefficients c{{1, 1}, {1, 1}, {1, 1}, {1, 1}};
        WaveOperator op(g, c, SystemTag::A);
        MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
        SampledData data = sample_initial_data(g, 8);
        InterfaceIdentityReport rep = interface_flux_check(op, md, data.a, 0.004, 50);
        REQUIRE(rep.max_discrepancy.size() == 1);
        REQUIRE(rep.max_discrepancy[0] <= 1e-12);
        REQUIRE(std::abs(rep.max_rhs[0]) <= 1e-12);
    }
    SECTION("monotone layers give a signed jump") {
        LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.01});
        MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
        WaveOperator op(g, c, SystemTag::A);
        MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
        SampledData data = sample_initial_data(g, 8);
        InterfaceIdentityReport rep = interface_flux_check(op, md, data.a, 0.002, 100);
        REQUIRE(rep.max_discrepancy[0] <= 1e-12);
        REQUIRE(rep.max_rhs[0] >= 0.0);
    }
}

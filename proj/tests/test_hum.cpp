#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "simwave/hum.hpp"
#include "simwave/observability.hpp"

using namespace simwave;

namespace {

HUMVector random_vector(const LayeredGrid& g, unsigned seed) {
    SampledData d = sample_initial_data(g, seed);
    HUMVector v{d.a, d.b};
    for (std::size_t fi : g.s0_faces()) v.g1.velocity[fi] = 0.0;
    return v;
}

} // namespace

TEST_CASE("controller rejects incompatible coefficients") {
    LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.02});
    MediumCoefficients bad{{1, 1}, {1, 2}, {1, 1}, {1, 1}};
    REQUIRE_THROWS_AS(HUMController(g, bad, 1.0), IncompatibleCoefficients);
}

TEST_CASE("Gramian bilinear structure") {
    LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.02});
    MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
    HUMController ctl(g, c, 2.25);

    SECTION("zero vector maps to zero") {
        HUMVector z = ctl.zero();
        REQUIRE(ctl.x_inner(z, z) == 0.0);
        HUMVector lz = ctl.apply_gramian(z);
        REQUIRE(ctl.x_inner(lz, lz) == 0.0);
        REQUIRE(ctl.y_inner(z, z) == 0.0);
    }
    SECTION("symmetry and consistency over random pairs") {
        for (unsigned s = 0; s < 4; ++s) {
            HUMVector a = random_vector(g, 100 + 31 * s);
            HUMVector b = random_vector(g, 200 + 31 * s);
            HUMVector la = ctl.apply_gramian(a);
            HUMVector lb = ctl.apply_gramian(b);
            double lab = ctl.x_inner(la, b);
            double alb = ctl.x_inner(a, lb);
            double scale = std::max(std::abs(lab), std::abs(alb));
            REQUIRE(std::abs(lab - alb) <= 1e-8 * scale);
            double quad = ctl.x_inner(la, a);
            REQUIRE(std::abs(quad - ctl.y_inner(a, a)) <= 1e-8 * std::abs(quad));
        }
    }
    SECTION("trace form satisfies Cauchy-Schwarz") {
        HUMVector a = random_vector(g, 77);
        HUMVector b = random_vector(g, 78);
        double ab = ctl.y_inner(a, b);
        double aa = ctl.y_inner(a, a);
        double bb = ctl.y_inner(b, b);
        REQUIRE(ab * ab <= aa * bb * (1.0 + 1e-12));
        REQUIRE(aa >= 0.0);
    }
}

TEST_CASE("control synthesis algebra") {
    LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.02});
    MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
    HUMController ctl(g, c, 1.0);

    SECTION("zero vector synthesizes zero controls") {
        ControlSignal cs = ctl.synthesize_controls(ctl.zero());
        for (double v : cs.q_half) REQUIRE(v == 0.0);
        for (double v : cs.p_int) REQUIRE(v == 0.0);
    }
    SECTION("first control divides the kernel by beta, second is -(beta/gamma) of it") {
        TraceRecord s = make_trace_record(g, ctl.dt(), ctl.steps());
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& x : s.half) x = dist(rng);
        ControlSignal cs = ctl.controls_from_combined(s);
        std::vector<double> si = resample_to_integer(s);
        const double beta_out = c.beta.back();
        const double gamma_out = c.gamma.back();
        for (long n = 0; n < cs.steps; ++n) {
            for (std::size_t i = 0; i < cs.num_faces; ++i) {
                double s_int = si[static_cast<std::size_t>(n) * cs.num_faces + i];
                REQUIRE(cs.q(n, i) == Catch::Approx(s.at(n, i) / beta_out));
                // p carries the structural ratio -(beta/gamma) of the resampled q
                REQUIRE(cs.p(n, i) ==
                        Catch::Approx(-(beta_out / gamma_out) * s_int / beta_out)
                            .margin(1e-14));
            }
        }
    }
}

TEST_CASE("null target needs no control") {
    LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.02});
    MediumCoefficients c{{1, 1}, {1, 4}, {2, 2}, {0.5, 2}};
    HUMController ctl(g, c, 4.5);
    ControlReport r = ctl.solve_control(ctl.zero(), 1e-8, 100);
    REQUIRE(r.converged);
    REQUIRE(r.energy_ratio == 0.0);
    REQUIRE(r.y_norm == 0.0);
}

TEST_CASE("single layer pair is steered to rest past the minimal horizon") {
    // the combined A/B spectrum has gap pi/2, so the horizon must comfortably exceed 4
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.0025});
    MediumCoefficients c{{1}, {1}, {1}, {1}};
    HUMController ctl(g, c, 8.0);
    HUMVector target = random_vector(g, 12345);
    ControlReport r = ctl.solve_control(target, 1e-8, 400);
    REQUIRE(r.converged);
    REQUIRE(r.initial_energy_a > 0.0);
    REQUIRE(r.initial_energy_b > 0.0);
    REQUIRE(r.energy_ratio <= 1e-3);
}

TEST_CASE("horizon below the crossing time cannot steer to rest") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.005});
    MediumCoefficients c{{1}, {1}, {1}, {1}};
    HUMController ctl(g, c, 0.5);
    HUMVector target = random_vector(g, 999);
    try {
        ControlReport r = ctl.solve_control(target, 1e-8, 400);
        REQUIRE(r.energy_ratio >= 0.5);
    } catch (const NoConvergence&) {
        SUCCEED("Gramian solve stalled as expected");
    }
}

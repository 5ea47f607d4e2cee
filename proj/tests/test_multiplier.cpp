#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "simwave/multiplier.hpp"
#include "simwave/poisson.hpp"

using namespace simwave;

namespace {

double aligned_max_diff(const LayeredGrid& g, const std::vector<double>& phi,
                        const std::vector<double>& reference) {
    NeumannPoisson p(g);
    std::vector<double> ref = reference;
    p.project(ref);
    double worst = 0.0;
    for (long c : p.cells())
        worst = std::max(worst, std::abs(phi[static_cast<std::size_t>(c)] -
                                         ref[static_cast<std::size_t>(c)]));
    return worst;
}

} // namespace

TEST_CASE("1D auxiliary potential matches the closed form") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.01});
    std::vector<double> phi = solve_phi(g);
    // phi'' = 1, phi'(1) = 2, phi'(0) = 1  =>  phi = x^2/2 + x + const
    std::vector<double> ref(phi.size(), 0.0);
    for (long c = 0; c < g.bbox_cells(); ++c) {
        double x = g.cell_center(c)[0];
        ref[static_cast<std::size_t>(c)] = 0.5 * x * x + x;
    }
    REQUIRE(aligned_max_diff(g, phi, ref) <= 1e-10);
    NeumannPoisson p(g);
    REQUIRE(std::abs(p.mean(phi)) <= 1e-12);
}

TEST_CASE("2D potential residual shrinks under refinement") {
    double res[2];
    double dx = 0.0625;
    for (int level = 0; level < 2; ++level) {
        LayeredGrid g = build_layered_grid({2, {0.25, 1.0}, dx});
        NeumannPoisson p(g);
        std::vector<double> phi = solve_phi(g);
        res[level] = p.interior_residual_max(phi, 1.0);
        dx /= 2.0;
    }
    REQUIRE(res[0] <= 1e-8);  // interior rows are satisfied to solver tolerance
    REQUIRE(res[1] <= 1e-8);
}

TEST_CASE("multiplier field h with delta0 = 0") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.01});
    MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
    REQUIRE(md.dh_dn[g.s0_faces()[0]] == Catch::Approx(1.0));
    REQUIRE(md.max_grad_h == Catch::Approx(1.0));
    // discrete laplacian of the quadratic part is exactly d
    for (long c = 1; c + 1 < g.bbox_cells(); ++c) {
        double lap = (md.h[static_cast<std::size_t>(c + 1)] - 2.0 * md.h[static_cast<std::size_t>(c)] +
                      md.h[static_cast<std::size_t>(c - 1)]) / (0.01 * 0.01);
        REQUIRE(lap == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("multiplier field h with delta0 > 0 uses the prescribed fluxes") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.01});
    std::vector<double> phi = solve_phi(g);
    MultiplierData md = build_h(g, phi, {0.0, 0.0, 0.0}, 0.1);
    // dh/dn(1) = (x - x0).eta + delta0 phi'(1) = 1 + 0.1 * 2
    REQUIRE(md.dh_dn[g.s0_faces()[0]] == Catch::Approx(1.2));
    REQUIRE(md.mu == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("mu estimate on 3D concentric boxes stays below 2/3") {
    LayeredGrid g = build_layered_grid({3, {0.125, 0.5}, 1.0 / 32.0});
    std::vector<double> phi = solve_phi(g);
    double mu, mu_boundary;
    estimate_mu(g, phi, mu, mu_boundary);
    REQUIRE(mu <= 2.0 / 3.0 + 1e-6);
}

TEST_CASE("x0 placement") {
    LayeredGrid g = build_layered_grid({2, {0.25, 1.0}, 0.0625});
    REQUIRE_NOTHROW(build_h(g, {}, {0.0, 0.0, 0.0}, 0.0));
    REQUIRE_NOTHROW(build_h(g, {}, {0.2, -0.1, 0.0}, 0.0));
    REQUIRE_THROWS_AS(build_h(g, {}, {0.6, 0.0, 0.0}, 0.0), X0PlacementError);
}

TEST_CASE("geometric hypothesis report") {
    LayeredGrid g = build_layered_grid({3, {0.125, 0.25, 0.5}, 1.0 / 16.0});
    std::vector<double> phi = solve_phi(g);
    SECTION("centered x0 with delta0 = 0 passes") {
        MultiplierData md = build_h(g, {}, {0.0, 0.0, 0.0}, 0.0);
        GeometryHypothesisReport r = check_geometry(md, g);
        REQUIRE(r.delta_condition);
        REQUIRE(r.s0_condition);
        REQUIRE(r.s1_condition);
        REQUIRE(r.interface_condition);
        REQUIRE(r.all_pass());
    }
    SECTION("oversized delta0 breaks the damping condition") {
        MultiplierData md = build_h(g, phi, {0.0, 0.0, 0.0}, 10.0);
        GeometryHypothesisReport r = check_geometry(md, g);
        REQUIRE(md.mu < 1.0);
        REQUIRE_FALSE(r.delta_condition);
        REQUIRE_FALSE(r.all_pass());
    }
}

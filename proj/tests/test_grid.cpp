#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "simwave/grid.hpp"

using namespace simwave;

TEST_CASE("1D single layer builds the expected faces") {
    LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.01});
    REQUIRE(g.interior_cell_count() == 100);
    REQUIRE(g.num_layers() == 1);
    REQUIRE(g.interfaces().empty());
    REQUIRE(g.s1_faces().size() == 1);
    REQUIRE(g.s0_faces().size() == 1);
    REQUIRE(g.faces()[g.s1_faces()[0]].center[0] == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(g.faces()[g.s0_faces()[0]].center[0] == Catch::Approx(1.0));
    REQUIRE(g.faces()[g.s0_faces()[0]].outward == 1.0);
    REQUIRE(g.faces()[g.s1_faces()[0]].outward == -1.0);
}

TEST_CASE("1D two layers place the interface") {
    LayeredGrid g = build_layered_grid({1, {0.0, 0.5, 1.0}, 0.005});
    REQUIRE(g.num_layers() == 2);
    REQUIRE(g.interfaces().size() == 1);
    REQUIRE(g.interfaces()[0].size() == 1);
    const Face& f = g.faces()[g.interfaces()[0][0]];
    REQUIRE(f.type == FaceType::Interface);
    REQUIRE(f.center[0] == Catch::Approx(0.5));
    REQUIRE(f.normal == 1.0);
    REQUIRE(f.interface_k == 1);
}

TEST_CASE("2D layer assignment matches point classification") {
    LayeredGrid g = build_layered_grid({2, {0.25, 0.5, 1.0}, 1.0 / 64.0});
    long counts[2] = {0, 0};
    long inside = 0;
    for (long c = 0; c < g.bbox_cells(); ++c) {
        auto x = g.cell_center(c);
        double r = std::max(std::abs(x[0]), std::abs(x[1]));
        int k = -1;
        if (r > 0.25 && r < 0.5) k = 0;
        else if (r > 0.5 && r < 1.0) k = 1;
        REQUIRE(g.layer_of(c) == k);
        if (k >= 0) {
            ++counts[k];
            ++inside;
        }
    }
    REQUIRE(g.interior_cell_count() == inside);
    REQUIRE(g.layer_cell_count(0) == counts[0]);
    REQUIRE(g.layer_cell_count(1) == counts[1]);
}

TEST_CASE("surface measures") {
    SECTION("unit interval") {
        LayeredGrid g = build_layered_grid({1, {0.0, 1.0}, 0.02});
        SurfaceMeasures m = surface_measures(g);
        REQUIRE(m.volume == Catch::Approx(1.0));
        REQUIRE(m.area_s0 == Catch::Approx(1.0));
        REQUIRE(m.area_s1 == Catch::Approx(1.0));
    }
    SECTION("2D annular box, outer 2x2 with a 0.5x0.5 hole") {
        LayeredGrid g = build_layered_grid({2, {0.25, 1.0}, 0.0625});
        SurfaceMeasures m = surface_measures(g);
        REQUIRE(m.volume == Catch::Approx(3.75));
        REQUIRE(m.area_s0 == Catch::Approx(8.0));
        REQUIRE(m.area_s1 == Catch::Approx(2.0));
    }
    SECTION("3D concentric boxes, outer 1^3 with a 0.25^3 hole") {
        LayeredGrid g = build_layered_grid({3, {0.125, 0.5}, 0.0625});
        SurfaceMeasures m = surface_measures(g);
        REQUIRE(m.volume == Catch::Approx(1.0 - 0.015625));
        REQUIRE(m.area_s0 == Catch::Approx(6.0));
        REQUIRE(m.area_s1 == Catch::Approx(6.0 * 0.0625));
    }
}

TEST_CASE("face lookup agrees with the face list") {
    LayeredGrid g = build_layered_grid({2, {0.25, 1.0}, 0.125});
    for (long c = 0; c < g.bbox_cells(); ++c) {
        if (!g.inside(c)) continue;
        for (int a = 0; a < 2; ++a) {
            auto [lo, hi] = g.cell_faces(c, a);
            REQUIRE(lo >= 0);
            REQUIRE(hi >= 0);
            REQUIRE(g.faces()[static_cast<std::size_t>(lo)].axis == a);
            REQUIRE((g.faces()[static_cast<std::size_t>(lo)].cell_hi == c ||
                     g.faces()[static_cast<std::size_t>(lo)].cell_lo >= 0));
        }
    }
}

TEST_CASE("builder rejects bad geometry") {
    REQUIRE_THROWS_AS(build_layered_grid({1, {0.0, 0.3, 0.2}, 0.01}), GeometryError);
    REQUIRE_THROWS_AS(build_layered_grid({1, {0.0, 1.0}, 0.3}), ResolutionError);
    REQUIRE_THROWS_AS(build_layered_grid({2, {0.0, 1.0}, 0.1}), GeometryError);
    REQUIRE_THROWS_AS(build_layered_grid({4, {0.0, 1.0}, 0.1}), GeometryError);
    REQUIRE_THROWS_AS(build_layered_grid({1, {0.0, 1.0}, -0.1}), ResolutionError);
}

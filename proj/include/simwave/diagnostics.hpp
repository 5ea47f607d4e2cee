#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "simwave/errors.hpp"
#include "simwave/grid.hpp"
#include "simwave/solver.hpp"

namespace simwave {

// Per-layer max-norm of the discrete curl (face circulation around dual
// edges).  For gradient velocity data the circulation telescopes to zero
// exactly, so this measures departure from the gradient structure.
inline std::vector<double> curl_diagnostic(const LayeredGrid& grid,
                                           const std::vector<double>& u) {
    const int d = grid.dimension();
    if (d < 2) throw DimensionError("curl diagnostic needs d >= 2");
    const double inv_dx = 1.0 / grid.spacing();
    std::vector<double> worst(static_cast<std::size_t>(grid.num_layers()), 0.0);
    const auto& n = grid.cells_per_axis();

    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            int c = 3 - a - b;  // unused axis in 3D, z (size 1) in 2D
            for (long kc = 0; kc < ((d == 3) ? n[c] : 1); ++kc) {
                for (long ia = 0; ia <= n[a]; ++ia) {
                    for (long jb = 0; jb <= n[b]; ++jb) {
                        auto face_b = [&](long ia_cell) {
                            std::array<long, 3> f{0, 0, 0};
                            f[a] = ia_cell;
                            f[b] = jb;
                            f[c] = kc;
                            return grid.face_at(b, f);
                        };
                        auto face_a = [&](long jb_cell) {
                            std::array<long, 3> f{0, 0, 0};
                            f[a] = ia;
                            f[b] = jb_cell;
                            f[c] = kc;
                            return grid.face_at(a, f);
                        };
                        long fb_hi = face_b(ia), fb_lo = face_b(ia - 1);
                        long fa_hi = face_a(jb), fa_lo = face_a(jb - 1);
                        if (fb_hi < 0 || fb_lo < 0 || fa_hi < 0 || fa_lo < 0) continue;
                        double zeta =
                            (u[static_cast<std::size_t>(fb_hi)] - u[static_cast<std::size_t>(fb_lo)]) * inv_dx -
                            (u[static_cast<std::size_t>(fa_hi)] - u[static_cast<std::size_t>(fa_lo)]) * inv_dx;
                        // attribute to every layer owning a surrounding cell
                        for (long da = -1; da <= 0; ++da) {
                            for (long db = -1; db <= 0; ++db) {
                                std::array<long, 3> ijk{0, 0, 0};
                                ijk[a] = ia + da;
                                ijk[b] = jb + db;
                                ijk[c] = kc;
                                bool ok = true;
                                for (int ax = 0; ax < 3; ++ax)
                                    if (ijk[ax] < 0 || ijk[ax] >= n[ax]) ok = false;
                                if (!ok) continue;
                                int layer = grid.layer_of(grid.flatten(ijk));
                                if (layer >= 0)
                                    worst[static_cast<std::size_t>(layer)] =
                                        std::max(worst[static_cast<std::size_t>(layer)], std::abs(zeta));
                            }
                        }
                    }
                }
            }
        }
    }
    return worst;
}

// Discrete realizations of the transmission conditions on each interface.
// The flux side is exact by construction (one shared face unknown); the
// weighted-pressure side compares the adjacent cell values and is first-order
// in the spacing.
struct InterfaceReport {
    double max_w_jump = 0.0;           // |alpha p| mismatch across interfaces
    double max_s_jump = 0.0;           // |beta u.eta| mismatch (0 to rounding)
    double max_tangential_jump = 0.0;  // averaged tangential component mismatch
};

inline InterfaceReport interface_jumps(const WaveOperator& op, const AcousticField& f) {
    const LayeredGrid& g = op.grid();
    InterfaceReport r;
    for (const auto& list : g.interfaces()) {
        for (std::size_t fi : list) {
            const Face& face = g.faces()[fi];
            double al = op.layer_a()[static_cast<std::size_t>(face.layer_lo)];
            double ah = op.layer_a()[static_cast<std::size_t>(face.layer_hi)];
            double wl = al * f.pressure[static_cast<std::size_t>(face.cell_lo)];
            double wh = ah * f.pressure[static_cast<std::size_t>(face.cell_hi)];
            r.max_w_jump = std::max(r.max_w_jump, std::abs(wl - wh));
            double s = op.face_weight()[fi] * f.velocity[fi];
            r.max_s_jump = std::max(r.max_s_jump, std::abs(s - s));
            for (int t = 0; t < g.dimension(); ++t) {
                if (t == face.axis) continue;
                auto [lo_l, hi_l] = g.cell_faces(face.cell_lo, t);
                auto [lo_h, hi_h] = g.cell_faces(face.cell_hi, t);
                if (lo_l < 0 || hi_l < 0 || lo_h < 0 || hi_h < 0) continue;
                double ul = 0.5 * (f.velocity[static_cast<std::size_t>(lo_l)] +
                                   f.velocity[static_cast<std::size_t>(hi_l)]);
                double uh = 0.5 * (f.velocity[static_cast<std::size_t>(lo_h)] +
                                   f.velocity[static_cast<std::size_t>(hi_h)]);
                r.max_tangential_jump = std::max(r.max_tangential_jump, std::abs(ul - uh));
            }
        }
    }
    return r;
}

} // namespace simwave

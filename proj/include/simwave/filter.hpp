#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "simwave/errors.hpp"
#include "simwave/grid.hpp"

namespace simwave {

// Half-resolution companion of a grid, with multilinear prolongation for
// cell pressures and per-axis face velocities.  Adjoint modes with wavelength
// near 2dx carry almost no boundary signature, so restricting a boundary
// Gramian solve to this subspace removes them while keeping the resolved
// physics.  The transpose scatter is exact, which lets callers build the
// adjoint of the prolongation in any diagonal inner product.
class TwoGridFilter {
public:
    explicit TwoGridFilter(const LayeredGrid& fine)
        : fine_(fine),
          coarse_(build_layered_grid(
              GeometrySpec{fine.dimension(), fine.bounds(), 2.0 * fine.spacing()})) {
        build_cell_table();
        build_face_table();
    }

    const LayeredGrid& coarse() const { return coarse_; }

    // pf[fine cell] = sum_j w_j pc[coarse cell_j]
    void prolong_pressure(const std::vector<double>& pc, std::vector<double>& pf) const {
        pf.assign(static_cast<std::size_t>(fine_.bbox_cells()), 0.0);
        for (std::size_t c = 0; c < cell_table_.size(); ++c)
            for (const auto& [j, w] : cell_table_[c]) pf[c] += w * pc[static_cast<std::size_t>(j)];
    }

    // pc[coarse cell] += sum over fine cells of w * pf[fine cell]
    void scatter_pressure(const std::vector<double>& pf, std::vector<double>& pc) const {
        pc.assign(static_cast<std::size_t>(coarse_.bbox_cells()), 0.0);
        for (std::size_t c = 0; c < cell_table_.size(); ++c)
            for (const auto& [j, w] : cell_table_[c]) pc[static_cast<std::size_t>(j)] += w * pf[c];
    }

    void prolong_velocity(const std::vector<double>& uc, std::vector<double>& uf) const {
        uf.assign(fine_.faces().size(), 0.0);
        for (std::size_t f = 0; f < face_table_.size(); ++f)
            for (const auto& [j, w] : face_table_[f]) uf[f] += w * uc[static_cast<std::size_t>(j)];
    }

    void scatter_velocity(const std::vector<double>& uf, std::vector<double>& uc) const {
        uc.assign(coarse_.faces().size(), 0.0);
        for (std::size_t f = 0; f < face_table_.size(); ++f)
            for (const auto& [j, w] : face_table_[f]) uc[static_cast<std::size_t>(j)] += w * uf[f];
    }

private:
    using Entry = std::pair<long, double>;

    std::array<double, 3> origin() const {
        std::array<double, 3> lo{0.0, 0.0, 0.0};
        if (fine_.dimension() == 1) lo[0] = fine_.bounds().front();
        else
            for (int a = 0; a < fine_.dimension(); ++a) lo[a] = -fine_.bounds().back();
        return lo;
    }

    // Multilinear gather over the 2^d coarse corners of a point in index
    // space; corners outside the domain are dropped and weights renormalized.
    template <class Lookup>
    std::vector<Entry> gather(const std::array<double, 3>& s, int dim, Lookup&& lookup) const {
        std::array<long, 3> j0{0, 0, 0};
        std::array<double, 3> t{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) {
            j0[a] = static_cast<long>(std::floor(s[a]));
            t[a] = s[a] - static_cast<double>(j0[a]);
        }
        std::vector<Entry> out;
        double total = 0.0;
        for (int corner = 0; corner < (1 << dim); ++corner) {
            std::array<long, 3> j{0, 0, 0};
            double w = 1.0;
            for (int a = 0; a < dim; ++a) {
                int hi = (corner >> a) & 1;
                j[a] = j0[a] + hi;
                w *= hi ? t[a] : 1.0 - t[a];
            }
            if (w <= 0.0) continue;
            long id = lookup(j);
            if (id < 0) continue;
            out.emplace_back(id, w);
            total += w;
        }
        if (!(total > 0.0))
            throw ResolutionError("coarse companion grid does not cover the domain");
        for (auto& [id, w] : out) w /= total;
        return out;
    }

    void build_cell_table() {
        const std::array<double, 3> lo = origin();
        const double hc = coarse_.spacing();
        const int dim = fine_.dimension();
        cell_table_.assign(static_cast<std::size_t>(fine_.bbox_cells()), {});
        for (long c = 0; c < fine_.bbox_cells(); ++c) {
            if (!fine_.inside(c)) continue;
            std::array<double, 3> x = fine_.cell_center(c);
            std::array<double, 3> s{0.0, 0.0, 0.0};
            for (int a = 0; a < dim; ++a)
                s[a] = std::min(std::max((x[a] - lo[a]) / hc - 0.5, 0.0),
                                static_cast<double>(coarse_.cells_per_axis()[a] - 1));
            cell_table_[static_cast<std::size_t>(c)] = gather(s, dim, [&](const std::array<long, 3>& j) -> long {
                long cc = coarse_.flatten(j);
                return coarse_.inside(cc) ? cc : -1;
            });
        }
    }

    void build_face_table() {
        const std::array<double, 3> lo = origin();
        const double hc = coarse_.spacing();
        const int dim = fine_.dimension();
        face_table_.assign(fine_.faces().size(), {});
        for (std::size_t f = 0; f < fine_.faces().size(); ++f) {
            const Face& face = fine_.faces()[f];
            std::array<double, 3> s{0.0, 0.0, 0.0};
            for (int a = 0; a < dim; ++a) {
                double raw = (face.center[a] - lo[a]) / hc;
                double cap = static_cast<double>(coarse_.cells_per_axis()[a]);
                if (a == face.axis) s[a] = std::min(std::max(raw, 0.0), cap);
                else s[a] = std::min(std::max(raw - 0.5, 0.0), cap - 1.0);
            }
            face_table_[f] = gather(s, dim, [&](const std::array<long, 3>& j) -> long {
                return coarse_.face_at(face.axis, j);
            });
        }
    }

    const LayeredGrid& fine_;
    LayeredGrid coarse_;
    std::vector<std::vector<Entry>> cell_table_;
    std::vector<std::vector<Entry>> face_table_;
};

} // namespace simwave

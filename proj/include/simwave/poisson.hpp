#pragma once

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "simwave/errors.hpp"
#include "simwave/grid.hpp"

namespace simwave {

// Cell-centered pure-Neumann Poisson solver on the layered domain.
//
// Solves laplacian(phi) = f with prescribed outward fluxes g on every
// boundary face.  The operator has the constant nullspace; the right-hand
// side must satisfy the divergence-theorem compatibility condition and the
// solution is gauged to zero mean.
class NeumannPoisson {
public:
    explicit NeumannPoisson(const LayeredGrid& grid) : grid_(grid) {
        for (long c = 0; c < grid.bbox_cells(); ++c)
            if (grid.inside(c)) cells_.push_back(c);
    }

    // boundary_flux[i] is the outward normal derivative on face
    // grid.faces()[boundary_faces[i]]; callers pass fluxes for all S0 and S1
    // faces through the flux callback.
    template <class FluxFn, class RhsFn>
    std::vector<double> solve(FluxFn&& flux, RhsFn&& f, double tol = 1e-12,
                              long max_iter = 200000) const {
        const double dx = grid_.spacing();
        const int d = grid_.dimension();
        const double cell_vol = std::pow(dx, d);
        const double face_area = std::pow(dx, d - 1);

        // b_c = (1/dx) sum of prescribed boundary fluxes - f_c, so that the
        // SPD system A phi = b with A = -interior Laplacian is consistent.
        std::vector<double> b(static_cast<std::size_t>(grid_.bbox_cells()), 0.0);
        double net = 0.0;
        double scale = 0.0;
        for (long c : cells_) {
            double fc = f(c);
            b[static_cast<std::size_t>(c)] = -fc;
            net -= fc * cell_vol;
            scale += std::abs(fc) * cell_vol;
        }
        for (const auto& list : {grid_.s0_faces(), grid_.s1_faces()}) {
            for (std::size_t fi : list) {
                const Face& face = grid_.faces()[fi];
                long c = (face.cell_lo >= 0) ? face.cell_lo : face.cell_hi;
                double g = flux(fi);
                b[static_cast<std::size_t>(c)] += g / dx;
                net += g * face_area;
                scale += std::abs(g) * face_area;
            }
        }
        if (scale > 0.0 && std::abs(net) > 1e-10 * scale)
            throw CompatibilityError("Neumann data incompatible with the source term");

        std::vector<double> phi(b.size(), 0.0);
        std::vector<double> r = b;
        project(r);
        std::vector<double> p = r;
        std::vector<double> Ap(b.size(), 0.0);
        double rr = dot(r, r);
        double b_norm = std::sqrt(dot(b, b));
        if (b_norm == 0.0) return phi;
        for (long it = 0; it < max_iter; ++it) {
            if (std::sqrt(rr) <= tol * b_norm) break;
            apply(p, Ap);
            double pAp = dot(p, Ap);
            double a = rr / pAp;
            for (long c : cells_) {
                phi[static_cast<std::size_t>(c)] += a * p[static_cast<std::size_t>(c)];
                r[static_cast<std::size_t>(c)] -= a * Ap[static_cast<std::size_t>(c)];
            }
            project(r);
            double rr_new = dot(r, r);
            double beta = rr_new / rr;
            rr = rr_new;
            for (long c : cells_)
                p[static_cast<std::size_t>(c)] =
                    r[static_cast<std::size_t>(c)] + beta * p[static_cast<std::size_t>(c)];
        }
        project(phi);
        return phi;
    }

    // A phi = -sum over interior faces of (phi_nb - phi_c)/dx^2 (homogeneous
    // Neumann rows; prescribed fluxes live in the right-hand side).
    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        const double inv_dx2 = 1.0 / (grid_.spacing() * grid_.spacing());
        for (long c : cells_) out[static_cast<std::size_t>(c)] = 0.0;
        for (const Face& face : grid_.faces()) {
            if (face.cell_lo < 0 || face.cell_hi < 0) continue;
            double diff = (x[static_cast<std::size_t>(face.cell_hi)] -
                           x[static_cast<std::size_t>(face.cell_lo)]) * inv_dx2;
            out[static_cast<std::size_t>(face.cell_lo)] -= diff;
            out[static_cast<std::size_t>(face.cell_hi)] += diff;
        }
    }

    // Interior residual laplacian(phi) - f on cells away from the boundary.
    double interior_residual_max(const std::vector<double>& phi, double f_value) const {
        const double inv_dx2 = 1.0 / (grid_.spacing() * grid_.spacing());
        double worst = 0.0;
        for (long c : cells_) {
            bool full = true;
            double lap = 0.0;
            for (int a = 0; a < grid_.dimension(); ++a) {
                long nlo = grid_.neighbor(c, a, -1);
                long nhi = grid_.neighbor(c, a, +1);
                if (nlo < 0 || nhi < 0 || !grid_.inside(nlo) || !grid_.inside(nhi)) {
                    full = false;
                    break;
                }
                lap += (phi[static_cast<std::size_t>(nhi)] - 2.0 * phi[static_cast<std::size_t>(c)] +
                        phi[static_cast<std::size_t>(nlo)]) * inv_dx2;
            }
            if (full) worst = std::max(worst, std::abs(lap - f_value));
        }
        return worst;
    }

    // Smallest nonzero eigenvalue of the Neumann Laplacian by inverse power
    // iteration on the zero-mean subspace.  The inverse is the Poincare-type
    // constant used for C2.
    double smallest_nonzero_eigenvalue(int iterations = 25, unsigned seed = 1234) const {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist;
        std::vector<double> x(static_cast<std::size_t>(grid_.bbox_cells()), 0.0);
        for (long c : cells_) x[static_cast<std::size_t>(c)] = dist(rng);
        project(x);
        normalize(x);
        std::vector<double> y;
        double lambda = 0.0;
        for (int it = 0; it < iterations; ++it) {
            y = solve([&](std::size_t) { return 0.0; },
                      [&](long c) { return -x[static_cast<std::size_t>(c)]; }, 1e-10);
            // solve() computed A y = b with b = +x after the sign flip above.
            project(y);
            double xy = dot(x, y);
            lambda = 1.0 / xy;
            x = y;
            normalize(x);
        }
        return lambda;
    }

    const std::vector<long>& cells() const { return cells_; }

    double mean(const std::vector<double>& x) const {
        double s = 0.0;
        for (long c : cells_) s += x[static_cast<std::size_t>(c)];
        return s / static_cast<double>(cells_.size());
    }

    void project(std::vector<double>& x) const {
        double m = mean(x);
        for (long c : cells_) x[static_cast<std::size_t>(c)] -= m;
    }

private:
    double dot(const std::vector<double>& a, const std::vector<double>& b) const {
        double s = 0.0;
        for (long c : cells_)
            s += a[static_cast<std::size_t>(c)] * b[static_cast<std::size_t>(c)];
        return s;
    }

    void normalize(std::vector<double>& x) const {
        double n = std::sqrt(dot(x, x));
        if (n > 0.0)
            for (long c : cells_) x[static_cast<std::size_t>(c)] /= n;
    }

    const LayeredGrid& grid_;
    std::vector<long> cells_;
};

} // namespace simwave

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "simwave/errors.hpp"
#include "simwave/grid.hpp"
#include "simwave/poisson.hpp"

namespace simwave {

// Auxiliary multiplier field h(x) = |x-x0|^2/2 + delta0*Phi(x) together with
// its gradient, boundary normal derivatives and the Hessian-based mu(Omega)
// estimate.
struct MultiplierData {
    std::array<double, 3> x0{0.0, 0.0, 0.0};
    double delta0 = 0.0;
    std::vector<double> phi;      // cell-centered, zero mean, empty when delta0 == 0
    std::vector<double> h;        // cell-centered
    std::vector<double> grad_h;   // per active face, axis component at the face
    std::vector<double> dh_dn;    // per active face: d h/d eta for boundary (outward)
                                  // and interface (layer k-1 -> k) faces; axis
                                  // component elsewhere
    double mu = 0.0;              // interior Hessian eigenvalue minimum (times 2)
    double mu_boundary = std::numeric_limits<double>::quiet_NaN();
    double max_grad_h = 0.0;
};

struct GeometryHypothesisReport {
    bool delta_condition = false;   // delta0 (1 - mu) < 1
    bool s0_condition = false;      // (x-x0).eta >= -2 delta0 Vol/area(S0)
    bool s1_condition = false;      // (x-x0).eta <=  delta0 Vol/area(S1)
    bool interface_condition = false;  // (x-x0).eta + delta0 dPhi/deta >= 0 on Gamma_k
    double delta_margin = 0.0;      // 1 - delta0(1-mu)
    double s0_margin = 0.0;         // min over faces of lhs - rhs
    double s1_margin = 0.0;         // min over faces of rhs - lhs
    double interface_margin = 0.0;  // min over faces of lhs
    double min_dh_dn_s0 = 0.0;
    double max_dh_dn_s1 = 0.0;
    bool all_pass() const {
        return delta_condition && s0_condition && s1_condition && interface_condition;
    }
};

// Phi solves laplacian(Phi) = 1 with outward fluxes 2 Vol/area(S0) on S0 and
// -Vol/area(S1) on S1; exactly compatible since 2Vol - Vol = Vol.
inline std::vector<double> solve_phi(const LayeredGrid& grid, double tol = 1e-12) {
    NeumannPoisson poisson(grid);
    SurfaceMeasures m = surface_measures(grid);
    double g0 = 2.0 * m.volume / m.area_s0;
    double g1 = -m.volume / m.area_s1;
    return poisson.solve(
        [&](std::size_t fi) {
            return grid.faces()[fi].type == FaceType::Outer ? g0 : g1;
        },
        [](long) { return 1.0; }, tol);
}

namespace detail {

// Smallest eigenvalue of a symmetric d x d matrix, d <= 3.
inline double smallest_eigenvalue(const std::array<std::array<double, 3>, 3>& H, int d) {
    if (d == 1) return H[0][0];
    if (d == 2) {
        double tr = H[0][0] + H[1][1];
        double det = H[0][0] * H[1][1] - H[0][1] * H[0][1];
        double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return tr / 2.0 - disc;
    }
    // d == 3: closed form via the trigonometric method.
    double q = (H[0][0] + H[1][1] + H[2][2]) / 3.0;
    double p1 = H[0][1] * H[0][1] + H[0][2] * H[0][2] + H[1][2] * H[1][2];
    double p2 = (H[0][0] - q) * (H[0][0] - q) + (H[1][1] - q) * (H[1][1] - q) +
                (H[2][2] - q) * (H[2][2] - q) + 2.0 * p1;
    if (p2 <= 0.0) return q;
    double p = std::sqrt(p2 / 6.0);
    std::array<std::array<double, 3>, 3> B{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B[i][j] = (H[i][j] - (i == j ? q : 0.0)) / p;
    double detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                  B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                  B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    double r = std::clamp(detB / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    // smallest of the three roots
    return q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
}

inline bool has_full_neighborhood(const LayeredGrid& grid, long c) {
    std::array<long, 3> ijk = grid.unflatten(c);
    const int d = grid.dimension();
    std::array<long, 3> off{0, 0, 0};
    std::array<long, 3> lim{d >= 1 ? 1L : 0L, d >= 2 ? 1L : 0L, d >= 3 ? 1L : 0L};
    for (off[2] = -lim[2]; off[2] <= lim[2]; ++off[2])
        for (off[1] = -lim[1]; off[1] <= lim[1]; ++off[1])
            for (off[0] = -lim[0]; off[0] <= lim[0]; ++off[0]) {
                std::array<long, 3> n{ijk[0] + off[0], ijk[1] + off[1], ijk[2] + off[2]};
                bool ok = true;
                for (int a = 0; a < d; ++a)
                    if (n[a] < 0 || n[a] >= grid.cells_per_axis()[a]) ok = false;
                if (!ok || !grid.inside(grid.flatten(n))) return false;
            }
    return true;
}

} // namespace detail

// mu(Omega): twice the minimum over interior cells of the smallest Hessian
// eigenvalue of Phi, second-order central differences.  Cells whose 3^d
// neighborhood touches the boundary are excluded from the minimum and
// reported separately.
inline void estimate_mu(const LayeredGrid& grid, const std::vector<double>& phi,
                        double& mu, double& mu_boundary) {
    const int d = grid.dimension();
    const double inv_dx2 = 1.0 / (grid.spacing() * grid.spacing());
    mu = std::numeric_limits<double>::infinity();
    mu_boundary = std::numeric_limits<double>::infinity();
    auto at = [&](long c) { return phi[static_cast<std::size_t>(c)]; };
    for (long c = 0; c < grid.bbox_cells(); ++c) {
        if (!grid.inside(c)) continue;
        bool full = detail::has_full_neighborhood(grid, c);
        std::array<std::array<double, 3>, 3> H{};
        bool usable = true;
        for (int a = 0; a < d && usable; ++a) {
            long nlo = grid.neighbor(c, a, -1);
            long nhi = grid.neighbor(c, a, +1);
            if (nlo < 0 || nhi < 0 || !grid.inside(nlo) || !grid.inside(nhi)) {
                usable = false;
                break;
            }
            H[a][a] = (at(nhi) - 2.0 * at(c) + at(nlo)) * inv_dx2;
            for (int b = a + 1; b < d; ++b) {
                long pp = grid.neighbor(nhi, b, +1), pm = grid.neighbor(nhi, b, -1);
                long mp = grid.neighbor(nlo, b, +1), mm = grid.neighbor(nlo, b, -1);
                if (pp < 0 || pm < 0 || mp < 0 || mm < 0 || !grid.inside(pp) ||
                    !grid.inside(pm) || !grid.inside(mp) || !grid.inside(mm)) {
                    usable = false;
                    break;
                }
                H[a][b] = H[b][a] = (at(pp) - at(pm) - at(mp) + at(mm)) * inv_dx2 / 4.0;
            }
        }
        if (!usable) continue;
        double lam = 2.0 * detail::smallest_eigenvalue(H, d);
        if (full) mu = std::min(mu, lam);
        else mu_boundary = std::min(mu_boundary, lam);
    }
    if (!std::isfinite(mu)) mu = mu_boundary;
}

inline MultiplierData build_h(const LayeredGrid& grid, const std::vector<double>& phi,
                              const std::array<double, 3>& x0, double delta0) {
    if (delta0 < 0.0) throw ConfigError("delta0 must be nonnegative");
    {
        // x0 must sit in the closed inner hole (1D: at or left of the left
        // endpoint), never in the open domain.
        double r = x0[0];
        if (grid.dimension() > 1) {
            r = 0.0;
            for (int a = 0; a < grid.dimension(); ++a) r = std::max(r, std::abs(x0[a]));
        }
        if (r > grid.bounds().front() + 1e-12)
            throw X0PlacementError("x0 must lie in the inner hole, not inside the domain");
    }

    MultiplierData md;
    md.x0 = x0;
    md.delta0 = delta0;
    if (delta0 > 0.0) md.phi = phi;

    const int d = grid.dimension();
    const double dx = grid.spacing();
    SurfaceMeasures m = surface_measures(grid);
    const double phi_flux_s0 = 2.0 * m.volume / m.area_s0;
    const double phi_flux_s1 = -m.volume / m.area_s1;

    auto quad = [&](const std::array<double, 3>& x) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += (x[a] - x0[a]) * (x[a] - x0[a]);
        return 0.5 * s;
    };

    md.h.assign(static_cast<std::size_t>(grid.bbox_cells()), 0.0);
    for (long c = 0; c < grid.bbox_cells(); ++c) {
        if (!grid.inside(c)) continue;
        double v = quad(grid.cell_center(c));
        if (delta0 > 0.0) v += delta0 * phi[static_cast<std::size_t>(c)];
        md.h[static_cast<std::size_t>(c)] = v;
    }

    md.grad_h.assign(grid.faces().size(), 0.0);
    md.dh_dn.assign(grid.faces().size(), 0.0);
    for (std::size_t fi = 0; fi < grid.faces().size(); ++fi) {
        const Face& f = grid.faces()[fi];
        // Quadratic part evaluated exactly at the face center.
        double g = f.center[f.axis] - x0[f.axis];
        if (f.cell_lo >= 0 && f.cell_hi >= 0) {
            if (delta0 > 0.0)
                g += delta0 * (phi[static_cast<std::size_t>(f.cell_hi)] -
                               phi[static_cast<std::size_t>(f.cell_lo)]) / dx;
            md.grad_h[fi] = g;
            md.dh_dn[fi] = (f.type == FaceType::Interface) ? g * f.normal : g;
        } else {
            // Boundary face: use the prescribed Neumann data for the Phi part,
            // exact along the normal.
            double flux = (f.type == FaceType::Outer) ? phi_flux_s0 : phi_flux_s1;
            double dhdn = g * f.outward + delta0 * flux;
            md.grad_h[fi] = dhdn * f.outward;
            md.dh_dn[fi] = dhdn;
        }
        md.max_grad_h = std::max(md.max_grad_h, std::abs(md.grad_h[fi]));
    }

    if (delta0 > 0.0) {
        estimate_mu(grid, phi, md.mu, md.mu_boundary);
    } else {
        // h is exactly quadratic: Hess(Phi) plays no role, mu comes from the
        // solved Phi only when requested; with delta0 = 0 report the Phi-free
        // convention mu = 0 unless a Phi field is supplied.
        if (!phi.empty()) estimate_mu(grid, phi, md.mu, md.mu_boundary);
    }
    return md;
}

inline GeometryHypothesisReport check_geometry(const MultiplierData& md,
                                               const LayeredGrid& grid) {
    GeometryHypothesisReport r;
    const int d = grid.dimension();
    SurfaceMeasures m = surface_measures(grid);

    r.delta_margin = 1.0 - md.delta0 * (1.0 - md.mu);
    r.delta_condition = r.delta_margin > 0.0;

    auto xdotn = [&](const Face& f, double sign) {
        (void)d;
        return (f.center[f.axis] - md.x0[f.axis]) * sign;
    };

    r.s0_margin = std::numeric_limits<double>::infinity();
    r.min_dh_dn_s0 = std::numeric_limits<double>::infinity();
    for (std::size_t fi : grid.s0_faces()) {
        const Face& f = grid.faces()[fi];
        double lhs = xdotn(f, f.outward);
        r.s0_margin = std::min(r.s0_margin, lhs + 2.0 * md.delta0 * m.volume / m.area_s0);
        r.min_dh_dn_s0 = std::min(r.min_dh_dn_s0, md.dh_dn[fi]);
    }
    r.s0_condition = r.s0_margin >= 0.0;

    r.s1_margin = std::numeric_limits<double>::infinity();
    r.max_dh_dn_s1 = -std::numeric_limits<double>::infinity();
    for (std::size_t fi : grid.s1_faces()) {
        const Face& f = grid.faces()[fi];
        double lhs = xdotn(f, f.outward);
        r.s1_margin = std::min(r.s1_margin, md.delta0 * m.volume / m.area_s1 - lhs);
        r.max_dh_dn_s1 = std::max(r.max_dh_dn_s1, md.dh_dn[fi]);
    }
    if (grid.s1_faces().empty()) {
        r.s1_margin = 0.0;
        r.max_dh_dn_s1 = 0.0;
    }
    r.s1_condition = r.s1_margin >= 0.0;

    r.interface_margin = std::numeric_limits<double>::infinity();
    for (const auto& list : grid.interfaces()) {
        for (std::size_t fi : list) {
            // dh_dn already carries the k-1 -> k orientation and the exact
            // delta0 dPhi/deta contribution through the face gradient.
            double lhs = md.dh_dn[fi];
            r.interface_margin = std::min(r.interface_margin, lhs);
        }
    }
    if (grid.interfaces().empty() ||
        r.interface_margin == std::numeric_limits<double>::infinity())
        r.interface_margin = 0.0;
    r.interface_condition = r.interface_margin >= -1e-12;
    return r;
}

} // namespace simwave

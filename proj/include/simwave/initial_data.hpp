#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "simwave/errors.hpp"
#include "simwave/grid.hpp"

namespace simwave {

// Smooth scalar potential l(x) = V(x) * (trigonometric polynomial), where V
// vanishes on the inner boundary: V = x - bounds.front() in 1D and
// prod_i (x_i^2 - a^2) with a = bounds.front() in 2D/3D.  Velocity data built
// as the discrete face gradient of l is then exactly curl-free and satisfies
// the inner-boundary trace condition to round-off.
class TrigPotential {
public:
    TrigPotential(const LayeredGrid& grid, unsigned seed, int modes = 4)
        : dim_(grid.dimension()), inner_(grid.bounds().front()) {
        std::mt19937_64 rng(seed);
        double span = grid.bounds().back() - grid.bounds().front();
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
        std::uniform_int_distribution<int> harmonic(1, 3);
        for (int j = 0; j < modes; ++j) {
            Mode m;
            m.amplitude = amp(rng);
            for (int a = 0; a < dim_; ++a) {
                m.omega[a] = harmonic(rng) * M_PI / span;
                m.phase[a] = phase(rng);
            }
            modes_.push_back(m);
        }
    }

    double operator()(const std::array<double, 3>& x) const {
        double v = 1.0;
        if (dim_ == 1) {
            v = x[0] - inner_;
        } else {
            for (int a = 0; a < dim_; ++a) v *= x[a] * x[a] - inner_ * inner_;
        }
        double trig = 0.0;
        for (const Mode& m : modes_) {
            double t = m.amplitude;
            for (int a = 0; a < dim_; ++a) t *= std::sin(m.omega[a] * x[a] + m.phase[a]);
            trig += t;
        }
        return v * trig;
    }

private:
    struct Mode {
        double amplitude = 0.0;
        std::array<double, 3> omega{0.0, 0.0, 0.0};
        std::array<double, 3> phase{0.0, 0.0, 0.0};
    };

    int dim_;
    double inner_;
    std::vector<Mode> modes_;
};

// Seeded cell-centered scalar samples (used for pressure initial data).  The
// sampler is an analytic function of position, so refinements of the same
// seed sample the same continuum field.
class TrigScalar {
public:
    TrigScalar(const LayeredGrid& grid, unsigned seed, int modes = 4)
        : pot_(grid, seed, modes) {}

    double operator()(const std::array<double, 3>& x) const { return pot_(x); }

private:
    TrigPotential pot_;
};

// u0 on faces as the centered difference of l between the neighbor cell
// centers (ghost centers evaluated analytically).  Checks that l vanishes on
// the inner boundary within round-off of its overall scale.
template <class Potential>
std::vector<double> make_gradient_velocity(const LayeredGrid& grid, const Potential& l) {
    const double dx = grid.spacing();
    std::vector<double> u(grid.faces().size(), 0.0);
    double scale = 0.0;
    for (std::size_t fi = 0; fi < grid.faces().size(); ++fi) {
        const Face& f = grid.faces()[fi];
        std::array<double, 3> xl = f.center;
        std::array<double, 3> xr = f.center;
        xl[f.axis] -= 0.5 * dx;
        xr[f.axis] += 0.5 * dx;
        double ll = l(xl);
        double lr = l(xr);
        u[fi] = (lr - ll) / dx;
        scale = std::max({scale, std::abs(ll), std::abs(lr)});
    }
    for (std::size_t fi : grid.s1_faces()) {
        const Face& f = grid.faces()[fi];
        if (std::abs(l(f.center)) > 1e-12 * std::max(scale, 1.0))
            throw SpecError("potential does not vanish on the inner boundary");
    }
    return u;
}

template <class Scalar>
std::vector<double> make_cell_samples(const LayeredGrid& grid, const Scalar& s) {
    std::vector<double> p(static_cast<std::size_t>(grid.bbox_cells()), 0.0);
    for (long c = 0; c < grid.bbox_cells(); ++c)
        if (grid.inside(c)) p[static_cast<std::size_t>(c)] = s(grid.cell_center(c));
    return p;
}

} // namespace simwave

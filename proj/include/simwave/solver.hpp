#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "simwave/coefficients.hpp"
#include "simwave/errors.hpp"
#include "simwave/grid.hpp"

namespace simwave {

// Two first-order acoustic systems share one discretization; tag B reads
// (gamma, tau) where tag A reads (alpha, beta) and holds (v, q) in the same
// slots as (u, p).
enum class SystemTag { A, B };

struct AcousticField {
    SystemTag tag = SystemTag::A;
    double t = 0.0;
    std::vector<double> velocity;  // per active face, normal component
    std::vector<double> pressure;  // per bounding-box cell, 0 outside
};

inline AcousticField make_zero_field(const LayeredGrid& grid, SystemTag tag) {
    AcousticField f;
    f.tag = tag;
    f.velocity.assign(grid.faces().size(), 0.0);
    f.pressure.assign(static_cast<std::size_t>(grid.bbox_cells()), 0.0);
    return f;
}

// S0 boundary samples at half-integer times, one row per step, columns in
// grid.s0_faces() order.  System A records the pressure trace (average of the
// two bracketing integer levels); system B records the outward normal
// velocity, which lives natively on half levels.
struct TraceRecord {
    long steps = 0;
    double dt = 0.0;
    std::size_t num_faces = 0;
    std::vector<double> half;

    double& at(long n, std::size_t i) {
        return half[static_cast<std::size_t>(n) * num_faces + i];
    }
    double at(long n, std::size_t i) const {
        return half[static_cast<std::size_t>(n) * num_faces + i];
    }
};

inline TraceRecord make_trace_record(const LayeredGrid& grid, double dt, long steps) {
    TraceRecord r;
    r.steps = steps;
    r.dt = dt;
    r.num_faces = grid.s0_faces().size();
    r.half.assign(static_cast<std::size_t>(steps) * r.num_faces, 0.0);
    return r;
}

// Resample a half-level series to integer levels (averaging, one-sided at the
// ends); used when exporting traces and for pressure-level control data.
inline std::vector<double> resample_to_integer(const TraceRecord& r) {
    std::vector<double> out(static_cast<std::size_t>(r.steps + 1) * r.num_faces, 0.0);
    for (long n = 0; n <= r.steps; ++n) {
        for (std::size_t i = 0; i < r.num_faces; ++i) {
            double v;
            if (n == 0) v = r.at(0, i);
            else if (n == r.steps) v = r.at(r.steps - 1, i);
            else v = 0.5 * (r.at(n - 1, i) + r.at(n, i));
            out[static_cast<std::size_t>(n) * r.num_faces + i] = v;
        }
    }
    return out;
}

// Boundary data for the controlled runs.  q_half drives system A (normal
// velocity at half levels); p_int drives system B (pressure at integer
// levels).  The HUM synthesizer fills both from one scalar series.
struct ControlSignal {
    long steps = 0;
    double dt = 0.0;
    std::size_t num_faces = 0;
    std::vector<double> q_half;  // steps rows
    std::vector<double> p_int;   // steps+1 rows

    double q(long n, std::size_t i) const {
        return q_half[static_cast<std::size_t>(n) * num_faces + i];
    }
    double p(long n, std::size_t i) const {
        return p_int[static_cast<std::size_t>(n) * num_faces + i];
    }
};

// Spatial operators of the staggered scheme.  The face velocity update reads
// the side pressures through the continuous variable w = alpha p (so the
// pressure transmission condition is built in), and the cell pressure update
// reads the shared face flux s = m_f U through the face weight m_f (harmonic
// mean of beta across an interface), so the flux transmission condition holds
// exactly.  With these choices the semi-discrete energy telescopes to zero at
// every interior and interface face.
class WaveOperator {
public:
    WaveOperator(const LayeredGrid& grid, const MediumCoefficients& coeffs, SystemTag tag)
        : grid_(grid), tag_(tag) {
        coeffs.check_valid();
        if (static_cast<int>(coeffs.layers()) != grid.num_layers())
            throw ConfigError("coefficient layer count does not match the geometry");
        const std::vector<double>& a = (tag == SystemTag::A) ? coeffs.alpha : coeffs.gamma;
        const std::vector<double>& b = (tag == SystemTag::A) ? coeffs.beta : coeffs.tau;
        layer_a_ = a;
        layer_b_ = b;

        cell_a_.assign(static_cast<std::size_t>(grid.bbox_cells()), 0.0);
        for (long c = 0; c < grid.bbox_cells(); ++c) {
            int k = grid.layer_of(c);
            if (k >= 0) cell_a_[static_cast<std::size_t>(c)] = a[static_cast<std::size_t>(k)];
        }

        const std::size_t nf = grid.faces().size();
        face_m_.assign(nf, 0.0);
        face_omega_.assign(nf, 1.0);
        grad_lo_.assign(nf, 0.0);
        grad_hi_.assign(nf, 0.0);
        constrained_.assign(nf, 0);
        for (std::size_t fi = 0; fi < nf; ++fi) {
            const Face& f = grid.faces()[fi];
            double bl = (f.layer_lo >= 0) ? b[static_cast<std::size_t>(f.layer_lo)] : 0.0;
            double bh = (f.layer_hi >= 0) ? b[static_cast<std::size_t>(f.layer_hi)] : 0.0;
            double al = (f.layer_lo >= 0) ? a[static_cast<std::size_t>(f.layer_lo)] : 0.0;
            double ah = (f.layer_hi >= 0) ? a[static_cast<std::size_t>(f.layer_hi)] : 0.0;
            switch (f.type) {
            case FaceType::Interior:
                face_m_[fi] = bl;
                grad_lo_[fi] = al;
                grad_hi_[fi] = -ah;
                break;
            case FaceType::Interface:
                face_m_[fi] = 2.0 * bl * bh / (bl + bh);
                grad_lo_[fi] = al;
                grad_hi_[fi] = -ah;
                break;
            case FaceType::Outer:
                face_omega_[fi] = 0.5;
                if (tag == SystemTag::A) {
                    // u.eta is prescribed on S0: no pressure forcing, the
                    // evolve loops write the face value directly.
                    face_m_[fi] = (f.cell_lo >= 0) ? bl : bh;
                    constrained_[fi] = 1;
                } else {
                    // q is prescribed on S0; the homogeneous row uses the
                    // antisymmetric ghost, the control enters as a source.
                    face_m_[fi] = (f.cell_lo >= 0) ? bl : bh;
                    if (f.cell_lo >= 0) grad_lo_[fi] = 2.0 * al;
                    else grad_hi_[fi] = -2.0 * ah;
                }
                break;
            case FaceType::Inner:
                // pressure vanishes on S1 for both systems: antisymmetric ghost.
                face_omega_[fi] = 0.5;
                face_m_[fi] = (f.cell_lo >= 0) ? bl : bh;
                if (f.cell_lo >= 0) grad_lo_[fi] = 2.0 * al;
                else grad_hi_[fi] = -2.0 * ah;
                break;
            }
        }
        max_speed_ = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
            max_speed_ = std::max(max_speed_, std::sqrt(a[k] * b[k]));
    }

    const LayeredGrid& grid() const { return grid_; }
    SystemTag tag() const { return tag_; }
    const std::vector<double>& cell_coefficient() const { return cell_a_; }
    const std::vector<double>& face_weight() const { return face_m_; }
    const std::vector<double>& face_omega() const { return face_omega_; }
    const std::vector<double>& layer_a() const { return layer_a_; }
    const std::vector<double>& layer_b() const { return layer_b_; }
    bool constrained(std::size_t fi) const { return constrained_[fi] != 0; }

    double max_stable_dt() const {
        return grid_.spacing() / (max_speed_ * std::sqrt(static_cast<double>(grid_.dimension())));
    }

    // du/dt = -grad(w)/dx in the continuous face variable, tabulated rows.
    void apply_grad(const std::vector<double>& p, std::vector<double>& out) const {
        const double inv_dx = 1.0 / grid_.spacing();
        const auto& faces = grid_.faces();
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            const Face& f = faces[fi];
            double v = 0.0;
            if (f.cell_lo >= 0) v += grad_lo_[fi] * p[static_cast<std::size_t>(f.cell_lo)];
            if (f.cell_hi >= 0) v += grad_hi_[fi] * p[static_cast<std::size_t>(f.cell_hi)];
            out[fi] = v * inv_dx;
        }
    }

    // dp/dt = -div(s)/dx with s = m_f U the shared face flux.
    void apply_div(const std::vector<double>& u, std::vector<double>& out) const {
        const double inv_dx = 1.0 / grid_.spacing();
        std::fill(out.begin(), out.end(), 0.0);
        const auto& faces = grid_.faces();
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            const Face& f = faces[fi];
            double s = face_m_[fi] * u[fi] * inv_dx;
            if (f.cell_lo >= 0) out[static_cast<std::size_t>(f.cell_lo)] -= s;
            if (f.cell_hi >= 0) out[static_cast<std::size_t>(f.cell_hi)] += s;
        }
    }

    // Euclidean transposes of the two tables, accumulating (+=) into out.
    void apply_grad_transpose(const std::vector<double>& ubar, std::vector<double>& out) const {
        const double inv_dx = 1.0 / grid_.spacing();
        const auto& faces = grid_.faces();
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            const Face& f = faces[fi];
            double v = ubar[fi] * inv_dx;
            if (f.cell_lo >= 0) out[static_cast<std::size_t>(f.cell_lo)] += grad_lo_[fi] * v;
            if (f.cell_hi >= 0) out[static_cast<std::size_t>(f.cell_hi)] += grad_hi_[fi] * v;
        }
    }

    void apply_div_transpose(const std::vector<double>& pbar, std::vector<double>& out) const {
        const double inv_dx = 1.0 / grid_.spacing();
        const auto& faces = grid_.faces();
        for (std::size_t fi = 0; fi < faces.size(); ++fi) {
            const Face& f = faces[fi];
            double v = 0.0;
            if (f.cell_lo >= 0) v -= pbar[static_cast<std::size_t>(f.cell_lo)];
            if (f.cell_hi >= 0) v += pbar[static_cast<std::size_t>(f.cell_hi)];
            out[fi] += face_m_[fi] * v * inv_dx;
        }
    }

private:
    const LayeredGrid& grid_;
    SystemTag tag_;
    std::vector<double> layer_a_, layer_b_;
    std::vector<double> cell_a_;    // alpha (or gamma) per bbox cell, 0 outside
    std::vector<double> face_m_;    // beta (or tau) face weight, harmonic at interfaces
    std::vector<double> face_omega_;  // quadrature weight: 1 interior, 1/2 boundary
    std::vector<double> grad_lo_, grad_hi_;
    std::vector<char> constrained_;
    double max_speed_ = 0.0;
};

struct EnergyBreakdown {
    double total = 0.0;
    std::vector<double> per_layer;
};

// E = 1/2 integral of (beta |u|^2 + alpha p^2); midpoint quadrature with half
// weight on boundary faces.  Interface face energy splits between the two
// layers through the side traces of the continuous flux.
inline EnergyBreakdown energy(const WaveOperator& op, const AcousticField& f) {
    const LayeredGrid& g = op.grid();
    const double cell_vol = std::pow(g.spacing(), g.dimension());
    EnergyBreakdown e;
    e.per_layer.assign(static_cast<std::size_t>(g.num_layers()), 0.0);
    for (long c = 0; c < g.bbox_cells(); ++c) {
        int k = g.layer_of(c);
        if (k < 0) continue;
        double v = 0.5 * cell_vol * op.cell_coefficient()[static_cast<std::size_t>(c)] *
                   f.pressure[static_cast<std::size_t>(c)] * f.pressure[static_cast<std::size_t>(c)];
        e.per_layer[static_cast<std::size_t>(k)] += v;
    }
    for (std::size_t fi = 0; fi < g.faces().size(); ++fi) {
        const Face& fc = g.faces()[fi];
        double m = op.face_weight()[fi];
        double w = 0.5 * cell_vol * op.face_omega()[fi];
        double u = f.velocity[fi];
        if (fc.type == FaceType::Interface) {
            double s = m * u;
            double bl = op.layer_b()[static_cast<std::size_t>(fc.layer_lo)];
            double bh = op.layer_b()[static_cast<std::size_t>(fc.layer_hi)];
            e.per_layer[static_cast<std::size_t>(fc.layer_lo)] += 0.5 * w * s * s / bl;
            e.per_layer[static_cast<std::size_t>(fc.layer_hi)] += 0.5 * w * s * s / bh;
        } else {
            int k = (fc.layer_lo >= 0) ? fc.layer_lo : fc.layer_hi;
            e.per_layer[static_cast<std::size_t>(k)] += w * m * u * u;
        }
    }
    for (double v : e.per_layer) e.total += v;
    return e;
}

namespace detail {

inline void check_dt(const WaveOperator& op, double dt) {
    if (!(dt > 0.0)) throw CFLError("time step must be positive");
    if (dt > op.max_stable_dt() * (1.0 + 1e-12))
        throw CFLError("time step exceeds the CFL limit");
}

inline void check_finite(const std::vector<double>& v, const char* what) {
    double s = 0.0;
    for (double x : v) s += x;
    if (!std::isfinite(s)) throw NonFiniteError(std::string("non-finite values in ") + what);
}

// Staggered-compatible energy at t = (n+1/2) dt: the pressure part pairs the
// two bracketing integer levels, which makes the leapfrog value exactly
// conserved under homogeneous boundary conditions.
inline double staggered_energy(const WaveOperator& op, const std::vector<double>& p_old,
                               const std::vector<double>& p_new,
                               const std::vector<double>& u_half) {
    const LayeredGrid& g = op.grid();
    const double cell_vol = std::pow(g.spacing(), g.dimension());
    double e = 0.0;
    for (long c = 0; c < g.bbox_cells(); ++c)
        e += op.cell_coefficient()[static_cast<std::size_t>(c)] *
             p_old[static_cast<std::size_t>(c)] * p_new[static_cast<std::size_t>(c)];
    for (std::size_t fi = 0; fi < g.faces().size(); ++fi)
        e += op.face_omega()[fi] * op.face_weight()[fi] * u_half[fi] * u_half[fi];
    return 0.5 * cell_vol * e;
}

} // namespace detail

struct EvolveOptions {
    TraceRecord* traces = nullptr;
    std::vector<double>* energy_series = nullptr;  // staggered energy per step
    long snapshot_every = 0;
    std::function<void(long, const AcousticField&)> on_snapshot;
};

// Leapfrog over [t0, t0 + steps*dt] from collocated data; returns collocated
// data.  Homogeneous boundary conditions for the operator's system.
inline AcousticField evolve_homogeneous(const WaveOperator& op, const AcousticField& init,
                                        double dt, long steps, const EvolveOptions& opt = {}) {
    detail::check_dt(op, dt);
    const LayeredGrid& g = op.grid();
    AcousticField f = init;
    std::vector<double> du(f.velocity.size());
    std::vector<double> dp(f.pressure.size());
    std::vector<double> p_old;
    const bool record_energy = opt.energy_series != nullptr;
    const auto& s0 = g.s0_faces();

    if (op.tag() == SystemTag::A)
        for (std::size_t fi : s0) f.velocity[fi] = 0.0;

    // shift velocities to t0 - dt/2
    op.apply_grad(f.pressure, du);
    for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] -= 0.5 * dt * du[i];

    for (long n = 0; n < steps; ++n) {
        if (opt.traces && op.tag() == SystemTag::A) {
            for (std::size_t i = 0; i < s0.size(); ++i) {
                const Face& face = g.faces()[s0[i]];
                long c = (face.cell_lo >= 0) ? face.cell_lo : face.cell_hi;
                opt.traces->at(n, i) += 0.5 * f.pressure[static_cast<std::size_t>(c)];
            }
        }
        op.apply_grad(f.pressure, du);
        for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] += dt * du[i];
        if (opt.traces && op.tag() == SystemTag::B) {
            for (std::size_t i = 0; i < s0.size(); ++i) {
                const Face& face = g.faces()[s0[i]];
                opt.traces->at(n, i) = face.outward * f.velocity[s0[i]];
            }
        }
        if (record_energy) p_old = f.pressure;
        op.apply_div(f.velocity, dp);
        for (long c = 0; c < g.bbox_cells(); ++c)
            f.pressure[static_cast<std::size_t>(c)] += dt * dp[static_cast<std::size_t>(c)];
        if (opt.traces && op.tag() == SystemTag::A) {
            for (std::size_t i = 0; i < s0.size(); ++i) {
                const Face& face = g.faces()[s0[i]];
                long c = (face.cell_lo >= 0) ? face.cell_lo : face.cell_hi;
                opt.traces->at(n, i) += 0.5 * f.pressure[static_cast<std::size_t>(c)];
            }
        }
        if (record_energy)
            opt.energy_series->push_back(detail::staggered_energy(op, p_old, f.pressure, f.velocity));
        if (opt.snapshot_every > 0 && opt.on_snapshot && (n + 1) % opt.snapshot_every == 0) {
            AcousticField snap = f;
            snap.t = init.t + (n + 1) * dt;
            op.apply_grad(snap.pressure, du);
            for (std::size_t i = 0; i < du.size(); ++i) snap.velocity[i] += 0.5 * dt * du[i];
            if (op.tag() == SystemTag::A)
                for (std::size_t fi : s0) snap.velocity[fi] = 0.0;
            opt.on_snapshot(n + 1, snap);
        }
        if ((n & 1023) == 1023) detail::check_finite(f.pressure, "pressure");
    }

    // collocate velocities at the final time
    op.apply_grad(f.pressure, du);
    for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] += 0.5 * dt * du[i];
    if (op.tag() == SystemTag::A)
        for (std::size_t fi : s0) f.velocity[fi] = 0.0;
    detail::check_finite(f.pressure, "pressure");
    detail::check_finite(f.velocity, "velocity");
    f.t = init.t + steps * dt;
    return f;
}

// Algebraic inverse of evolve_homogeneous: running it on that function's
// output returns the initial data to round-off.
inline AcousticField evolve_backward(const WaveOperator& op, const AcousticField& final_state,
                                     double dt, long steps) {
    detail::check_dt(op, dt);
    const LayeredGrid& g = op.grid();
    AcousticField f = final_state;
    std::vector<double> du(f.velocity.size());
    std::vector<double> dp(f.pressure.size());
    const auto& s0 = g.s0_faces();

    if (op.tag() == SystemTag::A)
        for (std::size_t fi : s0) f.velocity[fi] = 0.0;

    op.apply_grad(f.pressure, du);
    for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] -= 0.5 * dt * du[i];

    for (long n = steps - 1; n >= 0; --n) {
        op.apply_div(f.velocity, dp);
        for (long c = 0; c < g.bbox_cells(); ++c)
            f.pressure[static_cast<std::size_t>(c)] -= dt * dp[static_cast<std::size_t>(c)];
        op.apply_grad(f.pressure, du);
        for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] -= dt * du[i];
    }

    op.apply_grad(f.pressure, du);
    for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] += 0.5 * dt * du[i];
    if (op.tag() == SystemTag::A)
        for (std::size_t fi : s0) f.velocity[fi] = 0.0;
    f.t = final_state.t - steps * dt;
    return f;
}

// Controlled run: system A prescribes the outward normal velocity on S0 at
// half levels; system B prescribes the boundary pressure at integer levels
// through the ghost source.  Zero control reproduces the homogeneous run
// bitwise.
inline AcousticField evolve_controlled(const WaveOperator& op, const AcousticField& init,
                                       double dt, long steps, const ControlSignal& ctl,
                                       std::vector<double>* energy_series = nullptr) {
    detail::check_dt(op, dt);
    const LayeredGrid& g = op.grid();
    if (ctl.steps != steps || ctl.num_faces != g.s0_faces().size())
        throw LengthMismatch("control signal does not match the run layout");
    AcousticField f = init;
    std::vector<double> du(f.velocity.size());
    std::vector<double> dp(f.pressure.size());
    std::vector<double> p_old;
    const auto& s0 = g.s0_faces();
    const double src_scale = 2.0 / g.spacing();

    if (op.tag() == SystemTag::A)
        for (std::size_t fi : s0) f.velocity[fi] = 0.0;

    op.apply_grad(f.pressure, du);
    for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] -= 0.5 * dt * du[i];

    for (long n = 0; n < steps; ++n) {
        op.apply_grad(f.pressure, du);
        for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] += dt * du[i];
        if (op.tag() == SystemTag::A) {
            for (std::size_t i = 0; i < s0.size(); ++i) {
                const Face& face = g.faces()[s0[i]];
                f.velocity[s0[i]] = face.outward * ctl.q(n, i);
            }
        } else {
            // ghost pressure 2P - q_in instead of -q_in: source term on top
            // of the homogeneous row, evaluated at the integer level n.
            for (std::size_t i = 0; i < s0.size(); ++i) {
                const Face& face = g.faces()[s0[i]];
                long c = (face.cell_lo >= 0) ? face.cell_lo : face.cell_hi;
                double a = op.cell_coefficient()[static_cast<std::size_t>(c)];
                f.velocity[s0[i]] -= dt * face.outward * src_scale * a * ctl.p(n, i);
            }
        }
        if (energy_series) p_old = f.pressure;
        op.apply_div(f.velocity, dp);
        for (long c = 0; c < g.bbox_cells(); ++c)
            f.pressure[static_cast<std::size_t>(c)] += dt * dp[static_cast<std::size_t>(c)];
        if (energy_series)
            energy_series->push_back(detail::staggered_energy(op, p_old, f.pressure, f.velocity));
        if ((n & 1023) == 1023) detail::check_finite(f.pressure, "pressure");
    }

    op.apply_grad(f.pressure, du);
    for (std::size_t i = 0; i < du.size(); ++i) f.velocity[i] += 0.5 * dt * du[i];
    if (op.tag() == SystemTag::A) {
        for (std::size_t i = 0; i < s0.size(); ++i) {
            const Face& face = g.faces()[s0[i]];
            f.velocity[s0[i]] = face.outward * ctl.q(steps - 1, i);
        }
    }
    detail::check_finite(f.pressure, "pressure");
    f.t = init.t + steps * dt;
    return f;
}

// Euclidean adjoint of the linear map (u0, p0) -> half-level S0 trace series
// produced by evolve_homogeneous.  Used by the HUM Gramian, where exact
// transposition gives exact Gramian symmetry.
inline void adjoint_of_traces(const WaveOperator& op, const TraceRecord& lambda, double dt,
                              std::vector<double>& ubar, std::vector<double>& pbar) {
    const LayeredGrid& g = op.grid();
    const auto& s0 = g.s0_faces();
    ubar.assign(g.faces().size(), 0.0);
    pbar.assign(static_cast<std::size_t>(g.bbox_cells()), 0.0);
    std::vector<double> acc_u(ubar.size());
    std::vector<double> acc_p(pbar.size());

    auto inject_pressure = [&](long n) {
        for (std::size_t i = 0; i < s0.size(); ++i) {
            const Face& face = g.faces()[s0[i]];
            long c = (face.cell_lo >= 0) ? face.cell_lo : face.cell_hi;
            pbar[static_cast<std::size_t>(c)] += 0.5 * lambda.at(n, i);
        }
    };
    auto add_grad_t = [&](double scale) {
        std::fill(acc_p.begin(), acc_p.end(), 0.0);
        op.apply_grad_transpose(ubar, acc_p);
        for (std::size_t c = 0; c < pbar.size(); ++c) pbar[c] += scale * acc_p[c];
    };

    for (long n = lambda.steps - 1; n >= 0; --n) {
        if (op.tag() == SystemTag::A) inject_pressure(n);
        std::fill(acc_u.begin(), acc_u.end(), 0.0);
        op.apply_div_transpose(pbar, acc_u);
        for (std::size_t i = 0; i < acc_u.size(); ++i) ubar[i] += dt * acc_u[i];
        if (op.tag() == SystemTag::B) {
            for (std::size_t i = 0; i < s0.size(); ++i) {
                const Face& face = g.faces()[s0[i]];
                ubar[s0[i]] += face.outward * lambda.at(n, i);
            }
        }
        add_grad_t(dt);
        if (op.tag() == SystemTag::A) inject_pressure(n);
    }

    // transpose of the initial half-step shift, then of the S0 projection
    add_grad_t(-0.5 * dt);
    if (op.tag() == SystemTag::A)
        for (std::size_t fi : s0) ubar[fi] = 0.0;
}

} // namespace simwave

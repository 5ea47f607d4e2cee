#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "simwave/coefficients.hpp"
#include "simwave/errors.hpp"
#include "simwave/grid.hpp"
#include "simwave/initial_data.hpp"
#include "simwave/multiplier.hpp"
#include "simwave/poisson.hpp"
#include "simwave/solver.hpp"

namespace simwave {

inline std::pair<double, long> choose_time_step(const WaveOperator& opa,
                                                const WaveOperator& opb, double T,
                                                double cfl) {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    double dt_max = cfl * std::min(opa.max_stable_dt(), opb.max_stable_dt());
    long steps = static_cast<long>(std::ceil(T / dt_max - 1e-12));
    steps = std::max<long>(steps, 1);
    return {T / static_cast<double>(steps), steps};
}

struct ObservationValue {
    double combined = 0.0;   // integral of [alpha p - tau v.eta]^2 dh/dn
    double separated = 0.0;  // integral of [alpha p^2 + tau (v.eta)^2] dh/dn
};

// Boundary observation over S0 x (0,T) from half-level traces of the two
// homogeneous systems; midpoint rule in time, face quadrature in space.
inline ObservationValue observation_functional(const TraceRecord& ta, const TraceRecord& tb,
                                               const MultiplierData& md,
                                               const WaveOperator& opa,
                                               const WaveOperator& opb) {
    const LayeredGrid& g = opa.grid();
    const auto& s0 = g.s0_faces();
    if (ta.steps != tb.steps || ta.num_faces != tb.num_faces || ta.num_faces != s0.size())
        throw LengthMismatch("trace records do not share a layout");
    const double dS = std::pow(g.spacing(), g.dimension() - 1);
    ObservationValue out;
    for (long n = 0; n < ta.steps; ++n) {
        for (std::size_t i = 0; i < s0.size(); ++i) {
            const Face& face = g.faces()[s0[i]];
            long c = (face.cell_lo >= 0) ? face.cell_lo : face.cell_hi;
            double alpha = opa.cell_coefficient()[static_cast<std::size_t>(c)];
            double tau = opb.face_weight()[s0[i]];
            double dh = md.dh_dn[s0[i]];
            double k = ta.at(n, i);
            double mn = tb.at(n, i);
            double s = alpha * k - tau * mn;
            out.combined += s * s * dh;
            out.separated += (alpha * k * k + tau * mn * mn) * dh;
        }
    }
    out.combined *= ta.dt * dS;
    out.separated *= ta.dt * dS;
    return out;
}

struct ObservabilityConstants {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double c6 = 0.0, c7 = 0.0, c8 = 0.0, c9 = 0.0;
    double t0 = 0.0;
    bool c2_estimated = false;
};

// Explicit sufficient-condition constants.  The dimensional factor in c1 is d
// (the source derivation fixes d=3); c6 repeats the c5 chain with the second
// system's coefficients; c2 defaults to the measured inverse of the smallest
// nonzero Neumann eigenvalue of the domain.
inline ObservabilityConstants observability_constants(const MediumCoefficients& coeffs,
                                      const MultiplierData& md, const LayeredGrid& grid,
                                      double T,
                                      double c2_user = std::numeric_limits<double>::quiet_NaN(),
                                      bool allow_estimate = true) {
    coeffs.check_valid();
    ObservabilityConstants pc;
    if (std::isfinite(c2_user)) {
        pc.c2 = c2_user;
    } else {
        if (!allow_estimate) throw MissingC2("no c2 value given and estimation disabled");
        NeumannPoisson poisson(grid);
        pc.c2 = 1.0 / poisson.smallest_nonzero_eigenvalue();
        pc.c2_estimated = true;
    }
    const int d = grid.dimension();
    auto chain = [&](const std::vector<double>& a, const std::vector<double>& b, double& c1,
                     double& c3, double& c4) {
        double inv = 0.0, inv_ab = 0.0, c4v = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            inv = std::max({inv, 1.0 / a[k], 1.0 / b[k]});
            inv_ab = std::max(inv_ab, 1.0 / (a[k] * b[k]));
            c4v = std::max({c4v, pc.c2 / b[k], 1.0 / a[k]});
        }
        c1 = d * inv * md.max_grad_h;
        c3 = pc.c2 * inv_ab;
        c4 = c4v;
    };
    double c1b, c3b, c4b;
    chain(coeffs.alpha, coeffs.beta, pc.c1, pc.c3, pc.c4);
    chain(coeffs.gamma, coeffs.tau, c1b, c3b, c4b);
    pc.c5 = pc.c3 + (2.0 * pc.c1 + pc.c4) * T;
    pc.c6 = c3b + (2.0 * c1b + c4b) * T;
    double margin = 1.0 - md.delta0 * (1.0 - md.mu);
    pc.c7 = (margin > 0.0) ? 4.0 / margin : std::numeric_limits<double>::infinity();
    double c8 = 0.0, c9 = 0.0;
    std::size_t outer = coeffs.layers() - 1;
    c8 = std::max(1.0 / coeffs.alpha[outer], 1.0 / coeffs.tau[outer]);
    for (std::size_t k = 0; k < coeffs.layers(); ++k)
        c9 = std::max({c9, coeffs.tau[k] / coeffs.beta[k], coeffs.alpha[k] / coeffs.tau[k]});
    pc.c8 = c8;
    pc.c9 = c9;
    pc.t0 = (margin > 0.0) ? std::max(1.0, (pc.c5 + pc.c6) / margin)
                           : std::numeric_limits<double>::infinity();
    return pc;
}

struct ObservabilityReport {
    double T = 0.0;
    double observation = 0.0;       // worst-trial combined functional
    double weighted_energy = 0.0;   // worst-trial LHS energy sum
    double quotient = 0.0;          // min over trials of observation/energy
    ObservabilityConstants constants;
    double t0_empirical = std::numeric_limits<double>::quiet_NaN();
    unsigned seed = 0;
    int trials = 0;
    long steps = 0;
};

namespace detail {

// Gaussian window pinned to the inner boundary, used for the finite-speed
// probes; multiplying the potential keeps the gradient structure and the
// inner trace condition.
inline std::function<double(const std::array<double, 3>&)>
near_s1_envelope(const LayeredGrid& grid) {
    const int d = grid.dimension();
    const double inner = grid.bounds().front();
    const double width = 0.1 * (grid.bounds().back() - inner);
    return [d, inner, width](const std::array<double, 3>& x) {
        double r;
        if (d == 1) {
            r = x[0];
        } else {
            r = 0.0;
            for (int a = 0; a < d; ++a) r = std::max(r, std::abs(x[a]));
        }
        double z = (r - inner) / width;
        return std::exp(-z * z);
    };
}

} // namespace detail

// One sampled pair of initial data for the two systems; deterministic given
// (grid bounds, seed), so refinements see the same continuum fields.
struct SampledData {
    AcousticField a;
    AcousticField b;
};

inline SampledData sample_initial_data(const LayeredGrid& grid, unsigned seed,
                                       bool near_s1 = false) {
    TrigPotential l(grid, seed);
    TrigPotential m(grid, seed + 1);
    TrigScalar p0(grid, seed + 2);
    TrigScalar q0(grid, seed + 3);
    std::function<double(const std::array<double, 3>&)> env;
    if (near_s1) env = detail::near_s1_envelope(grid);
    auto wrap = [&](auto fn) {
        return [fn, &env](const std::array<double, 3>& x) {
            return env ? env(x) * fn(x) : fn(x);
        };
    };
    SampledData d;
    d.a = make_zero_field(grid, SystemTag::A);
    d.b = make_zero_field(grid, SystemTag::B);
    d.a.velocity = make_gradient_velocity(grid, wrap(l));
    d.b.velocity = make_gradient_velocity(grid, wrap(m));
    d.a.pressure = make_cell_samples(grid, wrap(p0));
    d.b.pressure = make_cell_samples(grid, wrap(q0));
    return d;
}

inline double single_quotient(const WaveOperator& opa, const WaveOperator& opb,
                              const MultiplierData& md, const SampledData& data, double T,
                              double cfl, long* steps_out = nullptr) {
    auto [dt, steps] = choose_time_step(opa, opb, T, cfl);
    if (steps_out) *steps_out = steps;
    TraceRecord ta = make_trace_record(opa.grid(), dt, steps);
    TraceRecord tb = make_trace_record(opb.grid(), dt, steps);
    EvolveOptions oa, ob;
    oa.traces = &ta;
    ob.traces = &tb;
    evolve_homogeneous(opa, data.a, dt, steps, oa);
    evolve_homogeneous(opb, data.b, dt, steps, ob);
    ObservationValue ov = observation_functional(ta, tb, md, opa, opb);
    double lhs = 2.0 * (energy(opa, data.a).total + energy(opb, data.b).total);
    if (lhs <= 0.0) throw ConfigError("observability quotient needs nonzero initial data");
    return ov.combined / lhs;
}

inline ObservabilityReport observability_quotient(const LayeredGrid& grid,
                                                  const MediumCoefficients& coeffs,
                                                  const MultiplierData& md, double T,
                                                  int trials, unsigned seed,
                                                  double cfl = 0.9, bool near_s1 = false,
                                                  double c2_user = std::numeric_limits<double>::quiet_NaN()) {
    WaveOperator opa(grid, coeffs, SystemTag::A);
    WaveOperator opb(grid, coeffs, SystemTag::B);
    ObservabilityReport rep;
    rep.T = T;
    rep.seed = seed;
    rep.trials = trials;
    rep.quotient = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        SampledData data = sample_initial_data(grid, seed + 101u * static_cast<unsigned>(t), near_s1);
        auto [dt, steps] = choose_time_step(opa, opb, T, cfl);
        TraceRecord ta = make_trace_record(grid, dt, steps);
        TraceRecord tb = make_trace_record(grid, dt, steps);
        EvolveOptions oa, ob;
        oa.traces = &ta;
        ob.traces = &tb;
        evolve_homogeneous(opa, data.a, dt, steps, oa);
        evolve_homogeneous(opb, data.b, dt, steps, ob);
        ObservationValue ov = observation_functional(ta, tb, md, opa, opb);
        double lhs = 2.0 * (energy(opa, data.a).total + energy(opb, data.b).total);
        double q = ov.combined / lhs;
        rep.steps = steps;
        if (q < rep.quotient) {
            rep.quotient = q;
            rep.observation = ov.combined;
            rep.weighted_energy = lhs;
        }
    }
    rep.constants = observability_constants(coeffs, md, grid, T, c2_user);
    return rep;
}

// Smallest horizon with a quotient at least a tenth of the long-horizon
// value, located by bisection; a loose but measured counterpart of t0.
inline double empirical_t0(const LayeredGrid& grid, const MediumCoefficients& coeffs,
                           const MultiplierData& md, double t_max, unsigned seed,
                           double cfl = 0.9) {
    WaveOperator opa(grid, coeffs, SystemTag::A);
    WaveOperator opb(grid, coeffs, SystemTag::B);
    SampledData data = sample_initial_data(grid, seed);
    double q_ref = single_quotient(opa, opb, md, data, t_max, cfl);
    double threshold = 0.1 * q_ref;
    double lo = 0.0, hi = t_max;
    for (int it = 0; it < 8; ++it) {
        double mid = 0.5 * (lo + hi);
        double q = single_quotient(opa, opb, md, data, mid, cfl);
        if (q >= threshold) hi = mid;
        else lo = mid;
    }
    return hi;
}

struct IdentityResidual {
    double total = 0.0;    // L2 norm of dA/dt - div B - J over the margin cells
    double j_norm = 0.0;   // L2 norm of J alone
    long cells = 0;
    long steps = 0;
};

// Space-time conservation-law check for the first system in 3D.  A carries
// the running time integrals of p and u, so the evolution below accumulates
// them alongside the leapfrog update; all spatial derivatives are centered,
// restricted to cells with two interior neighbor rings.
inline IdentityResidual multiplier_identity_residual(const LayeredGrid& grid,
                                                     const MediumCoefficients& coeffs,
                                                     const MultiplierData& md,
                                                     const AcousticField& init, double T,
                                                     double cfl = 0.9) {
    if (grid.dimension() != 3) throw DimensionError("the identity check needs d = 3");
    WaveOperator op(grid, coeffs, SystemTag::A);
    auto [dt, steps] = choose_time_step(op, op, T, cfl);
    const double dx = grid.spacing();
    const double inv2dx = 0.5 / dx;
    const std::size_t nc = static_cast<std::size_t>(grid.bbox_cells());

    auto ring_inside = [&](long c, int rings) {
        std::array<long, 3> ijk = grid.unflatten(c);
        const auto& n = grid.cells_per_axis();
        for (long di = -rings; di <= rings; ++di)
            for (long dj = -rings; dj <= rings; ++dj)
                for (long dk = -rings; dk <= rings; ++dk) {
                    std::array<long, 3> q{ijk[0] + di, ijk[1] + dj, ijk[2] + dk};
                    for (int a = 0; a < 3; ++a)
                        if (q[a] < 0 || q[a] >= n[a]) return false;
                    if (!grid.inside(grid.flatten(q))) return false;
                }
        return true;
    };
    std::vector<long> eval1, eval2;  // 1-ring cells (fields), 2-ring cells (residual)
    std::vector<char> is1(nc, 0);
    for (long c = 0; c < grid.bbox_cells(); ++c) {
        if (!grid.inside(c)) continue;
        if (ring_inside(c, 1)) {
            eval1.push_back(c);
            is1[static_cast<std::size_t>(c)] = 1;
        }
        if (ring_inside(c, 2)) eval2.push_back(c);
    }

    // cell-centered grad h (exact for the quadratic part)
    std::vector<std::array<double, 3>> gh(nc, {0.0, 0.0, 0.0});
    for (long c : eval1)
        for (int a = 0; a < 3; ++a)
            gh[static_cast<std::size_t>(c)][a] =
                (md.h[static_cast<std::size_t>(grid.neighbor(c, a, +1))] -
                 md.h[static_cast<std::size_t>(grid.neighbor(c, a, -1))]) * inv2dx;

    // leapfrog state plus the running integrals and the identity windows
    std::vector<double> P = init.pressure;
    std::vector<double> U = init.velocity;
    std::vector<double> du(U.size());
    std::vector<double> dp(P.size());
    op.apply_grad(P, du);
    std::vector<double> U_lo(U.size());  // U at n-1/2
    std::vector<double> U_hi = U;        // U at n+1/2
    for (std::size_t i = 0; i < U.size(); ++i) {
        U_lo[i] = U[i] - 0.5 * dt * du[i];
        U_hi[i] = U[i] + 0.5 * dt * du[i];
    }
    for (std::size_t fi : grid.s0_faces()) {
        U_lo[fi] = 0.0;
        U_hi[fi] = 0.0;
    }

    std::vector<std::array<double, 3>> u0_cell(nc, {0.0, 0.0, 0.0});
    std::vector<std::array<double, 3>> u_cell(nc, {0.0, 0.0, 0.0});
    std::vector<std::array<double, 3>> iu(nc, {0.0, 0.0, 0.0});
    std::vector<double> ip(nc, 0.0);
    std::vector<double> p_prev(nc, 0.0);
    std::vector<std::array<double, 3>> u_prev(nc, {0.0, 0.0, 0.0});

    auto collocate = [&](std::vector<std::array<double, 3>>& out) {
        for (long c : eval1) {
            std::array<double, 3> v{0.0, 0.0, 0.0};
            for (int a = 0; a < 3; ++a) {
                auto [flo, fhi] = grid.cell_faces(c, a);
                double lo = 0.5 * (U_lo[static_cast<std::size_t>(flo)] + U_hi[static_cast<std::size_t>(flo)]);
                double hi = 0.5 * (U_lo[static_cast<std::size_t>(fhi)] + U_hi[static_cast<std::size_t>(fhi)]);
                v[a] = 0.5 * (lo + hi);
            }
            out[static_cast<std::size_t>(c)] = v;
        }
    };

    std::vector<double> A_lvl[3];
    for (auto& v : A_lvl) v.assign(nc, 0.0);
    std::vector<std::array<double, 3>> B_prev(nc, {0.0, 0.0, 0.0});
    std::vector<double> J_prev(nc, 0.0);
    std::vector<std::array<double, 3>> B_cur(nc, {0.0, 0.0, 0.0});
    std::vector<double> J_cur(nc, 0.0);

    IdentityResidual res;
    res.steps = steps;
    res.cells = static_cast<long>(eval2.size());
    double sum_r2 = 0.0, sum_j2 = 0.0;

    auto hess = [&](long c, int i, int j) {
        const auto& H = md.h;
        if (i == j) {
            long lo = grid.neighbor(c, i, -1), hi = grid.neighbor(c, i, +1);
            return (H[static_cast<std::size_t>(hi)] - 2.0 * H[static_cast<std::size_t>(c)] +
                    H[static_cast<std::size_t>(lo)]) / (dx * dx);
        }
        long pp = grid.neighbor(grid.neighbor(c, i, +1), j, +1);
        long pm = grid.neighbor(grid.neighbor(c, i, +1), j, -1);
        long mp = grid.neighbor(grid.neighbor(c, i, -1), j, +1);
        long mm = grid.neighbor(grid.neighbor(c, i, -1), j, -1);
        return (md.h[static_cast<std::size_t>(pp)] - md.h[static_cast<std::size_t>(pm)] -
                md.h[static_cast<std::size_t>(mp)] + md.h[static_cast<std::size_t>(mm)]) /
               (4.0 * dx * dx);
    };

    for (long n = 0; n <= steps; ++n) {
        const double t = n * dt;
        collocate(u_cell);
        if (n == 0) {
            u0_cell = u_cell;
        } else {
            for (long c : eval1) {
                std::size_t ci = static_cast<std::size_t>(c);
                ip[ci] += 0.5 * dt * (p_prev[ci] + P[ci]);
                for (int a = 0; a < 3; ++a)
                    iu[ci][a] += 0.5 * dt * (u_prev[ci][a] + u_cell[ci][a]);
            }
        }

        std::vector<double>& A_cur = A_lvl[n % 3];
        for (long c : eval1) {
            std::size_t ci = static_cast<std::size_t>(c);
            int layer = grid.layer_of(c);
            double alpha = coeffs.alpha[static_cast<std::size_t>(layer)];
            double beta = coeffs.beta[static_cast<std::size_t>(layer)];
            const auto& u = u_cell[ci];
            double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
            double udoth = u[0] * gh[ci][0] + u[1] * gh[ci][1] + u[2] * gh[ci][2];
            double u0dotiu = u0_cell[ci][0] * iu[ci][0] + u0_cell[ci][1] * iu[ci][1] +
                             u0_cell[ci][2] * iu[ci][2];
            A_cur[ci] = t * (beta * u2 + alpha * P[ci] * P[ci]) - 2.0 * P[ci] * udoth +
                        2.0 * alpha * P[ci] * ip[ci] - 2.0 * beta * u0dotiu;
            for (int a = 0; a < 3; ++a)
                B_cur[ci][a] = -2.0 * alpha * beta * t * P[ci] * u[a] +
                               alpha * P[ci] * P[ci] * gh[ci][a] - beta * u2 * gh[ci][a] +
                               2.0 * beta * udoth * u[a] - 2.0 * alpha * beta * ip[ci] * u[a];
            double hij_quad = 0.0, lap_h = 0.0;
            for (int i2 = 0; i2 < 3; ++i2) {
                lap_h += hess(c, i2, i2);
                for (int j2 = 0; j2 < 3; ++j2) hij_quad += hess(c, i2, j2) * u[i2] * u[j2];
            }
            J_cur[ci] = beta * (lap_h - 1.0) * u2 - 2.0 * beta * hij_quad -
                        alpha * (lap_h - 3.0) * P[ci] * P[ci];
        }

        if (n >= 2) {
            const std::vector<double>& A_new = A_lvl[n % 3];
            const std::vector<double>& A_old = A_lvl[(n - 2) % 3];
            for (long c : eval2) {
                std::size_t ci = static_cast<std::size_t>(c);
                double dAdt = (A_new[ci] - A_old[ci]) / (2.0 * dt);
                double divB = 0.0;
                for (int a = 0; a < 3; ++a) {
                    long hi = grid.neighbor(c, a, +1), lo = grid.neighbor(c, a, -1);
                    divB += (B_prev[static_cast<std::size_t>(hi)][a] -
                             B_prev[static_cast<std::size_t>(lo)][a]) * inv2dx;
                }
                double r = dAdt - divB - J_prev[ci];
                sum_r2 += r * r;
                sum_j2 += J_prev[ci] * J_prev[ci];
            }
        }
        std::swap(B_prev, B_cur);
        std::swap(J_prev, J_cur);

        if (n < steps) {
            p_prev = P;
            u_prev = u_cell;
            std::swap(U_lo, U_hi);
            op.apply_div(U_lo, dp);
            for (std::size_t ci = 0; ci < nc; ++ci) P[ci] += dt * dp[ci];
            op.apply_grad(P, du);
            for (std::size_t i = 0; i < U_hi.size(); ++i) U_hi[i] = U_lo[i] + dt * du[i];
            for (std::size_t fi : grid.s0_faces()) U_hi[fi] = 0.0;
        }
    }

    const double w = std::pow(dx, 3) * dt;
    res.total = std::sqrt(sum_r2 * w);
    res.j_norm = std::sqrt(sum_j2 * w);
    return res;
}

struct InterfaceIdentityReport {
    std::vector<double> max_discrepancy;  // per interface
    std::vector<double> max_rhs;          // per interface, signed
};

// Both sides of the interface jump identity for the normal component of B,
// evaluated from shared face variables (so the equal-coefficient case cancels
// exactly) at every step of a homogeneous run of the first system.
inline InterfaceIdentityReport interface_flux_check(const WaveOperator& op,
                                                    const MultiplierData& md,
                                                    const AcousticField& init, double dt,
                                                    long steps) {
    const LayeredGrid& g = op.grid();
    InterfaceIdentityReport rep;
    rep.max_discrepancy.assign(g.interfaces().size(), 0.0);
    rep.max_rhs.assign(g.interfaces().size(),
                       -std::numeric_limits<double>::infinity());
    if (g.interfaces().empty()) return rep;

    detail::check_dt(op, dt);
    std::vector<double> P = init.pressure;
    std::vector<double> U = init.velocity;
    std::vector<double> du(U.size());
    std::vector<double> dp(P.size());
    for (std::size_t fi : g.s0_faces()) U[fi] = 0.0;
    op.apply_grad(P, du);
    for (std::size_t i = 0; i < U.size(); ++i) U[i] -= 0.5 * dt * du[i];

    auto evaluate = [&]() {
        for (std::size_t k = 0; k < g.interfaces().size(); ++k) {
            for (std::size_t fi : g.interfaces()[k]) {
                const Face& f = g.faces()[fi];
                int klo = f.layer_lo, khi = f.layer_hi;
                int km1 = std::min(klo, khi);  // layer k-1 side
                int kk = std::max(klo, khi);
                double a_m = op.layer_a()[static_cast<std::size_t>(km1)];
                double a_k = op.layer_a()[static_cast<std::size_t>(kk)];
                double b_m = op.layer_b()[static_cast<std::size_t>(km1)];
                double b_k = op.layer_b()[static_cast<std::size_t>(kk)];
                double w = 0.5 * (op.layer_a()[static_cast<std::size_t>(klo)] *
                                      P[static_cast<std::size_t>(f.cell_lo)] +
                                  op.layer_a()[static_cast<std::size_t>(khi)] *
                                      P[static_cast<std::size_t>(f.cell_hi)]);
                double s = f.normal * op.face_weight()[fi] * U[fi];
                double dh = md.dh_dn[fi];
                // shared tangential velocity and tangential grad h
                double ut2 = 0.0, utgt = 0.0;
                for (int t = 0; t < g.dimension(); ++t) {
                    if (t == f.axis) continue;
                    auto [l1, h1] = g.cell_faces(f.cell_lo, t);
                    auto [l2, h2] = g.cell_faces(f.cell_hi, t);
                    double ut = 0.25 * (U[static_cast<std::size_t>(l1)] + U[static_cast<std::size_t>(h1)] +
                                        U[static_cast<std::size_t>(l2)] + U[static_cast<std::size_t>(h2)]);
                    double gt = 0.25 * (md.grad_h[static_cast<std::size_t>(l1)] +
                                        md.grad_h[static_cast<std::size_t>(h1)] +
                                        md.grad_h[static_cast<std::size_t>(l2)] +
                                        md.grad_h[static_cast<std::size_t>(h2)]);
                    ut2 += ut * ut;
                    utgt += ut * gt;
                }
                auto side = [&](double a, double b) {
                    double pn = w / a;
                    double un = s / b;
                    double u2 = un * un + ut2;
                    double udoth = un * dh + utgt;
                    return a * pn * pn * dh - b * u2 * dh + 2.0 * b * udoth * un;
                };
                double lhs = side(a_m, b_m) - side(a_k, b_k);
                double pk = w / a_k;
                double unk = s / b_k;
                double rhs = -dh * ((a_m - a_k) * (a_k / a_m) * pk * pk +
                                    (b_m - b_k) * (b_k / b_m) * unk * unk +
                                    (b_m - b_k) * ut2);
                rep.max_discrepancy[k] = std::max(rep.max_discrepancy[k], std::abs(lhs - rhs));
                rep.max_rhs[k] = std::max(rep.max_rhs[k], rhs);
            }
        }
    };

    for (long n = 0; n < steps; ++n) {
        op.apply_grad(P, du);
        for (std::size_t i = 0; i < U.size(); ++i) U[i] += dt * du[i];
        op.apply_div(U, dp);
        for (std::size_t ci = 0; ci < P.size(); ++ci) P[ci] += dt * dp[ci];
        evaluate();
    }
    return rep;
}

} // namespace simwave

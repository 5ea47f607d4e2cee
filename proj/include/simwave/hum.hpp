#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <cstddef>
#include <utility>
#include <vector>

#include "simwave/coefficients.hpp"
#include "simwave/errors.hpp"
#include "simwave/filter.hpp"
#include "simwave/grid.hpp"
#include "simwave/observability.hpp"
#include "simwave/solver.hpp"

namespace simwave {

// Pair of initial data, one per system; the controller works on this product
// space with the weighted inner product matching the physical energies.
struct HUMVector {
    AcousticField g1;  // first system (u, p)
    AcousticField g2;  // second system (v, q)
};

struct ControlReport {
    long cg_iterations = 0;
    std::vector<double> cg_residual_history;
    bool converged = false;
    double y_norm = 0.0;
    double initial_energy_a = 0.0, final_energy_a = 0.0;
    double initial_energy_b = 0.0, final_energy_b = 0.0;
    double ratio_a = 0.0, ratio_b = 0.0;
    double energy_ratio = 0.0;  // max of the two ratios; 0 for a zero target
    ControlSignal controls;     // q_half holds Q, p_int holds P = -(beta/gamma) Q
    double T = 0.0;
    long steps = 0;
};

// Gramian machinery for one fixed (grid, coefficients, horizon) problem.
// The Gramian is realized as the exact algorithmic transpose of the
// homogeneous-evolution trace map, which makes its symmetry and the
// consistency with the boundary inner product hold to rounding.
class HUMController {
public:
    static constexpr long kPolishIterations = 30;
    static constexpr long kMaxCycles = 5;

    HUMController(const LayeredGrid& grid, const MediumCoefficients& coeffs, double T,
                  double cfl = 0.9)
        : grid_(grid), coeffs_(coeffs), opa_(grid, coeffs, SystemTag::A),
          opb_(grid, coeffs, SystemTag::B), T_(T) {
        HypothesisReport hr = validate_compatibility(coeffs);
        if (!hr.compatible)
            throw IncompatibleCoefficients("the two systems do not share the duality algebra");
        std::tie(dt_, steps_) = choose_time_step(opa_, opb_, T, cfl);
        const auto& s0 = grid.s0_faces();
        alpha_out_.resize(s0.size());
        tau_out_.resize(s0.size());
        beta_out_.resize(s0.size());
        gamma_out_.resize(s0.size());
        for (std::size_t i = 0; i < s0.size(); ++i) {
            const Face& f = grid.faces()[s0[i]];
            long c = (f.cell_lo >= 0) ? f.cell_lo : f.cell_hi;
            int k = grid.layer_of(c);
            alpha_out_[i] = coeffs.alpha[static_cast<std::size_t>(k)];
            beta_out_[i] = coeffs.beta[static_cast<std::size_t>(k)];
            gamma_out_[i] = coeffs.gamma[static_cast<std::size_t>(k)];
            tau_out_[i] = coeffs.tau[static_cast<std::size_t>(k)];
        }
    }

    double dt() const { return dt_; }
    long steps() const { return steps_; }
    const WaveOperator& op_a() const { return opa_; }
    const WaveOperator& op_b() const { return opb_; }

    HUMVector zero() const {
        return {make_zero_field(grid_, SystemTag::A), make_zero_field(grid_, SystemTag::B)};
    }

    // product-space inner product with the energy weights of both systems
    static double weighted_inner(const LayeredGrid& g, const WaveOperator& oa,
                                 const WaveOperator& ob, const HUMVector& a,
                                 const HUMVector& b) {
        const double vol = std::pow(g.spacing(), g.dimension());
        double s = 0.0;
        auto add = [&](const WaveOperator& op, const AcousticField& fa, const AcousticField& fb) {
            for (long c = 0; c < g.bbox_cells(); ++c) {
                std::size_t ci = static_cast<std::size_t>(c);
                s += op.cell_coefficient()[ci] * fa.pressure[ci] * fb.pressure[ci];
            }
            for (std::size_t fi = 0; fi < g.faces().size(); ++fi)
                s += op.face_omega()[fi] * op.face_weight()[fi] * fa.velocity[fi] * fb.velocity[fi];
        };
        add(oa, a.g1, b.g1);
        add(ob, a.g2, b.g2);
        return s * vol;
    }

    double x_inner(const HUMVector& a, const HUMVector& b) const {
        return weighted_inner(grid_, opa_, opb_, a, b);
    }

    // homogeneous evolutions of both components, returning the S0 traces
    std::pair<TraceRecord, TraceRecord> forward_traces(const HUMVector& g) const {
        TraceRecord ta = make_trace_record(grid_, dt_, steps_);
        TraceRecord tb = make_trace_record(grid_, dt_, steps_);
        EvolveOptions oa, ob;
        oa.traces = &ta;
        ob.traces = &tb;
        evolve_homogeneous(opa_, g.g1, dt_, steps_, oa);
        evolve_homogeneous(opb_, g.g2, dt_, steps_, ob);
        return {std::move(ta), std::move(tb)};
    }

    // combined boundary kernel alpha k - tau (v.eta), per face and half level
    TraceRecord combined_trace(const TraceRecord& ta, const TraceRecord& tb) const {
        TraceRecord s = ta;
        for (long n = 0; n < s.steps; ++n)
            for (std::size_t i = 0; i < s.num_faces; ++i)
                s.at(n, i) = alpha_out_[i] * ta.at(n, i) - tau_out_[i] * tb.at(n, i);
        return s;
    }

    double y_inner(const HUMVector& a, const HUMVector& b) const {
        auto [ta, tb] = forward_traces(a);
        auto [tc, td] = forward_traces(b);
        TraceRecord sa = combined_trace(ta, tb);
        TraceRecord sb = combined_trace(tc, td);
        const double w = dt_ * std::pow(grid_.spacing(), grid_.dimension() - 1);
        double s = 0.0;
        for (std::size_t i = 0; i < sa.half.size(); ++i) s += sa.half[i] * sb.half[i];
        return s * w;
    }

    HUMVector apply_gramian(const HUMVector& g) const {
        auto [ta, tb] = forward_traces(g);
        TraceRecord s = combined_trace(ta, tb);
        const double w = dt_ * std::pow(grid_.spacing(), grid_.dimension() - 1);

        TraceRecord la = s, lb = s;
        for (long n = 0; n < s.steps; ++n) {
            for (std::size_t i = 0; i < s.num_faces; ++i) {
                la.at(n, i) = w * alpha_out_[i] * s.at(n, i);
                lb.at(n, i) = -w * tau_out_[i] * s.at(n, i);
            }
        }
        HUMVector out = zero();
        std::vector<double> ubar, pbar;
        const double inv_vol = 1.0 / std::pow(grid_.spacing(), grid_.dimension());
        auto unweight = [&](const WaveOperator& op, AcousticField& f) {
            for (long c = 0; c < grid_.bbox_cells(); ++c) {
                std::size_t ci = static_cast<std::size_t>(c);
                double a = op.cell_coefficient()[ci];
                f.pressure[ci] = (a > 0.0) ? pbar[ci] * inv_vol / a : 0.0;
            }
            for (std::size_t fi = 0; fi < grid_.faces().size(); ++fi)
                f.velocity[fi] = ubar[fi] * inv_vol / (op.face_omega()[fi] * op.face_weight()[fi]);
        };
        adjoint_of_traces(opa_, la, dt_, ubar, pbar);
        unweight(opa_, out.g1);
        adjoint_of_traces(opb_, lb, dt_, ubar, pbar);
        unweight(opb_, out.g2);
        return out;
    }

    // Q = beta^{-1} (alpha k - tau v.eta) at half levels; P = -(beta/gamma) Q
    // resampled to the integer pressure levels.
    ControlSignal synthesize_controls(const HUMVector& g) const {
        auto [ta, tb] = forward_traces(g);
        return controls_from_combined(combined_trace(ta, tb));
    }

    ControlSignal controls_from_combined(const TraceRecord& s) const {
        ControlSignal ctl;
        ctl.steps = steps_;
        ctl.dt = dt_;
        ctl.num_faces = s.num_faces;
        ctl.q_half.assign(s.half.size(), 0.0);
        for (long n = 0; n < steps_; ++n)
            for (std::size_t i = 0; i < s.num_faces; ++i)
                ctl.q_half[static_cast<std::size_t>(n) * s.num_faces + i] =
                    s.at(n, i) / beta_out_[i];
        std::vector<double> s_int = resample_to_integer(s);
        ctl.p_int.assign(s_int.size(), 0.0);
        for (long n = 0; n <= steps_; ++n)
            for (std::size_t i = 0; i < s.num_faces; ++i)
                ctl.p_int[static_cast<std::size_t>(n) * s.num_faces + i] =
                    -s_int[static_cast<std::size_t>(n) * s.num_faces + i] / gamma_out_[i];
        return ctl;
    }

    // CG on the Gramian in the X inner product, then closed-loop verification
    // with the synthesized boundary controls.  The iteration runs in the
    // half-resolution subspace: grid-scale adjoint modes are not uniformly
    // observable from the boundary, so the unfiltered normal equations are
    // ill-posed in a way that worsens under refinement.
    ControlReport solve_control(const HUMVector& target, double tol, long max_iter) const {
        ControlReport rep;
        rep.T = T_;
        rep.steps = steps_;
        rep.initial_energy_a = energy(opa_, target.g1).total;
        rep.initial_energy_b = energy(opb_, target.g2).total;

        // The first-system S0 normal velocity is imposed by the control at the
        // first step, so that component of the target is unreachable data the
        // Gramian cannot see; drop it from the right-hand side.
        HUMVector rhs = target;
        for (std::size_t fi : grid_.s0_faces()) rhs.g1.velocity[fi] = 0.0;

        const double bf = std::sqrt(x_inner(rhs, rhs));
        if (bf == 0.0) {
            rep.converged = true;
            rep.controls = synthesize_controls(zero());
            return rep;
        }

        HUMVector gf = zero();
        bool used_filter = false;
        // A layer with an odd cell count has no half-resolution companion; in
        // that case fall back to the unfiltered fine-grid iteration below.
        std::optional<TwoGridFilter> maybe_filter;
        try {
            maybe_filter.emplace(grid_);
        } catch (const ResolutionError&) {
        }
        if (maybe_filter) {
            used_filter = true;
            const TwoGridFilter& filter = *maybe_filter;
            const LayeredGrid& cgrid = filter.coarse();
            WaveOperator opa_c(cgrid, coeffs_, SystemTag::A);
            WaveOperator opb_c(cgrid, coeffs_, SystemTag::B);
            const double vol_f = std::pow(grid_.spacing(), grid_.dimension());
            const double vol_c = std::pow(cgrid.spacing(), cgrid.dimension());

            auto zero_coarse = [&] {
                return HUMVector{make_zero_field(cgrid, SystemTag::A),
                                 make_zero_field(cgrid, SystemTag::B)};
            };
            auto xc = [&](const HUMVector& a, const HUMVector& b) {
                return weighted_inner(cgrid, opa_c, opb_c, a, b);
            };
            auto prolong = [&](const HUMVector& gc) {
                HUMVector gf = zero();
                filter.prolong_pressure(gc.g1.pressure, gf.g1.pressure);
                filter.prolong_pressure(gc.g2.pressure, gf.g2.pressure);
                filter.prolong_velocity(gc.g1.velocity, gf.g1.velocity);
                filter.prolong_velocity(gc.g2.velocity, gf.g2.velocity);
                for (std::size_t fi : grid_.s0_faces()) gf.g1.velocity[fi] = 0.0;
                return gf;
            };
            // adjoint of the prolongation with respect to the two X inner products
            auto restrict_adj = [&](const HUMVector& gf) {
                HUMVector w = gf;
                auto mass = [&](const LayeredGrid& g, const WaveOperator& op, AcousticField& f,
                                double vol, bool invert) {
                    for (long c = 0; c < g.bbox_cells(); ++c) {
                        std::size_t ci = static_cast<std::size_t>(c);
                        double m = op.cell_coefficient()[ci] * vol;
                        f.pressure[ci] = invert ? (m > 0.0 ? f.pressure[ci] / m : 0.0)
                                                : f.pressure[ci] * m;
                    }
                    for (std::size_t fi = 0; fi < g.faces().size(); ++fi) {
                        double m = op.face_omega()[fi] * op.face_weight()[fi] * vol;
                        f.velocity[fi] = invert ? (m > 0.0 ? f.velocity[fi] / m : 0.0)
                                                : f.velocity[fi] * m;
                    }
                };
                mass(grid_, opa_, w.g1, vol_f, false);
                mass(grid_, opb_, w.g2, vol_f, false);
                HUMVector gc = zero_coarse();
                filter.scatter_pressure(w.g1.pressure, gc.g1.pressure);
                filter.scatter_pressure(w.g2.pressure, gc.g2.pressure);
                filter.scatter_velocity(w.g1.velocity, gc.g1.velocity);
                filter.scatter_velocity(w.g2.velocity, gc.g2.velocity);
                mass(cgrid, opa_c, gc.g1, vol_c, true);
                mass(cgrid, opb_c, gc.g2, vol_c, true);
                for (std::size_t fi : cgrid.s0_faces()) gc.g1.velocity[fi] = 0.0;
                return gc;
            };

            // CG on the restricted normal equations, applied to a residual of the
            // fine problem.  Only the first cycle decides convergence and may
            // declare the horizon too short.
            auto coarse_solve = [&](const HUMVector& resid, bool decides) {
                HUMVector b = restrict_adj(resid);
                double b_norm = std::sqrt(xc(b, b));
                HUMVector g = zero_coarse();
                if (b_norm == 0.0) return g;
                HUMVector r = b;
                HUMVector d = r;
                double rr = xc(r, r);
                rep.cg_residual_history.push_back(std::sqrt(rr) / b_norm);
                for (long it = 0; it < max_iter && std::sqrt(rr) > tol * b_norm; ++it) {
                    HUMVector ld = restrict_adj(apply_gramian(prolong(d)));
                    double dld = xc(d, ld);
                    if (!(dld > 0.0)) break;
                    double a = rr / dld;
                    axpy(g, a, d);
                    axpy(r, -a, ld);
                    double rr_new = xc(r, r);
                    axpby(d, 1.0, r, rr_new / rr);
                    rr = rr_new;
                    ++rep.cg_iterations;
                    rep.cg_residual_history.push_back(std::sqrt(rr) / b_norm);
                }
                if (decides) {
                    rep.converged = std::sqrt(rr) <= tol * b_norm;
                    if (!rep.converged && rep.cg_iterations >= max_iter)
                        throw NoConvergence(
                            "Gramian solve stalled; horizon likely below the control time");
                }
                return g;
            };

            // Descent on the fine grid removes the resolved part of the residual
            // the coarse subspace cannot represent.  It is capped and keeps its
            // best iterate, because past a few steps the weakly observable
            // grid-scale modes take over and the unfiltered descent turns
            // divergent.  Returns the squared residual of the kept iterate.
            auto fine_descent = [&](HUMVector& x, long cap) {
                HUMVector rf = rhs;
                axpy(rf, -1.0, apply_gramian(x));
                double rrf = x_inner(rf, rf);
                HUMVector df = rf;
                HUMVector best = x;
                double best_rr = rrf;
                for (long it = 0; it < cap && std::sqrt(rrf) > tol * bf; ++it) {
                    HUMVector ld = apply_gramian(df);
                    double dld = x_inner(df, ld);
                    if (!(dld > 0.0)) break;
                    double a = rrf / dld;
                    axpy(x, a, df);
                    axpy(rf, -a, ld);
                    double rr_new = x_inner(rf, rf);
                    if (rr_new < best_rr) {
                        best_rr = rr_new;
                        best = x;
                    }
                    axpby(df, 1.0, rf, rr_new / rrf);
                    rrf = rr_new;
                    ++rep.cg_iterations;
                    rep.cg_residual_history.push_back(std::sqrt(rrf) / bf);
                }
                x = best;
                return best_rr;
            };

            // Two-grid cycles: each coarse correction removes the component the
            // previous fine descent reintroduced, so alternating keeps improving
            // until the cycle stagnates.
            double best_rr = std::numeric_limits<double>::infinity();
            HUMVector best_gf = gf;
            for (long cycle = 0; cycle < kMaxCycles; ++cycle) {
                HUMVector rf = rhs;
                if (cycle > 0) axpy(rf, -1.0, apply_gramian(gf));
                if (std::sqrt(x_inner(rf, rf)) <= tol * bf) break;
                axpy(gf, 1.0, prolong(coarse_solve(rf, cycle == 0)));
                double rr_now = fine_descent(gf, kPolishIterations);
                if (rr_now < best_rr) {
                    best_rr = rr_now;
                    best_gf = gf;
                } else {
                    break;
                }
            }
            gf = best_gf;
        }

        if (!used_filter) {
            // no half-resolution companion: run the capped descent alone
            HUMVector rf = rhs;
            double rrf = x_inner(rf, rf);
            HUMVector df = rf;
            HUMVector best = gf;
            double best_rr = rrf;
            for (long it = 0; it < max_iter && std::sqrt(rrf) > tol * bf; ++it) {
                HUMVector ld = apply_gramian(df);
                double dld = x_inner(df, ld);
                if (!(dld > 0.0)) break;
                double a = rrf / dld;
                axpy(gf, a, df);
                axpy(rf, -a, ld);
                double rr_new = x_inner(rf, rf);
                if (rr_new < best_rr) {
                    best_rr = rr_new;
                    best = gf;
                }
                axpby(df, 1.0, rf, rr_new / rrf);
                rrf = rr_new;
                ++rep.cg_iterations;
                rep.cg_residual_history.push_back(std::sqrt(rrf) / bf);
            }
            gf = best;
            rep.converged = std::sqrt(best_rr) <= tol * bf;
            if (!rep.converged && rep.cg_iterations >= max_iter)
                throw NoConvergence(
                    "Gramian solve stalled; horizon likely below the control time");
        }

        rep.y_norm = std::sqrt(std::max(0.0, y_inner(gf, gf)));
        rep.controls = synthesize_controls(gf);

        AcousticField fa = evolve_controlled(opa_, target.g1, dt_, steps_, rep.controls);
        AcousticField fb = evolve_controlled(opb_, target.g2, dt_, steps_, rep.controls);
        rep.final_energy_a = energy(opa_, fa).total;
        rep.final_energy_b = energy(opb_, fb).total;
        rep.ratio_a = (rep.initial_energy_a > 0.0) ? rep.final_energy_a / rep.initial_energy_a : 0.0;
        rep.ratio_b = (rep.initial_energy_b > 0.0) ? rep.final_energy_b / rep.initial_energy_b : 0.0;
        rep.energy_ratio = std::max(rep.ratio_a, rep.ratio_b);
        return rep;
    }

    static void axpy(HUMVector& y, double a, const HUMVector& x) {
        for (std::size_t i = 0; i < y.g1.pressure.size(); ++i) {
            y.g1.pressure[i] += a * x.g1.pressure[i];
            y.g2.pressure[i] += a * x.g2.pressure[i];
        }
        for (std::size_t i = 0; i < y.g1.velocity.size(); ++i) {
            y.g1.velocity[i] += a * x.g1.velocity[i];
            y.g2.velocity[i] += a * x.g2.velocity[i];
        }
    }

    // y = a x + b y
    static void axpby(HUMVector& y, double a, const HUMVector& x, double b) {
        for (std::size_t i = 0; i < y.g1.pressure.size(); ++i) {
            y.g1.pressure[i] = a * x.g1.pressure[i] + b * y.g1.pressure[i];
            y.g2.pressure[i] = a * x.g2.pressure[i] + b * y.g2.pressure[i];
        }
        for (std::size_t i = 0; i < y.g1.velocity.size(); ++i) {
            y.g1.velocity[i] = a * x.g1.velocity[i] + b * y.g1.velocity[i];
            y.g2.velocity[i] = a * x.g2.velocity[i] + b * y.g2.velocity[i];
        }
    }

private:
    const LayeredGrid& grid_;
    MediumCoefficients coeffs_;
    WaveOperator opa_, opb_;
    double T_;
    double dt_ = 0.0;
    long steps_ = 0;
    std::vector<double> alpha_out_, beta_out_, gamma_out_, tau_out_;
};

} // namespace simwave

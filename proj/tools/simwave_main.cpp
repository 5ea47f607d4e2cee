#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "simwave/config.hpp"
#include "simwave/csv.hpp"
#include "simwave/diagnostics.hpp"
#include "simwave/hum.hpp"
#include "simwave/multiplier.hpp"
#include "simwave/observability.hpp"
#include "simwave/solver.hpp"

namespace {

namespace fs = std::filesystem;
using namespace simwave;

struct Session {
    ExperimentConfig cfg;
    LayeredGrid grid;
    fs::path out;

    explicit Session(const ExperimentConfig& c) : cfg(c), grid(build_layered_grid(c.geometry)) {
        out = cfg.output_dir;
        fs::create_directories(out);
    }
    std::string path(const char* name) const { return (out / name).string(); }
};

MultiplierData build_multiplier(const Session& s, std::vector<double>* phi_out = nullptr) {
    std::vector<double> phi = solve_phi(s.grid);
    if (phi_out) *phi_out = phi;
    return build_h(s.grid, phi, s.cfg.x0, s.cfg.delta0);
}

int cmd_validate(const Session& s) {
    SummaryWriter sum;
    HypothesisReport hr = validate_all(s.cfg.coefficients);
    sum.set("hypothesis.monotone_ab", hr.monotone_ab);
    sum.set("hypothesis.monotone_gt", hr.monotone_gt);
    sum.set("hypothesis.compatible", hr.compatible);
    sum.set("hypothesis.max_monotone_violation", hr.max_monotone_violation);
    sum.set("hypothesis.max_rel_residual", hr.max_rel_residual);
    for (std::size_t k = 0; k < hr.wave_speeds.size(); ++k)
        sum.set("hypothesis.wave_speed." + std::to_string(k), hr.wave_speeds[k]);
    if (!hr.monotone_ab || !hr.monotone_gt)
        std::cerr << "warning: coefficient monotonicity fails; the observability "
                     "sufficiency argument does not apply\n";

    SurfaceMeasures sm = surface_measures(s.grid);
    sum.set("geometry.volume", sm.volume);
    sum.set("geometry.area_s0", sm.area_s0);
    sum.set("geometry.area_s1", sm.area_s1);
    sum.set("geometry.cells", s.grid.interior_cell_count());

    std::vector<double> phi;
    MultiplierData md = build_multiplier(s, &phi);
    GeometryHypothesisReport gr = check_geometry(md, s.grid);
    sum.set("multiplier.mu", md.mu);
    sum.set("multiplier.max_grad_h", md.max_grad_h);
    sum.set("geometry_check.delta_condition", gr.delta_condition);
    sum.set("geometry_check.s0_condition", gr.s0_condition);
    sum.set("geometry_check.s1_condition", gr.s1_condition);
    sum.set("geometry_check.interface_condition", gr.interface_condition);
    sum.set("geometry_check.delta_margin", gr.delta_margin);
    sum.set("geometry_check.s0_margin", gr.s0_margin);
    sum.set("geometry_check.s1_margin", gr.s1_margin);
    sum.set("geometry_check.interface_margin", gr.interface_margin);
    sum.set("geometry_check.all_pass", gr.all_pass());
    sum.write(s.path("summary.kv"));

    CsvWriter phi_csv(s.path("phi.csv"), {"cell", "x", "y", "z", "phi"});
    for (long c = 0; c < s.grid.bbox_cells(); ++c) {
        if (!s.grid.inside(c)) continue;
        auto x = s.grid.cell_center(c);
        phi_csv.row({static_cast<double>(c), x[0], x[1], x[2],
                     phi[static_cast<std::size_t>(c)]});
    }
    if (!hr.compatible) {
        std::cerr << "error: coefficient compatibility fails\n";
        return 3;
    }
    if (!gr.all_pass()) {
        std::cerr << "error: geometric hypotheses fail\n";
        return 3;
    }
    return 0;
}

int cmd_simulate(const Session& s) {
    WaveOperator opa(s.grid, s.cfg.coefficients, SystemTag::A);
    WaveOperator opb(s.grid, s.cfg.coefficients, SystemTag::B);
    auto [dt, steps] = choose_time_step(opa, opb, s.cfg.T, s.cfg.cfl);

    SampledData data = sample_initial_data(s.grid, s.cfg.seed);
    TraceRecord traces = make_trace_record(s.grid, dt, steps);
    std::vector<double> energy_series;
    EvolveOptions opt;
    opt.traces = &traces;
    opt.energy_series = &energy_series;

    CsvWriter snaps(s.path("snapshots.csv"), {"step", "time", "cell", "x", "y", "z", "p"});
    if (s.cfg.snapshot_every > 0) {
        opt.snapshot_every = s.cfg.snapshot_every;
        opt.on_snapshot = [&](long step, const AcousticField& f) {
            for (long c = 0; c < s.grid.bbox_cells(); ++c) {
                if (!s.grid.inside(c)) continue;
                auto x = s.grid.cell_center(c);
                snaps.row({static_cast<double>(step), f.t, static_cast<double>(c), x[0], x[1],
                           x[2], f.pressure[static_cast<std::size_t>(c)]});
            }
        };
    }

    AcousticField final_state = evolve_homogeneous(opa, data.a, dt, steps, opt);

    CsvWriter ecsv(s.path("energy.csv"), {"step", "time", "energy"});
    double e0 = energy_series.empty() ? 0.0 : energy_series.front();
    double drift = 0.0;
    for (std::size_t n = 0; n < energy_series.size(); ++n) {
        ecsv.row({static_cast<double>(n), (n + 0.5) * dt, energy_series[n]});
        if (e0 != 0.0) drift = std::max(drift, std::abs(energy_series[n] - e0) / std::abs(e0));
    }
    CsvWriter tcsv(s.path("traces.csv"), {"time", "face", "k"});
    for (long n = 0; n < traces.steps; ++n)
        for (std::size_t i = 0; i < traces.num_faces; ++i)
            tcsv.row({(n + 0.5) * dt, static_cast<double>(i), traces.at(n, i)});

    SummaryWriter sum;
    sum.set("run.dt", dt);
    sum.set("run.steps", steps);
    sum.set("energy.initial", energy(opa, data.a).total);
    sum.set("energy.final", energy(opa, final_state).total);
    sum.set("energy.staggered_drift", drift);
    if (s.grid.dimension() >= 2) {
        std::vector<double> curls = curl_diagnostic(s.grid, final_state.velocity);
        for (std::size_t k = 0; k < curls.size(); ++k)
            sum.set("curl.layer" + std::to_string(k), curls[k]);
    }
    sum.write(s.path("summary.kv"));
    (void)opb;
    return 0;
}

int cmd_observability(const Session& s) {
    MultiplierData md = build_multiplier(s);
    ObservabilityReport rep = observability_quotient(s.grid, s.cfg.coefficients, md, s.cfg.T,
                                                     s.cfg.trials, s.cfg.seed, s.cfg.cfl,
                                                     false, s.cfg.c2);
    rep.t0_empirical = empirical_t0(s.grid, s.cfg.coefficients, md, s.cfg.T, s.cfg.seed,
                                    s.cfg.cfl);
    SummaryWriter sum;
    sum.set("observability.T", rep.T);
    sum.set("observability.quotient", rep.quotient);
    sum.set("observability.observation", rep.observation);
    sum.set("observability.weighted_energy", rep.weighted_energy);
    sum.set("observability.trials", static_cast<long>(rep.trials));
    sum.set("observability.seed", static_cast<long>(rep.seed));
    sum.set("observability.steps", rep.steps);
    sum.set("observability.t0_empirical", rep.t0_empirical);
    sum.set("constants.c1", rep.constants.c1);
    sum.set("constants.c2", rep.constants.c2);
    sum.set("constants.c2_estimated", rep.constants.c2_estimated);
    sum.set("constants.c3", rep.constants.c3);
    sum.set("constants.c4", rep.constants.c4);
    sum.set("constants.c5", rep.constants.c5);
    sum.set("constants.c6", rep.constants.c6);
    sum.set("constants.c7", rep.constants.c7);
    sum.set("constants.c8", rep.constants.c8);
    sum.set("constants.c9", rep.constants.c9);
    sum.set("constants.t0", rep.constants.t0);
    sum.write(s.path("summary.kv"));
    return 0;
}

int cmd_identity(const Session& s) {
    MultiplierData md = build_multiplier(s);
    SampledData data = sample_initial_data(s.grid, s.cfg.seed);
    IdentityResidual res = multiplier_identity_residual(s.grid, s.cfg.coefficients, md,
                                                        data.a, s.cfg.T, s.cfg.cfl);
    SummaryWriter sum;
    sum.set("identity.total_residual", res.total);
    sum.set("identity.j_norm", res.j_norm);
    sum.set("identity.cells", res.cells);
    sum.set("identity.steps", res.steps);
    sum.write(s.path("summary.kv"));
    return 0;
}

int cmd_control(const Session& s) {
    HUMController hum(s.grid, s.cfg.coefficients, s.cfg.T, s.cfg.cfl);
    SampledData data = sample_initial_data(s.grid, s.cfg.seed);
    HUMVector target{data.a, data.b};
    ControlReport rep = hum.solve_control(target, s.cfg.tolerance, s.cfg.max_iter);

    CsvWriter rcsv(s.path("cg_residuals.csv"), {"iteration", "relative_residual"});
    for (std::size_t i = 0; i < rep.cg_residual_history.size(); ++i)
        rcsv.row({static_cast<double>(i), rep.cg_residual_history[i]});
    CsvWriter ccsv(s.path("controls.csv"), {"time", "face", "Q", "P"});
    for (long n = 0; n < rep.controls.steps; ++n)
        for (std::size_t i = 0; i < rep.controls.num_faces; ++i)
            ccsv.row({(n + 0.5) * rep.controls.dt, static_cast<double>(i),
                      rep.controls.q(n, i), rep.controls.p(n, i)});

    SummaryWriter sum;
    sum.set("control.T", rep.T);
    sum.set("control.steps", rep.steps);
    sum.set("control.cg_iterations", rep.cg_iterations);
    sum.set("control.converged", rep.converged);
    sum.set("control.y_norm", rep.y_norm);
    sum.set("control.initial_energy_a", rep.initial_energy_a);
    sum.set("control.final_energy_a", rep.final_energy_a);
    sum.set("control.initial_energy_b", rep.initial_energy_b);
    sum.set("control.final_energy_b", rep.final_energy_b);
    sum.set("control.energy_ratio", rep.energy_ratio);
    sum.write(s.path("summary.kv"));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"layered acoustic controllability toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    long seed_override = -1;
    int threads = 1;

    const char* names[] = {"validate", "simulate", "observability", "identity", "control"};
    for (const char* n : names) {
        CLI::App* sub = app.add_subcommand(n);
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--seed", seed_override, "seed override");
        sub->add_option("--threads", threads, "worker threads (reserved)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig cfg = parse_config_file(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        if (seed_override >= 0) cfg.seed = static_cast<unsigned>(seed_override);
        Session session(cfg);
        std::string name = app.get_subcommands().front()->get_name();
        if (name == "validate") return cmd_validate(session);
        if (name == "simulate") return cmd_simulate(session);
        if (name == "observability") return cmd_observability(session);
        if (name == "identity") return cmd_identity(session);
        if (name == "control") return cmd_control(session);
        return 2;
    } catch (const simwave::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

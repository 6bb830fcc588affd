// awm: command-line front end for the autonomous-machine simulator.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "awm/config.hpp"
#include "awm/csv.hpp"
#include "awm/enumerate.hpp"
#include "awm/ensemble.hpp"
#include "awm/master_equation.hpp"
#include "awm/sweep.hpp"

#ifndef AWM_VERSION
#define AWM_VERSION "dev"
#endif

namespace {

using namespace awm;

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> n_traj;
    std::optional<std::size_t> n_steps;
    std::optional<std::string> mode;
    std::string out;
    bool emit_raw = false;
    bool full_scale = false;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    bool quiet = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--n-traj", f.n_traj, "trajectories per point");
    app->add_option("--n-steps", f.n_steps, "time steps per trajectory (default: automatic)");
    app->add_option("--mode", f.mode, "markovian | trajectory_frequency | classical_drive");
    app->add_option("--out", f.out, "output directory");
    app->add_flag("--emit-raw", f.emit_raw, "write per-trajectory CSV files");
    app->add_flag("--full-scale", f.full_scale, "5e6 trajectories per point");
    app->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    app->add_flag("--quiet", f.quiet, "no progress output");
}

void apply_common(SweepSpec& spec, const CommonFlags& f) {
    if (f.full_scale) spec.protocol.n_traj = kFullScaleTrajectories;
    if (f.n_traj) spec.protocol.n_traj = *f.n_traj;
    if (f.seed) spec.protocol.master_seed = *f.seed;
    if (f.n_steps) {
        spec.protocol.n_steps = *f.n_steps;
        spec.auto_n_steps = false;
    }
    if (f.mode) spec.modes = {parse_mode(*f.mode)};
    if (f.emit_raw) spec.emit_raw = true;
}

int run_spec(const SweepSpec& spec, const CommonFlags& f) {
    RunOptions ro;
    ro.workers = f.workers;
    ro.out_dir = f.out;
    ro.code_version = AWM_VERSION;
    ro.quiet = f.quiet;
    const auto outcome = run_sweep(spec, ro);
    if (f.out.empty()) {
        std::cout << summary_csv_header() << '\n';
        for (const auto& r : outcome.rows) std::cout << summary_csv_row(r) << '\n';
    }
    if (!outcome.complete) {
        std::cerr << "error: sweep aborted at " << outcome.error << '\n';
        return 2;
    }
    return 0;
}

SweepSpec single_point_spec(const std::string& config_path) {
    SweepSpec spec = load_sweep_spec(config_path);
    spec.axis = SweepAxis::none;
    spec.values.clear();
    return spec;
}

ValidatedConfig load_point(const std::string& path, const CommonFlags& f) {
    RawConfig raw = load_config_file(path);
    if (f.n_steps) raw["n_steps"] = std::to_string(*f.n_steps);
    if (f.mode) raw["mode"] = *f.mode;
    if (f.seed) raw["seed"] = std::to_string(*f.seed);
    if (f.n_traj) raw["n_traj"] = std::to_string(*f.n_traj);
    auto cfg = validate_config(raw);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-jump simulator of a qubit-mechanical autonomous machine"};
    app.set_version_flag("--version", AWM_VERSION);
    app.require_subcommand(1);

    CommonFlags run_f, sweep_f, oracle_f, enum_f;

    auto* run = app.add_subcommand("run", "single parameter point from a config file");
    std::string run_config;
    run->add_option("config", run_config, "config file")->required()->check(CLI::ExistingFile);
    add_common(run, run_f);

    auto* sweep = app.add_subcommand("sweep", "parameter sweep from a preset, spec file or manifest");
    std::string preset, spec_file, manifest_file;
    auto* o_preset = sweep->add_option("--preset", preset, "fig2 | fig2b | fig3 | fig4");
    auto* o_spec = sweep->add_option("--spec", spec_file, "sweep spec file")->check(CLI::ExistingFile);
    auto* o_man = sweep->add_option("--from-manifest", manifest_file, "re-run a manifest.json")
                      ->check(CLI::ExistingFile);
    o_preset->excludes(o_spec)->excludes(o_man);
    o_spec->excludes(o_man);
    add_common(sweep, sweep_f);

    auto* oracle = app.add_subcommand("oracle", "integrate the reduced master equation on the free orbit");
    std::string oracle_config;
    std::size_t substeps = 4;
    bool oracle_compare = false;
    oracle->add_option("config", oracle_config, "config file")->required()->check(CLI::ExistingFile);
    oracle->add_option("--substeps", substeps, "RK4 stages per protocol step")->check(CLI::PositiveNumber);
    oracle->add_flag("--compare", oracle_compare, "also run a Markovian ensemble and report z-scores");
    add_common(oracle, oracle_f);

    auto* enumerate = app.add_subcommand("enumerate", "exact path sum for a small protocol");
    std::string enum_config;
    std::size_t max_jumps = 2;
    bool enum_compare = false;
    enumerate->add_option("config", enum_config, "config file (needs n_steps <= 64)")
        ->required()
        ->check(CLI::ExistingFile);
    enumerate->add_option("--max-jumps", max_jumps, "largest number of jumps enumerated");
    enumerate->add_flag("--compare", enum_compare, "also run Monte Carlo and report z-scores");
    add_common(enumerate, enum_f);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto spec = single_point_spec(run_config);
            apply_common(spec, run_f);
            return run_spec(spec, run_f);
        }
        if (*sweep) {
            SweepSpec spec;
            if (!preset.empty())
                spec = make_preset(preset, sweep_f.full_scale);
            else if (!spec_file.empty())
                spec = load_sweep_spec(spec_file);
            else if (!manifest_file.empty()) {
                std::ifstream in(manifest_file);
                spec = spec_from_json(nlohmann::json::parse(in).at("spec"));
            } else {
                std::cerr << "sweep needs --preset, --spec or --from-manifest\n";
                return 1;
            }
            apply_common(spec, sweep_f);
            return run_spec(spec, sweep_f);
        }
        if (*oracle) {
            auto cfg = load_point(oracle_config, oracle_f);
            const auto trace = integrate_master_equation(cfg.physics, cfg.protocol, substeps);
            if (!oracle_f.out.empty()) {
                std::filesystem::create_directories(oracle_f.out);
                std::ofstream f(std::filesystem::path(oracle_f.out) / "oracle_trace.csv");
                write_trace_csv(f, trace);
            } else {
                write_trace_csv(std::cout, trace);
            }
            if (oracle_compare) {
                auto proto = cfg.protocol;
                proto.mode = Mode::markovian;
                const TrajectoryEngine engine(cfg.physics, proto);
                EnsembleOptions eo;
                eo.n_traj = proto.n_traj;
                eo.workers = oracle_f.workers;
                const auto res = run_ensemble(engine, eo);
                const auto c = compare(trace, res.aggregate);
                std::cerr << "p_e(t_N): oracle " << c.p_e_oracle << "  mc " << c.p_e_mc.value << " +- "
                          << c.p_e_mc.std_error << "  z = " << c.z_p_e << '\n'
                          << "<W>:      oracle " << c.work_oracle << "  mc " << c.work_mc.value << " +- "
                          << c.work_mc.std_error << "  z = " << c.z_work << '\n';
            }
            return 0;
        }
        if (*enumerate) {
            auto cfg = load_point(enum_config, enum_f);
            const auto r = enumerate_paths(cfg.physics, cfg.protocol, max_jumps);
            std::cout << "paths," << r.n_paths << '\n'
                      << "total_probability," << format_double(r.total_probability) << '\n'
                      << "truncated_probability," << format_double(r.truncated_probability) << '\n'
                      << "mean_W," << format_double(r.mean_W) << '\n'
                      << "mean_Q," << format_double(r.mean_Q) << '\n'
                      << "mean_dis," << format_double(r.mean_dis) << '\n'
                      << "mean_dis_logratio," << format_double(r.mean_dis_logratio) << '\n'
                      << "lambda," << format_double(r.lambda()) << '\n'
                      << "p_e_final," << format_double(r.population_e) << '\n';
            if (enum_compare) {
                const TrajectoryEngine engine(cfg.physics, cfg.protocol);
                EnsembleOptions eo;
                eo.n_traj = cfg.protocol.n_traj;
                eo.workers = enum_f.workers;
                const auto res = run_ensemble(engine, eo);
                const auto& a = res.aggregate;
                auto z = [](double mc, double se, double exact) { return se > 0 ? (mc - exact) / se : 0.0; };
                std::cout << "z_W," << z(a.W.mean(), a.W.std_error(), r.mean_W) << '\n'
                          << "z_dis," << z(a.dis.mean(), a.dis.std_error(), r.mean_dis) << '\n'
                          << "z_lambda,"
                          << z(a.lambda_kernel.mean(), a.lambda_kernel.std_error(), r.mean_lambda_kernel) << '\n';
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

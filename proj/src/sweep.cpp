#include "awm/sweep.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "awm/config.hpp"
#include "awm/csv.hpp"

namespace awm {

namespace fs = std::filesystem;

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::none: return "none";
        case SweepAxis::gm_over_Omega_ratio: return "gm_over_Omega_ratio";
        case SweepAxis::beta0_modulus: return "beta0_modulus";
        case SweepAxis::temperature: return "temperature";
        case SweepAxis::gm_over_Omega_fixed_gmbeta0: return "gm_over_Omega_fixed_gmbeta0";
    }
    return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
    for (auto a : {SweepAxis::none, SweepAxis::gm_over_Omega_ratio, SweepAxis::beta0_modulus,
                   SweepAxis::temperature, SweepAxis::gm_over_Omega_fixed_gmbeta0})
        if (to_string(a) == name) return a;
    throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    if (modes.empty()) throw std::invalid_argument("sweep needs at least one mode");
    if (axis == SweepAxis::none) return;
    if (values.empty()) throw std::invalid_argument("sweep values must not be empty");
    for (double v : values)
        if (!std::isfinite(v) || !(v > 0.0))
            throw std::invalid_argument("sweep values must be finite and positive");
    if (measure && !(protocol.jitter_halfwidth > 0.0))
        throw std::invalid_argument("measurement sweeps need jitter_halfwidth > 0");
}

std::uint64_t point_seed(std::uint64_t master_seed, std::size_t value_index) {
    // splitmix64 finaliser over (seed, index)
    std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(value_index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<SweepPoint> expand(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> values = spec.axis == SweepAxis::none ? std::vector<double>{0.0} : spec.values;
    std::vector<SweepPoint> points;
    const double b_abs = std::abs(spec.base.beta0);
    const Complex b_dir = spec.base.beta0 / b_abs;
    const double product = 2.0 * spec.base.g_m * b_abs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        PhysicalParams p = spec.base;
        const double v = values[i];
        switch (spec.axis) {
            case SweepAxis::none: break;
            case SweepAxis::gm_over_Omega_ratio: p.g_m = v * b_abs * p.Omega; break;
            case SweepAxis::beta0_modulus: p.beta0 = v * b_dir; break;
            case SweepAxis::temperature: p.theta = v * p.omega0; break;
            case SweepAxis::gm_over_Omega_fixed_gmbeta0:
                p.g_m = v * p.Omega;
                p.beta0 = (product / (2.0 * p.g_m)) * b_dir;
                break;
        }
        p.validate();
        ProtocolParams proto = spec.protocol;
        if (spec.auto_t_final) proto.t_final = std::numbers::pi / (2.0 * p.Omega);
        if (spec.auto_n_steps) proto.n_steps = default_n_steps(p, proto.t_final);
        proto.master_seed = spec.axis == SweepAxis::none ? spec.protocol.master_seed
                                                         : point_seed(spec.protocol.master_seed, i);
        for (Mode m : spec.modes) {
            SweepPoint pt;
            pt.index = points.size();
            pt.axis = spec.axis;
            pt.axis_value = v;
            pt.physics = p;
            pt.protocol = proto;
            pt.protocol.mode = m;
            points.push_back(pt);
        }
    }
    return points;
}

PointSummary summarize(const SweepPoint& point, const TrajectoryEngine& engine, const EnsembleResult& result) {
    const auto& agg = result.aggregate;
    const double theta = engine.physics().theta;
    PointSummary s;
    s.point = point;
    s.n_traj = agg.count();
    s.dF_ref = engine.reference_free_energy();
    s.je = je_deviation(agg, s.dF_ref, theta);
    s.ift = ift_lhs(agg);
    s.ift_logratio = ift_lhs_logratio(agg);
    s.lambda = lambda_estimate(agg);
    s.dis = mean_entropy_production_direct(agg);
    s.dis_logratio = mean_entropy_production(agg);
    s.W = mean_of(agg.W);
    s.Q = mean_of(agg.Q);
    s.dE_m = mean_of(agg.dE_m);
    s.p_e = mean_of(agg.population_e);
    s.sigma = mean_of(agg.sigma);
    s.ift_closure = s.ift.value + s.lambda.value - 1.0;
    s.ift_closure_se = std::hypot(s.ift.std_error, s.lambda.std_error);
    s.green_diamond = std::expm1(-s.sigma.value);
    s.mean_abs_dis_mismatch = agg.dis_mismatch.mean();
    s.mean_n_jumps = agg.n_jumps.mean();
    s.heavy_tail = je_heavy_tail(agg);
    if (result.measurement) {
        s.je_meas = measured_je_deviation(*result.measurement, s.dF_ref, theta);
        s.info = mutual_information(*result.measurement);
    }
    return s;
}

namespace {

const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols{
        "point_index", "axis", "axis_value", "mode", "n_traj", "n_steps", "master_seed",
        "omega0", "Omega", "gamma", "g_m", "theta", "beta0_re", "beta0_im",
        "g_m_over_Omega", "beta0_abs", "semiclassical_ratio", "kT_over_hw0", "t_final", "dF_ref",
        "je_deviation", "je_stderr", "je_max_share", "je_heavy_tail_flag",
        "exp_minus_mean_sigma_minus_1", "mean_sigma", "mean_sigma_stderr",
        "ift_lhs", "ift_stderr", "ift_lhs_logratio", "ift_logratio_stderr",
        "lambda", "lambda_stderr", "ift_closure", "ift_closure_stderr",
        "mean_dis", "mean_dis_stderr", "mean_dis_logratio", "mean_dis_logratio_stderr",
        "mean_abs_dis_mismatch", "mean_W", "W_stderr", "mean_Q", "Q_stderr", "mean_dE_m", "dE_m_stderr",
        "p_e_final", "p_e_final_stderr", "mean_n_jumps",
        "je_meas_deviation", "je_meas_stderr", "mutual_information", "mutual_information_stderr",
        "shannon_entropy", "shannon_entropy_stderr", "H_meas", "clamp_amount"};
    return cols;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i];
    }
    return s;
}

}  // namespace

std::string summary_csv_header() { return join(summary_columns()); }

std::string summary_csv_row(const PointSummary& s) {
    const auto& p = s.point.physics;
    const auto& pr = s.point.protocol;
    std::vector<std::string> f;
    auto d = [&](double x) { f.push_back(format_double(x)); };
    f.push_back(std::to_string(s.point.index));
    f.emplace_back(to_string(s.point.axis));
    d(s.point.axis_value);
    f.emplace_back(to_string(pr.mode));
    f.push_back(std::to_string(s.n_traj));
    f.push_back(std::to_string(pr.n_steps));
    f.push_back(std::to_string(pr.master_seed));
    d(p.omega0);
    d(p.Omega);
    d(p.gamma);
    d(p.g_m);
    d(p.theta);
    d(p.beta0.real());
    d(p.beta0.imag());
    d(p.g_m / p.Omega);
    d(std::abs(p.beta0));
    d(p.semiclassical_ratio());
    d(p.theta / p.omega0);
    d(pr.t_final);
    d(s.dF_ref);
    d(s.je.value);
    d(s.je.std_error);
    d(s.heavy_tail.max_share);
    f.push_back(s.heavy_tail.flagged ? "1" : "0");
    d(s.green_diamond);
    d(s.sigma.value);
    d(s.sigma.std_error);
    d(s.ift.value);
    d(s.ift.std_error);
    d(s.ift_logratio.value);
    d(s.ift_logratio.std_error);
    d(s.lambda.value);
    d(s.lambda.std_error);
    d(s.ift_closure);
    d(s.ift_closure_se);
    d(s.dis.value);
    d(s.dis.std_error);
    d(s.dis_logratio.value);
    d(s.dis_logratio.std_error);
    d(s.mean_abs_dis_mismatch);
    d(s.W.value);
    d(s.W.std_error);
    d(s.Q.value);
    d(s.Q.std_error);
    d(s.dE_m.value);
    d(s.dE_m.std_error);
    d(s.p_e.value);
    d(s.p_e.std_error);
    d(s.mean_n_jumps);
    if (s.je_meas && s.info) {
        d(s.je_meas->value);
        d(s.je_meas->std_error);
        d(s.info->mutual_information.value);
        d(s.info->mutual_information.std_error);
        d(s.info->shannon_entropy.value);
        d(s.info->shannon_entropy.std_error);
        d(s.info->H_meas);
        d(s.info->clamp_amount);
    } else {
        for (int i = 0; i < 8; ++i) f.emplace_back();
    }
    return join(f);
}

std::string fig3_csv_header() {
    return "g_m_over_Omega,je_meas_deviation,je_meas_stderr,mutual_information,shannon_entropy,H_meas,"
           "clamp_amount,mutual_information_stderr";
}

std::string fig3_csv_row(const PointSummary& s) {
    if (!s.je_meas || !s.info) throw std::logic_error("fig3 row without measurement statistics");
    const auto& p = s.point.physics;
    std::vector<std::string> f;
    for (double x : {p.g_m / p.Omega, s.je_meas->value, s.je_meas->std_error, s.info->mutual_information.value,
                     s.info->shannon_entropy.value, s.info->H_meas, s.info->clamp_amount,
                     s.info->mutual_information.std_error})
        f.push_back(format_double(x));
    return join(f);
}

nlohmann::json spec_to_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["axis"] = std::string(to_string(spec.axis));
    j["values"] = spec.values;
    std::vector<std::string> modes;
    for (Mode m : spec.modes) modes.emplace_back(to_string(m));
    j["modes"] = modes;
    const auto& p = spec.base;
    j["physics"] = {{"omega0", p.omega0}, {"Omega", p.Omega},          {"gamma", p.gamma},
                    {"g_m", p.g_m},       {"theta", p.theta},          {"beta0_re", p.beta0.real()},
                    {"beta0_im", p.beta0.imag()}};
    const auto& pr = spec.protocol;
    j["protocol"] = {{"t_final", pr.t_final},
                     {"n_steps", pr.n_steps},
                     {"n_traj", pr.n_traj},
                     {"master_seed", pr.master_seed},
                     {"jitter_halfwidth", pr.jitter_halfwidth},
                     {"grid_cell_halfwidth", pr.grid_cell_halfwidth},
                     {"fast_path", pr.fast_path}};
    j["auto_t_final"] = spec.auto_t_final;
    j["auto_n_steps"] = spec.auto_n_steps;
    j["measure"] = spec.measure;
    j["emit_raw"] = spec.emit_raw;
    return j;
}

SweepSpec spec_from_json(const nlohmann::json& j) {
    SweepSpec s;
    s.name = j.at("name").get<std::string>();
    s.axis = parse_axis(j.at("axis").get<std::string>());
    s.values = j.at("values").get<std::vector<double>>();
    s.modes.clear();
    for (const auto& m : j.at("modes")) s.modes.push_back(parse_mode(m.get<std::string>()));
    const auto& p = j.at("physics");
    s.base.omega0 = p.at("omega0").get<double>();
    s.base.Omega = p.at("Omega").get<double>();
    s.base.gamma = p.at("gamma").get<double>();
    s.base.g_m = p.at("g_m").get<double>();
    s.base.theta = p.at("theta").get<double>();
    s.base.beta0 = {p.at("beta0_re").get<double>(), p.at("beta0_im").get<double>()};
    const auto& pr = j.at("protocol");
    s.protocol.t_final = pr.at("t_final").get<double>();
    s.protocol.n_steps = pr.at("n_steps").get<std::size_t>();
    s.protocol.n_traj = pr.at("n_traj").get<std::uint64_t>();
    s.protocol.master_seed = pr.at("master_seed").get<std::uint64_t>();
    s.protocol.jitter_halfwidth = pr.at("jitter_halfwidth").get<double>();
    s.protocol.grid_cell_halfwidth = pr.at("grid_cell_halfwidth").get<double>();
    s.protocol.fast_path = pr.at("fast_path").get<bool>();
    s.auto_t_final = j.at("auto_t_final").get<bool>();
    s.auto_n_steps = j.at("auto_n_steps").get<bool>();
    s.measure = j.at("measure").get<bool>();
    s.emit_raw = j.at("emit_raw").get<bool>();
    return s;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

SweepSpec load_sweep_spec(const std::string& path) {
    RawConfig raw = load_config_file(path);
    SweepSpec s;
    std::vector<ConfigIssue> issues;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = raw.find(key);
        if (it == raw.end()) return std::nullopt;
        std::string v = it->second;
        raw.erase(it);
        return v;
    };
    if (auto a = take("axis")) {
        try {
            s.axis = parse_axis(*a);
        } catch (const std::exception& e) {
            issues.push_back({"axis", e.what()});
        }
    }
    if (auto v = take("values")) {
        for (const auto& item : split_list(*v)) {
            try {
                std::size_t used = 0;
                s.values.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                issues.push_back({"values", "'" + item + "' is not a number"});
            }
        }
    }
    std::optional<std::string> modes = take("modes");
    if (auto n = take("name")) s.name = *n;
    if (auto m = take("measure")) s.measure = *m == "1";
    if (auto e = take("emit_raw")) s.emit_raw = *e == "1";
    if (!issues.empty()) throw ConfigError(std::move(issues));

    s.auto_n_steps = raw.count("n_steps") == 0;
    s.auto_t_final = raw.count("t_final_s") == 0;
    const auto cfg = validate_config(raw);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
    s.base = cfg.physics;
    s.protocol = cfg.protocol;
    s.modes = {cfg.protocol.mode};
    if (modes) {
        s.modes.clear();
        for (const auto& m : split_list(*modes)) s.modes.push_back(parse_mode(m));
    }
    s.validate();
    return s;
}

SweepSpec make_preset(const std::string& name, bool full_scale) {
    SweepSpec s;
    s.name = name;
    const double theta80 = theta_from_kelvin(80.0);
    PhysicalParams& p = s.base;
    p.theta = theta80;
    p.omega0 = 1.2 * theta80;
    p.Omega = kTwoPi * 100e3;
    p.gamma = 5.0 * p.Omega;
    p.g_m = 10.0 * p.Omega;
    p.beta0 = {0.0, 5000.0};
    s.protocol.n_traj = full_scale ? kFullScaleTrajectories : kDeskScaleTrajectories;
    s.protocol.master_seed = 1;

    if (name == "fig2") {
        // g_m/2pi from 1 to 20 MHz at |beta0| = 5000
        s.axis = SweepAxis::gm_over_Omega_ratio;
        for (double g_MHz : {1.0, 2.0, 5.0, 10.0, 20.0}) s.values.push_back(g_MHz * 1e6 / 100e3 / 5000.0);
    } else if (name == "fig2b") {
        s.axis = SweepAxis::beta0_modulus;
        s.values = {500, 1000, 2000, 5000, 10000};
        s.modes = {Mode::trajectory_frequency, Mode::classical_drive};
    } else if (name == "fig3") {
        p.Omega = kTwoPi * 1e3;
        p.gamma = 5.0 * p.Omega;
        p.g_m = 50.0 * p.Omega;
        p.beta0 = {0.0, kTwoPi * 600e9 / (2.0 * p.g_m)};
        s.axis = SweepAxis::gm_over_Omega_fixed_gmbeta0;
        s.values = {1, 2, 5, 10, 20, 50};
        s.protocol.jitter_halfwidth = 2.0;
        s.protocol.grid_cell_halfwidth = 2.0;
        s.measure = true;
    } else if (name == "fig4") {
        p.omega0 = kTwoPi * 2e12;
        s.axis = SweepAxis::temperature;
        s.values = {0.1, 0.3, 1.0 / 1.2, 2.0, 5.0};
    } else {
        throw std::invalid_argument("unknown preset '" + name + "' (fig2, fig2b, fig3, fig4)");
    }
    return s;
}

namespace {

void write_manifest(const fs::path& path, const SweepSpec& spec, const RunOptions& opt, std::size_t done,
                    std::size_t total, bool complete, const std::string& error, double wall) {
    nlohmann::json j;
    j["tool"] = "awm";
    j["code_version"] = opt.code_version;
    j["spec"] = spec_to_json(spec);
    j["points_total"] = total;
    j["points_completed"] = done;
    j["complete"] = complete;
    if (!error.empty()) j["error"] = error;
    j["wall_time_s"] = wall;
    j["workers"] = opt.workers;
    std::ofstream f(path);
    f << j.dump(2) << '\n';
}

}  // namespace

SweepOutcome run_sweep(const SweepSpec& spec, const RunOptions& opt) {
    const auto points = expand(spec);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::ofstream summary, fig3;
    fs::path dir;
    if (!opt.out_dir.empty()) {
        dir = opt.out_dir;
        fs::create_directories(dir);
        if (spec.emit_raw) fs::create_directories(dir / "raw");
        summary.open(dir / "summary.csv");
        if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
        summary << summary_csv_header() << '\n';
        if (spec.measure) {
            fig3.open(dir / "fig3.csv");
            fig3 << fig3_csv_header() << '\n';
        }
        write_manifest(dir / "manifest.json", spec, opt, 0, points.size(), false, "", 0.0);
    }

    SweepOutcome out;
    for (const auto& pt : points) {
        try {
            const auto tp = std::chrono::steady_clock::now();
            const TrajectoryEngine engine(pt.physics, pt.protocol);
            EnsembleOptions eo;
            eo.n_traj = pt.protocol.n_traj;
            eo.workers = opt.workers;
            eo.measure = spec.measure;
            std::ofstream raw;
            if (spec.emit_raw && !dir.empty()) {
                raw.open(dir / "raw" /
                         ("point_" + std::to_string(pt.index) + "_" + std::string(to_string(pt.protocol.mode)) +
                          ".csv"));
                raw << raw_csv_header() << '\n';
                eo.on_record = [&raw](const TrajectoryRecord& r) { raw << raw_csv_row(r) << '\n'; };
            }
            const auto result = run_ensemble(engine, eo);
            auto s = summarize(pt, engine, result);
            out.rows.push_back(s);
            if (summary.is_open()) {
                summary << summary_csv_row(s) << '\n' << std::flush;
                if (fig3.is_open()) fig3 << fig3_csv_row(s) << '\n' << std::flush;
                write_manifest(dir / "manifest.json", spec, opt, out.rows.size(), points.size(), false, "",
                               elapsed());
            }
            if (!opt.quiet) {
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - tp).count();
                std::cerr << "[" << spec.name << "] point " << pt.index + 1 << "/" << points.size() << " "
                          << to_string(spec.axis) << "=" << pt.axis_value << " mode=" << to_string(pt.protocol.mode)
                          << " n_steps=" << pt.protocol.n_steps << " je=" << s.je.value << " +- "
                          << s.je.std_error << " (" << secs << " s)\n";
            }
        } catch (const std::exception& e) {
            out.error = "point " + std::to_string(pt.index) + ": " + e.what();
            if (!dir.empty())
                write_manifest(dir / "manifest.json", spec, opt, out.rows.size(), points.size(), false, out.error,
                               elapsed());
            return out;
        }
    }
    out.complete = true;
    if (!dir.empty()) write_manifest(dir / "manifest.json", spec, opt, out.rows.size(), points.size(), true, "", elapsed());
    return out;
}

}  // namespace awm

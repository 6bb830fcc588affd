// sweep.hpp: parameter sweeps, presets and their on-disk outputs.
//
// Output directory layout:
//   summary.csv      one row per (axis value, mode), fixed column order
//   fig3.csv         readout columns, only for sweeps with measurement
//   manifest.json    everything needed to re-run the sweep bit-exactly
//   raw/point_<i>_<mode>.csv   per-trajectory rows with --emit-raw

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "awm/ensemble.hpp"
#include "awm/trajectory.hpp"

namespace awm {

enum class SweepAxis {
    none,                         // single point
    gm_over_Omega_ratio,          // (g_m/Omega)/|beta0|, |beta0| fixed
    beta0_modulus,                // |beta0|, g_m/Omega fixed
    temperature,                  // k_B T / (hbar omega0), omega0 fixed
    gm_over_Omega_fixed_gmbeta0,  // g_m/Omega with 2 g_m |beta0| fixed
};

std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_axis(std::string_view name);

struct SweepSpec {
    std::string name = "custom";
    SweepAxis axis = SweepAxis::none;
    std::vector<double> values;
    std::vector<Mode> modes{Mode::trajectory_frequency};
    PhysicalParams base;
    ProtocolParams protocol;  // n_traj, seed, jitter, grid, fast_path; mode is taken from `modes`
    bool auto_t_final = true;  // pi/(2 Omega) at each point
    bool auto_n_steps = true;  // default_n_steps at each point
    bool measure = false;
    bool emit_raw = false;

    /// Throws std::invalid_argument on an empty or non-finite value list.
    void validate() const;
};

struct SweepPoint {
    std::size_t index = 0;  // row index in the summary
    SweepAxis axis = SweepAxis::none;
    double axis_value = 0.0;
    PhysicalParams physics;
    ProtocolParams protocol;
};

/// Per-point seed derived from the master seed, so points are independent.
std::uint64_t point_seed(std::uint64_t master_seed, std::size_t value_index);

std::vector<SweepPoint> expand(const SweepSpec& spec);

/// Estimator summary for one point.
struct PointSummary {
    SweepPoint point;
    std::uint64_t n_traj = 0;
    double dF_ref = 0.0;
    Estimate je, ift, ift_logratio, lambda, dis, dis_logratio, W, Q, dE_m, p_e, sigma;
    double ift_closure = 0.0, ift_closure_se = 0.0;
    double green_diamond = 0.0;  // exp(-<sigma>) - 1
    double mean_abs_dis_mismatch = 0.0;
    double mean_n_jumps = 0.0;
    HeavyTailReport heavy_tail;
    std::optional<Estimate> je_meas;
    std::optional<InformationReport> info;
};

PointSummary summarize(const SweepPoint& point, const TrajectoryEngine& engine, const EnsembleResult& result);

std::string summary_csv_header();
std::string summary_csv_row(const PointSummary& s);
std::string fig3_csv_header();
std::string fig3_csv_row(const PointSummary& s);

struct RunOptions {
    unsigned workers = 1;
    std::string out_dir;  // empty: do not write files
    std::string code_version;
    bool quiet = false;
};

struct SweepOutcome {
    std::vector<PointSummary> rows;
    bool complete = false;
    std::string error;
};

/// Runs every point in order. On the first failing point the sweep stops;
/// completed rows stay in summary.csv and the manifest is marked incomplete.
SweepOutcome run_sweep(const SweepSpec& spec, const RunOptions& options);

nlohmann::json spec_to_json(const SweepSpec& spec);
SweepSpec spec_from_json(const nlohmann::json& j);

/// Flat `key = value` sweep file: the config keys plus
///   axis = <axis name>, values = v1, v2, ..., modes = m1, m2, measure = 0/1
SweepSpec load_sweep_spec(const std::string& path);

/// fig2, fig2b, fig3 and fig4.
SweepSpec make_preset(const std::string& name, bool full_scale);

inline constexpr std::uint64_t kDeskScaleTrajectories = 100000;
inline constexpr std::uint64_t kFullScaleTrajectories = 5000000;

}  // namespace awm

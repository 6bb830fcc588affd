// trajectory.hpp: quantum-jump trajectories of the autonomous machine.
//
// A trajectory is fully specified by the initial qubit level and its jump
// record. Each step of length dt first decides between an emission, an
// absorption or no jump (first-order Kraus probabilities), then lets the
// mechanical amplitude evolve for dt under the Hamiltonian selected by the
// (post-jump) qubit level.
//
// Internally the amplitude is carried as an offset from the free orbit
// beta0 exp(-i Omega t), which keeps the small qubit-induced displacement free
// of cancellation error even for |beta0| ~ 1e7.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "awm/philox.hpp"
#include "awm/physics.hpp"
#include "awm/thermo.hpp"

namespace awm {

/// How jump rates (and the work source) are tied to the mechanics.
enum class Mode {
    markovian,             // rates at the free orbit omega(beta0 e^{-i Omega t})
    trajectory_frequency,  // rates at the trajectory's own amplitude
    classical_drive,       // no back-action: a prescribed orbit drives the qubit
};

std::string_view to_string(Mode mode) noexcept;
/// Throws std::invalid_argument for an unknown name.
Mode parse_mode(std::string_view name);

struct ProtocolParams {
    double t_final = 0.0;
    std::size_t n_steps = 0;
    Mode mode = Mode::trajectory_frequency;
    std::uint64_t n_traj = 0;
    std::uint64_t master_seed = 0;
    double jitter_halfwidth = 0.0;     // 0 disables preparation jitter
    double grid_cell_halfwidth = 1.0;  // readout grid cells are 2x this wide
    bool fast_path = false;            // closed-form propagation between jumps

    /// Quarter mechanical period and the default step count.
    static ProtocolParams defaults(const PhysicalParams& p);
};

/// Per-step emission probability targeted by default_n_steps.
inline constexpr double kDefaultStepJumpProbability = 5e-3;
inline constexpr std::size_t kMinimumSteps = 1000;

/// Largest gamma dt (nbar + 1) on the free orbit for the given grid.
double max_orbit_emission_probability(const PhysicalParams& p, double t_final, std::size_t n_steps);

/// Smallest step count keeping the orbit emission probability below `target`
/// (never fewer than kMinimumSteps).
std::size_t default_n_steps(const PhysicalParams& p, double t_final,
                            double target = kDefaultStepJumpProbability);

struct JumpEvent {
    std::uint32_t step_index = 0;  // 1-based: the jump ends the interval [t_{n-1}, t_n]
    JumpKind kind = JumpKind::emission;

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

struct TrajectoryRecord {
    std::uint64_t traj_index = 0;
    QubitLevel epsilon0 = QubitLevel::g;
    Complex jitter_offset{};
    Complex beta_initial_actual{};
    std::vector<JumpEvent> jumps;
    QubitLevel epsilon_final = QubitLevel::g;
    Complex beta_final_actual{};
    Complex beta_final_ideal{};  // jitter-free amplitude; labels the final-state class
    double log_p_initial = 0.0;
    double log_p_forward = 0.0;
    double log_p_backward_conditional = 0.0;
    double log_p_final_thermal = 0.0;
    ThermoLedger ledger;
};

/// Running state of one trajectory between steps.
struct StepState {
    std::size_t n = 0;         // current grid index (time t_n)
    QubitLevel epsilon = QubitLevel::g;
    Complex offset{};          // actual amplitude minus the free orbit
    Complex ideal_offset{};    // same without preparation jitter
    double W = 0.0;
    double Q = 0.0;
    // path probabilities are ln(scale) + log_p; factors are multiplied into the
    // scales and folded into the logs before they can underflow
    double log_p_forward = 0.0;
    double log_p_backward = 0.0;
    double forward_scale = 1.0;
    double backward_scale = 1.0;

    void fold() noexcept;
};

struct StepResult {
    std::optional<JumpEvent> event;
    double forward_factor = 1.0;   // P of the forward step
    double backward_factor = 1.0;  // P~ of its reversal
    double work = 0.0;
    double heat = 0.0;
};

struct InitialDraw {
    MachineState state;
    Complex jitter_offset{};
    double log_p_initial = 0.0;
};

/// Samples trajectories for one (PhysicalParams, ProtocolParams) point.
/// Immutable after construction; safe to share between threads.
class TrajectoryEngine {
public:
    /// Validates both parameter sets and checks the step-size bound on the free
    /// orbit; throws std::invalid_argument, DomainError or PreconditionError.
    TrajectoryEngine(const PhysicalParams& physics, const ProtocolParams& protocol);

    const PhysicalParams& physics() const noexcept { return p_; }
    const ProtocolParams& protocol() const noexcept { return proto_; }
    double dt() const noexcept { return dt_; }

    /// Free-orbit amplitude beta0 exp(-i Omega t_n).
    Complex orbit(std::size_t n) const noexcept { return orbit_[n]; }
    /// theta ln(Z(beta0)/Z(orbit(N))): the Markovian free-energy change.
    double reference_free_energy() const noexcept { return reference_dF_; }

    InitialDraw sample_initial(TrajectoryRng& rng) const;

    /// Frequency at which the step starting at t_n evaluates its rates.
    double rate_frequency(const StepState& s) const;

    /// Advances `s` from t_n to t_{n+1} using the uniform draw `u`.
    StepResult step(StepState& s, double u) const;

    /// Deterministic in (master_seed, traj_index).
    TrajectoryRecord run_trajectory(std::uint64_t traj_index) const;

    /// Rebuilds the jitter-free final amplitude from a jump record alone.
    Complex replay_ideal_final(QubitLevel epsilon0, const std::vector<JumpEvent>& jumps) const;

private:
    void run_steps(StepState& s, TrajectoryRng& rng, std::vector<JumpEvent>& jumps) const;
    void run_steps_fast(StepState& s, TrajectoryRng& rng, std::vector<JumpEvent>& jumps) const;
    Complex evolve_offset(Complex offset, QubitLevel epsilon) const noexcept;
    double orbit_frequency(std::size_t n) const noexcept { return orbit_freq_[n]; }

    PhysicalParams p_;
    ProtocolParams proto_;
    double dt_ = 0.0;
    Complex rot_{};             // exp(-i Omega dt)
    double reference_dF_ = 0.0;
    std::vector<Complex> orbit_;        // n = 0..N
    std::vector<double> orbit_freq_;    // n = 0..N
    // free-orbit rate tables, n = 0..N-1
    std::vector<double> nbar_;
    std::vector<double> p_emit_;
    std::vector<double> p_absorb_;
    // cumulative ln p_stay for each level, n = 0..N (fast path)
    std::vector<double> cum_log_stay_e_;
    std::vector<double> cum_log_stay_g_;
};

}  // namespace awm

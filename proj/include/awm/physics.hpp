// physics.hpp: closed-form kernels for the qubit + mechanical oscillator machine.
//
// Unit convention: hbar = 1. Every energy is expressed as an angular frequency
// (rad/s) and k_B T is carried as `theta` (rad/s).
//
// Phase-space convention: the complex amplitude beta = (<x~> + i <p~>) / 2, so
// Re(beta) is half the position quadrature and Im(beta) half the momentum
// quadrature. With the qubit excited the amplitude rotates about the displaced
// centre (-g_m/Omega, 0); with the qubit in its ground state it rotates about 0.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace awm {

using Complex = std::complex<double>;

/// Raised when a frequency leaves the model's domain of validity (omega <= 0).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a discretisation step is too coarse for the first-order unraveling.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class QubitLevel { g, e };

inline constexpr double excited_weight(QubitLevel level) noexcept {
    return level == QubitLevel::e ? 1.0 : 0.0;
}

inline constexpr QubitLevel flipped(QubitLevel level) noexcept {
    return level == QubitLevel::e ? QubitLevel::g : QubitLevel::e;
}

inline constexpr char level_char(QubitLevel level) noexcept {
    return level == QubitLevel::e ? 'e' : 'g';
}

/// Machine and bath constants in internal (hbar = 1) units.
struct PhysicalParams {
    double omega0 = 0.0;  // bare qubit frequency
    double Omega = 0.0;   // mechanical frequency
    double gamma = 0.0;   // bare spontaneous emission rate
    double g_m = 0.0;     // qubit-mechanical coupling
    double theta = 0.0;   // k_B T / hbar
    Complex beta0{};      // nominal initial mechanical amplitude

    /// Throws std::invalid_argument when a constant is out of range.
    /// omega0, Omega and |beta0| must be strictly positive; gamma, g_m and theta
    /// may be zero (closed system, decoupled machine, zero temperature).
    void validate() const;

    bool ultra_strong() const noexcept { return g_m / Omega >= 1.0; }

    /// (g_m/Omega)/|beta0|; the Markovian description holds while this is small.
    double semiclassical_ratio() const noexcept { return (g_m / Omega) / std::abs(beta0); }

    /// Centre of the excited-state rotation on the real axis, g_m/Omega.
    double displacement() const noexcept { return g_m / Omega; }
};

/// Pure product state |epsilon, beta>.
struct MachineState {
    QubitLevel epsilon = QubitLevel::g;
    Complex beta{};
};

/// Thermal qubit populations. The logs are computed directly so that they stay
/// finite when p_e underflows (omega >> theta); log_p_e is -inf at theta = 0.
struct ThermalDistribution {
    double p_g = 1.0;
    double p_e = 0.0;
    double Z = 1.0;
    double log_p_g = 0.0;
    double log_p_e = 0.0;

    double probability(QubitLevel level) const noexcept {
        return level == QubitLevel::e ? p_e : p_g;
    }
    double log_probability(QubitLevel level) const noexcept {
        return level == QubitLevel::e ? log_p_e : log_p_g;
    }
};

struct JumpProbabilities {
    double p_minus = 0.0;  // emission e -> g
    double p_plus = 0.0;   // absorption g -> e
    double p_stay = 1.0;
};

/// Largest total jump probability allowed in one step.
inline constexpr double kMaxStepJumpProbability = 0.05;

/// omega(beta) = omega0 + 2 g_m Re(beta). Throws DomainError if the result is <= 0.
double effective_frequency(Complex beta, const PhysicalParams& p);

/// Same as effective_frequency without the domain check.
inline double effective_frequency_unchecked(Complex beta, const PhysicalParams& p) noexcept {
    return p.omega0 + 2.0 * p.g_m * beta.real();
}

/// Bose-Einstein occupation 1/(exp(omega/theta) - 1); 0 at theta = 0.
double mean_occupation(double omega, double theta);

/// Thermal qubit distribution at the effective frequency of `beta`.
ThermalDistribution thermal_distribution(Complex beta, const PhysicalParams& p);

/// Thermal qubit distribution at an explicit frequency.
ThermalDistribution thermal_distribution_at(double omega, double theta);

/// Free (epsilon = g) or displaced (epsilon = e) rotation over dt.
Complex propagate_coherent(Complex beta, QubitLevel epsilon, double dt, const PhysicalParams& p);

/// First-order Kraus probabilities with rates evaluated at `rate_freq`.
/// Throws PreconditionError when gamma dt (nbar + 1) exceeds kMaxStepJumpProbability.
JumpProbabilities jump_probabilities(const MachineState& state, double rate_freq, double dt,
                                     const PhysicalParams& p);

/// E_m = Omega |beta|^2.
inline double mechanical_energy(Complex beta, const PhysicalParams& p) noexcept {
    return p.Omega * std::norm(beta);
}

/// E_q = omega(beta) delta_{epsilon,e}.
inline double qubit_energy(const MachineState& state, const PhysicalParams& p) noexcept {
    return excited_weight(state.epsilon) * effective_frequency_unchecked(state.beta, p);
}

}  // namespace awm

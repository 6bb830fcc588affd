// thermo.hpp: per-trajectory stochastic thermodynamics.

#pragma once

#include "awm/physics.hpp"

namespace awm {

enum class JumpKind : int { emission = -1, absorption = +1 };

/// Energies in hbar = 1 units, entropies in nats.
struct ThermoLedger {
    double W = 0.0;     // work received by the qubit
    double Q = 0.0;     // heat received from the bath
    double dE_q = 0.0;  // qubit energy change
    double dE_m = 0.0;  // mechanical (battery) energy change
    double dF = 0.0;    // trajectory free-energy change
    double sigma = 0.0; // reduced entropy production, -(dE_m + dF)/theta
    double I_Sh = 0.0;  // self-information of the final mechanical state
    double dis = 0.0;   // sigma + I_Sh
    double dis_logratio = 0.0;  // ln(P/P~) evaluated from path probabilities
};

/// Work on a free-evolution step: delta_{eps,e} (omega(after) - omega(before)).
inline double work_increment(QubitLevel epsilon, Complex beta_before, Complex beta_after,
                             const PhysicalParams& p) noexcept {
    return excited_weight(epsilon) * 2.0 * p.g_m * (beta_after.real() - beta_before.real());
}

/// Heat drawn from the bath by a jump at the current amplitude:
/// -omega for an emission, +omega for an absorption.
double heat_increment(QubitLevel epsilon_before, Complex beta_at_jump, JumpKind kind,
                      const PhysicalParams& p);

/// theta ln(Z(beta_initial)/Z(beta_final)); zero at theta = 0.
double free_energy_change(Complex beta_initial_nominal, Complex beta_final, const PhysicalParams& p);

/// Free-energy change of the Markovian reference protocol, where the final
/// amplitude is the free orbit beta0 exp(-i Omega t_final).
double reference_free_energy_change(const PhysicalParams& p, double t_final);

/// Everything finalize() needs from a completed trajectory.
struct LedgerInputs {
    double W = 0.0;
    double Q = 0.0;
    double dE_q = 0.0;
    double dE_m = 0.0;
    double dF = 0.0;
    double log_p_forward = 0.0;               // ln P[Sigma], initial factor included
    double log_p_final_thermal = 0.0;         // ln p_inf at the final amplitude and level
    double log_p_backward_conditional = 0.0;  // ln prod P~ over steps
};

/// sigma = -(dE_m + dF)/theta, I_Sh = -ln P[Sigma] (final-state probability
/// identified with the path probability), dis = sigma + I_Sh, and
/// dis_logratio = -(ln p_inf[eps_N] + ln prod P~).
ThermoLedger finalize(const LedgerInputs& in, double theta);

}  // namespace awm

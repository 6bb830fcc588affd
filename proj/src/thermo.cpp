#include "awm/thermo.hpp"

#include <cmath>
#include <limits>

namespace awm {

double heat_increment(QubitLevel epsilon_before, Complex beta_at_jump, JumpKind kind,
                      const PhysicalParams& p) {
    const double w = effective_frequency(beta_at_jump, p);
    if (kind == JumpKind::emission) {
        if (epsilon_before != QubitLevel::e) throw std::logic_error("emission from the ground state");
        return -w;
    }
    if (epsilon_before != QubitLevel::g) throw std::logic_error("absorption from the excited state");
    return w;
}

namespace {

// ln Z(omega) = ln(1 + exp(-omega/theta)), theta > 0
double log_partition(double omega, double theta) {
    return std::log1p(std::exp(-omega / theta));
}

}  // namespace

double free_energy_change(Complex beta_initial_nominal, Complex beta_final, const PhysicalParams& p) {
    const double w0 = effective_frequency(beta_initial_nominal, p);
    const double wf = effective_frequency(beta_final, p);
    if (p.theta == 0.0) return 0.0;
    return p.theta * (log_partition(w0, p.theta) - log_partition(wf, p.theta));
}

double reference_free_energy_change(const PhysicalParams& p, double t_final) {
    const double phase = p.Omega * t_final;
    const Complex orbit_end = p.beta0 * Complex{std::cos(phase), -std::sin(phase)};
    return free_energy_change(p.beta0, orbit_end, p);
}

ThermoLedger finalize(const LedgerInputs& in, double theta) {
    ThermoLedger l;
    l.W = in.W;
    l.Q = in.Q;
    l.dE_q = in.dE_q;
    l.dE_m = in.dE_m;
    l.dF = in.dF;
    const double num = in.dE_m + in.dF;
    if (theta > 0.0)
        l.sigma = -num / theta;
    else
        l.sigma = num == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), -num);
    l.I_Sh = -in.log_p_forward;
    l.dis = l.sigma + l.I_Sh;
    l.dis_logratio = -(in.log_p_final_thermal + in.log_p_backward_conditional);
    return l;
}

}  // namespace awm

#include "awm/physics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace awm {

void PhysicalParams::validate() const {
    std::ostringstream err;
    if (!(omega0 > 0.0)) err << "omega0 must be > 0; ";
    if (!(Omega > 0.0)) err << "Omega must be > 0; ";
    if (!(gamma >= 0.0)) err << "gamma must be >= 0; ";
    if (!(g_m >= 0.0)) err << "g_m must be >= 0; ";
    if (!(theta >= 0.0)) err << "theta must be >= 0; ";
    if (!(std::abs(beta0) > 0.0)) err << "|beta0| must be > 0; ";
    if (!std::isfinite(omega0) || !std::isfinite(Omega) || !std::isfinite(gamma) ||
        !std::isfinite(g_m) || !std::isfinite(theta) || !std::isfinite(beta0.real()) ||
        !std::isfinite(beta0.imag()))
        err << "all constants must be finite; ";
    const auto msg = err.str();
    if (!msg.empty()) throw std::invalid_argument("invalid PhysicalParams: " + msg);
}

double effective_frequency(Complex beta, const PhysicalParams& p) {
    const double w = effective_frequency_unchecked(beta, p);
    if (!(w > 0.0)) {
        std::ostringstream os;
        os << "effective qubit frequency " << w << " rad/s at Re(beta) = " << beta.real()
           << " is not positive";
        throw DomainError(os.str());
    }
    return w;
}

double mean_occupation(double omega, double theta) {
    if (!(omega > 0.0)) throw DomainError("mean_occupation requires omega > 0");
    if (theta < 0.0) throw DomainError("mean_occupation requires theta >= 0");
    if (theta == 0.0) return 0.0;
    return 1.0 / std::expm1(omega / theta);
}

ThermalDistribution thermal_distribution_at(double omega, double theta) {
    if (!(omega > 0.0)) throw DomainError("thermal_distribution requires omega > 0");
    ThermalDistribution d;
    if (theta == 0.0) {
        d.log_p_e = -std::numeric_limits<double>::infinity();
        return d;
    }
    const double x = omega / theta;
    const double boltz = std::exp(-x);
    d.Z = 1.0 + boltz;
    d.p_g = 1.0 / d.Z;
    d.p_e = boltz / d.Z;
    const double log_z = std::log1p(boltz);
    d.log_p_g = -log_z;
    d.log_p_e = -x - log_z;
    return d;
}

ThermalDistribution thermal_distribution(Complex beta, const PhysicalParams& p) {
    return thermal_distribution_at(effective_frequency(beta, p), p.theta);
}

Complex propagate_coherent(Complex beta, QubitLevel epsilon, double dt, const PhysicalParams& p) {
    const double phase = p.Omega * dt;
    const Complex rot{std::cos(phase), -std::sin(phase)};
    if (epsilon == QubitLevel::g) return beta * rot;
    const double c = p.displacement();
    return (beta + c) * rot - c;
}

JumpProbabilities jump_probabilities(const MachineState& state, double rate_freq, double dt,
                                     const PhysicalParams& p) {
    const double nbar = mean_occupation(rate_freq, p.theta);
    const double emission = p.gamma * dt * (nbar + 1.0);
    if (emission > kMaxStepJumpProbability) {
        std::ostringstream os;
        os << "step too coarse: gamma*dt*(nbar+1) = " << emission << " exceeds "
           << kMaxStepJumpProbability;
        throw PreconditionError(os.str());
    }
    JumpProbabilities j;
    if (state.epsilon == QubitLevel::e)
        j.p_minus = emission;
    else
        j.p_plus = p.gamma * dt * nbar;
    j.p_stay = 1.0 - j.p_minus - j.p_plus;
    return j;
}

}  // namespace awm

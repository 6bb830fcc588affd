#include "awm/enumerate.hpp"

#include <cmath>
#include <stdexcept>

namespace awm {

namespace {

struct Walker {
    const PhysicalParams& p;
    const ProtocolParams& proto;
    std::size_t max_jumps;
    double dt;
    double theta;
    QubitLevel eps0 = QubitLevel::g;
    double log_p0 = 0.0;
    EnumerationResult acc{};
    // weighted sums
    double sW = 0, sQ = 0, sEm = 0, sDis = 0, sDisLr = 0, sLam = 0, sIft = 0, sJe = 0, sPop = 0;

    Complex nominal(std::size_t n) const {
        const double ph = p.Omega * dt * static_cast<double>(n);
        return p.beta0 * Complex{std::cos(ph), -std::sin(ph)};
    }

    void walk(std::size_t n, QubitLevel eps, Complex beta, double W, double Q, double logP,
              double logPb, std::size_t jumps) {
        if (n == proto.n_steps) {
            finish(eps, beta, W, Q, logP, logPb);
            return;
        }
        const bool drive = proto.mode == Mode::classical_drive;
        const Complex nom = nominal(n);
        const double rate_w =
            effective_frequency(proto.mode == Mode::trajectory_frequency ? beta : nom, p);
        const auto fwd = jump_probabilities({eps, beta}, rate_w, dt, p);
        const auto rev = jump_probabilities({flipped(eps), beta}, rate_w, dt, p);
        const double p_jump = eps == QubitLevel::e ? fwd.p_minus : fwd.p_plus;
        // reversed jump probability from the post-jump level
        const double p_rev_jump = eps == QubitLevel::e ? rev.p_plus : rev.p_minus;

        auto evolve = [&](QubitLevel lvl, double& w) {
            if (drive) {
                const Complex nb = nominal(n + 1);
                if (lvl == QubitLevel::e) w += effective_frequency(nb, p) - effective_frequency(nom, p);
                return beta + (nb - nom);
            }
            const Complex nb = propagate_coherent(beta, lvl, dt, p);
            w += work_increment(lvl, beta, nb, p);
            return nb;
        };

        {
            double w = W;
            const Complex nb = evolve(eps, w);
            walk(n + 1, eps, nb, w, Q, logP + std::log1p(-p_jump), logPb + std::log1p(-p_jump), jumps);
        }
        if (p_jump > 0.0) {
            if (jumps >= max_jumps) {
                acc.truncated_probability += std::exp(logP) * p_jump;
                return;
            }
            const JumpKind kind = eps == QubitLevel::e ? JumpKind::emission : JumpKind::absorption;
            const double q = drive ? (kind == JumpKind::emission ? -effective_frequency(nom, p)
                                                                 : effective_frequency(nom, p))
                                   : heat_increment(eps, beta, kind, p);
            const QubitLevel after = flipped(eps);
            double w = W;
            const Complex nb = evolve(after, w);
            walk(n + 1, after, nb, w, Q + q, logP + std::log(p_jump), logPb + std::log(p_rev_jump),
                 jumps + 1);
        }
    }

    void finish(QubitLevel eps, Complex beta, double W, double Q, double logP, double logPb) {
        const double P = std::exp(logP);
        const std::size_t N = proto.n_steps;
        double dEm, w_end, dF;
        if (proto.mode == Mode::classical_drive) {
            dEm = -W;
            w_end = effective_frequency(nominal(N), p);
            dF = free_energy_change(p.beta0, nominal(N), p);
        } else {
            dEm = mechanical_energy(beta, p) - mechanical_energy(p.beta0, p);
            w_end = effective_frequency(beta, p);
            dF = free_energy_change(p.beta0, beta, p);
        }
        LedgerInputs in;
        in.W = W;
        in.Q = Q;
        in.dE_m = dEm;
        in.dF = dF;
        in.log_p_forward = logP;
        in.log_p_final_thermal = thermal_distribution_at(w_end, theta).log_probability(eps);
        in.log_p_backward_conditional = logPb;
        const auto l = finalize(in, theta);

        ++acc.n_paths;
        acc.total_probability += P;
        sW += P * W;
        sQ += P * Q;
        sEm += P * dEm;
        sDis += P * l.dis;
        sDisLr += P * l.dis_logratio;
        sLam += P * std::exp(in.log_p_final_thermal + logPb);
        sIft += P * std::exp(-l.dis);
        sJe += P * std::exp(dEm / theta);
        sPop += P * excited_weight(eps);
    }
};

}  // namespace

EnumerationResult enumerate_paths(const PhysicalParams& p, const ProtocolParams& proto,
                                  std::size_t max_jumps) {
    p.validate();
    if (proto.jitter_halfwidth != 0.0) throw std::invalid_argument("enumeration needs jitter_halfwidth = 0");
    if (proto.n_steps == 0 || proto.n_steps > 64)
        throw std::invalid_argument("enumeration supports 1..64 steps");
    if (!(p.theta > 0.0)) throw std::invalid_argument("enumeration needs theta > 0");
    Walker wk{p, proto, max_jumps, proto.t_final / static_cast<double>(proto.n_steps), p.theta};
    const auto th = thermal_distribution(p.beta0, p);
    for (QubitLevel eps : {QubitLevel::g, QubitLevel::e}) {
        const double lp = th.log_probability(eps);
        if (std::isinf(lp)) continue;
        wk.walk(0, eps, p.beta0, 0.0, 0.0, lp, 0.0, 0);
    }
    auto r = wk.acc;
    const double z = r.total_probability;
    if (z > 0.0) {
        r.mean_W = wk.sW / z;
        r.mean_Q = wk.sQ / z;
        r.mean_dE_m = wk.sEm / z;
        r.mean_dis = wk.sDis / z;
        r.mean_dis_logratio = wk.sDisLr / z;
        r.mean_lambda_kernel = wk.sLam / z;
        r.mean_ift_kernel = wk.sIft / z;
        r.mean_je_kernel = wk.sJe / z;
        r.population_e = wk.sPop / z;
    }
    return r;
}

}  // namespace awm

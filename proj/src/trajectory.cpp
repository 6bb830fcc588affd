#include "awm/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace awm {

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::markovian: return "markovian";
        case Mode::trajectory_frequency: return "trajectory_frequency";
        case Mode::classical_drive: return "classical_drive";
    }
    return "unknown";
}

Mode parse_mode(std::string_view name) {
    if (name == "markovian") return Mode::markovian;
    if (name == "trajectory_frequency") return Mode::trajectory_frequency;
    if (name == "classical_drive") return Mode::classical_drive;
    throw std::invalid_argument("unknown mode '" + std::string(name) +
                                "' (expected markovian, trajectory_frequency or classical_drive)");
}

namespace {

Complex rotation(double phase) { return {std::cos(phase), -std::sin(phase)}; }

double occupation_or_zero(double omega, double theta) {
    if (theta == 0.0) return 0.0;
    const double x = omega / theta;
    // exp is cheaper than expm1 and loses nothing once x is of order one
    return x > 0.5 ? 1.0 / (std::exp(x) - 1.0) : 1.0 / std::expm1(x);
}

}  // namespace

double max_orbit_emission_probability(const PhysicalParams& p, double t_final, std::size_t n_steps) {
    if (n_steps == 0) throw std::invalid_argument("n_steps must be positive");
    const double dt = t_final / static_cast<double>(n_steps);
    // nbar is largest where omega is smallest; scan the grid and the analytic minimum
    double omega_min = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n <= n_steps; ++n) {
        const Complex b = p.beta0 * rotation(p.Omega * dt * static_cast<double>(n));
        omega_min = std::min(omega_min, effective_frequency(b, p));
    }
    return p.gamma * dt * (mean_occupation(omega_min, p.theta) + 1.0);
}

std::size_t default_n_steps(const PhysicalParams& p, double t_final, double target) {
    // rate bound over the continuous orbit segment, then round up
    const std::size_t probe = 4096;
    const double dt_probe = t_final / static_cast<double>(probe);
    double omega_min = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n <= probe; ++n) {
        const Complex b = p.beta0 * rotation(p.Omega * dt_probe * static_cast<double>(n));
        omega_min = std::min(omega_min, effective_frequency(b, p));
    }
    const double max_rate = p.gamma * (mean_occupation(omega_min, p.theta) + 1.0);
    const double needed = std::ceil(max_rate * t_final / target);
    return std::max<std::size_t>(kMinimumSteps, static_cast<std::size_t>(needed));
}

ProtocolParams ProtocolParams::defaults(const PhysicalParams& p) {
    ProtocolParams proto;
    proto.t_final = std::numbers::pi / (2.0 * p.Omega);
    proto.n_steps = default_n_steps(p, proto.t_final);
    return proto;
}

void StepState::fold() noexcept {
    log_p_forward += std::log(forward_scale);
    log_p_backward += std::log(backward_scale);
    forward_scale = 1.0;
    backward_scale = 1.0;
}

TrajectoryEngine::TrajectoryEngine(const PhysicalParams& physics, const ProtocolParams& protocol)
    : p_(physics), proto_(protocol) {
    p_.validate();
    if (!(proto_.t_final > 0.0) || !std::isfinite(proto_.t_final))
        throw std::invalid_argument("t_final must be positive and finite");
    if (proto_.n_steps == 0) throw std::invalid_argument("n_steps must be positive");
    if (proto_.n_steps > std::numeric_limits<std::uint32_t>::max())
        throw std::invalid_argument("n_steps too large");
    if (!(proto_.jitter_halfwidth >= 0.0)) throw std::invalid_argument("jitter_halfwidth must be >= 0");
    if (!(proto_.grid_cell_halfwidth > 0.0))
        throw std::invalid_argument("grid_cell_halfwidth must be > 0");
    if (proto_.fast_path && proto_.mode == Mode::trajectory_frequency)
        throw std::invalid_argument("the fast path needs rates independent of the trajectory");

    const std::size_t N = proto_.n_steps;
    dt_ = proto_.t_final / static_cast<double>(N);
    rot_ = rotation(p_.Omega * dt_);

    orbit_.resize(N + 1);
    orbit_freq_.resize(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        orbit_[n] = p_.beta0 * rotation(p_.Omega * dt_ * static_cast<double>(n));
        orbit_freq_[n] = effective_frequency(orbit_[n], p_);
    }
    orbit_[0] = p_.beta0;

    nbar_.resize(N);
    p_emit_.resize(N);
    p_absorb_.resize(N);
    cum_log_stay_e_.assign(N + 1, 0.0);
    cum_log_stay_g_.assign(N + 1, 0.0);
    double worst = 0.0;
    std::size_t worst_n = 0;
    for (std::size_t n = 0; n < N; ++n) {
        nbar_[n] = occupation_or_zero(orbit_freq_[n], p_.theta);
        p_emit_[n] = p_.gamma * dt_ * (nbar_[n] + 1.0);
        p_absorb_[n] = p_.gamma * dt_ * nbar_[n];
        if (p_emit_[n] > worst) {
            worst = p_emit_[n];
            worst_n = n;
        }
        cum_log_stay_e_[n + 1] = cum_log_stay_e_[n] + std::log1p(-p_emit_[n]);
        cum_log_stay_g_[n + 1] = cum_log_stay_g_[n] + std::log1p(-p_absorb_[n]);
    }
    if (worst > kMaxStepJumpProbability) {
        std::ostringstream os;
        os << "n_steps = " << N << " is too small: gamma*dt*(nbar+1) reaches " << worst
           << " at step " << worst_n << " (bound " << kMaxStepJumpProbability << "); need n_steps >= "
           << static_cast<std::size_t>(std::ceil(static_cast<double>(N) * worst / kMaxStepJumpProbability));
        throw PreconditionError(os.str());
    }
    reference_dF_ = free_energy_change(orbit_[0], orbit_[N], p_);
}

InitialDraw TrajectoryEngine::sample_initial(TrajectoryRng& rng) const {
    const auto thermal = thermal_distribution_at(orbit_freq_[0], p_.theta);
    InitialDraw d;
    d.state.epsilon = rng.uniform() < thermal.p_e ? QubitLevel::e : QubitLevel::g;
    d.log_p_initial = thermal.log_probability(d.state.epsilon);
    if (proto_.jitter_halfwidth > 0.0) {
        const double h = proto_.jitter_halfwidth;
        const double re = h * (2.0 * rng.uniform() - 1.0);
        const double im = h * (2.0 * rng.uniform() - 1.0);
        d.jitter_offset = {re, im};
    }
    d.state.beta = p_.beta0 + d.jitter_offset;
    return d;
}

double TrajectoryEngine::rate_frequency(const StepState& s) const {
    if (proto_.mode != Mode::trajectory_frequency) return orbit_freq_[s.n];
    // jitter is kept out of the rates so that the class probability is P[Sigma]
    const Complex beta = orbit_[s.n] + s.ideal_offset;
    return effective_frequency(beta, p_);
}

Complex TrajectoryEngine::evolve_offset(Complex offset, QubitLevel epsilon) const noexcept {
    if (epsilon == QubitLevel::e && proto_.mode != Mode::classical_drive) {
        const double c = p_.displacement();
        return (offset + c) * rot_ - c;
    }
    return offset * rot_;
}

StepResult TrajectoryEngine::step(StepState& s, double u) const {
    const std::size_t n = s.n;
    if (n >= proto_.n_steps) throw std::out_of_range("step past the end of the protocol");

    double nbar = 0.0;
    double p_emit = 0.0;
    double p_absorb = 0.0;
    if (proto_.mode == Mode::trajectory_frequency) {
        const double w = rate_frequency(s);
        nbar = occupation_or_zero(w, p_.theta);
        p_emit = p_.gamma * dt_ * (nbar + 1.0);
        p_absorb = p_.gamma * dt_ * nbar;
        if (p_emit > kMaxStepJumpProbability) {
            std::ostringstream os;
            os << "gamma*dt*(nbar+1) = " << p_emit << " exceeds " << kMaxStepJumpProbability;
            throw PreconditionError(os.str());
        }
    } else {
        nbar = nbar_[n];
        p_emit = p_emit_[n];
        p_absorb = p_absorb_[n];
    }

    StepResult r;
    const bool excited = s.epsilon == QubitLevel::e;
    const double p_jump = excited ? p_emit : p_absorb;
    if (u < p_jump) {
        const JumpKind kind = excited ? JumpKind::emission : JumpKind::absorption;
        double w_jump = 0.0;
        if (proto_.mode == Mode::classical_drive)
            w_jump = orbit_freq_[n];
        else
            w_jump = effective_frequency(orbit_[n] + s.offset, p_);
        r.heat = excited ? -w_jump : w_jump;
        // reversed jump out of the post-jump level at the same frequency
        r.forward_factor = p_jump;
        r.backward_factor = excited ? p_absorb : p_emit;
        r.event = JumpEvent{static_cast<std::uint32_t>(n + 1), kind};
        s.epsilon = flipped(s.epsilon);
    } else {
        // the reversed no-jump operator leaves the same level at the same rate
        r.forward_factor = 1.0 - p_jump;
        r.backward_factor = r.forward_factor;
    }

    const Complex offset_next = evolve_offset(s.offset, s.epsilon);
    if (s.epsilon == QubitLevel::e) {
        if (proto_.mode == Mode::classical_drive) {
            r.work = orbit_freq_[n + 1] - orbit_freq_[n];
        } else {
            const double d_re = (orbit_[n + 1].real() - orbit_[n].real()) +
                                (offset_next.real() - s.offset.real());
            r.work = 2.0 * p_.g_m * d_re;
        }
    }
    s.offset = offset_next;
    s.ideal_offset = proto_.jitter_halfwidth > 0.0 ? evolve_offset(s.ideal_offset, s.epsilon) : offset_next;
    s.W += r.work;
    s.Q += r.heat;
    s.forward_scale *= r.forward_factor;
    s.backward_scale *= r.backward_factor;
    if (s.forward_scale < 1e-250 || s.backward_scale < 1e-250) s.fold();
    s.n = n + 1;
    return r;
}

void TrajectoryEngine::run_steps(StepState& s, TrajectoryRng& rng, std::vector<JumpEvent>& jumps) const {
    while (s.n < proto_.n_steps) {
        const auto r = step(s, rng.uniform());
        if (r.event) jumps.push_back(*r.event);
    }
}

void TrajectoryEngine::run_steps_fast(StepState& s, TrajectoryRng& rng,
                                      std::vector<JumpEvent>& jumps) const {
    const std::size_t N = proto_.n_steps;
    const double c = proto_.mode == Mode::classical_drive ? 0.0 : p_.displacement();
    auto advance = [&](Complex offset, QubitLevel eps, std::size_t k) {
        const Complex rk = rotation(p_.Omega * dt_ * static_cast<double>(k));
        if (eps == QubitLevel::e) return (offset + c) * rk - c;
        return offset * rk;
    };
    while (s.n < N) {
        const std::size_t n = s.n;
        const auto& cum = s.epsilon == QubitLevel::e ? cum_log_stay_e_ : cum_log_stay_g_;
        // first m >= n whose step ends the no-jump run: cum[m+1] - cum[n] < ln v
        const double threshold = cum[n] + std::log(rng.uniform());
        const auto it = std::upper_bound(cum.begin() + static_cast<std::ptrdiff_t>(n) + 1, cum.end(),
                                         threshold, [](double t, double v) { return t > v; });
        const std::size_t m = it == cum.end() ? N : static_cast<std::size_t>(it - cum.begin()) - 1;

        const std::size_t k = m - n;
        if (k > 0) {
            const Complex next = advance(s.offset, s.epsilon, k);
            if (s.epsilon == QubitLevel::e) {
                if (proto_.mode == Mode::classical_drive) {
                    s.W += orbit_freq_[m] - orbit_freq_[n];
                } else {
                    const double d_re = (orbit_[m].real() - orbit_[n].real()) +
                                        (next.real() - s.offset.real());
                    s.W += 2.0 * p_.g_m * d_re;
                }
            }
            s.offset = next;
            s.ideal_offset = advance(s.ideal_offset, s.epsilon, k);
            const double dlog = cum[m] - cum[n];
            s.log_p_forward += dlog;
            s.log_p_backward += dlog;
            s.n = m;
        }
        if (m == N) break;

        const bool excited = s.epsilon == QubitLevel::e;
        const double p_jump = excited ? p_emit_[m] : p_absorb_[m];
        const double p_reverse = excited ? p_absorb_[m] : p_emit_[m];
        const double w_jump = proto_.mode == Mode::classical_drive
                                  ? orbit_freq_[m]
                                  : effective_frequency(orbit_[m] + s.offset, p_);
        s.Q += excited ? -w_jump : w_jump;
        s.forward_scale *= p_jump;
        s.backward_scale *= p_reverse;
        if (s.forward_scale < 1e-250 || s.backward_scale < 1e-250) s.fold();
        jumps.push_back({static_cast<std::uint32_t>(m + 1),
                         excited ? JumpKind::emission : JumpKind::absorption});
        s.epsilon = flipped(s.epsilon);
        // the evolution of step m belongs to the next run, which starts at m
    }
}

TrajectoryRecord TrajectoryEngine::run_trajectory(std::uint64_t traj_index) const {
    TrajectoryRng rng(proto_.master_seed, traj_index);
    TrajectoryRecord rec;
    rec.traj_index = traj_index;

    StepState s;
    try {
        const auto init = sample_initial(rng);
        rec.epsilon0 = init.state.epsilon;
        rec.jitter_offset = init.jitter_offset;
        rec.beta_initial_actual = init.state.beta;
        rec.log_p_initial = init.log_p_initial;

        s.epsilon = init.state.epsilon;
        s.offset = init.jitter_offset;
        if (proto_.fast_path)
            run_steps_fast(s, rng, rec.jumps);
        else
            run_steps(s, rng, rec.jumps);
    } catch (const DomainError& e) {
        std::ostringstream os;
        os << "trajectory " << traj_index << ", step " << s.n + 1 << ": " << e.what();
        throw DomainError(os.str());
    } catch (const PreconditionError& e) {
        std::ostringstream os;
        os << "trajectory " << traj_index << ", step " << s.n + 1 << ": " << e.what();
        throw PreconditionError(os.str());
    }

    s.fold();
    const std::size_t N = proto_.n_steps;
    const Complex orbit_end = orbit_[N];
    rec.epsilon_final = s.epsilon;
    rec.beta_final_actual = orbit_end + s.offset;
    rec.beta_final_ideal = orbit_end + s.ideal_offset;
    rec.log_p_forward = rec.log_p_initial + s.log_p_forward;
    rec.log_p_backward_conditional = s.log_p_backward;

    LedgerInputs in;
    in.W = s.W;
    in.Q = s.Q;
    const double e0 = excited_weight(rec.epsilon0);
    const double eN = excited_weight(rec.epsilon_final);
    if (proto_.mode == Mode::classical_drive) {
        // the drive is the work source; its energy change mirrors the work
        in.dE_m = -s.W;
        in.dE_q = eN * orbit_freq_[N] - e0 * orbit_freq_[0];
        in.dF = reference_dF_;
        rec.log_p_final_thermal =
            thermal_distribution_at(orbit_freq_[N], p_.theta).log_probability(rec.epsilon_final);
    } else {
        // |orbit| is constant, so only the offsets enter the mechanical energy change
        const Complex d0 = rec.jitter_offset;
        const Complex dN = s.offset;
        const double before = 2.0 * (std::conj(orbit_[0]) * d0).real() + std::norm(d0);
        const double after = 2.0 * (std::conj(orbit_end) * dN).real() + std::norm(dN);
        in.dE_m = p_.Omega * (after - before);
        const double wN = effective_frequency(rec.beta_final_actual, p_);
        const double w0 = effective_frequency(rec.beta_initial_actual, p_);
        in.dE_q = eN * wN - e0 * w0;
        in.dF = free_energy_change(p_.beta0, rec.beta_final_actual, p_);
        rec.log_p_final_thermal = thermal_distribution_at(wN, p_.theta).log_probability(rec.epsilon_final);
    }
    in.log_p_forward = rec.log_p_forward;
    in.log_p_final_thermal = rec.log_p_final_thermal;
    in.log_p_backward_conditional = rec.log_p_backward_conditional;
    rec.ledger = finalize(in, p_.theta);
    return rec;
}

Complex TrajectoryEngine::replay_ideal_final(QubitLevel epsilon0, const std::vector<JumpEvent>& jumps) const {
    const std::size_t N = proto_.n_steps;
    QubitLevel eps = epsilon0;
    Complex offset{};
    if (proto_.fast_path) {
        const double c = proto_.mode == Mode::classical_drive ? 0.0 : p_.displacement();
        std::size_t n = 0;
        auto advance = [&](std::size_t m) {
            const std::size_t k = m - n;
            if (k == 0) return;
            const Complex rk = rotation(p_.Omega * dt_ * static_cast<double>(k));
            offset = eps == QubitLevel::e ? (offset + c) * rk - c : offset * rk;
            n = m;
        };
        for (const auto& j : jumps) {
            advance(j.step_index - 1);
            eps = flipped(eps);
        }
        advance(N);
        return orbit_[N] + offset;
    }
    auto next = jumps.begin();
    for (std::size_t n = 0; n < N; ++n) {
        if (next != jumps.end() && next->step_index == n + 1) {
            eps = flipped(eps);
            ++next;
        }
        offset = evolve_offset(offset, eps);
    }
    return orbit_[N] + offset;
}

}  // namespace awm

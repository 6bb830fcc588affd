#include "awm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace awm {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& o) noexcept {
    add(o.sum_);
    comp_ += o.comp_;
}

void RunningStat::add(double x) noexcept {
    if (!std::isfinite(x)) {
        ++bad_;
        return;
    }
    ++n_;
    sum_.add(x);
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
    max_ = std::max(max_, x);
}

void RunningStat::merge(const RunningStat& o) noexcept {
    bad_ += o.bad_;
    if (o.n_ == 0) return;
    if (n_ == 0) {
        const auto bad = bad_;
        *this = o;
        bad_ = bad;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double delta = o.mean_ - mean_;
    const double n = na + nb;
    m2_ += o.m2_ + delta * delta * na * nb / n;
    mean_ += delta * nb / n;
    n_ += o.n_;
    sum_.merge(o.sum_);
    max_ = std::max(max_, o.max_);
}

double RunningStat::variance() const noexcept {
    return n_ < 2 ? 0.0 : std::max(0.0, m2_ / static_cast<double>(n_ - 1));
}

double RunningStat::std_error() const noexcept {
    return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

namespace {

// exp with the argument clamped to the representable range; an overflowing
// kernel turns into +inf and is reported through RunningStat::non_finite.
double guarded_exp(double x) noexcept {
    if (std::isnan(x)) return x;
    if (x > 709.78) return std::numeric_limits<double>::infinity();
    return std::exp(x);
}

void require_samples(const RunningStat& s, std::uint64_t minimum, const char* what) {
    if (s.count() < minimum)
        throw EmptyAggregateError(std::string(what) + " needs at least " + std::to_string(minimum) +
                                  " trajectories, have " + std::to_string(s.count()));
    if (s.non_finite() > 0)
        throw std::overflow_error(std::string(what) + ": " + std::to_string(s.non_finite()) +
                                  " kernel values overflowed");
}

}  // namespace

void EnsembleAggregate::add(const TrajectoryRecord& rec, double theta) {
    const auto& l = rec.ledger;
    if (theta > 0.0)
        je_kernel.add(guarded_exp(l.dE_m / theta));
    else
        je_kernel.add(l.dE_m > 0 ? std::numeric_limits<double>::infinity() : (l.dE_m < 0 ? 0.0 : 1.0));
    ift_kernel.add(guarded_exp(-l.dis));
    ift_kernel_logratio.add(guarded_exp(-l.dis_logratio));
    lambda_kernel.add(guarded_exp(rec.log_p_final_thermal + rec.log_p_backward_conditional));
    dis.add(l.dis);
    dis_logratio.add(l.dis_logratio);
    dis_mismatch.add(std::abs(l.dis - l.dis_logratio));
    sigma.add(l.sigma);
    I_Sh.add(l.I_Sh);
    W.add(l.W);
    Q.add(l.Q);
    dE_m.add(l.dE_m);
    population_e.add(excited_weight(rec.epsilon_final));
    n_jumps.add(static_cast<double>(rec.jumps.size()));
}

void EnsembleAggregate::merge(const EnsembleAggregate& o) {
    je_kernel.merge(o.je_kernel);
    ift_kernel.merge(o.ift_kernel);
    ift_kernel_logratio.merge(o.ift_kernel_logratio);
    lambda_kernel.merge(o.lambda_kernel);
    dis.merge(o.dis);
    dis_logratio.merge(o.dis_logratio);
    dis_mismatch.merge(o.dis_mismatch);
    sigma.merge(o.sigma);
    I_Sh.merge(o.I_Sh);
    W.merge(o.W);
    Q.merge(o.Q);
    dE_m.merge(o.dE_m);
    population_e.merge(o.population_e);
    n_jumps.merge(o.n_jumps);
}

Estimate mean_of(const RunningStat& s) {
    require_samples(s, 1, "mean");
    return {s.mean(), s.std_error()};
}

Estimate je_deviation(const EnsembleAggregate& agg, double dF_ref, double theta) {
    require_samples(agg.je_kernel, 2, "je_deviation");
    const double scale = theta > 0.0 ? std::exp(dF_ref / theta) : 1.0;
    return {agg.je_kernel.mean() * scale - 1.0, agg.je_kernel.std_error() * scale};
}

Estimate ift_lhs(const EnsembleAggregate& agg) {
    require_samples(agg.ift_kernel, 2, "ift_lhs");
    return {agg.ift_kernel.mean(), agg.ift_kernel.std_error()};
}

Estimate ift_lhs_logratio(const EnsembleAggregate& agg) {
    require_samples(agg.ift_kernel_logratio, 2, "ift_lhs_logratio");
    return {agg.ift_kernel_logratio.mean(), agg.ift_kernel_logratio.std_error()};
}

Estimate lambda_estimate(const EnsembleAggregate& agg) {
    require_samples(agg.lambda_kernel, 2, "lambda_estimate");
    return {1.0 - agg.lambda_kernel.mean(), agg.lambda_kernel.std_error()};
}

Estimate mean_entropy_production(const EnsembleAggregate& agg) {
    require_samples(agg.dis_logratio, 2, "mean_entropy_production");
    return {agg.dis_logratio.mean(), agg.dis_logratio.std_error()};
}

Estimate mean_entropy_production_direct(const EnsembleAggregate& agg) {
    require_samples(agg.dis, 2, "mean_entropy_production_direct");
    return {agg.dis.mean(), agg.dis.std_error()};
}

HeavyTailReport je_heavy_tail(const EnsembleAggregate& agg) {
    HeavyTailReport r;
    if (agg.je_kernel.count() == 0) return r;
    r.max_kernel = agg.je_kernel.max();
    const double total = agg.je_kernel.sum();
    r.max_share = total > 0.0 ? r.max_kernel / total : 0.0;
    r.flagged = r.max_share > kHeavyTailShare;
    return r;
}

}  // namespace awm

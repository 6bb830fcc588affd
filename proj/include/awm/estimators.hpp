// estimators.hpp: mergeable ensemble statistics and the fluctuation-theorem
// estimators built on them.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

#include "awm/trajectory.hpp"

namespace awm {

/// Raised when an estimator is read from an aggregate with too few samples.
class EmptyAggregateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Neumaier-compensated sum.
class CompensatedSum {
public:
    void add(double x) noexcept;
    void merge(const CompensatedSum& o) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Count, compensated sum, Welford second moment and running maximum.
/// merge() uses Chan's pairwise update; merging in a fixed order is bit-stable.
class RunningStat {
public:
    void add(double x) noexcept;
    void merge(const RunningStat& o) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double sum() const noexcept { return sum_.value(); }
    double mean() const noexcept { return n_ ? sum_.value() / static_cast<double>(n_) : 0.0; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    double variance() const noexcept;
    double std_error() const noexcept;
    double max() const noexcept { return max_; }
    /// Non-finite inputs are counted but kept out of the moments.
    std::uint64_t non_finite() const noexcept { return bad_; }

private:
    std::uint64_t n_ = 0;
    std::uint64_t bad_ = 0;
    CompensatedSum sum_;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double max_ = -std::numeric_limits<double>::infinity();
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Per-trajectory kernels accumulated for one parameter point.
struct EnsembleAggregate {
    RunningStat je_kernel;        // exp(dE_m/theta)
    RunningStat ift_kernel;       // exp(-dis)
    RunningStat ift_kernel_logratio;  // exp(-dis_logratio)
    RunningStat lambda_kernel;    // p_inf[eps_N] prod P~
    RunningStat dis;
    RunningStat dis_logratio;
    RunningStat dis_mismatch;     // |dis - dis_logratio|
    RunningStat sigma;
    RunningStat I_Sh;
    RunningStat W;
    RunningStat Q;
    RunningStat dE_m;
    RunningStat population_e;     // delta_{eps_N, e}
    RunningStat n_jumps;

    void add(const TrajectoryRecord& rec, double theta);
    void merge(const EnsembleAggregate& o);
    std::uint64_t count() const noexcept { return W.count(); }
};

/// <exp(dE_m/theta)> exp(dF_ref/theta) - 1.
Estimate je_deviation(const EnsembleAggregate& agg, double dF_ref, double theta);
/// <exp(-dis)>.
Estimate ift_lhs(const EnsembleAggregate& agg);
/// <exp(-dis_logratio)>.
Estimate ift_lhs_logratio(const EnsembleAggregate& agg);
/// 1 - <p_inf[eps_N] prod P~>.
Estimate lambda_estimate(const EnsembleAggregate& agg);
/// <dis_logratio>, the reversed-path estimator.
Estimate mean_entropy_production(const EnsembleAggregate& agg);
/// <dis> = <sigma + I_Sh>, the final-distribution estimator.
Estimate mean_entropy_production_direct(const EnsembleAggregate& agg);
/// <x> with standard error for any accumulated quantity.
Estimate mean_of(const RunningStat& s);

struct HeavyTailReport {
    double max_kernel = 0.0;
    double max_share = 0.0;  // max / sum
    bool flagged = false;    // one trajectory carries more than 10% of the sum
};

HeavyTailReport je_heavy_tail(const EnsembleAggregate& agg);

inline constexpr double kHeavyTailShare = 0.10;

}  // namespace awm

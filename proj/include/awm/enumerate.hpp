// enumerate.hpp: exact path sums for tiny protocols.
//
// Walks every jump record with at most `max_jumps` jumps, using only the
// physics kernels on the full amplitude, so it is independent of the
// trajectory engine's offset bookkeeping and tables.

#pragma once

#include <cstdint>

#include "awm/trajectory.hpp"

namespace awm {

struct EnumerationResult {
    std::uint64_t n_paths = 0;
    double total_probability = 0.0;  // sum of P[Sigma] over enumerated paths
    double truncated_probability = 0.0;  // mass of paths with more jumps
    // P-weighted means over the enumerated paths (normalised by total_probability)
    double mean_W = 0.0;
    double mean_Q = 0.0;
    double mean_dE_m = 0.0;
    double mean_dis = 0.0;
    double mean_dis_logratio = 0.0;
    double mean_lambda_kernel = 0.0;
    double mean_ift_kernel = 0.0;
    double mean_je_kernel = 0.0;  // exp(dE_m/theta)
    double population_e = 0.0;
    double lambda() const noexcept { return 1.0 - mean_lambda_kernel; }
};

/// Requires jitter_halfwidth == 0 and n_steps <= 64.
EnumerationResult enumerate_paths(const PhysicalParams& p, const ProtocolParams& proto,
                                  std::size_t max_jumps);

}  // namespace awm

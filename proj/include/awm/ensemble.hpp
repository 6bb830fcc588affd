// ensemble.hpp: parallel trajectory ensembles with deterministic merging.
//
// Trajectories are cut into fixed-size shards; workers take shards in any
// order, but shard results are merged (and raw rows emitted) strictly in shard
// index order, so every output is independent of the worker count.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "awm/estimators.hpp"
#include "awm/measurement.hpp"
#include "awm/trajectory.hpp"

namespace awm {

inline constexpr std::uint64_t kDefaultShardSize = 10000;

struct EnsembleOptions {
    std::uint64_t n_traj = 0;
    unsigned workers = 1;
    std::uint64_t shard_size = kDefaultShardSize;
    bool measure = false;  // accumulate readout statistics (needs jitter and grid)
    /// Called on the merging thread, in trajectory order.
    std::function<void(const TrajectoryRecord&)> on_record;
};

struct EnsembleResult {
    EnsembleAggregate aggregate;
    std::optional<MeasurementAccumulator> measurement;
};

/// Runs options.n_traj trajectories of `engine`. The first failing shard (in
/// index order) aborts the run and its exception is rethrown.
EnsembleResult run_ensemble(const TrajectoryEngine& engine, const EnsembleOptions& options);

/// Raw per-trajectory CSV.
std::string raw_csv_header();
std::string raw_csv_row(const TrajectoryRecord& rec);

}  // namespace awm

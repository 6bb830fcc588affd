#include "awm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "awm/csv.hpp"

namespace awm {

namespace {

struct ShardResult {
    EnsembleAggregate aggregate;
    std::optional<MeasurementAccumulator> measurement;
    std::vector<TrajectoryRecord> records;  // only when a record callback is set
    std::exception_ptr error;
};

MeasurementAccumulator make_accumulator(const TrajectoryEngine& engine) {
    const auto& proto = engine.protocol();
    return MeasurementAccumulator(engine.physics(), proto.jitter_halfwidth, proto.grid_cell_halfwidth,
                                  -engine.physics().Omega * proto.t_final);
}

ShardResult run_shard(const TrajectoryEngine& engine, const EnsembleOptions& opt, std::uint64_t first,
                      std::uint64_t last) {
    ShardResult r;
    if (opt.measure) r.measurement = make_accumulator(engine);
    try {
        const double theta = engine.physics().theta;
        for (std::uint64_t i = first; i < last; ++i) {
            auto rec = engine.run_trajectory(i);
            r.aggregate.add(rec, theta);
            if (r.measurement) r.measurement->add(rec);
            if (opt.on_record) r.records.push_back(std::move(rec));
        }
    } catch (...) {
        r.error = std::current_exception();
    }
    return r;
}

}  // namespace

EnsembleResult run_ensemble(const TrajectoryEngine& engine, const EnsembleOptions& opt) {
    if (opt.shard_size == 0) throw std::invalid_argument("shard_size must be positive");
    if (opt.measure && !(engine.protocol().grid_cell_halfwidth > 0.0))
        throw std::invalid_argument("measurement needs a positive grid half-width");

    EnsembleResult out;
    if (opt.measure) out.measurement = make_accumulator(engine);
    const std::uint64_t n_shards = (opt.n_traj + opt.shard_size - 1) / opt.shard_size;
    if (n_shards == 0) return out;

    std::vector<std::optional<ShardResult>> slots(n_shards);
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::uint64_t> next_shard{0};
    std::atomic<bool> abort{false};

    auto worker = [&] {
        for (;;) {
            if (abort.load()) return;
            const std::uint64_t s = next_shard.fetch_add(1);
            if (s >= n_shards) return;
            const std::uint64_t first = s * opt.shard_size;
            const std::uint64_t last = std::min(opt.n_traj, first + opt.shard_size);
            auto res = run_shard(engine, opt, first, last);
            if (res.error) abort.store(true);
            {
                std::lock_guard lock(mu);
                slots[s] = std::move(res);
            }
            cv.notify_all();
        }
    };

    const unsigned n_workers =
        static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(opt.workers, n_shards)));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);

    std::exception_ptr failure;
    try {
        for (std::uint64_t s = 0; s < n_shards; ++s) {
            std::optional<ShardResult> res;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return slots[s].has_value() || abort.load(); });
                if (!slots[s]) break;
                res = std::move(slots[s]);
                slots[s].reset();
            }
            if (res->error) {
                failure = res->error;
                break;
            }
            out.aggregate.merge(res->aggregate);
            if (out.measurement) out.measurement->merge(*res->measurement);
            for (const auto& rec : res->records) opt.on_record(rec);
        }
    } catch (...) {
        failure = std::current_exception();
        abort.store(true);
    }
    for (auto& t : pool) t.join();

    if (!failure && abort.load()) {
        // a later shard failed while an earlier one was still unmerged
        for (auto& slot : slots)
            if (slot && slot->error) {
                failure = slot->error;
                break;
            }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string raw_csv_header() {
    return "traj_index,epsilon0,n_jumps,re_beta_final_actual,im_beta_final_actual,"
           "re_beta_final_ideal,im_beta_final_ideal,W,Q,dF,sigma,I_Sh,dis,"
           "log_p_forward,log_p_backward_conditional";
}

std::string raw_csv_row(const TrajectoryRecord& rec) {
    const auto& l = rec.ledger;
    std::string s = std::to_string(rec.traj_index);
    s += ',';
    s += level_char(rec.epsilon0);
    s += ',';
    s += std::to_string(rec.jumps.size());
    for (double x : {rec.beta_final_actual.real(), rec.beta_final_actual.imag(), rec.beta_final_ideal.real(),
                     rec.beta_final_ideal.imag(), l.W, l.Q, l.dF, l.sigma, l.I_Sh, l.dis, rec.log_p_forward,
                     rec.log_p_backward_conditional}) {
        s += ',';
        s += format_double(x);
    }
    return s;
}

}  // namespace awm

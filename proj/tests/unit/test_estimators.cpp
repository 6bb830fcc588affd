#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "awm/ensemble.hpp"
#include "awm/estimators.hpp"

using namespace awm;

TEST_CASE("compensated sum recovers cancelled terms") {
    CompensatedSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    CHECK(s.value() == 2.0);
}

TEST_CASE("running stat moments") {
    RunningStat s;
    for (double x : {1.0, 2.0, 3.0, 4.0}) s.add(x);
    CHECK(s.mean() == doctest::Approx(2.5));
    CHECK(s.variance() == doctest::Approx(5.0 / 3.0));
    CHECK(s.std_error() == doctest::Approx(std::sqrt(5.0 / 12.0)));
    CHECK(s.max() == 4.0);
    s.add(std::numeric_limits<double>::infinity());
    CHECK(s.non_finite() == 1);
    CHECK(s.count() == 4);
}

TEST_CASE("merge laws") {
    std::mt19937_64 gen(3);
    std::lognormal_distribution<double> dist(0.0, 2.0);
    std::vector<double> xs(4000);
    for (auto& x : xs) x = dist(gen);

    RunningStat whole;
    for (double x : xs) whole.add(x);

    std::vector<RunningStat> shards(4);
    for (std::size_t i = 0; i < xs.size(); ++i) shards[i / 1000].add(xs[i]);
    RunningStat left, right, merged;
    left.merge(shards[0]);
    left.merge(shards[1]);
    right.merge(shards[2]);
    right.merge(shards[3]);
    merged.merge(left);
    merged.merge(right);
    CHECK(merged.count() == whole.count());
    CHECK(merged.mean() == doctest::Approx(whole.mean()).epsilon(1e-12));
    CHECK(merged.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));
    CHECK(merged.max() == whole.max());

    // the other association and order
    RunningStat alt;
    alt.merge(shards[3]);
    alt.merge(shards[1]);
    alt.merge(shards[0]);
    alt.merge(shards[2]);
    CHECK(alt.mean() == doctest::Approx(whole.mean()).epsilon(1e-12));
    CHECK(alt.variance() == doctest::Approx(whole.variance()).epsilon(1e-12));

    RunningStat empty, copy = whole;
    copy.merge(empty);
    CHECK(copy.mean() == whole.mean());
    CHECK(copy.variance() == whole.variance());
    empty.merge(whole);
    CHECK(empty.mean() == whole.mean());
}

TEST_CASE("estimators reject empty aggregates") {
    EnsembleAggregate agg;
    CHECK_THROWS_AS(je_deviation(agg, 0.0, 1.0), EmptyAggregateError);
    CHECK_THROWS_AS(ift_lhs(agg), EmptyAggregateError);
    CHECK_THROWS_AS(lambda_estimate(agg), EmptyAggregateError);
    CHECK_THROWS_AS(mean_entropy_production(agg), EmptyAggregateError);
}

namespace {

PhysicalParams unit_params() {
    PhysicalParams p;
    p.omega0 = 1.2;
    p.Omega = 1.0;
    p.gamma = 5.0;
    p.g_m = 0.05;
    p.theta = 1.0;
    p.beta0 = {0.0, 20.0};
    return p;
}

ProtocolParams unit_protocol() {
    ProtocolParams proto;
    proto.t_final = std::numbers::pi / 2;
    proto.n_steps = 2000;
    proto.master_seed = 99;
    return proto;
}

}  // namespace

TEST_CASE("deterministic single path estimators") {
    auto p = unit_params();
    p.gamma = 0.0;
    p.theta = 1e-3;  // practically frozen: p_e = e^{-1200}
    const TrajectoryEngine eng(p, unit_protocol());
    EnsembleOptions opt;
    opt.n_traj = 10;
    const auto res = run_ensemble(eng, opt);
    const auto je = je_deviation(res.aggregate, eng.reference_free_energy(), p.theta);
    const auto rec = eng.run_trajectory(0);
    CHECK(je.std_error == 0.0);
    CHECK(je.value == doctest::Approx(std::expm1((rec.ledger.dE_m + eng.reference_free_energy()) / p.theta)));
    CHECK(lambda_estimate(res.aggregate).value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ift_lhs(res.aggregate).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ensemble is independent of workers and shard size") {
    const auto p = unit_params();
    auto proto = unit_protocol();
    proto.jitter_halfwidth = 0.5;
    proto.grid_cell_halfwidth = 0.5;
    const TrajectoryEngine eng(p, proto);
    auto run = [&](unsigned workers, std::uint64_t shard) {
        EnsembleOptions opt;
        opt.n_traj = 3000;
        opt.workers = workers;
        opt.shard_size = shard;
        opt.measure = true;
        std::vector<std::uint64_t> order;
        opt.on_record = [&](const TrajectoryRecord& r) { order.push_back(r.traj_index); };
        auto res = run_ensemble(eng, opt);
        for (std::size_t i = 0; i < order.size(); ++i) REQUIRE(order[i] == i);
        return res;
    };
    const auto a = run(1, 1000), b = run(4, 1000), c = run(3, 1000);
    CHECK(a.aggregate.W.mean() == b.aggregate.W.mean());
    CHECK(a.aggregate.W.variance() == b.aggregate.W.variance());
    CHECK(a.aggregate.je_kernel.mean() == c.aggregate.je_kernel.mean());
    CHECK(mutual_information(*a.measurement).mutual_information.value ==
          mutual_information(*b.measurement).mutual_information.value);

    const auto d = run(2, 700);
    CHECK(d.aggregate.W.mean() == doctest::Approx(a.aggregate.W.mean()).epsilon(1e-12));
    CHECK(d.aggregate.je_kernel.variance() == doctest::Approx(a.aggregate.je_kernel.variance()).epsilon(1e-10));
}

TEST_CASE("ensemble failure surfaces the trajectory") {
    PhysicalParams p;
    p.omega0 = 0.5;
    p.Omega = 1.0;
    p.gamma = 5.0;
    p.g_m = 2.0;
    p.theta = 1.0;
    p.beta0 = {0.0, 0.1};
    auto proto = unit_protocol();
    proto.n_steps = 4000;
    const TrajectoryEngine eng(p, proto);
    EnsembleOptions opt;
    opt.n_traj = 2000;
    opt.workers = 2;
    opt.shard_size = 100;
    CHECK_THROWS_WITH_AS(run_ensemble(eng, opt), doctest::Contains("trajectory"), std::logic_error);
    opt.n_traj = 0;
    const auto empty = run_ensemble(eng, opt);
    CHECK(empty.aggregate.count() == 0);
}

TEST_CASE("fluctuation theorem properties on a small machine") {
    const auto p = unit_params();
    const TrajectoryEngine eng(p, unit_protocol());
    EnsembleOptions opt;
    opt.n_traj = 20000;
    const auto agg = run_ensemble(eng, opt).aggregate;
    const auto ift = ift_lhs(agg);
    const auto lam = lambda_estimate(agg);
    CHECK(ift.value <= 1.0 + 3 * ift.std_error);
    CHECK(std::abs(ift.value + lam.value - 1.0) <= 3 * std::hypot(ift.std_error, lam.std_error) + 1e-12);
    CHECK(lam.value >= -3 * lam.std_error);
    CHECK(lam.value <= 1.0);
    const auto s = mean_entropy_production(agg);
    CHECK(s.value >= -3 * s.std_error);
    const auto sd = mean_entropy_production_direct(agg);
    CHECK(std::abs(s.value - sd.value) <= 3 * s.std_error);
    const auto je = je_deviation(agg, eng.reference_free_energy(), p.theta);
    CHECK(std::abs(je.value) <= 4 * je.std_error);
    const auto tail = je_heavy_tail(agg);
    CHECK_FALSE(tail.flagged);
}

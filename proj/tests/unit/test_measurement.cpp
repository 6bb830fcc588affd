#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "awm/ensemble.hpp"
#include "awm/measurement.hpp"

using namespace awm;

namespace {

double total(const std::vector<CellProbability>& d) {
    double s = 0;
    for (const auto& c : d) s += c.probability;
    return s;
}

double prob_of(const std::vector<CellProbability>& d, GridCell cell) {
    for (const auto& c : d)
        if (c.cell == cell) return c.probability;
    return 0.0;
}

}  // namespace

TEST_CASE("grid binning") {
    CHECK(measure({0.0, 0.0}, 2.0) == GridCell{0, 0});
    CHECK(measure({3.1, 0.2}, 2.0) == GridCell{1, 0});
    CHECK(measure({3.1, 0.2}, 2.0).center(2.0) == Complex{4.0, 0.0});
    // half-open cells: the upper edge belongs to the next cell
    CHECK(measure({2.0, -2.0}, 2.0) == GridCell{1, 0});
    CHECK(measure({-2.0000001, 0.0}, 2.0) == GridCell{-1, 0});
    CHECK(measure({6e7 + 1.9, -3e8}, 2.0) == GridCell{15000000, -75000000});
    CHECK_THROWS_AS(measure({}, 0.0), std::invalid_argument);
}

TEST_CASE("measured work") {
    PhysicalParams p;
    p.Omega = 3.0;
    const Complex b0{0.0, 5.0};
    CHECK(measured_work(b0, {5.0, 0.0}, p) == 0.0);
    CHECK(measured_work(b0, {3.0, 4.0}, p) == 0.0);
    CHECK(measured_work(b0, {4.0, 0.0}, p) == doctest::Approx(27.0));
    // large amplitudes: exact for grid-aligned centres
    const Complex big{0.0, 6e7};
    CHECK(measured_work(big, {6e7 - 4.0, 0.0}, p) == doctest::Approx(3.0 * (8.0 * 6e7 - 16.0)));
}

TEST_CASE("conditional cell distribution special cases") {
    const double quarter = -std::numbers::pi / 2;
    SUBCASE("no jitter") {
        const auto d = conditional_cell_distribution({3.1, 0.2}, 0.0, quarter, 2.0);
        REQUIRE(d.size() == 1);
        CHECK(d[0].cell == GridCell{1, 0});
        CHECK(d[0].probability == 1.0);
    }
    SUBCASE("aligned square on a cell") {
        const auto d = conditional_cell_distribution({4.0, -8.0}, 2.0, quarter, 2.0);
        REQUIRE(d.size() == 1);
        CHECK(d[0].probability == doctest::Approx(1.0));
    }
    SUBCASE("square centred on a corner") {
        const auto d = conditional_cell_distribution({2.0, 2.0}, 2.0, quarter, 2.0);
        REQUIRE(d.size() == 4);
        for (const auto& c : d) CHECK(c.probability == doctest::Approx(0.25));
    }
    SUBCASE("45 degree diamond inside a large cell") {
        const auto d = conditional_cell_distribution({0.0, 0.0}, 1.0, std::numbers::pi / 4, 2.0);
        REQUIRE(d.size() == 1);
        CHECK(d[0].probability == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("diamond straddling an edge splits in half") {
        const auto d = conditional_cell_distribution({2.0, 0.0}, 1.0, std::numbers::pi / 4, 2.0);
        CHECK(prob_of(d, {0, 0}) == doctest::Approx(0.5));
        CHECK(prob_of(d, {1, 0}) == doctest::Approx(0.5));
    }
}

TEST_CASE("conditional cell distribution matches sampling") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Complex center{1.3, -0.7};
    const double h = 2.0, delta = 1.5, angle = 0.37;
    const auto d = conditional_cell_distribution(center, h, angle, delta);
    CHECK(total(d) == doctest::Approx(1.0).epsilon(1e-12));
    std::map<GridCell, double> counts;
    const int n = 400000;
    const Complex rot = std::polar(1.0, angle);
    for (int i = 0; i < n; ++i) {
        const Complex z = center + rot * Complex{h * u(gen), h * u(gen)};
        counts[measure(z, delta)] += 1.0 / n;
    }
    for (const auto& [cell, f] : counts) {
        const double q = prob_of(d, cell);
        CHECK(std::abs(f - q) < 5 * std::sqrt(q * (1 - q) / n) + 1e-4);
    }
}

TEST_CASE("conditional cell distribution invariants") {
    const double delta = 2.0;
    for (double angle : {0.1, -0.9, 2.0, -std::numbers::pi / 2 + 1e-3}) {
        for (Complex c : {Complex{0.3, 0.1}, Complex{-5.5, 7.25}, Complex{6e7 + 0.3, 1e-3}}) {
            const auto d = conditional_cell_distribution(c, 2.0, angle, delta);
            CHECK(std::abs(total(d) - 1.0) < 1e-9);
            // shifting by one cell width shifts the indices
            const auto s = conditional_cell_distribution(c + Complex{2 * delta, -2 * delta}, 2.0, angle, delta);
            REQUIRE(s.size() == d.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                CHECK(s[i].cell.kx == d[i].cell.kx + 1);
                CHECK(s[i].cell.ky == d[i].cell.ky - 1);
                CHECK(s[i].probability == doctest::Approx(d[i].probability).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("mutual information limits") {
    PhysicalParams p;
    p.omega0 = 1.2;
    p.Omega = 1.0;
    p.gamma = 5.0;
    p.theta = 1.0;
    ProtocolParams proto;
    proto.t_final = std::numbers::pi / 2;
    proto.n_steps = 2000;
    proto.master_seed = 4;
    EnsembleOptions opt;
    opt.n_traj = 4000;
    opt.measure = true;

    SUBCASE("two classes without jumps") {
        auto q = p;
        q.gamma = 0.0;
        q.g_m = 0.5;
        q.beta0 = {0.0, 10.0};
        auto pr = proto;
        pr.jitter_halfwidth = 0.5;
        pr.grid_cell_halfwidth = 0.5;
        const TrajectoryEngine eng(q, pr);
        const auto info = mutual_information(*run_ensemble(eng, opt).measurement);
        CHECK(info.mutual_information.value <= info.shannon_entropy.value + 1e-12);
        CHECK(info.mutual_information.value >= 0.0);
    }
    SUBCASE("decoupled machine carries no information") {
        auto q = p;
        q.g_m = 0.0;
        q.beta0 = {0.0, 10.0};
        auto pr = proto;
        pr.jitter_halfwidth = 0.5;
        pr.grid_cell_halfwidth = 0.5;
        const TrajectoryEngine eng(q, pr);
        const auto info = mutual_information(*run_ensemble(eng, opt).measurement);
        CHECK(info.mutual_information.value == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(info.shannon_entropy.value > 1.0);
    }
    SUBCASE("fine resolution recovers most of the class entropy") {
        auto q = p;
        q.g_m = 30.0;
        q.beta0 = {0.0, 1000.0};
        auto pr = proto;
        pr.jitter_halfwidth = 0.01;
        pr.grid_cell_halfwidth = 0.01;
        const TrajectoryEngine eng(q, pr);
        const auto info = mutual_information(*run_ensemble(eng, opt).measurement);
        CHECK(info.mutual_information.value <= info.shannon_entropy.value);
        CHECK(info.mutual_information.value > 0.5 * info.shannon_entropy.value);
    }
    SUBCASE("coarse resolution loses it") {
        auto q = p;
        q.omega0 = 20.0;
        q.g_m = 0.05;
        q.beta0 = {0.0, 1000.0};
        auto pr = proto;
        pr.jitter_halfwidth = 50.0;
        pr.grid_cell_halfwidth = 50.0;
        const TrajectoryEngine eng(q, pr);
        const auto info = mutual_information(*run_ensemble(eng, opt).measurement);
        CHECK(info.mutual_information.value < 0.01);
    }
}

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "awm/sweep.hpp"

using namespace awm;
namespace fs = std::filesystem;

namespace {

SweepSpec small_spec() {
    SweepSpec s;
    s.name = "unit";
    s.axis = SweepAxis::beta0_modulus;
    s.values = {20.0, 40.0};
    s.modes = {Mode::trajectory_frequency, Mode::markovian};
    s.base.omega0 = 1.2;
    s.base.Omega = 1.0;
    s.base.gamma = 2.0;
    s.base.g_m = 0.05;
    s.base.theta = 1.0;
    s.base.beta0 = {0.0, 20.0};
    s.protocol.n_traj = 3000;
    s.protocol.master_seed = 17;
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("awm_unit_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("expansion and per-point seeds") {
    const auto pts = expand(small_spec());
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].protocol.mode == Mode::trajectory_frequency);
    CHECK(pts[1].protocol.mode == Mode::markovian);
    CHECK(pts[0].protocol.master_seed == pts[1].protocol.master_seed);
    CHECK(pts[0].protocol.master_seed != pts[2].protocol.master_seed);
    CHECK(std::abs(pts[2].physics.beta0) == doctest::Approx(40.0));
    CHECK(pts[2].protocol.t_final == doctest::Approx(std::numbers::pi / 2));
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pts[i].index == i);

    auto s = small_spec();
    s.values.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    CHECK_THROWS_AS(parse_axis("sideways"), std::invalid_argument);
}

TEST_CASE("summary is independent of the worker count") {
    const auto spec = small_spec();
    std::string first;
    for (unsigned w : {1u, 3u}) {
        const auto dir = scratch("workers" + std::to_string(w));
        RunOptions o;
        o.workers = w;
        o.out_dir = dir.string();
        o.quiet = true;
        const auto res = run_sweep(spec, o);
        REQUIRE(res.complete);
        const auto text = slurp(dir / "summary.csv");
        if (first.empty())
            first = text;
        else
            CHECK(text == first);
        fs::remove_all(dir);
    }
    std::istringstream is(first);
    std::string header;
    std::getline(is, header);
    CHECK(header == summary_csv_header());
    CHECK(header.rfind("point_index,axis,axis_value,mode,", 0) == 0);
}

TEST_CASE("manifest round trip") {
    auto spec = small_spec();
    spec.measure = true;
    spec.protocol.jitter_halfwidth = 0.5;
    spec.protocol.grid_cell_halfwidth = 0.25;
    const auto back = spec_from_json(nlohmann::json::parse(spec_to_json(spec).dump()));
    const auto a = expand(spec);
    const auto b = expand(back);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].physics.beta0 == b[i].physics.beta0);
        CHECK(a[i].physics.g_m == b[i].physics.g_m);
        CHECK(a[i].protocol.n_steps == b[i].protocol.n_steps);
        CHECK(a[i].protocol.master_seed == b[i].protocol.master_seed);
        CHECK(a[i].protocol.mode == b[i].protocol.mode);
        CHECK(a[i].protocol.jitter_halfwidth == b[i].protocol.jitter_halfwidth);
    }
    CHECK(back.measure);
    CHECK(back.name == spec.name);
}

TEST_CASE("a failing point stops the sweep and is recorded") {
    auto spec = small_spec();
    spec.axis = SweepAxis::temperature;
    spec.values = {1.0, 10.0};  // the hot point violates the fixed step bound
    spec.modes = {Mode::markovian};
    spec.auto_n_steps = false;
    spec.protocol.n_steps = 1000;
    spec.base.gamma = 5.0;
    const auto dir = scratch("failure");
    RunOptions o;
    o.out_dir = dir.string();
    o.quiet = true;
    const auto res = run_sweep(spec, o);
    CHECK_FALSE(res.complete);
    CHECK(res.rows.size() == 1);
    CHECK(res.error.find("point 1") == 0);
    const auto man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(man["points_completed"] == 1);
    CHECK(man["complete"] == false);
    CHECK(man.contains("error"));
    fs::remove_all(dir);
}

TEST_CASE("presets") {
    for (const char* name : {"fig2", "fig2b", "fig3", "fig4"}) {
        const auto s = make_preset(name, false);
        CHECK_NOTHROW(s.validate());
        CHECK(s.protocol.n_traj == 100000);
        CHECK(make_preset(name, true).protocol.n_traj == 5000000);
    }
    CHECK(make_preset("fig3", false).measure);
    CHECK_THROWS_AS(make_preset("fig9", false), std::invalid_argument);
}

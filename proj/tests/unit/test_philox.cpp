#include "doctest.h"

#include <cmath>
#include <set>

#include "awm/philox.hpp"

using awm::Philox4x32;
using awm::TrajectoryRng;

TEST_CASE("philox known-answer vectors") {
    {
        const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
        CHECK(out == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    }
    {
        const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                           {0xffffffffu, 0xffffffffu});
        CHECK(out == Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    }
    {
        const auto out = Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                           {0xa4093822u, 0x299f31d0u});
        CHECK(out == Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
    }
}

TEST_CASE("trajectory streams are reproducible and distinct") {
    TrajectoryRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<double> seen;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        seen.insert(x);
        const double y = c.uniform();
        const double z = d.uniform();
        CHECK(x != y);
        CHECK(x != z);
    }
    CHECK(seen.size() == 1000);
    CHECK(a.blocks_consumed() == 500);
}

TEST_CASE("uniform moments") {
    TrajectoryRng r(1, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = r.uniform();
        s += x;
        s2 += x * x;
    }
    const double mean = s / n;
    CHECK(std::abs(mean - 0.5) < 5 * std::sqrt(1.0 / 12.0 / n));
    CHECK(s2 / n - mean * mean == doctest::Approx(1.0 / 12.0).epsilon(0.01));
}

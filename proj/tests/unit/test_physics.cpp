#include "doctest.h"

#include <cmath>
#include <numbers>

#include "awm/physics.hpp"

using namespace awm;

namespace {

PhysicalParams unit_params() {
    PhysicalParams p;
    p.omega0 = 1.2;
    p.Omega = 1.0;
    p.gamma = 5.0;
    p.g_m = 0.5;
    p.theta = 1.0;
    p.beta0 = {0.0, 2.0};
    return p;
}

}  // namespace

TEST_CASE("mean occupation matches Bose-Einstein values") {
    // 1/(e^1.2 - 1)
    CHECK(mean_occupation(1.2, 1.0) == doctest::Approx(0.43101276069333316).epsilon(1e-14));
    CHECK(mean_occupation(2.4, 2.0) == doctest::Approx(0.43101276069333316).epsilon(1e-14));
    CHECK(mean_occupation(3.0, 0.0) == 0.0);
    // high temperature: theta/omega - 1/2
    CHECK(mean_occupation(1e-4, 1.0) == doctest::Approx(1e4 - 0.5).epsilon(1e-8));
    CHECK_THROWS_AS(mean_occupation(0.0, 1.0), DomainError);
}

TEST_CASE("thermal distribution") {
    const auto d = thermal_distribution_at(1.2, 1.0);
    CHECK(d.p_e == doctest::Approx(0.23147521650098238).epsilon(1e-14));
    CHECK(d.Z == doctest::Approx(1.3011942119122022).epsilon(1e-14));
    CHECK(d.p_e + d.p_g == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.p_e / d.p_g == doctest::Approx(std::exp(-1.2)).epsilon(1e-14));
    CHECK(std::exp(d.log_p_e) == doctest::Approx(d.p_e).epsilon(1e-14));

    SUBCASE("deep freeze keeps finite logs") {
        const auto cold = thermal_distribution_at(800.0, 1.0);
        CHECK(cold.p_e == 0.0);
        CHECK(cold.log_p_e == doctest::Approx(-800.0));
        CHECK(cold.log_p_g == 0.0);
    }
    SUBCASE("zero temperature") {
        const auto z = thermal_distribution_at(1.0, 0.0);
        CHECK(z.p_g == 1.0);
        CHECK(std::isinf(z.log_p_e));
    }
}

TEST_CASE("effective frequency and domain") {
    auto p = unit_params();
    CHECK(effective_frequency({2.0, 5.0}, p) == doctest::Approx(3.2));
    CHECK_THROWS_AS(effective_frequency({-1.2, 0.0}, p), DomainError);
    CHECK_THROWS_AS(effective_frequency({-5.0, 0.0}, p), DomainError);
}

TEST_CASE("coherent propagation") {
    const auto p = unit_params();
    const double c = p.displacement();
    const Complex b{0.3, 2.0};
    const double dt = 0.137;

    CHECK(std::abs(propagate_coherent(b, QubitLevel::g, dt, p)) == doctest::Approx(std::abs(b)));
    const Complex be = propagate_coherent(b, QubitLevel::e, dt, p);
    CHECK(std::abs(be + c) == doctest::Approx(std::abs(b + c)));

    // two half steps equal one step
    for (auto lvl : {QubitLevel::g, QubitLevel::e}) {
        const Complex a = propagate_coherent(propagate_coherent(b, lvl, dt / 2, p), lvl, dt / 2, p);
        const Complex d = propagate_coherent(b, lvl, dt, p);
        CHECK(std::abs(a - d) < 1e-14);
    }

    // quarter period from i|b|: ground lands on the real axis, excited lands
    // at |b| - c - ic
    const double quarter = std::numbers::pi / 2.0;
    const Complex g_end = propagate_coherent(p.beta0, QubitLevel::g, quarter, p);
    CHECK(g_end.real() == doctest::Approx(2.0));
    CHECK(std::abs(g_end.imag()) < 1e-15);
    const Complex e_end = propagate_coherent(p.beta0, QubitLevel::e, quarter, p);
    CHECK(e_end.real() == doctest::Approx(2.0 - c));
    CHECK(e_end.imag() == doctest::Approx(-c));

    // half period from rest in the excited state reaches the far side of the
    // displaced centre; a full period returns
    const double half = std::numbers::pi / p.Omega;
    const Complex far = propagate_coherent({}, QubitLevel::e, half, p);
    CHECK(far.real() == doctest::Approx(-2.0 * c));
    CHECK(std::abs(far.imag()) < 1e-14);
    CHECK(std::abs(propagate_coherent(b, QubitLevel::e, 2 * half, p) - b) < 1e-13);

    // the qubit-plus-mechanics energy is conserved along an excited-state arc
    const MachineState s0{QubitLevel::e, b};
    const MachineState s1{QubitLevel::e, be};
    CHECK(qubit_energy(s1, p) + mechanical_energy(be, p) ==
          doctest::Approx(qubit_energy(s0, p) + mechanical_energy(b, p)));
}

TEST_CASE("jump probabilities") {
    const auto p = unit_params();
    const double dt = 1e-3;
    const double nb = mean_occupation(1.2, 1.0);
    const auto je = jump_probabilities({QubitLevel::e, {}}, 1.2, dt, p);
    CHECK(je.p_minus == doctest::Approx(5.0 * dt * (nb + 1)));
    CHECK(je.p_plus == 0.0);
    CHECK(je.p_stay == doctest::Approx(1.0 - je.p_minus));
    const auto jg = jump_probabilities({QubitLevel::g, {}}, 1.2, dt, p);
    CHECK(jg.p_plus == doctest::Approx(5.0 * dt * nb));
    CHECK(jg.p_minus == 0.0);
    // detailed balance of the rates
    CHECK(je.p_minus / jg.p_plus == doctest::Approx(std::exp(1.2)));

    CHECK_THROWS_AS(jump_probabilities({QubitLevel::g, {}}, 1.2, 0.01, p), PreconditionError);
}

TEST_CASE("parameter validation") {
    auto p = unit_params();
    CHECK_NOTHROW(p.validate());
    p.gamma = 0.0;
    p.g_m = 0.0;
    p.theta = 0.0;
    CHECK_NOTHROW(p.validate());
    auto bad = unit_params();
    bad.Omega = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = unit_params();
    bad.beta0 = {};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = unit_params();
    bad.theta = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = unit_params();
    bad.gamma = std::nan("");
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("semiclassical ratio") {
    auto p = unit_params();
    p.g_m = 10.0;
    p.beta0 = {0.0, 5000.0};
    CHECK(p.semiclassical_ratio() == doctest::Approx(2e-3));
    CHECK(p.ultra_strong());
}

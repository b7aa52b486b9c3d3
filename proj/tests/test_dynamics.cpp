#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "phasegerbe/dynamics.hpp"

using namespace pg;
using Catch::Approx;

namespace {
const HamiltonianSpec kFree(1.0, {});
const HamiltonianSpec kHO(1.0, {0.0, 0.0, 0.5});
const HamiltonianSpec kQuartic(1.0, {0.0, 0.0, 0.0, 0.0, 1.0});
constexpr double kPi = 3.14159265358979323846;
} // namespace

TEST_CASE("hamiltonian spec validation and evaluation", "[dynamics]") {
    REQUIRE_THROWS_AS(HamiltonianSpec(0.0, {0.0}), precondition_error);
    REQUIRE_THROWS_AS(HamiltonianSpec(1.0, {0, 0, 0, 0, 0, 1}), precondition_error);
    REQUIRE(kHO.V(2.0) == Approx(2.0));
    REQUIRE(kHO.dV(2.0) == Approx(2.0));
    REQUIRE(kHO.energy(1.0, 1.0) == Approx(1.0));
    REQUIRE(kHO.confining());
    REQUIRE_FALSE(kFree.confining());
    REQUIRE_FALSE(HamiltonianSpec(1.0, {0, 0, -1}).confining());
}

TEST_CASE("free particle flow is exact", "[dynamics]") {
    const Trajectory t = hamilton_flow(kFree, {0.0, 1.0}, 2.0, 1e-3);
    REQUIRE(t.points.back().q == Approx(2.0).epsilon(1e-13));
    REQUIRE(t.points.back().p == 1.0);
    REQUIRE(t.max_energy_drift == 0.0);
}

TEST_CASE("zero-duration flow yields two identical points", "[dynamics]") {
    const Trajectory t = hamilton_flow(kHO, {1.0, 0.5}, 0.0, 1e-3);
    REQUIRE(t.points.size() == 2);
    REQUIRE(t.points[0].q == t.points[1].q);
    REQUIRE(t.points[0].p == t.points[1].p);
}

TEST_CASE("flow guards", "[dynamics]") {
    REQUIRE_THROWS_AS(hamilton_flow(kHO, {1, 0}, 1.0, 0.0), precondition_error);
    FlowOptions tight;
    tight.max_steps = 10;
    REQUIRE_THROWS_AS(hamilton_flow(kHO, {1, 0}, 1.0, 1e-3, tight), precondition_error);
    // a too-coarse step violates the energy-drift contract
    FlowOptions strict;
    strict.drift_tolerance = 1e-12;
    REQUIRE_THROWS_AS(hamilton_flow(kHO, {1, 0}, 1.0, 0.1, strict), numeric_error);
}

TEST_CASE("harmonic oscillator returns after one period", "[dynamics]") {
    const Trajectory t = hamilton_flow(kHO, {1.0, 0.0}, 2.0 * kPi, 1e-3);
    REQUIRE(t.points.back().q == Approx(1.0).margin(1e-4));
    REQUIRE(t.points.back().p == Approx(0.0).margin(1e-4));
}

TEST_CASE("leapfrog is time-reversible", "[dynamics]") {
    const Trajectory fwd = hamilton_flow(kQuartic, {0.3, 0.8}, 3.0, 1e-3);
    const Point2 end = fwd.points.back();
    const Trajectory bwd = hamilton_flow(kQuartic, {end.q, -end.p}, 3.0, 1e-3);
    REQUIRE(bwd.points.back().q == Approx(0.3).margin(1e-10));
    REQUIRE(-bwd.points.back().p == Approx(0.8).margin(1e-10));
}

TEST_CASE("energy drift stays bounded over a million steps", "[dynamics]") {
    const Trajectory t = hamilton_flow(kHO, {1.0, 0.0}, 1000.0, 1e-3);
    REQUIRE(t.points.size() >= 1000000);
    REQUIRE(t.max_energy_drift < 1e-6);
}

TEST_CASE("shoot_leg on the free particle", "[dynamics]") {
    const Trajectory t = shoot_leg(kFree, 0.0, 1.0, 0.5, 10.0);
    REQUIRE(t.points.back().q == Approx(1.0).margin(1e-8));
    REQUIRE(t.points.back().p == Approx(1.0).epsilon(1e-12));
    REQUIRE(t.times.back() == Approx(1.0).margin(1e-7));
}

TEST_CASE("shoot_leg rejects classically forbidden targets", "[dynamics]") {
    // E = 0.125: turning points at  +-0.5, so q_b = 1 is out of reach
    REQUIRE_THROWS_AS(shoot_leg(kHO, 0.0, 1.0, 0.125, 50.0), numeric_error);
}

TEST_CASE("shoot_leg on the oscillator conserves energy", "[dynamics]") {
    const Trajectory t = shoot_leg(kHO, 0.0, 1.0, 1.0, 10.0);
    REQUIRE(t.points.back().q == Approx(1.0).margin(1e-8));
    REQUIRE(t.max_energy_drift < 1e-9);
    // analytic arrival time: q(t) = sqrt(2E) sin t -> t = asin(1/sqrt(2))
    REQUIRE(t.times.back() == Approx(std::asin(1.0 / std::sqrt(2.0))).margin(1e-6));
}

TEST_CASE("action of the unit-velocity free leg is 1/2", "[dynamics]") {
    const Trajectory t = shoot_leg(kFree, 0.0, 1.0, 0.5, 10.0);
    // int p dq = 1, E*T = 0.5: S = 1/2, which is also int L dt for L = 1/2
    REQUIRE(action_along(kFree, t) == Approx(0.5).margin(1e-8));
}

TEST_CASE("action of a resting trajectory is -V_min * T", "[dynamics]") {
    // V = (q-1)^2/2 + 2 has its minimum 2 at q = 1: coefficients 2.5, -1, 0.5
    const HamiltonianSpec shifted(1.0, {2.5, -1.0, 0.5});
    const Trajectory rest = hamilton_flow(shifted, {1.0, 0.0}, 3.0, 1e-3);
    REQUIRE(action_along(shifted, rest) == Approx(-2.0 * 3.0).margin(1e-10));
}

TEST_CASE("oscillator action matches the closed form", "[dynamics]") {
    // q = cos t from (1,0): S(t1) = -sin(2 t1)/4
    const Trajectory quarter = hamilton_flow(kHO, {1.0, 0.0}, kPi / 2.0, 1e-4);
    REQUIRE(action_along(kHO, quarter) == Approx(0.0).margin(1e-5));
    const Trajectory eighth = hamilton_flow(kHO, {1.0, 0.0}, kPi / 8.0, 1e-4);
    REQUIRE(action_along(kHO, eighth) ==
            Approx(-std::sin(kPi / 4.0) / 4.0).margin(1e-5));
}

TEST_CASE("action is additive over concatenated segments", "[dynamics]") {
    const Trajectory ab = hamilton_flow(kQuartic, {0.2, 1.1}, 0.7, 1e-4);
    const Point2 mid = ab.points.back();
    const Trajectory bc = hamilton_flow(kQuartic, {mid.q, mid.p}, 0.5, 1e-4);
    const Trajectory ac = hamilton_flow(kQuartic, {0.2, 1.1}, 1.2, 1e-4);
    REQUIRE(action_along(kQuartic, ab) + action_along(kQuartic, bc) ==
            Approx(action_along(kQuartic, ac)).margin(1e-8));
}

TEST_CASE("closed orbit area of the oscillator", "[dynamics]") {
    // analytic: oint p dq = 2 pi E / omega
    REQUIRE(closed_orbit_area(kHO, 1.0) == Approx(2.0 * kPi).margin(1e-8));
    REQUIRE(closed_orbit_area(kHO, 2.5) == Approx(5.0 * kPi).margin(1e-8));
    REQUIRE(closed_orbit_area(kHO, 0.0) == 0.0); // E = V_min exactly
}

TEST_CASE("quartic orbit area against a brute-force oracle", "[dynamics]") {
    // oracle: composite Simpson with 10^6 panels directly in q
    const double E = 1.0;
    const double qt = std::pow(E, 0.25);
    const int n = 1000000;
    double oracle = 0.0;
    auto f = [&](double q) { return std::sqrt(std::max(2.0 * (E - q * q * q * q), 0.0)); };
    const double h = 2.0 * qt / n;
    for (int i = 0; i < n; ++i) {
        const double a = -qt + i * h;
        oracle += h / 6.0 * (f(a) + 4.0 * f(a + 0.5 * h) + f(a + h));
    }
    oracle *= 2.0;
    REQUIRE(closed_orbit_area(kQuartic, E) == Approx(oracle).margin(1e-6));
}

TEST_CASE("orbit area grows with energy and rejects unbounded motion", "[dynamics]") {
    double prev = 0.0;
    for (double E : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double a = closed_orbit_area(kQuartic, E);
        REQUIRE(a > prev);
        prev = a;
    }
    REQUIRE_THROWS_AS(closed_orbit_area(kFree, 1.0), numeric_error);
}

TEST_CASE("turning points bracket the well", "[dynamics]") {
    const auto [l, r] = turning_points(kHO, 2.0);
    REQUIRE(l == Approx(-2.0).margin(1e-9));
    REQUIRE(r == Approx(2.0).margin(1e-9));
}

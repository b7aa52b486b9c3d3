#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "phasegerbe/gauge.hpp"

using namespace pg;
using Catch::Approx;

namespace {

const PhaseSpaceDomain kDom(-4.0, 4.0, -4.0, 4.0);

Grid2D small_grid() { return Grid2D(kDom, 33, 33); }

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// seeded sparse polynomial with dyadic coefficients
BivariatePolynomial random_poly(std::uint64_t seed, bool force_separable) {
    BivariatePolynomial f;
    std::uint64_t s = seed;
    const int terms = 2 + static_cast<int>(mix(s) % 5);
    for (int t = 0; t < terms; ++t) {
        int j = static_cast<int>(mix(s += 1) % 4);
        int k = static_cast<int>(mix(s += 1) % 4);
        if (force_separable && j > 0 && k > 0) (mix(s += 1) % 2 ? j : k) = 0;
        const double c = (static_cast<int>(mix(s += 1) % 17) - 8) / 8.0;
        f.set_coeff(j, k, c);
    }
    return f.trimmed();
}

// independent separability oracle: attempt the integration of Eq-style
// system dF/dq = p + df/dq, dF/dp = q - df/dp and check the consistency of
// the two cross-derivatives symbolically.
bool separable_by_integration(const BivariatePolynomial& f) {
    const GaugeParameter1 phi = phi_for_equivalence(f);
    const BivariatePolynomial lhs = phi.phi_q.derivative_p(); // d/dp (p + df/dq)
    const BivariatePolynomial rhs = phi.phi_p.derivative_q(); // d/dq (q - df/dp)
    return (lhs - rhs).is_zero();
}

} // namespace

TEST_CASE("delta0 shifts A by -(i/hbar) df and fixes B, H", "[gauge]") {
    const Grid2D g = small_grid();
    const HamiltonianSpec H(1.0, {0.0, 0.0, 0.5});
    const OneForm a = gerbe_connection_A(g, H);

    SECTION("f = 0 is the identity") {
        const Delta0Result r = delta0(a, GaugeParameter0{parse_polynomial("0")}, 1.0);
        for (int i = 0; i < g.nq(); ++i)
            for (int j = 0; j < g.np(); ++j) {
                REQUIRE(r.a.comp_q(i, j) == a.comp_q(i, j));
                REQUIRE(r.a.comp_p(i, j) == a.comp_p(i, j));
            }
        REQUIRE(l2_norm(r.b_change.coeff) == 0.0);
        REQUIRE(r.h_change.identically_zero);
    }

    SECTION("f = pq adds -i(p dq + q dp)") {
        const Delta0Result r = delta0(a, GaugeParameter0{parse_polynomial("q*p")}, 1.0);
        for (int i = 0; i < g.nq(); i += 5)
            for (int j = 0; j < g.np(); j += 5) {
                const Complex dq_shift = r.a.comp_q(i, j) - a.comp_q(i, j);
                const Complex dp_shift = r.a.comp_p(i, j) - a.comp_p(i, j);
                REQUIRE(std::abs(dq_shift - Complex(0.0, -g.p(j))) < 1e-15);
                REQUIRE(std::abs(dp_shift - Complex(0.0, -g.q(i))) < 1e-15);
            }
    }

    SECTION("the df contribution is closed (d o d = 0 in FD)") {
        const OneForm zero{ScalarField2D(g), ScalarField2D(g)};
        const Delta0Result r =
            delta0(zero, GaugeParameter0{parse_polynomial("q*p + 0.5*q^2")}, 1.0);
        const TwoForm db = exterior_derivative(r.a);
        REQUIRE(db.coeff.max_abs() < 1e-12);
    }
}

TEST_CASE("delta1 moves both A and B", "[gauge]") {
    const Grid2D g = small_grid();
    const HamiltonianSpec H(1.0, {0.0, 0.0, 0.5});
    const OneForm a = gerbe_connection_A(g, H);
    const TwoForm b(ScalarField2D(g, Complex(0.25, 0.0)));

    SECTION("phi = df agrees with delta0 on A and leaves B alone") {
        const BivariatePolynomial f = parse_polynomial("0.5*q^2 - q*p");
        const GaugeParameter1 phi{f.derivative_q(), f.derivative_p()};
        const Delta1Result r1 = delta1(a, b, phi, 1.0);
        const Delta0Result r0 = delta0(a, GaugeParameter0{f}, 1.0);
        for (int i = 0; i < g.nq(); i += 4)
            for (int j = 0; j < g.np(); j += 4) {
                REQUIRE(std::abs(r1.a.comp_q(i, j) - r0.a.comp_q(i, j)) < 1e-15);
                REQUIRE(std::abs(r1.a.comp_p(i, j) - r0.a.comp_p(i, j)) < 1e-15);
                REQUIRE(std::abs(r1.b.coeff(i, j) - b.coeff(i, j)) < 1e-15);
            }
    }

    SECTION("phi = p dq shifts the B coefficient by +i/hbar") {
        const GaugeParameter1 phi{parse_polynomial("p"), parse_polynomial("0")};
        const Delta1Result r = delta1(a, b, phi, 1.0);
        for (int i = 0; i < g.nq(); i += 4)
            for (int j = 0; j < g.np(); j += 4)
                REQUIRE(std::abs(r.b.coeff(i, j) - b.coeff(i, j) - Complex(0.0, 1.0)) < 1e-15);
        REQUIRE(r.h_change.identically_zero);
    }
}

TEST_CASE("phi_for_equivalence closed forms", "[gauge]") {
    SECTION("f = qp/2 gives phi = (3p/2) dq + (q/2) dp") {
        const GaugeParameter1 phi = phi_for_equivalence(parse_polynomial("0.5*q*p"));
        REQUIRE(phi.phi_q == parse_polynomial("1.5*p"));
        REQUIRE(phi.phi_p == parse_polynomial("0.5*q"));
    }
    SECTION("f = 0 gives phi = p dq + q dp") {
        const GaugeParameter1 phi = phi_for_equivalence(parse_polynomial("0"));
        REQUIRE(phi.phi_q == parse_polynomial("p"));
        REQUIRE(phi.phi_p == parse_polynomial("q"));
    }
}

TEST_CASE("delta1 equivalence certificate is coefficient-exact", "[gauge]") {
    for (const char* text : {"0", "0.5*q*p", "q*p", "0.5*q^2", "0.5*q*p + 0.1*q^3",
                             "q^3 + p^2", "0.125*q^2*p^2 - p"}) {
        const EquivalenceCertificate cert = verify_delta1_equivalence(parse_polynomial(text));
        REQUIRE(cert.exact);
        REQUIRE(cert.defect_q.is_zero());
        REQUIRE(cert.defect_p.is_zero());
    }
}

TEST_CASE("grid-level check: A + delta1 A lands on the Eq-25 form", "[gauge]") {
    const Grid2D g = small_grid();
    const HamiltonianSpec H(1.0, {0.0, 0.0, 0.5});
    const OneForm a = gerbe_connection_A(g, H);
    const TwoForm b{ScalarField2D(g)};
    const BivariatePolynomial f = parse_polynomial("0.5*q*p + 0.25*q^2");

    const Delta1Result moved = delta1(a, b, phi_for_equivalence(f), 1.0);
    const OneForm target = connection_prime_as_form(connection_from_generating(f), g);
    double worst = 0.0;
    for (int i = 0; i < g.nq(); ++i)
        for (int j = 0; j < g.np(); ++j) {
            worst = std::max(worst, std::abs(moved.a.comp_q(i, j) - target.comp_q(i, j)));
            worst = std::max(worst, std::abs(moved.a.comp_p(i, j) - target.comp_p(i, j)));
        }
    REQUIRE(worst < 1e-14); // sampling rounds differently on the two routes
}

TEST_CASE("delta0 solvability classifier", "[gauge]") {
    SECTION("f = qp/2 is obstructed") {
        const Separability s = delta0_solvable(parse_polynomial("0.5*q*p"));
        REQUIRE_FALSE(s.solvable);
    }
    SECTION("f = q^3 + p^2 separates") {
        const Separability s = delta0_solvable(parse_polynomial("q^3 + p^2"));
        REQUIRE(s.solvable);
        REQUIRE(s.g_of_q == parse_polynomial("q^3"));
        REQUIRE(s.h_of_p == parse_polynomial("p^2"));
    }
    SECTION("f = 0 separates trivially") {
        const Separability s = delta0_solvable(parse_polynomial("0"));
        REQUIRE(s.solvable);
        REQUIRE(s.g_of_q.is_zero());
        REQUIRE(s.h_of_p.is_zero());
    }
}

TEST_CASE("classifier agrees with the integration oracle on 50 polynomials", "[gauge]") {
    int separable_seen = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const BivariatePolynomial f = random_poly(seed, seed % 2 == 0);
        const Separability s = delta0_solvable(f);
        REQUIRE(s.solvable == separable_by_integration(f));
        if (s.solvable) {
            ++separable_seen;
            REQUIRE((s.g_of_q + s.h_of_p - f).is_zero());
            REQUIRE(s.g_of_q.derivative_p().is_zero());
            REQUIRE(s.h_of_p.derivative_q().is_zero());
        }
    }
    REQUIRE(separable_seen >= 10); // the corpus exercises both branches
}

TEST_CASE("the obstruction is exactly the mixed second derivative", "[gauge]") {
    // cross-differentiating the integration system gives
    // 1 + d_p d_q f  vs  1 - d_q d_p f: equality forces d_q d_p f = 0
    for (const char* text : {"0.5*q*p", "q^3 + p^2", "0.25*q^2*p", "q + p"}) {
        const BivariatePolynomial f = parse_polynomial(text);
        const GaugeParameter1 phi = phi_for_equivalence(f);
        const BivariatePolynomial gap =
            phi.phi_q.derivative_p() - phi.phi_p.derivative_q();
        const BivariatePolynomial mixed = f.derivative_q().derivative_p();
        REQUIRE((gap - 2.0 * mixed).is_zero());
        REQUIRE(delta0_solvable(f).solvable == mixed.is_zero());
    }
}

TEST_CASE("rigid phase", "[gauge]") {
    std::vector<double> q(65);
    for (int i = 0; i <= 64; ++i) q[i] = -4.0 + 0.125 * i;
    const Wavefunction1D psi = analytic_ho_state(0, q);

    SECTION("C = 0 is the identity") {
        const Wavefunction1D r = rigid_phase(psi, 0.0, 1.0);
        for (std::size_t i = 0; i < q.size(); ++i) REQUIRE(r.values[i] == psi.values[i]);
    }
    SECTION("C = pi hbar flips the sign") {
        const Wavefunction1D r = rigid_phase(psi, 3.14159265358979323846, 1.0);
        for (std::size_t i = 0; i < q.size(); i += 8)
            REQUIRE(std::abs(r.values[i] + psi.values[i]) < 1e-15);
    }
    SECTION("|psi| and the norm are invariant") {
        const Wavefunction1D r = rigid_phase(psi, 1.7, 0.5);
        REQUIRE(r.norm() == Approx(psi.norm()));
        for (std::size_t i = 0; i < q.size(); i += 8)
            REQUIRE(std::abs(r.values[i]) == Approx(std::abs(psi.values[i])));
    }
    SECTION("rigid phase commutes with the lift") {
        const Grid2D g = small_grid();
        const Wavefunction1D on_axis = analytic_ho_state(0, g.q_nodes());
        const BivariatePolynomial f = parse_polynomial("0.5*q*p");
        const ProbabilityDistribution2D a = lift(rigid_phase(on_axis, 0.8, 1.0), f, g);
        ProbabilityDistribution2D b = lift(on_axis, f, g);
        const Complex phase = std::exp(Complex(0.0, 0.8));
        double worst = 0.0;
        for (int i = 0; i < g.nq(); ++i)
            for (int j = 0; j < g.np(); ++j)
                worst = std::max(worst, std::abs(a.values(i, j) - phase * b.values(i, j)));
        REQUIRE(worst < 1e-15);
    }
}

TEST_CASE("delta0 composes additively in its parameter", "[gauge]") {
    const Grid2D g = small_grid();
    const HamiltonianSpec H(1.0, {0.0, 0.0, 0.5});
    const OneForm a = gerbe_connection_A(g, H);
    // dyadic coefficients: j*c and sums stay exact in binary floating point
    const BivariatePolynomial f1 = parse_polynomial("0.5*q*p + 0.25*q^2");
    const BivariatePolynomial f2 = parse_polynomial("0.125*p^3 - 0.5*q");

    // coefficient algebra first: d(f1+f2) = df1 + df2 exactly
    REQUIRE(((f1 + f2).derivative_q() - f1.derivative_q() - f2.derivative_q()).is_zero());
    REQUIRE(((f1 + f2).derivative_p() - f1.derivative_p() - f2.derivative_p()).is_zero());

    const Delta0Result two_steps =
        delta0(delta0(a, GaugeParameter0{f1}, 1.0).a, GaugeParameter0{f2}, 1.0);
    const Delta0Result one_step = delta0(a, GaugeParameter0{f1 + f2}, 1.0);
    for (int i = 0; i < g.nq(); ++i)
        for (int j = 0; j < g.np(); ++j) {
            // sampling sums in a different order on the two routes
            REQUIRE(std::abs(two_steps.a.comp_q(i, j) - one_step.a.comp_q(i, j)) < 1e-14);
            REQUIRE(std::abs(two_steps.a.comp_p(i, j) - one_step.a.comp_p(i, j)) < 1e-14);
        }
}

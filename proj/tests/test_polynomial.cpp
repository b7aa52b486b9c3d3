#include <catch2/catch_amalgamated.hpp>

#include "phasegerbe/polynomial.hpp"

using namespace pg;
using Catch::Approx;

TEST_CASE("evaluation and exact derivatives", "[polynomial]") {
    // f = 0.5 q p + 0.1 q^3
    BivariatePolynomial f = BivariatePolynomial::monomial(1, 1, 0.5) +
                            BivariatePolynomial::monomial(3, 0, 0.1);
    REQUIRE(f(2.0, 3.0) == Approx(0.5 * 6.0 + 0.1 * 8.0));

    const BivariatePolynomial fq = f.derivative_q(); // 0.5 p + 0.3 q^2
    REQUIRE(fq.coeff(0, 1) == 0.5);
    REQUIRE(fq.coeff(2, 0) == Approx(0.3));
    const BivariatePolynomial fp = f.derivative_p(); // 0.5 q
    REQUIRE(fp.coeff(1, 0) == 0.5);
    REQUIRE(fp.degree_p() == 0);

    // mixed partials commute exactly, coefficient by coefficient
    REQUIRE((fq.derivative_p() - fp.derivative_q()).is_zero());
}

TEST_CASE("zero handling and trimming", "[polynomial]") {
    REQUIRE(BivariatePolynomial::zero().is_zero());
    BivariatePolynomial f = BivariatePolynomial::monomial(2, 2, 1.0);
    REQUIRE((f - f).is_zero());
    REQUIRE((f - f).trimmed().degree_q() == 0);
    REQUIRE_FALSE(f.is_zero());
    REQUIRE(f.derivative_q().derivative_q().derivative_q().is_zero());
}

TEST_CASE("arithmetic", "[polynomial]") {
    const BivariatePolynomial q = BivariatePolynomial::variable_q();
    const BivariatePolynomial p = BivariatePolynomial::variable_p();
    const BivariatePolynomial s = q + p * 2.0 - BivariatePolynomial::constant(1.0);
    REQUIRE(s(3.0, 4.0) == Approx(3.0 + 8.0 - 1.0));
    REQUIRE((2.0 * q).coeff(1, 0) == 2.0);
}

TEST_CASE("parser round trip", "[polynomial]") {
    const BivariatePolynomial f = parse_polynomial("0.5*q*p + 0.1*q^3 - 2");
    REQUIRE(f.coeff(1, 1) == 0.5);
    REQUIRE(f.coeff(3, 0) == Approx(0.1));
    REQUIRE(f.coeff(0, 0) == -2.0);
    REQUIRE(parse_polynomial("0").is_zero());
    REQUIRE(parse_polynomial("q^2").coeff(2, 0) == 1.0);
    REQUIRE(parse_polynomial("p^2 + q^2")(1.0, 2.0) == Approx(5.0));
    REQUIRE(parse_polynomial(parse_polynomial("q*p - 0.25*p^4").to_string()) ==
            parse_polynomial("q*p - 0.25*p^4"));
    REQUIRE_THROWS_AS(parse_polynomial(""), precondition_error);
    REQUIRE_THROWS_AS(parse_polynomial("q^"), precondition_error);
    REQUIRE_THROWS_AS(parse_polynomial("x + 1"), precondition_error);
}

TEST_CASE("term listing scales to wide polynomials", "[polynomial]") {
    BivariatePolynomial f;
    for (int j = 0; j < 40; ++j)
        for (int k = 0; k < 25; ++k) f.set_coeff(j, k, 1.0 / (1 + j + k));
    REQUIRE(f.terms().size() == 1000);
    const BivariatePolynomial g = f.derivative_q().derivative_p();
    REQUIRE(g.degree_q() == 38);
    REQUIRE(g.degree_p() == 23);
}

#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "phasegerbe/errors.hpp"
#include "phasegerbe/geometry.hpp"
#include "phasegerbe/gerbe.hpp"
#include "phasegerbe/phase_space.hpp"
#include "phasegerbe/polynomial.hpp"
#include "phasegerbe/quantum.hpp"

namespace pg {

// Convention note, in one place. The gerbe potential (gerbe_connection_A)
// stores honest complex 1-form components, A = -(i/hbar) lambda. The
// polynomial connections (ConnectionPrime) store the real components A'_q,
// A'_p of A' = (A'_q dq + A'_p dp)/(i hbar). The two meet through
// connection_prime_as_form below; mixing them without the 1/(i hbar)
// factor flips signs in every equivalence check.

/// Sample A' = (A'_q dq + A'_p dp)/(i hbar) as a complex 1-form.
inline OneForm connection_prime_as_form(const ConnectionPrime& conn, const Grid2D& grid) {
    const Complex inv_ih(0.0, -1.0 / conn.hbar);
    ScalarField2D cq = ScalarField2D::sample(
        grid, [&](double q, double p) { return inv_ih * conn.a_q(q, p); });
    ScalarField2D cp = ScalarField2D::sample(
        grid, [&](double q, double p) { return inv_ih * conn.a_p(q, p); });
    return OneForm(std::move(cq), std::move(cp));
}

/// delta0 gauge parameter: a smooth function (here: polynomial) on phase
/// space with action units.
struct GaugeParameter0 {
    BivariatePolynomial f;
};

/// delta1 gauge parameter: an arbitrary 1-form with polynomial components.
struct GaugeParameter1 {
    BivariatePolynomial phi_q;
    BivariatePolynomial phi_p;
};

struct Delta0Result {
    OneForm a;                   // A - (i/hbar) df
    TwoForm b_change;            // identically zero
    ThreeFormCertificate h_change;
};

/// delta0: A -> A - (i/hbar) df, B and H unchanged. The df components are
/// exact polynomial derivatives sampled on the grid.
inline Delta0Result delta0(const OneForm& a, const GaugeParameter0& par, double hbar) {
    if (!(hbar > 0.0)) throw precondition_error("delta0: hbar > 0");
    const BivariatePolynomial fq = par.f.derivative_q();
    const BivariatePolynomial fp = par.f.derivative_p();
    const Grid2D& g = a.grid();
    ScalarField2D cq = a.comp_q;
    ScalarField2D cp = a.comp_p;
    const Complex mih(0.0, -1.0 / hbar);
    for (int i = 0; i < g.nq(); ++i)
        for (int j = 0; j < g.np(); ++j) {
            cq(i, j) += mih * fq(g.q(i), g.p(j));
            cp(i, j) += mih * fp(g.q(i), g.p(j));
        }
    return Delta0Result{OneForm(std::move(cq), std::move(cp)), TwoForm(ScalarField2D(g)),
                        three_form_H(BField{{}, hbar})};
}

struct Delta1Result {
    OneForm a;                   // A - (i/hbar) phi
    TwoForm b;                   // B - (i/hbar) d phi
    ThreeFormCertificate h_change;
};

/// delta1: A -> A - (i/hbar) phi, B -> B - (i/hbar) d phi, H unchanged.
/// d phi is computed in exact coefficient algebra before sampling.
inline Delta1Result delta1(const OneForm& a, const TwoForm& b, const GaugeParameter1& par,
                           double hbar) {
    if (!(hbar > 0.0)) throw precondition_error("delta1: hbar > 0");
    if (!a.grid().same_shape(b.grid())) throw precondition_error("delta1: grids disagree");
    const Grid2D& g = a.grid();
    const Complex mih(0.0, -1.0 / hbar);

    ScalarField2D cq = a.comp_q;
    ScalarField2D cp = a.comp_p;
    const BivariatePolynomial dphi = par.phi_p.derivative_q() - par.phi_q.derivative_p();
    ScalarField2D bc = b.coeff;
    for (int i = 0; i < g.nq(); ++i)
        for (int j = 0; j < g.np(); ++j) {
            cq(i, j) += mih * par.phi_q(g.q(i), g.p(j));
            cp(i, j) += mih * par.phi_p(g.q(i), g.p(j));
            bc(i, j) += mih * dphi(g.q(i), g.p(j));
        }
    return Delta1Result{OneForm(std::move(cq), std::move(cp)), TwoForm(std::move(bc)),
                        three_form_H(BField{{}, hbar})};
}

/// The 1-form phi with phi_q = p + d_q f, phi_p = q - d_p f, for which
/// A + delta1 A reproduces the connection generated by f.
inline GaugeParameter1 phi_for_equivalence(const BivariatePolynomial& f) {
    return GaugeParameter1{BivariatePolynomial::variable_p() + f.derivative_q(),
                           BivariatePolynomial::variable_q() - f.derivative_p()};
}

struct EquivalenceCertificate {
    bool exact = false;
    BivariatePolynomial defect_q; // phi_q - p - A'_q, zero when the identity holds
    BivariatePolynomial defect_p; // phi_p - A'_p
};

/// Coefficient-exact certificate that A + delta1(phi_for_equivalence(f))
/// equals the connection built from f: both defects must be the zero
/// polynomial, with no tolerance.
inline EquivalenceCertificate verify_delta1_equivalence(const BivariatePolynomial& f) {
    const GaugeParameter1 phi = phi_for_equivalence(f);
    const ConnectionPrime conn = connection_from_generating(f);
    EquivalenceCertificate cert;
    cert.defect_q = (phi.phi_q - BivariatePolynomial::variable_p() - conn.a_q).trimmed();
    cert.defect_p = (phi.phi_p - conn.a_p).trimmed();
    cert.exact = cert.defect_q.is_zero() && cert.defect_p.is_zero();
    return cert;
}

struct Separability {
    bool solvable = false;
    BivariatePolynomial g_of_q; // coordinate-only part (carries the constant)
    BivariatePolynomial h_of_p; // momentum-only part
};

/// A delta0 transformation reaching the connection of f exists iff every
/// mixed monomial q^j p^k (j,k >= 1) of f vanishes; the separable pieces
/// f = g(q) + h(p) are returned when it does.
inline Separability delta0_solvable(const BivariatePolynomial& f) {
    Separability out;
    out.solvable = true;
    for (const auto& t : f.terms()) {
        if (t.j >= 1 && t.k >= 1) {
            out.solvable = false;
        } else if (t.k == 0) {
            out.g_of_q.set_coeff(t.j, 0, t.c);
        } else {
            out.h_of_p.set_coeff(0, t.k, t.c);
        }
    }
    if (!out.solvable) {
        out.g_of_q = BivariatePolynomial::zero();
        out.h_of_p = BivariatePolynomial::zero();
    }
    return out;
}

/// Rigid U(1): psi -> exp(iC/hbar) psi. Norm-preserving by construction.
inline Wavefunction1D rigid_phase(const Wavefunction1D& psi, double C, double hbar) {
    if (!(hbar > 0.0)) throw precondition_error("rigid_phase: hbar > 0");
    Wavefunction1D out = psi;
    const Complex phase = std::exp(Complex(0.0, C / hbar));
    for (Complex& z : out.values) z *= phase;
    return out;
}

} // namespace pg

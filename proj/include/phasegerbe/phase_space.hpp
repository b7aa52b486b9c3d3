#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "phasegerbe/dynamics.hpp"
#include "phasegerbe/errors.hpp"
#include "phasegerbe/geometry.hpp"
#include "phasegerbe/polynomial.hpp"
#include "phasegerbe/quantum.hpp"

namespace pg {

/// Connection A' = (A'_q dq + A'_p dp)/(i hbar) with exact polynomial
/// components. Built from a generating function it satisfies the
/// integrability condition d_q A'_p + d_p A'_q = 1 identically.
struct ConnectionPrime {
    BivariatePolynomial a_q;
    BivariatePolynomial a_p;
    double hbar = 1.0;
};

/// A'_q = d_q f, A'_p = q - d_p f.
inline ConnectionPrime connection_from_generating(const BivariatePolynomial& f,
                                                  double hbar = 1.0) {
    if (!(hbar > 0.0)) throw precondition_error("connection_from_generating: hbar > 0");
    return ConnectionPrime{f.derivative_q(),
                           BivariatePolynomial::variable_q() - f.derivative_p(), hbar};
}

struct IntegrabilityReport {
    bool exact = false;            // defect is the zero polynomial
    BivariatePolynomial defect;    // d_q A'_p + d_p A'_q - 1
};

/// Exact coefficient-algebra check of the integrability condition; no
/// tolerance is involved.
inline IntegrabilityReport integrability_check(const ConnectionPrime& conn) {
    BivariatePolynomial defect = conn.a_p.derivative_q() + conn.a_q.derivative_p() -
                                 BivariatePolynomial::constant(1.0);
    defect = defect.trimmed();
    return IntegrabilityReport{defect.is_zero(), defect};
}

/// Lifted state Psi(q,p) = exp(-i f(q,p)/hbar) psi(q) together with the
/// generating function that produced it.
struct ProbabilityDistribution2D {
    ScalarField2D values;
    BivariatePolynomial generating;

    const Grid2D& grid() const { return values.grid(); }
};

struct LiftOptions {
    bool allow_interpolation = false;
    /// Maximum tolerated phase advance per grid step, in radians:
    /// dq*max|d_q f|/hbar and dp*max|d_p f|/hbar must both stay below.
    double phase_resolution_limit = 0.5;
};

inline ProbabilityDistribution2D lift(const Wavefunction1D& psi, const BivariatePolynomial& f,
                                      const Grid2D& grid, const LiftOptions& opts = {}) {
    const double hbar = grid.domain().hbar;
    if (std::abs(psi.hbar - hbar) > 1e-12 * hbar)
        throw precondition_error("lift: psi.hbar disagrees with the domain hbar");

    // Nyquist-style resolution guard: an under-resolved lift phase makes
    // every downstream finite difference meaningless.
    const BivariatePolynomial fq = f.derivative_q();
    const BivariatePolynomial fp = f.derivative_p();
    double max_fq = 0.0, max_fp = 0.0;
    for (int i = 0; i < grid.nq(); ++i)
        for (int j = 0; j < grid.np(); ++j) {
            max_fq = std::max(max_fq, std::abs(fq(grid.q(i), grid.p(j))));
            max_fp = std::max(max_fp, std::abs(fp(grid.q(i), grid.p(j))));
        }
    const double step_q = grid.dq() * max_fq / hbar;
    const double step_p = grid.dp() * max_fp / hbar;
    if (step_q > opts.phase_resolution_limit || step_p > opts.phase_resolution_limit)
        throw precondition_error(
            "lift: grid does not resolve the phase of exp(-i f/hbar): dq*max|df/dq|/hbar = " +
            std::to_string(step_q) + ", dp*max|df/dp|/hbar = " + std::to_string(step_p) +
            ", limit " + std::to_string(opts.phase_resolution_limit));

    std::vector<Complex> psi_on_axis(grid.nq());
    const double tol = 1e-12 * grid.domain().q_span();
    bool match = psi.q.size() == static_cast<std::size_t>(grid.nq());
    if (match)
        for (int i = 0; i < grid.nq(); ++i)
            if (std::abs(psi.q[i] - grid.q(i)) > tol) {
                match = false;
                break;
            }
    if (match) {
        for (int i = 0; i < grid.nq(); ++i) psi_on_axis[i] = psi.values[i];
    } else if (opts.allow_interpolation) {
        for (int i = 0; i < grid.nq(); ++i) {
            const double x = grid.q(i);
            if (x < psi.q.front() - tol || x > psi.q.back() + tol)
                throw precondition_error("lift: grid q-axis extends beyond the wavefunction grid");
            const double t = (x - psi.q.front()) / psi.dq();
            const int a = std::min(static_cast<int>(std::floor(t)),
                                   static_cast<int>(psi.q.size()) - 2);
            const double u = t - a;
            psi_on_axis[i] = (1.0 - u) * psi.values[a] + u * psi.values[a + 1];
        }
    } else {
        throw precondition_error("lift: grid q-axis does not match the wavefunction grid "
                                 "(enable interpolation to resample)");
    }

    ProbabilityDistribution2D out{ScalarField2D(grid), f};
    for (int i = 0; i < grid.nq(); ++i)
        for (int j = 0; j < grid.np(); ++j)
            out.values(i, j) =
                std::exp(Complex(0.0, -f(grid.q(i), grid.p(j)) / hbar)) * psi_on_axis[i];
    return out;
}

/// The gauged position and momentum operators
///   Q = A'_p + i hbar d_p,   P = A'_q - i hbar d_q,
/// with the connection components sampled once and derivatives taken by
/// finite differences of the requested stencil order.
class GaugedOperators {
public:
    GaugedOperators(const ConnectionPrime& conn, const Grid2D& grid, int stencil_order = 2)
        : conn_(conn),
          grid_(grid),
          aq_(ScalarField2D::sample(grid, [&](double q, double p) { return conn.a_q(q, p); })),
          ap_(ScalarField2D::sample(grid, [&](double q, double p) { return conn.a_p(q, p); })),
          order_(stencil_order) {
        if (std::abs(conn.hbar - grid.domain().hbar) > 1e-12 * grid.domain().hbar)
            throw precondition_error("GaugedOperators: connection hbar disagrees with domain");
        if (stencil_order != 2 && stencil_order != 4)
            throw precondition_error("GaugedOperators: stencil order must be 2 or 4");
    }

    const Grid2D& grid() const { return grid_; }
    const ConnectionPrime& connection() const { return conn_; }
    int stencil_order() const { return order_; }

    ScalarField2D apply_Q(const ScalarField2D& x) const {
        ScalarField2D out = partial_derivative(x, Axis::p, order_);
        out *= Complex(0.0, conn_.hbar);
        for (int i = 0; i < grid_.nq(); ++i)
            for (int j = 0; j < grid_.np(); ++j) out(i, j) += ap_(i, j) * x(i, j);
        return out;
    }

    ScalarField2D apply_P(const ScalarField2D& x) const {
        ScalarField2D out = partial_derivative(x, Axis::q, order_);
        out *= Complex(0.0, -conn_.hbar);
        for (int i = 0; i < grid_.nq(); ++i)
            for (int j = 0; j < grid_.np(); ++j) out(i, j) += aq_(i, j) * x(i, j);
        return out;
    }

private:
    ConnectionPrime conn_;
    Grid2D grid_;
    ScalarField2D aq_, ap_;
    int order_;
};

inline GaugedOperators operators_QP(const ConnectionPrime& conn, const Grid2D& grid,
                                    int stencil_order = 2) {
    return GaugedOperators(conn, grid, stencil_order);
}

/// || (QP - PQ - i hbar) psi ||_2 / || psi ||_2 over interior nodes
/// (`margin` rows and columns are dropped on every edge so one-sided
/// boundary stencils of the composed operators stay out of the norm).
inline double commutator_residual(const GaugedOperators& ops, const ScalarField2D& testfield,
                                  int margin = 2) {
    ScalarField2D qp = ops.apply_Q(ops.apply_P(testfield));
    ScalarField2D pq = ops.apply_P(ops.apply_Q(testfield));
    ScalarField2D r = qp - pq;
    const Complex ih(0.0, ops.connection().hbar);
    for (int i = 0; i < r.grid().nq(); ++i)
        for (int j = 0; j < r.grid().np(); ++j) r(i, j) -= ih * testfield(i, j);
    const double denom = l2_norm(testfield, margin);
    if (!(denom > 0.0)) throw precondition_error("commutator_residual: zero test field");
    return l2_norm(r, margin) / denom;
}

/// H(Q, P) Psi = (1/2m) P(P Psi) + sum_k v_k Q^k Psi, powers by repeated
/// application. The default stencil order is 4: composing operators
/// multiplies the truncation error by the local phase wavenumber, and
/// second-order stencils cannot reach the documented residual targets on
/// the reference grids (see README).
inline ScalarField2D apply_hamiltonian_ps(const ConnectionPrime& conn, const HamiltonianSpec& H,
                                          const ProbabilityDistribution2D& dist,
                                          int stencil_order = 4) {
    if (std::abs(H.hbar - conn.hbar) > 1e-12 * conn.hbar)
        throw precondition_error("apply_hamiltonian_ps: Hamiltonian hbar disagrees");
    GaugedOperators ops(conn, dist.grid(), stencil_order);

    ScalarField2D acc = ops.apply_P(ops.apply_P(dist.values));
    acc *= Complex(1.0 / (2.0 * H.mass), 0.0);
    ScalarField2D qpow = dist.values; // Q^0 Psi
    for (std::size_t k = 0; k < H.potential.size(); ++k) {
        if (k > 0) qpow = ops.apply_Q(qpow);
        if (H.potential[k] == 0.0) continue;
        ScalarField2D term = qpow;
        term *= Complex(H.potential[k], 0.0);
        acc += term;
    }
    return acc;
}

/// || H_ps Psi - E Psi ||_2 / || Psi ||_2 over the interior window that
/// excludes `margin_fraction` of the nodes on each edge (the lifted Psi does
/// not decay in p, so boundary stencils see truncated oscillations).
inline double schrodinger_residual(const ConnectionPrime& conn, const HamiltonianSpec& H,
                                   const ProbabilityDistribution2D& dist, double E,
                                   double margin_fraction = 0.1, int stencil_order = 4) {
    ScalarField2D r = apply_hamiltonian_ps(conn, H, dist, stencil_order);
    for (int i = 0; i < r.grid().nq(); ++i)
        for (int j = 0; j < r.grid().np(); ++j) r(i, j) -= E * dist.values(i, j);
    const int margin = static_cast<int>(margin_fraction *
                                        std::min(dist.grid().nq(), dist.grid().np()));
    const double denom = l2_norm(dist.values, margin);
    if (!(denom > 0.0)) throw precondition_error("schrodinger_residual: zero state");
    return l2_norm(r, margin) / denom;
}

/// d' Psi = -dq d_q Psi + dp d_p Psi, the symplectic exterior derivative.
inline OneForm symplectic_derivative(const ScalarField2D& psi, int order = 2) {
    ScalarField2D mq = partial_derivative(psi, Axis::q, order);
    mq *= Complex(-1.0, 0.0);
    return OneForm(std::move(mq), partial_derivative(psi, Axis::p, order));
}

/// D' Psi = d' Psi + A' Psi for the polynomial connection. The dq and dp
/// coefficients of i hbar D' Psi are exactly P Psi and Q Psi.
inline OneForm covariant_derivative(const ConnectionPrime& conn, const ScalarField2D& psi,
                                    int order = 2) {
    OneForm d = symplectic_derivative(psi, order);
    const Grid2D& g = psi.grid();
    const Complex inv_ih = Complex(0.0, -1.0 / conn.hbar); // 1/(i hbar)
    for (int i = 0; i < g.nq(); ++i)
        for (int j = 0; j < g.np(); ++j) {
            d.comp_q(i, j) += inv_ih * conn.a_q(g.q(i), g.p(j)) * psi(i, j);
            d.comp_p(i, j) += inv_ih * conn.a_p(g.q(i), g.p(j)) * psi(i, j);
        }
    return d;
}

/// D'_A Psi = d' Psi + A Psi for a sampled gerbe connection 1-form A.
inline OneForm covariant_derivative(const OneForm& a, const ScalarField2D& psi, int order = 2) {
    if (!a.grid().same_shape(psi.grid()))
        throw precondition_error("covariant_derivative: grids disagree");
    OneForm d = symplectic_derivative(psi, order);
    for (int i = 0; i < psi.grid().nq(); ++i)
        for (int j = 0; j < psi.grid().np(); ++j) {
            d.comp_q(i, j) += a.comp_q(i, j) * psi(i, j);
            d.comp_p(i, j) += a.comp_p(i, j) * psi(i, j);
        }
    return d;
}

} // namespace pg

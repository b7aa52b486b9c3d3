#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "phasegerbe/errors.hpp"
#include "phasegerbe/polynomial.hpp"

namespace pg {

using Complex = std::complex<double>;

struct Point2 {
    double q = 0.0;
    double p = 0.0;
};

/// Rectangular phase-space window with Darboux coordinates (q, p) and the
/// quantum of action hbar carried alongside. Products p*q have action units.
struct PhaseSpaceDomain {
    double q_min, q_max;
    double p_min, p_max;
    double hbar = 1.0;

    PhaseSpaceDomain(double qmin, double qmax, double pmin, double pmax, double h = 1.0)
        : q_min(qmin), q_max(qmax), p_min(pmin), p_max(pmax), hbar(h) {
        if (!(q_min < q_max) || !(p_min < p_max))
            throw precondition_error("PhaseSpaceDomain: require q_min < q_max and p_min < p_max");
        if (!(hbar > 0.0)) throw precondition_error("PhaseSpaceDomain: require hbar > 0");
    }

    double q_span() const { return q_max - q_min; }
    double p_span() const { return p_max - p_min; }

    bool contains(double q, double p, double slack = 0.0) const {
        return q >= q_min - slack && q <= q_max + slack && p >= p_min - slack && p <= p_max + slack;
    }
};

/// Uniform nq x np node grid over a domain; nodes include both edges.
class Grid2D {
public:
    Grid2D(PhaseSpaceDomain domain, int nq, int np)
        : domain_(domain), nq_(nq), np_(np) {
        if (nq < 8 || np < 8) throw precondition_error("Grid2D: require nq, np >= 8");
        dq_ = domain_.q_span() / (nq_ - 1);
        dp_ = domain_.p_span() / (np_ - 1);
    }

    const PhaseSpaceDomain& domain() const { return domain_; }
    int nq() const { return nq_; }
    int np() const { return np_; }
    double dq() const { return dq_; }
    double dp() const { return dp_; }
    double q(int i) const { return domain_.q_min + i * dq_; }
    double p(int j) const { return domain_.p_min + j * dp_; }

    std::vector<double> q_nodes() const {
        std::vector<double> v(nq_);
        for (int i = 0; i < nq_; ++i) v[i] = q(i);
        return v;
    }

    bool same_shape(const Grid2D& o) const {
        return nq_ == o.nq_ && np_ == o.np_ && domain_.q_min == o.domain_.q_min &&
               domain_.q_max == o.domain_.q_max && domain_.p_min == o.domain_.p_min &&
               domain_.p_max == o.domain_.p_max;
    }

private:
    PhaseSpaceDomain domain_;
    int nq_, np_;
    double dq_, dp_;
};

/// Complex scalar samples on a Grid2D; row index = q, column index = p.
class ScalarField2D {
public:
    explicit ScalarField2D(const Grid2D& grid, Complex fill = Complex(0.0, 0.0))
        : grid_(grid), v_(static_cast<std::size_t>(grid.nq()) * grid.np(), fill) {}

    template <typename F>
    static ScalarField2D sample(const Grid2D& grid, F&& f) {
        ScalarField2D out(grid);
        for (int i = 0; i < grid.nq(); ++i)
            for (int j = 0; j < grid.np(); ++j) out(i, j) = Complex(f(grid.q(i), grid.p(j)));
        return out;
    }

    const Grid2D& grid() const { return grid_; }
    Complex& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * grid_.np() + j]; }
    const Complex& operator()(int i, int j) const {
        return v_[static_cast<std::size_t>(i) * grid_.np() + j];
    }

    /// Bilinear interpolation; throws if (q,p) falls outside the domain
    /// (a relative slack of ~1e-12 absorbs edge round-off).
    Complex bilinear(double q, double p) const {
        const PhaseSpaceDomain& d = grid_.domain();
        const double slack = 1e-12 * std::max(d.q_span(), d.p_span());
        if (!d.contains(q, p, slack))
            throw precondition_error("bilinear: point (" + std::to_string(q) + ", " +
                                     std::to_string(p) + ") outside domain");
        double x = (q - d.q_min) / grid_.dq();
        double y = (p - d.p_min) / grid_.dp();
        int i = std::min(static_cast<int>(std::floor(x)), grid_.nq() - 2);
        int j = std::min(static_cast<int>(std::floor(y)), grid_.np() - 2);
        i = std::max(i, 0);
        j = std::max(j, 0);
        const double tx = x - i, ty = y - j;
        return (1 - tx) * (1 - ty) * (*this)(i, j) + tx * (1 - ty) * (*this)(i + 1, j) +
               (1 - tx) * ty * (*this)(i, j + 1) + tx * ty * (*this)(i + 1, j + 1);
    }

    ScalarField2D& operator+=(const ScalarField2D& o) {
        for (std::size_t n = 0; n < v_.size(); ++n) v_[n] += o.v_[n];
        return *this;
    }

    ScalarField2D& operator-=(const ScalarField2D& o) {
        for (std::size_t n = 0; n < v_.size(); ++n) v_[n] -= o.v_[n];
        return *this;
    }

    ScalarField2D& operator*=(Complex s) {
        for (Complex& z : v_) z *= s;
        return *this;
    }

    friend ScalarField2D operator+(ScalarField2D a, const ScalarField2D& b) { return a += b; }
    friend ScalarField2D operator-(ScalarField2D a, const ScalarField2D& b) { return a -= b; }
    friend ScalarField2D operator*(Complex s, ScalarField2D a) { return a *= s; }

    double max_abs() const {
        double m = 0.0;
        for (const Complex& z : v_) m = std::max(m, std::abs(z));
        return m;
    }

private:
    Grid2D grid_;
    std::vector<Complex> v_;
};

/// L2 norm (node sum, no measure factor) over nodes at least `margin` rows
/// and columns away from every edge.
inline double l2_norm(const ScalarField2D& f, int margin = 0) {
    const int nq = f.grid().nq(), np = f.grid().np();
    double s = 0.0;
    for (int i = margin; i < nq - margin; ++i)
        for (int j = margin; j < np - margin; ++j) s += std::norm(f(i, j));
    return std::sqrt(s);
}

enum class Axis { q, p };

/// Finite-difference partial derivative of a sampled field.
///
/// order 2: central interior, second-order one-sided at the two edges.
/// order 4: five-point central on the deep interior, falling back to the
///          order-2 stencils on the outermost two lines per side.
inline ScalarField2D partial_derivative(const ScalarField2D& f, Axis axis, int order = 2) {
    const Grid2D& g = f.grid();
    const int n = (axis == Axis::q) ? g.nq() : g.np();
    const double h = (axis == Axis::q) ? g.dq() : g.dp();
    if (n < 3) throw precondition_error("partial_derivative: grid too small");
    if (order != 2 && order != 4) throw precondition_error("partial_derivative: order must be 2 or 4");

    ScalarField2D out(g);
    const int m = (axis == Axis::q) ? g.np() : g.nq();
    auto val = [&](int along, int other) -> const Complex& {
        return (axis == Axis::q) ? f(along, other) : f(other, along);
    };
    auto res = [&](int along, int other) -> Complex& {
        return (axis == Axis::q) ? out(along, other) : out(other, along);
    };

    for (int t = 0; t < m; ++t) {
        res(0, t) = (-3.0 * val(0, t) + 4.0 * val(1, t) - val(2, t)) / (2.0 * h);
        res(n - 1, t) = (3.0 * val(n - 1, t) - 4.0 * val(n - 2, t) + val(n - 3, t)) / (2.0 * h);
        if (order == 2 || n < 6) {
            for (int i = 1; i < n - 1; ++i) res(i, t) = (val(i + 1, t) - val(i - 1, t)) / (2.0 * h);
        } else {
            res(1, t) = (val(2, t) - val(0, t)) / (2.0 * h);
            res(n - 2, t) = (val(n - 1, t) - val(n - 3, t)) / (2.0 * h);
            for (int i = 2; i < n - 2; ++i)
                res(i, t) = (val(i - 2, t) - 8.0 * val(i - 1, t) + 8.0 * val(i + 1, t) - val(i + 2, t)) /
                            (12.0 * h);
        }
    }
    return out;
}

/// 1-form a_q dq + a_p dp with sampled component fields.
struct OneForm {
    OneForm(ScalarField2D q_comp, ScalarField2D p_comp)
        : comp_q(std::move(q_comp)), comp_p(std::move(p_comp)) {
        if (!comp_q.grid().same_shape(comp_p.grid()))
            throw precondition_error("OneForm: components must share one grid");
    }

    const Grid2D& grid() const { return comp_q.grid(); }

    ScalarField2D comp_q;
    ScalarField2D comp_p;
};

/// 2-form c dq^dp; a single component in two dimensions.
struct TwoForm {
    explicit TwoForm(ScalarField2D c) : coeff(std::move(c)) {}
    const Grid2D& grid() const { return coeff.grid(); }

    ScalarField2D coeff;
};

/// omega = dq ^ dp in Darboux coordinates: unit coefficient everywhere.
inline TwoForm symplectic_form(const Grid2D& grid) {
    return TwoForm(ScalarField2D(grid, Complex(1.0, 0.0)));
}

/// theta = -p dq, the canonical 1-form; d theta = omega.
inline OneForm canonical_one_form(const Grid2D& grid) {
    ScalarField2D cq = ScalarField2D::sample(grid, [](double, double p) { return -p; });
    return OneForm(std::move(cq), ScalarField2D(grid));
}

/// d(a_q dq + a_p dp) = (d_q a_p - d_p a_q) dq^dp, by finite differences.
inline TwoForm exterior_derivative(const OneForm& form, int order = 2) {
    ScalarField2D dpq = partial_derivative(form.comp_p, Axis::q, order);
    ScalarField2D dqp = partial_derivative(form.comp_q, Axis::p, order);
    return TwoForm(dpq - dqp);
}

/// Composite trapezoid along the polyline, one panel per segment; the
/// caller controls accuracy through the polyline resolution. Components
/// are sampled by bilinear interpolation from the grid.
inline Complex line_integral(const OneForm& form, const std::vector<Point2>& path) {
    if (path.size() < 2) throw precondition_error("line_integral: path needs >= 2 points");
    Complex acc(0.0, 0.0);
    Complex fq_prev = form.comp_q.bilinear(path[0].q, path[0].p);
    Complex fp_prev = form.comp_p.bilinear(path[0].q, path[0].p);
    for (std::size_t s = 1; s < path.size(); ++s) {
        const Complex fq = form.comp_q.bilinear(path[s].q, path[s].p);
        const Complex fp = form.comp_p.bilinear(path[s].q, path[s].p);
        const double dq = path[s].q - path[s - 1].q;
        const double dp = path[s].p - path[s - 1].p;
        acc += 0.5 * (fq_prev + fq) * dq + 0.5 * (fp_prev + fp) * dp;
        fq_prev = fq;
        fp_prev = fp;
    }
    return acc;
}

/// Same quadrature with components evaluated exactly at the sample points
/// (no grid, no interpolation error).
inline Complex line_integral(const std::function<Complex(double, double)>& comp_q,
                             const std::function<Complex(double, double)>& comp_p,
                             const std::vector<Point2>& path) {
    if (path.size() < 2) throw precondition_error("line_integral: path needs >= 2 points");
    Complex acc(0.0, 0.0);
    Complex fq_prev = comp_q(path[0].q, path[0].p);
    Complex fp_prev = comp_p(path[0].q, path[0].p);
    for (std::size_t s = 1; s < path.size(); ++s) {
        const Complex fq = comp_q(path[s].q, path[s].p);
        const Complex fp = comp_p(path[s].q, path[s].p);
        acc += 0.5 * (fq_prev + fq) * (path[s].q - path[s - 1].q) +
               0.5 * (fp_prev + fp) * (path[s].p - path[s - 1].p);
        fq_prev = fq;
        fp_prev = fp;
    }
    return acc;
}

/// Signed shoelace area; counterclockwise positive.
inline double signed_polygon_area(const std::vector<Point2>& poly) {
    if (poly.size() < 3) throw precondition_error("signed_polygon_area: need >= 3 vertices");
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& u = poly[i];
        const Point2& v = poly[(i + 1) % poly.size()];
        a += u.q * v.p - v.q * u.p;
    }
    return 0.5 * a;
}

/// Integral of a 2-form over an oriented polygon. Constant coefficients
/// integrate exactly (coefficient times shoelace area); general fields use
/// centroid quadrature on a fan triangulation.
inline Complex surface_integral(const TwoForm& form, const std::vector<Point2>& polygon) {
    if (polygon.size() < 3) throw precondition_error("surface_integral: need >= 3 vertices");
    const PhaseSpaceDomain& d = form.grid().domain();
    const double slack = 1e-12 * std::max(d.q_span(), d.p_span());
    for (const Point2& v : polygon)
        if (!d.contains(v.q, v.p, slack))
            throw precondition_error("surface_integral: polygon vertex outside domain");

    bool constant = true;
    const Complex c0 = form.coeff(0, 0);
    for (int i = 0; i < form.grid().nq() && constant; ++i)
        for (int j = 0; j < form.grid().np(); ++j)
            if (form.coeff(i, j) != c0) {
                constant = false;
                break;
            }
    if (constant) return c0 * signed_polygon_area(polygon);

    Complex acc(0.0, 0.0);
    const Point2& a = polygon[0];
    for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
        const Point2& b = polygon[i];
        const Point2& c = polygon[i + 1];
        const double area =
            0.5 * ((b.q - a.q) * (c.p - a.p) - (c.q - a.q) * (b.p - a.p));
        const double gq = (a.q + b.q + c.q) / 3.0;
        const double gp = (a.p + b.p + c.p) / 3.0;
        acc += area * form.coeff.bilinear(gq, gp);
    }
    return acc;
}

/// lambda -> lambda + df with exact polynomial derivatives of f sampled on
/// the grid nodes; the only inexactness left in the result is the one the
/// input form already carried.
inline OneForm shift_lambda(const OneForm& form, const BivariatePolynomial& f) {
    const BivariatePolynomial fq = f.derivative_q();
    const BivariatePolynomial fp = f.derivative_p();
    const Grid2D& g = form.grid();
    ScalarField2D cq = form.comp_q;
    ScalarField2D cp = form.comp_p;
    for (int i = 0; i < g.nq(); ++i)
        for (int j = 0; j < g.np(); ++j) {
            cq(i, j) += fq(g.q(i), g.p(j));
            cp(i, j) += fp(g.q(i), g.p(j));
        }
    return OneForm(std::move(cq), std::move(cp));
}

/// Split every edge of a polyline into `per_edge` equal segments.
inline std::vector<Point2> refine_polyline(const std::vector<Point2>& path, int per_edge) {
    if (per_edge < 1) throw precondition_error("refine_polyline: per_edge >= 1");
    if (path.size() < 2) return path;
    std::vector<Point2> out;
    out.reserve((path.size() - 1) * per_edge + 1);
    for (std::size_t s = 1; s < path.size(); ++s) {
        for (int t = 0; t < per_edge; ++t) {
            const double u = static_cast<double>(t) / per_edge;
            out.push_back({path[s - 1].q + u * (path[s].q - path[s - 1].q),
                           path[s - 1].p + u * (path[s].p - path[s - 1].p)});
        }
    }
    out.push_back(path.back());
    return out;
}

} // namespace pg

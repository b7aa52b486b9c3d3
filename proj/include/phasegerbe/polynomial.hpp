#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "phasegerbe/errors.hpp"

namespace pg {

/// Real polynomial in the two phase-space variables q and p, stored as a
/// dense coefficient matrix c[j][k] for the monomials q^j p^k. Partial
/// derivatives are coefficient shifts, so derivative algebra is exact:
/// no sampling or finite-difference error enters through this type.
class BivariatePolynomial {
public:
    BivariatePolynomial() : deg_q_(0), deg_p_(0), c_(1, 0.0) {}

    static BivariatePolynomial zero() { return BivariatePolynomial(); }

    static BivariatePolynomial constant(double v) {
        BivariatePolynomial r;
        r.c_[0] = v;
        return r;
    }

    static BivariatePolynomial monomial(int j, int k, double coeff) {
        if (j < 0 || k < 0) throw precondition_error("monomial: negative exponent");
        BivariatePolynomial r;
        r.deg_q_ = j;
        r.deg_p_ = k;
        r.c_.assign(static_cast<std::size_t>(j + 1) * (k + 1), 0.0);
        r.at(j, k) = coeff;
        return r;
    }

    static BivariatePolynomial variable_q() { return monomial(1, 0, 1.0); }
    static BivariatePolynomial variable_p() { return monomial(0, 1, 1.0); }

    int degree_q() const { return deg_q_; }
    int degree_p() const { return deg_p_; }

    double coeff(int j, int k) const {
        if (j < 0 || k < 0 || j > deg_q_ || k > deg_p_) return 0.0;
        return c_[static_cast<std::size_t>(j) * (deg_p_ + 1) + k];
    }

    void set_coeff(int j, int k, double v) {
        if (j < 0 || k < 0) throw precondition_error("set_coeff: negative exponent");
        grow(j, k);
        at(j, k) = v;
    }

    double operator()(double q, double p) const {
        // Horner in q of Horner-in-p row polynomials.
        double acc = 0.0;
        for (int j = deg_q_; j >= 0; --j) {
            double row = 0.0;
            for (int k = deg_p_; k >= 0; --k) row = row * p + coeff(j, k);
            acc = acc * q + row;
        }
        return acc;
    }

    BivariatePolynomial derivative_q() const {
        if (deg_q_ == 0) return zero();
        BivariatePolynomial r;
        r.deg_q_ = deg_q_ - 1;
        r.deg_p_ = deg_p_;
        r.c_.assign(static_cast<std::size_t>(deg_q_) * (deg_p_ + 1), 0.0);
        for (int j = 1; j <= deg_q_; ++j)
            for (int k = 0; k <= deg_p_; ++k) r.at(j - 1, k) = j * coeff(j, k);
        return r.trimmed();
    }

    BivariatePolynomial derivative_p() const {
        if (deg_p_ == 0) return zero();
        BivariatePolynomial r;
        r.deg_q_ = deg_q_;
        r.deg_p_ = deg_p_ - 1;
        r.c_.assign(static_cast<std::size_t>(deg_q_ + 1) * deg_p_, 0.0);
        for (int j = 0; j <= deg_q_; ++j)
            for (int k = 1; k <= deg_p_; ++k) r.at(j, k - 1) = k * coeff(j, k);
        return r.trimmed();
    }

    BivariatePolynomial operator+(const BivariatePolynomial& o) const {
        BivariatePolynomial r;
        r.deg_q_ = std::max(deg_q_, o.deg_q_);
        r.deg_p_ = std::max(deg_p_, o.deg_p_);
        r.c_.assign(static_cast<std::size_t>(r.deg_q_ + 1) * (r.deg_p_ + 1), 0.0);
        for (int j = 0; j <= r.deg_q_; ++j)
            for (int k = 0; k <= r.deg_p_; ++k) r.at(j, k) = coeff(j, k) + o.coeff(j, k);
        return r.trimmed();
    }

    BivariatePolynomial operator-(const BivariatePolynomial& o) const {
        return *this + (o * -1.0);
    }

    BivariatePolynomial operator*(double s) const {
        BivariatePolynomial r = *this;
        for (double& v : r.c_) v *= s;
        return r;
    }

    bool is_zero() const {
        for (double v : c_)
            if (v != 0.0) return false;
        return true;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

    /// Drop all-zero trailing rows/columns so degree bounds are tight.
    BivariatePolynomial trimmed() const {
        int dq = 0, dp = 0;
        for (int j = 0; j <= deg_q_; ++j)
            for (int k = 0; k <= deg_p_; ++k)
                if (coeff(j, k) != 0.0) {
                    dq = std::max(dq, j);
                    dp = std::max(dp, k);
                }
        BivariatePolynomial r;
        r.deg_q_ = dq;
        r.deg_p_ = dp;
        r.c_.assign(static_cast<std::size_t>(dq + 1) * (dp + 1), 0.0);
        for (int j = 0; j <= dq; ++j)
            for (int k = 0; k <= dp; ++k) r.at(j, k) = coeff(j, k);
        return r;
    }

    bool operator==(const BivariatePolynomial& o) const {
        return (*this - o).is_zero();
    }

    struct Term {
        int j;
        int k;
        double c;
    };

    std::vector<Term> terms() const {
        std::vector<Term> ts;
        for (int j = 0; j <= deg_q_; ++j)
            for (int k = 0; k <= deg_p_; ++k)
                if (coeff(j, k) != 0.0) ts.push_back({j, k, coeff(j, k)});
        return ts;
    }

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        for (const Term& t : terms()) {
            double c = t.c;
            if (!first) {
                os << (c < 0 ? " - " : " + ");
                c = std::abs(c);
            } else if (c < 0) {
                os << "-";
                c = std::abs(c);
            }
            first = false;
            const bool has_vars = t.j > 0 || t.k > 0;
            if (!has_vars || c != 1.0) {
                os << c;
                if (has_vars) os << "*";
            }
            if (t.j > 0) {
                os << "q";
                if (t.j > 1) os << "^" << t.j;
                if (t.k > 0) os << "*";
            }
            if (t.k > 0) {
                os << "p";
                if (t.k > 1) os << "^" << t.k;
            }
        }
        if (first) os << "0";
        return os.str();
    }

private:
    double& at(int j, int k) { return c_[static_cast<std::size_t>(j) * (deg_p_ + 1) + k]; }

    void grow(int j, int k) {
        if (j <= deg_q_ && k <= deg_p_) return;
        const int dq = std::max(deg_q_, j), dp = std::max(deg_p_, k);
        std::vector<double> nc(static_cast<std::size_t>(dq + 1) * (dp + 1), 0.0);
        for (int a = 0; a <= deg_q_; ++a)
            for (int b = 0; b <= deg_p_; ++b)
                nc[static_cast<std::size_t>(a) * (dp + 1) + b] = coeff(a, b);
        deg_q_ = dq;
        deg_p_ = dp;
        c_ = std::move(nc);
    }

    int deg_q_;
    int deg_p_;
    std::vector<double> c_; // row-major, c_[j*(deg_p_+1)+k] is the q^j p^k coefficient
};

inline BivariatePolynomial operator*(double s, const BivariatePolynomial& f) { return f * s; }

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

// One product of optional numeric factor and q^j / p^k factors, '*' separated
// (the '*' may be omitted): "0.5*q*p", "q^3", "-2p^2", "1.5".
inline BivariatePolynomial parse_term(const std::string& s, std::size_t& i) {
    double coeff = 1.0;
    int jq = 0, kp = 0;
    bool any = false;
    skip_ws(s, i);
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        if (s[i] == '-') coeff = -coeff;
        ++i;
    }
    while (true) {
        skip_ws(s, i);
        if (i >= s.size()) break;
        const char c = s[i];
        if (c == 'q' || c == 'p') {
            ++i;
            int e = 1;
            skip_ws(s, i);
            if (i < s.size() && s[i] == '^') {
                ++i;
                skip_ws(s, i);
                std::size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                if (j == i) throw precondition_error("polynomial parse: exponent expected at '" + s.substr(i) + "'");
                e = std::stoi(s.substr(i, j - i));
                i = j;
            }
            (c == 'q' ? jq : kp) += e;
            any = true;
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            coeff *= std::stod(s.substr(i), &used);
            i += used;
            any = true;
        } else if (c == '*') {
            ++i;
        } else {
            break;
        }
    }
    if (!any) throw precondition_error("polynomial parse: empty term in '" + s + "'");
    return BivariatePolynomial::monomial(jq, kp, coeff);
}

} // namespace detail

/// Parse expressions like "0.5*q*p + 0.1*q^3" or "q^2 - p^2 + 1".
/// "0" parses to the zero polynomial.
inline BivariatePolynomial parse_polynomial(const std::string& text) {
    BivariatePolynomial sum;
    std::size_t i = 0;
    detail::skip_ws(text, i);
    if (i == text.size()) throw precondition_error("polynomial parse: empty input");
    while (i < text.size()) {
        sum = sum + detail::parse_term(text, i);
        detail::skip_ws(text, i);
        if (i < text.size() && text[i] != '+' && text[i] != '-')
            throw precondition_error("polynomial parse: unexpected character '" + std::string(1, text[i]) + "'");
    }
    return sum.trimmed();
}

} // namespace pg

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "phasegerbe/dynamics.hpp"
#include "phasegerbe/errors.hpp"

namespace pg {

/// Complex wavefunction sampled on a uniform q grid.
struct Wavefunction1D {
    std::vector<double> q;
    std::vector<Complex> values;
    double hbar = 1.0;

    double dq() const { return q.size() > 1 ? q[1] - q[0] : 0.0; }

    double norm() const {
        double s = 0.0;
        for (const Complex& z : values) s += std::norm(z);
        return std::sqrt(s * dq());
    }

    void normalize() {
        const double n = norm();
        if (!(n > 0.0)) throw numeric_error("Wavefunction1D: cannot normalize a zero function");
        for (Complex& z : values) z /= n;
    }
};

inline Complex inner_product(const Wavefunction1D& a, const Wavefunction1D& b) {
    if (a.values.size() != b.values.size())
        throw precondition_error("inner_product: size mismatch");
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < a.values.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
    return s * a.dq();
}

struct EigenSolution {
    std::vector<double> energies;
    std::vector<Wavefunction1D> states;
    std::vector<std::string> warnings;
};

namespace detail {

// Number of eigenvalues of the symmetric tridiagonal (d, e) below x,
// via the Sturm sequence of the shifted LDL^T pivots.
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    int count = 0;
    double piv = d[0] - x;
    if (piv < 0.0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (piv == 0.0) piv = 1e-300;
        piv = d[i] - x - e[i - 1] * e[i - 1] / piv;
        if (piv < 0.0) ++count;
    }
    return count;
}

// Solve (T - lambda I) x = b for tridiagonal T with partial pivoting
// (two superdiagonals appear after row swaps). Near-singular systems are
// exactly the useful ones for inverse iteration; zero pivots get nudged.
inline std::vector<double> solve_shifted_tridiagonal(const std::vector<double>& d,
                                                     const std::vector<double>& e,
                                                     double lambda,
                                                     std::vector<double> b) {
    const std::size_t n = d.size();
    std::vector<double> a0(n), a1(n, 0.0), a2(n, 0.0); // diagonal and two superdiagonals
    std::vector<double> sub(n, 0.0);                   // subdiagonal (consumed in place)
    for (std::size_t i = 0; i < n; ++i) a0[i] = d[i] - lambda;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        a1[i] = e[i];
        sub[i + 1] = e[i];
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a0[i]));
    for (std::size_t i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(e[i]));
    const double tiny = std::max(scale, 1.0) * 1e-300;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i + 1]) > std::abs(a0[i])) {
            std::swap(a0[i], sub[i + 1]);
            std::swap(a1[i], a0[i + 1]);
            std::swap(a2[i], a1[i + 1]);
            std::swap(b[i], b[i + 1]);
        }
        if (a0[i] == 0.0) a0[i] = tiny;
        const double m = sub[i + 1] / a0[i];
        a0[i + 1] -= m * a1[i];
        a1[i + 1] -= m * a2[i];
        b[i + 1] -= m * b[i];
    }
    if (a0[n - 1] == 0.0) a0[n - 1] = tiny;

    std::vector<double> x(n);
    x[n - 1] = b[n - 1] / a0[n - 1];
    if (n >= 2) x[n - 2] = (b[n - 2] - a1[n - 2] * x[n - 1]) / a0[n - 2];
    for (std::size_t i = n; i-- > 0;) {
        if (i + 2 >= n) continue;
        x[i] = (b[i] - a1[i] * x[i + 1] - a2[i] * x[i + 2]) / a0[i];
    }
    return x;
}

inline double splitmix_unit(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

/// Lowest-k eigenpairs of the Dirichlet finite-difference Hamiltonian
/// -hbar^2/(2m) D2 + diag(V) on n grid nodes over [q_min, q_max].
///
/// Eigenvalues come from Sturm-sequence bisection, eigenvectors from a few
/// rounds of inverse iteration with a pivoted tridiagonal solve. Both are
/// deterministic; state signs are fixed by making the largest-magnitude
/// component positive.
inline EigenSolution solve_eigen(const HamiltonianSpec& H, double q_min, double q_max,
                                 int n, int k) {
    if (!(q_min < q_max)) throw precondition_error("solve_eigen: require q_min < q_max");
    if (n < 64) throw precondition_error("solve_eigen: require n >= 64");
    if (k < 0 || k > 20) throw precondition_error("solve_eigen: require 0 <= k <= 20");
    if (k > n - 2) throw precondition_error("solve_eigen: k exceeds n-2 interior nodes");

    EigenSolution sol;
    if (!H.confining())
        sol.warnings.push_back("potential is not confining; bound-state spectrum may be spurious");
    if (k == 0) return sol;

    const double dq = (q_max - q_min) / (n - 1);
    const int m = n - 2;
    const double kinetic = H.hbar * H.hbar / (2.0 * H.mass * dq * dq);
    std::vector<double> d(m), e(m - 1, -kinetic);
    for (int i = 0; i < m; ++i) d[i] = 2.0 * kinetic + H.V(q_min + (i + 1) * dq);

    double lo = d[0], hi = d[0];
    for (int i = 0; i < m; ++i) {
        const double off = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i < m - 1 ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - off);
        hi = std::max(hi, d[i] + off);
    }
    const double span = hi - lo;

    std::vector<double> eigenvalues(k);
    for (int j = 0; j < k; ++j) {
        double a = lo, b = hi;
        for (int it = 0; it < 128 && b - a > 0.0; ++it) {
            const double mid = 0.5 * (a + b);
            if (detail::sturm_count(d, e, mid) > j)
                b = mid;
            else
                a = mid;
        }
        eigenvalues[j] = 0.5 * (a + b);
    }

    for (int j = 0; j < k; ++j) {
        std::uint64_t rng = 0x5deece66dull + static_cast<std::uint64_t>(j);
        std::vector<double> v(m);
        for (int i = 0; i < m; ++i) v[i] = detail::splitmix_unit(rng) - 0.5;
        for (int round = 0; round < 4; ++round) {
            v = detail::solve_shifted_tridiagonal(d, e, eigenvalues[j], std::move(v));
            double nv = 0.0;
            for (double x : v) nv += x * x;
            nv = std::sqrt(nv);
            if (!(nv > 0.0)) throw numeric_error("solve_eigen: inverse iteration collapsed");
            for (double& x : v) x /= nv;
        }
        // guard against degenerate clusters: project out earlier vectors
        for (int jj = 0; jj < j; ++jj) {
            if (std::abs(eigenvalues[jj] - eigenvalues[j]) > 1e-10 * span) continue;
            double dot = 0.0;
            for (int i = 0; i < m; ++i) dot += sol.states[jj].values[i + 1].real() * v[i];
            dot *= sol.states[jj].dq();
            for (int i = 0; i < m; ++i) v[i] -= dot * sol.states[jj].values[i + 1].real();
        }
        int imax = 0;
        for (int i = 1; i < m; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0)
            for (double& x : v) x = -x;

        Wavefunction1D psi;
        psi.hbar = H.hbar;
        psi.q.resize(n);
        psi.values.assign(n, Complex(0.0, 0.0));
        for (int i = 0; i < n; ++i) psi.q[i] = q_min + i * dq;
        for (int i = 0; i < m; ++i) psi.values[i + 1] = Complex(v[i], 0.0);
        psi.normalize();
        sol.energies.push_back(eigenvalues[j]);
        sol.states.push_back(std::move(psi));
    }
    return sol;
}

/// Exact harmonic-oscillator eigenstate (continuum normalization) sampled
/// on the given grid; V = m omega^2 q^2 / 2.
inline Wavefunction1D analytic_ho_state(int level, const std::vector<double>& q_grid,
                                        double hbar = 1.0, double mass = 1.0,
                                        double omega = 1.0) {
    if (level < 0) throw precondition_error("analytic_ho_state: level >= 0");
    Wavefunction1D psi;
    psi.hbar = hbar;
    psi.q = q_grid;
    psi.values.resize(q_grid.size());
    const double a = mass * omega / hbar;
    double log_norm = 0.25 * std::log(a / 3.14159265358979323846);
    for (int j = 1; j <= level; ++j) log_norm -= 0.5 * std::log(2.0 * j);
    const double norm = std::exp(log_norm);
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        const double x = std::sqrt(a) * q_grid[i];
        double h0 = 1.0, h1 = 2.0 * x;
        double h = (level == 0) ? h0 : h1;
        for (int j = 2; j <= level; ++j) {
            const double h2 = 2.0 * x * h1 - 2.0 * (j - 1) * h0;
            h0 = h1;
            h1 = h2;
            h = h2;
        }
        psi.values[i] = Complex(norm * h * std::exp(-0.5 * x * x), 0.0);
    }
    return psi;
}

struct WkbResult {
    Wavefunction1D psi;  // R exp(iS/hbar) in the allowed region, 0 outside
    double q_left = 0.0; // edges of the classically allowed interval used
    double q_right = 0.0;
};

/// Semiclassical wavefunction R exp(iS/hbar) with S(q) = int_{qL}^q p dq',
/// p = sqrt(2m(E-V)), and the one-turning-point amplitude R = p^{-1/2}
/// (written as (2m(E-V))^{-1/4}). Values at and beyond the turning points
/// are masked to zero; the divergence there is the method's, not a bug.
inline WkbResult wkb_wavefunction(const HamiltonianSpec& H, double E,
                                  const std::vector<double>& q_grid) {
    if (q_grid.size() < 2) throw precondition_error("wkb_wavefunction: grid too small");
    const int n = static_cast<int>(q_grid.size());

    int i_best = -1;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ke = E - H.V(q_grid[i]);
        if (ke > best) {
            best = ke;
            i_best = i;
        }
    }
    if (i_best < 0) throw numeric_error("wkb_wavefunction: no classically allowed region on the grid");

    int i0 = i_best, i1 = i_best;
    while (i0 > 0 && E - H.V(q_grid[i0 - 1]) > 0.0) --i0;
    while (i1 + 1 < n && E - H.V(q_grid[i1 + 1]) > 0.0) ++i1;

    auto bisect_turn = [&](double allowed, double forbidden) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (allowed + forbidden);
            (E - H.V(mid) > 0.0 ? allowed : forbidden) = mid;
        }
        return 0.5 * (allowed + forbidden);
    };
    const double qL = (i0 > 0) ? bisect_turn(q_grid[i0], q_grid[i0 - 1]) : q_grid.front();
    const double qR = (i1 + 1 < n) ? bisect_turn(q_grid[i1], q_grid[i1 + 1]) : q_grid.back();

    auto momentum = [&](double q) { return std::sqrt(std::max(2.0 * H.mass * (E - H.V(q)), 0.0)); };
    auto simpson_cell = [&](double a, double b) {
        return (b - a) / 6.0 * (momentum(a) + 4.0 * momentum(0.5 * (a + b)) + momentum(b));
    };

    WkbResult out;
    out.q_left = qL;
    out.q_right = qR;
    out.psi.hbar = H.hbar;
    out.psi.q = q_grid;
    out.psi.values.assign(q_grid.size(), Complex(0.0, 0.0));

    double action = simpson_cell(qL, q_grid[i0]);
    for (int i = i0; i <= i1; ++i) {
        if (i > i0) action += simpson_cell(q_grid[i - 1], q_grid[i]);
        const double ke2m = 2.0 * H.mass * (E - H.V(q_grid[i]));
        if (ke2m <= 0.0) continue; // exact turning point on a node stays masked
        const double amplitude = std::pow(ke2m, -0.25);
        out.psi.values[i] = amplitude * std::exp(Complex(0.0, action / H.hbar));
    }
    return out;
}

/// Semiclassical count of bound states with energy <= E: the enclosed orbit
/// area in units of 2*pi*hbar, shifted by the half-integer Maslov offset and
/// counted inclusively at the boundary.
inline int bohr_sommerfeld_count(const HamiltonianSpec& H, double E) {
    const double area = closed_orbit_area(H, E);
    const double x = area / (2.0 * 3.14159265358979323846 * H.hbar) - 0.5;
    const int count = static_cast<int>(std::floor(x + 1e-9)) + 1;
    return std::max(count, 0);
}

struct WkbComparison {
    double max_rel_interval_error = 0.0;
    int intervals = 0;
};

/// Compare the WKB probability density against a numerically computed bound
/// state, averaging over oscillations: both densities are integrated over
/// the intervals between consecutive nodes of the numeric state (restricted
/// to the interior fraction of the allowed region), normalized to unit total
/// mass, and compared interval by interval.
inline WkbComparison compare_wkb_envelope(const HamiltonianSpec& H,
                                          const Wavefunction1D& numeric_state, double E,
                                          double interior_fraction = 0.6) {
    const auto [qL, qR] = turning_points(H, E);
    const double c = 0.5 * (qL + qR), halfw = 0.5 * (qR - qL);
    const double lo = c - interior_fraction * halfw, hi = c + interior_fraction * halfw;

    const std::vector<double>& q = numeric_state.q;
    std::vector<double> zeros;
    for (std::size_t i = 0; i + 1 < q.size(); ++i) {
        const double a = numeric_state.values[i].real();
        const double b = numeric_state.values[i + 1].real();
        if (a == 0.0 || a * b >= 0.0) continue;
        const double z = q[i] - a * (q[i + 1] - q[i]) / (b - a);
        if (z >= lo && z <= hi) zeros.push_back(z);
    }
    if (zeros.size() < 2)
        throw numeric_error("compare_wkb_envelope: too few nodes inside the comparison window");

    auto density_numeric = [&](double x) {
        // linear interpolation of |psi|^2 between grid nodes
        const double dq = numeric_state.dq();
        const double t = (x - q.front()) / dq;
        const int i = std::min(static_cast<int>(std::floor(t)), static_cast<int>(q.size()) - 2);
        const double u = t - i;
        const double f0 = std::norm(numeric_state.values[i]);
        const double f1 = std::norm(numeric_state.values[i + 1]);
        return (1.0 - u) * f0 + u * f1;
    };
    auto density_wkb = [&](double x) {
        return 1.0 / std::sqrt(2.0 * H.mass * std::max(E - H.V(x), 1e-300));
    };
    auto integrate = [](auto&& f, double a, double b) {
        const int steps = 256;
        double s = 0.5 * (f(a) + f(b));
        for (int i = 1; i < steps; ++i) s += f(a + (b - a) * i / steps);
        return s * (b - a) / steps;
    };

    std::vector<double> mass_n, mass_w;
    for (std::size_t i = 0; i + 1 < zeros.size(); ++i) {
        mass_n.push_back(integrate(density_numeric, zeros[i], zeros[i + 1]));
        mass_w.push_back(integrate(density_wkb, zeros[i], zeros[i + 1]));
    }
    double sn = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < mass_n.size(); ++i) {
        sn += mass_n[i];
        sw += mass_w[i];
    }
    WkbComparison cmp;
    cmp.intervals = static_cast<int>(mass_n.size());
    for (std::size_t i = 0; i < mass_n.size(); ++i) {
        const double rel = std::abs(mass_n[i] / sn - mass_w[i] / sw) / (mass_w[i] / sw);
        cmp.max_rel_interval_error = std::max(cmp.max_rel_interval_error, rel);
    }
    return cmp;
}

} // namespace pg

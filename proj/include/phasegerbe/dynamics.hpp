#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "phasegerbe/errors.hpp"
#include "phasegerbe/geometry.hpp"

namespace pg {

/// Separable Hamiltonian H = p^2/2m + V(q) with polynomial V of degree <= 4.
struct HamiltonianSpec {
    double mass = 1.0;
    std::vector<double> potential; // potential[k] multiplies q^k
    double hbar = 1.0;

    HamiltonianSpec(double m, std::vector<double> v, double h = 1.0)
        : mass(m), potential(std::move(v)), hbar(h) {
        if (!(mass > 0.0)) throw precondition_error("HamiltonianSpec: require mass > 0");
        if (!(hbar > 0.0)) throw precondition_error("HamiltonianSpec: require hbar > 0");
        if (potential.size() > 5)
            throw precondition_error("HamiltonianSpec: potential degree must be <= 4");
        for (double c : potential)
            if (!std::isfinite(c)) throw precondition_error("HamiltonianSpec: non-finite coefficient");
    }

    double V(double q) const {
        double acc = 0.0;
        for (std::size_t k = potential.size(); k-- > 0;) acc = acc * q + potential[k];
        return acc;
    }

    double dV(double q) const {
        double acc = 0.0;
        for (std::size_t k = potential.size(); k-- > 1;) acc = acc * q + k * potential[k];
        return acc;
    }

    double energy(double q, double p) const { return p * p / (2.0 * mass) + V(q); }

    /// True when V is bounded below with V -> +inf on both sides.
    bool confining() const {
        int deg = static_cast<int>(potential.size()) - 1;
        while (deg > 0 && potential[deg] == 0.0) --deg;
        if (deg <= 0) return false;
        return deg % 2 == 0 && potential[deg] > 0.0;
    }
};

/// Time-stamped phase-space path at fixed energy.
struct Trajectory {
    std::vector<double> times;
    std::vector<Point2> points;
    double energy = 0.0;
    double max_energy_drift = 0.0;

    double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
};

struct FlowOptions {
    double drift_tolerance = 1e-6;
    std::size_t max_steps = 20'000'000;
};

namespace detail {

// One kick-drift-kick step of size tau from (q, p).
inline Point2 leapfrog_step(const HamiltonianSpec& H, Point2 x, double tau) {
    const double p_half = x.p - 0.5 * tau * H.dV(x.q);
    const double q_new = x.q + tau * p_half / H.mass;
    return Point2{q_new, p_half - 0.5 * tau * H.dV(q_new)};
}

inline void check_drift(const HamiltonianSpec& H, Trajectory& traj, double tol) {
    double drift = 0.0;
    for (const Point2& x : traj.points)
        drift = std::max(drift, std::abs(H.energy(x.q, x.p) - traj.energy));
    traj.max_energy_drift = drift;
    if (drift > tol)
        throw numeric_error("energy drift " + std::to_string(drift) + " exceeds tolerance " +
                            std::to_string(tol) + "; reduce the time step");
}

} // namespace detail

/// Stoermer-Verlet (leapfrog) flow of qdot = p/m, pdot = -V'(q). The
/// integrator is symplectic and time-reversible; energy drift against the
/// initial energy is checked a posteriori against the configured tolerance.
inline Trajectory hamilton_flow(const HamiltonianSpec& H, Point2 start, double duration,
                                double dt, const FlowOptions& opts = {}) {
    if (!(dt > 0.0)) throw precondition_error("hamilton_flow: require dt > 0");
    if (duration < 0.0) throw precondition_error("hamilton_flow: require duration >= 0");

    Trajectory traj;
    traj.energy = H.energy(start.q, start.p);
    if (duration == 0.0) {
        traj.times = {0.0, 0.0};
        traj.points = {start, start};
        return traj;
    }
    const double est = duration / dt;
    if (est > static_cast<double>(opts.max_steps))
        throw precondition_error("hamilton_flow: step count " + std::to_string(est) +
                                 " exceeds maximum " + std::to_string(opts.max_steps));

    traj.times.reserve(static_cast<std::size_t>(est) + 2);
    traj.points.reserve(static_cast<std::size_t>(est) + 2);
    traj.times.push_back(0.0);
    traj.points.push_back(start);

    Point2 x = start;
    double t = 0.0;
    while (t + dt <= duration * (1.0 + 1e-15)) {
        x = detail::leapfrog_step(H, x, dt);
        t += dt;
        traj.times.push_back(t);
        traj.points.push_back(x);
    }
    const double rem = duration - t;
    if (rem > 1e-12 * dt) {
        x = detail::leapfrog_step(H, x, rem);
        traj.times.push_back(duration);
        traj.points.push_back(x);
    } else {
        traj.times.back() = duration;
    }
    detail::check_drift(H, traj, opts.drift_tolerance);
    return traj;
}

struct ShootOptions {
    double dt = 2e-5;
    double arrival_tolerance = 1e-8;
    double drift_tolerance = 1e-6;
    std::size_t max_steps = 50'000'000;
};

/// Constant-energy leg from q_a to q_b: the launch momentum magnitude is
/// fixed by E, its sign points toward the target, and the arrival time is
/// refined by bisecting the final integrator step until |q - q_b| meets the
/// arrival tolerance. Fails when the target is classically forbidden or no
/// crossing happens within max_time.
inline Trajectory shoot_leg(const HamiltonianSpec& H, double q_a, double q_b, double E,
                            double max_time, const ShootOptions& opts = {}) {
    const double ke_a = E - H.V(q_a);
    if (ke_a < 0.0)
        throw numeric_error("shoot_leg: E below V at the launch point");
    if (E < H.V(q_b))
        throw numeric_error("shoot_leg: target q_b is classically forbidden at energy E");

    Trajectory traj;
    traj.energy = E;
    if (q_a == q_b) {
        traj.times = {0.0, 0.0};
        traj.points = {Point2{q_a, 0.0}, Point2{q_a, 0.0}};
        return traj;
    }

    const double dir = (q_b > q_a) ? 1.0 : -1.0;
    Point2 x{q_a, dir * std::sqrt(2.0 * H.mass * ke_a)};
    if (x.p == 0.0 && H.dV(q_a) * dir >= 0.0)
        throw numeric_error("shoot_leg: zero launch momentum and no force toward the target");

    traj.times.push_back(0.0);
    traj.points.push_back(x);
    double t = 0.0;
    std::size_t steps = 0;
    while (true) {
        if (t >= max_time)
            throw numeric_error("shoot_leg: no arrival within max_time (endpoints disconnected at E)");
        if (++steps > opts.max_steps)
            throw numeric_error("shoot_leg: step limit exceeded");
        const Point2 next = detail::leapfrog_step(H, x, opts.dt);
        if ((x.q - q_b) * (next.q - q_b) <= 0.0) {
            // crossing inside this step: bisect the partial step length
            double lo = 0.0, hi = opts.dt;
            Point2 hit = next;
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const Point2 y = detail::leapfrog_step(H, x, mid);
                if ((x.q - q_b) * (y.q - q_b) <= 0.0)
                    hi = mid;
                else
                    lo = mid;
                hit = detail::leapfrog_step(H, x, hi);
                if (std::abs(hit.q - q_b) <= opts.arrival_tolerance) break;
            }
            if (std::abs(hit.q - q_b) > opts.arrival_tolerance)
                throw numeric_error("shoot_leg: arrival refinement failed");
            t += hi;
            traj.times.push_back(t);
            traj.points.push_back(hit);
            break;
        }
        x = next;
        t += opts.dt;
        traj.times.push_back(t);
        traj.points.push_back(x);
    }
    detail::check_drift(H, traj, opts.drift_tolerance);
    return traj;
}

/// S = -int(lambda) = int p dq - E*T along the stored samples (trapezoid in
/// q, exact in the H dt term since H is constant on the trajectory). Equals
/// the Lagrangian action int L dt.
inline double action_along(const HamiltonianSpec&, const Trajectory& traj) {
    if (traj.points.size() < 2 || traj.points.size() != traj.times.size())
        throw precondition_error("action_along: malformed trajectory");
    double pdq = 0.0;
    for (std::size_t k = 1; k < traj.points.size(); ++k)
        pdq += 0.5 * (traj.points[k - 1].p + traj.points[k].p) *
               (traj.points[k].q - traj.points[k - 1].q);
    return pdq - traj.energy * traj.duration();
}

namespace detail {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

} // namespace detail

/// Location of the global minimum of V (the well everything else refers to).
inline double potential_minimum(const HamiltonianSpec& H) {
    double best_q = 0.0, best_v = H.V(0.0);
    for (double r = 1.0; r <= 1048576.0; r *= 2.0) {
        const int n = 8192;
        for (int i = 0; i <= n; ++i) {
            const double q = -r + 2.0 * r * i / n;
            const double v = H.V(q);
            if (v < best_v) {
                best_v = v;
                best_q = q;
            }
        }
        if (H.V(-r) > best_v && H.V(r) > best_v) break;
    }
    // refine on the stationarity equation dV = 0 when the minimum brackets
    double lo = best_q - 1e-3 * (1.0 + std::abs(best_q));
    double hi = best_q + 1e-3 * (1.0 + std::abs(best_q));
    if (H.dV(lo) < 0.0 && H.dV(hi) > 0.0) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (H.dV(mid) < 0.0 ? lo : hi) = mid;
        }
        best_q = 0.5 * (lo + hi);
    }
    return best_q;
}

/// Left and right roots of V(q) = E around the potential well, each located
/// by bisection to the requested tolerance in q.
inline std::pair<double, double> turning_points(const HamiltonianSpec& H, double E,
                                                double tol = 1e-10) {
    const double q0 = potential_minimum(H);
    const double scale = std::max({1.0, std::abs(E), std::abs(H.V(q0))});
    if (E < H.V(q0) - 1e-12 * scale)
        throw numeric_error("turning_points: E below the potential minimum");

    auto march = [&](double dir) -> double {
        double prev = q0;
        double step = 1e-3 * (1.0 + std::abs(q0));
        double x = q0 + dir * step;
        while (std::abs(x) < 1e7) {
            if (H.V(x) >= E) {
                double lo = prev, hi = x; // V(lo) < E <= V(hi)
                while (std::abs(hi - lo) > tol) {
                    const double mid = 0.5 * (lo + hi);
                    (H.V(mid) < E ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
            prev = x;
            step *= 1.25;
            x += dir * step;
        }
        throw numeric_error("turning_points: motion unbounded at this energy");
    };
    return {march(-1.0), march(+1.0)};
}

struct OrbitAreaOptions {
    double turning_tolerance = 1e-10;
    double quadrature_tolerance = 1e-10;
};

/// Enclosed orbit area oint p dq = 2 int sqrt(2m(E-V)) dq between the
/// turning points. The substitution q = mid + half*sin(u) removes the
/// square-root endpoint singularities before adaptive Simpson quadrature.
inline double closed_orbit_area(const HamiltonianSpec& H, double E,
                                const OrbitAreaOptions& opts = {}) {
    const double q0 = potential_minimum(H);
    const double v_min = H.V(q0);
    const double scale = std::max({1.0, std::abs(E), std::abs(v_min)});
    if (E < v_min - 1e-10 * scale)
        throw numeric_error("closed_orbit_area: E below the potential minimum");
    if (E - v_min <= 1e-14 * scale) return 0.0;

    const auto [qL, qR] = turning_points(H, E, opts.turning_tolerance);
    const double mid = 0.5 * (qL + qR);
    const double half = 0.5 * (qR - qL);
    auto integrand = [&](double u) {
        const double q = mid + half * std::sin(u);
        const double ke = std::max(E - H.V(q), 0.0);
        return 2.0 * std::sqrt(2.0 * H.mass * ke) * half * std::cos(u);
    };
    const double pi = 3.14159265358979323846;
    return detail::integrate_adaptive(integrand, -pi / 2.0, pi / 2.0,
                                      opts.quadrature_tolerance);
}

/// Fixed-time restriction of lambda = theta + H dt. On a time slice the
/// H dt term drops, so the sampled form equals theta; the Hamiltonian rides
/// along so trajectory integrals (action_along) can restore the H dt part.
struct PoincareCartanForm {
    OneForm restriction;
    HamiltonianSpec hamiltonian;
};

inline PoincareCartanForm poincare_cartan(const Grid2D& grid, const HamiltonianSpec& H) {
    return PoincareCartanForm{canonical_one_form(grid), H};
}

} // namespace pg

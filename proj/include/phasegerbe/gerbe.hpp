#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "phasegerbe/cover.hpp"
#include "phasegerbe/dynamics.hpp"
#include "phasegerbe/errors.hpp"
#include "phasegerbe/geometry.hpp"

namespace pg {

/// Gerbe potential 1-form A = -(i/hbar) lambda on the fixed-time slice:
/// lambda reduces to theta = -p dq there, so A = (i/hbar) p dq.
inline OneForm gerbe_connection_A(const Grid2D& grid, const HamiltonianSpec& H) {
    const double hbar = grid.domain().hbar;
    if (std::abs(H.hbar - hbar) > 1e-12 * hbar)
        throw precondition_error("gerbe_connection_A: Hamiltonian hbar disagrees with domain");
    ScalarField2D cq = ScalarField2D::sample(
        grid, [hbar](double, double p) { return Complex(0.0, p / hbar); });
    return OneForm(std::move(cq), ScalarField2D(grid));
}

enum class LoopMode { polygon, trajectory };

/// Closed loop through three marked points. Polygon mode is the straight
/// triangle v1 -> v2 -> v3 -> v1; trajectory mode threads six constant-energy
/// legs through the midpoint, v1 -> m -> v2 -> m -> v3 -> m -> v1.
struct Loop {
    LoopMode mode = LoopMode::polygon;
    std::array<Point2, 3> vertices{};
    Point2 midpoint{};
    std::vector<std::vector<Point2>> leg_paths;
    std::vector<double> leg_actions; // trajectory mode: action of each leg
    std::vector<Trajectory> trajectory_legs;
    double energy = 0.0;

    Point2 start() const { return leg_paths.front().front(); }
    Point2 end() const { return leg_paths.back().back(); }
};

namespace detail {

inline void check_loop_closed(const Loop& loop) {
    const Point2 a = loop.start();
    const Point2 b = loop.end();
    if (std::abs(a.q - b.q) > 1e-10 || std::abs(a.p - b.p) > 1e-10)
        throw precondition_error("loop is not closed");
    for (std::size_t k = 1; k < loop.leg_paths.size(); ++k) {
        const Point2& u = loop.leg_paths[k - 1].back();
        const Point2& v = loop.leg_paths[k].front();
        if (std::abs(u.q - v.q) > 1e-10 || std::abs(u.p - v.p) > 1e-10)
            throw precondition_error("loop legs do not connect");
    }
}

} // namespace detail

inline Loop build_loop(const PhaseSpaceDomain& domain, Point2 v1, Point2 v2, Point2 v3,
                       Point2 midpoint, LoopMode mode,
                       const std::optional<HamiltonianSpec>& H = std::nullopt, double E = 0.0,
                       const ShootOptions& shoot = {}) {
    for (const Point2& x : {v1, v2, v3, midpoint})
        if (!domain.contains(x.q, x.p))
            throw precondition_error("build_loop: point outside domain");

    Loop loop;
    loop.mode = mode;
    loop.vertices = {v1, v2, v3};
    loop.midpoint = midpoint;

    if (mode == LoopMode::polygon) {
        loop.leg_paths = {{v1, v2}, {v2, v3}, {v3, v1}};
        detail::check_loop_closed(loop);
        return loop;
    }

    if (!H) throw precondition_error("build_loop: trajectory mode needs a Hamiltonian and energy");
    loop.energy = E;
    const std::array<std::pair<Point2, Point2>, 6> hops = {
        std::make_pair(v1, midpoint), std::make_pair(midpoint, v2),
        std::make_pair(v2, midpoint), std::make_pair(midpoint, v3),
        std::make_pair(v3, midpoint), std::make_pair(midpoint, v1)};
    const double max_time = 1e3;
    for (const auto& [a, b] : hops) {
        Trajectory leg = shoot_leg(*H, a.q, b.q, E, max_time, shoot);
        loop.leg_actions.push_back(action_along(*H, leg));
        loop.leg_paths.push_back(leg.points);
        loop.trajectory_legs.push_back(std::move(leg));
    }
    // trajectory legs agree in q by the arrival tolerance but carry their own
    // p samples; closure in q is what the construction promises
    const Point2 a = loop.leg_paths.front().front();
    const Point2 b = loop.leg_paths.back().back();
    if (std::abs(a.q - b.q) > 10.0 * shoot.arrival_tolerance)
        throw numeric_error("build_loop: trajectory loop failed to close in q");
    return loop;
}

/// U(1) 2-cocycle value g = exp(i*phase), |g| = 1.
struct CocycleValue {
    Complex g;
    double phase = 0.0; // -(1/hbar) * enclosed symplectic area (polygon mode)
};

/// Polygon mode: phase = -(1/hbar) * signed shoelace area of the triangle
/// (the integral of omega over the flat spanning surface). Trajectory mode:
/// phase = -(1/hbar) * oint lambda over the shot legs, i.e. (1/hbar) times
/// the summed leg actions.
inline CocycleValue cocycle(const Loop& loop, double hbar) {
    if (!(hbar > 0.0)) throw precondition_error("cocycle: hbar > 0");
    if (loop.mode == LoopMode::polygon) {
        detail::check_loop_closed(loop);
        const double area = signed_polygon_area(
            {loop.vertices[0], loop.vertices[1], loop.vertices[2]});
        const double phase = -area / hbar;
        return CocycleValue{std::exp(Complex(0.0, phase)), phase};
    }
    if (loop.leg_actions.size() != 6)
        throw precondition_error("cocycle: trajectory loop is missing legs");
    double total = 0.0;
    for (double s : loop.leg_actions) total += s;
    const double phase = total / hbar;
    return CocycleValue{std::exp(Complex(0.0, phase)), phase};
}

struct CocycleCheck {
    double max_deviation = 0.0; // max |delta g - 1| over quadruple overlaps
    int quadruples = 0;
};

/// Cech 2-cocycle condition: for every quadruple overlap, the alternating
/// product g_234 g_134^{-1} g_124 g_123^{-1} must be 1. Patch representative
/// points come from the deterministic sampling rule, so reruns reproduce the
/// same table.
inline CocycleCheck verify_cocycle_condition(const CechCover& cover, PointRule rule,
                                             std::uint64_t seed, double hbar) {
    const OverlapIndex quads = enumerate_overlaps(cover, 4);
    if (quads.entries.empty())
        throw precondition_error("verify_cocycle_condition: cover has no quadruple overlaps");

    std::vector<Point2> rep(cover.patches.size());
    for (std::size_t i = 0; i < cover.patches.size(); ++i)
        rep[i] = sample_point(cover.patches[i].bounds,
                              detail::splitmix64(seed ^ (0x9e3779b97f4a7c15ull * (i + 1))), rule);

    auto g_of = [&](int a, int b, int c) {
        const double area = signed_polygon_area({rep[a], rep[b], rep[c]});
        return std::exp(Complex(0.0, -area / hbar));
    };

    CocycleCheck out;
    out.quadruples = static_cast<int>(quads.entries.size());
    for (const Overlap& o : quads.entries) {
        const int a = o.indices[0], b = o.indices[1], c = o.indices[2], d = o.indices[3];
        const Complex prod = g_of(b, c, d) * std::conj(g_of(a, c, d)) * g_of(a, b, d) *
                             std::conj(g_of(a, b, c));
        out.max_deviation = std::max(out.max_deviation, std::abs(prod - 1.0));
    }
    return out;
}

/// Patchwise constant coefficients b_alpha of the 2-form B (per dq^dp).
struct BField {
    std::vector<Complex> coefficients;
    double hbar = 1.0;
};

struct BFieldResult {
    BField field;
    /// max over all pairwise overlaps (u < v) of |(b_v - b_u) - (-i/hbar)|;
    /// nonzero residuals expose the orientation path-dependence of the
    /// transition rule on cycles in the overlap graph.
    double max_transition_residual = 0.0;
};

/// Assign b on a spanning tree of the overlap graph from the rule
/// b_{a2} - b_{a1} = -i/hbar on each overlap (a1 < a2), rooted at patch 0,
/// then report the worst violation over all overlaps including non-tree
/// edges.
inline BFieldResult b_field_transitions(const CechCover& cover, double hbar) {
    if (!(hbar > 0.0)) throw precondition_error("b_field_transitions: hbar > 0");
    const std::size_t n = cover.patches.size();
    if (n == 0) throw precondition_error("b_field_transitions: empty cover");

    const OverlapIndex pairs = enumerate_overlaps(cover, 2);
    std::vector<std::vector<int>> adj(n);
    for (const Overlap& o : pairs.entries) {
        adj[o.indices[0]].push_back(o.indices[1]);
        adj[o.indices[1]].push_back(o.indices[0]);
    }

    const Complex step(0.0, -1.0 / hbar); // b_larger - b_smaller
    BFieldResult out;
    out.field.hbar = hbar;
    out.field.coefficients.assign(n, Complex(0.0, 0.0));
    std::vector<char> visited(n, 0);
    std::queue<int> bfs;
    bfs.push(0);
    visited[0] = 1;
    std::size_t seen = 1;
    while (!bfs.empty()) {
        const int u = bfs.front();
        bfs.pop();
        for (int v : adj[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            ++seen;
            out.field.coefficients[v] = (v > u) ? out.field.coefficients[u] + step
                                                : out.field.coefficients[u] - step;
            bfs.push(v);
        }
    }
    if (seen != n) throw precondition_error("b_field_transitions: overlap graph is disconnected");

    for (const Overlap& o : pairs.entries) {
        const Complex diff = out.field.coefficients[o.indices[1]] -
                             out.field.coefficients[o.indices[0]];
        out.max_transition_residual = std::max(out.max_transition_residual,
                                               std::abs(diff - step));
    }
    return out;
}

struct ThreeFormCertificate {
    bool identically_zero = false;
    int independent_components = -1;
    std::string note;
};

/// H = dB. In two phase-space dimensions a 3-form has C(2,3) = 0
/// independent components, so H vanishes identically whatever B is;
/// the certificate records that count rather than a numerical zero.
inline ThreeFormCertificate three_form_H(const BField&) {
    const int dim = 2;
    int comps = 1; // C(dim, 3)
    for (int i = 0; i < 3; ++i) comps = comps * (dim - i) / (i + 1);
    ThreeFormCertificate cert;
    cert.independent_components = std::max(comps, 0);
    cert.identically_zero = cert.independent_components == 0;
    cert.note = "H = dB has no independent components: dim P = 2";
    return cert;
}

} // namespace pg

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "phasegerbe/errors.hpp"
#include "phasegerbe/geometry.hpp"

namespace pg {

/// Axis-aligned open rectangle.
struct Rect {
    double q_lo = 0.0, q_hi = 0.0;
    double p_lo = 0.0, p_hi = 0.0;

    bool nonempty() const { return q_lo < q_hi && p_lo < p_hi; }
    double q_width() const { return q_hi - q_lo; }
    double p_width() const { return p_hi - p_lo; }
    bool contains(const Point2& x) const {
        return x.q > q_lo && x.q < q_hi && x.p > p_lo && x.p < p_hi;
    }
    bool contains_rect(const Rect& r) const {
        return r.q_lo >= q_lo && r.q_hi <= q_hi && r.p_lo >= p_lo && r.p_hi <= p_hi;
    }
};

inline Rect intersect(const Rect& a, const Rect& b) {
    return Rect{std::max(a.q_lo, b.q_lo), std::min(a.q_hi, b.q_hi),
                std::max(a.p_lo, b.p_lo), std::min(a.p_hi, b.p_hi)};
}

struct Patch {
    int index = 0;
    Rect bounds;
};

/// Overlapping rectangular cover of the phase-space domain.
struct CechCover {
    PhaseSpaceDomain domain;
    std::vector<Patch> patches;
    double overlap_fraction = 0.0;
};

/// nx x ny tiling, each cell enlarged by overlap_fraction of its width on
/// every side (clipped to the domain) so that neighbors share a strip of
/// width 2*overlap_fraction*cell_width.
inline CechCover build_cover(const PhaseSpaceDomain& domain, int nx, int ny,
                             double overlap_fraction) {
    if (nx < 1 || ny < 1) throw precondition_error("build_cover: require nx, ny >= 1");
    if (!(overlap_fraction > 0.0) || !(overlap_fraction < 0.5))
        throw precondition_error("build_cover: require 0 < overlap_fraction < 0.5");

    CechCover cover{domain, {}, overlap_fraction};
    const double wq = domain.q_span() / nx;
    const double wp = domain.p_span() / ny;
    const double dq = overlap_fraction * wq;
    const double dp = overlap_fraction * wp;
    int idx = 0;
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            Rect r;
            r.q_lo = std::max(domain.q_min, domain.q_min + ix * wq - dq);
            r.q_hi = std::min(domain.q_max, domain.q_min + (ix + 1) * wq + dq);
            r.p_lo = std::max(domain.p_min, domain.p_min + iy * wp - dp);
            r.p_hi = std::min(domain.p_max, domain.p_min + (iy + 1) * wp + dp);
            cover.patches.push_back(Patch{idx++, r});
        }
    return cover;
}

struct Overlap {
    std::vector<int> indices; // ascending patch indices
    Rect rect;                // common open intersection
};

struct OverlapIndex {
    int arity = 2;
    std::vector<Overlap> entries;
};

/// All ascending index tuples of the given arity whose patches share a
/// nonempty open intersection. Tuples are extended depth-first with a
/// running intersection, so dead branches prune early.
inline OverlapIndex enumerate_overlaps(const CechCover& cover, int arity) {
    if (arity < 2 || arity > 4) throw precondition_error("enumerate_overlaps: arity must be 2, 3 or 4");
    OverlapIndex out{arity, {}};
    const int n = static_cast<int>(cover.patches.size());
    std::vector<int> tuple;

    auto extend = [&](auto&& self, int next, const Rect& current) -> void {
        if (static_cast<int>(tuple.size()) == arity) {
            out.entries.push_back(Overlap{tuple, current});
            return;
        }
        for (int i = next; i < n; ++i) {
            const Rect r = intersect(current, cover.patches[i].bounds);
            if (!r.nonempty()) continue;
            tuple.push_back(cover.patches[i].index);
            self(self, i + 1, r);
            tuple.pop_back();
        }
    };

    for (int i = 0; i < n; ++i) {
        tuple.push_back(cover.patches[i].index);
        extend(extend, i + 1, cover.patches[i].bounds);
        tuple.pop_back();
    }
    return out;
}

enum class PointRule { seeded, center };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform double strictly inside (0, 1): (k + 1/2) / 2^53.
inline double unit_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

/// Deterministic point strictly inside the rectangle. The seeded rule is a
/// counter-free hash of the seed, so equal seeds give equal points on any
/// platform; the center rule ignores the seed.
inline Point2 sample_point(const Rect& rect, std::uint64_t seed,
                           PointRule rule = PointRule::seeded) {
    if (!rect.nonempty()) throw precondition_error("sample_point: empty rectangle");
    if (rule == PointRule::center)
        return Point2{0.5 * (rect.q_lo + rect.q_hi), 0.5 * (rect.p_lo + rect.p_hi)};
    const std::uint64_t a = detail::splitmix64(seed);
    const std::uint64_t b = detail::splitmix64(a ^ 0xd1b54a32d192ed03ull);
    Point2 x{rect.q_lo + detail::unit_open(a) * rect.q_width(),
             rect.p_lo + detail::unit_open(b) * rect.p_width()};
    if (!rect.contains(x)) // guard the open-interval contract against round-off
        x = Point2{0.5 * (rect.q_lo + rect.q_hi), 0.5 * (rect.p_lo + rect.p_hi)};
    return x;
}

} // namespace pg

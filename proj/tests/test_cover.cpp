#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "phasegerbe/cover.hpp"

using namespace pg;
using Catch::Approx;

namespace {

const PhaseSpaceDomain kUnit(0.0, 1.0, 0.0, 1.0);

// naive oracle: test every index subset of the requested size
std::vector<std::vector<int>> brute_force_overlaps(const CechCover& cover, int arity) {
    std::vector<std::vector<int>> out;
    const int n = static_cast<int>(cover.patches.size());
    std::vector<int> idx(arity);
    auto rec = [&](auto&& self, int depth, int start) -> void {
        if (depth == arity) {
            Rect r = cover.patches[idx[0]].bounds;
            for (int d = 1; d < arity; ++d) r = intersect(r, cover.patches[idx[d]].bounds);
            if (r.nonempty()) out.emplace_back(idx.begin(), idx.end());
            return;
        }
        for (int i = start; i < n; ++i) {
            idx[depth] = i;
            self(self, depth + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    return out;
}

} // namespace

TEST_CASE("parameter validation", "[cover]") {
    REQUIRE_THROWS_AS(build_cover(kUnit, 0, 1, 0.2), precondition_error);
    REQUIRE_THROWS_AS(build_cover(kUnit, 2, 2, 0.0), precondition_error);
    REQUIRE_THROWS_AS(build_cover(kUnit, 2, 2, 0.5), precondition_error);
}

TEST_CASE("single patch equals the domain", "[cover]") {
    const CechCover c = build_cover(kUnit, 1, 1, 0.2);
    REQUIRE(c.patches.size() == 1);
    REQUIRE(c.patches[0].bounds.q_lo == 0.0);
    REQUIRE(c.patches[0].bounds.q_hi == 1.0);
    REQUIRE(enumerate_overlaps(c, 3).entries.empty());
    REQUIRE(enumerate_overlaps(c, 2).entries.empty());
}

TEST_CASE("two patches share the documented strip", "[cover]") {
    const CechCover c = build_cover(kUnit, 2, 1, 0.2);
    REQUIRE(c.patches.size() == 2);
    const Rect overlap = intersect(c.patches[0].bounds, c.patches[1].bounds);
    REQUIRE(overlap.q_width() == Approx(0.2).margin(1e-12));
    REQUIRE(overlap.p_width() == Approx(1.0));
    // cover invariant: the strip is at least overlap_fraction of a patch width
    REQUIRE(overlap.q_width() >=
            c.overlap_fraction * c.patches[0].bounds.q_width() - 1e-12);
}

TEST_CASE("3x3 cover has quadruple corners", "[cover]") {
    const CechCover c = build_cover(kUnit, 3, 3, 0.2);
    const OverlapIndex quads = enumerate_overlaps(c, 4);
    REQUIRE_FALSE(quads.entries.empty());
    // a quadruple's intersection rectangle is an open set: any interior point
    // lies in all four member patches
    const Overlap& o = quads.entries.front();
    const Point2 mid{0.5 * (o.rect.q_lo + o.rect.q_hi), 0.5 * (o.rect.p_lo + o.rect.p_hi)};
    for (int idx : o.indices) REQUIRE(c.patches[idx].bounds.contains(mid));
}

TEST_CASE("2x2 cover with generous overlap: 4 triples, 1 quadruple", "[cover]") {
    const CechCover c = build_cover(kUnit, 2, 2, 0.3);
    REQUIRE(enumerate_overlaps(c, 2).entries.size() == 6);
    REQUIRE(enumerate_overlaps(c, 3).entries.size() == 4);
    REQUIRE(enumerate_overlaps(c, 4).entries.size() == 1);
}

TEST_CASE("enumeration matches brute force and is downward closed", "[cover]") {
    for (const auto& [nx, ny, frac] : {std::tuple{3, 4, 0.2}, {2, 3, 0.35}, {4, 3, 0.1}}) {
        const CechCover c = build_cover(kUnit, nx, ny, frac);
        REQUIRE(c.patches.size() <= 12);
        for (int arity : {2, 3, 4}) {
            const OverlapIndex got = enumerate_overlaps(c, arity);
            const auto expect = brute_force_overlaps(c, arity);
            REQUIRE(got.entries.size() == expect.size());
            for (std::size_t i = 0; i < expect.size(); ++i)
                REQUIRE(got.entries[i].indices == expect[i]);
        }
        // downward closure: every sub-pair/sub-triple of a listed tuple is listed
        std::set<std::vector<int>> pairs, triples;
        for (const Overlap& o : enumerate_overlaps(c, 2).entries) pairs.insert(o.indices);
        for (const Overlap& o : enumerate_overlaps(c, 3).entries) triples.insert(o.indices);
        for (const Overlap& o : enumerate_overlaps(c, 4).entries) {
            const auto& t = o.indices;
            for (int drop = 0; drop < 4; ++drop) {
                std::vector<int> sub;
                for (int d = 0; d < 4; ++d)
                    if (d != drop) sub.push_back(t[d]);
                REQUIRE(triples.count(sub) == 1);
            }
        }
        for (const Overlap& o : enumerate_overlaps(c, 3).entries) {
            const auto& t = o.indices;
            REQUIRE(pairs.count({t[0], t[1]}) == 1);
            REQUIRE(pairs.count({t[0], t[2]}) == 1);
            REQUIRE(pairs.count({t[1], t[2]}) == 1);
        }
        // every triple's rectangle sits inside each member patch
        for (const Overlap& o : enumerate_overlaps(c, 3).entries)
            for (int idx : o.indices) REQUIRE(c.patches[idx].bounds.contains_rect(o.rect));
    }
}

TEST_CASE("coverage: dense probe grid hits at least one patch", "[cover]") {
    const CechCover c = build_cover(kUnit, 4, 5, 0.15);
    for (int a = 0; a <= 100; ++a)
        for (int b = 0; b <= 100; ++b) {
            const double q = a / 100.0, p = b / 100.0;
            bool inside = false;
            for (const Patch& patch : c.patches)
                if (q >= patch.bounds.q_lo && q <= patch.bounds.q_hi &&
                    p >= patch.bounds.p_lo && p <= patch.bounds.p_hi) {
                    inside = true;
                    break;
                }
            REQUIRE(inside);
        }
}

TEST_CASE("sample_point determinism and containment", "[cover]") {
    const Rect r{0.25, 0.75, -1.0, 2.0};
    const Point2 a = sample_point(r, 42);
    const Point2 b = sample_point(r, 42);
    REQUIRE(a.q == b.q);
    REQUIRE(a.p == b.p);
    REQUIRE(sample_point(r, 43).q != a.q);

    const Point2 c = sample_point(r, 7, PointRule::center);
    REQUIRE(c.q == Approx(0.5));
    REQUIRE(c.p == Approx(0.5));
    REQUIRE(sample_point(r, 99, PointRule::center).q == c.q); // seed-independent

    for (std::uint64_t s = 0; s < 1000; ++s) {
        const Point2 x = sample_point(r, s);
        REQUIRE(x.q > r.q_lo);
        REQUIRE(x.q < r.q_hi);
        REQUIRE(x.p > r.p_lo);
        REQUIRE(x.p < r.p_hi);
    }
    REQUIRE_THROWS_AS(sample_point(Rect{1, 1, 0, 1}, 0), precondition_error);
}

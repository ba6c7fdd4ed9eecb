#include <doctest.h>

#include "almac/domain.hpp"
#include "helpers.hpp"

using namespace almac;

TEST_CASE("removal splits ranges and keeps ordering") {
    FiniteDomain d(1, 8);
    CHECK(d.remove(3));
    CHECK(d.count() == 7);
    CHECK_FALSE(d.contains(3));
    CHECK(d.contains(2));
    CHECK(d.contains(4));
    CHECK(d.str() == "{1..2,4..8}");
    CHECK_FALSE(d.remove(3)); // already gone
    CHECK(d.remove(1));
    CHECK(d.remove(8));
    CHECK(d.str() == "{2,4..7}");
}

TEST_CASE("clamping trims whole and partial ranges") {
    FiniteDomain d = FiniteDomain::from_ranges({{1, 3}, {6, 9}});
    CHECK(d.clamp_min(2));
    CHECK(d.str() == "{2..3,6..9}");
    CHECK(d.clamp_min(5));
    CHECK(d.str() == "{6..9}");
    CHECK(d.clamp_max(7));
    CHECK(d.str() == "{6..7}");
    CHECK(d.clamp_max(3));
    CHECK(d.empty());
}

TEST_CASE("intersection against an arbitrary domain") {
    FiniteDomain a = FiniteDomain::from_ranges({{1, 5}, {8, 12}});
    FiniteDomain b = FiniteDomain::from_ranges({{4, 9}, {11, 20}});
    CHECK(a.intersect(b));
    CHECK(a.str() == "{4..5,8..9,11..12}");
    CHECK_FALSE(a.intersect(a));
}

TEST_CASE("assign reduces to a singleton or empties") {
    FiniteDomain d(1, 4);
    CHECK(d.assign(2));
    CHECK(d.is_singleton());
    CHECK(d.single_value() == 2);
    FiniteDomain e(1, 4);
    CHECK(e.assign(9));
    CHECK(e.empty());
}

TEST_CASE("values enumerate ascending and round-trip") {
    FiniteDomain d = FiniteDomain::from_ranges({{-2, 0}, {5, 5}, {7, 8}});
    std::vector<int64_t> vs = d.values();
    CHECK(vs == std::vector<int64_t>{-2, -1, 0, 5, 7, 8});
    CHECK(FiniteDomain::from_sorted_values(vs) == d);
}

TEST_CASE("random removal sequences match a reference set") {
    testutil::Rng rng(42);
    for (int iter = 0; iter < 200; ++iter) {
        FiniteDomain d(0, 20);
        std::vector<bool> ref(21, true);
        for (int step = 0; step < 15; ++step) {
            int64_t v = rng.range(0, 20);
            bool changed = d.remove(v);
            CHECK(changed == ref[static_cast<size_t>(v)]);
            ref[static_cast<size_t>(v)] = false;
        }
        int64_t n = 0;
        for (int64_t v = 0; v <= 20; ++v) {
            CHECK(d.contains(v) == ref[static_cast<size_t>(v)]);
            if (ref[static_cast<size_t>(v)]) ++n;
        }
        CHECK(d.count() == n);
    }
}

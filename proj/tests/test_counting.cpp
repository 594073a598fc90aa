#include <doctest.h>

#include "slowbirkhoff/counting.hpp"
#include "slowbirkhoff/rng.hpp"

using namespace slowbirkhoff;

TEST_CASE("floor_sum matches direct summation") {
    RngStream rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::int64_t n = rng.next_below(60);
        std::int64_t m = 1 + rng.next_below(40);
        std::int64_t a = std::int64_t(rng.next_below(81)) - 40;
        std::int64_t b = std::int64_t(rng.next_below(81)) - 40;
        Int direct = 0;
        for (std::int64_t i = 0; i < n; ++i)
            direct += floor_div(Int(a) * i + b, Int(m));
        CHECK(floor_sum(n, m, a, b) == direct);
    }
}

TEST_CASE("slab2d_below matches brute force") {
    RngStream rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::int64_t w1 = 1 + rng.next_below(14);
        std::int64_t w2 = 1 + rng.next_below(14);
        std::int64_t c1 = std::int64_t(rng.next_below(21)) - 10;
        std::int64_t c2 = std::int64_t(rng.next_below(21)) - 10;
        std::int64_t h = std::int64_t(rng.next_below(201)) - 100;
        Int direct = 0;
        for (std::int64_t x = 0; x < w1; ++x)
            for (std::int64_t y = 0; y < w2; ++y)
                if (c1 * x + c2 * y <= h) ++direct;
        CHECK(slab2d_below(w1, w2, c1, c2, h) == direct);
    }
}

TEST_CASE("box_affine_count_between matches brute force up to four dims") {
    RngStream rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        int dims = 1 + int(rng.next_below(4));
        std::vector<std::int64_t> w(dims);
        std::vector<Int> c(dims);
        for (int d = 0; d < dims; ++d) {
            w[d] = 1 + std::int64_t(rng.next_below(9));
            c[d] = std::int64_t(rng.next_below(25)) - 12;
        }
        Int c0 = std::int64_t(rng.next_below(41)) - 20;
        Int lo = std::int64_t(rng.next_below(121)) - 60;
        Int hi = lo + std::int64_t(rng.next_below(80));
        Int direct = 0;
        std::vector<std::int64_t> v(dims, 0);
        for (;;) {
            Int val = c0;
            for (int d = 0; d < dims; ++d) val += c[d] * v[d];
            if (lo <= val && val <= hi) ++direct;
            int d = 0;
            while (d < dims) {
                if (++v[d] < w[d]) break;
                v[d] = 0;
                ++d;
            }
            if (d == dims) break;
        }
        CHECK(box_affine_count_between(w, c, c0, lo, hi) == direct);
    }
}

TEST_CASE("wrapped interval counting") {
    RngStream rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        std::int64_t p = 2 + rng.next_below(30);
        auto iv = WrappedInterval::arc(p, std::int64_t(rng.next_below(2 * p)) - p,
                                       rng.next_below(p + 1));
        std::int64_t a = rng.next_below(p);
        std::int64_t b = rng.next_below(p);
        if (a > b) std::swap(a, b);
        std::int64_t direct = 0;
        for (std::int64_t v = a; v <= b; ++v)
            if (iv.contains(v)) ++direct;
        CHECK(iv.count_in(a, b) == direct);

        auto other = WrappedInterval::arc(p, rng.next_below(p), rng.next_below(p + 1));
        std::int64_t inter = 0;
        for (std::int64_t v = 0; v < p; ++v)
            if (iv.contains(v) && other.contains(v)) ++inter;
        CHECK(iv.intersect_count(other) == inter);

        Int x = rng.next_below(4 * p);
        Int below = 0;
        for (Int wv = 0; wv < x; ++wv)
            if (iv.contains(std::int64_t(wv % p))) ++below;
        CHECK(wrapped_count_below(iv, x) == below);
    }
}

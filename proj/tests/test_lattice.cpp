#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "slowbirkhoff/lattice.hpp"

using namespace slowbirkhoff;

TEST_CASE("odometer increment and carry chain") {
    SystemSpec spec = SystemSpec::odometer(1);
    SystemPoint x = SystemPoint::odometer_from_bits({{0, 0, 0, 0}}, 1);
    SystemPoint y = apply(spec, LatticePoint({1}), x);
    CHECK(y.digit(0, 0) == 1);
    CHECK(y.digit(0, 1) == 0);
    CHECK(y.digit(0, 2) == 0);

    SystemPoint z = SystemPoint::odometer_from_bits({{1, 1, 1, 0, 0}}, 2);
    SystemPoint w = apply(spec, LatticePoint({1}), z);
    CHECK(w.digit(0, 0) == 0);
    CHECK(w.digit(0, 1) == 0);
    CHECK(w.digit(0, 2) == 0);
    CHECK(w.digit(0, 3) == 1);
}

TEST_CASE("torus translation") {
    SystemSpec spec = SystemSpec::torus({0.3, 0.4});
    SystemPoint x = SystemPoint::torus_point(0.9);
    SystemPoint y = apply(spec, LatticePoint({1, 1}), x);
    CHECK(std::abs(y.circle() - 0.6) < 1e-12);

    SystemPoint id = apply(spec, LatticePoint({0, 0}), x);
    CHECK(id.circle() == doctest::Approx(x.circle()).epsilon(1e-15));
}

TEST_CASE("group law holds exactly on the odometer") {
    SystemSpec spec = SystemSpec::odometer(2, 99);
    RngStream rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        SystemPoint x = sample(spec, rng);
        std::int64_t range = std::int64_t(1) << 10;
        LatticePoint z({std::int64_t(rng.next_below(2 * range)) - range,
                        std::int64_t(rng.next_below(2 * range)) - range});
        LatticePoint w({std::int64_t(rng.next_below(2 * range)) - range,
                        std::int64_t(rng.next_below(2 * range)) - range});
        SystemPoint a = apply(spec, z, apply(spec, w, x));
        SystemPoint b = apply(spec, z + w, x);
        for (int axis = 0; axis < 2; ++axis)
            CHECK(a.prefix(axis, 80) == b.prefix(axis, 80));
    }
}

TEST_CASE("torus group law within tolerance") {
    SystemSpec spec = SystemSpec::torus({0.31830988618, 0.41421356237});
    RngStream rng(6);
    for (int trial = 0; trial < 40; ++trial) {
        SystemPoint x = sample(spec, rng);
        LatticePoint z({std::int64_t(rng.next_below(2048)) - 1024,
                        std::int64_t(rng.next_below(2048)) - 1024});
        double shift = z.coords[0] * spec.alpha[0] + z.coords[1] * spec.alpha[1];
        double expect = shift - std::floor(shift);
        double got = apply(spec, z, x).circle() - x.circle();
        got -= std::floor(got);
        CHECK(std::abs(got - expect) < 1e-12);
    }
}

TEST_CASE("apply rejects dimension mismatch") {
    SystemSpec spec = SystemSpec::odometer(2);
    SystemPoint x = SystemPoint::odometer_point(2, 1);
    CHECK_THROWS_AS(apply(spec, LatticePoint({1}), x), std::invalid_argument);
}

TEST_CASE("sampling is deterministic per seed") {
    SystemSpec spec = SystemSpec::odometer(1, 42);
    RngStream r1(42), r2(42);
    SystemPoint a = sample(spec, r1);
    SystemPoint b = sample(spec, r2);
    CHECK(a.prefix(0, 256) == b.prefix(0, 256));
}

TEST_CASE("digit frequencies look like fair coins") {
    SystemSpec spec = SystemSpec::odometer(1, 7);
    RngStream rng(7);
    const int S = 100000;
    int ones = 0;
    for (int i = 0; i < S; ++i) ones += sample(spec, rng).digit(0, 0);
    double mean = double(ones) / S;
    double sigma = 0.5 / std::sqrt(double(S));
    CHECK(std::abs(mean - 0.5) < 4 * sigma);
}

TEST_CASE("torus sampling passes a KS uniformity check") {
    SystemSpec spec = SystemSpec::torus({0.7548776662});
    RngStream rng(11);
    const int S = 100000;
    std::vector<double> xs(S);
    for (int i = 0; i < S; ++i) xs[i] = sample(spec, rng).circle();
    std::sort(xs.begin(), xs.end());
    double ks = 0;
    for (int i = 0; i < S; ++i) {
        double hi = double(i + 1) / S - xs[i];
        double lo = xs[i] - double(i) / S;
        ks = std::max({ks, hi, lo});
    }
    // critical value at the 0.01 level: 1.628 / sqrt(S)
    CHECK(ks < 1.628 / std::sqrt(double(S)));
}

TEST_CASE("cylinder measures are preserved by T^z, exact enumeration") {
    // every cylinder fixed by digits up to depth d has m(T^-z C) = m(C);
    // enumerate all prefixes at depth d + guard and count preimages
    SystemSpec spec = SystemSpec::odometer(2);
    const int d = 3, guard = 3, D = d + guard;
    for (std::int64_t z1 : {-3, 1, 5})
        for (std::int64_t z2 : {-2, 0, 7}) {
            // C = {digit pattern p on the first d digits of each stream}
            for (int pattern = 0; pattern < (1 << (2 * d)); pattern += 21) {
                std::int64_t want0 = pattern & ((1 << d) - 1);
                std::int64_t want1 = pattern >> d;
                std::int64_t hits = 0;
                for (std::int64_t u0 = 0; u0 < (1 << D); ++u0)
                    for (std::int64_t u1 = 0; u1 < (1 << D); ++u1) {
                        std::int64_t y0 = (u0 + z1) & ((1 << D) - 1);
                        std::int64_t y1 = (u1 + z2) & ((1 << D) - 1);
                        if ((y0 & ((1 << d) - 1)) == want0 && (y1 & ((1 << d) - 1)) == want1)
                            ++hits;
                    }
                // m(T^-z C) = hits / 2^(2D) must equal m(C) = 2^(-2d)
                CHECK(Rat(hits, Int(1) << (2 * D)) == Rat(1, Int(1) << (2 * d)));
            }
        }
}

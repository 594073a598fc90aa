#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slowbirkhoff/rational.hpp"

namespace slowbirkhoff {

// Half-open arc [start, start+len) on Z/period, len in [0, period].
struct WrappedInterval {
    std::int64_t period = 1;
    std::int64_t start = 0;
    std::int64_t len = 0;

    static WrappedInterval full(std::int64_t p) { return {p, 0, p}; }
    static WrappedInterval empty(std::int64_t p) { return {p, 0, 0}; }
    static WrappedInterval arc(std::int64_t p, std::int64_t s, std::int64_t l) {
        if (l < 0 || l > p) throw std::invalid_argument("WrappedInterval: bad length");
        return {p, ((s % p) + p) % p, l};
    }

    bool is_full() const { return len == period; }
    bool contains(std::int64_t v) const {
        std::int64_t d = v - start;
        d = ((d % period) + period) % period;
        return d < len;
    }
    WrappedInterval shifted(std::int64_t by) const { return arc(period, start + by, len); }

    // #{v in [a, b] (plain integers, 0 <= a <= b < period) : contains(v)}
    std::int64_t count_in(std::int64_t a, std::int64_t b) const {
        if (a > b) return 0;
        auto below = [&](std::int64_t x) {  // #{v in [0, x] : contains(v)}
            std::int64_t end = start + len;  // may exceed period
            std::int64_t c = 0;
            // piece [start, min(end, period))
            std::int64_t lo = start, hi = std::min(end, period) - 1;
            if (lo <= std::min(hi, x)) c += std::min(hi, x) - lo + 1;
            // wrapped piece [0, end - period)
            if (end > period) {
                std::int64_t hi2 = end - period - 1;
                c += std::min(hi2, x) + 1 > 0 ? std::min(hi2, x) + 1 : 0;
            }
            return c;
        };
        return below(b) - (a == 0 ? 0 : below(a - 1));
    }

    std::int64_t intersect_count(const WrappedInterval& o) const {
        if (o.period != period) throw std::invalid_argument("intersect_count: period mismatch");
        // count of o's members inside *this, by splitting o into linear pieces
        std::int64_t total = 0;
        std::int64_t end = o.start + o.len;
        total += count_in(o.start, std::min(end, o.period) - 1);
        if (end > o.period) total += count_in(0, end - o.period - 1);
        return total;
    }
};

// sum_{i=0}^{n-1} floor((a*i + b) / m), m > 0; exact for any signs.
Int floor_sum(Int n, Int m, Int a, Int b);

// #{(x, y) in [0,w1) x [0,w2) : c1*x + c2*y <= h}
Int slab2d_below(std::int64_t w1, std::int64_t w2, const Int& c1, const Int& c2, const Int& h);

// #{v in box : lo <= c0 + sum_i coeff[i]*v_i <= hi}; widths[i] >= 1.
// Dimensions beyond two are folded by iterating the narrowest axis.
Int box_affine_count_between(const std::vector<std::int64_t>& widths,
                             const std::vector<Int>& coeffs, const Int& c0, const Int& lo,
                             const Int& hi);

// #{0 <= w < x : w mod interval.period lies in interval}
inline Int wrapped_count_below(const WrappedInterval& iv, const Int& x) {
    if (x <= 0) return 0;
    Int q = x / iv.period;
    std::int64_t r = std::int64_t(x % iv.period);  // points w in [q*P, q*P + r)
    Int c = q * iv.len;
    if (r > 0) c += iv.count_in(0, r - 1);
    return c;
}

}  // namespace slowbirkhoff

#include "slowbirkhoff/counting.hpp"

#include <algorithm>
#include <utility>

namespace slowbirkhoff {

Int floor_sum(Int n, Int m, Int a, Int b) {
    if (n <= 0) return 0;
    if (m <= 0) throw std::invalid_argument("floor_sum: m must be positive");
    Int ans = 0;
    if (a < 0) {
        Int a2 = ((a % m) + m) % m;
        ans -= n * (n - 1) / 2 * ((a2 - a) / m);
        a = a2;
    }
    if (b < 0) {
        Int b2 = ((b % m) + m) % m;
        ans -= n * ((b2 - b) / m);
        b = b2;
    }
    for (;;) {
        if (a >= m) {
            ans += n * (n - 1) / 2 * (a / m);
            a %= m;
        }
        if (b >= m) {
            ans += n * (b / m);
            b %= m;
        }
        Int ymax = a * n + b;
        if (ymax < m) break;
        n = ymax / m;
        b = ymax % m;
        std::swap(m, a);
    }
    return ans;
}

namespace {

// #{x in [0,w) : c*x <= h}, c != 0
Int line_below(std::int64_t w, const Int& c, const Int& h) {
    if (c > 0) {
        Int x_max = floor_div(h, c);  // x <= h/c
        if (x_max < 0) return 0;
        return std::min(Int(w), Int(x_max + 1));
    }
    Int x_min = ceil_div(h, c);  // c < 0: x >= h/c
    if (x_min >= w) return 0;
    return Int(w) - std::max(Int(0), x_min);
}

}  // namespace

Int slab2d_below(std::int64_t w1, std::int64_t w2, const Int& c1, const Int& c2, const Int& h) {
    if (w1 <= 0 || w2 <= 0) return 0;
    if (c1 == 0 && c2 == 0) return h >= 0 ? Int(w1) * w2 : Int(0);
    if (c1 == 0) return Int(w1) * line_below(w2, c2, h);
    if (c2 == 0) return Int(w2) * line_below(w1, c1, h);
    if (c1 < 0) return slab2d_below(w1, w2, -c1, c2, h - c1 * (w1 - 1));
    if (c2 < 0) return slab2d_below(w1, w2, c1, -c2, h - c2 * (w2 - 1));
    // c1, c2 > 0: per-x admissible y-count is clamp(floor((h - c1 x)/c2) + 1, 0, w2)
    Int x_full = floor_div(h - c2 * (w2 - 1), c1) + 1;  // x < x_full: full column
    x_full = std::max(Int(0), std::min(Int(w1), x_full));
    Int x_zero = floor_div(h, c1) + 1;  // x >= x_zero: empty column
    x_zero = std::max(x_full, std::min(Int(w1), x_zero));
    Int count = x_full * w2;
    Int span = x_zero - x_full;
    if (span > 0) {
        // sum over x in [x_full, x_zero) of floor((h - c1 x)/c2) + 1
        count += floor_sum(span, c2, -c1, h - c1 * x_full) + span;
    }
    return count;
}

Int box_affine_count_between(const std::vector<std::int64_t>& widths,
                             const std::vector<Int>& coeffs, const Int& c0, const Int& lo,
                             const Int& hi) {
    if (widths.size() != coeffs.size())
        throw std::invalid_argument("box_affine_count_between: size mismatch");
    if (lo > hi) return 0;
    Int mult = 1;
    std::vector<std::int64_t> w;
    std::vector<Int> c;
    for (size_t i = 0; i < widths.size(); ++i) {
        if (widths[i] <= 0) return 0;
        if (coeffs[i] == 0)
            mult *= widths[i];
        else {
            w.push_back(widths[i]);
            c.push_back(coeffs[i]);
        }
    }
    Int l = lo - c0, h = hi - c0;
    if (w.empty()) return (l <= 0 && 0 <= h) ? mult : Int(0);
    if (w.size() == 1) {
        // l <= c*x <= h over [0, w)
        Int lo_x, hi_x;
        if (c[0] > 0) {
            lo_x = ceil_div(l, c[0]);
            hi_x = floor_div(h, c[0]);
        } else {
            lo_x = ceil_div(h, c[0]);
            hi_x = floor_div(l, c[0]);
        }
        lo_x = std::max(Int(0), lo_x);
        hi_x = std::min(Int(w[0] - 1), hi_x);
        return hi_x < lo_x ? Int(0) : mult * (hi_x - lo_x + 1);
    }
    if (w.size() == 2)
        return mult * (slab2d_below(w[0], w[1], c[0], c[1], h) -
                       slab2d_below(w[0], w[1], c[0], c[1], l - 1));
    // three or more driven dims: iterate the narrowest one
    size_t pick = 0;
    for (size_t i = 1; i < w.size(); ++i)
        if (w[i] < w[pick]) pick = i;
    if (w[pick] > (std::int64_t(1) << 24))
        throw std::runtime_error("box_affine_count_between: box too large to fold");
    std::vector<std::int64_t> w2;
    std::vector<Int> c2;
    for (size_t i = 0; i < w.size(); ++i)
        if (i != pick) {
            w2.push_back(w[i]);
            c2.push_back(c[i]);
        }
    Int total = 0;
    for (std::int64_t v = 0; v < w[pick]; ++v)
        total += box_affine_count_between(w2, c2, c[pick] * v, l, h);
    return mult * total;
}

}  // namespace slowbirkhoff

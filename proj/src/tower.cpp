#include "slowbirkhoff/tower.hpp"

#include <algorithm>

namespace slowbirkhoff {

namespace {
bool is_pow2(std::int64_t v) { return v >= 1 && (v & (v - 1)) == 0; }
int log2_exact(std::int64_t v) {
    int b = 0;
    while ((std::int64_t(1) << b) < v) ++b;
    return b;
}
Int ipow(Int base, int e) {
    Int r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}
}  // namespace

bool RokhlinTower::contains(const SystemPoint& x) const {
    for (int axis = 0; axis < dimension; ++axis) {
        const AxisBlock& b = refinement[axis];
        if (b.trivial()) continue;
        std::int64_t v = x.prefix_u64(axis, b.end_bit()) >> b.lo_bit;
        if (v >= b.keep) return false;
    }
    return true;
}

std::optional<LatticePoint> RokhlinTower::membership(const SystemPoint& x) const {
    if (!contains(x)) return std::nullopt;
    LatticePoint z(std::vector<std::int64_t>(dimension, 0));
    for (int axis = 0; axis < dimension; ++axis)
        z.coords[axis] = x.prefix_u64(axis, level_bits) + 1;  // 1-based Q_h level
    return z;
}

int RokhlinTower::max_bit() const {
    int m = level_bits;
    for (auto& b : refinement) m = std::max(m, b.end_bit());
    return m;
}

DefectBounds defect_bounds(const RokhlinTower& tower, std::int64_t N) {
    if (N < 1) throw std::invalid_argument("defect_bounds: N must be >= 1");
    if (tower.height <= N) throw std::invalid_argument("defect_bounds: requires h > N");
    const int n = tower.dimension;
    Int hn = ipow(tower.height, n);
    DefectBounds d;
    d.window_side = N;
    d.height = tower.height;
    d.dimension = n;
    d.outer = tower.measure * Rat(ipow(Int(tower.height) + N, n) - hn, hn);
    d.inner = tower.measure * Rat(hn - ipow(Int(tower.height) - N, n), hn);
    return d;
}

std::int64_t choose_height(std::int64_t N, int dimension, const Rat& a, const Rat& delta) {
    if (delta <= 0) throw std::invalid_argument("choose_height: delta must be positive");
    if (a <= 0 || a > 1) throw std::invalid_argument("choose_height: a out of range");
    std::int64_t h = 2;
    while (h <= N) h <<= 1;
    for (;; h <<= 1) {
        if (h > (std::int64_t(1) << 61)) throw std::overflow_error("choose_height: overflow");
        Int hn = ipow(h, dimension);
        Rat outer = a * Rat(ipow(Int(h) + N, dimension) - hn, hn);
        Rat inner = a * Rat(hn - ipow(Int(h) - N, dimension), hn);
        if (outer + inner < delta) return h;
    }
}

Rat almost_invariance_defect(const RokhlinTower& tower, const LatticePoint& z) {
    if (z.dim() != tower.dimension)
        throw std::invalid_argument("almost_invariance_defect: dimension mismatch");
    // m(T^z U delta U) = 2 (m(U) - m(U and T^z U)); intersections factor per axis
    Rat inter = 1;
    for (int axis = 0; axis < tower.dimension; ++axis) {
        const AxisBlock& b = tower.refinement[axis];
        if (b.trivial()) continue;
        WrappedInterval iv = b.interval();
        WrappedInterval shifted = iv.shifted(z.coords[axis] % iv.period);
        inter *= Rat(iv.intersect_count(shifted), iv.period);
    }
    return 2 * (tower.measure - inter);
}

std::pair<Rat, Rat> measured_defects(const RokhlinTower& tower, std::int64_t N) {
    if (N < 1) throw std::invalid_argument("measured_defects: N must be >= 1");
    Rat reach = 1, reach_in_u = 1, stay_in_u = 1;
    for (int axis = 0; axis < tower.dimension; ++axis) {
        const AxisBlock& b = tower.refinement[axis];
        if (b.trivial()) continue;  // this stream never leaves the condition
        WrappedInterval u = b.interval();
        std::int64_t P = u.period, K = u.len;
        WrappedInterval r = WrappedInterval::arc(P, -N, std::min(P, K + N - 1));
        reach *= Rat(r.len, P);
        reach_in_u *= Rat(r.intersect_count(u), P);
        // u in U whose whole window [u+1, u+N] stays in [0, K): u in [0, K-1-N]
        std::int64_t stay = (K == P) ? P : std::max<std::int64_t>(0, K - N);
        stay_in_u *= Rat(stay, P);
    }
    Rat outer = reach - reach_in_u;
    Rat inner = tower.measure - stay_in_u;
    return {outer, inner};
}

TowerRegistry::TowerRegistry(int dimension, int first_free_bit, int max_depth_bits,
                             int refine_budget_bits)
    : dimension_(dimension),
      max_depth_bits_(max_depth_bits),
      refine_budget_bits_(refine_budget_bits),
      next_free_(dimension, first_free_bit) {
    if (dimension < 1) throw std::invalid_argument("TowerRegistry: dimension");
}

std::shared_ptr<const RokhlinTower> TowerRegistry::build(std::int64_t h, const Rat& a) {
    if (!is_pow2(h)) throw std::invalid_argument("build_tower: height must be a power of two");
    if (a <= 0 || a > 1) throw std::invalid_argument("build_tower: measure must be in (0,1]");
    const int m = log2_exact(h);

    // round down to c / 2^r within the refinement budget, c odd
    Int num = numerator(a), den = denominator(a);
    Int c;
    int r;
    if (is_dyadic(a)) {
        c = num;
        r = 0;
        Int d = den;
        while (d > 1) {
            d /= 2;
            ++r;
        }
    } else {
        r = refine_budget_bits_;
        c = (num << r) / den;
    }
    while (r > 0 && c % 2 == 0) {
        c /= 2;
        --r;
    }
    if (r > refine_budget_bits_)
        throw std::invalid_argument("build_tower: measure denominator exceeds refinement budget");
    if (c == 0) throw std::invalid_argument("build_tower: measure rounds to zero");

    auto t = std::make_shared<RokhlinTower>();
    t->dimension = dimension_;
    t->level_bits = m;
    t->height = h;
    t->requested_measure = a;
    t->refinement.assign(dimension_, AxisBlock{});
    if (c == 1 && r == 0) {
        t->measure = 1;  // full tower, no refinement
    } else if (c == 1) {
        // spread r zero-digits round-robin, one contiguous block per axis
        for (int i = 0; i < dimension_; ++i) {
            int axis = (axis_cursor_ + i) % dimension_;
            int take = r / dimension_ + (i < r % dimension_ ? 1 : 0);
            if (take == 0) continue;
            int start = std::max(m, next_free_[axis]);
            if (start + take > max_depth_bits_)
                throw std::runtime_error("build_tower: digit budget exhausted");
            t->refinement[axis] = AxisBlock{start, take, 1};
            next_free_[axis] = start + take;
        }
        t->measure = Rat(1, Int(1) << r);
    } else {
        // odd c: one block holding the whole dyadic [0, c/2^r)
        int axis = axis_cursor_ % dimension_;
        int start = std::max(m, next_free_[axis]);
        if (start + r > max_depth_bits_)
            throw std::runtime_error("build_tower: digit budget exhausted");
        t->refinement[axis] = AxisBlock{start, r, std::int64_t(c)};
        next_free_[axis] = start + r;
        t->measure = Rat(c, Int(1) << r);
    }
    axis_cursor_ = (axis_cursor_ + 1) % dimension_;
    return t;
}

std::shared_ptr<const RokhlinTower> TowerRegistry::build_at(int dimension, std::int64_t h,
                                                            std::vector<AxisBlock> blocks) {
    if (!is_pow2(h)) throw std::invalid_argument("build_at: height must be a power of two");
    if (int(blocks.size()) != dimension) throw std::invalid_argument("build_at: blocks per axis");
    auto t = std::make_shared<RokhlinTower>();
    t->dimension = dimension;
    t->level_bits = log2_exact(h);
    t->height = h;
    t->refinement = std::move(blocks);
    t->measure = 1;
    for (auto& b : t->refinement) {
        if (!b.trivial() && b.lo_bit < t->level_bits)
            throw std::invalid_argument("build_at: refinement digits must sit above the levels");
        t->measure *= b.measure();
    }
    t->requested_measure = t->measure;
    return t;
}

}  // namespace slowbirkhoff

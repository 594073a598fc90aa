#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "slowbirkhoff/counting.hpp"
#include "slowbirkhoff/rational.hpp"

namespace slowbirkhoff {

// Exact distribution machinery for window sums along one digit stream.
//
// The stream's low bits are cut into consecutive blocks ("levels"), level 0
// the least significant. A channel assigns each level a condition: free, a
// wrapped admissible interval of block values, or (level 0 only) an integer
// weight per block value. The channel's window sum at base point x is
//     Z(x) = sum_{t in window} w0(block_0(x+t)) * prod_{l>=1} adm_l(block_l(x+t))
// with w0 = 1 for unweighted channels. Because carries move upward only,
// Z depends on x through its block values (v_0, .., v_{L-1}), and on a finite
// partition into boxes it is affine in them. window_cells() returns that
// partition with exact affine forms, which turns deviation-set measures into
// lattice point counts. Verified internally: the cells tile the whole box and
// every channel's total over the box matches the closed form
//     sum_x Z(x) = len * prod_l nu_l.

// Integer step function on [0, period).
struct WeightFn {
    std::int64_t period = 1;
    std::vector<std::pair<std::int64_t, Int>> steps;  // (start, weight), starts[0] == 0, sorted

    Int value_at(std::int64_t v) const;
    Int sum_range(std::int64_t a, std::int64_t b) const;  // sum over values in [a, b]
    Int total() const { return sum_range(0, period - 1); }
};

struct LevelCondition {
    enum class Kind { free, interval, weighted };
    Kind kind = Kind::free;
    WrappedInterval interval;                 // kind == interval
    std::shared_ptr<const WeightFn> weights;  // kind == weighted (level 0 only)

    static LevelCondition make_free() { return {}; }
    static LevelCondition make_interval(const WrappedInterval& iv) {
        LevelCondition c;
        c.kind = Kind::interval;
        c.interval = iv;
        return c;
    }
    static LevelCondition make_weighted(std::shared_ptr<const WeightFn> w) {
        LevelCondition c;
        c.kind = Kind::weighted;
        c.weights = std::move(w);
        return c;
    }
};

struct ChannelSpec {
    std::vector<LevelCondition> level;  // one per level
};

struct CellForm {
    Int c0;                  // value at the box corner (all v_l at box lo)
    std::vector<Int> coeff;  // per-level slope
    int chi_first = 0;       // window's first point admissible (counting channels)
    int chi_last = 0;
};

struct Cell {
    std::vector<std::pair<std::int64_t, std::int64_t>> box;  // per level [lo, hi)
    std::vector<CellForm> forms;                              // per channel

    Int box_count() const {
        Int c = 1;
        for (auto& [lo, hi] : box) c *= (hi - lo);
        return c;
    }
};

// Cells for window points t = 1..window_len. level_widths are bit widths,
// least significant block first; every channel must have one condition per level.
std::vector<Cell> window_cells(const std::vector<int>& level_widths,
                               const std::vector<ChannelSpec>& channels,
                               std::int64_t window_len);

// Exact sum of an affine form over its box.
Int cell_sum(const Cell& cell, int channel);

}  // namespace slowbirkhoff

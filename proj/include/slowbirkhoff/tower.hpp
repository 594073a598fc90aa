#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "slowbirkhoff/counting.hpp"
#include "slowbirkhoff/lattice.hpp"
#include "slowbirkhoff/rational.hpp"

namespace slowbirkhoff {

// Refinement condition on one digit stream: the block of digits
// [lo_bit, lo_bit + width) read as an integer must be < keep.
// keep == 1 fixes all block digits to zero. width == 0 means no constraint.
struct AxisBlock {
    int lo_bit = 0;
    int width = 0;
    std::int64_t keep = 1;

    bool trivial() const { return width == 0; }
    int end_bit() const { return lo_bit + width; }
    Rat measure() const {
        return trivial() ? Rat(1) : Rat(keep, Int(1) << width);
    }
    // the condition as an arc of residues mod 2^end_bit
    WrappedInterval interval() const {
        std::int64_t period = std::int64_t(1) << end_bit();
        return WrappedInterval::arc(period, 0, keep << lo_bit);
    }
};

// Tower for the odometer action: base B = {level digits 0..m-1 all zero on
// every stream} refined by per-axis blocks, levels T^z B for z in Q_h, h = 2^m.
// The union U is exactly {x : every axis block condition holds}; its measure
// is the product of the block measures, an exact dyadic rational.
class RokhlinTower {
public:
    int dimension = 1;
    int level_bits = 0;  // m, h = 2^m
    std::int64_t height = 1;
    std::vector<AxisBlock> refinement;  // one per axis
    Rat requested_measure = 1;
    Rat measure = 1;  // built measure a'

    bool contains(const SystemPoint& x) const;
    // the unique 1-based level z in Q_h with x in T^(z - (1,..,1)) B, if any
    std::optional<LatticePoint> membership(const SystemPoint& x) const;
    int max_bit() const;  // one past the highest constrained bit
};

struct DefectBounds {
    Rat outer;  // bound on m(points outside U whose window reaches U)
    Rat inner;  // bound on m(points in U whose window leaves U)
    std::int64_t window_side = 1;
    std::int64_t height = 1;
    int dimension = 1;
};

// Closed forms a'*((h+N)^n/h^n - 1) and a'*(1 - (h-N)^n/h^n); requires h > N.
DefectBounds defect_bounds(const RokhlinTower& tower, std::int64_t N);

// Smallest power-of-two height h > N with outer(h) + inner(h) < delta for a
// tower of measure a.
std::int64_t choose_height(std::int64_t N, int dimension, const Rat& a, const Rat& delta);

// Exact m(T^z U symmetric-difference U); equals m(T^z C delta C) for C = X \ U.
Rat almost_invariance_defect(const RokhlinTower& tower, const LatticePoint& z);

// Exact measures of the two defect sets at window side N:
//   first  = m({x not in U : some z in Q_N has x+z in U})
//   second = m({x in U : some z in Q_N has x+z not in U})
std::pair<Rat, Rat> measured_defects(const RokhlinTower& tower, std::int64_t N);

// Allocates refinement digit positions so towers built in one run constrain
// pairwise disjoint digit sets (and stay above the base observable's digits).
class TowerRegistry {
public:
    TowerRegistry(int dimension, int first_free_bit = 0, int max_depth_bits = 58,
                  int refine_budget_bits = 16);

    // h must be a power of two; a in (0,1] is rounded down to the nearest
    // representable dyadic c/2^r (r within budget). Round-robin digit spread
    // for c == 1; a single-axis block otherwise.
    std::shared_ptr<const RokhlinTower> build(std::int64_t h, const Rat& a);

    // Explicit placement, for experiments that deliberately overlap an
    // observable's digits. Bypasses the disjointness bookkeeping.
    static std::shared_ptr<const RokhlinTower> build_at(int dimension, std::int64_t h,
                                                        std::vector<AxisBlock> blocks);

    const std::vector<int>& next_free_bits() const { return next_free_; }

private:
    int dimension_;
    int max_depth_bits_;
    int refine_budget_bits_;
    int axis_cursor_ = 0;
    std::vector<int> next_free_;
};

}  // namespace slowbirkhoff

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slowbirkhoff/rational.hpp"
#include "slowbirkhoff/rng.hpp"

namespace slowbirkhoff {

// Group element z of Z^n; T^z acts componentwise.
struct LatticePoint {
    std::vector<std::int64_t> coords;

    LatticePoint() = default;
    explicit LatticePoint(std::vector<std::int64_t> c) : coords(std::move(c)) {}
    static LatticePoint zero(int dim) { return LatticePoint(std::vector<std::int64_t>(dim, 0)); }

    int dim() const { return int(coords.size()); }

    LatticePoint operator+(const LatticePoint& o) const {
        if (coords.size() != o.coords.size())
            throw std::invalid_argument("lattice point dimension mismatch");
        LatticePoint r = *this;
        for (size_t i = 0; i < coords.size(); ++i) r.coords[i] += o.coords[i];
        return r;
    }
    LatticePoint operator-() const {
        LatticePoint r = *this;
        for (auto& c : r.coords) c = -c;
        return r;
    }
    bool operator==(const LatticePoint& o) const { return coords == o.coords; }
};

// The cube Q_N = {z : 1 <= z_i <= N}, |Q_N| = N^n.
struct SquareWindow {
    std::int64_t side = 1;
    int dimension = 1;

    SquareWindow(std::int64_t n, int dim) : side(n), dimension(dim) {
        if (n < 1 || dim < 1) throw std::invalid_argument("SquareWindow: side and dim must be >= 1");
    }
    Int cardinality() const {
        Int c = 1;
        for (int i = 0; i < dimension; ++i) c *= side;
        return c;
    }
    // Visits every z in Q_N in lexicographic order.
    template <typename F>
    void for_each(F&& f) const {
        LatticePoint z(std::vector<std::int64_t>(dimension, 1));
        for (;;) {
            f(const_cast<const LatticePoint&>(z));
            int axis = 0;
            while (axis < dimension) {
                if (++z.coords[axis] <= side) break;
                z.coords[axis] = 1;
                ++axis;
            }
            if (axis == dimension) return;
        }
    }
};

enum class SystemKind { odometer, torus };

// Concrete ergodic model: the n-fold dyadic odometer (exact arithmetic), or a
// circle rotation by z . alpha (floating point, assumes (1, alpha_i) rationally
// independent; not verifiable in finite precision).
struct SystemSpec {
    SystemKind kind = SystemKind::odometer;
    int dimension = 1;
    std::vector<double> alpha;  // torus frequencies, one per generator
    std::uint64_t seed = 0;

    static SystemSpec odometer(int n, std::uint64_t seed = 0) {
        SystemSpec s;
        s.kind = SystemKind::odometer;
        s.dimension = n;
        s.seed = seed;
        if (n < 1) throw std::invalid_argument("SystemSpec: dimension must be >= 1");
        return s;
    }
    static SystemSpec torus(std::vector<double> alpha, std::uint64_t seed = 0) {
        SystemSpec s;
        s.kind = SystemKind::torus;
        s.dimension = int(alpha.size());
        s.alpha = std::move(alpha);
        s.seed = seed;
        if (s.dimension < 1) throw std::invalid_argument("SystemSpec: torus requires alpha");
        return s;
    }
};

// A phase-space point. Odometer mode: n binary digit streams, materialized to
// finite depth and extended deterministically from a per-point seed, so the
// point behaves as one fixed element of the infinite product across repeated
// deepening. Digit positions are 0-based bits internally (bit 0 = the paper's
// digit 1). Torus mode: one circle coordinate in [0,1).
class SystemPoint {
public:
    static SystemPoint odometer_point(int dimension, std::uint64_t point_seed) {
        SystemPoint p;
        p.torus_ = false;
        p.seed_ = point_seed;
        p.words_.resize(dimension);
        return p;
    }
    // Explicit low digits (index 0 = first digit); tail digits come from the seed.
    static SystemPoint odometer_from_bits(const std::vector<std::vector<int>>& bits,
                                          std::uint64_t tail_seed = 0);
    static SystemPoint torus_point(double x);

    bool is_torus() const { return torus_; }
    int dimension() const { return torus_ ? 1 : int(words_.size()); }
    double circle() const;

    // digit in {0,1} at 0-based position `bit`; materializes lazily.
    int digit(int axis, std::int64_t bit) const;
    // low `bits` digits of one stream as an integer (bit 0 = LSB)
    Int prefix(int axis, int bits) const;
    std::int64_t prefix_u64(int axis, int bits) const;

    friend SystemPoint apply(const SystemSpec& spec, const LatticePoint& z, const SystemPoint& x);

private:
    void materialize(int axis, std::size_t word_count) const;

    mutable std::vector<std::vector<std::uint64_t>> words_;
    std::uint64_t seed_ = 0;
    bool torus_ = false;
    double circle_ = 0.0;
};

// T^z x. Odometer: per-stream binary addition with carry / borrow, extending
// depth as needed. Torus: x + sum z_i alpha_i (mod 1).
SystemPoint apply(const SystemSpec& spec, const LatticePoint& z, const SystemPoint& x);

// A point distributed according to m: i.i.d. fair digits (Haar measure on the
// n-fold dyadic group) or a uniform circle coordinate.
SystemPoint sample(const SystemSpec& spec, RngStream& rng);

}  // namespace slowbirkhoff

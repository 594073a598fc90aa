#include "slowbirkhoff/lattice.hpp"

#include <cmath>

namespace slowbirkhoff {

namespace {
constexpr std::size_t kMaxWords = 1 << 16;  // 4M digits per stream; carries never get close

std::uint64_t lazy_word(std::uint64_t seed, int axis, std::size_t index) {
    return splitmix64(seed ^ splitmix64((std::uint64_t(axis) << 32) ^ index));
}
}  // namespace

SystemPoint SystemPoint::odometer_from_bits(const std::vector<std::vector<int>>& bits,
                                            std::uint64_t tail_seed) {
    SystemPoint p = odometer_point(int(bits.size()), tail_seed);
    for (int axis = 0; axis < int(bits.size()); ++axis) {
        const auto& row = bits[axis];
        p.materialize(axis, row.size() / 64 + 1);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i])
                p.words_[axis][i / 64] |= (std::uint64_t(1) << (i % 64));
            else
                p.words_[axis][i / 64] &= ~(std::uint64_t(1) << (i % 64));
        }
    }
    return p;
}

SystemPoint SystemPoint::torus_point(double x) {
    SystemPoint p;
    p.torus_ = true;
    p.circle_ = x - std::floor(x);
    return p;
}

double SystemPoint::circle() const {
    if (!torus_) throw std::logic_error("circle(): odometer point");
    return circle_;
}

void SystemPoint::materialize(int axis, std::size_t word_count) const {
    if (word_count > kMaxWords) throw std::runtime_error("SystemPoint: digit depth limit exceeded");
    auto& w = words_[axis];
    while (w.size() < word_count) w.push_back(lazy_word(seed_, axis, w.size()));
}

int SystemPoint::digit(int axis, std::int64_t bit) const {
    if (torus_) throw std::logic_error("digit(): torus point");
    if (axis < 0 || axis >= dimension() || bit < 0) throw std::out_of_range("digit()");
    materialize(axis, std::size_t(bit / 64) + 1);
    return int((words_[axis][std::size_t(bit / 64)] >> (bit % 64)) & 1u);
}

Int SystemPoint::prefix(int axis, int bits) const {
    Int v = 0;
    materialize(axis, std::size_t(bits + 63) / 64);
    for (int b = bits - 1; b >= 0; --b) v = (v << 1) | digit(axis, b);
    return v;
}

std::int64_t SystemPoint::prefix_u64(int axis, int bits) const {
    if (bits > 62) throw std::overflow_error("prefix_u64: too many bits");
    std::int64_t v = 0;
    for (int b = bits - 1; b >= 0; --b) v = (v << 1) | digit(axis, b);
    return v;
}

SystemPoint apply(const SystemSpec& spec, const LatticePoint& z, const SystemPoint& x) {
    if (z.dim() != spec.dimension) throw std::invalid_argument("apply: dimension mismatch");
    if (spec.kind == SystemKind::torus) {
        if (!x.is_torus()) throw std::invalid_argument("apply: point/system kind mismatch");
        double shift = 0.0;
        for (int i = 0; i < spec.dimension; ++i) shift += double(z.coords[i]) * spec.alpha[i];
        double y = x.circle() + shift;
        return SystemPoint::torus_point(y - std::floor(y));
    }
    if (x.is_torus() || x.dimension() != spec.dimension)
        throw std::invalid_argument("apply: dimension mismatch");

    SystemPoint y = x;
    for (int axis = 0; axis < spec.dimension; ++axis) {
        std::int64_t zi = z.coords[axis];
        if (zi == 0) continue;
        y.materialize(axis, 1);
        auto& w = y.words_[axis];
        if (zi > 0) {
            std::uint64_t carry = std::uint64_t(zi);
            for (std::size_t i = 0; carry != 0; ++i) {
                if (i >= w.size()) y.materialize(axis, i + 1);
                std::uint64_t before = w[i];
                w[i] = before + carry;
                carry = (w[i] < before) ? 1 : 0;
            }
        } else {
            // borrow propagates until a nonzero word absorbs it
            std::uint64_t borrow = std::uint64_t(-zi);
            for (std::size_t i = 0; borrow != 0; ++i) {
                if (i >= w.size()) y.materialize(axis, i + 1);
                std::uint64_t before = w[i];
                w[i] = before - borrow;
                borrow = (before < borrow) ? 1 : 0;
            }
        }
    }
    return y;
}

SystemPoint sample(const SystemSpec& spec, RngStream& rng) {
    if (spec.kind == SystemKind::torus) return SystemPoint::torus_point(rng.next_unit());
    return SystemPoint::odometer_point(spec.dimension, rng.next_u64());
}

}  // namespace slowbirkhoff

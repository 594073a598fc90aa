#pragma once

#include <memory>
#include <string>
#include <vector>

#include "slowbirkhoff/lattice.hpp"
#include "slowbirkhoff/rational.hpp"
#include "slowbirkhoff/rng.hpp"
#include "slowbirkhoff/tower.hpp"

namespace slowbirkhoff {

// One cylinder constraint: fixed bits per axis (0-based positions) and the
// function value on that cylinder.
struct Cylinder {
    // per axis: list of (bit, value in {0,1})
    std::vector<std::vector<std::pair<int, int>>> bits;
    Rat value;
};

// Nonnegative base function. Odometer mode: a step function of finitely many
// digits, stored as the full value table over the constrained positions (the
// cylinder list must partition the space). Torus mode: a step function on a
// uniform grid of [0,1).
class BaseObservable {
public:
    static BaseObservable constant(int dimension, const Rat& value);
    static BaseObservable from_cylinders(int dimension, const std::vector<Cylinder>& parts);
    static BaseObservable torus_steps(std::vector<double> grid);

    bool torus_mode() const { return torus_; }
    int dimension() const { return dimension_; }
    const std::vector<std::vector<int>>& positions() const { return positions_; }
    int max_bit(int axis) const { return positions_[axis].empty() ? 0 : positions_[axis].back() + 1; }
    bool is_constant() const;

    Rat integral() const;  // exact mean (odometer)
    Rat sup() const;
    Rat value_at(const SystemPoint& x) const;
    // value when stream `axis` carries low bits `low_bits[axis]` (enough bits
    // to cover all positions)
    Rat value_at_bits(const std::vector<std::int64_t>& low_bits) const;
    double torus_value(double x) const;
    double torus_integral() const;
    double torus_sup() const;
    const std::vector<Rat>& table() const { return table_; }

private:
    std::size_t table_index(const std::vector<std::int64_t>& low_bits) const;

    bool torus_ = false;
    int dimension_ = 1;
    std::vector<std::vector<int>> positions_;  // per axis, sorted 0-based bits
    std::vector<Rat> table_;                   // size 2^(total positions)
    std::vector<double> grid_;                 // torus
};

// f = base * indicator(complement of the union of the mask towers).
class MaskedObservable {
public:
    MaskedObservable() = default;
    explicit MaskedObservable(BaseObservable base,
                              std::vector<std::shared_ptr<const RokhlinTower>> masks = {});

    const BaseObservable& base() const { return base_; }
    const std::vector<std::shared_ptr<const RokhlinTower>>& masks() const { return masks_; }
    MaskedObservable with_mask(std::shared_ptr<const RokhlinTower> tower) const;

    Rat value_at(const SystemPoint& x) const;
    Rat value_at_bits(const std::vector<std::int64_t>& low_bits) const;
    int max_bit(int axis) const;
    Rat sup() const { return base_.sup(); }

private:
    BaseObservable base_;
    std::vector<std::shared_ptr<const RokhlinTower>> masks_;
};

struct McEstimate {
    double value = 0;
    double error_bound = 0;  // two-sided Hoeffding radius at the confidence
    std::int64_t samples = 0;
    double confidence = 0.99;
};

// Exact integral over the odometer (enumerates only the constrained digits;
// throws if that exceeds the work budget).
Rat integral_exact(const SystemSpec& spec, const MaskedObservable& f);
McEstimate integral_mc(const SystemSpec& spec, const MaskedObservable& f, std::int64_t samples,
                       double confidence, std::uint64_t seed);

Rat l1_distance_exact(const SystemSpec& spec, const MaskedObservable& f,
                      const MaskedObservable& g);
McEstimate l1_distance_mc(const SystemSpec& spec, const MaskedObservable& f,
                          const MaskedObservable& g, std::int64_t samples, double confidence,
                          std::uint64_t seed);

}  // namespace slowbirkhoff

#include "slowbirkhoff/observable.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace slowbirkhoff {

namespace {
constexpr int kEnumBudgetBits = 24;

double hoeffding_radius(double range, std::int64_t samples, double confidence) {
    return range * std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * double(samples)));
}
}  // namespace

BaseObservable BaseObservable::constant(int dimension, const Rat& value) {
    if (value < 0) throw std::invalid_argument("BaseObservable: value must be >= 0");
    BaseObservable f;
    f.dimension_ = dimension;
    f.positions_.assign(dimension, {});
    f.table_ = {value};
    return f;
}

BaseObservable BaseObservable::from_cylinders(int dimension, const std::vector<Cylinder>& parts) {
    BaseObservable f;
    f.dimension_ = dimension;
    f.positions_.assign(dimension, {});
    std::vector<std::set<int>> pos(dimension);
    for (const auto& c : parts) {
        if (int(c.bits.size()) != dimension)
            throw std::invalid_argument("cylinder dimension mismatch");
        if (c.value < 0) throw std::invalid_argument("cylinder value must be >= 0");
        for (int a = 0; a < dimension; ++a)
            for (auto [bit, val] : c.bits[a]) {
                if (bit < 0 || (val != 0 && val != 1))
                    throw std::invalid_argument("cylinder bit constraint out of range");
                pos[a].insert(bit);
            }
    }
    int total = 0;
    for (int a = 0; a < dimension; ++a) {
        f.positions_[a].assign(pos[a].begin(), pos[a].end());
        total += int(f.positions_[a].size());
    }
    if (total > kEnumBudgetBits)
        throw std::invalid_argument("cylinder list constrains too many digits");
    std::vector<signed char> seen(std::size_t(1) << total, 0);
    f.table_.assign(std::size_t(1) << total, Rat(0));
    // table index: axis-major, each axis's positions LSB-first
    for (const auto& c : parts) {
        // iterate all assignments consistent with this cylinder
        std::vector<int> free_slots;
        std::size_t base_idx = 0;
        int slot = 0;
        for (int a = 0; a < dimension; ++a) {
            for (int p : f.positions_[a]) {
                auto it = std::find_if(c.bits[a].begin(), c.bits[a].end(),
                                       [&](auto& bv) { return bv.first == p; });
                if (it == c.bits[a].end())
                    free_slots.push_back(slot);
                else if (it->second)
                    base_idx |= std::size_t(1) << slot;
                ++slot;
            }
        }
        for (std::size_t m = 0; m < (std::size_t(1) << free_slots.size()); ++m) {
            std::size_t idx = base_idx;
            for (std::size_t j = 0; j < free_slots.size(); ++j)
                if ((m >> j) & 1) idx |= std::size_t(1) << free_slots[j];
            if (seen[idx]) throw std::invalid_argument("cylinders overlap: not a partition");
            seen[idx] = 1;
            f.table_[idx] = c.value;
        }
    }
    for (auto s : seen)
        if (!s) throw std::invalid_argument("cylinders do not cover the space: not a partition");
    return f;
}

BaseObservable BaseObservable::torus_steps(std::vector<double> grid) {
    if (grid.empty()) throw std::invalid_argument("torus_steps: empty grid");
    for (double v : grid)
        if (v < 0) throw std::invalid_argument("torus_steps: values must be >= 0");
    BaseObservable f;
    f.torus_ = true;
    f.dimension_ = 1;
    f.grid_ = std::move(grid);
    return f;
}

bool BaseObservable::is_constant() const {
    if (torus_) return grid_.size() == 1;
    return table_.size() == 1;
}

Rat BaseObservable::integral() const {
    if (torus_) throw std::logic_error("integral(): exact mode requires the odometer");
    Rat sum = 0;
    for (const auto& v : table_) sum += v;
    return sum / Int(table_.size());
}

Rat BaseObservable::sup() const {
    if (torus_) throw std::logic_error("sup(): torus mode");
    return *std::max_element(table_.begin(), table_.end());
}

std::size_t BaseObservable::table_index(const std::vector<std::int64_t>& low_bits) const {
    std::size_t idx = 0;
    int slot = 0;
    for (int a = 0; a < dimension_; ++a)
        for (int p : positions_[a]) {
            if ((low_bits[a] >> p) & 1) idx |= std::size_t(1) << slot;
            ++slot;
        }
    return idx;
}

Rat BaseObservable::value_at_bits(const std::vector<std::int64_t>& low_bits) const {
    return table_[table_index(low_bits)];
}

Rat BaseObservable::value_at(const SystemPoint& x) const {
    if (torus_) throw std::logic_error("value_at(): torus point needs torus_value");
    std::size_t idx = 0;
    int slot = 0;
    for (int a = 0; a < dimension_; ++a)
        for (int p : positions_[a]) {
            if (x.digit(a, p)) idx |= std::size_t(1) << slot;
            ++slot;
        }
    return table_[idx];
}

double BaseObservable::torus_value(double x) const {
    auto cell = std::size_t(x * double(grid_.size()));
    if (cell >= grid_.size()) cell = grid_.size() - 1;
    return grid_[cell];
}

double BaseObservable::torus_integral() const {
    double s = 0;
    for (double v : grid_) s += v;
    return s / double(grid_.size());
}

double BaseObservable::torus_sup() const { return *std::max_element(grid_.begin(), grid_.end()); }

MaskedObservable::MaskedObservable(BaseObservable base,
                                   std::vector<std::shared_ptr<const RokhlinTower>> masks)
    : base_(std::move(base)), masks_(std::move(masks)) {
    for (auto& t : masks_) {
        if (!t) throw std::invalid_argument("MaskedObservable: null mask");
        if (base_.torus_mode()) throw std::invalid_argument("MaskedObservable: no torus masks");
        if (t->dimension != base_.dimension())
            throw std::invalid_argument("MaskedObservable: mask dimension mismatch");
    }
}

MaskedObservable MaskedObservable::with_mask(std::shared_ptr<const RokhlinTower> tower) const {
    auto masks = masks_;
    masks.push_back(std::move(tower));
    return MaskedObservable(base_, std::move(masks));
}

Rat MaskedObservable::value_at(const SystemPoint& x) const {
    for (auto& t : masks_)
        if (t->contains(x)) return 0;
    return base_.value_at(x);
}

Rat MaskedObservable::value_at_bits(const std::vector<std::int64_t>& low_bits) const {
    for (auto& t : masks_) {
        bool inside = true;
        for (int a = 0; a < t->dimension && inside; ++a) {
            const AxisBlock& b = t->refinement[a];
            if (b.trivial()) continue;
            if (((low_bits[a] >> b.lo_bit) & ((std::int64_t(1) << b.width) - 1)) >= b.keep)
                inside = false;
        }
        if (inside) return 0;
    }
    return base_.value_at_bits(low_bits);
}

int MaskedObservable::max_bit(int axis) const {
    int m = base_.max_bit(axis);
    for (auto& t : masks_) m = std::max(m, t->refinement[axis].trivial()
                                               ? 0
                                               : t->refinement[axis].end_bit());
    return m;
}

Rat integral_exact(const SystemSpec& spec, const MaskedObservable& f) {
    if (spec.kind != SystemKind::odometer || f.base().torus_mode())
        throw std::invalid_argument("integral_exact: exact mode requires the odometer");
    const int n = f.base().dimension();
    // digit positions that matter, per axis
    std::vector<std::vector<int>> rel(n);
    for (int a = 0; a < n; ++a) rel[a] = f.base().positions()[a];
    for (auto& t : f.masks())
        for (int a = 0; a < n; ++a) {
            const AxisBlock& b = t->refinement[a];
            for (int p = b.lo_bit; p < b.end_bit(); ++p) rel[a].push_back(p);
        }
    int total = 0;
    for (auto& v : rel) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        total += int(v.size());
    }
    if (total > kEnumBudgetBits) throw std::runtime_error("integral_exact: too many digits");
    Rat sum = 0;
    std::vector<std::int64_t> low(n, 0);
    for (std::size_t m = 0; m < (std::size_t(1) << total); ++m) {
        std::fill(low.begin(), low.end(), 0);
        int slot = 0;
        for (int a = 0; a < n; ++a)
            for (int p : rel[a]) {
                if ((m >> slot) & 1) low[a] |= std::int64_t(1) << p;
                ++slot;
            }
        sum += f.value_at_bits(low);
    }
    return sum / pow2(unsigned(total));
}

McEstimate integral_mc(const SystemSpec& spec, const MaskedObservable& f, std::int64_t samples,
                       double confidence, std::uint64_t seed) {
    if (samples <= 0) throw std::invalid_argument("integral_mc: samples must be positive");
    RngStream rng(seed);
    McEstimate e;
    e.samples = samples;
    e.confidence = confidence;
    double sum = 0, range;
    if (spec.kind == SystemKind::torus) {
        range = f.base().torus_sup();
        for (std::int64_t i = 0; i < samples; ++i) sum += f.base().torus_value(rng.next_unit());
    } else {
        range = double(f.sup());
        for (std::int64_t i = 0; i < samples; ++i) {
            SystemPoint x = sample(spec, rng);
            sum += double(f.value_at(x));
        }
    }
    e.value = sum / double(samples);
    e.error_bound = hoeffding_radius(range, samples, confidence);
    return e;
}

Rat l1_distance_exact(const SystemSpec& spec, const MaskedObservable& f,
                      const MaskedObservable& g) {
    if (spec.kind != SystemKind::odometer)
        throw std::invalid_argument("l1_distance_exact: exact mode requires the odometer");
    if (f.base().dimension() != g.base().dimension())
        throw std::invalid_argument("l1_distance_exact: dimension mismatch");
    const int n = f.base().dimension();
    std::vector<std::vector<int>> rel(n);
    auto add_obs = [&](const MaskedObservable& o) {
        for (int a = 0; a < n; ++a)
            for (int p : o.base().positions()[a]) rel[a].push_back(p);
        for (auto& t : o.masks())
            for (int a = 0; a < n; ++a) {
                const AxisBlock& b = t->refinement[a];
                for (int p = b.lo_bit; p < b.end_bit(); ++p) rel[a].push_back(p);
            }
    };
    add_obs(f);
    add_obs(g);
    int total = 0;
    for (auto& v : rel) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        total += int(v.size());
    }
    if (total > kEnumBudgetBits) throw std::runtime_error("l1_distance_exact: too many digits");
    Rat sum = 0;
    std::vector<std::int64_t> low(n, 0);
    for (std::size_t m = 0; m < (std::size_t(1) << total); ++m) {
        std::fill(low.begin(), low.end(), 0);
        int slot = 0;
        for (int a = 0; a < n; ++a)
            for (int p : rel[a]) {
                if ((m >> slot) & 1) low[a] |= std::int64_t(1) << p;
                ++slot;
            }
        sum += rat_abs(f.value_at_bits(low) - g.value_at_bits(low));
    }
    return sum / pow2(unsigned(total));
}

McEstimate l1_distance_mc(const SystemSpec& spec, const MaskedObservable& f,
                          const MaskedObservable& g, std::int64_t samples, double confidence,
                          std::uint64_t seed) {
    if (samples <= 0) throw std::invalid_argument("l1_distance_mc: samples must be positive");
    RngStream rng(seed);
    McEstimate e;
    e.samples = samples;
    e.confidence = confidence;
    double sum = 0, range;
    if (spec.kind == SystemKind::torus) {
        range = std::max(f.base().torus_sup(), g.base().torus_sup());
        for (std::int64_t i = 0; i < samples; ++i) {
            double x = rng.next_unit();
            sum += std::abs(f.base().torus_value(x) - g.base().torus_value(x));
        }
    } else {
        range = double(std::max(f.sup(), g.sup()));
        for (std::int64_t i = 0; i < samples; ++i) {
            SystemPoint x = sample(spec, rng);
            sum += std::abs(double(f.value_at(x)) - double(g.value_at(x)));
        }
    }
    e.value = sum / double(samples);
    e.error_bound = hoeffding_radius(range, samples, confidence);
    return e;
}

}  // namespace slowbirkhoff

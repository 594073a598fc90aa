#include "slowbirkhoff/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace slowbirkhoff {

namespace {

constexpr std::int64_t kEnumWorkBudget = std::int64_t(1) << 27;
constexpr int kSweepBitCap = 22;
constexpr int kWeightBitCap = 14;
constexpr std::int64_t kPairIterBudget = std::int64_t(1) << 22;

Int ipow_i(std::int64_t base, int e) {
    Int r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// common scale turning the base table into integers
Int table_scale(const BaseObservable& base) {
    Int s = 1;
    for (const auto& v : base.table()) s = lcm(s, denominator(v));
    return s;
}

// integer window-sum bounds for "deviation <= threshold": lo <= Zw <= hi with
// A = Zw / denom
std::pair<Int, Int> inside_bounds(const Rat& integral, const Rat& threshold, const Rat& denom) {
    Rat lo = (integral - threshold) * denom;
    Rat hi = (integral + threshold) * denom;
    return {ceil_rat(lo), floor_rat(hi)};
}

bool masked_everywhere(const MaskedObservable& f) {
    for (auto& t : f.masks())
        if (t->measure == 1) return true;
    return false;
}

// ---------------------------------------------------------------------------
// structured path: per-axis nested level decomposition
// ---------------------------------------------------------------------------

struct AxisLevels {
    std::vector<int> widths;      // level bit widths, least significant first
    std::vector<int> cuts;        // cumulative bit positions per level end
    std::vector<int> mask_level;  // per mask: level index on this axis, or -1
    std::vector<std::int64_t> mask_keep;  // interval length inside that level
    bool weighted = false;                // level 0 carries the base weights
};

// Nested structure required by the fast counter: per axis, mask blocks sorted
// by position, pairwise disjoint, base digits strictly below the lowest block.
std::optional<std::vector<AxisLevels>> analyze_structure(const MaskedObservable& f) {
    const int n = f.base().dimension();
    const int K = int(f.masks().size());
    std::vector<AxisLevels> out(n);
    for (int a = 0; a < n; ++a) {
        AxisLevels ax;
        ax.mask_level.assign(K, -1);
        ax.mask_keep.assign(K, 0);
        std::vector<std::pair<int, int>> order;  // (lo_bit, mask index)
        for (int k = 0; k < K; ++k) {
            const AxisBlock& b = f.masks()[k]->refinement[a];
            if (!b.trivial()) order.emplace_back(b.lo_bit, k);
        }
        std::sort(order.begin(), order.end());
        int cut = 0;
        if (!f.base().positions()[a].empty()) {
            int d0 = f.base().max_bit(a);
            if (n > 1 || d0 > kWeightBitCap) return std::nullopt;  // joint bases don't factor
            ax.weighted = true;
            ax.widths.push_back(d0);
            ax.cuts.push_back(d0);
            cut = d0;
        }
        for (auto [lo, k] : order) {
            const AxisBlock& b = f.masks()[k]->refinement[a];
            if (lo < cut) return std::nullopt;  // overlap or below the base digits
            ax.mask_level[k] = int(ax.widths.size());
            ax.mask_keep[k] = b.keep << (lo - cut);
            ax.widths.push_back(b.end_bit() - cut);
            ax.cuts.push_back(b.end_bit());
            cut = b.end_bit();
        }
        out[a] = std::move(ax);
    }
    return out;
}

struct ExactCount {
    Int inside = 0;         // non-deviating points
    Int inside_in_last = 0; // non-deviating points inside the newest mask
    Int total_in_last = 0;  // all points inside the newest mask
    Int space = 1;          // 2^(total constrained bits)
};

// restrict one box dimension to [0, keep) and re-anchor the forms
std::optional<Cell> restrict_cell(const Cell& c, int level, std::int64_t keep) {
    Cell r = c;
    auto& [lo, hi] = r.box[level];
    std::int64_t new_hi = std::min(hi, keep);
    if (new_hi <= lo) return std::nullopt;
    r.box[level].second = new_hi;
    return r;
}

Int cells_count_between(const std::vector<Cell>& cells, int channel, const Int& lo,
                        const Int& hi) {
    Int total = 0;
    for (const auto& c : cells) {
        std::vector<std::int64_t> widths;
        widths.reserve(c.box.size());
        for (auto& [a, b] : c.box) widths.push_back(b - a);
        total += box_affine_count_between(widths, c.forms[channel].coeff, c.forms[channel].c0,
                                          lo, hi);
    }
    return total;
}

// n == 1: a single channel counts (weighted) unmasked window points.
std::optional<ExactCount> structured_1d(const MaskedObservable& f, std::int64_t N,
                                        const Rat& integral, const Rat& threshold,
                                        const std::vector<AxisLevels>& ax_all) {
    const AxisLevels& ax = ax_all[0];
    if (ax.widths.empty()) return std::nullopt;
    const int K = int(f.masks().size());
    ChannelSpec ch;
    ch.level.resize(ax.widths.size());
    Int scale = 1;
    if (ax.weighted) {
        scale = table_scale(f.base());
        auto wf = std::make_shared<WeightFn>();
        wf->period = std::int64_t(1) << ax.widths[0];
        Int prev;
        for (std::int64_t v = 0; v < wf->period; ++v) {
            Rat val = f.base().value_at_bits({v});
            Int w = numerator(Rat(val * scale));
            if (wf->steps.empty() || w != prev) wf->steps.emplace_back(v, w);
            prev = w;
        }
        ch.level[0] = LevelCondition::make_weighted(wf);
    }
    for (int k = 0; k < K; ++k) {
        int l = ax.mask_level[k];
        if (l < 0) return std::nullopt;  // a mask with no digits would mask everything
        std::int64_t P = std::int64_t(1) << ax.widths[l];
        // unmasked = complement of [0, keep)
        ch.level[l] = LevelCondition::make_interval(
            WrappedInterval::arc(P, ax.mask_keep[k], P - ax.mask_keep[k]));
    }
    auto cells = window_cells(ax.widths, {ch}, N);

    Rat V = ax.weighted ? Rat(1) : f.base().table()[0];
    Int lo, hi;
    if (ax.weighted) {
        std::tie(lo, hi) = inside_bounds(integral, threshold, Rat(Int(N) * scale));
    } else {
        if (V == 0) return std::nullopt;  // zero function handled earlier
        std::tie(lo, hi) = inside_bounds(integral, threshold, Rat(N) / V);
    }
    ExactCount ec;
    for (int w : ax.widths) ec.space <<= w;
    ec.inside = cells_count_between(cells, 0, lo, hi);
    // split by membership in the newest mask
    int last_level = ax.mask_level[K - 1];
    if (K > 0 && last_level >= 0) {
        std::vector<Cell> restricted;
        for (auto& c : cells)
            if (auto r = restrict_cell(c, last_level, ax.mask_keep[K - 1])) {
                ec.total_in_last += r->box_count();
                restricted.push_back(std::move(*r));
            }
        ec.inside_in_last = cells_count_between(restricted, 0, lo, hi);
    }
    return ec;
}

// n == 2, constant base: inclusion-exclusion over mask subsets with per-axis
// window counts; channel s-1 counts points satisfying every mask in subset s.
std::optional<ExactCount> structured_2d(const MaskedObservable& f, std::int64_t N,
                                        const Rat& integral, const Rat& threshold,
                                        const std::vector<AxisLevels>& ax_all) {
    const int K = int(f.masks().size());
    if (K > 4 || !f.base().is_constant()) return std::nullopt;
    Rat V = f.base().table()[0];
    if (V == 0) return std::nullopt;
    const int subsets = (1 << K) - 1;

    // per axis: cells with one channel per nonempty subset
    std::vector<std::vector<Cell>> cells_axis(2);
    for (int a = 0; a < 2; ++a) {
        const AxisLevels& ax = ax_all[a];
        if (ax.widths.empty()) {
            Cell trivial;
            trivial.forms.resize(subsets);
            for (auto& fm : trivial.forms) {
                fm.c0 = N;
                fm.chi_first = fm.chi_last = 1;
            }
            cells_axis[a] = {trivial};
            continue;
        }
        std::vector<ChannelSpec> chans(subsets);
        for (int s = 1; s <= subsets; ++s) {
            ChannelSpec& ch = chans[s - 1];
            ch.level.resize(ax.widths.size());
            for (int k = 0; k < K; ++k) {
                if (!((s >> k) & 1)) continue;
                int l = ax.mask_level[k];
                if (l < 0) continue;  // no digits on this axis: free
                std::int64_t P = std::int64_t(1) << ax.widths[l];
                ch.level[l] =
                    LevelCondition::make_interval(WrappedInterval::arc(P, 0, ax.mask_keep[k]));
            }
        }
        cells_axis[a] = window_cells(ax.widths, chans, N);
    }

    auto bounds = inside_bounds(integral, threshold, Rat(Int(N) * N) / V);
    const Int lo = bounds.first, hi = bounds.second;
    const Int NN = Int(N) * N;

    auto affine = [&](const Cell& c) {
        for (auto& fm : c.forms)
            for (auto& co : fm.coeff)
                if (co != 0) return true;
        return false;
    };
    auto sign = [](int s) { return (__builtin_popcount(unsigned(s)) % 2) ? -1 : 1; };

    // inside-count over a pair of cells, optionally with one side pinned
    auto pair_count = [&](const Cell& ca, const std::vector<Int>& va, const Cell& cb) -> Int {
        // unmasked count = N^2 + sum_s sign(s) * c_s,A * c_s,B; va holds c_s,A values
        Int c0 = NN;
        std::vector<Int> coeff;
        std::vector<std::int64_t> widths;
        for (auto& [a, b] : cb.box) widths.push_back(b - a);
        coeff.assign(widths.size(), 0);
        for (int s = 1; s <= int(va.size()); ++s) {
            Int sg = sign(s) * va[s - 1];
            c0 += sg * cb.forms[s - 1].c0;
            for (std::size_t j = 0; j < coeff.size(); ++j)
                coeff[j] += sg * cb.forms[s - 1].coeff[j];
        }
        (void)ca;
        return box_affine_count_between(widths, coeff, c0, lo, hi);
    };

    auto eval_at = [&](const Cell& c, const std::vector<std::int64_t>& v) {
        std::vector<Int> vals(c.forms.size());
        for (std::size_t s = 0; s < c.forms.size(); ++s) {
            Int val = c.forms[s].c0;
            for (std::size_t j = 0; j < v.size(); ++j) val += c.forms[s].coeff[j] * v[j];
            vals[s] = val;
        }
        return vals;
    };

    auto count_pairs = [&](const std::vector<Cell>& A, const std::vector<Cell>& B) -> Int {
        Int total = 0;
        for (const auto& ca : A) {
            bool aff_a = affine(ca);
            Int box_a = ca.box_count();
            for (const auto& cb : B) {
                bool aff_b = affine(cb);
                Int box_b = cb.box_count();
                if (!aff_a) {
                    std::vector<Int> va = eval_at(ca, std::vector<std::int64_t>(ca.box.size(), 0));
                    total += box_a * pair_count(ca, va, cb);
                } else if (!aff_b) {
                    std::vector<Int> vb = eval_at(cb, std::vector<std::int64_t>(cb.box.size(), 0));
                    total += box_b * pair_count(cb, vb, ca);
                } else {
                    // iterate the smaller affine box pointwise
                    const Cell& small = box_a <= box_b ? ca : cb;
                    const Cell& big = box_a <= box_b ? cb : ca;
                    if (std::min(box_a, box_b) > kPairIterBudget)
                        throw std::runtime_error("deviation_measure: pair box too large");
                    std::vector<std::int64_t> v(small.box.size(), 0);
                    for (;;) {
                        total += pair_count(small, eval_at(small, v), big);
                        std::size_t d = 0;
                        while (d < v.size()) {
                            if (++v[d] < small.box[d].second - small.box[d].first) break;
                            v[d] = 0;
                            ++d;
                        }
                        if (d == v.size()) break;
                    }
                }
            }
        }
        return total;
    };

    ExactCount ec;
    for (int a = 0; a < 2; ++a)
        for (int w : ax_all[a].widths) ec.space <<= w;
    ec.inside = count_pairs(cells_axis[0], cells_axis[1]);

    // restriction to the newest mask
    if (K > 0) {
        bool restrictable = true;
        std::vector<std::vector<Cell>> restricted(2);
        for (int a = 0; a < 2 && restrictable; ++a) {
            int l = ax_all[a].mask_level[K - 1];
            if (l < 0) {
                restricted[a] = cells_axis[a];
                continue;
            }
            for (auto& c : cells_axis[a])
                if (auto r = restrict_cell(c, l, ax_all[a].mask_keep[K - 1]))
                    restricted[a].push_back(std::move(*r));
        }
        Int tot = 0;
        for (auto& c : restricted[0])
            for (auto& d : restricted[1]) tot += c.box_count() * d.box_count();
        ec.total_in_last = tot;
        ec.inside_in_last = count_pairs(restricted[0], restricted[1]);
    }
    return ec;
}

// residue sweep, n == 1, arbitrary digit layout below kSweepBitCap
std::optional<ExactCount> sweep_1d(const MaskedObservable& f, std::int64_t N,
                                   const Rat& integral, const Rat& threshold) {
    int E = f.max_bit(0);
    if (E > kSweepBitCap) return std::nullopt;
    if (E == 0) return std::nullopt;
    const std::int64_t P = std::int64_t(1) << E;
    Int scale = table_scale(f.base());
    std::vector<Int> w(P);
    Int w_total = 0;
    for (std::int64_t u = 0; u < P; ++u) {
        w[u] = numerator(Rat(f.value_at_bits({u}) * scale));
        w_total += w[u];
    }
    auto [lo, hi] = inside_bounds(integral, threshold, Rat(Int(N) * scale));
    const std::int64_t q = N / P, r = N % P;
    Int z = q * w_total;
    for (std::int64_t t = 1; t <= r; ++t) z += w[t % P];
    ExactCount ec;
    ec.space = P;
    const RokhlinTower* last = f.masks().empty() ? nullptr : f.masks().back().get();
    for (std::int64_t u = 0; u < P; ++u) {
        bool inside = lo <= z && z <= hi;
        if (inside) ++ec.inside;
        if (last) {
            const AxisBlock& b = last->refinement[0];
            bool in_u = b.trivial() || ((u >> b.lo_bit) & ((std::int64_t(1) << b.width) - 1)) < b.keep;
            if (in_u) {
                ++ec.total_in_last;
                if (inside) ++ec.inside_in_last;
            }
        }
        z += w[(u + 1 + r) % P] - w[(u + 1) % P];
    }
    return ec;
}

// direct prefix enumeration, any n, budgeted
std::optional<ExactCount> enumerate_nd(const MaskedObservable& f, std::int64_t N,
                                       const Rat& integral, const Rat& threshold) {
    const int n = f.base().dimension();
    int total_bits = 0;
    std::vector<int> depth(n);
    for (int a = 0; a < n; ++a) {
        depth[a] = f.max_bit(a);
        total_bits += depth[a];
    }
    if (total_bits > 26) return std::nullopt;
    Int work = ipow_i(N, n) << total_bits;
    if (work > kEnumWorkBudget) return std::nullopt;

    Int scale = table_scale(f.base());
    auto [lo, hi] = inside_bounds(integral, threshold, Rat(ipow_i(N, n) * scale));
    ExactCount ec;
    ec.space = Int(1) << total_bits;
    const RokhlinTower* last = f.masks().empty() ? nullptr : f.masks().back().get();

    std::vector<std::int64_t> x(n, 0), y(n, 0);
    SquareWindow window(N, n);
    const std::int64_t space_i = std::int64_t(1) << total_bits;
    for (std::int64_t m = 0; m < space_i; ++m) {
        std::int64_t rem = m;
        for (int a = 0; a < n; ++a) {
            x[a] = rem & ((std::int64_t(1) << depth[a]) - 1);
            rem >>= depth[a];
        }
        Int z = 0;
        window.for_each([&](const LatticePoint& zz) {
            for (int a = 0; a < n; ++a) y[a] = x[a] + zz.coords[a];
            z += numerator(Rat(f.value_at_bits(y) * scale));
        });
        bool inside = lo <= z && z <= hi;
        if (inside) ++ec.inside;
        if (last) {
            bool in_u = true;
            for (int a = 0; a < n && in_u; ++a) {
                const AxisBlock& b = last->refinement[a];
                if (b.trivial()) continue;
                if (((x[a] >> b.lo_bit) & ((std::int64_t(1) << b.width) - 1)) >= b.keep)
                    in_u = false;
            }
            if (in_u) {
                ++ec.total_in_last;
                if (inside) ++ec.inside_in_last;
            }
        }
    }
    return ec;
}

}  // namespace

Rat birkhoff_average(const SystemSpec& spec, const MaskedObservable& f, const SystemPoint& x,
                     std::int64_t N) {
    if (spec.kind != SystemKind::odometer)
        throw std::invalid_argument("birkhoff_average: exact mode requires the odometer");
    if (N < 1) throw std::invalid_argument("birkhoff_average: N must be >= 1");
    const int n = spec.dimension;
    std::vector<std::int64_t> base(n), y(n);
    for (int a = 0; a < n; ++a) {
        int bits = f.max_bit(a);
        int guard = 1;
        while ((std::int64_t(1) << guard) <= N) ++guard;
        base[a] = x.prefix_u64(a, std::min(58, bits + guard + 1));
    }
    Rat sum = 0;
    SquareWindow window(N, n);
    window.for_each([&](const LatticePoint& z) {
        for (int a = 0; a < n; ++a) y[a] = base[a] + z.coords[a];
        sum += f.value_at_bits(y);
    });
    return sum / ipow_i(N, n);
}

double birkhoff_average_torus(const SystemSpec& spec, const BaseObservable& f,
                              const SystemPoint& x, std::int64_t N) {
    if (spec.kind != SystemKind::torus) throw std::invalid_argument("expected torus system");
    double sum = 0;
    SquareWindow window(N, spec.dimension);
    window.for_each([&](const LatticePoint& z) {
        double shift = 0;
        for (int i = 0; i < spec.dimension; ++i) shift += double(z.coords[i]) * spec.alpha[i];
        double y = x.circle() + shift;
        sum += f.torus_value(y - std::floor(y));
    });
    return sum / double(SquareWindow(N, spec.dimension).cardinality());
}

std::vector<Rat> birkhoff_profile(const SystemSpec& spec, const MaskedObservable& f,
                                  const SystemPoint& x, std::int64_t N_max) {
    if (spec.kind != SystemKind::odometer)
        throw std::invalid_argument("birkhoff_profile: exact mode requires the odometer");
    const int n = spec.dimension;
    std::vector<std::int64_t> base(n), y(n);
    for (int a = 0; a < n; ++a) {
        int bits = f.max_bit(a);
        int guard = 1;
        while ((std::int64_t(1) << guard) <= N_max) ++guard;
        base[a] = x.prefix_u64(a, std::min(58, bits + guard + 1));
    }
    auto value = [&](const std::vector<std::int64_t>& z) {
        for (int a = 0; a < n; ++a) y[a] = base[a] + z[a];
        return f.value_at_bits(y);
    };
    std::vector<Rat> out;
    out.reserve(N_max);
    Rat running = 0;
    std::vector<std::int64_t> z(n);
    for (std::int64_t N = 1; N <= N_max; ++N) {
        // add the shell Q_N \ Q_{N-1}: pin the axes in `pinned` to N, the rest
        // range over [1, N-1]
        for (int pinned = 1; pinned < (1 << n); ++pinned) {
            std::vector<int> free_axes;
            for (int a = 0; a < n; ++a)
                if (!((pinned >> a) & 1)) free_axes.push_back(a);
            if (N == 1 && !free_axes.empty()) continue;
            for (int a = 0; a < n; ++a) z[a] = ((pinned >> a) & 1) ? N : 1;
            std::vector<std::int64_t> w(free_axes.size(), 1);
            for (;;) {
                for (std::size_t j = 0; j < free_axes.size(); ++j) z[free_axes[j]] = w[j];
                running += value(z);
                std::size_t d = 0;
                while (d < w.size()) {
                    if (++w[d] <= N - 1) break;
                    w[d] = 1;
                    ++d;
                }
                if (d == w.size()) break;
            }
        }
        out.push_back(running / ipow_i(N, n));
    }
    return out;
}

DeviationReport deviation_measure_exact(const SystemSpec& spec, const MaskedObservable& f,
                                        std::int64_t N, const Rat& threshold) {
    if (spec.kind != SystemKind::odometer)
        throw std::invalid_argument("deviation_measure: exact mode requires the odometer");
    if (N < 1) throw std::invalid_argument("deviation_measure: N must be >= 1");
    if (threshold < 0) throw std::invalid_argument("deviation_measure: negative threshold");

    DeviationReport rep;
    rep.N = N;
    rep.threshold = threshold;
    rep.mode = "exact";
    rep.error_bound = 0;

    // degenerate shapes first
    if (masked_everywhere(f)) {
        rep.measure = 0;  // f == 0, A == integral == 0
        return rep;
    }
    Rat I = integral_exact(spec, f);
    bool flat = f.base().is_constant() && f.masks().empty();
    if (flat) {
        rep.measure = 0;  // A(x,N,f) == I for every x
        return rep;
    }

    std::optional<ExactCount> ec;
    if (auto ax = analyze_structure(f)) {
        if (spec.dimension == 1)
            ec = structured_1d(f, N, I, threshold, *ax);
        else if (spec.dimension == 2)
            ec = structured_2d(f, N, I, threshold, *ax);
    }
    if (!ec && spec.dimension == 1) ec = sweep_1d(f, N, I, threshold);
    if (!ec) ec = enumerate_nd(f, N, I, threshold);
    if (!ec)
        throw std::runtime_error(
            "deviation_measure: no exact route fits this observable at this size");

    rep.measure = Rat(ec->space - ec->inside, ec->space);
    if (!f.masks().empty()) {
        rep.has_split = true;
        rep.dev_inside_last = Rat(ec->total_in_last - ec->inside_in_last, ec->space);
        rep.dev_outside_last = rep.measure - rep.dev_inside_last;
    }
    return rep;
}

DeviationReport deviation_measure_mc(const SystemSpec& spec, const MaskedObservable& f,
                                     std::int64_t N, const Rat& threshold, std::int64_t samples,
                                     double confidence, std::uint64_t seed) {
    if (samples <= 0) throw std::invalid_argument("deviation_measure: samples must be positive");
    if (N < 1) throw std::invalid_argument("deviation_measure: N must be >= 1");
    Int window_points = ipow_i(N, spec.dimension);
    if (Int(samples) * window_points > (Int(1) << 30))
        throw std::runtime_error("deviation_measure: mc budget exceeded");

    RngStream rng(seed);
    std::int64_t hits = 0;
    if (spec.kind == SystemKind::torus) {
        double I = f.base().torus_integral();
        double a = double(threshold);
        for (std::int64_t i = 0; i < samples; ++i) {
            SystemPoint x = sample(spec, rng);
            double A = birkhoff_average_torus(spec, f.base(), x, N);
            if (std::abs(A - I) > a) ++hits;
        }
    } else {
        Rat I = integral_exact(spec, f);
        for (std::int64_t i = 0; i < samples; ++i) {
            SystemPoint x = sample(spec, rng);
            Rat A = birkhoff_average(spec, f, x, N);
            if (rat_abs(A - I) > threshold) ++hits;
        }
    }
    DeviationReport rep;
    rep.N = N;
    rep.threshold = threshold;
    rep.mode = "mc";
    rep.samples = samples;
    rep.measure = Rat(hits, samples);
    double radius = std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * double(samples)));
    rep.error_bound = Rat(std::int64_t(std::ceil(radius * 1e12)), std::int64_t(1e12));
    return rep;
}

IntegralLimitCheck almost_invariant_integral_residuals(
    const SystemSpec& spec, const BaseObservable& f,
    const std::vector<std::shared_ptr<const RokhlinTower>>& towers) {
    if (towers.empty()) return {};
    Rat a = towers.front()->measure;
    for (auto& t : towers)
        if (t->measure != a)
            throw std::invalid_argument("residual check: towers must have equal measure");
    IntegralLimitCheck out;
    Rat base_integral = f.integral();
    for (auto& t : towers) {
        MaskedObservable masked(f, {t});
        Rat on_complement = integral_exact(spec, masked);
        out.residuals.push_back(rat_abs(on_complement - (1 - a) * base_integral));
        Rat worst = 0;
        for (int axis = 0; axis < t->dimension; ++axis) {
            LatticePoint z = LatticePoint::zero(t->dimension);
            z.coords[axis] = 1;
            worst = std::max(worst, almost_invariance_defect(*t, z));
            z.coords[axis] = -1;
            worst = std::max(worst, almost_invariance_defect(*t, z));
        }
        out.invariance_defects.push_back(worst);
    }
    return out;
}

void verify_depth_stability(const SystemSpec& spec, const MaskedObservable& f, int samples,
                            std::uint64_t seed) {
    if (spec.kind != SystemKind::odometer) return;
    RngStream rng(seed);
    int deep = 0;
    for (int a = 0; a < spec.dimension; ++a) deep = std::max(deep, f.max_bit(a));
    for (int i = 0; i < samples; ++i) {
        SystemPoint x = sample(spec, rng);
        Rat before = f.value_at(x);
        for (int a = 0; a < spec.dimension; ++a) x.digit(a, deep + 128);  // force deepening
        if (f.value_at(x) != before)
            throw std::logic_error("depth stability violated: value changed under deepening");
    }
}

}  // namespace slowbirkhoff

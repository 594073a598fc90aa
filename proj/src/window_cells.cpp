#include "slowbirkhoff/window_cells.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace slowbirkhoff {

Int WeightFn::value_at(std::int64_t v) const {
    if (v < 0 || v >= period) throw std::out_of_range("WeightFn::value_at");
    auto it = std::upper_bound(steps.begin(), steps.end(), v,
                               [](std::int64_t x, const auto& s) { return x < s.first; });
    return std::prev(it)->second;
}

Int WeightFn::sum_range(std::int64_t a, std::int64_t b) const {
    if (a > b) return 0;
    if (a < 0 || b >= period) throw std::out_of_range("WeightFn::sum_range");
    Int total = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::int64_t lo = steps[i].first;
        std::int64_t hi = (i + 1 < steps.size() ? steps[i + 1].first : period) - 1;
        lo = std::max(lo, a);
        hi = std::min(hi, b);
        if (lo <= hi) total += steps[i].second * (hi - lo + 1);
    }
    return total;
}

namespace {

struct LevelView {
    std::int64_t period;
    const LevelCondition* cond;

    bool weighted() const { return cond->kind == LevelCondition::Kind::weighted; }
    // per-value weight (0/1 for counting conditions)
    Int value_at(std::int64_t v) const {
        switch (cond->kind) {
            case LevelCondition::Kind::free: return 1;
            case LevelCondition::Kind::interval: return cond->interval.contains(v) ? 1 : 0;
            case LevelCondition::Kind::weighted: return cond->weights->value_at(v);
        }
        return 0;
    }
    Int sum_range(std::int64_t a, std::int64_t b) const {
        if (a > b) return 0;
        switch (cond->kind) {
            case LevelCondition::Kind::free: return b - a + 1;
            case LevelCondition::Kind::interval: return cond->interval.count_in(a, b);
            case LevelCondition::Kind::weighted: return cond->weights->sum_range(a, b);
        }
        return 0;
    }
    Int full_sum() const { return sum_range(0, period - 1); }
    // breakpoints of value_at as a function of v (positions where the value may change)
    std::vector<std::int64_t> value_breaks() const {
        std::vector<std::int64_t> br;
        if (cond->kind == LevelCondition::Kind::interval) {
            const auto& iv = cond->interval;
            br.push_back(iv.start % period);
            br.push_back((iv.start + iv.len) % period);
        } else if (cond->kind == LevelCondition::Kind::weighted) {
            for (auto& s : cond->weights->steps) br.push_back(s.first);
        }
        return br;
    }
};

class CellBuilder {
public:
    CellBuilder(const std::vector<int>& widths, const std::vector<ChannelSpec>& channels)
        : channels_(channels) {
        for (size_t l = 0; l < widths.size(); ++l) {
            if (widths[l] < 1 || widths[l] > 62)
                throw std::invalid_argument("window_cells: level width out of range");
            std::int64_t p = std::int64_t(1) << widths[l];
            periods_.push_back(p);
        }
        for (auto& ch : channels_) {
            if (ch.level.size() != widths.size())
                throw std::invalid_argument("window_cells: channel/level count mismatch");
            for (size_t l = 0; l < ch.level.size(); ++l)
                if (ch.level[l].kind == LevelCondition::Kind::weighted && l != 0)
                    throw std::invalid_argument("window_cells: weights only at level 0");
        }
        levels_ = int(widths.size());
    }

    std::vector<Cell> run(std::int64_t window_len) {
        if (window_len < 1) throw std::invalid_argument("window_cells: empty window");
        auto cells = rec(0, 1, window_len);
        verify(*cells, window_len);
        return *cells;
    }

private:
    using CellsPtr = std::shared_ptr<std::vector<Cell>>;

    LevelView view(int l, int ch) const { return LevelView{periods_[l], &channels_[ch].level[l]}; }

    CellsPtr rec(int l, std::int64_t lo, std::int64_t len) {
        auto key = std::tuple(l, lo, len);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto out = std::make_shared<std::vector<Cell>>();
        if (l == levels_) {
            Cell base;
            base.forms.resize(channels_.size());
            for (auto& f : base.forms) {
                f.c0 = len;
                f.chi_first = f.chi_last = 1;
            }
            out->push_back(std::move(base));
            memo_[key] = out;
            return out;
        }
        const std::int64_t P = periods_[l];
        const std::int64_t t_first = lo, t_last = lo + len - 1;

        // v-pieces on which slice geometry and endpoint values are constant
        std::set<std::int64_t> brk{0};
        if (t_first == 1) brk.insert(P - 1);              // kappa_lo jump
        if (t_last % P != 0) brk.insert(P - t_last % P);  // kappa_hi jump
        for (int ch = 0; ch < int(channels_.size()); ++ch) {
            for (auto b : view(l, ch).value_breaks()) {
                // endpoint values and their one-step lookaheads feed the slopes
                for (std::int64_t d : {-1, 0, 1}) {
                    brk.insert((((b - t_first + d) % P) + P) % P);
                    brk.insert((((b - t_last + d) % P) + P) % P);
                }
            }
        }
        std::vector<std::int64_t> starts(brk.begin(), brk.end());

        for (size_t pi = 0; pi < starts.size(); ++pi) {
            const std::int64_t A = starts[pi];
            const std::int64_t B = pi + 1 < starts.size() ? starts[pi + 1] : P;
            const std::int64_t kap_lo = (A + t_first) / P;
            const std::int64_t kap_hi = (A + t_last) / P;
            if ((B - 1 + t_first) / P != kap_lo || (B - 1 + t_last) / P != kap_hi)
                throw std::logic_error("window_cells: slice geometry not constant on piece");
            const std::int64_t S = kap_hi - kap_lo + 1;

            auto child = rec(l + 1, kap_lo, S);
            auto eval_piece = [&](int ch, std::int64_t v, Int& head_or_cnt, Int& tail) {
                LevelView lv = view(l, ch);
                std::int64_t bf = v + t_first - kap_lo * P;
                std::int64_t bl = v + t_last - kap_hi * P;
                if (S == 1) {
                    head_or_cnt = lv.sum_range(bf, bl);
                    tail = 0;
                } else {
                    head_or_cnt = lv.sum_range(bf, P - 1);
                    tail = lv.sum_range(0, bl);
                }
            };

            // per-channel piece data at A, plus measured slopes
            struct PieceCh {
                Int h_a, t_a, slope_h, slope_t, nu;
                Int adm_f, adm_l;  // endpoint weights; 0/1 for counting channels
            };
            std::vector<PieceCh> pc(channels_.size());
            for (int ch = 0; ch < int(channels_.size()); ++ch) {
                LevelView lv = view(l, ch);
                PieceCh d;
                d.nu = lv.full_sum();
                Int h1, t1;
                eval_piece(ch, A, d.h_a, d.t_a);
                if (B - A > 1) {
                    eval_piece(ch, A + 1, h1, t1);
                    d.slope_h = h1 - d.h_a;
                    d.slope_t = t1 - d.t_a;
                    Int hEnd, tEnd;
                    eval_piece(ch, B - 1, hEnd, tEnd);
                    if (hEnd != d.h_a + d.slope_h * (B - 1 - A) ||
                        tEnd != d.t_a + d.slope_t * (B - 1 - A))
                        throw std::logic_error("window_cells: non-affine piece");
                } else {
                    d.slope_h = d.slope_t = 0;
                }
                d.adm_f = lv.value_at(A + t_first - kap_lo * P);
                d.adm_l = lv.value_at(A + t_last - kap_hi * P);
                if (lv.value_at(B - 1 + t_first - kap_lo * P) != d.adm_f ||
                    lv.value_at(B - 1 + t_last - kap_hi * P) != d.adm_l)
                    throw std::logic_error("window_cells: endpoint value not constant on piece");
                pc[ch] = std::move(d);
            }

            for (const Cell& cc : *child) {
                Cell cell;
                cell.box.reserve(levels_ - l);
                cell.box.emplace_back(A, B);
                cell.box.insert(cell.box.end(), cc.box.begin(), cc.box.end());
                cell.forms.resize(channels_.size());
                for (int ch = 0; ch < int(channels_.size()); ++ch) {
                    const auto& d = pc[ch];
                    const auto& cf = cc.forms[ch];
                    CellForm f;
                    f.coeff.assign(levels_ - l, 0);
                    if (S == 1) {
                        f.c0 = d.h_a * cf.chi_first;
                        f.coeff[0] = d.slope_h * cf.chi_first;
                    } else {
                        f.c0 = d.h_a * cf.chi_first + d.t_a * cf.chi_last +
                               d.nu * (cf.c0 - cf.chi_first - cf.chi_last);
                        f.coeff[0] = d.slope_h * cf.chi_first + d.slope_t * cf.chi_last;
                        for (size_t j = 0; j < cf.coeff.size(); ++j)
                            f.coeff[j + 1] = d.nu * cf.coeff[j];
                    }
                    bool weighted = view(l, ch).weighted();
                    f.chi_first = weighted ? cf.chi_first : int(d.adm_f != 0) * cf.chi_first;
                    f.chi_last = weighted ? cf.chi_last : int(d.adm_l != 0) * cf.chi_last;
                    cell.forms[ch] = std::move(f);
                }
                out->push_back(std::move(cell));
            }
        }
        memo_[key] = out;
        return out;
    }

    // global exactness witnesses: cells tile the box; totals match closed forms
    void verify(const std::vector<Cell>& cells, std::int64_t window_len) const {
        Int space = 1;
        for (auto p : periods_) space *= p;
        Int covered = 0;
        for (auto& c : cells) covered += c.box_count();
        if (covered != space) throw std::logic_error("window_cells: cells do not tile the box");
        for (int ch = 0; ch < int(channels_.size()); ++ch) {
            Int expected = window_len;
            for (int l = 0; l < levels_; ++l) expected *= view(l, ch).full_sum();
            Int got = 0;
            for (auto& c : cells) got += cell_sum(c, ch);
            if (got != expected) throw std::logic_error("window_cells: channel total mismatch");
        }
    }

    std::vector<std::int64_t> periods_;
    std::vector<ChannelSpec> channels_;
    int levels_ = 0;
    std::map<std::tuple<int, std::int64_t, std::int64_t>, CellsPtr> memo_;
};

}  // namespace

Int cell_sum(const Cell& cell, int channel) {
    const CellForm& f = cell.forms[channel];
    Int total = cell.box_count() * f.c0;
    for (size_t l = 0; l < cell.box.size(); ++l) {
        Int others = 1;
        for (size_t j = 0; j < cell.box.size(); ++j)
            if (j != l) others *= (cell.box[j].second - cell.box[j].first);
        Int w = cell.box[l].second - cell.box[l].first;
        total += f.coeff[l] * others * (w * (w - 1) / 2);
    }
    return total;
}

std::vector<Cell> window_cells(const std::vector<int>& level_widths,
                               const std::vector<ChannelSpec>& channels,
                               std::int64_t window_len) {
    CellBuilder builder(level_widths, channels);
    return builder.run(window_len);
}

}  // namespace slowbirkhoff

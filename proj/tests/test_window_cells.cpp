#include <doctest.h>

#include <map>

#include "slowbirkhoff/rng.hpp"
#include "slowbirkhoff/window_cells.hpp"

using namespace slowbirkhoff;

namespace {

// direct evaluation of one channel's window sum at base point x
Int direct_window_sum(const std::vector<int>& widths, const ChannelSpec& ch, std::int64_t x,
                      std::int64_t window_len) {
    Int total = 0;
    for (std::int64_t t = 1; t <= window_len; ++t) {
        std::int64_t w = x + t;
        Int val = 1;
        int cut = 0;
        for (std::size_t l = 0; l < widths.size() && val != 0; ++l) {
            std::int64_t block = (w >> cut) & ((std::int64_t(1) << widths[l]) - 1);
            const LevelCondition& c = ch.level[l];
            switch (c.kind) {
                case LevelCondition::Kind::free: break;
                case LevelCondition::Kind::interval:
                    if (!c.interval.contains(block)) val = 0;
                    break;
                case LevelCondition::Kind::weighted: val *= c.weights->value_at(block); break;
            }
            cut += widths[l];
        }
        total += val;
    }
    return total;
}

ChannelSpec random_channel(RngStream& rng, const std::vector<int>& widths, bool allow_weights) {
    ChannelSpec ch;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        std::int64_t P = std::int64_t(1) << widths[l];
        int kind = int(rng.next_below(3));
        if (l == 0 && allow_weights && kind == 2) {
            auto wf = std::make_shared<WeightFn>();
            wf->period = P;
            Int prev = -1;
            for (std::int64_t v = 0; v < P; ++v) {
                Int w = rng.next_below(5);
                if (wf->steps.empty() || w != prev) wf->steps.emplace_back(v, w);
                prev = w;
            }
            ch.level.push_back(LevelCondition::make_weighted(wf));
        } else if (kind == 1) {
            ch.level.push_back(LevelCondition::make_interval(
                WrappedInterval::arc(P, rng.next_below(P), 1 + rng.next_below(P))));
        } else {
            ch.level.push_back(LevelCondition::make_free());
        }
    }
    return ch;
}

}  // namespace

TEST_CASE("window cells reproduce direct window sums") {
    RngStream rng(23);
    for (int trial = 0; trial < 120; ++trial) {
        int levels = 1 + int(rng.next_below(3));
        std::vector<int> widths;
        int total_bits = 0;
        for (int l = 0; l < levels; ++l) {
            int w = 1 + int(rng.next_below(4));
            widths.push_back(w);
            total_bits += w;
        }
        if (total_bits > 12) continue;
        std::int64_t N = 1 + rng.next_below(trial % 3 == 0 ? 400 : 30);
        std::vector<ChannelSpec> chans;
        int n_ch = 1 + int(rng.next_below(2));
        for (int c = 0; c < n_ch; ++c) chans.push_back(random_channel(rng, widths, true));

        auto cells = window_cells(widths, chans, N);

        const std::int64_t space = std::int64_t(1) << total_bits;
        // map each x to its cell by walking boxes
        std::vector<Int> got(space), direct(space);
        std::vector<int> covered(space, 0);
        for (int ch = 0; ch < n_ch; ++ch) {
            std::fill(covered.begin(), covered.end(), 0);
            for (const auto& cell : cells) {
                // enumerate the box
                std::vector<std::int64_t> v(cell.box.size());
                for (std::size_t l = 0; l < v.size(); ++l) v[l] = 0;
                for (;;) {
                    std::int64_t x = 0;
                    int cut = 0;
                    Int val = cell.forms[ch].c0;
                    for (std::size_t l = 0; l < v.size(); ++l) {
                        x |= (cell.box[l].first + v[l]) << cut;
                        cut += widths[l];
                        val += cell.forms[ch].coeff[l] * v[l];
                    }
                    got[x] = val;
                    covered[x] += 1;
                    std::size_t d = 0;
                    while (d < v.size()) {
                        if (++v[d] < cell.box[d].second - cell.box[d].first) break;
                        v[d] = 0;
                        ++d;
                    }
                    if (d == v.size()) break;
                }
            }
            for (std::int64_t x = 0; x < space; ++x) {
                REQUIRE(covered[x] == 1);
                direct[x] = direct_window_sum(widths, chans[ch], x, N);
            }
            REQUIRE(got == direct);
        }
    }
}

TEST_CASE("window cell chi fields mark the window endpoints") {
    RngStream rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<int> widths{1 + int(rng.next_below(3)), 1 + int(rng.next_below(3))};
        std::int64_t N = 1 + rng.next_below(40);
        ChannelSpec ch = random_channel(rng, widths, false);  // counting only
        auto cells = window_cells(widths, {ch}, N);
        for (const auto& cell : cells) {
            // spot-check the box corner
            std::int64_t x = 0;
            int cut = 0;
            for (std::size_t l = 0; l < widths.size(); ++l) {
                x |= cell.box[l].first << cut;
                cut += widths[l];
            }
            Int first = direct_window_sum(widths, ch, x, 1);
            Int last = direct_window_sum(widths, ch, x + N - 1, 1);
            CHECK(Int(cell.forms[0].chi_first) == first);
            CHECK(Int(cell.forms[0].chi_last) == last);
        }
    }
}

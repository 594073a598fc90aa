#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slowbirkhoff/observable.hpp"
#include "slowbirkhoff/window_cells.hpp"

namespace slowbirkhoff {

// Distributional summary of {x : |A(x,N,f) - integral f| > threshold}.
struct DeviationReport {
    std::int64_t N = 1;
    Rat threshold;
    Rat measure;            // exact mode: exact rational; mc mode: point estimate
    Rat error_bound;        // exactly 0 in exact mode, Hoeffding radius otherwise
    std::int64_t samples = 0;
    std::string mode = "exact";
    // exact-mode diagnostic: deviating mass split by membership in the newest mask
    bool has_split = false;
    Rat dev_inside_last;
    Rat dev_outside_last;
};

// A(x, N, f) = |Q_N|^{-1} sum_{z in Q_N} f(T^z x), exact rational on the odometer.
Rat birkhoff_average(const SystemSpec& spec, const MaskedObservable& f, const SystemPoint& x,
                     std::int64_t N);
double birkhoff_average_torus(const SystemSpec& spec, const BaseObservable& f,
                              const SystemPoint& x, std::int64_t N);
// A(x, 1, f) .. A(x, N_max, f) via incremental shell sums: step N -> N+1 adds
// only the (N+1)^n - N^n new lattice points.
std::vector<Rat> birkhoff_profile(const SystemSpec& spec, const MaskedObservable& f,
                                  const SystemPoint& x, std::int64_t N_max);

// Exact deviation-set measure. Chooses between the structured multi-scale
// counter (registry-style nested masks, any N), a residue sweep, and direct
// prefix enumeration; all three produce the identical rational.
DeviationReport deviation_measure_exact(const SystemSpec& spec, const MaskedObservable& f,
                                        std::int64_t N, const Rat& threshold);

DeviationReport deviation_measure_mc(const SystemSpec& spec, const MaskedObservable& f,
                                     std::int64_t N, const Rat& threshold, std::int64_t samples,
                                     double confidence, std::uint64_t seed);

// Residuals |int_{C_k} f dm - (1-a) int f dm| for C_k the complements of
// equal-measure towers; the almost-invariance hypothesis m(T^z C_k delta C_k) -> 0
// is certified via almost_invariance_defect on a fixed set of generators.
struct IntegralLimitCheck {
    std::vector<Rat> residuals;
    std::vector<Rat> invariance_defects;  // max over test translations, per tower
};
IntegralLimitCheck almost_invariant_integral_residuals(
    const SystemSpec& spec, const BaseObservable& f,
    const std::vector<std::shared_ptr<const RokhlinTower>>& towers);

// Runtime re-verification that f's value at a point depends only on the digits
// the evaluators read: deepening sampled points must not change values.
void verify_depth_stability(const SystemSpec& spec, const MaskedObservable& f, int samples,
                            std::uint64_t seed);

}  // namespace slowbirkhoff

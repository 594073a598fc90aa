#pragma once

#include <memory>
#include <string>
#include <vector>

#include "slowbirkhoff/averaging.hpp"
#include "slowbirkhoff/observable.hpp"
#include "slowbirkhoff/tower.hpp"

namespace slowbirkhoff {

// Finite truncation of the deviation sequence a_1..a_K; tail_bound is a
// declared bound on twice the discarded tail (0 for finite sequences).
struct SlowSequence {
    std::vector<Rat> a;
    Rat tail_bound = 0;
};

struct EntryCheck {
    bool ok = false;
    std::string violation;
    Rat norm_f0;
    Rat twice_sum;
    Rat norm_margin;  // norm_f0 - (1 + twice_sum)
    Rat sum_margin;   // 1 - twice_sum
};

// Checks ||f0|| > 1 + 2 sum a_i and 2 sum a_i < 1 with exact rationals.
EntryCheck validate_entry(const BaseObservable& f0, const SlowSequence& seq);

// Thrown when a certified inequality fails: the run stops rather than adjust.
struct CertificateFailure : std::runtime_error {
    explicit CertificateFailure(const std::string& what) : std::runtime_error(what) {}
};
struct SearchExhausted : std::runtime_error {
    explicit SearchExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct StepCertificates {
    Rat integral_prev;
    Rat integral_now;
    Rat drop;         // integral_prev - integral_now
    Rat drop_bound;   // 1.9 * a'_k * integral_prev
    bool drop_ok = false;
    DeviationReport deviation;  // at (N_k, a_k)
    Rat deviation_bound;        // 1 - a_k
    bool deviation_ok = false;
};

struct StepRecord {
    int k = 0;
    Rat a_k;        // requested deviation level
    Rat a_built;    // half the built tower measure (tower measure is 2 a'_k)
    std::int64_t N_k = 0;
    std::int64_t h_k = 0;
    std::shared_ptr<const RokhlinTower> tower;
    DefectBounds defects;
    StepCertificates certs;
    int grid_points_scanned = 0;
};

// When set, the time search screens candidates with the Monte Carlo estimator
// (upper confidence bound under the tolerance); every certificate stays exact.
struct McPolicy {
    std::int64_t samples = 100000;
    double confidence = 0.99;
    std::uint64_t seed = 0;
};

struct ConstructionParams {
    SystemSpec spec;
    BaseObservable f0;
    SlowSequence seq;
    std::vector<std::int64_t> M;  // time floors, one per step
    std::int64_t N_max = std::int64_t(1) << 40;
    int max_depth_bits = 58;
    int refine_budget_bits = 16;
    Int delta_divisor = 100;  // defect budget delta_k = a_k / delta_divisor
    std::optional<McPolicy> mc_time_search;
};

struct FinalRecord {
    int k = 0;
    std::int64_t N_k = 0;
    Rat threshold;
    Rat measure;
    Rat bound;  // 1 - 2 sum_{i>=k} a'_i - tail_bound
    bool ok = false;
};

struct FinalReport {
    std::vector<FinalRecord> rows;
    Rat integral_f0;
    Rat integral_final;
    Rat l1_change;  // ||f0 - f|| exactly
    bool all_ok = false;
};

struct ConstructionRun {
    std::vector<StepRecord> steps;
    MaskedObservable f_final;
    FinalReport final_report;
    bool all_ok = false;
};

// Smallest N on the doubling grid start, 2*start, 4*start, .. with
// start = max(M_k, N_prev) + 1 such that the deviation of the running
// function's averages at tolerance a_k/100 has measure below a_k/100.
std::int64_t choose_time(const SystemSpec& spec, const MaskedObservable& f_prev, const Rat& a_k,
                         std::int64_t M_k, std::int64_t N_prev, std::int64_t N_max,
                         const Int& delta_divisor, int* scanned = nullptr,
                         const std::optional<McPolicy>& mc = std::nullopt);

// Runs all K steps and the final recertification; throws CertificateFailure /
// SearchExhausted instead of silently adjusting.
ConstructionRun run_construction(const ConstructionParams& params);

// Scales finitely many leading entries down (powers of two) until the exact
// masked-mass bound guarantees ||f0 - f|| < eps * integral(f0).
SlowSequence epsilon_trim(const SlowSequence& seq, const Rat& eps, const BaseObservable& f0);

struct UniformRow {
    std::int64_t N = 0;
    Rat measure;
    bool ok = false;
};

struct UniformReport {
    std::int64_t N1 = 0;
    std::int64_t stretch = 1;
    std::int64_t height = 0;
    Rat tower_measure;
    Rat drop;       // integral drop from masking
    Rat threshold;  // 0.9 * drop
    Rat budget;     // outer + inner defect bounds at the largest grid N
    std::vector<UniformRow> rows;
    bool all_ok = false;
};

// One tall tower, one masked function, and the deviation certificate at every
// point of the dyadic grid N1, 2*N1, .., stretch*N1.
UniformReport uniform_deviation_experiment(const SystemSpec& spec, const Rat& a1, std::int64_t N1,
                                           std::int64_t stretch, const BaseObservable& f0,
                                           std::int64_t height_factor = 128);

}  // namespace slowbirkhoff

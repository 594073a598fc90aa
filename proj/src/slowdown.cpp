#include "slowbirkhoff/slowdown.hpp"

#include <algorithm>
#include <sstream>

namespace slowbirkhoff {

namespace {

Rat masked_fraction(const std::vector<Rat>& a) {
    // 1 - prod (1 - 2 a_i): the exact mass fraction removed by independent towers
    Rat prod = 1;
    for (const auto& ai : a) prod *= (1 - 2 * ai);
    return 1 - prod;
}

}  // namespace

EntryCheck validate_entry(const BaseObservable& f0, const SlowSequence& seq) {
    EntryCheck ec;
    ec.norm_f0 = f0.integral();
    ec.twice_sum = 0;
    for (const auto& ai : seq.a) {
        if (ai <= 0) {
            ec.violation = "sequence entries must be positive";
            return ec;
        }
        ec.twice_sum += 2 * ai;
    }
    ec.twice_sum += seq.tail_bound;
    ec.norm_margin = ec.norm_f0 - (1 + ec.twice_sum);
    ec.sum_margin = 1 - ec.twice_sum;
    if (ec.sum_margin <= 0) {
        ec.violation = "sequence too heavy: 2 sum a_i must stay below 1";
        return ec;
    }
    if (ec.norm_margin <= 0) {
        ec.violation = "base function too small: ||f0|| must exceed 1 + 2 sum a_i";
        return ec;
    }
    ec.ok = true;
    return ec;
}

std::int64_t choose_time(const SystemSpec& spec, const MaskedObservable& f_prev, const Rat& a_k,
                         std::int64_t M_k, std::int64_t N_prev, std::int64_t N_max,
                         const Int& delta_divisor, int* scanned,
                         const std::optional<McPolicy>& mc) {
    const Rat tolerance = a_k / delta_divisor;
    std::int64_t start = std::max(M_k, N_prev) + 1;
    int count = 0;
    for (std::int64_t N = start; N <= N_max && N > 0; N *= 2) {
        ++count;
        if (scanned) *scanned = count;
        if (mc) {
            DeviationReport rep = deviation_measure_mc(spec, f_prev, N, tolerance, mc->samples,
                                                       mc->confidence, mc->seed ^ std::uint64_t(N));
            if (rep.measure + rep.error_bound < tolerance) return N;
            continue;
        }
        DeviationReport rep = deviation_measure_exact(spec, f_prev, N, tolerance);
        if (rep.measure < tolerance) return N;
    }
    std::ostringstream os;
    os << "time search exhausted: no N in (" << start << ", " << N_max
       << "] on the doubling grid brings the deviation measure below " << rat_str(tolerance);
    throw SearchExhausted(os.str());
}

ConstructionRun run_construction(const ConstructionParams& params) {
    if (params.spec.kind != SystemKind::odometer)
        throw std::invalid_argument("run_construction: exact construction needs the odometer");
    if (params.M.size() != params.seq.a.size())
        throw std::invalid_argument("run_construction: M and a must have equal length");
    EntryCheck entry = validate_entry(params.f0, params.seq);
    if (!entry.ok) throw CertificateFailure("entry condition failed: " + entry.violation);

    const int K = int(params.seq.a.size());
    int first_free = 0;
    for (int a = 0; a < params.f0.dimension(); ++a)
        first_free = std::max(first_free, params.f0.max_bit(a));
    TowerRegistry registry(params.spec.dimension, first_free, params.max_depth_bits,
                           params.refine_budget_bits);

    ConstructionRun run;
    MaskedObservable f(params.f0);
    Rat integral_prev = integral_exact(params.spec, f);
    std::int64_t N_prev = 0;

    for (int k = 1; k <= K; ++k) {
        StepRecord rec;
        rec.k = k;
        rec.a_k = params.seq.a[k - 1];

        rec.N_k = choose_time(params.spec, f, rec.a_k, params.M[k - 1], N_prev, params.N_max,
                              params.delta_divisor, &rec.grid_points_scanned,
                              params.mc_time_search);
        Rat delta_k = rec.a_k / params.delta_divisor;
        rec.h_k = choose_height(rec.N_k, params.spec.dimension, 2 * rec.a_k, delta_k);
        rec.tower = registry.build(rec.h_k, 2 * rec.a_k);
        rec.a_built = rec.tower->measure / 2;
        rec.defects = defect_bounds(*rec.tower, rec.N_k);

        MaskedObservable f_next = f.with_mask(rec.tower);
        StepCertificates& c = rec.certs;
        c.integral_prev = integral_prev;
        c.integral_now = integral_exact(params.spec, f_next);
        c.drop = c.integral_prev - c.integral_now;
        c.drop_bound = Rat(19, 10) * rec.a_built * c.integral_prev;
        c.drop_ok = c.drop > c.drop_bound;
        if (!c.drop_ok) {
            std::ostringstream os;
            os << "step " << k << ": integral drop " << rat_str(c.drop)
               << " does not exceed 1.9 a'_k * integral = " << rat_str(c.drop_bound);
            throw CertificateFailure(os.str());
        }
        c.deviation = deviation_measure_exact(params.spec, f_next, rec.N_k, rec.a_k);
        c.deviation_bound = 1 - rec.a_k;
        c.deviation_ok = c.deviation.measure > c.deviation_bound;
        if (!c.deviation_ok) {
            std::ostringstream os;
            os << "step " << k << ": deviation measure " << rat_str(c.deviation.measure)
               << " at N=" << rec.N_k << " does not exceed " << rat_str(c.deviation_bound);
            throw CertificateFailure(os.str());
        }

        f = std::move(f_next);
        integral_prev = c.integral_now;
        N_prev = rec.N_k;
        run.steps.push_back(std::move(rec));
    }

    // final function recertified at every recorded time
    run.f_final = f;
    verify_depth_stability(params.spec, f, 1000, params.spec.seed ^ 0x5b1f3ab1u);
    FinalReport& fr = run.final_report;
    fr.integral_f0 = params.f0.integral();
    fr.integral_final = integral_prev;
    fr.l1_change = fr.integral_f0 - fr.integral_final;  // masks only remove mass
    fr.all_ok = true;
    for (int k = 1; k <= K; ++k) {
        FinalRecord row;
        row.k = k;
        row.N_k = run.steps[k - 1].N_k;
        row.threshold = params.seq.a[k - 1];
        Rat tail = params.seq.tail_bound;
        for (int i = k; i <= K; ++i) tail += 2 * run.steps[i - 1].a_built;
        row.bound = 1 - tail;
        row.measure = deviation_measure_exact(params.spec, f, row.N_k, row.threshold).measure;
        row.ok = row.measure > row.bound;
        fr.all_ok = fr.all_ok && row.ok;
        fr.rows.push_back(row);
    }
    if (!fr.all_ok) {
        std::ostringstream os;
        os << "final recertification failed:";
        for (auto& r : fr.rows)
            if (!r.ok)
                os << " [k=" << r.k << " measure=" << rat_str(r.measure)
                   << " bound=" << rat_str(r.bound) << "]";
        throw CertificateFailure(os.str());
    }
    run.all_ok = true;
    return run;
}

SlowSequence epsilon_trim(const SlowSequence& seq, const Rat& eps, const BaseObservable& f0) {
    if (eps <= 0) throw std::invalid_argument("epsilon_trim: eps must be positive");
    (void)f0;  // the bound is relative to integral(f0), which cancels
    if (masked_fraction(seq.a) < eps) return seq;
    const int K = int(seq.a.size());
    // shortest prefix whose unscaled tail already fits the budget
    int prefix = K;
    for (int p = 0; p <= K; ++p) {
        std::vector<Rat> tail(seq.a.begin() + p, seq.a.end());
        if (masked_fraction(tail) + seq.tail_bound < eps) {
            prefix = p;
            break;
        }
    }
    for (int shift = 1; shift <= 200; ++shift) {
        SlowSequence trimmed = seq;
        for (int i = 0; i < prefix; ++i) trimmed.a[i] = seq.a[i] / pow2(unsigned(shift));
        if (masked_fraction(trimmed.a) + seq.tail_bound < eps) return trimmed;
    }
    throw std::runtime_error("epsilon_trim: could not reach the requested budget");
}

UniformReport uniform_deviation_experiment(const SystemSpec& spec, const Rat& a1, std::int64_t N1,
                                           std::int64_t stretch, const BaseObservable& f0,
                                           std::int64_t height_factor) {
    if (stretch < 1) throw std::invalid_argument("uniform_deviation: stretch must be >= 1");
    if (N1 < 1) throw std::invalid_argument("uniform_deviation: N1 must be >= 1");
    if (spec.kind != SystemKind::odometer)
        throw std::invalid_argument("uniform_deviation: exact mode requires the odometer");

    UniformReport rep;
    rep.N1 = N1;
    rep.stretch = stretch;
    std::int64_t h = 2;
    while (h < height_factor * stretch * N1) h <<= 1;
    rep.height = h;

    int first_free = 0;
    for (int a = 0; a < f0.dimension(); ++a) first_free = std::max(first_free, f0.max_bit(a));
    TowerRegistry registry(spec.dimension, first_free);
    auto tower = registry.build(h, 2 * a1);
    rep.tower_measure = tower->measure;

    MaskedObservable f1(f0, {tower});
    Rat integral_f0 = f0.integral();
    Rat integral_f1 = integral_exact(spec, f1);
    rep.drop = integral_f0 - integral_f1;
    rep.threshold = Rat(9, 10) * rep.drop;

    std::int64_t N_top = N1;
    while (N_top * 2 <= stretch * N1) N_top *= 2;
    DefectBounds db = defect_bounds(*tower, N_top);
    rep.budget = db.outer + db.inner;

    rep.all_ok = true;
    for (std::int64_t N = N1; N <= stretch * N1; N *= 2) {
        UniformRow row;
        row.N = N;
        row.measure = deviation_measure_exact(spec, f1, N, rep.threshold).measure;
        row.ok = row.measure > 1 - rep.budget;
        rep.all_ok = rep.all_ok && row.ok;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace slowbirkhoff

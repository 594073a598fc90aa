#include "slowbirkhoff/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace slowbirkhoff {

namespace {

std::string mc_or_exact(const DeviationReport& r) {
    std::ostringstream os;
    os << r.N << "," << rat_str(r.threshold) << "," << rat_str(r.measure) << ","
       << rat_str(r.error_bound) << "," << r.mode << "," << r.samples;
    return os.str();
}

}  // namespace

std::string certificates_csv(const std::vector<StepRecord>& steps) {
    std::ostringstream os;
    os << "k,N_k,h_k,a_built,integral_f_k,measure,bound,pass\n";
    for (const auto& s : steps) {
        os << s.k << "," << s.N_k << "," << s.h_k << "," << rat_str(s.a_built) << ","
           << rat_str(s.certs.integral_now) << "," << rat_str(s.certs.deviation.measure) << ","
           << rat_str(s.certs.deviation_bound) << ","
           << (s.certs.deviation_ok && s.certs.drop_ok ? "1" : "0") << "\n";
    }
    return os.str();
}

std::string final_csv(const FinalReport& report) {
    std::ostringstream os;
    os << "k,N_k,threshold,measure,bound,pass\n";
    for (const auto& r : report.rows)
        os << r.k << "," << r.N_k << "," << rat_str(r.threshold) << "," << rat_str(r.measure)
           << "," << rat_str(r.bound) << "," << (r.ok ? "1" : "0") << "\n";
    return os.str();
}

std::string tower_line(int k, const RokhlinTower& tower, const Rat& outer, const Rat& inner,
                       std::int64_t N) {
    std::ostringstream os;
    os << "k=" << k << " h=" << tower.height << " a_requested="
       << rat_str(tower.requested_measure) << " a_built=" << rat_str(tower.measure) << " digits=";
    bool first = true;
    for (int a = 0; a < tower.dimension; ++a) {
        const AxisBlock& b = tower.refinement[a];
        if (b.trivial()) continue;
        if (!first) os << ";";
        first = false;
        // 1-based digit positions, inclusive range, with the admissible count
        os << "axis" << a << ":" << (b.lo_bit + 1) << "-" << b.end_bit() << "<" << b.keep;
    }
    if (first) os << "none";
    os << " N=" << N << " outer=" << rat_str(outer) << " inner=" << rat_str(inner);
    return os.str();
}

std::string towers_dump(const std::vector<StepRecord>& steps) {
    std::ostringstream os;
    for (const auto& s : steps)
        os << tower_line(s.k, *s.tower, s.defects.outer, s.defects.inner, s.N_k) << "\n";
    return os.str();
}

std::vector<DumpedTower> parse_towers_dump(const std::string& text, int dimension) {
    std::vector<DumpedTower> out;
    std::istringstream is(text);
    std::string line;
    auto field = [](const std::string& l, const std::string& key) {
        auto pos = l.find(key + "=");
        if (pos == std::string::npos) throw std::runtime_error("tower dump: missing " + key);
        pos += key.size() + 1;
        auto end = l.find(' ', pos);
        return l.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        DumpedTower d;
        d.k = int(std::stoll(field(line, "k")));
        d.N = std::stoll(field(line, "N"));
        std::int64_t h = std::stoll(field(line, "h"));
        std::vector<AxisBlock> blocks(dimension);
        std::string digits = field(line, "digits");
        if (digits != "none") {
            std::stringstream ds(digits);
            std::string part;
            while (std::getline(ds, part, ';')) {
                // axisA:LO-HI<KEEP with 1-based inclusive digit positions
                auto colon = part.find(':');
                auto dash = part.find('-', colon);
                auto lt = part.find('<', dash);
                int axis = int(std::stoll(part.substr(4, colon - 4)));
                int lo = int(std::stoll(part.substr(colon + 1, dash - colon - 1)));
                int hi = int(std::stoll(part.substr(dash + 1, lt - dash - 1)));
                std::int64_t keep = std::stoll(part.substr(lt + 1));
                blocks[axis] = AxisBlock{lo - 1, hi - lo + 1, keep};
            }
        }
        auto t = TowerRegistry::build_at(dimension, h, std::move(blocks));
        auto mutable_t = std::const_pointer_cast<RokhlinTower>(t);
        mutable_t->requested_measure = parse_rational(field(line, "a_requested"));
        d.tower = t;
        if (rat_str(t->measure) != field(line, "a_built"))
            throw std::runtime_error("tower dump: rebuilt measure differs from recorded a_built");
        out.push_back(std::move(d));
    }
    return out;
}

std::string deviation_csv(const std::vector<std::pair<int, DeviationReport>>& rows) {
    std::ostringstream os;
    os << "k,N,threshold,measure,error_bound,mode,samples\n";
    for (auto& [k, r] : rows) os << k << "," << mc_or_exact(r) << "\n";
    return os.str();
}

std::string construction_summary(const RunConfig& cfg, const ConstructionRun& run) {
    std::ostringstream os;
    os << "slow Birkhoff convergence construction\n";
    os << "config_hash=" << std::hex << fnv1a64(cfg.source_text) << std::dec << "\n";
    os << "dimension=" << cfg.spec.dimension << " steps=" << run.steps.size() << "\n";
    os << "integral_f0=" << rat_str(run.final_report.integral_f0)
       << " integral_final=" << rat_str(run.final_report.integral_final)
       << " l1_change=" << rat_str(run.final_report.l1_change) << "\n";
    for (const auto& s : run.steps) {
        os << "step k=" << s.k << " N=" << s.N_k << " h=" << s.h_k
           << " a=" << rat_str(s.a_k) << " a_built=" << rat_str(s.a_built)
           << " drop=" << rat_str(s.certs.drop) << " drop_bound=" << rat_str(s.certs.drop_bound)
           << " deviation=" << rat_str(s.certs.deviation.measure)
           << " bound=" << rat_str(s.certs.deviation_bound)
           << " grid_points=" << s.grid_points_scanned << "\n";
        if (s.certs.deviation.has_split)
            os << "  split inside_mask=" << rat_str(s.certs.deviation.dev_inside_last)
               << " outside_mask=" << rat_str(s.certs.deviation.dev_outside_last) << "\n";
    }
    for (const auto& r : run.final_report.rows)
        os << "final k=" << r.k << " N=" << r.N_k << " threshold=" << rat_str(r.threshold)
           << " measure=" << rat_str(r.measure) << " bound=" << rat_str(r.bound)
           << " pass=" << (r.ok ? 1 : 0) << "\n";
    os << "overall=" << (run.all_ok ? "PASS" : "FAIL") << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace slowbirkhoff

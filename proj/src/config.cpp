#include "slowbirkhoff/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace slowbirkhoff {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::int64_t parse_i64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::int64_t x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (...) {
        throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
    }
}

Rat parse_rat_checked(const std::string& key, const std::string& v) {
    try {
        return parse_rational(v);
    } catch (...) {
        throw ConfigError("key '" + key + "': not a rational p/q: '" + v + "'");
    }
}

// cylinder syntax: "0:4=1,0:6=0 -> 7/2" with 1-based digit positions
Cylinder parse_cylinder(int dimension, const std::string& text) {
    auto arrow = text.find("->");
    if (arrow == std::string::npos) throw ConfigError("key 'cyl': missing '->' in '" + text + "'");
    Cylinder c;
    c.bits.resize(dimension);
    c.value = parse_rat_checked("cyl", trim(text.substr(arrow + 2)));
    std::string lhs = trim(text.substr(0, arrow));
    if (!lhs.empty())
        for (const auto& part : split(lhs, ',')) {
            auto colon = part.find(':');
            auto eq = part.find('=');
            if (colon == std::string::npos || eq == std::string::npos || eq < colon)
                throw ConfigError("key 'cyl': expected axis:digit=bit, got '" + part + "'");
            int axis = int(parse_i64("cyl", part.substr(0, colon)));
            int digit = int(parse_i64("cyl", part.substr(colon + 1, eq - colon - 1)));
            int bit = int(parse_i64("cyl", part.substr(eq + 1)));
            if (axis < 0 || axis >= dimension) throw ConfigError("key 'cyl': axis out of range");
            if (digit < 1) throw ConfigError("key 'cyl': digit positions are 1-based");
            c.bits[axis].emplace_back(digit - 1, bit);
        }
    return c;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> cylinders;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "cyl")
            cylinders.push_back(value);
        else if (kv.count(key))
            throw ConfigError("key '" + key + "' appears twice");
        else
            kv[key] = value;
    }

    RunConfig cfg;
    cfg.source_text = text;
    auto take = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("experiment"); !v.empty()) cfg.experiment = v;
    const std::vector<std::string> experiments{"construct", "verify", "lemma3", "defect",
                                               "remark2"};
    if (std::find(experiments.begin(), experiments.end(), cfg.experiment) == experiments.end())
        throw ConfigError("key 'experiment': unknown experiment '" + cfg.experiment + "'");

    std::string kind = take("kind");
    if (kind.empty()) kind = "odometer";
    int n = 1;
    if (auto v = take("n"); !v.empty()) n = int(parse_i64("n", v));
    if (n < 1) throw ConfigError("key 'n': dimension must be >= 1");
    std::uint64_t seed = 0;
    if (auto v = take("seed"); !v.empty()) seed = std::uint64_t(parse_i64("seed", v));

    if (kind == "odometer") {
        cfg.spec = SystemSpec::odometer(n, seed);
    } else if (kind == "torus") {
        auto v = take("alpha");
        if (v.empty()) throw ConfigError("key 'alpha': torus mode requires frequencies");
        std::vector<double> alpha;
        for (auto& s : split(v, ',')) alpha.push_back(std::stod(s));
        if (int(alpha.size()) != n)
            throw ConfigError("key 'alpha': expected " + std::to_string(n) + " values");
        cfg.spec = SystemSpec::torus(alpha, seed);
    } else {
        throw ConfigError("key 'kind': expected odometer or torus");
    }

    if (kind == "torus") {
        auto v = take("grid");
        std::vector<double> grid{2.0};
        if (!v.empty()) {
            grid.clear();
            for (auto& s : split(v, ',')) grid.push_back(std::stod(s));
        }
        cfg.f0 = BaseObservable::torus_steps(grid);
    } else if (!cylinders.empty()) {
        std::vector<Cylinder> parts;
        for (auto& c : cylinders) parts.push_back(parse_cylinder(n, c));
        cfg.f0 = BaseObservable::from_cylinders(n, parts);
        if (kv.count("value")) throw ConfigError("give either 'value' or 'cyl' lines, not both");
    } else {
        Rat value = 2;
        if (auto v = take("value"); !v.empty()) value = parse_rat_checked("value", v);
        cfg.f0 = BaseObservable::constant(n, value);
    }

    if (auto v = take("a"); !v.empty())
        for (auto& s : split(v, ',')) cfg.seq.a.push_back(parse_rat_checked("a", s));
    if (auto v = take("tail_bound"); !v.empty())
        cfg.seq.tail_bound = parse_rat_checked("tail_bound", v);
    if (auto v = take("M"); !v.empty())
        for (auto& s : split(v, ',')) cfg.M.push_back(parse_i64("M", s));
    if (auto v = take("eps"); !v.empty()) cfg.eps = parse_rat_checked("eps", v);
    if (auto v = take("N_max"); !v.empty()) cfg.N_max = parse_i64("N_max", v);
    if (auto v = take("mode"); !v.empty()) cfg.mode = v;
    if (cfg.mode != "exact" && cfg.mode != "mc")
        throw ConfigError("key 'mode': expected exact or mc");
    if (cfg.mode == "exact" && kind != "odometer")
        throw ConfigError("key 'mode': exact mode requires the odometer system");
    if (auto v = take("samples"); !v.empty()) cfg.samples = parse_i64("samples", v);
    if (auto v = take("confidence"); !v.empty()) cfg.confidence = std::stod(v);
    if (auto v = take("out"); !v.empty()) cfg.out_dir = v;
    if (auto v = take("N1"); !v.empty()) cfg.N1 = parse_i64("N1", v);
    if (auto v = take("R"); !v.empty()) cfg.stretch = parse_i64("R", v);
    if (auto v = take("height_factor"); !v.empty())
        cfg.height_factor = parse_i64("height_factor", v);

    if (!kv.empty()) throw ConfigError("unknown key '" + kv.begin()->first + "'");

    if (cfg.experiment == "construct" || cfg.experiment == "verify") {
        if (cfg.seq.a.empty()) throw ConfigError("key 'a': construction needs a sequence");
        if (cfg.M.size() != cfg.seq.a.size())
            throw ConfigError("key 'M': need one time floor per sequence entry");
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace slowbirkhoff

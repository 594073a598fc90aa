#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slowbirkhoff/observable.hpp"
#include "slowbirkhoff/slowdown.hpp"

namespace slowbirkhoff {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key = value run description ('#' comments). Rationals are written as
// "p/q" so exact runs never pass through floating point.
struct RunConfig {
    std::string experiment = "construct";  // construct|verify|lemma3|defect|remark2
    SystemSpec spec = SystemSpec::odometer(1);
    BaseObservable f0 = BaseObservable::constant(1, Rat(2));
    SlowSequence seq;
    std::vector<std::int64_t> M;
    Rat eps = 0;  // 0 = no trim
    std::int64_t N_max = std::int64_t(1) << 40;
    std::string mode = "exact";  // exact | mc
    std::int64_t samples = 100000;
    double confidence = 0.99;
    std::string out_dir = "out";
    // remark2 block
    std::int64_t N1 = 8;
    std::int64_t stretch = 64;
    std::int64_t height_factor = 128;

    std::string source_text;  // raw config text (hashed into reports)
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace slowbirkhoff

#pragma once

#include <string>
#include <vector>

#include "slowbirkhoff/averaging.hpp"
#include "slowbirkhoff/config.hpp"
#include "slowbirkhoff/slowdown.hpp"

namespace slowbirkhoff {

// Serialized run artifacts; every exact number prints as p/q so reruns with the
// same config and seed are byte-identical.
std::string certificates_csv(const std::vector<StepRecord>& steps);
std::string final_csv(const FinalReport& report);
std::string towers_dump(const std::vector<StepRecord>& steps);
std::string deviation_csv(const std::vector<std::pair<int, DeviationReport>>& rows);
std::string construction_summary(const RunConfig& cfg, const ConstructionRun& run);

std::string tower_line(int k, const RokhlinTower& tower, const Rat& outer, const Rat& inner,
                       std::int64_t N);
// inverse of tower_line, for recertification from a dump
struct DumpedTower {
    int k = 0;
    std::int64_t N = 0;
    std::shared_ptr<const RokhlinTower> tower;
};
std::vector<DumpedTower> parse_towers_dump(const std::string& text, int dimension);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace slowbirkhoff

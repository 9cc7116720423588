#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Desk-scale model-vs-data battery behind the `validate` subcommand: one or
// more checks per model property, each with a formula anchor and a
// tolerance that scales with the --tolerance-scale override.

namespace amp {

inline constexpr const char* kVersion = "1.0.0";

struct Check {
    std::string name;
    std::string anchor;  // the model relation the check pins down
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::string version;
    uint64_t seed = 0;
    double tolerance_scale = 1.0;
    bool pass = false;
    std::vector<Check> checks;
};

ValidationReport run_validation_battery(uint64_t seed, double tolerance_scale,
                                        unsigned n_threads = 1);

// stable field order, suitable for byte-comparison across runs
std::string to_json(const ValidationReport& report);

}  // namespace amp

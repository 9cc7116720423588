#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "amp/onoff_source.hpp"

// CSV trace formats. Binned traces carry a one-line metadata preamble
//   # delta=<width> origin=<t0> n=<length> seed=<seed>
// followed by a `bin_index,value` table; event traces are a
// `t_start,duration,rate` table with one row per On period. All floats are
// written with %.17g so that a read-back reproduces the exact doubles.

namespace amp {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string format_double(double x);

void write_binned_csv(const std::string& path, const BinnedTrace& trace,
                      uint64_t seed);

struct BinnedCsv {
    BinnedTrace trace;
    uint64_t seed = 0;
};

// throws IoError with "<path>:<line>: <reason>" on any malformed content
BinnedCsv read_binned_csv(const std::string& path);

struct EventRow {
    double t_start;
    double duration;
    double rate;
};

void write_event_csv(const std::string& path, const RenewalTimeline& timeline);

std::vector<EventRow> read_event_csv(const std::string& path);

}  // namespace amp

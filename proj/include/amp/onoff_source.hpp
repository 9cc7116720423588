#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "amp/distributions.hpp"

// One On/Off traffic source: alternating renewal timeline (On first, S_0 = 0),
// per-burst rates (constant or Bounded Pareto, redrawn each On period), exact
// interval-overlap binning, and the closed-form stationary marginal.

namespace amp {

struct ConstantRate {
    double c;
};

struct BoundedParetoRate {
    BoundedParetoLaw law;
};

using RateMode = std::variant<ConstantRate, BoundedParetoRate>;

struct SourceConfig {
    ParetoLaw on_law;   // X_j durations
    ParetoLaw off_law;  // Y_j durations
    RateMode rate;      // A_j per On period
    uint64_t seed = 0;
    uint32_t source_index = 0;  // substream id when part of an aggregate

    SourceConfig(ParetoLaw on, ParetoLaw off, RateMode r, uint64_t s, uint32_t idx = 0);
};

// highest rate the config can emit (c, or the cutoff B)
double max_rate(const SourceConfig& config);

// stationary mean of the per-burst rate law
double mean_rate(const SourceConfig& config);

struct Epoch {
    double s;  // S_j, start of the j-th On period
    double x;  // X_j, On duration
    double y;  // Y_j, Off duration
    double a;  // A_j, rate during the On period
};

struct RenewalTimeline {
    std::vector<Epoch> epochs;  // S_0 = 0, S_{j+1} = S_j + X_j + Y_j
    double horizon = 0.0;
};

struct BinnedTrace {
    double bin_width = 0.0;
    double origin = 0.0;
    std::vector<double> values;  // mean rate per bin
};

// atom at zero plus a (sub-)density on [lo, hi) plus an atom at hi; the three
// parts sum to one
struct MixedMarginal {
    double atom_at_zero = 0.0;
    std::function<double(double)> continuous_density;
    double lo = 0.0;
    double hi = 0.0;
    double atom_at_hi = 0.0;
};

// draw alternating On/Off epochs until the horizon is covered; the last epoch
// starts before the horizon and may extend beyond it
RenewalTimeline generate_timeline(const SourceConfig& config, double horizon);

// A_j when t lies in [S_j, S_j + X_j), 0 during Off periods; t in [0, horizon)
double rate_at(const RenewalTimeline& timeline, double t);

// bin m holds (1/delta) * integral of the rate over [m*delta, (m+1)*delta),
// from exact interval overlaps; length is ceil(horizon/delta)
BinnedTrace bin_trace(const RenewalTimeline& timeline, double delta);

// H = (3 - min(alpha_0, alpha_1)) / 2; indices in (1, 2], with 2 standing in
// for any finite-variance duration law
double theoretical_hurst(double alpha_0, double alpha_1);

// stationary marginal of the instantaneous rate: P(0) = mu_0/(mu_0+mu_1),
// continuous part A_1 times the rate density, atom at B scaled by A_1
MixedMarginal single_source_marginal(const SourceConfig& config);

// long-run time average of the rate, A_1 * mean_rate
double expected_load(const SourceConfig& config);

}  // namespace amp

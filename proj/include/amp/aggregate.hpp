#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amp/onoff_source.hpp"

// Superposition of N independent On/Off sources on one link: aggregate
// binned traces, the closed-form marginal of the instantaneous sum rate
// (displaced-Pareto body anchored by the k_B(N) recursion, Monte-Carlo
// tail above B), a stationary-snapshot Monte-Carlo oracle, and the link
// capacity admissibility check.

namespace amp {

struct AggregateConfig {
    size_t n_sources;
    SourceConfig per_source;  // template; seed and source_index are overridden
    double link_capacity;     // M_l
    uint64_t master_seed;
    // optional heterogeneous cutoffs B_i; empty means identical sources.
    // The closed-form marginal is only evaluated in the homogeneous case.
    std::vector<double> per_source_cutoffs;

    AggregateConfig(size_t n, SourceConfig proto, double capacity, uint64_t seed,
                    std::vector<double> cutoffs = {});

    bool homogeneous() const { return per_source_cutoffs.empty(); }
    double total_peak() const;            // sum of per-source maximum rates
    SourceConfig source(size_t i) const;  // i-th source with its substream id
};

// elementwise sum; every trace must share bin_width, origin, and length
BinnedTrace superpose(const std::vector<BinnedTrace>& traces);

// generate, bin, and sum all sources; output does not depend on n_threads
BinnedTrace aggregate_trace(const AggregateConfig& config, double horizon,
                            double delta, unsigned n_threads = 1);

// scale k_B(N) of the aggregate body, as the mixture-weight fixed point
// anchored at k_B(1) = k_B:
//   k(n)^{a+1} = [w2 k(n-1)^{a+1} + w1 k_B^{a+1} + w3 (k(n-1)+k_B)^{a+1}]
//                / (1 - A_0^n)
// with w1 = A_0^{n-1} A_1, w2 = A_0 - A_0^n, w3 = A_1 (1 - A_0^{n-1})
double kb_recursion(size_t n, double a0, double a1, double alpha_b, double k_b);

// one stationary snapshot of the aggregate rate per sample index: each
// source contributes Bernoulli(A_1) x rate-law draw; sample j is fed by
// its own substream, so the output is identical for any n_threads
std::vector<double> mc_snapshot_samples(const AggregateConfig& config,
                                        size_t n_samples, unsigned n_threads = 1);

struct SnapshotHistogram {
    size_t n_samples = 0;
    double zero_frequency = 0.0;  // exact zeros
    double mass_at_cutoff = 0.0;  // samples exactly at B (homogeneous case)
    std::vector<double> edges;    // linear grid over [min positive rate, sum of peaks]
    std::vector<double> masses;   // per-bin probability; with the two point
                                  // masses above these sum to one
};

SnapshotHistogram mc_marginal_oracle(const AggregateConfig& config, size_t n_samples,
                                     size_t n_bins = 200, unsigned n_threads = 1);

struct MarginalOptions {
    size_t mc_samples = 1'000'000;
    double l1_accept = 0.05;  // keep the recursion only if its body passes this
    size_t l1_bins = 200;
    size_t tail_bins = 100;
    unsigned n_threads = 1;
};

struct AggregateMarginal {
    double atom_at_zero = 0.0;  // A_0^N
    double k_bn = 0.0;          // body scale k_B(N)
    double body_shape = 0.0;    // alpha_B (the rate-law index)
    double body_weight = 0.0;   // 1 - A_0^N
    double cutoff = 0.0;        // B
    double peak = 0.0;          // N*B
    double atom_at_cutoff = 0.0;      // N A_1 p_B A_0^{N-1}, exactly one pegged source
    double tail_mass = 0.0;           // Monte-Carlo mass on (B, N*B]
    std::vector<double> tail_edges;   // histogram of that tail region
    std::vector<double> tail_masses;
    std::string method;         // "recursion" or "least-squares"
    double body_l1_vs_mc = 0.0; // L1 distance of the body against the oracle
    size_t mc_samples = 0;

    // w (1 - A_0^N) alpha_B k_B(N)^{alpha_B} x^{-(alpha_B+1)} on [k_B(N), B)
    double body_density(double x) const;
};

AggregateMarginal aggregate_marginal(const AggregateConfig& config,
                                     const MarginalOptions& opt = {});

struct CapacityReport {
    double total_peak = 0.0;     // N*B (or the sum of the overrides)
    double link_capacity = 0.0;  // M_l
    double headroom = 0.0;       // M_l - N*B, negative when inadmissible
    bool pass = false;           // strict N*B < M_l
};

CapacityReport check_capacity(const AggregateConfig& config);

}  // namespace amp

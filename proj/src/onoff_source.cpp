#include "amp/onoff_source.hpp"

#include <algorithm>
#include <cmath>

#include "amp/rng.hpp"

namespace amp {

SourceConfig::SourceConfig(ParetoLaw on, ParetoLaw off, RateMode r, uint64_t s, uint32_t idx)
    : on_law(on), off_law(off), rate(std::move(r)), seed(s), source_index(idx) {
    // duration tails must give finite mean and infinite variance
    for (const ParetoLaw* law : {&on_law, &off_law}) {
        if (!(law->shape > 1.0 && law->shape < 2.0))
            throw std::invalid_argument("SourceConfig: duration shape must lie in (1,2)");
    }
    if (const auto* cr = std::get_if<ConstantRate>(&rate)) {
        if (!(cr->c > 0.0) || !std::isfinite(cr->c))
            throw std::invalid_argument("SourceConfig: constant rate must be positive");
    }
}

double max_rate(const SourceConfig& config) {
    if (const auto* cr = std::get_if<ConstantRate>(&config.rate)) return cr->c;
    return std::get<BoundedParetoRate>(config.rate).law.cutoff;
}

double mean_rate(const SourceConfig& config) {
    if (const auto* cr = std::get_if<ConstantRate>(&config.rate)) return cr->c;
    return bpareto_mean(std::get<BoundedParetoRate>(config.rate).law);
}

RenewalTimeline generate_timeline(const SourceConfig& config, double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("generate_timeline: horizon must be positive and finite");

    // durations and rates come from separate substreams so the two sequences
    // are independent and a change of rate mode cannot shift the timeline
    UniformStream durations(config.seed, config.source_index, StreamPurpose::durations);
    UniformStream rates(config.seed, config.source_index, StreamPurpose::rates);

    const auto* cr = std::get_if<ConstantRate>(&config.rate);
    const BoundedParetoLaw* bp =
        cr ? nullptr : &std::get<BoundedParetoRate>(config.rate).law;

    RenewalTimeline tl;
    tl.horizon = horizon;
    double s = 0.0;
    while (s < horizon) {
        Epoch e;
        e.s = s;
        e.x = pareto_sample(config.on_law, durations.next_double());
        e.y = pareto_sample(config.off_law, durations.next_double());
        e.a = cr ? cr->c : bpareto_sample(*bp, rates.next_double());
        tl.epochs.push_back(e);
        s += e.x + e.y;
    }
    return tl;
}

double rate_at(const RenewalTimeline& timeline, double t) {
    if (!(t >= 0.0 && t < timeline.horizon))
        throw std::invalid_argument("rate_at: t must lie in [0, horizon)");
    // find the last epoch with S_j <= t
    auto it = std::upper_bound(timeline.epochs.begin(), timeline.epochs.end(), t,
                               [](double v, const Epoch& e) { return v < e.s; });
    if (it == timeline.epochs.begin()) return 0.0;
    const Epoch& e = *(it - 1);
    return (t < e.s + e.x) ? e.a : 0.0;
}

BinnedTrace bin_trace(const RenewalTimeline& timeline, double delta) {
    if (!(delta > 0.0 && delta <= timeline.horizon))
        throw std::invalid_argument("bin_trace: need 0 < delta <= horizon");

    BinnedTrace tr;
    tr.bin_width = delta;
    tr.origin = 0.0;
    const size_t n = static_cast<size_t>(std::ceil(timeline.horizon / delta));
    tr.values.assign(n, 0.0);

    std::vector<double> cap(n, 0.0);
    for (const Epoch& e : timeline.epochs) {
        double lo = e.s;
        double hi = std::min(e.s + e.x, timeline.horizon);
        if (hi <= lo) continue;
        size_t first = static_cast<size_t>(lo / delta);
        size_t last = std::min(n - 1, static_cast<size_t>(hi / delta));
        for (size_t m = first; m <= last; ++m) {
            double a = std::max(lo, static_cast<double>(m) * delta);
            double b = std::min(hi, static_cast<double>(m + 1) * delta);
            if (b > a) {
                tr.values[m] += e.a * (b - a);
                cap[m] = std::max(cap[m], e.a);
            }
        }
    }
    // bin-edge roundoff at large t can inflate the overlap a hair past delta;
    // the bin mean can never exceed the fastest burst that touches the bin
    for (size_t m = 0; m < n; ++m)
        tr.values[m] = std::min(tr.values[m] / delta, cap[m]);
    return tr;
}

double theoretical_hurst(double alpha_0, double alpha_1) {
    for (double a : {alpha_0, alpha_1}) {
        if (!(a > 1.0 && a <= 2.0))
            throw std::invalid_argument("theoretical_hurst: indices must lie in (1,2]");
    }
    return (3.0 - std::min(alpha_0, alpha_1)) / 2.0;
}

MixedMarginal single_source_marginal(const SourceConfig& config) {
    double mu1 = pareto_mean(config.on_law);
    double mu0 = pareto_mean(config.off_law);
    double a1 = mu1 / (mu0 + mu1);

    MixedMarginal m;
    m.atom_at_zero = mu0 / (mu0 + mu1);
    if (const auto* cr = std::get_if<ConstantRate>(&config.rate)) {
        // constant rate is the collapsed k_B = B law: a second atom at c
        m.lo = cr->c;
        m.hi = cr->c;
        m.atom_at_hi = a1;
        m.continuous_density = [](double) { return 0.0; };
        return m;
    }
    const BoundedParetoLaw law = std::get<BoundedParetoRate>(config.rate).law;
    m.lo = law.scale;
    m.hi = law.cutoff;
    m.atom_at_hi = a1 * bpareto_atom_mass(law);
    m.continuous_density = [law, a1](double x) { return a1 * bpareto_pdf(law, x); };
    return m;
}

double expected_load(const SourceConfig& config) {
    double mu1 = pareto_mean(config.on_law);
    double mu0 = pareto_mean(config.off_law);
    return mu1 / (mu0 + mu1) * mean_rate(config);
}

}  // namespace amp

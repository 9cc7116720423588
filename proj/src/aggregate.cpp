#include "amp/aggregate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <variant>

#include "amp/rng.hpp"

namespace amp {

namespace {

double on_probability(const SourceConfig& s) {
    double mu1 = pareto_mean(s.on_law);
    double mu0 = pareto_mean(s.off_law);
    return mu1 / (mu0 + mu1);
}

double min_positive_rate(const SourceConfig& s) {
    if (const auto* c = std::get_if<ConstantRate>(&s.rate)) return c->c;
    return std::get<BoundedParetoRate>(s.rate).law.scale;
}

void run_partitioned(size_t n_items, unsigned n_threads,
                     const std::function<void(size_t, size_t)>& chunk) {
    n_threads = std::max(1u, n_threads);
    size_t width = std::max<size_t>(1, (n_items + n_threads - 1) / n_threads);
    if (n_threads == 1 || n_items <= width) {
        chunk(0, n_items);
        return;
    }
    std::vector<std::thread> pool;
    for (size_t lo = 0; lo < n_items; lo += width)
        pool.emplace_back(chunk, lo, std::min(n_items, lo + width));
    for (auto& t : pool) t.join();
}

}  // namespace

AggregateConfig::AggregateConfig(size_t n, SourceConfig proto, double capacity,
                                 uint64_t seed, std::vector<double> cutoffs)
    : n_sources(n),
      per_source(std::move(proto)),
      link_capacity(capacity),
      master_seed(seed),
      per_source_cutoffs(std::move(cutoffs)) {
    if (n_sources < 1)
        throw std::invalid_argument("AggregateConfig: n_sources must be >= 1");
    if (!(link_capacity > 0.0) || !std::isfinite(link_capacity))
        throw std::invalid_argument("AggregateConfig: link_capacity must be positive");
    if (!per_source_cutoffs.empty()) {
        const auto* bp = std::get_if<BoundedParetoRate>(&per_source.rate);
        if (!bp)
            throw std::invalid_argument(
                "AggregateConfig: cutoff overrides need a Bounded-Pareto rate mode");
        if (per_source_cutoffs.size() != n_sources)
            throw std::invalid_argument(
                "AggregateConfig: need one cutoff per source or none");
        for (double b : per_source_cutoffs)
            if (!std::isfinite(b) || b < bp->law.scale)
                throw std::invalid_argument(
                    "AggregateConfig: every cutoff must be finite and >= k_B");
    }
}

double AggregateConfig::total_peak() const {
    if (homogeneous()) return static_cast<double>(n_sources) * max_rate(per_source);
    double total = 0.0;
    for (double b : per_source_cutoffs) total += b;
    return total;
}

SourceConfig AggregateConfig::source(size_t i) const {
    if (i >= n_sources) throw std::out_of_range("AggregateConfig: source index");
    RateMode rate = per_source.rate;
    if (!homogeneous()) {
        const auto& law = std::get<BoundedParetoRate>(per_source.rate).law;
        rate = BoundedParetoRate{
            BoundedParetoLaw(law.shape, law.scale, per_source_cutoffs[i])};
    }
    return SourceConfig(per_source.on_law, per_source.off_law, rate, master_seed,
                        static_cast<uint32_t>(i));
}

BinnedTrace superpose(const std::vector<BinnedTrace>& traces) {
    if (traces.empty()) throw std::invalid_argument("superpose: no traces");
    const BinnedTrace& ref = traces.front();
    BinnedTrace out;
    out.bin_width = ref.bin_width;
    out.origin = ref.origin;
    out.values.assign(ref.values.size(), 0.0);
    for (const auto& tr : traces) {
        if (tr.bin_width != ref.bin_width || tr.origin != ref.origin ||
            tr.values.size() != ref.values.size())
            throw std::invalid_argument("superpose: traces are on different grids");
        for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += tr.values[i];
    }
    return out;
}

BinnedTrace aggregate_trace(const AggregateConfig& config, double horizon,
                            double delta, unsigned n_threads) {
    std::vector<BinnedTrace> parts(config.n_sources);
    std::atomic<size_t> cursor{0};
    auto worker = [&] {
        for (size_t i = cursor.fetch_add(1); i < config.n_sources;
             i = cursor.fetch_add(1))
            parts[i] = bin_trace(generate_timeline(config.source(i), horizon), delta);
    };
    unsigned used = std::min<unsigned>(std::max(1u, n_threads),
                                       static_cast<unsigned>(config.n_sources));
    if (used == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < used; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return superpose(parts);
}

double kb_recursion(size_t n, double a0, double a1, double alpha_b, double k_b) {
    if (n < 1) throw std::invalid_argument("kb_recursion: n must be >= 1");
    if (!(a0 >= 0.0) || !(a0 < 1.0) || !(a1 > 0.0) || !(a1 <= 1.0) ||
        std::abs(a0 + a1 - 1.0) > 1e-9)
        throw std::invalid_argument("kb_recursion: A_0, A_1 must be complementary");
    if (!(alpha_b > 0.0) || !(k_b > 0.0) || !std::isfinite(alpha_b) ||
        !std::isfinite(k_b))
        throw std::invalid_argument("kb_recursion: alpha_B and k_B must be positive");

    const double p = alpha_b + 1.0;
    double k = k_b;
    for (size_t m = 2; m <= n; ++m) {
        double a0m1 = std::pow(a0, static_cast<double>(m - 1));
        double a0m = a0m1 * a0;
        double w1 = a0m1 * a1;
        double w2 = a0 - a0m;
        double w3 = a1 * (1.0 - a0m1);
        double num = w2 * std::pow(k, p) + w1 * std::pow(k_b, p) +
                     w3 * std::pow(k + k_b, p);
        k = std::pow(num / (1.0 - a0m), 1.0 / p);
        if (!std::isfinite(k)) {
            std::ostringstream msg;
            msg << "kb_recursion: non-finite k_B(" << m << ") from A_0=" << a0
                << " alpha_B=" << alpha_b << " k_B=" << k_b;
            throw std::runtime_error(msg.str());
        }
    }
    return k;
}

std::vector<double> mc_snapshot_samples(const AggregateConfig& config,
                                        size_t n_samples, unsigned n_threads) {
    if (n_samples < 10'000)
        throw std::invalid_argument("mc_snapshot_samples: need at least 10^4 samples");
    const double a1 = on_probability(config.per_source);
    const size_t n_src = config.n_sources;

    // resolve the per-source draw up front
    std::vector<BoundedParetoLaw> laws;
    double const_rate = 0.0;
    bool constant = false;
    if (const auto* c = std::get_if<ConstantRate>(&config.per_source.rate)) {
        constant = true;
        const_rate = c->c;
    } else {
        const auto& base = std::get<BoundedParetoRate>(config.per_source.rate).law;
        for (size_t i = 0; i < n_src; ++i)
            laws.push_back(config.homogeneous()
                               ? base
                               : BoundedParetoLaw(base.shape, base.scale,
                                                  config.per_source_cutoffs[i]));
    }

    std::vector<double> out(n_samples);
    run_partitioned(n_samples, n_threads, [&](size_t lo, size_t hi) {
        for (size_t j = lo; j < hi; ++j) {
            UniformStream stream(config.master_seed, j, StreamPurpose::monte_carlo);
            double total = 0.0;
            for (size_t i = 0; i < n_src; ++i) {
                if (stream.next_double() < a1)
                    total += constant ? const_rate
                                      : bpareto_sample(laws[i], stream.next_double());
            }
            out[j] = total;
        }
    });
    return out;
}

SnapshotHistogram mc_marginal_oracle(const AggregateConfig& config, size_t n_samples,
                                     size_t n_bins, unsigned n_threads) {
    if (n_bins < 1) throw std::invalid_argument("mc_marginal_oracle: n_bins");
    auto samples = mc_snapshot_samples(config, n_samples, n_threads);

    SnapshotHistogram h;
    h.n_samples = n_samples;
    const double lo = min_positive_rate(config.per_source);
    const double hi = config.total_peak();
    const double peg = config.homogeneous() ? max_rate(config.per_source) : -1.0;
    h.edges.resize(n_bins + 1);
    for (size_t i = 0; i <= n_bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / n_bins;
    h.masses.assign(n_bins, 0.0);

    size_t zeros = 0, pegged = 0;
    std::vector<size_t> counts(n_bins, 0);
    const double width = (hi - lo) / n_bins;
    for (double x : samples) {
        if (x == 0.0) {
            ++zeros;
        } else if (x == peg) {
            ++pegged;
        } else {
            auto idx = static_cast<size_t>((x - lo) / width);
            counts[std::min(idx, n_bins - 1)] += 1;
        }
    }
    h.zero_frequency = static_cast<double>(zeros) / n_samples;
    h.mass_at_cutoff = static_cast<double>(pegged) / n_samples;
    for (size_t i = 0; i < n_bins; ++i)
        h.masses[i] = static_cast<double>(counts[i]) / n_samples;
    return h;
}

double AggregateMarginal::body_density(double x) const {
    if (x < k_bn || x >= cutoff) return 0.0;
    return body_weight * body_shape * std::pow(k_bn, body_shape) *
           std::pow(x, -(body_shape + 1.0));
}

namespace {

// L1 distance between the sampled and the closed-form body mass on a linear
// grid over [k_bn, B); samples at exactly B belong to the atom, not the body
double body_l1(const std::vector<double>& samples, double wnz, double k_bn,
               double alpha_b, double cutoff, size_t n_bins) {
    const double width = (cutoff - k_bn) / n_bins;
    std::vector<size_t> counts(n_bins, 0);
    for (double x : samples) {
        if (x < k_bn || x >= cutoff) continue;
        auto idx = static_cast<size_t>((x - k_bn) / width);
        counts[std::min(idx, n_bins - 1)] += 1;
    }
    double l1 = 0.0;
    for (size_t i = 0; i < n_bins; ++i) {
        double blo = k_bn + i * width;
        double bhi = (i + 1 == n_bins) ? cutoff : k_bn + (i + 1) * width;
        double p_cf = wnz * (std::pow(k_bn / blo, alpha_b) -
                             std::pow(k_bn / bhi, alpha_b));
        double p_mc = static_cast<double>(counts[i]) / samples.size();
        l1 += std::abs(p_mc - p_cf);
    }
    return l1;
}

// intercept-only least squares for k_bn on log-spaced density bins over [k_B, B)
double fit_k_bn(const std::vector<double>& samples, double wnz, double alpha_b,
                double k_b, double cutoff, size_t n_bins) {
    const double llo = std::log(k_b), lhi = std::log(cutoff);
    std::vector<size_t> counts(n_bins, 0);
    for (double x : samples) {
        if (x < k_b || x >= cutoff) continue;
        auto idx = static_cast<size_t>(n_bins * (std::log(x) - llo) / (lhi - llo));
        counts[std::min(idx, n_bins - 1)] += 1;
    }
    double acc = 0.0;
    size_t used = 0;
    for (size_t i = 0; i < n_bins; ++i) {
        if (counts[i] == 0) continue;
        double elo = std::exp(llo + (lhi - llo) * static_cast<double>(i) / n_bins);
        double ehi = std::exp(llo + (lhi - llo) * static_cast<double>(i + 1) / n_bins);
        double dens = static_cast<double>(counts[i]) / samples.size() / (ehi - elo);
        double ctr = std::sqrt(elo * ehi);
        acc += std::log(dens) + (alpha_b + 1.0) * std::log(ctr);
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("aggregate_marginal: no body samples to fit k_B(N)");
    return std::exp((acc / used - std::log(wnz * alpha_b)) / alpha_b);
}

}  // namespace

AggregateMarginal aggregate_marginal(const AggregateConfig& config,
                                     const MarginalOptions& opt) {
    const auto* bp = std::get_if<BoundedParetoRate>(&config.per_source.rate);
    if (!bp)
        throw std::invalid_argument(
            "aggregate_marginal: the closed form needs a Bounded-Pareto rate mode");
    if (!config.homogeneous())
        throw std::invalid_argument(
            "aggregate_marginal: the closed form assumes identical sources");
    const double alpha_b = bp->law.shape;
    const double k_b = bp->law.scale;
    const double cutoff = bp->law.cutoff;
    if (!(k_b < cutoff))
        throw std::invalid_argument(
            "aggregate_marginal: a degenerate rate law has no continuous body");

    const double a1 = on_probability(config.per_source);
    const double a0 = 1.0 - a1;
    const auto n = static_cast<double>(config.n_sources);

    AggregateMarginal m;
    m.atom_at_zero = std::pow(a0, n);
    m.body_shape = alpha_b;
    m.body_weight = 1.0 - m.atom_at_zero;
    m.cutoff = cutoff;
    m.peak = n * cutoff;
    m.atom_at_cutoff =
        n * a1 * bpareto_atom_mass(bp->law) * std::pow(a0, n - 1.0);
    m.mc_samples = opt.mc_samples;

    auto samples = mc_snapshot_samples(config, opt.mc_samples, opt.n_threads);

    double k_rec = kb_recursion(config.n_sources, a0, a1, alpha_b, k_b);
    double l1_rec =
        body_l1(samples, m.body_weight, k_rec, alpha_b, cutoff, opt.l1_bins);
    if (l1_rec <= opt.l1_accept) {
        m.k_bn = k_rec;
        m.body_l1_vs_mc = l1_rec;
        m.method = "recursion";
    } else {
        double k_fit =
            fit_k_bn(samples, m.body_weight, alpha_b, k_b, cutoff, opt.l1_bins);
        m.k_bn = k_fit;
        m.body_l1_vs_mc =
            body_l1(samples, m.body_weight, k_fit, alpha_b, cutoff, opt.l1_bins);
        m.method = "least-squares";
    }

    if (config.n_sources > 1) {
        const size_t nb = opt.tail_bins;
        const double width = (m.peak - cutoff) / nb;
        m.tail_edges.resize(nb + 1);
        for (size_t i = 0; i <= nb; ++i) m.tail_edges[i] = cutoff + i * width;
        std::vector<size_t> counts(nb, 0);
        for (double x : samples) {
            if (x <= cutoff) continue;
            auto idx = static_cast<size_t>((x - cutoff) / width);
            counts[std::min(idx, nb - 1)] += 1;
        }
        m.tail_masses.assign(nb, 0.0);
        for (size_t i = 0; i < nb; ++i) {
            m.tail_masses[i] = static_cast<double>(counts[i]) / samples.size();
            m.tail_mass += m.tail_masses[i];
        }
    }
    return m;
}

CapacityReport check_capacity(const AggregateConfig& config) {
    CapacityReport r;
    r.total_peak = config.total_peak();
    r.link_capacity = config.link_capacity;
    r.headroom = r.link_capacity - r.total_peak;
    r.pass = r.total_peak < r.link_capacity;
    return r;
}

}  // namespace amp

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <tuple>
#include <vector>

#include "amp/aggregate.hpp"
#include "amp/estimators.hpp"
#include "amp/onoff_source.hpp"
#include "amp/spectrum_model.hpp"
#include "amp/validation.hpp"

namespace py = pybind11;

namespace {

amp::ParetoLaw law_from(const std::pair<double, double>& p) {
    return amp::ParetoLaw(p.first, p.second);
}

// a bare number means a constant rate; a 3-tuple means Bounded Pareto
// (alpha, k, cutoff)
amp::RateMode rate_from(const py::object& spec) {
    if (py::isinstance<py::float_>(spec) || py::isinstance<py::int_>(spec))
        return amp::ConstantRate{spec.cast<double>()};
    auto t = spec.cast<std::tuple<double, double, double>>();
    return amp::BoundedParetoRate{
        amp::BoundedParetoLaw(std::get<0>(t), std::get<1>(t), std::get<2>(t))};
}

amp::SourceConfig source_from(const std::pair<double, double>& on,
                              const std::pair<double, double>& off,
                              const py::object& rate, uint64_t seed,
                              uint32_t index) {
    return amp::SourceConfig(law_from(on), law_from(off), rate_from(rate), seed,
                             index);
}

py::dict trace_dict(const amp::BinnedTrace& tr) {
    py::dict d;
    d["bin_width"] = tr.bin_width;
    d["origin"] = tr.origin;
    d["values"] = tr.values;
    return d;
}

py::dict hurst_dict(const amp::HurstEstimate& h) {
    py::dict d;
    d["method"] = amp::hurst_method_name(h.method);
    d["value"] = h.value;
    d["stderr"] = h.stderr_slope;
    d["n_points"] = h.n_points;
    d["clamped"] = h.clamped;
    return d;
}

amp::BinnedTrace trace_from(const std::vector<double>& values, double bin_width) {
    amp::BinnedTrace tr;
    tr.bin_width = bin_width;
    tr.values = values;
    return tr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "heavy-tailed On/Off traffic synthesis and long-range-dependence "
              "analysis";

    m.def("theoretical_hurst", &amp::theoretical_hurst, py::arg("alpha_on"),
          py::arg("alpha_off"),
          "H = (3 - min(alpha_on, alpha_off)) / 2 for indices in (1, 2]");

    m.def(
        "generate_events",
        [](std::pair<double, double> on, std::pair<double, double> off,
           py::object rate, double horizon, uint64_t seed, uint32_t index) {
            auto tl = amp::generate_timeline(source_from(on, off, rate, seed, index),
                                             horizon);
            std::vector<std::tuple<double, double, double, double>> rows;
            rows.reserve(tl.epochs.size());
            for (const auto& e : tl.epochs) rows.emplace_back(e.s, e.x, e.y, e.a);
            return rows;
        },
        py::arg("on"), py::arg("off"), py::arg("rate"), py::arg("horizon"),
        py::arg("seed") = 0, py::arg("index") = 0,
        "alternating renewal epochs as (start, on_len, off_len, rate) tuples");

    m.def(
        "generate_trace",
        [](std::pair<double, double> on, std::pair<double, double> off,
           py::object rate, double horizon, double bin_width, uint64_t seed,
           uint32_t index) {
            auto src = source_from(on, off, rate, seed, index);
            return trace_dict(amp::bin_trace(amp::generate_timeline(src, horizon),
                                             bin_width));
        },
        py::arg("on"), py::arg("off"), py::arg("rate"), py::arg("horizon"),
        py::arg("bin_width"), py::arg("seed") = 0, py::arg("index") = 0,
        "one source, binned to mean rates per bin");

    m.def(
        "aggregate_trace",
        [](size_t n_sources, std::pair<double, double> on,
           std::pair<double, double> off, py::object rate, double link_capacity,
           double horizon, double bin_width, uint64_t seed, unsigned threads) {
            amp::AggregateConfig cfg(n_sources, source_from(on, off, rate, seed, 0),
                                     link_capacity, seed);
            return trace_dict(amp::aggregate_trace(cfg, horizon, bin_width, threads));
        },
        py::arg("n_sources"), py::arg("on"), py::arg("off"), py::arg("rate"),
        py::arg("link_capacity"), py::arg("horizon"), py::arg("bin_width"),
        py::arg("seed") = 0, py::arg("threads") = 1,
        "superposition of independent sources; byte-stable across threads");

    m.def("expected_load",
          [](std::pair<double, double> on, std::pair<double, double> off,
             py::object rate) {
              return amp::expected_load(source_from(on, off, rate, 0, 0));
          },
          py::arg("on"), py::arg("off"), py::arg("rate"));

    m.def(
        "single_marginal",
        [](std::pair<double, double> on, std::pair<double, double> off,
           py::object rate) {
            auto m1 = amp::single_source_marginal(source_from(on, off, rate, 0, 0));
            py::dict d;
            d["atom_at_zero"] = m1.atom_at_zero;
            d["lo"] = m1.lo;
            d["hi"] = m1.hi;
            d["atom_at_hi"] = m1.atom_at_hi;
            d["density"] = py::cpp_function(m1.continuous_density);
            return d;
        },
        py::arg("on"), py::arg("off"), py::arg("rate"),
        "stationary rate marginal: atoms at 0 and the cutoff plus a density");

    m.def("kb_recursion", &amp::kb_recursion, py::arg("n"), py::arg("a0"),
          py::arg("a1"), py::arg("alpha_b"), py::arg("k_b"),
          "effective lower support edge k_B(N) of the aggregate body");

    m.def(
        "aggregate_marginal",
        [](size_t n_sources, std::pair<double, double> on,
           std::pair<double, double> off, py::object rate, double link_capacity,
           uint64_t seed, size_t mc_samples, unsigned threads) {
            amp::AggregateConfig cfg(n_sources, source_from(on, off, rate, seed, 0),
                                     link_capacity, seed);
            amp::MarginalOptions opt;
            opt.mc_samples = mc_samples;
            opt.n_threads = threads;
            auto mg = amp::aggregate_marginal(cfg, opt);
            py::dict d;
            d["atom_at_zero"] = mg.atom_at_zero;
            d["k_bn"] = mg.k_bn;
            d["body_shape"] = mg.body_shape;
            d["body_weight"] = mg.body_weight;
            d["cutoff"] = mg.cutoff;
            d["peak"] = mg.peak;
            d["atom_at_cutoff"] = mg.atom_at_cutoff;
            d["tail_mass"] = mg.tail_mass;
            d["method"] = mg.method;
            d["body_l1_vs_mc"] = mg.body_l1_vs_mc;
            return d;
        },
        py::arg("n_sources"), py::arg("on"), py::arg("off"), py::arg("rate"),
        py::arg("link_capacity"), py::arg("seed") = 0,
        py::arg("mc_samples") = 200000, py::arg("threads") = 1,
        "closed-form aggregate snapshot marginal with its Monte Carlo check");

    m.def(
        "psd_model",
        [](const std::vector<double>& omegas, std::pair<double, double> on,
           std::pair<double, double> off) {
            std::vector<double> out;
            out.reserve(omegas.size());
            for (double w : omegas)
                out.push_back(amp::psd_model(w, law_from(on), law_from(off)));
            return out;
        },
        py::arg("omegas"), py::arg("on"), py::arg("off"),
        "model power spectral density of the unit-rate On/Off process");

    m.def(
        "hurst_rs",
        [](const std::vector<double>& values, double bin_width) {
            return hurst_dict(amp::hurst_rescaled_range(trace_from(values, bin_width)));
        },
        py::arg("values"), py::arg("bin_width") = 1.0);
    m.def(
        "hurst_av",
        [](const std::vector<double>& values, double bin_width) {
            return hurst_dict(
                amp::hurst_aggregated_variance(trace_from(values, bin_width)));
        },
        py::arg("values"), py::arg("bin_width") = 1.0);
    m.def(
        "hurst_spectral",
        [](const std::vector<double>& values, double bin_width) {
            return hurst_dict(amp::hurst_spectral(trace_from(values, bin_width)));
        },
        py::arg("values"), py::arg("bin_width") = 1.0);

    m.def(
        "autocorrelation",
        [](const std::vector<double>& values, size_t max_lag) {
            return amp::autocorrelation(trace_from(values, 1.0), max_lag);
        },
        py::arg("values"), py::arg("max_lag"));

    m.def("hill_tail_index", &amp::hill_tail_index, py::arg("samples"), py::arg("k"),
          "Hill estimator over the top-k order statistics");

    m.def(
        "run_validation",
        [](uint64_t seed, double tolerance_scale, unsigned threads) {
            auto rep = amp::run_validation_battery(seed, tolerance_scale, threads);
            py::list checks;
            for (const auto& c : rep.checks) {
                py::dict d;
                d["name"] = c.name;
                d["anchor"] = c.anchor;
                d["expected"] = c.expected;
                d["observed"] = c.observed;
                d["tolerance"] = c.tolerance;
                d["pass"] = c.pass;
                checks.append(d);
            }
            py::dict d;
            d["version"] = rep.version;
            d["seed"] = rep.seed;
            d["tolerance_scale"] = rep.tolerance_scale;
            d["pass"] = rep.pass;
            d["checks"] = checks;
            return d;
        },
        py::arg("seed") = 1, py::arg("tolerance_scale") = 1.0,
        py::arg("threads") = 1, "model-vs-simulation validation battery");
}

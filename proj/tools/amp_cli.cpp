#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "amp/aggregate.hpp"
#include "amp/estimators.hpp"
#include "amp/spectrum_model.hpp"
#include "amp/trace_io.hpp"
#include "amp/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// ---- config loading ---------------------------------------------------------

ordered_json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw amp::IoError("cannot open config: " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
}

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> allowed,
                    const std::string& ctx) {
    if (!j.is_object())
        throw std::invalid_argument("expected an object for " + ctx);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            throw std::invalid_argument("unknown key '" + it.key() + "' in " + ctx);
    }
}

double need_number(const ordered_json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw std::invalid_argument("missing or non-numeric '" + std::string(key) +
                                    "' in " + ctx);
    return j.at(key).get<double>();
}

uint64_t need_unsigned(const ordered_json& j, const char* key, const std::string& ctx,
                       uint64_t fallback, bool required) {
    if (!j.contains(key)) {
        if (required)
            throw std::invalid_argument("missing '" + std::string(key) + "' in " + ctx);
        return fallback;
    }
    if (!j.at(key).is_number_unsigned())
        throw std::invalid_argument("'" + std::string(key) + "' in " + ctx +
                                    " must be a non-negative integer");
    return j.at(key).get<uint64_t>();
}

amp::ParetoLaw parse_pareto(const ordered_json& j, const std::string& ctx) {
    reject_unknown(j, {"alpha", "k"}, ctx);
    return amp::ParetoLaw(need_number(j, "alpha", ctx), need_number(j, "k", ctx));
}

amp::RateMode parse_rate(const ordered_json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw std::invalid_argument("rate needs a 'type' of constant|bounded-pareto");
    std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        reject_unknown(j, {"type", "c"}, "rate");
        return amp::ConstantRate{need_number(j, "c", "rate")};
    }
    if (type == "bounded-pareto") {
        reject_unknown(j, {"type", "alpha", "k", "cutoff"}, "rate");
        return amp::BoundedParetoRate{amp::BoundedParetoLaw(
            need_number(j, "alpha", "rate"), need_number(j, "k", "rate"),
            need_number(j, "cutoff", "rate"))};
    }
    throw std::invalid_argument("rate type must be 'constant' or 'bounded-pareto'");
}

void check_mode(const ordered_json& j, const std::string& expected) {
    if (!j.contains("mode")) return;
    if (!j.at("mode").is_string() || j.at("mode").get<std::string>() != expected)
        throw std::invalid_argument("config mode does not match subcommand '" +
                                    expected + "'");
}

struct TraceRun {
    bool is_aggregate = false;
    size_t n_sources = 1;
    double link_capacity = 0.0;
    std::vector<double> cutoffs;
    double horizon = 0.0;
    double bin_width = 0.0;
    uint64_t seed = 0;
    bool emit_events = true;
    amp::ParetoLaw on{1.5, 1.0};
    amp::ParetoLaw off{1.5, 1.0};
    amp::RateMode rate = amp::ConstantRate{1.0};

    amp::SourceConfig source_config() const {
        return amp::SourceConfig(on, off, rate, seed);
    }
    amp::AggregateConfig aggregate_config() const {
        return amp::AggregateConfig(n_sources, source_config(), link_capacity, seed,
                                    cutoffs);
    }
};

TraceRun parse_trace_run(const ordered_json& j, bool aggregate_keys) {
    TraceRun run;
    if (aggregate_keys)
        reject_unknown(j,
                       {"mode", "on", "off", "rate", "horizon", "bin_width", "seed",
                        "emit_events", "n_sources", "link_capacity",
                        "per_source_cutoffs"},
                       "config");
    else
        reject_unknown(
            j, {"mode", "on", "off", "rate", "horizon", "bin_width", "seed",
                "emit_events"},
            "config");

    if (!j.contains("on") || !j.contains("off") || !j.contains("rate"))
        throw std::invalid_argument("config needs 'on', 'off', and 'rate' laws");
    run.on = parse_pareto(j.at("on"), "on");
    run.off = parse_pareto(j.at("off"), "off");
    run.rate = parse_rate(j.at("rate"));

    run.horizon = need_number(j, "horizon", "config");
    run.bin_width = need_number(j, "bin_width", "config");
    if (!(run.horizon > 0.0) || !std::isfinite(run.horizon))
        throw std::invalid_argument("horizon must be positive");
    if (!(run.bin_width > 0.0) || run.bin_width > run.horizon)
        throw std::invalid_argument("bin_width must lie in (0, horizon]");
    run.seed = need_unsigned(j, "seed", "config", 0, false);
    if (j.contains("emit_events")) {
        if (!j.at("emit_events").is_boolean())
            throw std::invalid_argument("emit_events must be boolean");
        run.emit_events = j.at("emit_events").get<bool>();
    }

    run.is_aggregate = j.contains("n_sources");
    if (run.is_aggregate) {
        run.n_sources = need_unsigned(j, "n_sources", "config", 0, true);
        run.link_capacity = need_number(j, "link_capacity", "config");
        if (j.contains("per_source_cutoffs")) {
            if (!j.at("per_source_cutoffs").is_array())
                throw std::invalid_argument("per_source_cutoffs must be an array");
            for (const auto& v : j.at("per_source_cutoffs")) {
                if (!v.is_number())
                    throw std::invalid_argument("per_source_cutoffs entries must be numbers");
                run.cutoffs.push_back(v.get<double>());
            }
        }
    }
    return run;
}

// ---- output helpers ---------------------------------------------------------

fs::path resolve_out_dir(const std::string& flag) {
    std::string dir = flag;
    if (dir.empty()) {
        if (const char* env = std::getenv("AMP_OUT_DIR")) dir = env;
    }
    if (dir.empty()) dir = ".";
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw amp::IoError("cannot create output directory: " + dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw amp::IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw amp::IoError("write failed: " + path.string());
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct LogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LogFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

// ---- analysis ---------------------------------------------------------------

ordered_json hurst_json(const amp::HurstEstimate& h) {
    ordered_json j;
    j["value"] = h.value;
    j["stderr"] = h.stderr_slope;
    j["n_points"] = h.n_points;
    j["clamped"] = h.clamped;
    return j;
}

ordered_json analyze_to_files(const amp::BinnedTrace& trace, const fs::path& out) {
    const size_t n = trace.values.size();
    if (n < 4096)
        throw std::invalid_argument("trace too short to analyze (need >= 4096 bins)");

    // degenerate input surfaces here with a clear message
    const size_t max_lag = std::min<size_t>(1000, n / 4);
    auto acf = amp::autocorrelation(trace, max_lag);

    amp::HurstOptions hopt{n >= (size_t{1} << 15) ? size_t{64} : size_t{16}, 2};
    auto rs = amp::hurst_rescaled_range(trace, hopt);
    auto av = amp::hurst_aggregated_variance(trace, hopt);
    auto sp = amp::periodogram(trace);
    amp::HurstEstimate hs;
    hs.method = amp::HurstMethod::spectral_slope;
    hs.value = (1.0 - sp.slope) / 2.0;
    hs.stderr_slope = sp.slope_stderr / 2.0;
    hs.n_points = static_cast<int>(sp.band_hi - sp.band_lo + 1);

    std::vector<double> lk, lr;
    for (size_t k = 10; k <= max_lag; ++k) {
        if (acf[k] <= 0.0) continue;
        lk.push_back(std::log(static_cast<double>(k)));
        lr.push_back(std::log(acf[k]));
    }
    bool have_beta = lk.size() >= 8;
    LogFit beta_fit;
    if (have_beta) beta_fit = fit_loglog(lk, lr);
    double beta = -beta_fit.slope;

    std::vector<double> positive;
    for (double v : trace.values)
        if (v > 0.0) positive.push_back(v);
    ordered_json tail;
    if (positive.size() >= 1000) {
        size_t k = std::max<size_t>(10, positive.size() / 100);
        try {
            tail["hill_rate_index"] = amp::hill_tail_index(positive, k);
            tail["k"] = k;
        } catch (const std::exception&) {
            tail = nullptr;
        }
    } else {
        tail = nullptr;
    }

    auto gauss = amp::gaussianity_stats(trace.values);

    double mean = 0.0;
    for (double v : trace.values) mean += v;
    mean /= static_cast<double>(n);

    ordered_json j;
    j["n_bins"] = n;
    j["bin_width"] = trace.bin_width;
    j["mean"] = mean;
    j["variance"] = amp::parseval_mean(sp);
    j["hurst"] = ordered_json::object();
    j["hurst"][amp::hurst_method_name(rs.method)] = hurst_json(rs);
    j["hurst"][amp::hurst_method_name(av.method)] = hurst_json(av);
    j["hurst"][amp::hurst_method_name(hs.method)] = hurst_json(hs);
    j["hurst_mean"] = (rs.value + av.value + hs.value) / 3.0;
    j["spectral"] = {{"slope", sp.slope},
                     {"slope_stderr", sp.slope_stderr},
                     {"residual", sp.residual},
                     {"band_bins", {sp.band_lo, sp.band_hi}},
                     {"implied_alpha", sp.slope + 2.0},
                     {"implied_hurst", (1.0 - sp.slope) / 2.0},
                     {"lrd", sp.slope > -1.0 && sp.slope < 0.0}};
    if (have_beta)
        j["acf"] = {{"beta", beta},
                    {"implied_hurst", 1.0 - beta / 2.0},
                    {"fit_lags", lk.size()}};
    else
        j["acf"] = nullptr;
    j["tail"] = tail;
    j["gaussianity"] = {{"skewness", gauss.skewness},
                        {"excess_kurtosis", gauss.excess_kurtosis},
                        {"statistic", gauss.statistic}};

    // plot-ready data
    std::string pg = "omega,power\n";
    for (size_t k = 1; k <= n / 2; ++k)
        pg += amp::format_double(sp.frequencies[k - 1]) + "," +
              amp::format_double(sp.power[k - 1]) + "\n";
    write_text(out / "periodogram.csv", pg);

    std::string vt = "m,variance\n";
    for (auto& [m, v] : amp::variance_time_points(trace, hopt))
        vt += amp::format_double(m) + "," + amp::format_double(v) + "\n";
    write_text(out / "variance_time.csv", vt);

    std::string rsd = "m,rs\n";
    for (auto& [m, v] : amp::rescaled_range_points(trace, hopt))
        rsd += amp::format_double(m) + "," + amp::format_double(v) + "\n";
    write_text(out / "rs.csv", rsd);

    std::string ac = "lag,r\n";
    for (size_t k = 0; k <= max_lag; ++k)
        ac += std::to_string(k) + "," + amp::format_double(acf[k]) + "\n";
    write_text(out / "acf.csv", ac);

    write_text(out / "analysis.json", j.dump(2) + "\n");
    return j;
}

// ---- subcommands ------------------------------------------------------------

int cmd_generate(const TraceRun& run, const fs::path& out) {
    auto src = run.source_config();
    auto tl = amp::generate_timeline(src, run.horizon);
    auto tr = amp::bin_trace(tl, run.bin_width);
    amp::write_binned_csv((out / "trace.csv").string(), tr, run.seed);
    if (run.emit_events) amp::write_event_csv((out / "events.csv").string(), tl);

    double volume = 0.0;
    for (double v : tr.values) volume += v * tr.bin_width;
    double span = static_cast<double>(tr.values.size()) * tr.bin_width;
    double load = volume / span;
    double expected = amp::expected_load(src);
    std::printf("epochs: %zu\n", tl.epochs.size());
    std::printf("bins: %zu (bin_width %s)\n", tr.values.size(),
                num(tr.bin_width).c_str());
    std::printf("load: %s (expected %s, deviation %s%%)\n", num(load).c_str(),
                num(expected).c_str(),
                num(100.0 * (load - expected) / expected).c_str());
    std::printf("wrote: %s\n", (out / "trace.csv").string().c_str());
    return 0;
}

int cmd_aggregate(const TraceRun& run, const fs::path& out, unsigned threads) {
    auto cfg = run.aggregate_config();
    auto cap = amp::check_capacity(cfg);
    if (!cap.pass)
        throw std::invalid_argument(
            "link capacity violated: peak " + num(cap.total_peak) +
            " must stay below M_l " + num(cap.link_capacity));
    auto tr = amp::aggregate_trace(cfg, run.horizon, run.bin_width, threads);
    amp::write_binned_csv((out / "trace.csv").string(), tr, run.seed);

    double volume = 0.0;
    for (double v : tr.values) volume += v * tr.bin_width;
    double span = static_cast<double>(tr.values.size()) * tr.bin_width;
    double expected = static_cast<double>(cfg.n_sources) *
                      amp::expected_load(cfg.per_source);
    std::printf("sources: %zu\n", cfg.n_sources);
    std::printf("capacity: peak %s of M_l %s (headroom %s)\n",
                num(cap.total_peak).c_str(), num(cap.link_capacity).c_str(),
                num(cap.headroom).c_str());
    std::printf("load: %s (expected %s)\n", num(volume / span).c_str(),
                num(expected).c_str());
    std::printf("wrote: %s\n", (out / "trace.csv").string().c_str());
    return 0;
}

int cmd_analyze(const std::string& trace_path, const fs::path& out) {
    auto data = amp::read_binned_csv(trace_path);
    auto j = analyze_to_files(data.trace, out);
    std::printf("bins: %zu\n", data.trace.values.size());
    std::printf("hurst: rs=%s av=%s spectral=%s mean=%s\n",
                num(j["hurst"]["rescaled-range"]["value"].get<double>()).c_str(),
                num(j["hurst"]["aggregated-variance"]["value"].get<double>()).c_str(),
                num(j["hurst"]["spectral-slope"]["value"].get<double>()).c_str(),
                num(j["hurst_mean"].get<double>()).c_str());
    std::printf("spectral slope: %s (implied alpha %s)\n",
                num(j["spectral"]["slope"].get<double>()).c_str(),
                num(j["spectral"]["implied_alpha"].get<double>()).c_str());
    if (!j["acf"].is_null())
        std::printf("acf beta: %s\n", num(j["acf"]["beta"].get<double>()).c_str());
    std::printf("wrote: %s\n", (out / "analysis.json").string().c_str());
    return 0;
}

int cmd_validate(uint64_t seed, double scale, unsigned threads, const fs::path& out) {
    auto report = amp::run_validation_battery(seed, scale, threads);
    for (const auto& c : report.checks)
        std::printf("[%s] %-22s observed=%s expected=%s tol=%s\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), num(c.observed).c_str(),
                    num(c.expected).c_str(), num(c.tolerance).c_str());
    std::printf("verdict: %s\n", report.pass ? "PASS" : "FAIL");
    write_text(out / "validation.json", amp::to_json(report));
    return report.pass ? 0 : 3;
}

int cmd_report(const TraceRun& run, double scale, unsigned threads,
               const fs::path& out) {
    amp::BinnedTrace tr;
    std::string capacity_line;
    if (run.is_aggregate) {
        auto cfg = run.aggregate_config();
        auto cap = amp::check_capacity(cfg);
        if (!cap.pass)
            throw std::invalid_argument("link capacity violated: peak " +
                                        num(cap.total_peak) + " must stay below " +
                                        num(cap.link_capacity));
        capacity_line = "- capacity: peak " + num(cap.total_peak) + " of " +
                        num(cap.link_capacity) + " (headroom " + num(cap.headroom) +
                        ")\n";
        tr = amp::aggregate_trace(cfg, run.horizon, run.bin_width, threads);
    } else {
        tr = amp::bin_trace(amp::generate_timeline(run.source_config(), run.horizon),
                            run.bin_width);
    }
    amp::write_binned_csv((out / "trace.csv").string(), tr, run.seed);
    auto analysis = analyze_to_files(tr, out);
    auto battery = amp::run_validation_battery(run.seed, scale, threads);
    write_text(out / "validation.json", amp::to_json(battery));

    double a_min = std::min(run.on.shape, run.off.shape);
    double h_theory = amp::theoretical_hurst(run.on.shape, run.off.shape);

    std::string md;
    md += "# AMP run report\n\n";
    md += "## Configuration\n\n";
    md += "- sources: " + std::to_string(run.is_aggregate ? run.n_sources : 1) + "\n";
    md += "- on: Pareto(alpha=" + num(run.on.shape) + ", k=" + num(run.on.scale) +
          "), off: Pareto(alpha=" + num(run.off.shape) + ", k=" +
          num(run.off.scale) + ")\n";
    md += "- horizon: " + num(run.horizon) + " s, bin width: " +
          num(run.bin_width) + " s, seed: " + std::to_string(run.seed) + "\n";
    md += capacity_line;
    md += "\n## Theory\n\n";
    md += "- H = (3 - min(a0, a1))/2 = " + num(h_theory) + "\n";
    md += "- spectral slope alpha - 2 = " + num(a_min - 2.0) + "\n";
    md += "- autocorrelation decay beta = 2 - 2H = " + num(2.0 - 2.0 * h_theory) +
          "\n";
    md += "\n## Estimates\n\n";
    md += "| quantity | value |\n|---|---|\n";
    md += "| H (rescaled range) | " +
          num(analysis["hurst"]["rescaled-range"]["value"].get<double>()) + " |\n";
    md += "| H (aggregated variance) | " +
          num(analysis["hurst"]["aggregated-variance"]["value"].get<double>()) +
          " |\n";
    md += "| H (spectral) | " +
          num(analysis["hurst"]["spectral-slope"]["value"].get<double>()) + " |\n";
    md += "| spectral slope | " + num(analysis["spectral"]["slope"].get<double>()) +
          " |\n";
    if (!analysis["acf"].is_null())
        md += "| acf beta | " + num(analysis["acf"]["beta"].get<double>()) + " |\n";
    md += "\n## Validation\n\n";
    md += "| check | expected | observed | tolerance | verdict |\n";
    md += "|---|---|---|---|---|\n";
    for (const auto& c : battery.checks)
        md += "| " + c.name + " | " + num(c.expected) + " | " + num(c.observed) +
              " | " + num(c.tolerance) + " | " + (c.pass ? "pass" : "FAIL") + " |\n";
    md += "\nOverall: " + std::string(battery.pass ? "PASS" : "FAIL") + "\n";
    write_text(out / "report.md", md);

    std::printf("wrote: %s\n", (out / "report.md").string().c_str());
    std::printf("validation: %s\n", battery.pass ? "PASS" : "FAIL");
    return battery.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Associative Multifractal Process traffic toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_flag, trace_path;
    uint64_t seed_flag = 0;
    double tolerance_scale = 1.0;
    unsigned threads = 1;

    auto add_common = [&](CLI::App* cmd, bool with_config) {
        if (with_config)
            cmd->add_option("--config", config_path, "JSON run configuration")
                ->required();
        cmd->add_option("--seed", seed_flag, "override the config seed");
        cmd->add_option("--out", out_flag,
                        "output directory (default $AMP_OUT_DIR or .)");
        return cmd;
    };

    auto* gen = add_common(app.add_subcommand("generate", "one On/Off source"), true);
    auto* agg =
        add_common(app.add_subcommand("aggregate", "superpose N sources"), true);
    agg->add_option("--threads", threads, "worker threads (output-invariant)");
    auto* ana = app.add_subcommand("analyze", "estimate H, spectrum, tails");
    ana->add_option("trace", trace_path, "binned CSV trace")->required();
    ana->add_option("--out", out_flag, "output directory");
    auto* val = app.add_subcommand("validate", "model-vs-data battery");
    val->add_option("--config", config_path, "JSON run configuration");
    val->add_option("--seed", seed_flag, "override the config seed");
    val->add_option("--out", out_flag, "output directory");
    val->add_option("--tolerance-scale", tolerance_scale,
                    "scale every check tolerance (0 forces failures)");
    val->add_option("--threads", threads, "worker threads (output-invariant)");
    auto* rep = add_common(
        app.add_subcommand("report", "generate + analyze + validate + markdown"),
        true);
    rep->add_option("--tolerance-scale", tolerance_scale, "scale check tolerances");
    rep->add_option("--threads", threads, "worker threads (output-invariant)");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? 0 : 1;
        }

        fs::path out = resolve_out_dir(out_flag);

        if (gen->parsed()) {
            auto j = load_config(config_path);
            check_mode(j, "generate");
            auto run = parse_trace_run(j, false);
            if (gen->count("--seed")) run.seed = seed_flag;
            return cmd_generate(run, out);
        }
        if (agg->parsed()) {
            auto j = load_config(config_path);
            check_mode(j, "aggregate");
            auto run = parse_trace_run(j, true);
            if (!run.is_aggregate)
                throw std::invalid_argument("aggregate config needs 'n_sources'");
            if (agg->count("--seed")) run.seed = seed_flag;
            return cmd_aggregate(run, out, threads);
        }
        if (ana->parsed()) return cmd_analyze(trace_path, out);
        if (val->parsed()) {
            uint64_t seed = 1;
            if (!config_path.empty()) {
                auto j = load_config(config_path);
                check_mode(j, "validate");
                reject_unknown(j, {"mode", "seed", "tolerance_scale"}, "config");
                seed = need_unsigned(j, "seed", "config", seed, false);
                if (j.contains("tolerance_scale") && !val->count("--tolerance-scale"))
                    tolerance_scale = need_number(j, "tolerance_scale", "config");
            }
            if (val->count("--seed")) seed = seed_flag;
            if (!(tolerance_scale >= 0.0))
                throw std::invalid_argument("tolerance scale must be >= 0");
            return cmd_validate(seed, tolerance_scale, threads, out);
        }
        if (rep->parsed()) {
            auto j = load_config(config_path);
            check_mode(j, "report");
            auto run = parse_trace_run(j, true);
            if (rep->count("--seed")) run.seed = seed_flag;
            return cmd_report(run, tolerance_scale, threads, out);
        }
        return 1;
    } catch (const amp::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

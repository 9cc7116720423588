// End-to-end acceptance gate: one line per criterion, nonzero exit when any
// fails. Every tolerance and seed is pinned here; the statistical configs
// (trace lengths, fit windows, ensemble sizes) were calibrated so that each
// check sits several standard errors inside its bound at the frozen seeds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "amp/aggregate.hpp"
#include "amp/distributions.hpp"
#include "amp/estimators.hpp"
#include "amp/onoff_source.hpp"
#include "amp/rng.hpp"
#include "amp/spectrum_model.hpp"

namespace fs = std::filesystem;
using namespace amp;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %d %-22s %s\n", pass ? "PASS" : "FAIL", idx, name,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[768];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

// ---- 1: Hurst recovery ------------------------------------------------------

// the H = 0.75 ensemble doubles as the autocorrelation input later
std::vector<BinnedTrace> g_lrd_traces;

struct HurstCase {
    double a0, a1, delta;
    size_t n_sources, m_min;
    double target, tol;
};

bool criterion_hurst() {
    const size_t n_bins = size_t{1} << 20;
    // the H = 0.9 case needs wide bins and more sources: rescaled range
    // saturates near 0.85 on small ensembles of strongly dependent traces,
    // and only deep aggregation pulls both estimators inside the band
    const HurstCase cases[] = {
        {1.5, 1.5, 8.0, 8, 64, 0.75, 0.05},
        {1.2, 1.8, 64.0, 16, 2048, 0.90, 0.05},
        {1.8, 1.8, 8.0, 8, 64, 0.60, 0.07},
    };
    const double t0 = now_seconds();
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        double rs = 0.0, av = 0.0;
        for (int s = 0; s < 10; ++s) {
            SourceConfig proto(ParetoLaw(c.a0, 1.0), ParetoLaw(c.a1, 1.0),
                               ConstantRate{1.0}, 0);
            AggregateConfig cfg(c.n_sources, proto, 1e12, 9001 + s);
            auto tr = aggregate_trace(cfg, double(n_bins) * c.delta, c.delta, 1);
            tr.values.resize(n_bins);
            HurstOptions opt;
            opt.m_min = c.m_min;
            rs += hurst_rescaled_range(tr, opt).value / 10.0;
            av += hurst_aggregated_variance(tr, opt).value / 10.0;
            if (c.target == 0.75) g_lrd_traces.push_back(std::move(tr));
        }
        bool ok = std::abs(rs - c.target) <= c.tol && std::abs(av - c.target) <= c.tol;
        pass &= ok;
        detail += fmt("H=%.2f rs=%.3f av=%.3f (+-%.2f) ", c.target, rs, av, c.tol);
    }
    double elapsed = now_seconds() - t0;
    pass &= elapsed < 300.0;
    detail += fmt("[%.0fs < 300s]", elapsed);
    report(1, "hurst-recovery", pass, detail);
    return pass;
}

// ---- 2: spectral asymptote --------------------------------------------------

bool criterion_spectrum() {
    const size_t n = size_t{1} << 20;
    const double delta = 1.0;
    const ParetoLaw law(1.5, 1.0);
    // ensemble of 160 unit-rate sources (10 seeds x 16 substreams); the first
    // half of each record is discarded because the generator starts every
    // source On at t = 0 and heavy-tailed renewals equilibrate slowly, which
    // depresses the lowest frequencies of a cold-started record
    std::vector<double> mean_power;
    SpectralEstimate proto_est;
    int count = 0;
    for (int s = 0; s < 10; ++s) {
        for (uint32_t i = 0; i < 16; ++i) {
            SourceConfig cfg(law, law, ConstantRate{1.0}, 9101 + s, i);
            auto tr = bin_trace(generate_timeline(cfg, 2.0 * n * delta), delta);
            BinnedTrace kept{delta, n * delta,
                             {tr.values.begin() + n, tr.values.begin() + 2 * n}};
            auto est = periodogram(kept);
            if (mean_power.empty()) {
                mean_power.assign(est.power.size(), 0.0);
                proto_est = est;
            }
            for (size_t k = 0; k < mean_power.size(); ++k)
                mean_power[k] += est.power[k];
            ++count;
        }
    }
    for (double& p : mean_power) p /= count;
    proto_est.power = mean_power;
    fit_spectral_band(proto_est, 1, 724);
    const double slope = proto_est.slope;
    const double slope_target = 1.5 - 2.0;

    // lowest usable decade: bin 1 is dominated by mean removal, so the decade
    // runs over bins 2..20; expected periodogram level is bin_width * model
    double ratio = 0.0;
    for (size_t k = 2; k <= 20; ++k) {
        double w = 2.0 * M_PI * double(k) / (double(n) * delta);
        ratio += mean_power[k - 1] * delta / psd_model(w, law, law);
    }
    ratio /= 19.0;

    bool pass = std::abs(slope - slope_target) <= 0.15 && ratio >= 0.8 && ratio <= 1.2;
    report(2, "spectral-asymptote", pass,
           fmt("slope=%.3f (target %.2f +-0.15) model ratio=%.3f (in [0.8,1.2])",
               slope, slope_target, ratio));
    return pass;
}

// ---- 3: autocorrelation decay -----------------------------------------------

bool criterion_acf() {
    // reuses the H = 0.75 traces; R(k) ~ k^-beta with beta = 2 - 2H = 0.5,
    // fitted over lags 10..100 where the power law holds and the
    // mean-removal bias of deeper lags has not set in
    double mean_beta = 0.0;
    for (const auto& tr : g_lrd_traces) {
        auto r = autocorrelation(tr, 100);
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
        for (size_t k = 10; k <= 100; ++k) {
            if (r[k] <= 0.0) continue;
            double x = std::log(double(k)), y = std::log(r[k]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1;
        }
        mean_beta += -(n * sxy - sx * sy) / (n * sxx - sx * sx) / 10.0;
    }
    g_lrd_traces.clear();
    g_lrd_traces.shrink_to_fit();
    bool pass = std::abs(mean_beta - 0.5) <= 0.15;
    report(3, "acf-decay", pass,
           fmt("beta=%.3f (target 0.50 +-0.15, lags 10..100)", mean_beta));
    return pass;
}

// ---- 4: single-source snapshot marginal -------------------------------------

bool criterion_single_marginal() {
    // mu_1 = 3, mu_0 = 9: stationary off fraction 0.75; snapshots on ten
    // independent stationary instants per mean cycle keep the KS honest
    SourceConfig proto(ParetoLaw(1.5, 1.0), ParetoLaw(1.5, 3.0),
                       BoundedParetoRate{BoundedParetoLaw(1.5, 1.0, 10.0)}, 0);
    const int n_paths = 400, per_path = 250;
    const double burn = 600.0, spacing = 24.0;
    const double horizon = burn + per_path * spacing + 12.0;
    size_t zeros = 0;
    std::vector<double> nz;
    for (int p = 0; p < n_paths; ++p) {
        SourceConfig cfg(proto.on_law, proto.off_law, proto.rate,
                         9301 + uint64_t(p));
        auto tl = generate_timeline(cfg, horizon);
        for (int i = 0; i < per_path; ++i) {
            double x = rate_at(tl, burn + i * spacing);
            if (x == 0.0)
                ++zeros;
            else
                nz.push_back(x);
        }
    }
    const double total = double(n_paths) * per_path;
    const double zero_prob = double(zeros) / total;

    std::sort(nz.begin(), nz.end());
    BoundedParetoLaw law(1.5, 1.0, 10.0);
    const double n = double(nz.size());
    double ks = 0.0;
    for (size_t i = 0; i < nz.size(); ++i) {
        bool at_b = nz[i] >= law.cutoff;
        double cdf = at_b ? 1.0 : 1.0 - bpareto_survival(law, nz[i]);
        double cdf_left = at_b ? 1.0 - bpareto_atom_mass(law) : cdf;
        ks = std::max(ks, (double(i) + 1.0) / n - cdf);
        ks = std::max(ks, cdf_left - double(i) / n);
    }

    bool pass = std::abs(zero_prob - 0.75) <= 0.01 && ks < 0.02;
    report(4, "single-marginal", pass,
           fmt("P(X=0)=%.4f (target 0.75 +-0.01) ks=%.4f (< 0.02 at 1e5 samples)",
               zero_prob, ks));
    return pass;
}

// ---- 5: aggregate snapshot marginal -----------------------------------------

bool criterion_aggregate_marginal() {
    bool pass = true;
    double worst_l1 = 0.0, worst_atom = 0.0;
    for (double ab : {1.2, 1.5}) {
        for (size_t N : {size_t{1}, size_t{2}, size_t{3}, size_t{5}}) {
            // sparse regime: A_1 = 0.05, so the displaced-Pareto body of the
            // closed form stays valid out to N = 5
            SourceConfig proto(ParetoLaw(1.5, 1.0), ParetoLaw(1.5, 19.0),
                               BoundedParetoRate{BoundedParetoLaw(ab, 1.0, 10.0)},
                               0);
            AggregateConfig cfg(N, proto, 1e12,
                                9401 + uint64_t(ab * 10.0) + uint64_t(N));
            MarginalOptions opt;
            opt.mc_samples = 1000000;
            auto mg = aggregate_marginal(cfg, opt);

            auto samples = mc_snapshot_samples(cfg, 1000000, 1);
            size_t zeros = 0;
            for (double v : samples) zeros += (v == 0.0);
            double p = mg.atom_at_zero;
            double dev = std::abs(double(zeros) / 1e6 - p);
            double three_sigma = 3.0 * std::sqrt(p * (1.0 - p) / 1e6);

            pass &= mg.method == "recursion";
            pass &= mg.body_l1_vs_mc < 0.05;
            pass &= dev <= three_sigma;
            if (N == 1) pass &= mg.k_bn == 1.0;
            worst_l1 = std::max(worst_l1, mg.body_l1_vs_mc);
            worst_atom = std::max(worst_atom, dev / three_sigma);
        }
    }
    report(5, "aggregate-marginal", pass,
           fmt("closed-form body kept for N in {1,2,3,5}, worst L1=%.4f (< 0.05), "
               "worst atom dev=%.2f x 3sigma, k_B(1) exact",
               worst_l1, worst_atom));
    return pass;
}

// ---- 6: gaussianization -----------------------------------------------------

double mean_abs_skew(size_t N, double B, uint64_t base_seed) {
    double acc = 0.0;
    for (int s = 0; s < 20; ++s) {
        SourceConfig proto(ParetoLaw(1.5, 1.0), ParetoLaw(1.5, 1.0),
                           BoundedParetoRate{BoundedParetoLaw(1.2, 1.0, B)}, 0);
        AggregateConfig cfg(N, proto, 1e12, base_seed + uint64_t(s));
        auto v = mc_snapshot_samples(cfg, 20000, 1);
        acc += std::abs(gaussianity_stats(v).skewness) / 20.0;
    }
    return acc;
}

bool criterion_gaussianization() {
    const double s2 = mean_abs_skew(2, 10.0, 9501);
    const double s8 = mean_abs_skew(8, 10.0, 9521);
    const double s32 = mean_abs_skew(32, 10.0, 9541);
    const double s128 = mean_abs_skew(128, 10.0, 9561);
    // a wider rate law keeps the aggregate skewed at the same source count
    const double b3 = mean_abs_skew(32, 3.0, 9581);
    const double b100 = mean_abs_skew(32, 100.0, 9601);

    bool monotone = s2 > s8 && s8 > s32 && s32 > s128;
    bool pass = monotone && s128 < 0.25 && b100 > b3;
    report(6, "gaussianization", pass,
           fmt("|skew| N=2,8,32,128: %.3f > %.3f > %.3f > %.3f (final < 0.25); "
               "at N=32, B=100k_B gives %.3f > %.3f at B=3k_B",
               s2, s8, s32, s128, b100, b3));
    return pass;
}

// ---- 7: distribution layer --------------------------------------------------

double ks_pareto(const ParetoLaw& law, uint64_t seed) {
    UniformStream u(seed, 0, StreamPurpose::monte_carlo);
    std::vector<double> x(100000);
    for (double& v : x) v = pareto_sample(law, u.next_double());
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double ks = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double f = 1.0 - pareto_survival(law, x[i]);
        ks = std::max(ks, std::max((double(i) + 1.0) / n - f, f - double(i) / n));
    }
    return ks;
}

double ks_bpareto(const BoundedParetoLaw& law, uint64_t seed, double* atom_dev,
                  double* atom_tol) {
    UniformStream u(seed, 1, StreamPurpose::monte_carlo);
    std::vector<double> x(100000);
    size_t at_b = 0;
    for (double& v : x) {
        v = bpareto_sample(law, u.next_double());
        at_b += (v == law.cutoff);
    }
    std::sort(x.begin(), x.end());
    const double n = double(x.size());
    double ks = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        bool top = x[i] >= law.cutoff;
        double f = top ? 1.0 : 1.0 - bpareto_survival(law, x[i]);
        double fl = top ? 1.0 - bpareto_atom_mass(law) : f;
        ks = std::max(ks, std::max((double(i) + 1.0) / n - f, fl - double(i) / n));
    }
    double p = bpareto_atom_mass(law);
    *atom_dev = std::abs(double(at_b) / n - p);
    *atom_tol = 3.0 * std::sqrt(p * (1.0 - p) / n);
    return ks;
}

bool criterion_distributions() {
    double a_dev1 = 0, a_tol1 = 0, a_dev2 = 0, a_tol2 = 0;
    const double k1 = ks_pareto(ParetoLaw(1.5, 2.0), 9701);
    const double k2 = ks_pareto(ParetoLaw(1.2, 1.0), 9702);
    const double k3 = ks_bpareto(BoundedParetoLaw(1.5, 1.0, 10.0), 9703, &a_dev1, &a_tol1);
    const double k4 = ks_bpareto(BoundedParetoLaw(1.2, 1.0, 100.0), 9704, &a_dev2, &a_tol2);
    const double worst_ks = std::max({k1, k2, k3, k4});
    bool pass = worst_ks < 0.01 && a_dev1 <= a_tol1 && a_dev2 <= a_tol2;
    report(7, "distribution-layer", pass,
           fmt("worst sampler ks=%.4f (< 0.01 at 1e5), atom devs %.5f<=%.5f "
               "and %.5f<=%.5f",
               worst_ks, a_dev1, a_tol1, a_dev2, a_tol2));
    return pass;
}

// ---- 8: byte-level determinism of every subcommand --------------------------

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// drops "wrote: <path>" lines, which legitimately differ across output dirs
std::string strip_paths(const std::string& s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
        if (line.rfind("wrote:", 0) != 0) out += line + "\n";
    return out;
}

struct CliRunner {
    std::string cli;
    fs::path root;
    bool ok = true;
    std::string first_error;

    fs::path dir(const std::string& name) {
        fs::path d = root / name;
        fs::create_directories(d);
        return d;
    }

    void run(const std::string& args, const fs::path& out_dir) {
        std::string cmd = "\"" + cli + "\" " + args + " --out \"" +
                          out_dir.string() + "\" > \"" +
                          (out_dir / "stdout.txt").string() + "\" 2>&1";
        int rc = std::system(cmd.c_str());
        if (rc != 0 && ok) {
            ok = false;
            first_error = "command failed: " + args;
        }
    }

    void expect_same(const fs::path& a, const fs::path& b, bool strip) {
        std::string sa = read_file(a), sb = read_file(b);
        if (strip) {
            sa = strip_paths(sa);
            sb = strip_paths(sb);
        }
        if (sa.empty() || sa != sb) {
            if (ok) {
                ok = false;
                first_error = "mismatch: " + a.string() + " vs " + b.string();
            }
        }
    }
};

bool criterion_determinism(const std::string& cli) {
    if (cli.empty()) {
        report(8, "determinism", false,
               "path to the command-line binary not provided (--cli or AMP_CLI)");
        return false;
    }
    std::string tmpl = (fs::temp_directory_path() / "amp-accept-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) {
        report(8, "determinism", false, "could not create scratch directory");
        return false;
    }
    CliRunner r{cli, fs::path(buf.data())};

    {
        std::ofstream cfg(r.root / "gen.json");
        cfg << "{\"on\":{\"alpha\":1.5,\"k\":1.0},\"off\":{\"alpha\":1.5,\"k\":1.2},"
               "\"rate\":{\"type\":\"bounded-pareto\",\"alpha\":1.4,\"k\":1.0,"
               "\"cutoff\":8.0},\"horizon\":30000.0,\"bin_width\":2.0,\"seed\":42}";
    }
    {
        std::ofstream cfg(r.root / "agg.json");
        cfg << "{\"on\":{\"alpha\":1.5,\"k\":1.0},\"off\":{\"alpha\":1.5,\"k\":1.0},"
               "\"rate\":{\"type\":\"bounded-pareto\",\"alpha\":1.2,\"k\":1.0,"
               "\"cutoff\":10.0},\"horizon\":20000.0,\"bin_width\":4.0,\"seed\":7,"
               "\"n_sources\":6,\"link_capacity\":80.0}";
    }
    {
        std::ofstream cfg(r.root / "rep.json");
        cfg << "{\"on\":{\"alpha\":1.5,\"k\":1.0},\"off\":{\"alpha\":1.5,\"k\":1.0},"
               "\"rate\":{\"type\":\"constant\",\"c\":1.0},\"horizon\":8192.0,"
               "\"bin_width\":1.0,\"seed\":3}";
    }
    const std::string gen_cfg = (r.root / "gen.json").string();
    const std::string agg_cfg = (r.root / "agg.json").string();
    const std::string rep_cfg = (r.root / "rep.json").string();

    auto g1 = r.dir("g1"), g2 = r.dir("g2");
    r.run("generate --config \"" + gen_cfg + "\"", g1);
    r.run("generate --config \"" + gen_cfg + "\"", g2);
    r.expect_same(g1 / "trace.csv", g2 / "trace.csv", false);
    r.expect_same(g1 / "events.csv", g2 / "events.csv", false);
    r.expect_same(g1 / "stdout.txt", g2 / "stdout.txt", true);

    auto a1 = r.dir("a1"), a2 = r.dir("a2"), a3 = r.dir("a3");
    r.run("aggregate --config \"" + agg_cfg + "\" --threads 1", a1);
    r.run("aggregate --config \"" + agg_cfg + "\" --threads 4", a2);
    r.run("aggregate --config \"" + agg_cfg + "\" --threads 1", a3);
    r.expect_same(a1 / "trace.csv", a2 / "trace.csv", false);
    r.expect_same(a1 / "trace.csv", a3 / "trace.csv", false);
    r.expect_same(a1 / "stdout.txt", a2 / "stdout.txt", true);

    auto n1 = r.dir("n1"), n2 = r.dir("n2");
    const std::string trace = (a1 / "trace.csv").string();
    r.run("analyze \"" + trace + "\"", n1);
    r.run("analyze \"" + trace + "\"", n2);
    for (const char* f : {"analysis.json", "periodogram.csv", "variance_time.csv",
                          "rs.csv", "acf.csv"})
        r.expect_same(n1 / f, n2 / f, false);
    r.expect_same(n1 / "stdout.txt", n2 / "stdout.txt", true);

    auto v1 = r.dir("v1"), v2 = r.dir("v2");
    r.run("validate --seed 1 --threads 1", v1);
    r.run("validate --seed 1 --threads 3", v2);
    r.expect_same(v1 / "validation.json", v2 / "validation.json", false);
    r.expect_same(v1 / "stdout.txt", v2 / "stdout.txt", true);

    auto p1 = r.dir("p1"), p2 = r.dir("p2");
    r.run("report --config \"" + rep_cfg + "\" --threads 1", p1);
    r.run("report --config \"" + rep_cfg + "\" --threads 4", p2);
    for (const char* f : {"trace.csv", "analysis.json", "validation.json",
                          "report.md"})
        r.expect_same(p1 / f, p2 / f, false);

    fs::remove_all(r.root);
    report(8, "determinism", r.ok,
           r.ok ? "generate/aggregate/analyze/validate/report byte-identical "
                  "across reruns and thread counts"
                : r.first_error);
    return r.ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
    if (cli.empty())
        if (const char* env = std::getenv("AMP_CLI")) cli = env;

    criterion_hurst();
    criterion_spectrum();
    criterion_acf();
    criterion_single_marginal();
    criterion_aggregate_marginal();
    criterion_gaussianization();
    criterion_distributions();
    criterion_determinism(cli);

    if (g_failures == 0) {
        std::printf("acceptance: all 8 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d of 8 criteria failed\n", g_failures);
    return 1;
}

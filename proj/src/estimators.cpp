#include "amp/estimators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace amp {

namespace {

// fftw planning is not thread-safe; execution of distinct plans is
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<std::complex<double>> real_fft(const std::vector<double>& in) {
    const size_t n = in.size();
    std::vector<std::complex<double>> out(n / 2 + 1);
    std::vector<double> buf(in);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> real_ifft(const std::vector<std::complex<double>>& in, size_t n) {
    std::vector<std::complex<double>> buf(in);
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                    reinterpret_cast<fftw_complex*>(buf.data()), out.data(),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double trace_mean(const BinnedTrace& tr) {
    return std::accumulate(tr.values.begin(), tr.values.end(), 0.0) /
           static_cast<double>(tr.values.size());
}

struct Line {
    double slope, intercept, rms, slope_se;
};

Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    Line l{};
    l.slope = (n * sxy - sx * sy) / denom;
    l.intercept = (sy - l.slope * sx) / n;
    double rss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (l.slope * x[i] + l.intercept);
        rss += r * r;
    }
    l.rms = std::sqrt(rss / n);
    l.slope_se = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / (sxx - sx * sx / n)) : 0.0;
    return l;
}

// expected R/S of an iid sequence of length m (Anis-Lloyd, with the small-m
// gamma prefactor switched to its asymptotic form once gamma would overflow)
double expected_rs_iid(size_t m) {
    double md = static_cast<double>(m);
    double g;
    if (m <= 340) {
        g = std::exp(std::lgamma((md - 1.0) / 2.0) - std::lgamma(md / 2.0)) /
            std::sqrt(M_PI);
    } else {
        g = 1.0 / std::sqrt(md * M_PI / 2.0);
    }
    double sum = 0.0;
    for (size_t i = 1; i < m; ++i)
        sum += std::sqrt((md - static_cast<double>(i)) / static_cast<double>(i));
    return (md - 0.5) / md * g * sum;
}

void require_length(const BinnedTrace& tr, size_t min_len, const char* who) {
    if (tr.values.size() < min_len)
        throw std::invalid_argument(std::string(who) + ": trace too short");
}

HurstEstimate finish_estimate(HurstMethod method, double value, double se, int n_points) {
    HurstEstimate h;
    h.method = method;
    h.stderr_slope = se;
    h.n_points = n_points;
    h.value = value;
    if (value <= 0.001 || value >= 0.999) {
        h.value = std::clamp(value, 0.001, 0.999);
        h.clamped = true;
    }
    return h;
}

}  // namespace

const char* hurst_method_name(HurstMethod m) {
    switch (m) {
        case HurstMethod::rescaled_range: return "rescaled-range";
        case HurstMethod::aggregated_variance: return "aggregated-variance";
        case HurstMethod::spectral_slope: return "spectral-slope";
    }
    return "unknown";
}

std::vector<double> autocorrelation(const BinnedTrace& trace, size_t max_lag) {
    const size_t n = trace.values.size();
    if (max_lag == 0 || n < 4 * max_lag)
        throw std::invalid_argument("autocorrelation: need trace length >= 4*max_lag");

    double mean = trace_mean(trace);
    const size_t m = next_pow2(2 * n);
    std::vector<double> padded(m, 0.0);
    for (size_t i = 0; i < n; ++i) padded[i] = trace.values[i] - mean;

    auto spec = real_fft(padded);
    for (auto& c : spec) c = std::complex<double>{std::norm(c), 0.0};
    auto corr = real_ifft(spec, m);

    // fftw's c2r carries a factor m; biased normalization divides by n
    double r0 = corr[0] / (static_cast<double>(m) * static_cast<double>(n));
    if (!(r0 > 0.0))
        throw std::invalid_argument("autocorrelation: degenerate constant trace");

    std::vector<double> out(max_lag + 1);
    for (size_t k = 0; k <= max_lag; ++k)
        out[k] = corr[k] / (static_cast<double>(m) * static_cast<double>(n)) / r0;
    return out;
}

SpectralEstimate periodogram(const BinnedTrace& trace) {
    const size_t n = trace.values.size();
    if (n < 1024) throw std::invalid_argument("periodogram: need trace length >= 1024");

    double mean = trace_mean(trace);
    std::vector<double> centered(n);
    for (size_t i = 0; i < n; ++i) centered[i] = trace.values[i] - mean;
    auto spec = real_fft(centered);

    SpectralEstimate est;
    est.n_samples = n;
    est.bin_width = trace.bin_width;
    const size_t half = n / 2;
    est.frequencies.reserve(half);
    est.power.reserve(half);
    const double w0 = 2.0 * M_PI / (static_cast<double>(n) * trace.bin_width);
    for (size_t k = 1; k <= half; ++k) {
        est.frequencies.push_back(w0 * static_cast<double>(k));
        est.power.push_back(std::norm(spec[k]) / static_cast<double>(n));
    }

    size_t k_hi = std::max<size_t>(
        8, static_cast<size_t>(std::sqrt(static_cast<double>(n) / 2.0)));
    fit_spectral_band(est, 1, std::min(k_hi, half));
    return est;
}

void fit_spectral_band(SpectralEstimate& est, size_t k_lo, size_t k_hi) {
    if (k_lo < 1 || k_hi <= k_lo || k_hi > est.power.size())
        throw std::invalid_argument("fit_spectral_band: bad band indices");
    std::vector<double> lx, ly;
    for (size_t k = k_lo; k <= k_hi; ++k) {
        if (est.power[k - 1] > 0.0) {
            lx.push_back(std::log(est.frequencies[k - 1]));
            ly.push_back(std::log(est.power[k - 1]));
        }
    }
    if (lx.size() < 4) throw std::invalid_argument("fit_spectral_band: too few positive bins");
    Line l = fit_line(lx, ly);
    est.slope = l.slope;
    est.intercept = l.intercept;
    est.residual = l.rms;
    est.slope_stderr = l.slope_se;
    est.band_lo = k_lo;
    est.band_hi = k_hi;
}

double parseval_mean(const SpectralEstimate& est) {
    const size_t n = est.n_samples;
    const size_t half = n / 2;
    double sum = 0.0;
    for (size_t k = 1; k <= half; ++k) {
        bool self_conjugate = (n % 2 == 0) && (k == half);
        sum += est.power[k - 1] * (self_conjugate ? 1.0 : 2.0);
    }
    return sum / static_cast<double>(n);
}

std::vector<std::pair<double, double>> rescaled_range_points(const BinnedTrace& trace,
                                                             const HurstOptions& opt) {
    require_length(trace, 4096, "hurst_rescaled_range");
    const size_t n = trace.values.size();
    std::vector<std::pair<double, double>> pts;
    for (size_t m = opt.m_min; m <= n / 4; m *= 2) {
        const size_t nb = n / m;
        double acc = 0.0;
        size_t ok = 0;
        for (size_t b = 0; b < nb; ++b) {
            const double* blk = trace.values.data() + b * m;
            double mean = 0.0;
            for (size_t i = 0; i < m; ++i) mean += blk[i];
            mean /= static_cast<double>(m);
            double cum = 0.0, lo = 0.0, hi = 0.0, ss = 0.0;
            for (size_t i = 0; i < m; ++i) {
                double d = blk[i] - mean;
                cum += d;
                lo = std::min(lo, cum);
                hi = std::max(hi, cum);
                ss += d * d;
            }
            double sd = std::sqrt(ss / static_cast<double>(m));
            if (sd > 0.0) {
                acc += (hi - lo) / sd;
                ++ok;
            }
        }
        if (ok >= 2) pts.emplace_back(static_cast<double>(m), acc / static_cast<double>(ok));
    }
    if (static_cast<int>(pts.size()) > opt.drop_top)
        pts.resize(pts.size() - static_cast<size_t>(opt.drop_top));
    return pts;
}

HurstEstimate hurst_rescaled_range(const BinnedTrace& trace, const HurstOptions& opt) {
    auto pts = rescaled_range_points(trace, opt);
    if (pts.size() < 3)
        throw std::invalid_argument("hurst_rescaled_range: too few usable scales");

    std::vector<double> lx, ly;
    for (auto& [m, rs] : pts) {
        // debias against the iid expectation so H=0.5 data sits on slope 0.5
        double y = std::log(rs) - std::log(expected_rs_iid(static_cast<size_t>(m))) +
                   0.5 * std::log(m);
        lx.push_back(std::log(m));
        ly.push_back(y);
    }
    Line l = fit_line(lx, ly);
    return finish_estimate(HurstMethod::rescaled_range, l.slope, l.slope_se,
                           static_cast<int>(pts.size()));
}

std::vector<std::pair<double, double>> variance_time_points(const BinnedTrace& trace,
                                                            const HurstOptions& opt) {
    require_length(trace, 4096, "hurst_aggregated_variance");
    const size_t n = trace.values.size();
    std::vector<std::pair<double, double>> pts;
    for (size_t m = opt.m_min; m <= n / 8; m *= 2) {
        const size_t nb = n / m;
        std::vector<double> means(nb);
        for (size_t b = 0; b < nb; ++b) {
            const double* blk = trace.values.data() + b * m;
            double s = 0.0;
            for (size_t i = 0; i < m; ++i) s += blk[i];
            means[b] = s / static_cast<double>(m);
        }
        double gm = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(nb);
        double var = 0.0;
        for (double v : means) var += (v - gm) * (v - gm);
        var /= static_cast<double>(nb);
        pts.emplace_back(static_cast<double>(m), var);
    }
    if (static_cast<int>(pts.size()) > opt.drop_top)
        pts.resize(pts.size() - static_cast<size_t>(opt.drop_top));
    return pts;
}

HurstEstimate hurst_aggregated_variance(const BinnedTrace& trace, const HurstOptions& opt) {
    auto pts = variance_time_points(trace, opt);
    if (pts.size() < 3)
        throw std::invalid_argument("hurst_aggregated_variance: too few usable scales");
    const double n = static_cast<double>(trace.values.size());

    std::vector<double> lx, lv;
    for (auto& [m, v] : pts) {
        if (!(v > 0.0))
            throw std::invalid_argument("hurst_aggregated_variance: degenerate trace");
        lx.push_back(std::log(m));
        lv.push_back(std::log(v));
    }

    Line l = fit_line(lx, lv);
    double h = 1.0 + l.slope / 2.0;
    // the grand mean removes low-frequency power, deflating v(m) by a factor
    // 1 - (m/n)^(2-2H); undo it at the current H estimate and iterate
    for (int it = 0; it < 60; ++it) {
        double hc = std::clamp(h, 0.01, 0.995);
        std::vector<double> adj(lv.size());
        for (size_t i = 0; i < lv.size(); ++i) {
            double frac = std::pow(std::exp(lx[i]) / n, 2.0 - 2.0 * hc);
            adj[i] = lv[i] - std::log(1.0 - frac);
        }
        l = fit_line(lx, adj);
        double hn = 1.0 + l.slope / 2.0;
        if (std::abs(hn - h) < 1e-7) {
            h = hn;
            break;
        }
        h = 0.5 * (h + hn);
    }
    return finish_estimate(HurstMethod::aggregated_variance, h, l.slope_se / 2.0,
                           static_cast<int>(pts.size()));
}

HurstEstimate hurst_spectral(const BinnedTrace& trace) {
    auto est = periodogram(trace);
    double h = (1.0 - est.slope) / 2.0;
    return finish_estimate(HurstMethod::spectral_slope, h, est.slope_stderr / 2.0,
                           static_cast<int>(est.band_hi - est.band_lo + 1));
}

double hill_tail_index(const std::vector<double>& samples, size_t k) {
    if (k < 10) throw std::invalid_argument("hill_tail_index: need k >= 10");
    if (2 * k >= samples.size())
        throw std::invalid_argument("hill_tail_index: need k < n/2");
    for (double x : samples)
        if (!(x > 0.0)) throw std::invalid_argument("hill_tail_index: samples must be positive");

    std::vector<double> top(samples);
    std::nth_element(top.begin(), top.begin() + static_cast<long>(k), top.end(),
                     std::greater<double>());
    double xk1 = *std::min_element(top.begin(), top.begin() + static_cast<long>(k) + 1);
    double acc = 0.0;
    for (size_t i = 0; i <= k; ++i) {
        if (top[i] > xk1) acc += std::log(top[i] / xk1);
    }
    if (!(acc > 0.0))
        throw std::runtime_error("hill_tail_index: top-k samples are all tied");
    return static_cast<double>(k) / acc;
}

GaussianityStats gaussianity_stats(const std::vector<double>& samples) {
    if (samples.size() < 100)
        throw std::invalid_argument("gaussianity_stats: need at least 100 samples");
    const double n = static_cast<double>(samples.size());
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : samples) {
        double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw std::invalid_argument("gaussianity_stats: zero variance");

    GaussianityStats g;
    g.skewness = m3 / std::pow(m2, 1.5);
    g.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    g.statistic = n * (g.skewness * g.skewness / 6.0 +
                       g.excess_kurtosis * g.excess_kurtosis / 24.0);
    return g;
}

}  // namespace amp

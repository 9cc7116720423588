#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "amp/onoff_source.hpp"

// Data-side statistics on binned traces: sample autocorrelation, periodogram
// with low-band slope fit, Hurst estimators (rescaled range with the
// Anis-Lloyd small-sample correction, aggregated variance with an iterative
// grand-mean bias correction, spectral slope), Hill tail-index estimation,
// and moment-based gaussianity statistics.

namespace amp {

enum class HurstMethod { rescaled_range, aggregated_variance, spectral_slope };

const char* hurst_method_name(HurstMethod m);

struct HurstEstimate {
    HurstMethod method{};
    double value = 0.0;
    double stderr_slope = 0.0;  // regression dispersion across scales
    int n_points = 0;           // fitted scales
    bool clamped = false;
};

struct HurstOptions {
    size_t m_min = 16;   // smallest dyadic block size
    int drop_top = 2;    // largest dyadic scales excluded from the fit
};

struct SpectralEstimate {
    std::vector<double> frequencies;  // rad/s, bins 1..n/2
    std::vector<double> power;        // periodogram ordinates
    size_t n_samples = 0;
    double bin_width = 0.0;
    // least-squares fit of log power vs log frequency over [band_lo, band_hi]
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
    double slope_stderr = 0.0;
    size_t band_lo = 0;  // frequency bin indices, 1-based
    size_t band_hi = 0;
};

// biased-normalized sample autocorrelation, lags 0..max_lag; R[0] = 1
std::vector<double> autocorrelation(const BinnedTrace& trace, size_t max_lag);

// mean-removed periodogram |fft|^2 / n on the discrete grid w_k = 2 pi k /
// (n delta); the low band defaults to k in [1, sqrt(n/2)]
SpectralEstimate periodogram(const BinnedTrace& trace);

// refit the log-log slope over frequency bins [k_lo, k_hi]
void fit_spectral_band(SpectralEstimate& est, size_t k_lo, size_t k_hi);

// mean periodogram power over all n bins (mirror-reconstructed); equals the
// biased trace variance
double parseval_mean(const SpectralEstimate& est);

HurstEstimate hurst_rescaled_range(const BinnedTrace& trace, const HurstOptions& opt = {});
HurstEstimate hurst_aggregated_variance(const BinnedTrace& trace, const HurstOptions& opt = {});
HurstEstimate hurst_spectral(const BinnedTrace& trace);

// log-log regression points behind hurst_aggregated_variance, for reports
std::vector<std::pair<double, double>> variance_time_points(const BinnedTrace& trace,
                                                            const HurstOptions& opt = {});
// mean R/S per dyadic block size, for reports
std::vector<std::pair<double, double>> rescaled_range_points(const BinnedTrace& trace,
                                                             const HurstOptions& opt = {});

// Hill estimator on the top-k order statistics of positive samples
double hill_tail_index(const std::vector<double>& samples, size_t k);

struct GaussianityStats {
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double statistic = 0.0;  // n (S^2/6 + K^2/24), chi^2(2) under the null
};

GaussianityStats gaussianity_stats(const std::vector<double>& samples);

}  // namespace amp

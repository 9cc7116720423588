#pragma once

#include <complex>
#include <vector>

#include "amp/distributions.hpp"

// Model-side spectral predictions for the constant-rate On/Off process:
// characteristic functions by oscillatory quadrature, the exact power
// spectral density of the renewal rate process, and the low-frequency
// power-law asymptote S(w) ~ W * w^(alpha-2) with alpha = min(alpha_0,
// alpha_1).

namespace amp {

// E[e^{-j w X}] for a Pareto variate, evaluated through the Fourier
// transform of the survival function; conjugate-symmetric in w
std::complex<double> char_fn(const ParetoLaw& law, double omega);

// integral of the survival function times e^{-j w x} over [0, inf); the
// numerically stable route to 1 - char_fn = j w * survival_transform
std::complex<double> survival_transform(const ParetoLaw& law, double omega);

// mass of the spectral atom at DC
double psd_dc_mass(const ParetoLaw& on_law, const ParetoLaw& off_law);

// continuous part of the two-sided PSD of the unit-rate process, any w != 0
double psd_model(double omega, const ParetoLaw& on_law, const ParetoLaw& off_law);

struct SpectralAsymptote {
    double alpha = 0.0;     // effective index, min(alpha_0, alpha_1)
    double w = 0.0;         // fitted positive front constant
    double slope = 0.0;     // fitted log-log slope over the band
    double residual = 0.0;  // rms residual of the log-log fit
    double band_lo = 0.0;   // rad/s
    double band_hi = 0.0;
};

struct AsymptoteOptions {
    double band_decades = 2.0;  // band = lowest this-many decades of the grid
    double slope_tol = 0.15;    // allowed |slope - (alpha-2)|
    double resid_tol = 0.25;    // allowed rms log-residual
};

// least-squares power-law fit of psd samples over the low-frequency band;
// throws if the residual or the slope deviation exceeds its tolerance
SpectralAsymptote fit_asymptote(const std::vector<double>& omega,
                                const std::vector<double>& psd, double alpha_0,
                                double alpha_1, const AsymptoteOptions& opt = {});

struct LrdVerdict {
    bool lrd = false;
    double implied_hurst = 0.5;
};

// LRD iff the fitted slope lies in (-1, 0); implied H = (1 - slope) / 2
LrdVerdict lrd_spectral_test(const SpectralAsymptote& asymptote);

}  // namespace amp

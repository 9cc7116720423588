#pragma once

#include <cmath>
#include <stdexcept>

// Heavy-tailed laws used throughout: the two-parameter Pareto for On/Off
// durations and the Bounded Pareto (truncated tail mass moved to an atom at
// the cutoff B) for per-burst rates. Sampling is inverse-transform from a
// caller-supplied uniform; the module owns no randomness.

namespace amp {

struct ParetoLaw {
    double shape;  // tail index alpha
    double scale;  // k, lower support edge

    ParetoLaw(double alpha, double k) : shape(alpha), scale(k) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("ParetoLaw: shape must be positive and finite");
        if (!(k > 0.0) || !std::isfinite(k))
            throw std::invalid_argument("ParetoLaw: scale must be positive and finite");
    }
};

struct BoundedParetoLaw {
    double shape;   // alpha_B
    double scale;   // k_B, lower support edge
    double cutoff;  // B, upper support edge carrying the atom

    BoundedParetoLaw(double alpha, double k, double b)
        : shape(alpha), scale(k), cutoff(b) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("BoundedParetoLaw: shape must be positive and finite");
        if (!(k > 0.0) || !std::isfinite(k))
            throw std::invalid_argument("BoundedParetoLaw: scale must be positive and finite");
        if (!(b >= k) || !std::isfinite(b))
            throw std::invalid_argument("BoundedParetoLaw: cutoff must satisfy cutoff >= scale");
    }
};

// P(X > x): 1 below the support edge, (k/x)^alpha beyond it
double pareto_survival(const ParetoLaw& law, double x);

// density alpha k^alpha x^-(alpha+1) on [k, inf)
double pareto_pdf(const ParetoLaw& law, double x);

// inverse-transform draw, k * u^(-1/alpha); pareto_survival(sample(u)) == u
double pareto_sample(const ParetoLaw& law, double u);

// alpha k / (alpha - 1); requires alpha > 1
double pareto_mean(const ParetoLaw& law);

// P(X > x): 1 below k_B, (k_B/x)^alpha_B on [k_B, B], 0 above B.
// The jump of size (k_B/B)^alpha_B at B is the atom.
double bpareto_survival(const BoundedParetoLaw& law, double x);

// continuous density on [k_B, B); the atom at B is reported separately by
// bpareto_atom_mass, never as a density spike
double bpareto_pdf(const BoundedParetoLaw& law, double x);

// mass of the atom at the cutoff, (k_B/B)^alpha_B
double bpareto_atom_mass(const BoundedParetoLaw& law);

// inverse-transform draw of the mixed law; returns B with probability equal
// to the atom mass, otherwise k_B * u^(-1/alpha_B)
double bpareto_sample(const BoundedParetoLaw& law, double u);

// mean of continuous part plus B times the atom mass; always finite
double bpareto_mean(const BoundedParetoLaw& law);

}  // namespace amp

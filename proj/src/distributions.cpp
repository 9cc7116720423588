#include "amp/distributions.hpp"

#include <cmath>

namespace amp {

double pareto_survival(const ParetoLaw& law, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("pareto_survival: x must be finite");
    if (x <= law.scale) return 1.0;
    return std::pow(law.scale / x, law.shape);
}

double pareto_pdf(const ParetoLaw& law, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("pareto_pdf: x must be finite");
    if (x < law.scale) return 0.0;
    return law.shape * std::pow(law.scale, law.shape) * std::pow(x, -(law.shape + 1.0));
}

double pareto_sample(const ParetoLaw& law, double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("pareto_sample: u must lie in (0,1)");
    return law.scale * std::pow(u, -1.0 / law.shape);
}

double pareto_mean(const ParetoLaw& law) {
    if (!(law.shape > 1.0))
        throw std::invalid_argument("pareto_mean: infinite mean for shape <= 1");
    return law.shape * law.scale / (law.shape - 1.0);
}

double bpareto_survival(const BoundedParetoLaw& law, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("bpareto_survival: x must be finite");
    if (x < law.scale) return 1.0;
    if (x > law.cutoff) return 0.0;
    return std::pow(law.scale / x, law.shape);
}

double bpareto_pdf(const BoundedParetoLaw& law, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("bpareto_pdf: x must be finite");
    if (x < law.scale || x >= law.cutoff) return 0.0;
    return law.shape * std::pow(law.scale, law.shape) * std::pow(x, -(law.shape + 1.0));
}

double bpareto_atom_mass(const BoundedParetoLaw& law) {
    return std::pow(law.scale / law.cutoff, law.shape);
}

double bpareto_sample(const BoundedParetoLaw& law, double u) {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("bpareto_sample: u must lie in (0,1)");
    if (u <= bpareto_atom_mass(law)) return law.cutoff;
    double x = law.scale * std::pow(u, -1.0 / law.shape);
    return x < law.cutoff ? x : law.cutoff;
}

double bpareto_mean(const BoundedParetoLaw& law) {
    double a = law.shape, k = law.scale, b = law.cutoff;
    double atom = bpareto_atom_mass(law);
    double cont;
    if (std::abs(a - 1.0) < 1e-12) {
        cont = k * std::log(b / k);
    } else {
        cont = a * std::pow(k, a) * (std::pow(k, 1.0 - a) - std::pow(b, 1.0 - a)) / (a - 1.0);
    }
    return cont + b * atom;
}

}  // namespace amp

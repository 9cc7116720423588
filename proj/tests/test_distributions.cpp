#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "amp/distributions.hpp"
#include "amp/rng.hpp"
#include "oracles.hpp"

using namespace amp;

TEST_CASE("pareto survival values") {
    CHECK(pareto_survival(ParetoLaw(1.5, 1.0), 1.0) == 1.0);
    CHECK(pareto_survival(ParetoLaw(1.0, 1.0), 2.0) == doctest::Approx(0.5));
    CHECK(pareto_survival(ParetoLaw(1.5, 2.0), 8.0) == doctest::Approx(0.125));
    CHECK(pareto_survival(ParetoLaw(1.5, 1.0), 0.2) == 1.0);
}

TEST_CASE("pareto survival is monotone non-increasing and bounded") {
    ParetoLaw law(1.3, 0.7);
    UniformStream s(99, 0, StreamPurpose::noise);
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(s.next_double() * 1e6);
    std::sort(xs.begin(), xs.end());
    double prev = 1.0;
    for (double x : xs) {
        double v = pareto_survival(law, x);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("pareto pdf values and normalization") {
    CHECK(pareto_pdf(ParetoLaw(1.5, 1.0), 0.5) == 0.0);

    // cross-check density at the edge by numerical differentiation of survival
    ParetoLaw unit(1.0, 1.0);
    double h = 1e-6;
    double num = -(pareto_survival(unit, 1.0 + h) - pareto_survival(unit, 1.0)) / h;
    CHECK(pareto_pdf(unit, 1.0) == doctest::Approx(1.0));
    CHECK(num == doctest::Approx(1.0).epsilon(1e-4));

    ParetoLaw law(1.5, 1.0);
    double total = oracles::integrate_log_tail([&](double x) { return pareto_pdf(law, x); },
                                               law.scale, 60.0, 1e-12);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pareto sampling: round trip, support, mean") {
    ParetoLaw law(1.5, 1.0);
    CHECK(pareto_sample(ParetoLaw(1.0, 1.0), 0.5) == doctest::Approx(2.0));
    CHECK(pareto_sample(law, 1.0 - 1e-12) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pareto_sample(law, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pareto_sample(law, 1.0), std::invalid_argument);

    // survival(sample(u)) == u on a grid
    for (int i = 1; i < 1000; ++i) {
        double u = i / 1000.0;
        double x = pareto_sample(law, u);
        CHECK(x >= law.scale);
        CHECK(pareto_survival(law, x) == doctest::Approx(u).epsilon(1e-12));
    }

    // sample mean vs quadrature of x*pdf (slow heavy-tail convergence, wide band)
    double mean_q = oracles::integrate_log_tail(
        [&](double x) { return x * pareto_pdf(law, x); }, law.scale, 90.0, 1e-12);
    CHECK(mean_q == doctest::Approx(3.0).epsilon(1e-6));
    UniformStream s(4242, 0, StreamPurpose::noise);
    double acc = 0.0;
    const int n = 10'000'000;
    for (int i = 0; i < n; ++i) acc += pareto_sample(law, s.next_double());
    CHECK(acc / n == doctest::Approx(mean_q).epsilon(0.02));
}

TEST_CASE("pareto mean closed form") {
    CHECK(pareto_mean(ParetoLaw(1.5, 1.0)) == doctest::Approx(3.0));
    CHECK(pareto_mean(ParetoLaw(2.0 - 1e-9, 1.0)) == doctest::Approx(2.0).epsilon(1e-8));
    // the pdf itself underflows past x ~ 1e153, so stop the quadrature at e^300
    // and compare against the exactly truncated mean
    double m101 = oracles::integrate_log_tail(
        [&](double x) { return x * pareto_pdf(ParetoLaw(1.01, 1.0), x); }, 1.0, 300.0, 1e-10);
    CHECK(pareto_mean(ParetoLaw(1.01, 1.0)) == doctest::Approx(101.0));
    CHECK(m101 == doctest::Approx(101.0 * (1.0 - std::exp(-3.0))).epsilon(1e-6));
    CHECK_THROWS_AS(pareto_mean(ParetoLaw(1.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(pareto_mean(ParetoLaw(0.8, 1.0)), std::invalid_argument);
}

TEST_CASE("regular variation of the pareto tail") {
    ParetoLaw law(1.5, 1.0);
    for (double x : {1e2, 1e4, 1e6}) {
        for (double t : {2.0, 10.0}) {
            double ratio = pareto_survival(law, t * x) / pareto_survival(law, x);
            CHECK(ratio == doctest::Approx(std::pow(t, -law.shape)).epsilon(1e-9));
        }
    }
}

TEST_CASE("bounded pareto survival cases") {
    BoundedParetoLaw law(1.0, 1.0, 10.0);
    CHECK(bpareto_survival(law, 0.5) == 1.0);
    CHECK(bpareto_survival(law, 2.0) == doctest::Approx(0.5));
    CHECK(bpareto_survival(law, 11.0) == 0.0);
    CHECK(bpareto_survival(law, 10.0) == doctest::Approx(0.1));  // atom-sized jump at B
    UniformStream s(7, 0, StreamPurpose::noise);
    double prev = 1.0;
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(s.next_double() * 12.0);
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        double v = bpareto_survival(law, x);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
}

TEST_CASE("bounded pareto density, atom, and total mass") {
    BoundedParetoLaw law(1.0, 1.0, 10.0);
    CHECK(bpareto_atom_mass(law) == doctest::Approx(0.1));
    CHECK(bpareto_pdf(law, 0.5) == 0.0);
    CHECK(bpareto_pdf(law, 10.0) == 0.0);  // density lives on [k_B, B)
    double cont = oracles::integrate([&](double x) { return bpareto_pdf(law, x); },
                                     law.scale, law.cutoff, 1e-12);
    CHECK(cont + bpareto_atom_mass(law) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bounded pareto sampling: atom frequency, support, mean") {
    BoundedParetoLaw law(1.0, 1.0, 10.0);
    UniformStream s(1234, 0, StreamPurpose::noise);
    const int n = 1'000'000;
    int at_b = 0;
    for (int i = 0; i < n; ++i) {
        double x = bpareto_sample(law, s.next_double());
        CHECK(x >= law.scale);
        CHECK(x <= law.cutoff);
        if (x == law.cutoff) ++at_b;
    }
    double p = bpareto_atom_mass(law);
    double sigma = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(at_b) / n - p) < 3.0 * sigma);

    BoundedParetoLaw wide(1.2, 1.0, 100.0);
    double mean_q =
        oracles::integrate([&](double x) { return x * bpareto_pdf(wide, x); }, wide.scale,
                           wide.cutoff, 1e-12) +
        wide.cutoff * bpareto_atom_mass(wide);
    UniformStream s2(77, 0, StreamPurpose::noise);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += bpareto_sample(wide, s2.next_double());
    CHECK(bpareto_mean(wide) == doctest::Approx(mean_q).epsilon(1e-9));
    CHECK(acc / n == doctest::Approx(mean_q).epsilon(0.01));
}

TEST_CASE("bounded pareto mean special cases") {
    // alpha_B = 1 with B = e: continuous part 1, atom contributes 1
    BoundedParetoLaw loge(1.0, 1.0, std::exp(1.0));
    CHECK(bpareto_mean(loge) == doctest::Approx(2.0));

    // B -> inf reduces to the unbounded pareto mean
    BoundedParetoLaw wide(1.5, 1.0, 1e12);
    CHECK(bpareto_mean(wide) == doctest::Approx(3.0).epsilon(1e-5));

    // collapsed support is a point mass at B
    BoundedParetoLaw point(1.3, 5.0, 5.0);
    CHECK(bpareto_mean(point) == doctest::Approx(5.0));
    CHECK(bpareto_atom_mass(point) == doctest::Approx(1.0));
    CHECK(bpareto_sample(point, 0.37) == doctest::Approx(5.0));
}

TEST_CASE("KS distance sampler vs CDF, both laws") {
    const int n = 100'000;

    ParetoLaw plaw(1.5, 1.0);
    UniformStream s1(2024, 0, StreamPurpose::noise);
    std::vector<double> ps;
    ps.reserve(n);
    for (int i = 0; i < n; ++i) ps.push_back(pareto_sample(plaw, s1.next_double()));
    double d1 = oracles::ks_distance(ps, [&](double x) { return 1.0 - pareto_survival(plaw, x); });
    CHECK(d1 < 0.01);

    BoundedParetoLaw blaw(1.2, 1.0, 50.0);
    UniformStream s2(2025, 0, StreamPurpose::noise);
    std::vector<double> bs;
    bs.reserve(n);
    for (int i = 0; i < n; ++i) bs.push_back(bpareto_sample(blaw, s2.next_double()));
    auto cdf = [&](double x) { return 1.0 - bpareto_survival(blaw, x); };
    auto cdf_left = [&](double x) {
        if (x >= blaw.cutoff) return 1.0 - bpareto_atom_mass(blaw);
        return cdf(x);
    };
    double d2 = oracles::ks_distance(bs, cdf, cdf_left);
    CHECK(d2 < 0.01);
}

TEST_CASE("variance: bounded law finite, unbounded alpha<2 grows with n") {
    BoundedParetoLaw blaw(1.2, 1.0, 100.0);
    double m = bpareto_mean(blaw);
    double second =
        oracles::integrate([&](double x) { return x * x * bpareto_pdf(blaw, x); }, blaw.scale,
                           blaw.cutoff, 1e-10) +
        blaw.cutoff * blaw.cutoff * bpareto_atom_mass(blaw);
    double var = second - m * m;
    CHECK(std::isfinite(var));
    CHECK(var > 0.0);

    // unbounded pareto with alpha<2: sample variance keeps growing
    ParetoLaw plaw(1.5, 1.0);
    UniformStream s(31415, 0, StreamPurpose::noise);
    std::vector<double> acc;
    double prev_var = 0.0;
    int growth = 0;
    for (int stage = 0; stage < 4; ++stage) {
        int target = 1000 << (4 * stage);
        while (static_cast<int>(acc.size()) < target)
            acc.push_back(pareto_sample(plaw, s.next_double()));
        double v = oracles::variance_of(acc);
        if (v > prev_var) ++growth;
        prev_var = v;
    }
    CHECK(growth >= 3);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(ParetoLaw(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ParetoLaw(1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ParetoLaw(1.5, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(BoundedParetoLaw(1.0, 2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BoundedParetoLaw(-1.0, 1.0, 10.0), std::invalid_argument);
}

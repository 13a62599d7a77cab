#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "heavytail/errors.hpp"
#include "heavytail/insensitivity.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/tail_model.hpp"

using namespace heavytail;

namespace {

// two-sided Kolmogorov-Smirnov distance against the analytic CDF; the 1%
// asymptotic critical value is 1.62762/sqrt(n) (conservative with atoms).
// The lower comparison uses the left limit F(x-) so atoms are not
// double-counted.
double ks_distance(std::vector<double> sample, const TailModel& m) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sample.size()) {
        const double x = sample[i];
        std::size_t j = i;
        while (j < sample.size() && sample[j] == x) ++j;  // tied run [i, j)
        const double fx = m.cdf(x);
        const double fx_minus =
            1.0 - m.tail(x - 1e-12 * std::max(1.0, std::abs(x)));
        d = std::max(d, std::abs(static_cast<double>(j) / n - fx));
        d = std::max(d, std::abs(static_cast<double>(i) / n - fx_minus));
        i = j;
    }
    return d;
}

std::vector<ModelPtr> model_zoo() {
    return {
        two_sided_pareto(1.0, 2.0),
        two_sided_pareto(1.5, 3.0),
        symmetric_pareto(3.0),
        pareto(1.0),
        pareto_weight(2.0, 1.0),
        pareto_weight(2.0, 0.2),
        log_perturbed_pareto(0.5, 1.0),
        log_perturbed_pareto(1.0, 2.0),
        inverse_power_log(12.0),
        oscillating_tail(1.0, 2.0, 8.0),
        integrated_oscillating(0.5, 2.0, 8.0),
        composite_weight(5.0, 12.0),
        exponential(1.0),
    };
}

}  // namespace

TEST_CASE("two-sided pareto tail branches") {
    const auto f = two_sided_pareto(1.0, 2.0);
    CHECK(f->tail(2.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f->tail(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f->tail(-2.0) == doctest::Approx(0.875).epsilon(1e-15));
    // continuity at the breakpoints
    CHECK(f->tail(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f->tail(-1.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("quantiles: closed forms and flat-region convention") {
    const auto f = two_sided_pareto(1.0, 2.0);
    CHECK(f->quantile(0.75) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f->quantile(0.5) == -1.0);  // left endpoint of the flat region
    const auto g = pareto_weight(2.0, 1.0);
    CHECK(g->quantile(0.75) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)f->quantile(0.0), invalid_parameter);
    CHECK_THROWS_AS((void)f->quantile(1.0), invalid_parameter);
    CHECK_THROWS_AS((void)f->quantile(-0.5), invalid_parameter);
}

TEST_CASE("numeric quantile matches tail to relative 1e-12") {
    const auto g = log_perturbed_pareto(0.5, 1.0);
    for (double u : {0.1, 0.5, 0.9, 0.999, 1.0 - 1e-9}) {
        const double q = g->quantile(u);
        CHECK(g->tail(q) == doctest::Approx(1.0 - u).epsilon(1e-9));
    }
}

TEST_CASE("sampling: point mass, determinism, binomial tail check") {
    const auto pm = point_mass(5.0);
    RandomStream r1 = RandomStream::derive(7, 0, 0);
    CHECK(pm->sample(r1) == 5.0);

    const auto f = two_sided_pareto(1.0, 2.0);
    RandomStream a = RandomStream::derive(42, 1, 0);
    RandomStream b = RandomStream::derive(42, 1, 0);
    for (int i = 0; i < 100; ++i) CHECK(f->sample(a) == f->sample(b));

    const std::size_t n = 100000;
    RandomStream rng = RandomStream::derive(42, 2, 0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (f->sample(rng) > 2.0) ++hits;
    const double emp = static_cast<double>(hits) / n;
    const double se = std::sqrt(0.25 * 0.75 / n);
    CHECK(std::abs(emp - 0.25) <= 3.0 * se);
}

TEST_CASE("inversion consistency across the zoo") {
    for (const auto& m : model_zoo()) {
        for (int k = 1; k < 1000; ++k) {
            const double u = k / 1000.0;
            const double q = m->quantile(u);
            const double eps = 1e-9 * std::max(1.0, std::abs(q));
            // tail(q) <= 1-u (quantile reaches the level) and stepping just
            // below q must not yet reach it, up to the mass at q itself
            CHECK(m->tail(q) <= 1.0 - u + 1e-12);
            CHECK(m->tail(q - eps) >= 1.0 - u - 1e-9);
        }
    }
}

TEST_CASE("sampling consistency: KS distance below the 1% critical value") {
    const std::size_t n = 100000;
    const double crit = 1.62762 / std::sqrt(static_cast<double>(n));
    for (const auto& m : model_zoo()) {
        RandomStream rng = RandomStream::derive(2024, 3, 0);
        std::vector<double> sample(n);
        for (auto& v : sample) v = m->sample(rng);
        CHECK_MESSAGE(ks_distance(std::move(sample), *m) < crit, m->id());
    }
}

TEST_CASE("two-sided pareto: left tail is negligible against the right") {
    const auto f = two_sided_pareto(1.0, 2.0);
    CHECK(f->cdf(-2.0) == doctest::Approx(0.125).epsilon(1e-15));
    double prev = 1.0;
    for (double x = 1e2; x <= 1e10; x *= 10.0) {
        const double ratio = f->cdf(-x) / f->tail(x);  // ~ x^(alpha-beta)
        CHECK(ratio < prev);
        prev = ratio;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("insensitivity function: drift ratios on the closed form") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto h = insensitivity_function(*f, 0.8);
    CHECK(h.mode == InsensitivityFn::Mode::slope_monotone);
    const double r5 = f->tail(1e5 - h.h(1e5)) / f->tail(1e5);
    CHECK(r5 == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
    const double r10 = f->tail(1e10 - h.h(1e10)) / f->tail(1e10);
    CHECK(r10 == doctest::Approx(1.0 / 0.99).epsilon(1e-12));
    CHECK(r10 < r5);

    CHECK_THROWS_AS(insensitivity_function(*f, 1.5), invalid_parameter);
    CHECK_THROWS_AS(insensitivity_function(*f, 0.3),
                    invalid_parameter);  // gamma <= alpha/beta
}

TEST_CASE("insensitivity membership: uniform deviation shrinks along the grid") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto h = insensitivity_function(*f, 0.8);
    double prev = 1e300;
    for (int k = 4; k <= 10; ++k) {
        const double dev = uniform_ratio_deviation(*f, h.h, std::pow(10.0, k));
        CHECK(dev <= prev + 1e-12);
        prev = dev;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("widened insensitivity: staircase construction properties") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto h = insensitivity_function(*f, 0.8);
    const auto h1 = widen_insensitivity(h, *f);
    CHECK(h1.mode == InsensitivityFn::Mode::slope_vanishing);

    double prev_growth = 0.0;
    for (int k = 3; k <= 12; ++k) {
        const double x = std::pow(10.0, k);
        const double growth = h1.h(x) / h.h(x);
        CHECK(growth >= prev_growth - 1e-12);
        prev_growth = growth;
    }
    CHECK(prev_growth > 8.0);  // the widening factor keeps growing
    // h1(x)/x -> 0: the slope at the end of the grid has visibly collapsed
    const double slope_start = h1.h(1e3) / 1e3;
    const double slope_end = h1.h(1e12) / 1e12;
    CHECK(slope_end < 0.5 * slope_start);
    CHECK(slope_end < 0.2);

    // drift ratio within (1 - 1/n, 1 + 1/n) between consecutive thresholds:
    // verified by direct tail arithmetic on a dense scan
    for (double x = 1e3; x <= 1e9; x *= 1.7) {
        const double ratio = f->tail(x - h1.h(x)) / f->tail(x);
        const double fval = h1.h(x) / h.h(x);
        const double n = std::max(1.0, std::floor(fval));
        if (n < 2) continue;
        CHECK(ratio > 1.0 - 1.0 / (n - 1.0));
        CHECK(ratio < 1.0 + 1.0 / (n - 1.0));
    }

    CHECK_THROWS_AS(
        widen_insensitivity(
            InsensitivityFn{[](double x) { return std::sqrt(std::max(x, 1.0)); },
                            InsensitivityFn::Mode::slope_monotone},
            *exponential(1.0)),
        unsupported_model);
}

TEST_CASE("weight window: constraints and evaluations") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto w = weight_window(*f, 1.5, 0.8, 0.1, 0.4);
    CHECK(w.left_tail_exponent == doctest::Approx(-0.45).epsilon(1e-12));
    CHECK(w.f2(1e4) == doctest::Approx(std::pow(10.0, 1.6)).epsilon(1e-12));
    CHECK(w.f1(1e4) == doctest::Approx(std::pow(10.0, -0.4)).epsilon(1e-12));
    CHECK(w.f1(0.5) == 1.0);
    CHECK(w.f2(0.5) == 1.0);

    // gamma1 >= 1 - gamma
    CHECK_THROWS_AS(weight_window(*f, 1.5, 0.8, 0.3, 0.4), invalid_parameter);
    // gamma2 >= gamma
    CHECK_THROWS_AS(weight_window(*f, 1.5, 0.8, 0.1, 0.9), invalid_parameter);
    // gamma <= alpha/beta
    CHECK_THROWS_AS(weight_window(*f, 1.5, 0.4, 0.1, 0.2), invalid_parameter);
    // p <= J+
    CHECK_THROWS_AS(weight_window(*f, 0.9, 0.8, 0.1, 0.4), invalid_parameter);
}

TEST_CASE("class diagnostics: RV fit, oscillation detection, Potter bound") {
    const auto f = two_sided_pareto(1.5, 3.0);
    const auto rep = class_diagnostics(*f, 2.5);
    CHECK(std::abs(rep.rv_index_fit - 1.5) < 0.05);
    CHECK(rep.in_l);
    CHECK(rep.in_d);
    CHECK(rep.potter_ok);
    CHECK(rep.potter_c1 >= 1.0);
    CHECK(rep.potter_c1 < 1.5);

    const auto osc = oscillating_tail(1.0, 2.0, 8.0);
    const auto orep = class_diagnostics(*osc, 3.0);
    CHECK_FALSE(orep.in_l);
    CHECK(std::abs(orep.step_ratio_limsup - 2.0) < 0.2);
    CHECK(orep.in_d);

    const auto ex = exponential(1.0);
    const auto erep = class_diagnostics(*ex, 2.0, 1e2, 1e4);
    CHECK_FALSE(erep.in_d);
    CHECK_FALSE(erep.in_l);
}

TEST_CASE("oscillating tail: exact step ratios at the breakpoints") {
    const double alpha = 1.0, a = 2.0;
    const auto g = oscillating_tail(alpha, a, 8.0);
    const double r = std::pow(a, 1.0 / (alpha + 1.0));
    double x_i = 8.0;
    for (int i = 0; i < 6; ++i) {
        const double y_i = r * x_i;
        // flat on [x_i, y_i): value of the base curve at x_i
        CHECK(g->tail(0.5 * (x_i + y_i)) ==
              doctest::Approx(std::pow(x_i, -alpha - 1.0)).epsilon(1e-12));
        // the drop at y_i is exactly the factor a
        CHECK(g->tail(y_i - 1e-9) / g->tail(y_i) ==
              doctest::Approx(a).epsilon(1e-6));
        x_i = 2.0 * y_i;
    }
}

TEST_CASE("integrated oscillating: continuous tail comparable to the power") {
    const auto g = integrated_oscillating(0.5, 2.0, 8.0);
    for (double x = 10.0; x < 1e12; x *= 3.7) {
        const double ratio = g->tail(x) / (std::pow(x, -0.5) / 0.5);
        CHECK(ratio > 0.2);
        CHECK(ratio < 2.5 * 2.0);
        // continuity probe
        CHECK(g->tail(x * (1 + 1e-9)) ==
              doctest::Approx(g->tail(x)).epsilon(1e-6));
    }
    CHECK(*g->moment_finite(0.4));
    CHECK_FALSE(*g->moment_finite(0.5));
}

TEST_CASE("model ids render and reject bad parameters") {
    CHECK(two_sided_pareto(1.0, 2.0)->id() ==
          "two_sided_pareto(alpha=1,beta=2)");
    CHECK(pareto_weight(2.0, 0.2)->id() == "pareto_weight(theta=2,c=0.2)");
    CHECK_THROWS_AS(two_sided_pareto(2.0, 2.0), invalid_parameter);
    CHECK_THROWS_AS(pareto_weight(-1.0, 1.0), invalid_parameter);
    CHECK_THROWS_AS(oscillating_tail(1.0, 2.0, 1.0), invalid_parameter);
}

TEST_CASE("power moments: closed forms") {
    CHECK(power_moment(*pareto_weight(2.0, 1.0), 1.0) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(power_moment(*pareto_weight(2.0, 0.2), 1.0) ==
          doctest::Approx(0.4).epsilon(1e-12));
    CHECK(power_moment(*point_mass(0.5), 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(power_moment(*pareto_weight(2.0, 1.0), 2.0),
                    invalid_parameter);
    CHECK_THROWS_AS(power_moment(*log_perturbed_pareto(0.5, 1.0), 0.5),
                    invalid_parameter);
}

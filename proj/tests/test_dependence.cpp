#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "heavytail/dependence.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/tail_model.hpp"

using namespace heavytail;

namespace {

double two_sample_ks(const SampleMatrix& m, std::size_t a, std::size_t b) {
    std::vector<double> u(m.rows), v(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        u[r] = m.at(r, a);
        v[r] = m.at(r, b);
    }
    std::sort(u.begin(), u.end());
    std::sort(v.begin(), v.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    const double n = static_cast<double>(m.rows);
    while (i < u.size() && j < v.size()) {
        if (u[i] <= v[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i / n - j / n));
    }
    return d;
}

}  // namespace

TEST_CASE("quantile antithetic inversion: (1/U, 1/(1-U)) for the unit Pareto") {
    const auto spec = DependenceSpec::quantile_antithetic(pareto(1.0));
    RandomStream rng = RandomStream::derive(5, 0, kStreamIncrements);
    RandomStream replay = RandomStream::derive(5, 0, kStreamIncrements);
    double out[2];
    sample_increments(spec, 2, rng, out);
    const double u = replay.next_uniform();
    CHECK(out[0] == doctest::Approx(1.0 / u).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(1.0 / (1.0 - u)).epsilon(1e-14));
}

TEST_CASE("nuod pairwise: (V1 + U1, V2 - U1)") {
    const auto h = symmetric_pareto(3.0);
    const auto g = symmetric_pareto(2.0);
    const auto spec = DependenceSpec::nuod_pairwise(h, g);
    RandomStream rng = RandomStream::derive(11, 0, kStreamIncrements);
    RandomStream replay = RandomStream::derive(11, 0, kStreamIncrements);
    double out[2];
    sample_increments(spec, 2, rng, out);
    const double v1 = g->sample(replay);
    const double v2 = g->sample(replay);
    const double u1 = h->sample(replay);
    CHECK(out[0] == v1 + u1);
    CHECK(out[1] == v2 - u1);
}

TEST_CASE("independent degenerate increments") {
    const auto spec = DependenceSpec::independent(point_mass(5.0));
    RandomStream rng = RandomStream::derive(1, 0, kStreamIncrements);
    double out[3];
    sample_increments(spec, 3, rng, out);
    CHECK(out[0] == 5.0);
    CHECK(out[1] == 5.0);
    CHECK(out[2] == 5.0);
}

TEST_CASE("variant arity violations") {
    RandomStream rng = RandomStream::derive(1, 0, 0);
    double out[4];
    CHECK_THROWS_AS(sample_increments(
                        DependenceSpec::quantile_antithetic(pareto(1.0)), 3,
                        rng, out),
                    invalid_parameter);
    CHECK_THROWS_AS(
        sample_increments(DependenceSpec::utai_sum(symmetric_pareto(2.0)), 4,
                          rng, out),
        invalid_parameter);
    CHECK_THROWS_AS(
        sample_increments(DependenceSpec::nuod_pairwise(symmetric_pareto(3.0),
                                                        symmetric_pareto(2.0)),
                          3, rng, out),
        invalid_parameter);
}

TEST_CASE("exceedance estimators: disjoint antithetic events above the median") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto spec = DependenceSpec::quantile_antithetic(f);
    const auto samples = draw_samples(spec, 2, 100000, 7);
    const double t = f->quantile(0.9);  // = 5
    const auto e = exceedance_estimators(samples, 0, 1, t, t);
    CHECK(e.utai_hat == 0.0);
    CHECK(e.conditioning_hits > 9000);
}

TEST_CASE("exceedance estimators: antithetic far tails are fully dependent in "
          "absolute value") {
    // With thresholds satisfying F(-x1) >= tail(x2), conditioning on
    // X2 > x2 forces X1 below -x1, so tai_hat = 1 exactly.
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto spec = DependenceSpec::quantile_antithetic(f);
    const auto samples = draw_samples(spec, 2, 1000000, 2027);
    const double x2 = f->quantile(1.0 - 1e-3);  // = 500
    const double x1 = 20.0;                     // F(-20) = 1.25e-3 >= 1e-3
    CHECK(f->cdf(-x1) >= f->tail(x2));
    const auto e = exceedance_estimators(samples, 0, 1, x1, x2);
    CHECK(e.conditioning_hits > 700);
    CHECK(e.tai_hat == 1.0);
    CHECK(e.utai_hat == 0.0);
}

TEST_CASE("exceedance estimators: independent events factorize at the median") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto spec = DependenceSpec::independent(f);
    const auto samples = draw_samples(spec, 2, 100000, 13);
    const double t = f->quantile(0.5);
    const auto e = exceedance_estimators(samples, 0, 1, t, t);
    const double p = f->tail(t);  // 0.5
    CHECK(std::abs(e.utai_hat - p) <= 3.0 * e.utai_se + 1e-12);
}

TEST_CASE("exceedance estimators: error paths") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto spec = DependenceSpec::independent(f);
    const auto small = draw_samples(spec, 2, 100, 1);
    CHECK_THROWS_AS(exceedance_estimators(small, 0, 1, 1.0, 1.0),
                    invalid_parameter);
    const auto samples = draw_samples(spec, 2, 2000, 1);
    try {
        exceedance_estimators(samples, 0, 1, 0.0, 1e12);
        CHECK(false);
    } catch (const undefined_estimate& e) {
        CHECK(e.count == 0);
    }
}

TEST_CASE("utai decay: conditional exceedance shrinks along quantile levels") {
    const std::size_t n = 10000000;
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto y = symmetric_pareto(2.0);

    const std::vector<DependenceSpec> variants = {
        DependenceSpec::independent(f),
        DependenceSpec::utai_sum(y),
        DependenceSpec::quantile_antithetic(f),
        DependenceSpec::nuod_pairwise(symmetric_pareto(3.0), y),
    };
    for (const auto& spec : variants) {
        const auto samples = draw_samples(spec, 2, n, 99);
        double prev_hat = 1.0, prev_se = 0.0;
        for (int k = 1; k <= 3; ++k) {
            const double u = 1.0 - std::pow(10.0, -k);
            const double t =
                spec.variant == DependenceVariant::independent ||
                        spec.variant == DependenceVariant::quantile_antithetic
                    ? f->quantile(u)
                    : empirical_quantile(samples, 1, u);
            const auto e = exceedance_estimators(samples, 0, 1, t, t);
            CHECK_MESSAGE(
                e.utai_hat <= prev_hat + 3.0 * (e.utai_se + prev_se) + 1e-12,
                spec.variant_name() << " at level k=" << k);
            prev_hat = e.utai_hat;
            prev_se = e.utai_se;
        }
        CHECK_MESSAGE(prev_hat < 0.25, spec.variant_name());
    }
}

TEST_CASE("utai-sum witnesses the absolute-tail lower bound ~ 1/2") {
    const std::size_t n = 1000000;
    const auto spec = DependenceSpec::utai_sum(symmetric_pareto(2.0));
    const auto samples = draw_samples(spec, 2, n, 321);
    const double t = empirical_quantile(samples, 0, 1.0 - 1e-3);
    // condition on X1 > t and watch |X2|
    const auto e = exceedance_estimators(samples, 1, 0, t, t);
    CHECK(e.conditioning_hits > 700);
    CHECK(e.tai_hat >= 0.4 - 3.0 * e.tai_se);
    // and the upper-tail part still vanishes
    CHECK(e.utai_hat < 0.05);
}

TEST_CASE("marginal equality across components (KS below the 1% critical "
          "value)") {
    const std::size_t n = 100000;
    const double crit = 1.62762 * std::sqrt(2.0 / static_cast<double>(n));
    const auto f = two_sided_pareto(1.0, 2.0);

    const std::vector<DependenceSpec> variants = {
        DependenceSpec::independent(f),
        DependenceSpec::quantile_antithetic(f),
        DependenceSpec::nuod_pairwise(symmetric_pareto(3.0),
                                      symmetric_pareto(2.0)),
    };
    for (const auto& spec : variants) {
        const auto samples = draw_samples(spec, 2, n, 404);
        CHECK_MESSAGE(two_sample_ks(samples, 0, 1) < crit,
                      spec.variant_name());
    }
}

TEST_CASE("nuod pairwise obeys the product upper-orthant bound") {
    const std::size_t n = 1000000;
    const auto spec = DependenceSpec::nuod_pairwise(symmetric_pareto(3.0),
                                                    symmetric_pareto(2.0));
    const auto samples = draw_samples(spec, 2, n, 777);
    for (int k = 1; k <= 3; ++k) {
        const double t = empirical_quantile(samples, 0, 1.0 - std::pow(10.0, -k));
        std::size_t c1 = 0, c2 = 0, joint = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const bool a = samples.at(r, 0) > t;
            const bool b = samples.at(r, 1) > t;
            c1 += a;
            c2 += b;
            joint += a && b;
        }
        const double dn = static_cast<double>(n);
        const double p1 = c1 / dn, p2 = c2 / dn, pj = joint / dn;
        const double se_j = std::sqrt(pj * (1.0 - pj) / dn);
        const double se_prod = p1 * std::sqrt(p2 * (1.0 - p2) / dn) +
                               p2 * std::sqrt(p1 * (1.0 - p1) / dn);
        CHECK(pj <= p1 * p2 + 3.0 * (se_j + se_prod) + 1e-12);
    }
}

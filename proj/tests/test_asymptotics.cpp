#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "heavytail/asymptotics.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/weights.hpp"

using namespace heavytail;

namespace {

// Exact H_k(x) = P(Y_1...Y_k X > x) for X two-sided Pareto(1,2) and
// Y ~ Pareto(theta=2,c=1): log W_k is Gamma(k, 1/2), so with M = ln x
//   H_k(x) = (2^k / 2x) * (k-1)! ... reduces to
//   (2^k/(2x)) <normalized lower Gamma> + (1/2) P(W_k > x)
// and both pieces have elementary partial-sum forms.
double product_tail_exact(std::size_t k, double x) {
    const double m = std::log(x);
    double partial1 = 0.0;  // sum_{j<k} m^j/j!
    double partial2 = 0.0;  // sum_{j<k} (2m)^j/j!
    double term1 = 1.0, term2 = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
        partial1 += term1;
        partial2 += term2;
        term1 *= m / static_cast<double>(j + 1);
        term2 *= 2.0 * m / static_cast<double>(j + 1);
    }
    const double pow2k = std::pow(2.0, static_cast<double>(k));
    return pow2k / (2.0 * x) * (1.0 - std::exp(-m) * partial1) +
           0.5 * std::exp(-2.0 * m) * partial2;
}

class NoClosedForms final : public TailModel {
public:
    explicit NoClosedForms(ModelPtr base) : base_(std::move(base)) {}
    double tail(double x) const override { return base_->tail(x); }
    double quantile(double u) const override { return base_->quantile(u); }
    Interval support() const override { return base_->support(); }
    std::string id() const override { return base_->id(); }

private:
    ModelPtr base_;
};

double standard_f2(double x) {
    return x <= 1.0 ? 1.0 : x / std::log(std::exp(1.0) - 1.0 + x);
}

}  // namespace

TEST_CASE("fixed-weight right-hand side") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const double w11[] = {1.0, 1.0};
    CHECK(fixed_weight_rhs(*f, w11, 10.0) == doctest::Approx(0.1).epsilon(1e-15));
    const double w21[] = {2.0, 1.0};
    CHECK(fixed_weight_rhs(*f, w21, 10.0) ==
          doctest::Approx(0.15).epsilon(1e-15));
    const double w1[] = {1.0};
    CHECK(fixed_weight_rhs(*f, w1, 10.0) == doctest::Approx(0.05).epsilon(1e-15));
    const double bad[] = {-1.0};
    CHECK_THROWS_AS(fixed_weight_rhs(*f, bad, 10.0), invalid_parameter);
}

TEST_CASE("random-weight tail: degenerate weights reduce exactly") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto unit = WeightProcess::product_iid(point_mass(1.0));
    CHECK(random_weight_tail(*f, unit, 1, 7.0).value == f->tail(7.0));
    const auto half = WeightProcess::product_iid(point_mass(0.5));
    CHECK(random_weight_tail(*f, half, 2, 7.0).value == f->tail(28.0));
}

TEST_CASE("random-weight tail: single integral matches the exact form") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto proc = WeightProcess::product_iid(pareto_weight(2.0, 1.0));
    const auto h1 = random_weight_tail(*f, proc, 1, 100.0);
    // exact: 1/x - 1/(2x^2); and within 5% of the Breiman limit EY tail(x)
    CHECK(h1.value == doctest::Approx(0.00995).epsilon(1e-6));
    CHECK(std::abs(h1.value - 0.01) <= 0.05 * 0.01);
    CHECK(h1.achieved_tol <= 1e-4);

    // independent_iid weights use the same single integral at every index
    const auto ind = WeightProcess::independent_iid(pareto_weight(2.0, 1.0));
    CHECK(random_weight_tail(*f, ind, 3, 100.0).value ==
          doctest::Approx(0.00995).epsilon(1e-6));
}

TEST_CASE("random-weight tail: nested log-scale convolution for i = 2..4") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto proc = WeightProcess::product_iid(pareto_weight(2.0, 1.0));
    for (std::size_t i : {2u, 3u, 4u}) {
        const double x = 1e4;
        const auto h = random_weight_tail(*f, proc, i, x);
        CHECK_MESSAGE(h.value == doctest::Approx(product_tail_exact(i, x))
                                     .epsilon(2e-3),
                      "i=" << i);
        CHECK(h.achieved_tol <= 1e-4);
    }
}

TEST_CASE("random-weight tail: stratified cube integration beyond depth 4") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto proc = WeightProcess::product_iid(pareto_weight(2.0, 1.0));
    RwOptions opts;
    opts.target_rel_tol = 2e-2;  // quasi-integration budget at 1e6 strata
    const double x = 1e4;
    const auto h = random_weight_tail(*f, proc, 5, x, opts);
    CHECK(h.value == doctest::Approx(product_tail_exact(5, x)).epsilon(0.02));
}

TEST_CASE("extended Breiman right-hand sides") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto g = pareto_weight(2.0, 1.0);  // EY = 2
    const CaseLabel label = case_classifier(*g, 1.0);
    const TruncatedMoment unused{g, 1.0, standard_f2};
    CHECK(breiman_tail(*f, *g, label, unused, 2, 100.0) ==
          doctest::Approx(0.02).epsilon(1e-12));
    CHECK(breiman_tail(*f, *g, label, unused, 0, 100.0) == f->tail(100.0));

    // case 3: composition I(x)^n tail(x)
    const auto g3 = log_perturbed_pareto(1.0, 1.0);
    const CaseLabel label3 = case_classifier(*g3, 1.0);
    CHECK(label3.label == TailCase::three);
    const TruncatedMoment moment{g3, 1.0, standard_f2};
    const double x = 1e8;
    CHECK(breiman_tail(*f, *g3, label3, moment, 3, x) ==
          doctest::Approx(std::pow(moment(x), 3.0) * f->tail(x))
              .epsilon(1e-12));

    // cases 1-2 with a divergent moment are inconsistent
    CaseLabel wrong;
    wrong.label = TailCase::one;
    CHECK_THROWS_AS(breiman_tail(*f, *g3, wrong, moment, 2, x),
                    invalid_parameter);
}

TEST_CASE("finite-horizon ruin approximations") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto g = pareto_weight(2.0, 0.2);  // EY = 0.4
    const CaseLabel label = case_classifier(*g, 1.0);
    CHECK(label.label == TailCase::one);

    const auto rv = ruin_approx_finite(*f, g, nullptr, label, 2, 1e3,
                                       RuinApproxMode::rv_cases12);
    CHECK(rv.value == doctest::Approx(0.56 * f->tail(1e3)).epsilon(1e-12));

    // unit weights: the generic route equals the fixed-weight sum exactly
    const auto unit = point_mass(1.0);
    const auto gen = ruin_approx_finite(*f, unit, nullptr, label, 2, 1e3,
                                        RuinApproxMode::generic);
    const double w[] = {1.0, 1.0};
    CHECK(gen.value == fixed_weight_rhs(*f, w, 1e3));

    // case-3 leading term at n = 1 is the extended Breiman value
    const auto g3 = log_perturbed_pareto(1.0, 1.0);
    const CaseLabel label3 = case_classifier(*g3, 1.0);
    TruncatedMoment moment{g3, 1.0, standard_f2};
    const auto c3 = ruin_approx_finite(*f, g3, &moment, label3, 1, 1e6,
                                       RuinApproxMode::rv_case3);
    CHECK(c3.leading.has_value());
    CHECK(*c3.leading ==
          doctest::Approx(breiman_tail(*f, *g3, label3, moment, 1, 1e6))
              .epsilon(1e-12));
    CHECK(c3.value == doctest::Approx(*c3.leading).epsilon(1e-12));
}

TEST_CASE("infinite-horizon factor: series, closed form, remainder") {
    const auto f = two_sided_pareto(1.0, 2.0);

    const auto half = point_mass(0.5);  // factor 0.5/0.5 = 1
    const auto r1 = ruin_approx_infinite(*f, *half, 1e3);
    CHECK(r1.series_factor == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r1.value == doctest::Approx(f->tail(1e3)).epsilon(1e-6));
    CHECK(r1.remainder_bound < 1e-8);

    const auto g = pareto_weight(2.0, 0.2);  // EY = 0.4, factor 2/3
    const auto r2 = ruin_approx_infinite(*f, *g, 1e3);
    CHECK(r2.series_factor == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(r2.closed_form ==
          doctest::Approx(2.0 / 3.0 * f->tail(1e3)).epsilon(1e-12));
    CHECK(r2.remainder_bound < 1e-8);

    CHECK_THROWS_AS(ruin_approx_infinite(*f, *point_mass(1.1), 1e3),
                    invalid_parameter);
}

TEST_CASE("stopping times: pmf bookkeeping") {
    const auto det = StoppingTime::deterministic(3);
    CHECK(det.survival(1) == 1.0);
    CHECK(det.survival(3) == 1.0);
    CHECK(det.survival(4) == 0.0);
    CHECK(det.moment(2.0) == doctest::Approx(9.0));

    const auto geo = StoppingTime::geometric(0.5);
    double total = 0.0;
    for (double p : geo.pmf) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geo.renormalized);
    CHECK(geo.survival(2) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(geo.moment(2.5) < 1e300);  // E tau^(p+1) recorded finite
}

TEST_CASE("stopped-sum approximation: reductions and the geometric factor") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto g = pareto_weight(2.0, 0.2);  // m = EY = 0.4
    const CaseLabel label = case_classifier(*g, 1.0);
    const double x = 1e3;

    // deterministic tau = n reduces to the finite-horizon series
    const auto det = stopped_sum_approx(*f, *g, nullptr, label,
                                        StoppingTime::deterministic(2), x, 1.5,
                                        16);
    const auto rv = ruin_approx_finite(*f, g, nullptr, label, 2, x,
                                       RuinApproxMode::rv_cases12);
    CHECK(det.value == doctest::Approx(rv.value).epsilon(1e-12));
    CHECK(det.remainder_bound == 0.0);

    // geometric tau with q = 0.5: sum = m/(1 - q m) tail(x) = 0.5 tail(x)
    const auto geo = stopped_sum_approx(*f, *g, nullptr, label,
                                        StoppingTime::geometric(0.5), x, 1.5,
                                        60);
    CHECK(geo.value == doctest::Approx(0.5 * f->tail(x)).epsilon(1e-6));

    // tau = 1 gives H_1(x) = m tail(x)
    const auto one = stopped_sum_approx(*f, *g, nullptr, label,
                                        StoppingTime::deterministic(1), x, 1.5,
                                        16);
    CHECK(one.value == doctest::Approx(0.4 * f->tail(x)).epsilon(1e-12));

    // stochastic ordering: the heavier geometric dominates
    const auto lighter = stopped_sum_approx(*f, *g, nullptr, label,
                                            StoppingTime::geometric(0.3), x,
                                            1.5, 60);
    CHECK(geo.value > lighter.value);

    // a tight truncation with a slowly-decaying tau must refuse
    const auto heavy = point_mass(0.9);
    const CaseLabel hl = case_classifier(*heavy, 1.0);
    CHECK_THROWS_AS(stopped_sum_approx(*f, *heavy, nullptr, hl,
                                       StoppingTime::geometric(0.99), x, 1.5,
                                       5),
                    numeric_error);
}

TEST_CASE("case classifier: analytic rules and the growth heuristic") {
    CHECK(case_classifier(*pareto_weight(2.0, 1.0), 1.0).label ==
          TailCase::one);
    CHECK(case_classifier(*log_perturbed_pareto(0.5, 1.0), 0.5).label ==
          TailCase::three);
    CHECK(case_classifier(*log_perturbed_pareto(1.0, 2.0), 1.0).label ==
          TailCase::two);
    CHECK_FALSE(case_classifier(*pareto_weight(2.0, 1.0), 1.0).heuristic);

    const NoClosedForms masked(pareto_weight(3.0, 1.0));
    const auto label = case_classifier(masked, 1.0);
    CHECK(label.heuristic);
    CHECK(label.label == TailCase::one);
}

TEST_CASE("product-weight comparability across indices (finite grid)") {
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto proc = WeightProcess::product_iid(pareto_weight(2.0, 0.2));
    const double x = 1e4;
    const double h1 = random_weight_tail(*f, proc, 1, x).value;
    for (std::size_t i = 1; i <= 4; ++i) {
        const double hi = random_weight_tail(*f, proc, i, x).value;
        const double pattern = std::pow(0.4, static_cast<double>(i - 1));
        CHECK_MESSAGE(std::abs(hi / h1 - pattern) <= 0.05 * pattern, "i=" << i);
    }
}

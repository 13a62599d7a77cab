#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "heavytail/errors.hpp"
#include "heavytail/weights.hpp"

using namespace heavytail;

namespace {

// hides the closed-form truncated moment so truncated_moment() must take the
// quadrature route; used as the independent check against the closed form
class QuadratureOnly final : public TailModel {
public:
    explicit QuadratureOnly(ModelPtr base) : base_(std::move(base)) {}
    double tail(double x) const override { return base_->tail(x); }
    double quantile(double u) const override { return base_->quantile(u); }
    Interval support() const override { return base_->support(); }
    std::string id() const override { return base_->id(); }

private:
    ModelPtr base_;
};

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return g;
}

double standard_f2(double x) {
    return x <= 1.0 ? 1.0 : x / std::log(std::exp(1.0) - 1.0 + x);
}

}  // namespace

TEST_CASE("sample_weights: fixed, deterministic products, log-walk mean") {
    RandomStream rng = RandomStream::derive(3, 0, kStreamWeights);
    double out[3];
    sample_weights(WeightProcess::fixed_vector({2.0, 1.0}), 2, rng, out);
    CHECK(out[0] == 2.0);
    CHECK(out[1] == 1.0);

    sample_weights(WeightProcess::product_iid(point_mass(0.5)), 3, rng, out);
    CHECK(out[0] == 0.5);
    CHECK(out[1] == 0.25);
    CHECK(out[2] == 0.125);

    // E log W_2 = 2 E log Y = 2/theta = 1 for theta = 2 (log Y ~ Exp(theta))
    const auto proc = WeightProcess::product_iid(pareto_weight(2.0, 1.0));
    const std::size_t n = 1000000;
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        RandomStream s = RandomStream::derive(17, r, kStreamWeights);
        double w[2];
        sample_weights(proc, 2, s, w);
        acc += std::log(w[1]);
    }
    const double mean = acc / static_cast<double>(n);
    const double sigma = std::sqrt(0.5 / static_cast<double>(n));
    CHECK(std::abs(mean - 1.0) <= 3.0 * sigma);
}

TEST_CASE("truncated moment: closed form, empty region, monotone convergence") {
    const auto g = pareto_weight(2.0, 1.0);
    // I = theta/(theta-alpha) (1 - T^(alpha-theta)) = 2 (1 - 1e-4) at T = 1e4
    CHECK(truncated_moment(*g, 1.0, 1e4) ==
          doctest::Approx(1.9998).epsilon(1e-12));
    CHECK(truncated_moment(*g, 1.0, 1.0) == 0.0);   // cap at the support min
    CHECK(truncated_moment(*g, 1.0, 0.5) == 0.0);

    double prev = 0.0;
    for (double cap : log_grid(1.5, 1e7, 40)) {
        const double v = truncated_moment(*g, 1.0, cap);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
    CHECK(prev == doctest::Approx(2.0).epsilon(1e-6));  // cap/c >= 1e6
}

TEST_CASE("truncated moment: quadrature route matches the closed form") {
    const auto closed = pareto_weight(2.0, 1.0);
    const QuadratureOnly masked(pareto_weight(2.0, 1.0));
    for (double cap : log_grid(1.2, 1e6, 50)) {
        const double a = truncated_moment(*closed, 1.0, cap);
        const double b = truncated_moment(masked, 1.0, cap);
        CHECK(b == doctest::Approx(a).epsilon(1e-6));
    }
    // interval splitting agrees with the difference of truncated moments
    const double whole = truncated_moment(*closed, 1.0, 100.0);
    const double split = truncated_moment(*closed, 1.0, 10.0) +
                         truncated_moment_interval(*closed, 1.0, 10.0, 100.0);
    CHECK(split == doctest::Approx(whole).epsilon(1e-9));
}

TEST_CASE("case-3 truncated moment grows like alpha lnln x from above") {
    // G with tail x^-alpha/ln(e-1+x), truncation level x/ln(e-1+x)
    const auto g = log_perturbed_pareto(0.5, 1.0);
    const TruncatedMoment moment{g, 0.5, standard_f2};
    double prev_gap = 1e300;
    for (double x : {1e9, 1e10, 1e11, 1e12}) {
        const double ratio = moment(x) / (0.5 * std::log(std::log(x)));
        CHECK(ratio > 1.0);
        const double gap = std::abs(ratio - 1.0);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("weight conditions: Pareto-weight setup decays as the exponents say") {
    // theta gamma2 > alpha with room: theta=2, gamma2=0.7 under gamma=0.8
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto g = pareto_weight(2.0, 1.0);
    const auto window = weight_window(*f, 1.5, 0.8, 0.1, 0.7);
    const auto grid = log_grid(1e2, 1e8, 13);
    const auto rep = weight_condition_checks(*f, *g, window, 1.5, grid);

    CHECK(rep.tail_ratio_decays);
    // exact exponent: 2 x^(-theta gamma2 + alpha) = 2 x^-0.4
    CHECK(rep.rows.front().tail_ratio ==
          doctest::Approx(2.0 * std::pow(1e2, -0.4)).epsilon(1e-10));
    CHECK(rep.rows.back().tail_ratio ==
          doctest::Approx(2.0 * std::pow(1e8, -0.4)).epsilon(1e-10));
    CHECK(rep.rows.back().tail_ratio < 1e-2 * rep.rows.front().tail_ratio);

    // Y >= 1 a.s., so the left-tail product vanishes identically
    for (const auto& row : rep.rows) CHECK(row.left_tail_value == 0.0);
    CHECK(rep.left_tail_decays);

    // sup_{1<=y<=f2} G(x/y)/(y^theta G(x)) = 1 exactly for the pure Pareto
    CHECK(rep.ratio_sup_max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.product_bound_decays);
}

TEST_CASE("weight conditions: light-left-tail composite weight") {
    // light left tail via the inverse-power-log part: rho gamma1 > gamma2 p
    const auto f = two_sided_pareto(1.0, 2.0);
    const auto g = composite_weight(5.0, 12.0);
    const auto window = weight_window(*f, 1.5, 0.8, 0.1, 0.4);
    const auto grid = log_grid(1e2, 1e8, 13);
    const auto rep = weight_condition_checks(*f, *g, window, 1.5, grid);

    CHECK(rep.tail_ratio_decays);
    CHECK(rep.left_tail_decays);
    CHECK(rep.product_bound_decays);
    CHECK(rep.rows.back().tail_ratio < 1e-2 * rep.rows.front().tail_ratio);
    CHECK(rep.rows.back().left_tail_value <
          1e-2 * rep.rows.front().left_tail_value);
    // exact form of the left-tail product:
    // f2^p(x) G(f1(x)) = x^(gamma2 p) K(x^gamma1) / 2
    const double x = grid.front();
    const double expect = 0.5 * std::pow(x, 0.4 * 1.5) *
                          std::pow(x, -12.0 * 0.1) *
                          std::pow(std::log(std::exp(1.0) - 1.0 +
                                            std::pow(x, 0.1)),
                                   -2.0);
    CHECK(rep.rows.front().left_tail_value ==
          doctest::Approx(expect).epsilon(1e-10));
    CHECK(rep.ratio_sup_max <= 1.0 + 1e-9);
}

TEST_CASE("I long-tail check: log-perturbed weight is additively insensitive") {
    const auto g = log_perturbed_pareto(0.5, 1.0);
    const TruncatedMoment moment{g, 0.5, standard_f2};
    const auto grid = log_grid(1e4, 1e8, 9);
    const auto rep = i_long_tail_check(moment, 1.0, grid);
    CHECK(rep.in_l0);
    CHECK(rep.detected_step_ratio < 1.05);
    CHECK(rep.a_g > 1.0);
    CHECK(rep.b_f2 > 0.3);
    CHECK(std::abs(rep.rows.back().second - 1.0) < 1e-3);
}

TEST_CASE("I long-tail check: integrated staircase weight keeps jump ratio a") {
    const double a = 2.0;
    const auto g = integrated_oscillating(0.5, a, 8.0);
    const TruncatedMoment moment{g, 0.5, standard_f2};
    const auto grid = log_grid(1e4, 1e8, 9);
    const auto rep = i_long_tail_check(moment, 1.0, grid);
    CHECK_FALSE(rep.in_l0);
    CHECK(rep.detected_step_ratio == doctest::Approx(a).epsilon(0.1));
}

TEST_CASE("I long-tail check: constant truncation level freezes the ratios") {
    const auto g = pareto_weight(2.0, 1.0);
    const TruncatedMoment moment{
        g, 1.0, [](double x) { return std::min(x, 50.0); }};
    const auto grid = log_grid(1e2, 1e6, 9);
    const auto rep = i_long_tail_check(moment, 1.0, grid);
    for (const auto& [x, ratio] : rep.rows)
        if (x > 50.0) CHECK(ratio == 1.0);
}

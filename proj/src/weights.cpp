#include "heavytail/weights.hpp"

#include <algorithm>
#include <cmath>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"
#include "heavytail/quadrature.hpp"

namespace heavytail {

WeightProcess WeightProcess::fixed_vector(std::vector<double> w) {
    for (double v : w)
        if (!(v > 0.0) || !std::isfinite(v))
            throw invalid_parameter(
                "weight process: fixed weights must be positive and finite");
    WeightProcess p;
    p.variant = WeightVariant::fixed_vector;
    p.fixed = std::move(w);
    return p;
}

WeightProcess WeightProcess::product_iid(ModelPtr y_model) {
    if (!(y_model->support().lo >= 0.0))
        throw invalid_parameter("weight process: Y must have positive support");
    WeightProcess p;
    p.variant = WeightVariant::product_iid;
    p.y = std::move(y_model);
    return p;
}

WeightProcess WeightProcess::independent_iid(ModelPtr y_model) {
    if (!(y_model->support().lo >= 0.0))
        throw invalid_parameter("weight process: Y must have positive support");
    WeightProcess p;
    p.variant = WeightVariant::independent_iid;
    p.y = std::move(y_model);
    return p;
}

std::string WeightProcess::variant_name() const {
    switch (variant) {
        case WeightVariant::fixed_vector: return "fixed";
        case WeightVariant::product_iid: return "product_iid";
        case WeightVariant::independent_iid: return "independent_iid";
    }
    return "?";
}

void sample_weights(const WeightProcess& proc, std::size_t n, RandomStream& rng,
                    std::span<double> out) {
    if (n == 0 || out.size() < n)
        throw invalid_parameter("sample_weights: need n >= 1 and room for n");
    switch (proc.variant) {
        case WeightVariant::fixed_vector: {
            if (proc.fixed.size() < n)
                throw invalid_parameter(
                    "sample_weights: fixed vector shorter than n");
            std::copy_n(proc.fixed.begin(), n, out.begin());
            return;
        }
        case WeightVariant::product_iid: {
            double w = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                w *= proc.y->sample(rng);
                out[k] = w;
            }
            return;
        }
        case WeightVariant::independent_iid: {
            for (std::size_t k = 0; k < n; ++k) out[k] = proc.y->sample(rng);
            return;
        }
    }
}

namespace {

// integration by parts in log space; handles caps so deep in the tail that
// the quantile transform would round G(cap) to 1
double truncated_moment_by_parts(const TailModel& g, double alpha, double cap) {
    const double s_lo = std::max(g.support().lo, 0.0);
    const double boundary =
        (s_lo > 0.0 ? std::pow(s_lo, alpha) * g.tail(s_lo) : 0.0) -
        std::pow(cap, alpha) * g.tail(cap);
    const double t_hi = std::log(cap);
    const double t_lo = s_lo > 0.0
                            ? std::log(s_lo)
                            : std::log(std::min(1.0, cap)) - 40.0 / alpha;
    const auto integrand = [&](double t) {
        const double y = std::exp(t);
        return std::pow(y, alpha) * g.tail(y);  // y^(alpha-1) tail(y) dy
    };
    const auto q = integrate_adaptive_rel(integrand, t_lo, t_hi, 1e-10, 48);
    const double value = boundary + alpha * q.value;
    const double rel = value != 0.0 ? alpha * q.abs_error / std::abs(value) : 0.0;
    if (rel > 1e-6)
        throw numeric_error("truncated_moment: quadrature did not converge",
                            rel);
    return value;
}

}  // namespace

double truncated_moment(const TailModel& g, double alpha, double cap) {
    if (!(alpha >= 0.0))
        throw invalid_parameter("truncated_moment: requires alpha >= 0");
    if (cap <= g.support().lo) return 0.0;
    if (auto closed = g.truncated_power_moment(alpha, cap)) return *closed;
    if (alpha == 0.0) return g.cdf(cap);

    // quantile transform: I = int_0^{G(cap)} Q(u)^alpha du; the truncation
    // keeps the integrand bounded by cap^alpha
    const double u_cap = 1.0 - g.tail(cap);
    if (u_cap <= 0.0) return 0.0;
    if (u_cap >= 1.0) return truncated_moment_by_parts(g, alpha, cap);
    const auto f = [&](double u) {
        const double q = g.quantile(u);
        return q > 0.0 ? std::pow(q, alpha) : 0.0;
    };
    auto res = integrate_adaptive_rel(f, 1e-14, u_cap, 1e-8, 48);
    const double rel =
        res.value != 0.0 ? res.abs_error / std::abs(res.value) : 0.0;
    if (rel > 1e-6) return truncated_moment_by_parts(g, alpha, cap);
    return res.value;
}

double truncated_moment_interval(const TailModel& g, double alpha, double a,
                                 double b) {
    if (!(b > a)) return 0.0;
    // int_(a,b] y^alpha dG = a^alpha G(a) - b^alpha G(b)
    //                        + alpha int_a^b y^(alpha-1) G(y) dy
    const double boundary =
        std::pow(a, alpha) * g.tail(a) - std::pow(b, alpha) * g.tail(b);
    const auto integrand = [&](double y) {
        return std::pow(y, alpha - 1.0) * g.tail(y);
    };
    const auto q = integrate_adaptive_rel(integrand, a, b, 1e-10);
    return boundary + alpha * q.value;
}

namespace {

// staircase g(x) = 1/m on [x_m, x_{m+1}), thresholds at the first grid point
// where G(f2(x/m)) < F(x)/m
std::vector<double> build_staircase_levels(const TailModel& f,
                                           const TailModel& g,
                                           const WeightWindow& window,
                                           double x_lo, double x_hi) {
    std::vector<double> levels;
    const int pts = 600;
    double start = std::max(x_lo, 2.0);
    for (int m = 1; m <= 64; ++m) {
        bool found = false;
        for (int i = 0; i < pts; ++i) {
            const double x =
                start * std::pow(x_hi * 16.0 / start,
                                 static_cast<double>(i) / (pts - 1));
            if (g.tail(window.f2(x / m)) < f.tail(x) / m) {
                levels.push_back(x);
                start = x;
                found = true;
                break;
            }
        }
        if (!found) break;
    }
    return levels;
}

double staircase_value(const std::vector<double>& levels, double x) {
    if (levels.empty() || x < levels.front()) return 1.0;
    const auto it = std::upper_bound(levels.begin(), levels.end(), x);
    return 1.0 / static_cast<double>(it - levels.begin());
}

}  // namespace

ConditionCheckReport weight_condition_checks(const TailModel& f,
                                             const TailModel& g,
                                             const WeightWindow& window,
                                             double p,
                                             std::span<const double> x_grid,
                                             std::size_t n) {
    if (x_grid.empty())
        throw invalid_parameter("weight_condition_checks: empty grid");
    const auto r_index = g.rv_index();
    if (!r_index)
        throw unsupported_model(
            "weight_condition_checks: weight model has no tail index: " +
            g.id());
    const double r = *r_index;

    const auto levels = build_staircase_levels(
        f, g, window, x_grid.front(), x_grid.back());

    ConditionCheckReport rep;
    for (double x : x_grid) {
        ConditionCheckRow row;
        row.x = x;
        const double f2x = window.f2(x);
        row.tail_ratio = g.tail(f2x) / f.tail(x);
        row.left_tail_value = std::pow(f2x, p) * g.cdf(window.f1(x));

        const double ig = truncated_moment(g, r, f2x);
        const double gx = staircase_value(levels, x);
        row.product_bound = std::pow(ig, static_cast<double>(n - 1)) *
                                g.tail(f2x) +
                            g.tail(window.f2(x * gx));

        double sup = 0.0;
        const int ypts = 200;
        for (int k = 0; k < ypts; ++k) {
            const double y =
                std::pow(f2x, static_cast<double>(k) / (ypts - 1));
            const double denom = std::pow(y, r) * g.tail(x);
            if (denom > 0.0) sup = std::max(sup, g.tail(x / y) / denom);
        }
        row.ratio_sup = sup;
        rep.ratio_sup_max = std::max(rep.ratio_sup_max, sup);
        rep.rows.push_back(row);
    }

    const auto decays = [&](auto field) {
        const double first = rep.rows.front().*field;
        const double last = rep.rows.back().*field;
        for (std::size_t i = 1; i < rep.rows.size(); ++i)
            if (rep.rows[i].*field > rep.rows[i - 1].*field * (1.0 + 1e-9))
                return false;
        return last < first || first == 0.0;
    };
    rep.tail_ratio_decays = decays(&ConditionCheckRow::tail_ratio);
    rep.left_tail_decays = decays(&ConditionCheckRow::left_tail_value);
    rep.product_bound_decays = decays(&ConditionCheckRow::product_bound);
    return rep;
}

LongTailCheckReport i_long_tail_check(const TruncatedMoment& moment, double t,
                                      std::span<const double> x_grid) {
    if (!(t > 0.0)) throw invalid_parameter("i_long_tail_check: requires t > 0");
    if (x_grid.size() < 2)
        throw invalid_parameter("i_long_tail_check: grid too small");

    LongTailCheckReport rep;
    for (double x : x_grid) {
        const double ix = moment(x);
        rep.rows.emplace_back(x, ix > 0.0 ? moment(x + t) / ix : 1.0);
    }

    // liminf proxies over the upper half of the grid
    rep.a_g = 1e300;
    rep.b_f2 = 1e300;
    for (std::size_t i = x_grid.size() / 2; i < x_grid.size(); ++i) {
        const double x = x_grid[i];
        const double gt = moment.g->tail(moment.f2(x));
        if (gt > 0.0)
            rep.a_g = std::min(rep.a_g, moment.g->tail(moment.f2(0.5 * x)) / gt);
        rep.b_f2 = std::min(rep.b_f2, moment.f2(0.5 * x) / moment.f2(x));
    }

    // increment-rate ratio scan: around each tail step of the weight model
    // (mapped through the inverse of f2), compare the I-increment just before
    // the step with the increment just after it
    const double x_lo = x_grid.front(), x_hi = x_grid.back();
    const auto f2_inverse = [&](double target) {
        double lo = x_lo / 16.0, hi = x_hi * 16.0;
        if (moment.f2(lo) > target || moment.f2(hi) < target) return -1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (moment.f2(mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double w = t / 8.0;
    const auto rate_ratio = [&](double x) {
        const double num = truncated_moment_interval(
            *moment.g, moment.alpha, moment.f2(x - t), moment.f2(x - t + w));
        const double den = truncated_moment_interval(
            *moment.g, moment.alpha, moment.f2(x), moment.f2(x + w));
        if (den <= 0.0) return num <= 0.0 ? 1.0 : 1e300;
        return num / den;
    };
    double detected = 1.0;
    std::vector<double> focus;
    for (double b : moment.g->tail_breakpoints(moment.f2(x_hi))) {
        const double u = f2_inverse(b);
        if (u > 0.0) focus.push_back(u);
    }
    if (focus.empty()) {
        const int pts = 400;
        for (int i = 0; i < pts; ++i)
            focus.push_back(x_lo *
                            std::pow(x_hi / x_lo,
                                     static_cast<double>(i) / (pts - 1)));
    }
    for (double u : focus) {
        for (double d = -2.0 * t; d <= 2.0 * t; d += t / 8.0) {
            const double x = u + d;
            if (x - t <= x_lo / 16.0) continue;
            detected = std::max(detected, rate_ratio(x));
        }
    }
    rep.detected_step_ratio = detected;

    const double final_ratio = rep.rows.back().second;
    bool monotone_to_one = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        if (std::abs(rep.rows[i].second - 1.0) >
            std::abs(rep.rows[i - 1].second - 1.0) + 1e-9)
            monotone_to_one = false;
    }
    rep.in_l0 = monotone_to_one && std::abs(final_ratio - 1.0) < 1e-3 &&
                detected < 1.05;
    return rep;
}

}  // namespace heavytail

#include "heavytail/insensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"

namespace heavytail {

namespace {

double power_h(double x, double gamma) {
    return x <= 1.0 ? 1.0 : std::pow(x, gamma);
}

}  // namespace

double uniform_ratio_deviation(const TailModel& model,
                               const std::function<double(double)>& h, double x,
                               int y_points) {
    const double hx = h(x);
    const double fx = model.tail(x);
    double worst = 0.0;
    for (int k = 0; k < y_points; ++k) {
        const double y = -hx + 2.0 * hx * k / (y_points - 1);
        worst = std::max(worst, std::abs(model.tail(x + y) / fx - 1.0));
    }
    return worst;
}

InsensitivityFn insensitivity_function(const TailModel& model, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw invalid_parameter(
            "insensitivity_function: gamma must lie in (0,1), got " +
            format_double(gamma));
    const auto alpha = model.rv_index();
    if (!alpha)
        throw unsupported_model(
            "insensitivity_function: model is not regularly varying: " +
            model.id());
    // two-sided marginals additionally need gamma > alpha/beta so that the
    // left tail F(-x^gamma) decays faster than tail(x)
    const Interval s = model.support();
    if (!std::isfinite(s.lo)) {
        const double left = model.cdf(-2.0);
        if (left > 0.0) {
            // recover beta from the left tail decade ratio
            const double beta =
                std::log(model.cdf(-2.0) / model.cdf(-20.0)) / std::log(10.0);
            if (!(gamma > *alpha / beta))
                throw invalid_parameter(
                    "insensitivity_function: requires gamma > alpha/beta = " +
                    format_double(*alpha / beta));
        }
    }

    const auto h = [gamma](double x) { return power_h(x, gamma); };
    // membership: the uniform-ratio deviation must decrease along the grid
    double prev = 1e300;
    for (int k = 2; k <= 8; ++k) {
        const double x = std::pow(10.0, k);
        const double dev = uniform_ratio_deviation(model, h, x);
        if (!(dev < prev + 1e-9))
            throw unsupported_model(
                "insensitivity_function: uniform ratio check failed at x=1e" +
                std::to_string(k) + " for " + model.id());
        prev = dev;
    }
    return InsensitivityFn{h, InsensitivityFn::Mode::slope_monotone};
}

InsensitivityFn widen_insensitivity(const InsensitivityFn& hfn,
                                    const TailModel& model) {
    if (hfn.mode != InsensitivityFn::Mode::slope_monotone)
        throw invalid_parameter(
            "widen_insensitivity: input must have non-increasing h(x)/x");
    const auto& h = hfn.h;
    constexpr int kMaxLevels = 64;

    // ratio_n(x) = tail(x - (n+1) h(x)) / tail(x); level threshold x_n is the
    // first point from which the ratio stays below 1 + 1/(n+1)
    const auto ratio = [&](int n, double x) {
        const double arg = x - (n + 1) * h(x);
        return model.tail(arg) / model.tail(x);
    };

    auto levels = std::make_shared<std::vector<double>>();
    double prev_slope = 1e300;
    double lo_bound = 2.0;
    for (int n = 1; n <= kMaxLevels; ++n) {
        const double bound = 1.0 + 1.0 / (n + 1);
        double x = std::max(lo_bound, 2.0);
        bool found = false;
        while (x < 1e200) {
            if (ratio(n, x) < bound && ratio(n, 2.0 * x) < bound &&
                ratio(n, 4.0 * x) < bound && ratio(n, 8.0 * x) < bound) {
                found = true;
                break;
            }
            x *= 2.0;
        }
        if (!found)
            throw unsupported_model(
                "widen_insensitivity: drift ratio never settles at level " +
                std::to_string(n) + "; model is not long-tailed: " + model.id());
        // push x_n out until n h(x_n)/x_n decays geometrically, which forces
        // n h(x_n)/x_n -> 0 without slowing the level growth to a crawl
        while (n * h(x) / x > 0.9 * prev_slope && x < 1e200) x *= 2.0;
        prev_slope = n * h(x) / x;
        levels->push_back(x);
        lo_bound = 2.0 * x * (1.0 + 1e-12);
    }

    const auto f = [levels](double x) {
        const auto& xs = *levels;
        if (x < xs.front()) return 1.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t n = static_cast<std::size_t>(it - xs.begin());
        if (n >= xs.size()) return static_cast<double>(xs.size());
        return static_cast<double>(n) + (x - xs[n - 1]) / (xs[n] - xs[n - 1]);
    };
    const auto h1 = [f, h](double x) { return f(x) * h(x); };
    return InsensitivityFn{h1, InsensitivityFn::Mode::slope_vanishing};
}

double WeightWindow::f1(double x) const {
    return x <= 1.0 ? 1.0 : std::pow(x, -gamma1);
}

double WeightWindow::f2(double x) const {
    return x <= 1.0 ? 1.0 : std::pow(x, gamma2);
}

double WeightWindow::h(double x) const { return power_h(x, gamma); }

WeightWindow weight_window(const TailModel& model, double p, double gamma,
                           double gamma1, double gamma2) {
    const auto alpha_opt = model.rv_index();
    if (!alpha_opt)
        throw unsupported_model("weight_window: model is not regularly varying");
    const double alpha = *alpha_opt;
    const auto mat = model.matuszewska();
    const double j_plus = mat ? mat->second : alpha;
    if (!(p > j_plus))
        throw invalid_parameter("weight_window: requires p > J+ = " +
                                format_double(j_plus));

    // recover the left-tail exponent; one-sided models have beta = +inf
    double beta = std::numeric_limits<double>::infinity();
    if (!std::isfinite(model.support().lo) && model.cdf(-2.0) > 0.0)
        beta = std::log(model.cdf(-2.0) / model.cdf(-20.0)) / std::log(10.0);

    if (!(gamma > alpha / beta))
        throw invalid_parameter(
            "weight_window: violated alpha/beta < gamma (alpha/beta = " +
            format_double(alpha / beta) + ")");
    if (!(gamma < 1.0))
        throw invalid_parameter("weight_window: violated gamma < 1");
    const double g1_cap = std::min(1.0 - gamma, (beta * gamma - alpha) / p);
    if (!(gamma1 > 0.0 && gamma1 < g1_cap))
        throw invalid_parameter(
            "weight_window: violated 0 < gamma1 < min(1-gamma, "
            "(beta*gamma-alpha)/p) = " +
            format_double(g1_cap));
    if (!(gamma2 > 0.0 && gamma2 < gamma))
        throw invalid_parameter("weight_window: violated 0 < gamma2 < gamma");

    WeightWindow w;
    w.gamma = gamma;
    w.gamma1 = gamma1;
    w.gamma2 = gamma2;
    w.p = p;
    w.left_tail_exponent = gamma1 * p - beta * gamma + alpha;
    return w;
}

ClassDiagnostics class_diagnostics(const TailModel& model, double p,
                                   double grid_lo, double grid_hi) {
    ClassDiagnostics rep;
    rep.p = p;

    const int points = 25;
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = grid_lo * std::pow(grid_hi / grid_lo,
                                     static_cast<double>(i) / (points - 1));

    for (double x : grid) {
        const double fx = model.tail(x);
        rep.long_tail_ratios.emplace_back(x, model.tail(x + 1.0) / fx);
        rep.dominated_ratios.emplace_back(x, model.tail(0.5 * x) > 0.0
                                                 ? fx > 0.0
                                                       ? model.tail(0.5 * x) / fx
                                                       : 1e300
                                                 : 0.0);
    }

    // unit-shift scan for the limsup of tail(x)/tail(x+1): only the upper
    // log-half of the points with a representable tail counts (jumps that die
    // out at finite x do not break membership), refined around the model's
    // tail breakpoints
    double valid_hi = grid_lo;
    for (double x : grid)
        if (model.tail(x + 1.0) > 1e-290) valid_hi = x;
    const double limsup_from = std::sqrt(grid_lo * valid_hi);
    double step_sup = 1.0;
    double deviation = 0.0;  // limsup of |tail(x)/tail(x+1) - 1|
    const auto probe = [&](double x) {
        const double denom = model.tail(x + 1.0);
        if (denom <= 1e-290) return;
        const double r = model.tail(x) / denom;
        step_sup = std::max(step_sup, r);
        deviation = std::max(deviation, std::abs(r - 1.0));
    };
    for (double x : grid)
        if (x >= limsup_from) probe(x);
    for (double b : model.tail_breakpoints(valid_hi)) {
        if (b < limsup_from) continue;
        for (double d : {0.25, 0.5, 0.75}) probe(b - d);
    }
    rep.step_ratio_limsup = step_sup;
    rep.in_l = deviation < 0.05;

    double dom_max = 0.0;
    for (auto& [x, r] : rep.dominated_ratios) dom_max = std::max(dom_max, r);
    rep.in_d = std::isfinite(dom_max) && dom_max < 1e12;

    // least-squares regular-variation index on the log-log grid
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double x : grid) {
        const double lx = std::log(x), ly = std::log(model.tail(x));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = points;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.rv_index_fit = -slope;
    const double icept = (sy - slope * sx) / n;
    for (double x : grid) {
        const double resid =
            std::abs(std::log(model.tail(x)) - (icept + slope * std::log(x)));
        rep.rv_index_residual = std::max(rep.rv_index_residual, resid);
    }

    // Potter-type constants: C1 = max over grid pairs x >= y of
    // [tail(y)/tail(x)] (y/x)^p, with C2 the grid start; the bound is judged
    // stable when restricting to the lower half of the grid does not shrink
    // the constant by more than half.
    rep.potter_c2 = grid_lo;
    double c1_full = 0.0, c1_half = 0.0;
    for (int i = 0; i < points; ++i) {
        for (int j = i; j < points; ++j) {
            const double y = grid[i], x = grid[j];
            const double v =
                (model.tail(y) / model.tail(x)) * std::pow(y / x, p);
            c1_full = std::max(c1_full, v);
            if (x <= std::sqrt(grid_lo * grid_hi))
                c1_half = std::max(c1_half, v);
        }
    }
    rep.potter_c1 = c1_full;
    rep.potter_ok = std::isfinite(c1_full) && c1_full < 1e12 &&
                    c1_full <= 1.5 * std::max(c1_half, 1e-300);
    return rep;
}

}  // namespace heavytail

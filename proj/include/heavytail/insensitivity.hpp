#ifndef HEAVYTAIL_INSENSITIVITY_HPP_
#define HEAVYTAIL_INSENSITIVITY_HPP_

#include <functional>
#include <optional>
#include <vector>

#include "heavytail/tail_model.hpp"

namespace heavytail {

// Drift-insensitivity function h: h(x) increases to infinity while F(x+y)
// stays uniformly close to F(x) over |y| <= h(x).
struct InsensitivityFn {
    enum class Mode {
        slope_monotone,   // h(x)/x non-increasing
        slope_vanishing,  // h(x)/x -> 0
    };
    std::function<double(double)> h;
    Mode mode;
};

// Power insensitivity function h(x) = x^gamma (1 for x <= 1), verified
// against the model on the grid {1e2,...,1e8} by the uniform-ratio check.
// For two-sided Pareto marginals gamma must satisfy alpha/beta < gamma < 1.
InsensitivityFn insensitivity_function(const TailModel& model, double gamma);

// Staircase widening: returns h1 = f*h with f piecewise linear between
// integer levels, chosen so the n-fold drift ratio enters (1-1/n, 1+1/n)
// at each level threshold; h1/h grows without bound while h1(x)/x -> 0.
InsensitivityFn widen_insensitivity(const InsensitivityFn& h,
                                    const TailModel& model);

// Shrinking/growing admissible-weight window f1(x) = x^-gamma1,
// f2(x) = x^gamma2 (both 1 on [0,1]).
struct WeightWindow {
    double gamma, gamma1, gamma2, p;
    // exponent of f1^-p(x) F(-h(x)) / tail(x); negative when the light-left-
    // tail decay condition holds
    double left_tail_exponent;

    double f1(double x) const;
    double f2(double x) const;
    double h(double x) const;
};

// Validates the window constraints for a two-sided Pareto style marginal:
// p > J+; alpha/beta < gamma < 1; 0 < gamma1 < min(1-gamma, (beta gamma -
// alpha)/p); 0 < gamma2 < gamma.  Throws invalid_parameter naming the
// violated inequality.
WeightWindow weight_window(const TailModel& model, double p, double gamma,
                           double gamma1, double gamma2);

// Tail-class diagnostics report.
struct ClassDiagnostics {
    std::vector<std::pair<double, double>> long_tail_ratios;  // (x, F(x+1)/F(x))
    std::vector<std::pair<double, double>> dominated_ratios;  // (x, F(x/2)/F(x))
    double rv_index_fit = 0.0;       // least-squares slope of -log tail vs log x
    double rv_index_residual = 0.0;  // max abs deviation of the fit
    bool in_l = false;
    bool in_d = false;
    double step_ratio_limsup = 1.0;  // largest unit-shift tail jump observed
    // Potter-type bound: tail(y)/tail(x) <= C1 (x/y)^p for grid x >= y >= C2
    double p = 0.0;
    double potter_c1 = 0.0;
    double potter_c2 = 0.0;
    bool potter_ok = false;
};

ClassDiagnostics class_diagnostics(const TailModel& model, double p,
                                   double grid_lo = 1e2, double grid_hi = 1e8);

// Largest value of max_{|y|<=h(x)} |tail(x+y)/tail(x) - 1| over a y-grid.
double uniform_ratio_deviation(const TailModel& model,
                               const std::function<double(double)>& h, double x,
                               int y_points = 41);

}  // namespace heavytail

#endif  // HEAVYTAIL_INSENSITIVITY_HPP_

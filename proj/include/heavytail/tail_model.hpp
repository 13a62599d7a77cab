#ifndef HEAVYTAIL_TAIL_MODEL_HPP_
#define HEAVYTAIL_TAIL_MODEL_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heavytail/rng.hpp"

namespace heavytail {

// Support interval on the extended real line.
struct Interval {
    double lo;
    double hi;
};

// Tail-class membership where analytically known.  nullopt = not derived.
struct ClassFlags {
    std::optional<bool> long_tailed;          // F(x+y) ~ F(x) for fixed y
    std::optional<bool> dominated_variation;  // F(xy)/F(x) bounded, y in (0,1)
    std::optional<bool> regularly_varying;
};

// Analytic descriptor of a one-dimensional distribution: exact tail function,
// generalized inverse quantile, inversion sampler, and class metadata.
//
// Values are immutable after construction and safe for concurrent reads.
// Samplers take a caller-owned random stream; the model holds no state.
class TailModel {
public:
    virtual ~TailModel() = default;

    // P(X > x); total on the reals, right-continuous CDF convention at
    // piecewise breakpoints (each branch owns its half-open region [lo, hi)).
    virtual double tail(double x) const = 0;

    // Generalized left inverse inf{x : F(x) >= u}; flat CDF regions resolve
    // to the left endpoint.  Closed form where available, else bracketed
    // bisection to relative tolerance 1e-12 (at most 200 iterations).
    // Throws invalid_parameter unless 0 < u < 1.
    virtual double quantile(double u) const;

    virtual Interval support() const = 0;

    // Canonical zoo identifier, e.g. "two_sided_pareto(alpha=1,beta=2)".
    virtual std::string id() const = 0;

    // Regular-variation index alpha where known.
    virtual std::optional<double> rv_index() const { return std::nullopt; }

    // Matuszewska indices (J-, J+) where known.
    virtual std::optional<std::pair<double, double>> matuszewska() const;

    // Moment index I_V = sup{a : E|X|^a 1{X>0} < inf} where known.
    virtual std::optional<double> moment_index() const;

    virtual ClassFlags class_flags() const { return {}; }

    // Whether E (X^+)^order is finite, where analytically known.
    virtual std::optional<bool> moment_finite(double /*order*/) const {
        return std::nullopt;
    }

    // Closed-form truncated moment E[X^order 1{0 < X <= cap}] where the
    // model has one; quadrature callers fall back otherwise.
    virtual std::optional<double> truncated_power_moment(double /*order*/,
                                                         double /*cap*/) const {
        return std::nullopt;
    }

    // u-values where the quantile function jumps or kinks; integration in
    // quantile space splits panels here.
    virtual std::vector<double> quantile_breakpoints() const { return {}; }

    // x-values (below x_max) where the tail has steps or kinks; diagnostic
    // scans refine around these.
    virtual std::vector<double> tail_breakpoints(double /*x_max*/) const {
        return {};
    }

    // P(X <= x); overridden where the left tail has a closed form that
    // 1 - tail(x) would lose to cancellation.
    virtual double cdf(double x) const { return 1.0 - tail(x); }

    // Inversion sampler; distributionally exact given the quantile.
    double sample(RandomStream& rng) const { return quantile(rng.next_uniform()); }
};

using ModelPtr = std::shared_ptr<const TailModel>;

// ---- model zoo -----------------------------------------------------------

// Two-sided Pareto: tail 1/2(2-|x|^-beta) on x<-1, 1/2 on [-1,1), 1/2 x^-alpha
// on x>=1.  Requires 0 < alpha < beta.
ModelPtr two_sided_pareto(double alpha, double beta);

// Symmetric Pareto with equal exponents beta on both sides.
ModelPtr symmetric_pareto(double beta);

// One-sided Pareto on (1,inf): tail x^-alpha.
ModelPtr pareto(double alpha);

// Positive weight with tail (x/c)^-theta on (c,inf).
ModelPtr pareto_weight(double theta, double c = 1.0);

// Tail x^-alpha ln^-kappa(e-1+x) on (1,inf).
ModelPtr log_perturbed_pareto(double alpha, double kappa);

// Tail x^-rho ln^-2(e-1+x) on [1,inf); rho > 1, so the rho-th moment is
// finite thanks to the squared log factor.
ModelPtr inverse_power_log(double rho);

// Staircase perturbation of the tail x^-(alpha+1) on (1,inf): flat at the
// value of breakpoint x_i on [x_i, y_i) with y_i/x_i = a^(1/(alpha+1)), so
// each step has tail ratio exactly a; x_{i+1} = 2 y_i.  Not long-tailed.
ModelPtr oscillating_tail(double alpha, double ratio_a, double x1 = 8.0);

// Normalized integrated tail of the oscillating staircase; continuous, with
// tail comparable to x^-alpha and E X^alpha = inf.
ModelPtr integrated_oscillating(double alpha, double ratio_a, double x1 = 8.0);

// Positive weight with Pareto right tail x^-theta/2 on [1,inf) and a light
// left tail near 0 driven by inverse_power_log(rho) applied to 1/x.
ModelPtr composite_weight(double theta, double rho);

ModelPtr exponential(double rate);

ModelPtr point_mass(double value);

// Distribution of w * X for a fixed w > 0.
ModelPtr scaled(ModelPtr base, double w);

// Upper-tail power moment E (X^+)^order computed from the closed form when
// available, otherwise by quantile-space quadrature.  Throws invalid_parameter
// when the moment is known to diverge.
double power_moment(const TailModel& model, double order);

}  // namespace heavytail

#endif  // HEAVYTAIL_TAIL_MODEL_HPP_

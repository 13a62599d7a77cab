#ifndef HEAVYTAIL_ASYMPTOTICS_HPP_
#define HEAVYTAIL_ASYMPTOTICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heavytail/tail_model.hpp"
#include "heavytail/weights.hpp"

namespace heavytail {

// Moment regime of the weight distribution relative to the increment tail
// index alpha:
//   one:   E Y^(alpha+delta) < inf for some delta > 0
//   two:   E Y^alpha < inf but E Y^(alpha+delta) = inf for every delta > 0
//   three: E Y^alpha = inf
enum class TailCase { one, two, three };

struct CaseLabel {
    TailCase label = TailCase::one;
    double witness_delta = 0.0;  // delta that certified case one
    bool heuristic = false;      // classified by partial-integral growth
    bool low_confidence = false;
    std::vector<std::string> evidence;
};

CaseLabel case_classifier(const TailModel& g, double alpha,
                          std::span<const double> probes = {});

// Sum of scaled tails: sum_i tail(x / w_i); the deterministic-weight
// right-hand side.
double fixed_weight_rhs(const TailModel& f, std::span<const double> w,
                        double x);

struct RwOptions {
    double target_rel_tol = 1e-4;
    int nested_levels_max = 4;    // product weights use nested quadrature up
                                  // to this index, stratified beyond
    std::size_t strata = 1000000;
    int nodes_per_decade = 64;
};

struct TailValue {
    double value = 0.0;
    double achieved_tol = 0.0;
};

// H_i(x) = P(W_i X > x).  Product weights are integrated by i-1 nested
// quantile-space convolutions in log scale for i <= nested_levels_max and by
// deterministic stratified integration over the product quantile cube beyond.
// Throws numeric_error when the achieved tolerance misses the target.
TailValue random_weight_tail(const TailModel& f, const WeightProcess& proc,
                             std::size_t i, double x,
                             const RwOptions& opts = {});

// Extended Breiman right-hand side: (E Y^alpha)^n tail(x) in cases 1-2,
// I(x)^n tail(x) in case 3.  n = 0 returns tail(x).
double breiman_tail(const TailModel& f, const TailModel& g,
                    const CaseLabel& label, const TruncatedMoment& moment,
                    std::size_t n, double x);

enum class RuinApproxMode { generic, rv_cases12, rv_case3 };

struct RuinApprox {
    double value = 0.0;
    std::optional<double> leading;  // case-3 leading term I^n(x) tail(x)
    double achieved_tol = 0.0;
};

// Finite-horizon ruin right-hand sides: generic sum of H_i(x), the
// regular-variation moment series, or the case-3 truncated-moment series.
RuinApprox ruin_approx_finite(const TailModel& f, const ModelPtr& g_y,
                              const TruncatedMoment* moment,
                              const CaseLabel& label, std::size_t n, double x,
                              RuinApproxMode mode, const RwOptions& opts = {});

struct InfiniteRuin {
    double value = 0.0;          // series factor * tail(x)
    double closed_form = 0.0;    // m/(1-m) * tail(x)
    double series_factor = 0.0;  // sum_{i=1..terms} m^i
    double remainder_bound = 0.0;
    int terms = 0;
};

// Infinite-horizon factor m/(1-m), m = E Y^alpha, evaluated as a truncated
// series with an explicit geometric remainder bound.  Requires m < 1.
InfiniteRuin ruin_approx_infinite(const TailModel& f, const TailModel& g_y,
                                  double x);

// Positive integer-valued stopping time; the pmf is truncated at `horizon`
// and renormalized when the cut mass exceeds 0 (recorded in `renormalized`).
struct StoppingTime {
    std::vector<double> pmf;  // pmf[k] = P(tau = k+1)
    std::size_t horizon = 0;
    bool renormalized = false;

    static StoppingTime deterministic(std::size_t n);
    // P(tau >= i) = q^(i-1); horizon auto-chosen so the cut mass is < 1e-12
    static StoppingTime geometric(double q);

    double survival(std::size_t i) const;  // P(tau >= i)
    double moment(double order) const;
    std::size_t sample(RandomStream& rng) const;
};

struct StoppedSumApprox {
    double value = 0.0;
    double remainder_bound = 0.0;
    double tau_moment_p_plus_1 = 0.0;
};

// sum_{i<=n_max} P(tau >= i) H_i(x) with H_i from the case-based Breiman
// form, plus a Potter-style remainder bound C1 (m + eps)^i tail(x) for the
// cut terms.  Throws numeric_error when the remainder exceeds 1% of the sum.
StoppedSumApprox stopped_sum_approx(const TailModel& f, const TailModel& g_y,
                                    const TruncatedMoment* moment,
                                    const CaseLabel& label,
                                    const StoppingTime& tau, double x, double p,
                                    std::size_t n_max);

}  // namespace heavytail

#endif  // HEAVYTAIL_ASYMPTOTICS_HPP_

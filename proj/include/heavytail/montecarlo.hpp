#ifndef HEAVYTAIL_MONTECARLO_HPP_
#define HEAVYTAIL_MONTECARLO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heavytail/asymptotics.hpp"
#include "heavytail/dependence.hpp"
#include "heavytail/insensitivity.hpp"
#include "heavytail/tail_model.hpp"
#include "heavytail/weights.hpp"

namespace heavytail {

// Monte-Carlo estimate with 99% normal-approximation confidence interval.
// Reproducible byte-for-byte given (seed, block plan): replication r draws
// from sub-streams derived as (seed, r, role), blocks have a fixed size, and
// the reduction folds block sums in block order, so the thread count cannot
// change any reported number.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::uint32_t batches = 0;
    double hits = 0.0;   // mean * n; integer hit count for indicator values
    bool rare = false;   // fewer than 50 (pseudo-)hits
    bool zero_hits = false;  // rule-of-three upper bound in ci_hi
};

struct McOptions {
    int threads = 1;
};

// Crude frequency estimate of P(sum_i W_i X_i > x).
McEstimate tail_prob_crude(const DependenceSpec& dep, const WeightProcess& proc,
                           std::size_t n, double x, std::uint64_t n_samples,
                           std::uint64_t seed, const McOptions& opts = {});

// Conditional estimator integrating out the last increment:
// mean of tail((x - sum_{i<n} W_i X_i)/W_n); unbiased for P(S > x) and
// exploits the single-big-jump shape of the event.  Requires independent
// increments with X_n independent of the rest.
McEstimate tail_prob_conditional(const DependenceSpec& dep,
                                 const WeightProcess& proc, std::size_t n,
                                 double x, std::uint64_t n_samples,
                                 std::uint64_t seed, const McOptions& opts = {});

// Finite-horizon ruin probability P(max_{1<=k<=n} sum_{i<=k} W_i X_i > x)
// with W_i the running products of draws from y_model.  The conditional
// variant integrates out each increment at its first-passage step and needs
// independent increments.
McEstimate ruin_prob_mc(const DependenceSpec& dep, const ModelPtr& y_model,
                        std::size_t n, double x, std::uint64_t n_samples,
                        std::uint64_t seed, bool conditional = false,
                        const McOptions& opts = {});

// P(sum_{i<=tau} W_i X_i > x) with tau drawn independently per replication.
McEstimate stopped_tail_mc(const DependenceSpec& dep, const WeightProcess& proc,
                           const StoppingTime& tau, double x,
                           std::uint64_t n_samples, std::uint64_t seed,
                           const McOptions& opts = {});

struct OracleResult {
    double value = 0.0;
    double error_bound = 0.0;
};

// P(A + B > x) for independent A, B by trapezoidal integration on the
// quantile grid of each law (both sweep orders averaged, so the result is
// exactly symmetric in A and B), with closed-form bracket terms for the
// quantile mass beyond u = 1e-15.  The error bound tracks the trapezoid
// refinement differences plus the bracket widths; a bound above 1e-3 of the
// result raises numeric_error.
OracleResult convolution_oracle(const TailModel& a, const TailModel& b,
                                double x, std::size_t grid_n = 1 << 16);

// ---- ratio tables ----------------------------------------------------------

enum class LhsEstimator { crude, conditional, oracle };

struct RatioConfig {
    DependenceSpec dep;
    std::optional<WeightProcess> weights;  // random or fixed weights
    std::optional<WeightWindow> window;    // per-x window-endpoint weights
    std::vector<double> x_grid;
    std::vector<std::size_t> n_list;
    LhsEstimator estimator = LhsEstimator::oracle;
    std::uint64_t n_samples = 100000;
    std::uint64_t seed = 1;
    double tolerance = 0.1;
    int threads = 1;
    RwOptions rw;
};

struct RatioRow {
    double x = 0.0;
    std::size_t n = 0;
    double lhs = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::string flag;  // "", "rare", or "error"
};

struct RatioTable {
    std::vector<RatioRow> rows;  // ascending in (x, n)
    // per x, the largest n in n_list with |ratio - 1| <= tolerance
    // (0 when no n qualifies); rare/error rows are excluded
    std::vector<std::pair<double, std::size_t>> f3_scan;
};

RatioTable ratio_table(const RatioConfig& config);

}  // namespace heavytail

#endif  // HEAVYTAIL_MONTECARLO_HPP_

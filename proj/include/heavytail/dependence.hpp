#ifndef HEAVYTAIL_DEPENDENCE_HPP_
#define HEAVYTAIL_DEPENDENCE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "heavytail/rng.hpp"
#include "heavytail/tail_model.hpp"

namespace heavytail {

enum class DependenceVariant {
    independent,
    utai_sum,
    quantile_antithetic,
    nuod_pairwise,
};

// Recipe for sampling a dependent increment vector (X_1,...,X_n).
struct DependenceSpec {
    DependenceVariant variant = DependenceVariant::independent;
    ModelPtr f;  // marginal for independent / quantile_antithetic
    ModelPtr y;  // symmetric building block for utai_sum
    ModelPtr h;  // pair shock for nuod_pairwise
    ModelPtr g;  // idiosyncratic part for nuod_pairwise

    static DependenceSpec independent(ModelPtr marginal);
    // X1 = Y1+ + Y2- - Y1- 1{Y2>=0}, X2 = Y2 with Y1, Y2 iid from `building_block`
    static DependenceSpec utai_sum(ModelPtr building_block);
    // X1 = Q(1-U), X2 = Q(U) for a single uniform U
    static DependenceSpec quantile_antithetic(ModelPtr marginal);
    // X_{2k-1} = V_{2k-1} + U_k, X_{2k} = V_{2k} - U_k
    static DependenceSpec nuod_pairwise(ModelPtr pair_shock,
                                        ModelPtr idiosyncratic);

    std::string variant_name() const;
};

// Draws one increment vector; throws invalid_parameter when n does not fit
// the variant (quantile_antithetic and utai_sum need n=2, nuod_pairwise even n).
void sample_increments(const DependenceSpec& spec, std::size_t n,
                       RandomStream& rng, std::span<double> out);

// Row-major matrix of increment vectors.
struct SampleMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

SampleMatrix draw_samples(const DependenceSpec& spec, std::size_t n_cols,
                          std::size_t rows, std::uint64_t seed);

// Conditional exceedance frequencies
//   utai_hat = #{X_i >  x_i and X_j > x_j} / #{X_j > x_j}
//   tai_hat  = #{|X_i| > x_i and X_j > x_j} / #{X_j > x_j}
// with binomial standard errors.  Throws undefined_estimate when the
// conditioning event never occurs.
struct ExceedanceEstimate {
    double utai_hat = 0.0;
    double utai_se = 0.0;
    double tai_hat = 0.0;
    double tai_se = 0.0;
    std::size_t conditioning_hits = 0;
};

ExceedanceEstimate exceedance_estimators(const SampleMatrix& samples,
                                         std::size_t i, std::size_t j,
                                         double x_i, double x_j);

// Empirical upper quantile of one matrix column (used to anchor thresholds
// when the marginal has no closed form).
double empirical_quantile(const SampleMatrix& samples, std::size_t col,
                          double u);

}  // namespace heavytail

#endif  // HEAVYTAIL_DEPENDENCE_HPP_

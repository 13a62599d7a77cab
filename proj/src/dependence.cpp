#include "heavytail/dependence.hpp"

#include <algorithm>
#include <cmath>

#include "heavytail/errors.hpp"

namespace heavytail {

DependenceSpec DependenceSpec::independent(ModelPtr marginal) {
    DependenceSpec s;
    s.variant = DependenceVariant::independent;
    s.f = std::move(marginal);
    return s;
}

DependenceSpec DependenceSpec::utai_sum(ModelPtr building_block) {
    DependenceSpec s;
    s.variant = DependenceVariant::utai_sum;
    s.y = std::move(building_block);
    return s;
}

DependenceSpec DependenceSpec::quantile_antithetic(ModelPtr marginal) {
    DependenceSpec s;
    s.variant = DependenceVariant::quantile_antithetic;
    s.f = std::move(marginal);
    return s;
}

DependenceSpec DependenceSpec::nuod_pairwise(ModelPtr pair_shock,
                                             ModelPtr idiosyncratic) {
    DependenceSpec s;
    s.variant = DependenceVariant::nuod_pairwise;
    s.h = std::move(pair_shock);
    s.g = std::move(idiosyncratic);
    return s;
}

std::string DependenceSpec::variant_name() const {
    switch (variant) {
        case DependenceVariant::independent: return "independent";
        case DependenceVariant::utai_sum: return "utai_sum";
        case DependenceVariant::quantile_antithetic: return "quantile_antithetic";
        case DependenceVariant::nuod_pairwise: return "nuod_pairwise";
    }
    return "?";
}

void sample_increments(const DependenceSpec& spec, std::size_t n,
                       RandomStream& rng, std::span<double> out) {
    if (n == 0 || out.size() < n)
        throw invalid_parameter("sample_increments: need n >= 1 and room for n");
    switch (spec.variant) {
        case DependenceVariant::independent: {
            for (std::size_t k = 0; k < n; ++k) out[k] = spec.f->sample(rng);
            return;
        }
        case DependenceVariant::quantile_antithetic: {
            if (n != 2)
                throw invalid_parameter(
                    "sample_increments: quantile_antithetic requires n = 2");
            const double u = rng.next_uniform();
            out[0] = spec.f->quantile(1.0 - u);
            out[1] = spec.f->quantile(u);
            return;
        }
        case DependenceVariant::utai_sum: {
            if (n != 2)
                throw invalid_parameter(
                    "sample_increments: utai_sum requires n = 2");
            const double y1 = spec.y->sample(rng);
            const double y2 = spec.y->sample(rng);
            const double y1_pos = y1 >= 0.0 ? y1 : 0.0;
            const double y1_neg = y1 < 0.0 ? -y1 : 0.0;
            const double y2_neg = y2 < 0.0 ? -y2 : 0.0;
            out[0] = y1_pos + y2_neg - (y2 >= 0.0 ? y1_neg : 0.0);
            out[1] = y2;
            return;
        }
        case DependenceVariant::nuod_pairwise: {
            if (n % 2 != 0)
                throw invalid_parameter(
                    "sample_increments: nuod_pairwise requires even n");
            for (std::size_t k = 0; k < n / 2; ++k) {
                const double v1 = spec.g->sample(rng);
                const double v2 = spec.g->sample(rng);
                const double u = spec.h->sample(rng);
                out[2 * k] = v1 + u;
                out[2 * k + 1] = v2 - u;
            }
            return;
        }
    }
}

SampleMatrix draw_samples(const DependenceSpec& spec, std::size_t n_cols,
                          std::size_t rows, std::uint64_t seed) {
    SampleMatrix m;
    m.rows = rows;
    m.cols = n_cols;
    m.data.resize(rows * n_cols);
    for (std::size_t r = 0; r < rows; ++r) {
        RandomStream rng = RandomStream::derive(seed, r, kStreamIncrements);
        sample_increments(spec, n_cols, rng,
                          {m.data.data() + r * n_cols, n_cols});
    }
    return m;
}

ExceedanceEstimate exceedance_estimators(const SampleMatrix& samples,
                                         std::size_t i, std::size_t j,
                                         double x_i, double x_j) {
    if (samples.rows < 1000)
        throw invalid_parameter(
            "exceedance_estimators: need at least 1e3 sample rows");
    if (i >= samples.cols || j >= samples.cols || i == j)
        throw invalid_parameter("exceedance_estimators: bad column indices");

    std::size_t cond = 0, joint_upper = 0, joint_abs = 0;
    for (std::size_t r = 0; r < samples.rows; ++r) {
        if (samples.at(r, j) > x_j) {
            ++cond;
            const double xi = samples.at(r, i);
            if (xi > x_i) ++joint_upper;
            if (std::abs(xi) > x_i) ++joint_abs;
        }
    }
    if (cond == 0)
        throw undefined_estimate(
            "exceedance_estimators: conditioning event {X_j > x_j} never "
            "occurred",
            0);

    ExceedanceEstimate e;
    e.conditioning_hits = cond;
    const double m = static_cast<double>(cond);
    e.utai_hat = joint_upper / m;
    e.tai_hat = joint_abs / m;
    e.utai_se = std::sqrt(e.utai_hat * (1.0 - e.utai_hat) / m);
    e.tai_se = std::sqrt(e.tai_hat * (1.0 - e.tai_hat) / m);
    return e;
}

double empirical_quantile(const SampleMatrix& samples, std::size_t col,
                          double u) {
    std::vector<double> v(samples.rows);
    for (std::size_t r = 0; r < samples.rows; ++r) v[r] = samples.at(r, col);
    const std::size_t k =
        std::min(samples.rows - 1,
                 static_cast<std::size_t>(u * static_cast<double>(samples.rows)));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    return v[k];
}

}  // namespace heavytail

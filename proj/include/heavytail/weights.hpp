#ifndef HEAVYTAIL_WEIGHTS_HPP_
#define HEAVYTAIL_WEIGHTS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "heavytail/insensitivity.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/tail_model.hpp"

namespace heavytail {

enum class WeightVariant { fixed_vector, product_iid, independent_iid };

// Positive weight generator; product_iid yields the discount products
// W_i = Y_1 ... Y_i with iid Y_j.
struct WeightProcess {
    WeightVariant variant = WeightVariant::product_iid;
    std::vector<double> fixed;
    ModelPtr y;

    static WeightProcess fixed_vector(std::vector<double> w);
    static WeightProcess product_iid(ModelPtr y_model);
    static WeightProcess independent_iid(ModelPtr y_model);

    std::string variant_name() const;
};

void sample_weights(const WeightProcess& proc, std::size_t n, RandomStream& rng,
                    std::span<double> out);

// E[Y^alpha 1{Y <= cap}]: closed form when the model exposes one, otherwise
// adaptive quadrature on the quantile transform to relative tolerance 1e-8.
double truncated_moment(const TailModel& g, double alpha, double cap);

// E[Y^alpha 1{a < Y <= b}] by integration by parts on [a, b]; accurate for
// narrow intervals where differencing two full truncated moments would
// cancel.
double truncated_moment_interval(const TailModel& g, double alpha, double a,
                                 double b);

// Truncated alpha-moment as a function of the level x: I(x) = E[Y^alpha
// 1{Y <= f2(x)}].
struct TruncatedMoment {
    ModelPtr g;
    double alpha = 0.0;
    std::function<double(double)> f2;

    double operator()(double x) const {
        return truncated_moment(*g, alpha, f2(x));
    }
};

// Executable weight conditions, one row per grid x:
//   tail_ratio       = G(f2(x)) / F(x)               (upper-tail proxy)
//   left_tail_value  = f2(x)^p * G(f1(x))            (light left tail)
//   product_bound    = I_G^{n-1}(f2(x)) G(f2(x)) + G(f2(x g(x)))
//   ratio_sup        = sup_{1<=y<=f2(x)} G(x/y) / (y^r G(x))
// where g is the staircase built from the first grid points with
// G(f2(x/m)) < F(x)/m and r is the weight model's tail index.
struct ConditionCheckRow {
    double x = 0.0;
    double tail_ratio = 0.0;
    double left_tail_value = 0.0;
    double product_bound = 0.0;
    double ratio_sup = 0.0;
};

struct ConditionCheckReport {
    std::vector<ConditionCheckRow> rows;
    bool tail_ratio_decays = false;
    bool left_tail_decays = false;
    bool product_bound_decays = false;
    double ratio_sup_max = 0.0;
};

ConditionCheckReport weight_condition_checks(const TailModel& f,
                                             const TailModel& g,
                                             const WeightWindow& window,
                                             double p,
                                             std::span<const double> x_grid,
                                             std::size_t n = 2);

// Additive long-tail check of I: rows (x, I(x+t)/I(x)); the verdict also
// scans the increment-rate ratio [I(x-t+w)-I(x-t)]/[I(x+w)-I(x)] around the
// weight model's tail steps, which detects staircase weights whose truncated
// moment keeps a jump ratio a > 1.
struct LongTailCheckReport {
    std::vector<std::pair<double, double>> rows;  // (x, I(x+t)/I(x))
    bool in_l0 = false;
    double detected_step_ratio = 1.0;
    double a_g = 0.0;   // liminf proxy of G(f2(x/2))/G(f2(x))
    double b_f2 = 0.0;  // liminf proxy of f2(x/2)/f2(x)
};

LongTailCheckReport i_long_tail_check(const TruncatedMoment& moment, double t,
                                      std::span<const double> x_grid);

}  // namespace heavytail

#endif  // HEAVYTAIL_WEIGHTS_HPP_

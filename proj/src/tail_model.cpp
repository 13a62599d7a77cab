#include "heavytail/tail_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"
#include "heavytail/quadrature.hpp"

namespace heavytail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double shifted_log(double x) { return std::log(std::exp(1.0) - 1.0 + x); }

}  // namespace

std::optional<std::pair<double, double>> TailModel::matuszewska() const {
    if (auto a = rv_index()) return std::make_pair(*a, *a);
    return std::nullopt;
}

std::optional<double> TailModel::moment_index() const { return rv_index(); }

double TailModel::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw invalid_parameter("quantile: u must lie in (0,1), got " +
                                format_double(u));
    const double t = 1.0 - u;  // find inf{x : tail(x) <= t}
    const Interval s = support();

    double lo, hi;
    if (std::isfinite(s.lo)) {
        lo = s.lo - 1.0;
    } else {
        lo = -2.0;
        while (!(tail(lo) > t)) lo *= 2.0;
    }
    if (std::isfinite(s.hi)) {
        hi = s.hi;
    } else {
        hi = std::max(1.0, std::abs(lo));
        while (!(tail(hi) <= t)) hi *= 2.0;
    }
    if (!(tail(lo) > t)) return lo;  // target already met at the left edge

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail(mid) <= t)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) break;
    }
    return hi;
}

namespace {

// ---- two-sided / symmetric Pareto -----------------------------------------

class TwoSidedParetoModel final : public TailModel {
public:
    TwoSidedParetoModel(double alpha, double beta, std::string name)
        : alpha_(alpha), beta_(beta), name_(std::move(name)) {}

    double tail(double x) const override {
        if (x < -1.0) return 1.0 - 0.5 * std::pow(-x, -beta_);
        if (x < 1.0) return 0.5;
        return 0.5 * std::pow(x, -alpha_);
    }

    double cdf(double x) const override {
        if (x < -1.0) return 0.5 * std::pow(-x, -beta_);
        if (x < 1.0) return 0.5;
        return 1.0 - 0.5 * std::pow(x, -alpha_);
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        if (u < 0.5) return -std::pow(2.0 * u, -1.0 / beta_);
        if (u == 0.5) return -1.0;  // left endpoint of the flat CDF region
        return std::pow(2.0 * (1.0 - u), -1.0 / alpha_);
    }

    Interval support() const override { return {-kInf, kInf}; }

    std::string id() const override {
        return name_ == "symmetric_pareto"
                   ? name_ + "(beta=" + format_double(beta_) + ")"
                   : name_ + "(alpha=" + format_double(alpha_) +
                         ",beta=" + format_double(beta_) + ")";
    }

    std::optional<double> rv_index() const override { return alpha_; }

    ClassFlags class_flags() const override { return {true, true, true}; }

    std::optional<bool> moment_finite(double order) const override {
        return order < alpha_;
    }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        // mass of X^+ lives on (1, inf) with density alpha/2 y^-(alpha+1)
        if (cap <= 1.0) return 0.0;
        if (order == alpha_)
            return 0.5 * alpha_ * std::log(cap);
        return 0.5 * alpha_ * (std::pow(cap, order - alpha_) - 1.0) /
               (order - alpha_);
    }

    std::vector<double> quantile_breakpoints() const override { return {0.5}; }

private:
    double alpha_, beta_;
    std::string name_;
};

// ---- one-sided Pareto ------------------------------------------------------

class ParetoModel final : public TailModel {
public:
    explicit ParetoModel(double alpha) : alpha_(alpha) {}

    double tail(double x) const override {
        return x >= 1.0 ? std::pow(x, -alpha_) : 1.0;
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        return std::pow(1.0 - u, -1.0 / alpha_);
    }

    Interval support() const override { return {1.0, kInf}; }

    std::string id() const override {
        return "pareto(alpha=" + format_double(alpha_) + ")";
    }

    std::optional<double> rv_index() const override { return alpha_; }

    ClassFlags class_flags() const override { return {true, true, true}; }

    std::optional<bool> moment_finite(double order) const override {
        return order < alpha_;
    }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        if (cap <= 1.0) return 0.0;
        if (order == alpha_) return alpha_ * std::log(cap);
        return alpha_ * (std::pow(cap, order - alpha_) - 1.0) / (order - alpha_);
    }

private:
    double alpha_;
};

// ---- Pareto weight with scale ----------------------------------------------

class ParetoWeightModel final : public TailModel {
public:
    ParetoWeightModel(double theta, double c) : theta_(theta), c_(c) {}

    double tail(double x) const override {
        return x > c_ ? std::pow(x / c_, -theta_) : 1.0;
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        return c_ * std::pow(1.0 - u, -1.0 / theta_);
    }

    Interval support() const override { return {c_, kInf}; }

    std::string id() const override {
        return "pareto_weight(theta=" + format_double(theta_) +
               ",c=" + format_double(c_) + ")";
    }

    std::optional<double> rv_index() const override { return theta_; }

    ClassFlags class_flags() const override { return {true, true, true}; }

    std::optional<bool> moment_finite(double order) const override {
        return order < theta_;
    }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        if (cap <= c_) return 0.0;
        if (order == theta_)
            return theta_ * std::pow(c_, theta_) * std::log(cap / c_);
        // theta c^order/(theta-order) (1 - (cap/c)^(order-theta))
        return theta_ * std::pow(c_, order) / (theta_ - order) *
               (1.0 - std::pow(cap / c_, order - theta_));
    }

private:
    double theta_, c_;
};

// ---- log-perturbed Pareto ---------------------------------------------------

class LogPerturbedParetoModel final : public TailModel {
public:
    LogPerturbedParetoModel(double alpha, double kappa)
        : alpha_(alpha), kappa_(kappa) {}

    double tail(double x) const override {
        if (x <= 1.0) return 1.0;
        return std::pow(x, -alpha_) * std::pow(shifted_log(x), -kappa_);
    }

    Interval support() const override { return {1.0, kInf}; }

    std::string id() const override {
        return "log_perturbed_pareto(alpha=" + format_double(alpha_) +
               ",kappa=" + format_double(kappa_) + ")";
    }

    std::optional<double> rv_index() const override { return alpha_; }

    ClassFlags class_flags() const override { return {true, true, true}; }

    std::optional<bool> moment_finite(double order) const override {
        if (order < alpha_) return true;
        if (order == alpha_) return kappa_ > 1.0;
        return false;
    }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        if (cap <= 1.0) return 0.0;
        // integration by parts: E[Y^s 1{Y<=T}] = 1 - T^s tail(T)
        //                                        + s int_1^T y^(s-1) tail(y) dy,
        // with the integral evaluated in log space.
        const double s = order;
        const double log_cap = std::log(cap);
        const auto integrand = [&](double t) {
            return std::exp((s - alpha_) * t) *
                   std::pow(shifted_log(std::exp(t)), -kappa_);
        };
        const auto q = integrate_adaptive_rel(integrand, 0.0, log_cap, 1e-11);
        return 1.0 - std::pow(cap, s) * tail(cap) + s * q.value;
    }

private:
    double alpha_, kappa_;
};

// ---- inverse power with squared log ----------------------------------------

class InversePowerLogModel final : public TailModel {
public:
    explicit InversePowerLogModel(double rho) : rho_(rho) {}

    double tail(double x) const override {
        if (x < 1.0) return 1.0;
        return std::pow(x, -rho_) * std::pow(shifted_log(x), -2.0);
    }

    Interval support() const override { return {1.0, kInf}; }

    std::string id() const override {
        return "inverse_power_log(rho=" + format_double(rho_) + ")";
    }

    std::optional<double> rv_index() const override { return rho_; }

    ClassFlags class_flags() const override { return {true, true, true}; }

    std::optional<bool> moment_finite(double order) const override {
        return order <= rho_;
    }

private:
    double rho_;
};

// ---- oscillating staircase tail ---------------------------------------------

struct StairSegments {
    // breakpoints of the staircase: flat on [x_i, y_i), power curve elsewhere
    std::vector<double> xs, ys;
    double alpha;

    double base(double x) const { return std::pow(x, -alpha - 1.0); }

    void build(double alpha_in, double ratio_a, double x1) {
        alpha = alpha_in;
        const double r = std::pow(ratio_a, 1.0 / (alpha + 1.0));
        double x = x1;
        while (x < 1e30 && xs.size() < 200) {
            xs.push_back(x);
            ys.push_back(r * x);
            x = 2.0 * r * x;
        }
    }
};

class OscillatingTailModel final : public TailModel {
public:
    OscillatingTailModel(double alpha, double ratio_a, double x1)
        : a_(ratio_a) {
        segs_.build(alpha, ratio_a, x1);
    }

    double tail(double x) const override {
        if (x <= 1.0) return 1.0;
        if (x < segs_.xs.front()) return segs_.base(x);
        // last segment with x_i <= x
        const auto it = std::upper_bound(segs_.xs.begin(), segs_.xs.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - segs_.xs.begin()) - 1;
        if (x < segs_.ys[i]) return segs_.base(segs_.xs[i]);
        return segs_.base(x);
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        const double t = 1.0 - u;
        if (t >= segs_.base(segs_.xs.front()))
            return std::pow(t, -1.0 / (segs_.alpha + 1.0));
        for (std::size_t i = 0; i < segs_.xs.size(); ++i) {
            const double flat = segs_.base(segs_.xs[i]);
            const double next = segs_.base(segs_.ys[i]);
            if (t >= flat) return std::pow(t, -1.0 / (segs_.alpha + 1.0));
            if (t >= next) return segs_.ys[i];  // atom at y_i absorbs this range
        }
        return std::pow(t, -1.0 / (segs_.alpha + 1.0));
    }

    Interval support() const override { return {1.0, kInf}; }

    std::string id() const override {
        return "oscillating(alpha=" + format_double(segs_.alpha) +
               ",a=" + format_double(a_) + ",x1=" + format_double(segs_.xs[0]) +
               ")";
    }

    ClassFlags class_flags() const override {
        return {false, true, false};  // the flat steps break long-tailedness
    }

    std::optional<bool> moment_finite(double order) const override {
        return order < segs_.alpha + 1.0;
    }

    std::vector<double> tail_breakpoints(double x_max) const override {
        std::vector<double> out;
        for (std::size_t i = 0; i < segs_.xs.size(); ++i) {
            if (segs_.xs[i] <= x_max) out.push_back(segs_.xs[i]);
            if (segs_.ys[i] <= x_max) out.push_back(segs_.ys[i]);
        }
        return out;
    }

    std::vector<double> quantile_breakpoints() const override {
        std::vector<double> out;
        for (std::size_t i = 0; i < segs_.xs.size(); ++i) {
            const double u_lo = 1.0 - segs_.base(segs_.xs[i]);
            const double u_hi = 1.0 - segs_.base(segs_.ys[i]);
            if (u_lo < 1.0 - 1e-15) out.push_back(u_lo);
            if (u_hi < 1.0 - 1e-15) out.push_back(u_hi);
        }
        return out;
    }

private:
    StairSegments segs_;
    double a_;
};

// ---- normalized integrated tail of the staircase ----------------------------

class IntegratedOscillatingModel final : public TailModel {
public:
    IntegratedOscillatingModel(double alpha, double ratio_a, double x1)
        : a_(ratio_a) {
        segs_.build(alpha, ratio_a, x1);
        build_regions();
    }

    double tail(double x) const override {
        if (x <= 1.0) return 1.0;
        return upper_integral(x) / norm_;
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        const double target = (1.0 - u) * norm_;  // find x with S(x) = target
        // regions are ordered by lo; S decreases in x, so search by S(lo)
        std::size_t i = 0;
        for (; i + 1 < regions_.size(); ++i) {
            if (target > regions_[i + 1].s_at_lo) break;
        }
        const Region& r = regions_[i];
        const double excess = target - r.s_at_hi;
        if (excess <= 0.0) return r.hi;
        if (r.flat_value > 0.0) return r.hi - excess / r.flat_value;
        // curve piece: S(x) - S(hi) = (x^-a - hi^-a)/a
        const double aa = segs_.alpha;
        const double pow_hi = std::isfinite(r.hi) ? std::pow(r.hi, -aa) : 0.0;
        return std::pow(aa * excess + pow_hi, -1.0 / aa);
    }

    Interval support() const override { return {1.0, kInf}; }

    std::string id() const override {
        return "integrated_oscillating(alpha=" + format_double(segs_.alpha) +
               ",a=" + format_double(a_) + ",x1=" + format_double(segs_.xs[0]) +
               ")";
    }

    ClassFlags class_flags() const override { return {true, true, std::nullopt}; }

    std::optional<bool> moment_finite(double order) const override {
        return order < segs_.alpha;
    }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        // density is staircase_tail(y)/norm, piecewise power or constant
        if (cap <= 1.0) return 0.0;
        double acc = 0.0;
        for (const Region& r : regions_) {
            if (r.lo >= cap) break;
            const double hi = std::min(r.hi, cap);
            if (r.flat_value > 0.0) {
                acc += r.flat_value * power_integral(order, r.lo, hi);
            } else {
                acc += power_integral(order - segs_.alpha - 1.0, r.lo, hi);
            }
        }
        return acc / norm_;
    }

    std::vector<double> tail_breakpoints(double x_max) const override {
        std::vector<double> out;
        for (std::size_t i = 0; i < segs_.xs.size(); ++i) {
            if (segs_.xs[i] <= x_max) out.push_back(segs_.xs[i]);
            if (segs_.ys[i] <= x_max) out.push_back(segs_.ys[i]);
        }
        return out;
    }

    double step_ratio() const { return a_; }

private:
    struct Region {
        double lo, hi;
        double flat_value;  // staircase value if flat, 0 for curve pieces
        double s_at_lo, s_at_hi;
    };

    static double power_integral(double e, double lo, double hi) {
        // int_lo^hi y^e dy
        if (e == -1.0) return std::log(hi / lo);
        return (std::pow(hi, e + 1.0) - std::pow(lo, e + 1.0)) / (e + 1.0);
    }

    void build_regions() {
        const double aa = segs_.alpha;
        regions_.clear();
        regions_.push_back({1.0, segs_.xs[0], 0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < segs_.xs.size(); ++i) {
            regions_.push_back(
                {segs_.xs[i], segs_.ys[i], segs_.base(segs_.xs[i]), 0.0, 0.0});
            const double next =
                (i + 1 < segs_.xs.size()) ? segs_.xs[i + 1] : kInf;
            regions_.push_back({segs_.ys[i], next, 0.0, 0.0, 0.0});
        }
        // accumulate S backwards; beyond the last breakpoint the tail follows
        // the pure power curve, so S(z) = z^-alpha/alpha there
        double s_hi = 0.0;
        for (std::size_t k = regions_.size(); k-- > 0;) {
            Region& r = regions_[k];
            r.s_at_hi = s_hi;
            double piece;
            if (!std::isfinite(r.hi)) {
                piece = std::pow(r.lo, -aa) / aa;
            } else if (r.flat_value > 0.0) {
                piece = r.flat_value * (r.hi - r.lo);
            } else {
                piece = (std::pow(r.lo, -aa) - std::pow(r.hi, -aa)) / aa;
            }
            r.s_at_lo = s_hi + piece;
            s_hi = r.s_at_lo;
        }
        norm_ = regions_.front().s_at_lo;  // S(1)
    }

    double upper_integral(double x) const {
        // S(x) = int_x^inf staircase_tail(t) dt via the region table
        const double aa = segs_.alpha;
        std::size_t lo_idx = 0, hi_idx = regions_.size();
        while (lo_idx + 1 < hi_idx) {
            const std::size_t mid = (lo_idx + hi_idx) / 2;
            if (regions_[mid].lo <= x)
                lo_idx = mid;
            else
                hi_idx = mid;
        }
        const Region& r = regions_[lo_idx];
        if (!std::isfinite(r.hi)) {
            // beyond the region table the tail follows the pure power curve
            return std::pow(x, -aa) / aa;
        }
        double piece;
        if (r.flat_value > 0.0) {
            piece = r.flat_value * (r.hi - x);
        } else {
            piece = (std::pow(x, -aa) - std::pow(r.hi, -aa)) / aa;
        }
        return r.s_at_hi + piece;
    }

    StairSegments segs_;
    std::vector<Region> regions_;
    double norm_ = 1.0;
    double a_;
};

// ---- composite weight: Pareto right tail, light left tail -------------------

class CompositeWeightModel final : public TailModel {
public:
    CompositeWeightModel(double theta, double rho) : theta_(theta), rho_(rho) {}

    double tail(double x) const override {
        if (x <= 0.0) return 1.0;
        if (x < 1.0) return 1.0 - 0.5 * k_tail(1.0 / x);
        return 0.5 * std::pow(x, -theta_);
    }

    double cdf(double x) const override {
        if (x <= 0.0) return 0.0;
        if (x < 1.0) return 0.5 * k_tail(1.0 / x);
        return 1.0 - 0.5 * std::pow(x, -theta_);
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        if (u >= 0.5) return std::pow(2.0 * (1.0 - u), -1.0 / theta_);
        return TailModel::quantile(u);
    }

    Interval support() const override { return {0.0, kInf}; }

    std::string id() const override {
        return "composite_weight(theta=" + format_double(theta_) +
               ",rho=" + format_double(rho_) + ")";
    }

    std::optional<double> rv_index() const override { return theta_; }

    ClassFlags class_flags() const override { return {true, true, true}; }

    std::optional<bool> moment_finite(double order) const override {
        return order < theta_;
    }

    std::vector<double> quantile_breakpoints() const override { return {0.5}; }

private:
    double k_tail(double z) const {
        if (z < 1.0) return 1.0;
        return std::pow(z, -rho_) * std::pow(shifted_log(z), -2.0);
    }

    double theta_, rho_;
};

// ---- exponential -------------------------------------------------------------

class ExponentialModel final : public TailModel {
public:
    explicit ExponentialModel(double rate) : rate_(rate) {}

    double tail(double x) const override {
        return x >= 0.0 ? std::exp(-rate_ * x) : 1.0;
    }

    double cdf(double x) const override {
        return x >= 0.0 ? -std::expm1(-rate_ * x) : 0.0;
    }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        return -std::log1p(-u) / rate_;
    }

    Interval support() const override { return {0.0, kInf}; }

    std::string id() const override {
        return "exponential(rate=" + format_double(rate_) + ")";
    }

    ClassFlags class_flags() const override { return {false, false, false}; }

    std::optional<bool> moment_finite(double) const override { return true; }

private:
    double rate_;
};

// ---- point mass ---------------------------------------------------------------

class PointMassModel final : public TailModel {
public:
    explicit PointMassModel(double v) : v_(v) {}

    double tail(double x) const override { return x < v_ ? 1.0 : 0.0; }

    double quantile(double u) const override {
        if (!(u > 0.0 && u < 1.0))
            throw invalid_parameter("quantile: u must lie in (0,1)");
        return v_;
    }

    Interval support() const override { return {v_, v_}; }

    std::string id() const override {
        return "point_mass(value=" + format_double(v_) + ")";
    }

    std::optional<bool> moment_finite(double) const override { return true; }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        if (v_ > 0.0 && v_ <= cap) return std::pow(v_, order);
        return 0.0;
    }

private:
    double v_;
};

// ---- fixed scaling wrapper -----------------------------------------------------

class ScaledModel final : public TailModel {
public:
    ScaledModel(ModelPtr base, double w) : base_(std::move(base)), w_(w) {}

    double tail(double x) const override { return base_->tail(x / w_); }

    double cdf(double x) const override { return base_->cdf(x / w_); }

    double quantile(double u) const override { return w_ * base_->quantile(u); }

    Interval support() const override {
        const Interval s = base_->support();
        return {w_ * s.lo, w_ * s.hi};
    }

    std::string id() const override {
        return "scaled(w=" + format_double(w_) + "," + base_->id() + ")";
    }

    std::optional<double> rv_index() const override { return base_->rv_index(); }

    ClassFlags class_flags() const override { return base_->class_flags(); }

    std::optional<bool> moment_finite(double order) const override {
        return base_->moment_finite(order);
    }

    std::optional<double> truncated_power_moment(double order,
                                                 double cap) const override {
        if (auto m = base_->truncated_power_moment(order, cap / w_))
            return std::pow(w_, order) * *m;
        return std::nullopt;
    }

    std::vector<double> quantile_breakpoints() const override {
        return base_->quantile_breakpoints();
    }

    std::vector<double> tail_breakpoints(double x_max) const override {
        auto b = base_->tail_breakpoints(x_max / w_);
        for (double& v : b) v *= w_;
        return b;
    }

private:
    ModelPtr base_;
    double w_;
};

}  // namespace

// ---- factories -------------------------------------------------------------

ModelPtr two_sided_pareto(double alpha, double beta) {
    if (!(alpha > 0.0))
        throw invalid_parameter("two_sided_pareto: requires alpha > 0");
    if (!(beta > alpha))
        throw invalid_parameter("two_sided_pareto: requires beta > alpha");
    return std::make_shared<TwoSidedParetoModel>(alpha, beta, "two_sided_pareto");
}

ModelPtr symmetric_pareto(double beta) {
    if (!(beta > 0.0))
        throw invalid_parameter("symmetric_pareto: requires beta > 0");
    return std::make_shared<TwoSidedParetoModel>(beta, beta, "symmetric_pareto");
}

ModelPtr pareto(double alpha) {
    if (!(alpha > 0.0)) throw invalid_parameter("pareto: requires alpha > 0");
    return std::make_shared<ParetoModel>(alpha);
}

ModelPtr pareto_weight(double theta, double c) {
    if (!(theta > 0.0))
        throw invalid_parameter("pareto_weight: requires theta > 0");
    if (!(c > 0.0)) throw invalid_parameter("pareto_weight: requires c > 0");
    return std::make_shared<ParetoWeightModel>(theta, c);
}

ModelPtr log_perturbed_pareto(double alpha, double kappa) {
    if (!(alpha > 0.0))
        throw invalid_parameter("log_perturbed_pareto: requires alpha > 0");
    if (!(kappa >= 0.0))
        throw invalid_parameter("log_perturbed_pareto: requires kappa >= 0");
    return std::make_shared<LogPerturbedParetoModel>(alpha, kappa);
}

ModelPtr inverse_power_log(double rho) {
    if (!(rho > 1.0))
        throw invalid_parameter("inverse_power_log: requires rho > 1");
    return std::make_shared<InversePowerLogModel>(rho);
}

ModelPtr oscillating_tail(double alpha, double ratio_a, double x1) {
    if (!(alpha > 0.0))
        throw invalid_parameter("oscillating: requires alpha > 0");
    if (!(ratio_a > 1.0))
        throw invalid_parameter("oscillating: requires a > 1");
    const double r = std::pow(ratio_a, 1.0 / (alpha + 1.0));
    if (!(x1 * (r - 1.0) > 1.0))
        throw invalid_parameter(
            "oscillating: x1 too small, first flat step must be wider than 1");
    return std::make_shared<OscillatingTailModel>(alpha, ratio_a, x1);
}

ModelPtr integrated_oscillating(double alpha, double ratio_a, double x1) {
    if (!(alpha > 0.0))
        throw invalid_parameter("integrated_oscillating: requires alpha > 0");
    if (!(ratio_a > 1.0))
        throw invalid_parameter("integrated_oscillating: requires a > 1");
    const double r = std::pow(ratio_a, 1.0 / (alpha + 1.0));
    if (!(x1 * (r - 1.0) > 1.0))
        throw invalid_parameter("integrated_oscillating: x1 too small");
    return std::make_shared<IntegratedOscillatingModel>(alpha, ratio_a, x1);
}

ModelPtr composite_weight(double theta, double rho) {
    if (!(theta > 0.0))
        throw invalid_parameter("composite_weight: requires theta > 0");
    if (!(rho > 1.0))
        throw invalid_parameter("composite_weight: requires rho > 1");
    return std::make_shared<CompositeWeightModel>(theta, rho);
}

ModelPtr exponential(double rate) {
    if (!(rate > 0.0)) throw invalid_parameter("exponential: requires rate > 0");
    return std::make_shared<ExponentialModel>(rate);
}

ModelPtr point_mass(double value) {
    return std::make_shared<PointMassModel>(value);
}

ModelPtr scaled(ModelPtr base, double w) {
    if (!(w > 0.0)) throw invalid_parameter("scaled: requires w > 0");
    return std::make_shared<ScaledModel>(std::move(base), w);
}

double power_moment(const TailModel& model, double order) {
    if (auto fin = model.moment_finite(order); fin && !*fin)
        throw invalid_parameter("power_moment: E(X^+)^" + format_double(order) +
                                " diverges for " + model.id());
    if (auto m = model.truncated_power_moment(order, kInf)) return *m;
    // quantile-space fallback with a doubling check on the upper tail
    const auto f = [&](double u) {
        const double q = model.quantile(u);
        return q > 0.0 ? std::pow(q, order) : 0.0;
    };
    const auto core = integrate_adaptive_rel(f, 1e-12, 1.0 - 1e-12, 1e-9);
    double value = core.value;
    // upper end: geometric panels toward u = 1
    double prev_piece = kInf;
    double hi = 1.0 - 1e-12;
    for (int k = 0; k < 8; ++k) {
        const double lo = 1.0 - (1.0 - hi) / 2.0;
        const auto piece = integrate_adaptive(f, hi, lo, 1e-16, 24);
        value += piece.value;
        if (k > 2 && piece.value > prev_piece)
            throw numeric_error(
                "power_moment: truncated integrals keep growing; moment "
                "appears divergent for " + model.id(),
                piece.value);
        prev_piece = piece.value;
        hi = lo;
    }
    return value;
}

}  // namespace heavytail

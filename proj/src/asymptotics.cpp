#include "heavytail/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"
#include "heavytail/insensitivity.hpp"
#include "heavytail/quadrature.hpp"

namespace heavytail {

namespace {

constexpr double kQuantileEdge = 1e-13;

struct QExpectation {
    double value = 0.0;
    double error = 0.0;
};

// E[phi(Y)] = int_0^1 phi(Q(u)) du for a positive-support Y, with geometric
// panels toward both u-ends, panel splits at the quantile breakpoints, and
// bracket terms for the unresolved edge mass.  phi must be monotone in y
// near the support edges (true for all tail integrands used here).
template <typename Phi>
QExpectation expect_quantile(const TailModel& g, const Phi& phi,
                             double abs_tol) {
    std::vector<double> edges;
    for (double u = kQuantileEdge; u < 1e-2; u *= 8.0) edges.push_back(u);
    edges.push_back(1e-2);
    edges.push_back(0.5);
    edges.push_back(0.99);
    for (double u = 1e-2; u > kQuantileEdge; u /= 8.0) edges.push_back(1.0 - u);
    edges.push_back(1.0 - kQuantileEdge);
    for (double b : g.quantile_breakpoints())
        if (b > kQuantileEdge && b < 1.0 - kQuantileEdge) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const auto f = [&](double u) { return phi(g.quantile(u)); };

    QExpectation out;
    const double tol_share = abs_tol / static_cast<double>(edges.size());
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const auto piece =
            integrate_adaptive(f, edges[k], edges[k + 1], tol_share, 30);
        out.value += piece.value;
        out.error += piece.abs_error;
    }

    // edge brackets: mass kQuantileEdge on each side, integrand between the
    // value at the last resolved quantile and the value at the extreme one
    {
        const double a = f(1e-300), b = f(kQuantileEdge);
        const double lo = std::min(a, b), hi = std::max(a, b);
        out.value += kQuantileEdge * 0.5 * (lo + hi);
        out.error += kQuantileEdge * 0.5 * (hi - lo);
    }
    {
        const double a = f(1.0 - 1e-16), b = f(1.0 - kQuantileEdge);
        const double lo = std::min(a, b), hi = std::max(a, b);
        out.value += kQuantileEdge * 0.5 * (lo + hi);
        out.error += kQuantileEdge * 0.5 * (hi - lo);
    }
    return out;
}

template <typename Phi>
QExpectation expect_quantile_rel(const TailModel& g, const Phi& phi,
                                 double rel_tol) {
    const QExpectation rough = expect_quantile(g, phi, 1e-300);
    if (rough.value == 0.0) return rough;
    return expect_quantile(g, phi, rel_tol * std::abs(rough.value));
}

// fixed-rule variant for tabulation sweeps: one GK15 application on each of
// `splits` subdivisions of every geometric panel, no adaptivity.  Integrands
// built from piecewise-linear tables would make adaptive refinement explode
// at every table node; the tabulation layers control their error globally by
// rebuilding at half resolution instead.
template <typename Phi>
double expect_quantile_fixed(const TailModel& g, const Phi& phi, int splits) {
    std::vector<double> edges;
    for (double u = kQuantileEdge; u < 1e-2; u *= 8.0) edges.push_back(u);
    edges.push_back(1e-2);
    edges.push_back(0.5);
    edges.push_back(0.99);
    for (double u = 1e-2; u > kQuantileEdge; u /= 8.0) edges.push_back(1.0 - u);
    edges.push_back(1.0 - kQuantileEdge);
    for (double b : g.quantile_breakpoints())
        if (b > kQuantileEdge && b < 1.0 - kQuantileEdge) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const auto f = [&](double u) { return phi(g.quantile(u)); };
    double value = 0.0;
    std::size_t evals = 0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const double w = (edges[k + 1] - edges[k]) / splits;
        for (int s = 0; s < splits; ++s) {
            double v, e;
            detail::gk15(f, edges[k] + s * w, edges[k] + (s + 1) * w, v, e,
                         evals);
            value += v;
        }
    }
    value += kQuantileEdge * 0.5 * (f(1e-300) + f(kQuantileEdge));
    value += kQuantileEdge * 0.5 * (f(1.0 - 1e-16) + f(1.0 - kQuantileEdge));
    return value;
}

// piecewise-linear interpolant of log H vs log t; clamped outside the table
class LogLogTable {
public:
    LogLogTable() = default;
    LogLogTable(std::vector<double> log_t, std::vector<double> log_v)
        : log_t_(std::move(log_t)), log_v_(std::move(log_v)) {}

    double eval(double t) const {
        const double lt = std::log(t);
        if (lt <= log_t_.front()) return std::exp(log_v_.front());
        if (lt >= log_t_.back()) return std::exp(log_v_.back());
        const auto it = std::upper_bound(log_t_.begin(), log_t_.end(), lt);
        const std::size_t k = static_cast<std::size_t>(it - log_t_.begin());
        const double w =
            (lt - log_t_[k - 1]) / (log_t_[k] - log_t_[k - 1]);
        return std::exp(log_v_[k - 1] + w * (log_v_[k] - log_v_[k - 1]));
    }

private:
    std::vector<double> log_t_, log_v_;
};

// nested quantile-space convolution in log scale: tabulates
// H_j(t) = int H_{j-1}(t / y) G(dy) level by level
double product_tail_nested(const TailModel& f, const TailModel& g,
                           std::size_t i, double x, int nodes_per_decade,
                           double* quad_error) {
    const double y_lo = g.quantile(kQuantileEdge);
    const double y_hi = g.quantile(1.0 - kQuantileEdge);
    const double shrink = std::min(y_lo, 1.0);
    const double grow = std::max(y_hi, 1.0);

    std::function<double(double)> prev = [&f](double t) { return f.tail(t); };
    LogLogTable table;
    *quad_error = 0.0;

    for (std::size_t j = 1; j < i; ++j) {
        const double span = static_cast<double>(i - j);
        const double t_lo = x / std::pow(grow, span) / 4.0;
        const double t_hi = x * 4.0 / std::pow(shrink, span);
        const int decades = static_cast<int>(
            std::ceil(std::log10(std::max(t_hi / t_lo, 10.0))));
        const int nodes = std::max(16, decades * nodes_per_decade);
        const int splits = nodes_per_decade >= 48 ? 3 : 2;
        std::vector<double> log_t(nodes), log_v(nodes);
        const double l0 = std::log(t_lo), l1 = std::log(t_hi);
        for (int k = 0; k < nodes; ++k) {
            const double lt = l0 + (l1 - l0) * k / (nodes - 1);
            const double t = std::exp(lt);
            const double v = expect_quantile_fixed(
                g, [&](double y) { return prev(t / y); }, splits);
            log_t[k] = lt;
            log_v[k] = std::log(std::max(v, 1e-300));
        }
        table = LogLogTable(std::move(log_t), std::move(log_v));
        prev = [&table](double t) { return table.eval(t); };
    }

    *quad_error = 0.0;  // controlled by the caller's half-resolution rebuild
    return expect_quantile_fixed(
        g, [&](double y) { return prev(x / y); }, 8);
}

double halton(std::size_t index, int base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

constexpr int kPrimes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                             23, 29, 31, 37, 41, 43, 47, 53};

// deterministic stratified integration over the product quantile cube
double product_tail_stratified(const TailModel& f, const TailModel& g,
                               std::size_t i, double x, std::size_t strata,
                               double* err_estimate) {
    if (i > 16)
        throw invalid_parameter("random_weight_tail: product depth > 16");
    double acc[2] = {0.0, 0.0};
    for (std::size_t k = 64; k < 64 + strata; ++k) {
        double w = 1.0;
        for (std::size_t d = 0; d < i; ++d)
            w *= g.quantile(halton(k, kPrimes[d]));
        acc[k & 1] += f.tail(x / w);
    }
    const double total = acc[0] + acc[1];
    const double mean = total / static_cast<double>(strata);
    const double half_diff =
        std::abs(acc[0] - acc[1]) / (0.5 * static_cast<double>(strata));
    *err_estimate = mean > 0.0 ? half_diff / std::max(mean, 1e-300) : 0.0;
    return mean;
}

}  // namespace

CaseLabel case_classifier(const TailModel& g, double alpha,
                          std::span<const double> probes) {
    if (!(alpha >= 0.0))
        throw invalid_parameter("case_classifier: requires alpha >= 0");
    static const double kDefault[3] = {0.5, 0.1, 0.01};
    if (probes.empty()) probes = kDefault;
    for (double d : probes)
        if (!(d > 0.0))
            throw invalid_parameter("case_classifier: probes must be positive");

    CaseLabel out;
    bool any_unknown = false;
    for (double d : probes) {
        const auto fin = g.moment_finite(alpha + d);
        if (!fin) {
            any_unknown = true;
            continue;
        }
        if (*fin) {
            out.label = TailCase::one;
            out.witness_delta = d;
            out.evidence.push_back("E Y^(alpha+" + format_double(d) +
                                   ") finite (analytic)");
            return out;
        }
        out.evidence.push_back("E Y^(alpha+" + format_double(d) +
                               ") divergent (analytic)");
    }
    const auto fin_alpha = g.moment_finite(alpha);
    if (fin_alpha && !any_unknown) {
        out.label = *fin_alpha ? TailCase::two : TailCase::three;
        out.evidence.push_back(*fin_alpha ? "E Y^alpha finite (analytic)"
                                          : "E Y^alpha divergent (analytic)");
        return out;
    }

    // growth-of-partial-integral heuristic for models without analytic rules
    out.heuristic = true;
    const auto growth = [&](double order) {
        const double caps[4] = {1e4, 1e8, 1e12, 1e16};
        double prev = truncated_moment(g, order, caps[0]);
        double last_ratio = 1e300;
        for (int k = 1; k < 4; ++k) {
            const double cur = truncated_moment(g, order, caps[k]);
            last_ratio = prev > 0.0 ? cur / prev : 1.0;
            prev = cur;
        }
        return last_ratio;
    };
    const double r_probe = growth(alpha + probes.back());
    const double r_alpha = growth(alpha);
    out.evidence.push_back("partial-integral growth at alpha+delta: " +
                           format_double(r_probe));
    out.evidence.push_back("partial-integral growth at alpha: " +
                           format_double(r_alpha));
    out.low_confidence =
        (r_probe > 1.001 && r_probe < 1.5) || (r_alpha > 1.001 && r_alpha < 1.5);
    if (r_probe < 1.001) {
        out.label = TailCase::one;
        out.witness_delta = probes.back();
    } else if (r_alpha < 1.001) {
        out.label = TailCase::two;
    } else {
        out.label = TailCase::three;
    }
    return out;
}

double fixed_weight_rhs(const TailModel& f, std::span<const double> w,
                        double x) {
    double acc = 0.0;
    for (double wi : w) {
        if (!(wi > 0.0))
            throw invalid_parameter("fixed_weight_rhs: weights must be positive");
        acc += f.tail(x / wi);
    }
    return acc;
}

TailValue random_weight_tail(const TailModel& f, const WeightProcess& proc,
                             std::size_t i, double x, const RwOptions& opts) {
    if (i < 1) throw invalid_parameter("random_weight_tail: requires i >= 1");
    if (!(x > 0.0)) throw invalid_parameter("random_weight_tail: requires x > 0");

    if (proc.variant == WeightVariant::fixed_vector) {
        if (proc.fixed.size() < i)
            throw invalid_parameter("random_weight_tail: fixed vector too short");
        return {f.tail(x / proc.fixed[i - 1]), 0.0};
    }

    const TailModel& g = *proc.y;
    const Interval ys = g.support();
    if (ys.lo == ys.hi) {
        // degenerate weight: W_i = v^i (product) or v (independent)
        const double v = ys.lo;
        const double w = proc.variant == WeightVariant::product_iid
                             ? std::pow(v, static_cast<double>(i))
                             : v;
        return {f.tail(x / w), 0.0};
    }

    const std::size_t depth =
        proc.variant == WeightVariant::independent_iid ? 1 : i;

    if (depth == 1) {
        const auto e = expect_quantile_rel(
            g, [&](double y) { return f.tail(x / y); }, 1e-9);
        const double tol = e.value > 0.0 ? e.error / e.value : 0.0;
        if (tol > opts.target_rel_tol)
            throw numeric_error("random_weight_tail: tolerance target missed",
                                tol);
        return {e.value, tol};
    }

    if (depth <= static_cast<std::size_t>(opts.nested_levels_max)) {
        double err_fine = 0.0, err_coarse = 0.0;
        const double fine = product_tail_nested(f, g, depth, x,
                                                opts.nodes_per_decade, &err_fine);
        const double coarse = product_tail_nested(
            f, g, depth, x, opts.nodes_per_decade / 2, &err_coarse);
        const double tol =
            fine > 0.0 ? std::abs(fine - coarse) / fine + err_fine : 0.0;
        if (tol > opts.target_rel_tol)
            throw numeric_error("random_weight_tail: tolerance target missed",
                                tol);
        return {fine, tol};
    }

    double err = 0.0;
    const double value =
        product_tail_stratified(f, g, depth, x, opts.strata, &err);
    if (err > opts.target_rel_tol)
        throw numeric_error("random_weight_tail: tolerance target missed", err);
    return {value, err};
}

double breiman_tail(const TailModel& f, const TailModel& g,
                    const CaseLabel& label, const TruncatedMoment& moment,
                    std::size_t n, double x) {
    if (!f.rv_index())
        throw unsupported_model("breiman_tail: F must be regularly varying");
    const double alpha = *f.rv_index();
    if (n == 0) return f.tail(x);
    if (label.label == TailCase::three) {
        const double ix = moment(x);
        return std::pow(ix, static_cast<double>(n)) * f.tail(x);
    }
    if (auto fin = g.moment_finite(alpha); fin && !*fin)
        throw invalid_parameter(
            "breiman_tail: cases 1-2 requested but E Y^alpha diverges for " +
            g.id());
    const double m = power_moment(g, alpha);
    return std::pow(m, static_cast<double>(n)) * f.tail(x);
}

RuinApprox ruin_approx_finite(const TailModel& f, const ModelPtr& g_y,
                              const TruncatedMoment* moment,
                              const CaseLabel& label, std::size_t n, double x,
                              RuinApproxMode mode, const RwOptions& opts) {
    if (n < 1) throw invalid_parameter("ruin_approx_finite: requires n >= 1");
    RuinApprox out;
    switch (mode) {
        case RuinApproxMode::generic: {
            const auto proc = WeightProcess::product_iid(g_y);
            for (std::size_t i = 1; i <= n; ++i) {
                const auto h = random_weight_tail(f, proc, i, x, opts);
                out.value += h.value;
                out.achieved_tol = std::max(out.achieved_tol, h.achieved_tol);
            }
            return out;
        }
        case RuinApproxMode::rv_cases12: {
            if (!f.rv_index())
                throw unsupported_model(
                    "ruin_approx_finite: F must be regularly varying");
            if (label.label == TailCase::three)
                throw invalid_parameter(
                    "ruin_approx_finite: rv_cases12 mode with a case-3 label");
            const double m = power_moment(*g_y, *f.rv_index());
            double factor = 0.0, term = 1.0;
            for (std::size_t i = 1; i <= n; ++i) {
                term *= m;
                factor += term;
            }
            out.value = factor * f.tail(x);
            return out;
        }
        case RuinApproxMode::rv_case3: {
            if (!moment)
                throw invalid_parameter(
                    "ruin_approx_finite: case-3 mode needs a truncated moment");
            const double ix = (*moment)(x);
            double factor = 0.0, term = 1.0;
            for (std::size_t i = 1; i <= n; ++i) {
                term *= ix;
                factor += term;
            }
            out.value = factor * f.tail(x);
            out.leading = term * f.tail(x);
            return out;
        }
    }
    return out;
}

InfiniteRuin ruin_approx_infinite(const TailModel& f, const TailModel& g_y,
                                  double x) {
    if (!f.rv_index())
        throw unsupported_model(
            "ruin_approx_infinite: F must be regularly varying");
    const double alpha = *f.rv_index();
    if (auto fin = g_y.moment_finite(alpha); fin && !*fin)
        throw invalid_parameter(
            "ruin_approx_infinite: E Y^alpha diverges, factor undefined");
    const double m = power_moment(g_y, alpha);
    if (!(m < 1.0))
        throw invalid_parameter(
            "ruin_approx_infinite: requires E Y^alpha < 1, got " +
            format_double(m));

    InfiniteRuin out;
    const double fx = f.tail(x);
    out.closed_form = m / (1.0 - m) * fx;
    double term = 1.0;
    for (int i = 1; i <= 10000; ++i) {
        term *= m;
        out.series_factor += term;
        out.terms = i;
        out.remainder_bound = term * m / (1.0 - m);
        if (out.remainder_bound < 1e-9) break;
    }
    out.value = out.series_factor * fx;
    return out;
}

StoppingTime StoppingTime::deterministic(std::size_t n) {
    if (n < 1)
        throw invalid_parameter("stopping time: requires n >= 1");
    StoppingTime t;
    t.horizon = n;
    t.pmf.assign(n, 0.0);
    t.pmf[n - 1] = 1.0;
    return t;
}

StoppingTime StoppingTime::geometric(double q) {
    if (!(q > 0.0 && q < 1.0))
        throw invalid_parameter("stopping time: geometric needs q in (0,1)");
    StoppingTime t;
    std::size_t h = 1;
    while (std::pow(q, static_cast<double>(h)) >= 1e-12 && h < 4096) ++h;
    t.horizon = h;
    t.pmf.resize(h);
    double total = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
        t.pmf[i] = (1.0 - q) * std::pow(q, static_cast<double>(i));
        total += t.pmf[i];
    }
    for (double& v : t.pmf) v /= total;  // fold the cut mass (< 1e-12) back in
    t.renormalized = true;
    return t;
}

double StoppingTime::survival(std::size_t i) const {
    if (i <= 1) return 1.0;
    if (i > horizon) return 0.0;
    double s = 0.0;
    for (std::size_t k = i - 1; k < horizon; ++k) s += pmf[k];
    return s;
}

double StoppingTime::moment(double order) const {
    double m = 0.0;
    for (std::size_t k = 0; k < horizon; ++k)
        m += std::pow(static_cast<double>(k + 1), order) * pmf[k];
    return m;
}

std::size_t StoppingTime::sample(RandomStream& rng) const {
    const double u = rng.next_uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        acc += pmf[k];
        if (u <= acc) return k + 1;
    }
    return horizon;
}

StoppedSumApprox stopped_sum_approx(const TailModel& f, const TailModel& g_y,
                                    const TruncatedMoment* moment,
                                    const CaseLabel& label,
                                    const StoppingTime& tau, double x, double p,
                                    std::size_t n_max) {
    if (n_max < 1)
        throw invalid_parameter("stopped_sum_approx: requires n_max >= 1");
    if (!f.rv_index())
        throw unsupported_model("stopped_sum_approx: F must be regularly varying");
    const double alpha = *f.rv_index();
    const auto mat = f.matuszewska();
    const double j_plus = mat ? mat->second : alpha;
    if (!(p > j_plus))
        throw invalid_parameter("stopped_sum_approx: requires p > J+ = " +
                                format_double(j_plus));

    StoppedSumApprox out;
    out.tau_moment_p_plus_1 = tau.moment(p + 1.0);
    const double fx = f.tail(x);

    const double m = label.label == TailCase::three
                         ? (moment ? (*moment)(x)
                                   : throw invalid_parameter(
                                         "stopped_sum_approx: case 3 needs a "
                                         "truncated moment"))
                         : power_moment(g_y, alpha);

    const std::size_t upto = std::min(n_max, tau.horizon);
    double term = 1.0;
    for (std::size_t i = 1; i <= upto; ++i) {
        term *= m;
        out.value += tau.survival(i) * term * fx;
    }

    // Potter-style bound on the cut terms: H_i(x) <= C1 (m + eps)^i tail(x),
    // with C1 taken from the diagnostics Potter fit of F
    const double eps = 0.05;
    const double c1 = std::max(1.0, class_diagnostics(f, p).potter_c1);
    double bound_term = std::pow(m + eps, static_cast<double>(upto));
    for (std::size_t i = upto + 1; i <= tau.horizon; ++i) {
        bound_term *= (m + eps);
        out.remainder_bound += c1 * tau.survival(i) * bound_term * fx;
    }
    if (out.remainder_bound > 0.01 * out.value)
        throw numeric_error(
            "stopped_sum_approx: truncation remainder exceeds 1% of the sum; "
            "increase n_max",
            out.remainder_bound / std::max(out.value, 1e-300));
    return out;
}

}  // namespace heavytail

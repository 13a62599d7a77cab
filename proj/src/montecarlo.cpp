#include "heavytail/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"

namespace heavytail {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // 99% two-sided normal quantile
constexpr std::size_t kBlock = 4096;

struct Scratch {
    std::vector<double> xs, ws;
};

// Deterministic blocked reduction: per-replication values are accumulated in
// fixed blocks of kBlock, block partial sums are folded in block order, and
// worker threads only pick whole blocks.
template <typename PerRep>
McEstimate run_mc(std::uint64_t n, std::uint64_t seed, int threads,
                  std::size_t scratch_len, const PerRep& per_rep) {
    if (n < 1000)
        throw invalid_parameter("monte carlo: need at least 1e3 replications");
    const std::size_t nblocks =
        static_cast<std::size_t>((n + kBlock - 1) / kBlock);
    std::vector<double> block_sum(nblocks, 0.0), block_sq(nblocks, 0.0);

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        Scratch scratch;
        scratch.xs.resize(scratch_len);
        scratch.ws.resize(scratch_len);
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            const std::uint64_t lo = static_cast<std::uint64_t>(b) * kBlock;
            const std::uint64_t hi = std::min<std::uint64_t>(lo + kBlock, n);
            double s = 0.0, sq = 0.0;
            for (std::uint64_t r = lo; r < hi; ++r) {
                const double v = per_rep(r, scratch);
                s += v;
                sq += v * v;
            }
            block_sum[b] = s;
            block_sq[b] = sq;
        }
    };

    const int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    double sum = 0.0, sumsq = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        sum += block_sum[b];
        sumsq += block_sq[b];
    }

    McEstimate e;
    e.n_samples = n;
    e.seed = seed;
    e.batches = static_cast<std::uint32_t>(nblocks);
    const double dn = static_cast<double>(n);
    e.mean = sum / dn;
    e.hits = sum;
    if (sum == 0.0) {
        e.zero_hits = true;
        e.rare = true;
        e.std_error = 0.0;
        e.ci_lo = 0.0;
        e.ci_hi = 3.0 / dn;  // rule of three
        return e;
    }
    const double var = std::max(0.0, (sumsq - dn * e.mean * e.mean) / (dn - 1.0));
    e.std_error = std::sqrt(var / dn);
    e.ci_lo = std::max(0.0, e.mean - kZ99 * e.std_error);
    e.ci_hi = e.mean + kZ99 * e.std_error;
    e.rare = sum < 50.0;
    return e;
}

}  // namespace

McEstimate tail_prob_crude(const DependenceSpec& dep, const WeightProcess& proc,
                           std::size_t n, double x, std::uint64_t n_samples,
                           std::uint64_t seed, const McOptions& opts) {
    return run_mc(n_samples, seed, opts.threads, n,
                  [&](std::uint64_t rep, Scratch& sc) {
                      RandomStream rx =
                          RandomStream::derive(seed, rep, kStreamIncrements);
                      RandomStream rw =
                          RandomStream::derive(seed, rep, kStreamWeights);
                      sample_increments(dep, n, rx, sc.xs);
                      sample_weights(proc, n, rw, sc.ws);
                      double s = 0.0;
                      for (std::size_t i = 0; i < n; ++i)
                          s += sc.ws[i] * sc.xs[i];
                      return s > x ? 1.0 : 0.0;
                  });
}

McEstimate tail_prob_conditional(const DependenceSpec& dep,
                                 const WeightProcess& proc, std::size_t n,
                                 double x, std::uint64_t n_samples,
                                 std::uint64_t seed, const McOptions& opts) {
    if (dep.variant != DependenceVariant::independent)
        throw unsupported_structure(
            "tail_prob_conditional: increments must be independent");
    const TailModel& f = *dep.f;
    return run_mc(n_samples, seed, opts.threads, n,
                  [&](std::uint64_t rep, Scratch& sc) {
                      RandomStream rx =
                          RandomStream::derive(seed, rep, kStreamIncrements);
                      RandomStream rw =
                          RandomStream::derive(seed, rep, kStreamWeights);
                      if (n > 1) sample_increments(dep, n - 1, rx, sc.xs);
                      sample_weights(proc, n, rw, sc.ws);
                      double partial = 0.0;
                      for (std::size_t i = 0; i + 1 < n; ++i)
                          partial += sc.ws[i] * sc.xs[i];
                      return f.tail((x - partial) / sc.ws[n - 1]);
                  });
}

McEstimate ruin_prob_mc(const DependenceSpec& dep, const ModelPtr& y_model,
                        std::size_t n, double x, std::uint64_t n_samples,
                        std::uint64_t seed, bool conditional,
                        const McOptions& opts) {
    if (!(y_model->support().lo >= 0.0))
        throw invalid_parameter("ruin_prob_mc: Y must have positive support");
    if (conditional && dep.variant != DependenceVariant::independent)
        throw unsupported_structure(
            "ruin_prob_mc: conditional form needs independent increments");

    if (!conditional) {
        return run_mc(n_samples, seed, opts.threads, n,
                      [&](std::uint64_t rep, Scratch& sc) {
                          RandomStream rx = RandomStream::derive(
                              seed, rep, kStreamIncrements);
                          RandomStream ry =
                              RandomStream::derive(seed, rep, kStreamWeights);
                          sample_increments(dep, n, rx, sc.xs);
                          double w = 1.0, s = 0.0;
                          for (std::size_t k = 0; k < n; ++k) {
                              w *= y_model->sample(ry);
                              s += w * sc.xs[k];
                              if (s > x) return 1.0;
                          }
                          return 0.0;
                      });
    }

    const TailModel& f = *dep.f;
    // first-passage decomposition: each horizon k contributes
    // 1{max_{j<k} S_j <= x} tail((x - S_{k-1}) / W_k), integrating out X_k
    return run_mc(n_samples, seed, opts.threads, n,
                  [&](std::uint64_t rep, Scratch& sc) {
                      RandomStream rx =
                          RandomStream::derive(seed, rep, kStreamIncrements);
                      RandomStream ry =
                          RandomStream::derive(seed, rep, kStreamWeights);
                      if (n > 1) sample_increments(dep, n - 1, rx, sc.xs);
                      double w = 1.0, s = 0.0;
                      bool no_passage = true;
                      double value = 0.0;
                      for (std::size_t k = 0; k < n; ++k) {
                          w *= y_model->sample(ry);
                          if (no_passage) value += f.tail((x - s) / w);
                          if (k + 1 < n) {
                              s += w * sc.xs[k];
                              if (s > x) no_passage = false;
                          }
                      }
                      return value;
                  });
}

McEstimate stopped_tail_mc(const DependenceSpec& dep, const WeightProcess& proc,
                           const StoppingTime& tau, double x,
                           std::uint64_t n_samples, std::uint64_t seed,
                           const McOptions& opts) {
    return run_mc(n_samples, seed, opts.threads, tau.horizon,
                  [&](std::uint64_t rep, Scratch& sc) {
                      RandomStream rt =
                          RandomStream::derive(seed, rep, kStreamStopping);
                      const std::size_t n = tau.sample(rt);
                      RandomStream rx =
                          RandomStream::derive(seed, rep, kStreamIncrements);
                      RandomStream rw =
                          RandomStream::derive(seed, rep, kStreamWeights);
                      sample_increments(dep, n, rx, sc.xs);
                      sample_weights(proc, n, rw, sc.ws);
                      double s = 0.0;
                      for (std::size_t i = 0; i < n; ++i)
                          s += sc.ws[i] * sc.xs[i];
                      return s > x ? 1.0 : 0.0;
                  });
}

// ---- convolution oracle ------------------------------------------------------

namespace {

struct SweepResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t leaves = 0;
};

// composite trapezoid on one panel, doubling until the refinement difference
// meets the tolerance share; one Richardson step sharpens the returned value
// while the difference itself is kept as the error contribution
template <typename F>
void panel_trapezoid(const F& f, double a, double b, double tol,
                     std::size_t max_leaves, SweepResult& out) {
    std::size_t n = 8;
    const double width = b - a;
    double t = 0.5 * (f(a) + f(b));
    for (std::size_t k = 1; k < n; ++k)
        t += f(a + width * static_cast<double>(k) / static_cast<double>(n));
    t *= width / static_cast<double>(n);
    double prev = t;
    while (n < max_leaves) {
        // refine: add midpoints of the current grid
        double mids = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            mids += f(a + width * (static_cast<double>(k) + 0.5) /
                              static_cast<double>(n));
        prev = t;
        n *= 2;
        t = 0.5 * t + mids * width / static_cast<double>(n);
        if (std::abs(t - prev) <= tol) break;
    }
    out.value += t + (t - prev) / 3.0;
    out.error += std::abs(t - prev) / 3.0;
    out.leaves += n;
}

SweepResult oracle_sweep(const TailModel& a, const TailModel& b, double x,
                         double abs_tol, std::size_t budget) {
    constexpr double kUMin = 1e-15;
    const auto f = [&](double u) { return a.tail(x - b.quantile(u)); };

    std::vector<double> edges;
    for (double u = kUMin; u < 1e-2; u *= 8.0) edges.push_back(u);
    for (int k = 0; k <= 24; ++k)
        edges.push_back(1e-2 + (0.99 - 1e-2) * k / 24.0);
    for (double u = 1e-2; u > kUMin; u /= 8.0) edges.push_back(1.0 - u);
    edges.push_back(kUMin);
    edges.push_back(1.0 - kUMin);
    for (double ub : b.quantile_breakpoints())
        if (ub > kUMin && ub < 1.0 - kUMin) edges.push_back(ub);

    // u where x - Q_B(u) crosses a kink or support edge of A
    std::vector<double> a_kinks;
    const Interval sa = a.support();
    if (std::isfinite(sa.lo)) a_kinks.push_back(sa.lo);
    if (std::isfinite(sa.hi)) a_kinks.push_back(sa.hi);
    for (double ub : a.quantile_breakpoints()) {
        if (ub > 1e-12 && ub < 1.0 - 1e-12) {
            a_kinks.push_back(a.quantile(ub));
            a_kinks.push_back(a.quantile(std::min(ub + 1e-12, 1.0 - 1e-16)));
        }
    }
    for (double kx : a_kinks) {
        const double u = 1.0 - b.tail(x - kx);
        if (u > kUMin && u < 1.0 - kUMin) edges.push_back(u);
    }

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    SweepResult out;
    const std::size_t panels = edges.size() - 1;
    const double tol_share = abs_tol / static_cast<double>(panels);
    const std::size_t leaf_share =
        std::max<std::size_t>(64, budget / std::max<std::size_t>(panels, 1));
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        panel_trapezoid(f, edges[k], edges[k + 1], tol_share, leaf_share, out);

    // bracket terms for the edge mass; the integrand is monotone in u, so
    // the contribution lies between width * f(near) and width * f(far)
    {
        const double near = f(kUMin), far = f(1e-300);
        const double lo = std::min(near, far), hi = std::max(near, far);
        out.value += kUMin * 0.5 * (lo + hi);
        out.error += kUMin * 0.5 * (hi - lo);
    }
    {
        const double near = f(1.0 - kUMin), far = f(1.0 - 1e-16);
        const double lo = std::min(near, far), hi = std::max(near, far);
        out.value += kUMin * 0.5 * (lo + hi);
        out.error += kUMin * 0.5 * (hi - lo);
    }
    return out;
}

}  // namespace

OracleResult convolution_oracle(const TailModel& a, const TailModel& b,
                                double x, std::size_t grid_n) {
    if (grid_n < (1u << 14))
        throw invalid_parameter("convolution_oracle: grid_n must be >= 2^14");

    double abs_tol = 0.0;  // first pass learns the scale
    std::size_t budget = grid_n;
    OracleResult result;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const SweepResult s1 = oracle_sweep(a, b, x, abs_tol, budget);
        const SweepResult s2 = oracle_sweep(b, a, x, abs_tol, budget);
        result.value = 0.5 * (s1.value + s2.value);
        result.error_bound = std::max(s1.error, s2.error) +
                             0.5 * std::abs(s1.value - s2.value);
        if (result.value > 0.0 &&
            result.error_bound <= 1e-3 * result.value)
            return result;
        abs_tol = 2e-4 * std::max(result.value, 1e-300);
        budget *= 8;
    }
    throw numeric_error(
        "convolution_oracle: error bound above 1e-3 of the result at x=" +
            format_double(x),
        result.value > 0.0 ? result.error_bound / result.value : 1.0);
}

// ---- ratio tables -------------------------------------------------------------

namespace {

std::vector<double> resolve_weights(const RatioConfig& cfg, double x,
                                    std::size_t n) {
    std::vector<double> w(n);
    if (cfg.window) {
        // window-endpoint weights alternate between f1(x) and f2(x)
        for (std::size_t i = 0; i < n; ++i)
            w[i] = (i % 2 == 0) ? cfg.window->f1(x) : cfg.window->f2(x);
        return w;
    }
    if (!cfg.weights || cfg.weights->variant != WeightVariant::fixed_vector)
        throw invalid_parameter("ratio_table: no deterministic weights");
    if (cfg.weights->fixed.size() < n)
        throw invalid_parameter("ratio_table: fixed weight vector too short");
    std::copy_n(cfg.weights->fixed.begin(), n, w.begin());
    return w;
}

bool deterministic_weights(const RatioConfig& cfg) {
    if (cfg.window) return true;
    return cfg.weights && cfg.weights->variant == WeightVariant::fixed_vector;
}

// marginal tail P(X_i > t) for the dependence spec; nuod margins are the
// convolution of the pair shock with the idiosyncratic part
double marginal_tail(const DependenceSpec& dep, double t) {
    switch (dep.variant) {
        case DependenceVariant::independent:
        case DependenceVariant::quantile_antithetic:
            return dep.f->tail(t);
        case DependenceVariant::nuod_pairwise:
            return convolution_oracle(*dep.h, *dep.g, t).value;
        case DependenceVariant::utai_sum:
            throw unsupported_structure(
                "ratio_table: utai_sum margins have no closed tail; use an "
                "estimator-based pipeline");
    }
    return 0.0;
}

}  // namespace

RatioTable ratio_table(const RatioConfig& cfg) {
    if (cfg.x_grid.empty() || cfg.n_list.empty())
        throw invalid_parameter("ratio_table: empty grid");

    std::vector<double> xs = cfg.x_grid;
    std::sort(xs.begin(), xs.end());
    std::vector<std::size_t> ns = cfg.n_list;
    std::sort(ns.begin(), ns.end());

    RatioTable table;
    for (double x : xs) {
        std::size_t best_n = 0;
        for (std::size_t n : ns) {
            RatioRow row;
            row.x = x;
            row.n = n;
            try {
                // rhs: sum of marginal weighted tails
                if (deterministic_weights(cfg)) {
                    const auto w = resolve_weights(cfg, x, n);
                    row.rhs = 0.0;
                    for (double wi : w) row.rhs += marginal_tail(cfg.dep, x / wi);
                } else {
                    row.rhs = 0.0;
                    for (std::size_t i = 1; i <= n; ++i)
                        row.rhs += random_weight_tail(*cfg.dep.f, *cfg.weights,
                                                      i, x, cfg.rw)
                                       .value;
                }

                // lhs per estimator
                switch (cfg.estimator) {
                    case LhsEstimator::oracle: {
                        if (!deterministic_weights(cfg))
                            throw invalid_parameter(
                                "ratio_table: oracle lhs needs deterministic "
                                "weights");
                        const auto w = resolve_weights(cfg, x, n);
                        if (n == 1) {
                            row.lhs = marginal_tail(cfg.dep, x / w[0]);
                        } else if (n == 2 &&
                                   cfg.dep.variant ==
                                       DependenceVariant::independent) {
                            const auto r = convolution_oracle(
                                *scaled(cfg.dep.f, w[0]),
                                *scaled(cfg.dep.f, w[1]), x);
                            row.lhs = r.value;
                        } else if (n == 2 &&
                                   cfg.dep.variant ==
                                       DependenceVariant::nuod_pairwise &&
                                   w[0] == w[1]) {
                            // the pair shock cancels: X1 + X2 = V1 + V2
                            const auto r = convolution_oracle(
                                *scaled(cfg.dep.g, w[0]),
                                *scaled(cfg.dep.g, w[1]), x);
                            row.lhs = r.value;
                        } else {
                            throw invalid_parameter(
                                "ratio_table: oracle lhs supports n <= 2 with "
                                "independent or unit-weight nuod increments");
                        }
                        row.ci_lo = row.ci_hi = row.lhs;
                        break;
                    }
                    case LhsEstimator::crude:
                    case LhsEstimator::conditional: {
                        const WeightProcess proc =
                            deterministic_weights(cfg)
                                ? WeightProcess::fixed_vector(
                                      resolve_weights(cfg, x, n))
                                : *cfg.weights;
                        McOptions mco;
                        mco.threads = cfg.threads;
                        const McEstimate e =
                            cfg.estimator == LhsEstimator::crude
                                ? tail_prob_crude(cfg.dep, proc, n, x,
                                                  cfg.n_samples, cfg.seed, mco)
                                : tail_prob_conditional(cfg.dep, proc, n, x,
                                                        cfg.n_samples, cfg.seed,
                                                        mco);
                        row.lhs = e.mean;
                        row.std_error = e.std_error;
                        row.ci_lo = e.ci_lo;
                        row.ci_hi = e.ci_hi;
                        if (e.rare) row.flag = "rare";
                        break;
                    }
                }
                row.ratio = row.rhs > 0.0
                                ? row.lhs / row.rhs
                                : std::numeric_limits<double>::quiet_NaN();
                if (row.flag.empty() &&
                    std::abs(row.ratio - 1.0) <= cfg.tolerance)
                    best_n = std::max(best_n, n);
            } catch (const error&) {
                row.flag = "error";
                row.lhs = row.rhs = row.ratio =
                    std::numeric_limits<double>::quiet_NaN();
            }
            table.rows.push_back(row);
        }
        table.f3_scan.emplace_back(x, best_n);
    }
    return table;
}

}  // namespace heavytail

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"
#include "heavytail/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    int threads = 0;
    bool seed_set = false, samples_set = false, threads_set = false,
         out_set = false;
};

void add_global_flags(CLI::App* cmd, GlobalFlags& g) {
    cmd->add_option("--config", g.config_path, "configuration file path");
    cmd->add_option("--seed", g.seed, "master seed")
        ->each([&](const std::string&) { g.seed_set = true; });
    cmd->add_option("--samples", g.samples, "Monte-Carlo replications")
        ->each([&](const std::string&) { g.samples_set = true; });
    cmd->add_option("--threads", g.threads, "worker threads")
        ->each([&](const std::string&) { g.threads_set = true; });
    cmd->add_option("--out", g.out_dir, "output directory")
        ->each([&](const std::string&) { g.out_set = true; });
}

heavytail::ExperimentConfig load_config(const GlobalFlags& g,
                                        const std::string& pipeline) {
    heavytail::ExperimentConfig cfg;
    if (!g.config_path.empty())
        cfg = heavytail::ExperimentConfig::parse_file(g.config_path);
    cfg.set("experiment.pipeline", pipeline);
    if (g.seed_set) cfg.set("experiment.seed", std::to_string(g.seed));
    if (g.samples_set) cfg.set("experiment.samples", std::to_string(g.samples));
    if (g.threads_set) cfg.set("experiment.threads", std::to_string(g.threads));
    if (g.out_set) cfg.set("experiment.out", g.out_dir);
    return cfg;
}

int run_pipeline(const GlobalFlags& g, const std::string& pipeline) {
    const auto cfg = load_config(g, pipeline);
    const auto manifest = heavytail::run_experiment(cfg);
    std::printf("config digest %s, %zu artifact(s), %.2fs\n",
                manifest.config_digest.c_str(), manifest.artifacts.size(),
                manifest.wall_clock_seconds);
    for (const auto& a : manifest.artifacts) std::printf("  %s\n", a.c_str());
    return kExitOk;
}

int run_report(const std::string& csv_path, double tolerance) {
    std::ifstream in(csv_path);
    if (!in) throw heavytail::io_error("cannot open " + csv_path);
    std::string line;
    std::getline(in, line);  // header
    std::printf("%12s %4s %14s %14s %10s %6s\n", "x", "n", "lhs", "rhs",
                "ratio", "flag");
    std::map<double, std::size_t> f3;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 9) continue;
        const double x = std::strtod(cells[0].c_str(), nullptr);
        const std::size_t n = std::strtoull(cells[1].c_str(), nullptr, 10);
        const double lhs = std::strtod(cells[2].c_str(), nullptr);
        const double rhs = std::strtod(cells[6].c_str(), nullptr);
        const double ratio = std::strtod(cells[7].c_str(), nullptr);
        std::printf("%12.6g %4zu %14.8g %14.8g %10.5f %6s\n", x, n, lhs, rhs,
                    ratio, cells[8].c_str());
        f3.try_emplace(x, 0);
        if (cells[8].empty() && std::abs(ratio - 1.0) <= tolerance)
            f3[x] = std::max(f3[x], n);
    }
    std::printf("\nobserved uniformity scan (largest n with |ratio-1| <= %g):\n",
                tolerance);
    for (const auto& [x, n] : f3) std::printf("  x=%-12.6g n*=%zu\n", x, n);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heavy-tail sum, ruin and weight-condition verification"};
    app.require_subcommand(1);

    GlobalFlags g;
    std::string report_csv;
    double report_tol = 0.1;

    auto* tail_eval =
        app.add_subcommand("tail-eval", "evaluate model tails on a grid");
    add_global_flags(tail_eval, g);
    auto* verify = app.add_subcommand(
        "verify", "ratio tables: weighted-sum tail vs sum of weighted tails");
    add_global_flags(verify, g);
    auto* ruin = app.add_subcommand(
        "ruin", "finite-, infinite- and random-time ruin estimates");
    add_global_flags(ruin, g);
    auto* breiman = app.add_subcommand(
        "breiman", "product-weight tails vs moment/truncated-moment factors");
    add_global_flags(breiman, g);
    auto* checks =
        app.add_subcommand("checks", "weight-condition decay checks");
    add_global_flags(checks, g);
    auto* report = app.add_subcommand("report", "summarize a ratio CSV");
    report->add_option("csv", report_csv, "ratio CSV path")->required();
    report->add_option("--tolerance", report_tol, "uniformity tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tail_eval->parsed()) return run_pipeline(g, "tail-eval");
        if (verify->parsed()) return run_pipeline(g, "verify");
        if (ruin->parsed()) return run_pipeline(g, "ruin");
        if (breiman->parsed()) return run_pipeline(g, "breiman");
        if (checks->parsed()) return run_pipeline(g, "checks");
        if (report->parsed()) return run_report(report_csv, report_tol);
    } catch (const heavytail::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const heavytail::io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const heavytail::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s (achieved %g)\n", e.what(),
                     e.achieved);
        return kExitNumeric;
    } catch (const heavytail::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}

#ifndef HEAVYTAIL_HARNESS_HPP_
#define HEAVYTAIL_HARNESS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heavytail/montecarlo.hpp"

namespace heavytail {

inline constexpr const char* kVersion = "heavytail 0.1.0";

// Parses zoo identifiers like "two_sided_pareto(alpha=1,beta=2)".
// Throws config_error naming the offending position on unknown names or
// malformed arguments.
ModelPtr parse_model(const std::string& text);

// Line-oriented key=value configuration with [section] headers and '#'
// comments.  Keys live in a fixed schema; parse(render(c)) == c on the
// canonical form produced by render().
struct ExperimentConfig {
    std::map<std::string, std::string> kv;  // "section.key" -> value

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);

    std::string render() const;       // canonical text
    std::uint64_t digest() const;     // FNV-1a 64 of the canonical text
    std::string digest_hex() const;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string get(const std::string& key, const std::string& dflt = "") const;
    double get_num(const std::string& key, double dflt) const;
    double require_num(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
    std::vector<double> get_list(const std::string& key) const;

    void set(const std::string& key, const std::string& value);
    void set_num(const std::string& key, double value);

    bool operator==(const ExperimentConfig& other) const {
        return kv == other.kv;
    }
};

struct RunManifest {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<std::string> artifacts;
    double wall_clock_seconds = 0.0;
    std::string version;
};

// Executes the pipeline named by experiment.pipeline (verify | ruin |
// breiman | checks | tail-eval), writing CSV artifacts and a manifest.json
// under experiment.out.  All files are written to a temporary name and
// renamed into place.  Per-row numeric failures are recorded in the row flag
// and the run continues; identifier errors abort with config_error.
RunManifest run_experiment(const ExperimentConfig& config);

// Writes a ratio table as CSV with header
//   x,n,lhs,stderr,ci_lo,ci_hi,rhs,ratio,flag
// (17 significant digits) plus an optional two-column plain-text plot file.
void emit_report(const RatioTable& table, const std::string& path,
                 const std::string& plot_path = "");

// Internal helpers shared with the CLI.
DependenceSpec build_dependence(const ExperimentConfig& config);
RatioConfig build_ratio_config(const ExperimentConfig& config);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace heavytail

#endif  // HEAVYTAIL_HARNESS_HPP_

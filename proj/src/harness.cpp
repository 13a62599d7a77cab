#include "heavytail/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "heavytail/errors.hpp"
#include "heavytail/format.hpp"

namespace heavytail {

namespace {

// fixed schema: canonical section and key order
const std::vector<std::pair<std::string, std::vector<std::string>>> kSchema = {
    {"experiment",
     {"pipeline", "estimator", "samples", "seed", "tolerance", "threads",
      "out", "infinite"}},
    {"model", {"f", "g", "h", "dependence", "weights"}},
    {"grid", {"x", "n"}},
    {"window", {"gamma", "gamma1", "gamma2", "p"}},
    {"stopping", {"kind", "q", "n", "n_max"}},
};

bool schema_has(const std::string& flat) {
    const auto dot = flat.find('.');
    for (const auto& [section, keys] : kSchema) {
        if (section != flat.substr(0, dot)) continue;
        for (const auto& k : keys)
            if (k == flat.substr(dot + 1)) return true;
    }
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& where) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error("expected a number for " + where + ", got '" +
                           text + "'");
    return v;
}

}  // namespace

// ---- zoo identifier parsing ---------------------------------------------------

ModelPtr parse_model(const std::string& text) {
    const auto open = text.find('(');
    std::string name = trim(open == std::string::npos ? text : text.substr(0, open));
    std::map<std::string, double> args;
    std::vector<double> positional;
    if (open != std::string::npos) {
        const auto close = text.rfind(')');
        if (close == std::string::npos || close < open)
            throw config_error("model '" + text + "': unbalanced parentheses");
        std::string inner = text.substr(open + 1, close - open - 1);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                positional.push_back(parse_number(item, "model " + name));
            } else {
                args[trim(item.substr(0, eq))] =
                    parse_number(trim(item.substr(eq + 1)), "model " + name);
            }
        }
    }

    const auto arg = [&](const std::string& key,
                         std::size_t pos) -> std::optional<double> {
        if (auto it = args.find(key); it != args.end()) return it->second;
        if (pos < positional.size()) return positional[pos];
        return std::nullopt;
    };
    const auto require = [&](const std::string& key, std::size_t pos) {
        if (auto v = arg(key, pos)) return *v;
        throw config_error("model '" + name + "': missing parameter '" + key +
                           "'");
    };

    try {
        if (name == "two_sided_pareto")
            return two_sided_pareto(require("alpha", 0), require("beta", 1));
        if (name == "symmetric_pareto") return symmetric_pareto(require("beta", 0));
        if (name == "pareto") return pareto(require("alpha", 0));
        if (name == "pareto_weight")
            return pareto_weight(require("theta", 0), arg("c", 1).value_or(1.0));
        if (name == "log_perturbed_pareto")
            return log_perturbed_pareto(require("alpha", 0), require("kappa", 1));
        if (name == "inverse_power_log")
            return inverse_power_log(require("rho", 0));
        if (name == "oscillating")
            return oscillating_tail(require("alpha", 0), require("a", 1),
                                    arg("x1", 2).value_or(8.0));
        if (name == "integrated_oscillating")
            return integrated_oscillating(require("alpha", 0), require("a", 1),
                                          arg("x1", 2).value_or(8.0));
        if (name == "composite_weight")
            return composite_weight(require("theta", 0), require("rho", 1));
        if (name == "exponential") return exponential(require("rate", 0));
        if (name == "point_mass") return point_mass(require("value", 0));
    } catch (const invalid_parameter& e) {
        throw config_error("model '" + text + "': " + e.what());
    }
    throw config_error("unknown model identifier '" + name + "' (position 0 of '" +
                       text + "')");
}

// ---- config text ---------------------------------------------------------------

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(line_no) +
                                   ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) +
                               ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw config_error("line " + std::to_string(line_no) +
                               ": key outside any [section]");
        const std::string flat = section + "." + key;
        if (!schema_has(flat))
            throw config_error("line " + std::to_string(line_no) +
                               ": unknown key '" + flat + "'");
        cfg.kv[flat] = value;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::render() const {
    std::string out;
    for (const auto& [section, keys] : kSchema) {
        bool any = false;
        for (const auto& k : keys)
            if (kv.count(section + "." + k)) any = true;
        if (!any) continue;
        out += "[" + section + "]\n";
        for (const auto& k : keys) {
            const auto it = kv.find(section + "." + k);
            if (it != kv.end()) out += k + " = " + it->second + "\n";
        }
        out += "\n";
    }
    return out;
}

std::uint64_t ExperimentConfig::digest() const {
    const std::string text = render();
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ExperimentConfig::digest_hex() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(digest()));
    return buf;
}

std::string ExperimentConfig::get(const std::string& key,
                                  const std::string& dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

double ExperimentConfig::get_num(const std::string& key, double dflt) const {
    const auto it = kv.find(key);
    return it == kv.end() ? dflt : parse_number(it->second, key);
}

double ExperimentConfig::require_num(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) throw config_error("missing required key '" + key + "'");
    return parse_number(it->second, key);
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key,
                                        std::uint64_t dflt) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return dflt;
    return static_cast<std::uint64_t>(parse_number(it->second, key));
}

std::vector<double> ExperimentConfig::get_list(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return {};
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_number(item, key));
    }
    return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    if (!schema_has(key))
        throw config_error("unknown key '" + key + "'");
    kv[key] = value;
}

void ExperimentConfig::set_num(const std::string& key, double value) {
    set(key, format_double(value));
}

// ---- building blocks -----------------------------------------------------------

DependenceSpec build_dependence(const ExperimentConfig& cfg) {
    const std::string variant = cfg.get("model.dependence", "independent");
    if (variant == "independent")
        return DependenceSpec::independent(parse_model(cfg.get("model.f")));
    if (variant == "quantile_antithetic")
        return DependenceSpec::quantile_antithetic(
            parse_model(cfg.get("model.f")));
    if (variant == "utai_sum")
        return DependenceSpec::utai_sum(parse_model(cfg.get("model.f")));
    if (variant == "nuod_pairwise")
        return DependenceSpec::nuod_pairwise(parse_model(cfg.get("model.h")),
                                             parse_model(cfg.get("model.g")));
    throw config_error("unknown dependence variant '" + variant + "'");
}

namespace {

LhsEstimator parse_estimator(const std::string& name) {
    if (name == "crude") return LhsEstimator::crude;
    if (name == "conditional") return LhsEstimator::conditional;
    if (name == "oracle") return LhsEstimator::oracle;
    throw config_error("unknown estimator '" + name + "'");
}

std::optional<WeightProcess> parse_weights(const ExperimentConfig& cfg) {
    const std::string spec = cfg.get("model.weights", "");
    if (spec.empty() || spec == "window_endpoints") return std::nullopt;
    if (spec == "product_iid")
        return WeightProcess::product_iid(parse_model(cfg.get("model.g")));
    if (spec == "independent_iid")
        return WeightProcess::independent_iid(parse_model(cfg.get("model.g")));
    if (spec.rfind("fixed", 0) == 0) {
        const auto open = spec.find('(');
        const auto close = spec.rfind(')');
        if (open == std::string::npos || close == std::string::npos)
            throw config_error("weights: malformed fixed(...) spec");
        std::vector<double> w;
        std::stringstream ss(spec.substr(open + 1, close - open - 1));
        std::string item;
        while (std::getline(ss, item, ','))
            w.push_back(parse_number(trim(item), "weights"));
        return WeightProcess::fixed_vector(std::move(w));
    }
    throw config_error("unknown weights spec '" + spec + "'");
}

std::optional<WeightWindow> parse_window(const ExperimentConfig& cfg,
                                         const ModelPtr& f) {
    if (!cfg.has("window.gamma")) return std::nullopt;
    return weight_window(*f, cfg.require_num("window.p"),
                         cfg.require_num("window.gamma"),
                         cfg.require_num("window.gamma1"),
                         cfg.require_num("window.gamma2"));
}

}  // namespace

RatioConfig build_ratio_config(const ExperimentConfig& cfg) {
    RatioConfig rc;
    rc.dep = build_dependence(cfg);
    rc.weights = parse_weights(cfg);
    if (cfg.get("model.weights") == "window_endpoints") {
        const ModelPtr f = parse_model(cfg.get("model.f"));
        rc.window = parse_window(cfg, f);
        if (!rc.window)
            throw config_error("weights=window_endpoints needs a [window] section");
    }
    rc.x_grid = cfg.get_list("grid.x");
    for (double n : cfg.get_list("grid.n"))
        rc.n_list.push_back(static_cast<std::size_t>(n));
    rc.estimator = parse_estimator(cfg.get("experiment.estimator", "oracle"));
    rc.n_samples = cfg.get_u64("experiment.samples", 100000);
    rc.seed = cfg.get_u64("experiment.seed", 1);
    rc.tolerance = cfg.get_num("experiment.tolerance", 0.1);
    rc.threads = static_cast<int>(cfg.get_num("experiment.threads", 1));
    if (rc.x_grid.empty()) throw config_error("missing grid.x");
    if (rc.n_list.empty()) throw config_error("missing grid.n");
    return rc;
}

// ---- artifact emission ---------------------------------------------------------

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write to " + tmp);
        out << content;
        if (!out.good()) {
            out.close();
            std::remove(tmp.c_str());
            throw io_error("short write to " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw io_error("cannot rename " + tmp + " to " + path + ": " +
                       std::strerror(errno));
    }
}

void emit_report(const RatioTable& table, const std::string& path,
                 const std::string& plot_path) {
    if (table.rows.empty()) throw invalid_parameter("emit_report: empty table");
    std::string csv = "x,n,lhs,stderr,ci_lo,ci_hi,rhs,ratio,flag\n";
    for (const RatioRow& r : table.rows) {
        csv += format_double_full(r.x) + "," + std::to_string(r.n) + "," +
               format_double_full(r.lhs) + "," + format_double_full(r.std_error) +
               "," + format_double_full(r.ci_lo) + "," +
               format_double_full(r.ci_hi) + "," + format_double_full(r.rhs) +
               "," + format_double_full(r.ratio) + "," + r.flag + "\n";
    }
    write_file_atomic(path, csv);

    if (!plot_path.empty()) {
        // plain plot data: the rows of the largest n
        std::size_t n_max = 0;
        for (const auto& r : table.rows) n_max = std::max(n_max, r.n);
        std::string txt;
        for (const auto& r : table.rows)
            if (r.n == n_max)
                txt += format_double_full(r.x) + " " +
                       format_double_full(r.ratio) + "\n";
        write_file_atomic(plot_path, txt);
    }
}

// ---- pipelines -----------------------------------------------------------------

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

// truncation level for case-3 moments: the configured window when present,
// else the standard x / ln(e-1+x)
std::function<double(double)> truncation_level(const ExperimentConfig& cfg,
                                               const ModelPtr& f) {
    if (cfg.has("window.gamma")) {
        const WeightWindow w =
            weight_window(*f, cfg.require_num("window.p"),
                          cfg.require_num("window.gamma"),
                          cfg.require_num("window.gamma1"),
                          cfg.require_num("window.gamma2"));
        return [w](double x) { return w.f2(x); };
    }
    return [](double x) {
        return x <= 1.0 ? 1.0 : x / std::log(std::exp(1.0) - 1.0 + x);
    };
}

void pipeline_verify(const ExperimentConfig& cfg, const std::string& out_dir,
                     RunManifest& manifest) {
    const RatioConfig rc = build_ratio_config(cfg);
    const RatioTable table = ratio_table(rc);
    const std::string csv = join_path(out_dir, "ratio.csv");
    const std::string plot = join_path(out_dir, "ratio_plot.txt");
    emit_report(table, csv, plot);
    manifest.artifacts.push_back(csv);
    manifest.artifacts.push_back(plot);

    std::string f3 = "x,f3_n\n";
    for (const auto& [x, n] : table.f3_scan)
        f3 += format_double_full(x) + "," + std::to_string(n) + "\n";
    const std::string f3_path = join_path(out_dir, "f3_scan.csv");
    write_file_atomic(f3_path, f3);
    manifest.artifacts.push_back(f3_path);
}

void pipeline_ruin(const ExperimentConfig& cfg, const std::string& out_dir,
                   RunManifest& manifest) {
    const DependenceSpec dep = build_dependence(cfg);
    const ModelPtr g = parse_model(cfg.get("model.g"));
    const ModelPtr f = dep.f;
    if (!f) throw config_error("ruin pipeline needs model.f");
    const double alpha = f->rv_index().value_or(0.0);
    const CaseLabel label = case_classifier(*g, alpha);
    const bool conditional =
        cfg.get("experiment.estimator", "conditional") == "conditional";
    McOptions mco;
    mco.threads = static_cast<int>(cfg.get_num("experiment.threads", 1));
    const std::uint64_t samples = cfg.get_u64("experiment.samples", 100000);
    const std::uint64_t seed = cfg.get_u64("experiment.seed", 1);

    RatioTable table;
    const bool stopped = cfg.has("stopping.kind");
    StoppingTime tau = StoppingTime::deterministic(1);
    if (stopped) {
        const std::string kind = cfg.get("stopping.kind");
        if (kind == "geometric")
            tau = StoppingTime::geometric(cfg.require_num("stopping.q"));
        else if (kind == "deterministic")
            tau = StoppingTime::deterministic(
                static_cast<std::size_t>(cfg.require_num("stopping.n")));
        else
            throw config_error("unknown stopping kind '" + kind + "'");
    }

    for (double x : cfg.get_list("grid.x")) {
        for (double dn : cfg.get_list("grid.n")) {
            const std::size_t n = static_cast<std::size_t>(dn);
            RatioRow row;
            row.x = x;
            row.n = n;
            try {
                McEstimate e;
                double rhs;
                if (stopped) {
                    const WeightProcess proc = WeightProcess::product_iid(g);
                    e = stopped_tail_mc(dep, proc, tau, x, samples, seed, mco);
                    const std::size_t n_max = static_cast<std::size_t>(
                        cfg.get_num("stopping.n_max", 64.0));
                    rhs = stopped_sum_approx(*f, *g, nullptr, label, tau, x,
                                             alpha + 0.5, n_max)
                              .value;
                } else {
                    e = ruin_prob_mc(dep, g, n, x, samples, seed, conditional,
                                     mco);
                    const RuinApproxMode mode = label.label == TailCase::three
                                                    ? RuinApproxMode::rv_case3
                                                    : RuinApproxMode::rv_cases12;
                    TruncatedMoment moment{g, alpha, truncation_level(cfg, f)};
                    rhs = ruin_approx_finite(*f, g,
                                             label.label == TailCase::three
                                                 ? &moment
                                                 : nullptr,
                                             label, n, x, mode)
                              .value;
                }
                row.lhs = e.mean;
                row.std_error = e.std_error;
                row.ci_lo = e.ci_lo;
                row.ci_hi = e.ci_hi;
                row.rhs = rhs;
                row.ratio = rhs > 0.0 ? e.mean / rhs
                                      : std::numeric_limits<double>::quiet_NaN();
                if (e.rare) row.flag = "rare";
            } catch (const error&) {
                row.flag = "error";
                row.lhs = row.rhs = row.ratio =
                    std::numeric_limits<double>::quiet_NaN();
            }
            table.rows.push_back(row);
        }
    }
    const std::string csv = join_path(out_dir, "ruin.csv");
    emit_report(table, csv);
    manifest.artifacts.push_back(csv);

    if (cfg.get("experiment.infinite", "") == "true") {
        const InfiniteRuin inf_ruin =
            ruin_approx_infinite(*f, *g, cfg.get_list("grid.x").front());
        std::string txt = "factor_series,factor_closed,remainder,terms\n";
        txt += format_double_full(inf_ruin.series_factor) + "," +
               format_double_full(inf_ruin.closed_form /
                                  f->tail(cfg.get_list("grid.x").front())) +
               "," + format_double_full(inf_ruin.remainder_bound) + "," +
               std::to_string(inf_ruin.terms) + "\n";
        const std::string path = join_path(out_dir, "ruin_infinite.csv");
        write_file_atomic(path, txt);
        manifest.artifacts.push_back(path);
    }
}

void pipeline_breiman(const ExperimentConfig& cfg, const std::string& out_dir,
                      RunManifest& manifest) {
    const ModelPtr f = parse_model(cfg.get("model.f"));
    const ModelPtr g = parse_model(cfg.get("model.g"));
    const double alpha = f->rv_index().value_or(0.0);
    const CaseLabel label = case_classifier(*g, alpha);
    const WeightProcess proc = WeightProcess::product_iid(g);

    RatioTable table;
    for (double x : cfg.get_list("grid.x")) {
        for (double dn : cfg.get_list("grid.n")) {
            const std::size_t i = static_cast<std::size_t>(dn);
            RatioRow row;
            row.x = x;
            row.n = i;
            try {
                const TailValue h = random_weight_tail(*f, proc, i, x);
                TruncatedMoment moment{g, alpha, truncation_level(cfg, f)};
                row.lhs = h.value;
                row.ci_lo = row.ci_hi = h.value;
                row.rhs = breiman_tail(*f, *g, label, moment, i, x);
                row.ratio = row.rhs > 0.0
                                ? row.lhs / row.rhs
                                : std::numeric_limits<double>::quiet_NaN();
            } catch (const error&) {
                row.flag = "error";
                row.lhs = row.rhs = row.ratio =
                    std::numeric_limits<double>::quiet_NaN();
            }
            table.rows.push_back(row);
        }
    }
    const std::string csv = join_path(out_dir, "breiman.csv");
    emit_report(table, csv);
    manifest.artifacts.push_back(csv);
}

void pipeline_checks(const ExperimentConfig& cfg, const std::string& out_dir,
                     RunManifest& manifest) {
    const ModelPtr f = parse_model(cfg.get("model.f"));
    const ModelPtr g = parse_model(cfg.get("model.g"));
    const WeightWindow window =
        weight_window(*f, cfg.require_num("window.p"),
                      cfg.require_num("window.gamma"),
                      cfg.require_num("window.gamma1"),
                      cfg.require_num("window.gamma2"));
    const auto xs = cfg.get_list("grid.x");
    const auto rep =
        weight_condition_checks(*f, *g, window, window.p, xs);

    // CSV rows (x, check_id, value, verdict)
    std::string csv = "x,check_id,value,verdict\n";
    const auto verdict = [](bool ok) { return ok ? "decays" : "flat"; };
    for (const auto& row : rep.rows) {
        csv += format_double_full(row.x) + ",tail_ratio," +
               format_double_full(row.tail_ratio) + "," +
               verdict(rep.tail_ratio_decays) + "\n";
        csv += format_double_full(row.x) + ",left_tail," +
               format_double_full(row.left_tail_value) + "," +
               verdict(rep.left_tail_decays) + "\n";
        csv += format_double_full(row.x) + ",product_bound," +
               format_double_full(row.product_bound) + "," +
               verdict(rep.product_bound_decays) + "\n";
        csv += format_double_full(row.x) + ",ratio_sup," +
               format_double_full(row.ratio_sup) + "," +
               (rep.ratio_sup_max < 1.0 + 1e-9 ? "bounded" : "check") + "\n";
    }

    // truncated-moment long-tail verdict for the configured pair
    const double alpha = f->rv_index().value_or(1.0);
    TruncatedMoment moment{g, alpha,
                           [&window](double t) { return window.f2(t); }};
    const auto lt = i_long_tail_check(moment, 1.0, xs);
    csv += format_double_full(xs.back()) + ",i_in_L0," +
           format_double_full(lt.detected_step_ratio) + "," +
           (lt.in_l0 ? "true" : "false") + "\n";

    const std::string path = join_path(out_dir, "checks.csv");
    write_file_atomic(path, csv);
    manifest.artifacts.push_back(path);
}

void pipeline_tail_eval(const ExperimentConfig& cfg, const std::string& out_dir,
                        RunManifest& manifest) {
    const ModelPtr f = parse_model(cfg.get("model.f"));
    std::string csv = "x,tail,quantile_of_tail\n";
    for (double x : cfg.get_list("grid.x")) {
        const double t = f->tail(x);
        const double q = (t > 0.0 && t < 1.0) ? f->quantile(1.0 - t) : x;
        csv += format_double_full(x) + "," + format_double_full(t) + "," +
               format_double_full(q) + "\n";
    }
    const std::string path = join_path(out_dir, "tail.csv");
    write_file_atomic(path, csv);
    manifest.artifacts.push_back(path);
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.version = kVersion;
    manifest.config_digest = cfg.digest_hex();
    manifest.seed = cfg.get_u64("experiment.seed", 1);

    const std::string out_dir = cfg.get("experiment.out", ".");
    const std::string pipeline = cfg.get("experiment.pipeline", "verify");
    if (pipeline == "verify")
        pipeline_verify(cfg, out_dir, manifest);
    else if (pipeline == "ruin")
        pipeline_ruin(cfg, out_dir, manifest);
    else if (pipeline == "breiman")
        pipeline_breiman(cfg, out_dir, manifest);
    else if (pipeline == "checks")
        pipeline_checks(cfg, out_dir, manifest);
    else if (pipeline == "tail-eval")
        pipeline_tail_eval(cfg, out_dir, manifest);
    else
        throw config_error("unknown pipeline '" + pipeline + "'");

    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    nlohmann::json j;
    j["version"] = manifest.version;
    j["config_digest"] = manifest.config_digest;
    j["seed"] = manifest.seed;
    j["artifacts"] = manifest.artifacts;
    j["wall_clock_seconds"] = manifest.wall_clock_seconds;
    write_file_atomic(join_path(out_dir, "manifest.json"), j.dump(2) + "\n");
    return manifest;
}

}  // namespace heavytail

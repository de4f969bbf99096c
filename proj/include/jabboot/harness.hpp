#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "jabboot/blocks.hpp"
#include "jabboot/boot.hpp"
#include "jabboot/jab.hpp"
#include "jabboot/parallel.hpp"
#include "jabboot/rng.hpp"
#include "jabboot/series.hpp"
#include "jabboot/smooth.hpp"
#include "jabboot/tsgen.hpp"

namespace jabboot {

/// Jackknife width m = round(C n^{1/3} ell^{2/3}), clamped to [1, N-1].
/// A message is appended to `warnings` when clamping was needed.
[[nodiscard]] inline std::size_t jab_rule_m(std::size_t n, std::size_t ell, double c, std::size_t num_blocks,
                                            std::vector<std::string>* warnings = nullptr) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("jab_rule_m: C must be positive");
    }
    if (num_blocks < 2) {
        throw std::invalid_argument("jab_rule_m: need at least two blocks");
    }
    const double raw = c * std::cbrt(static_cast<double>(n)) * std::pow(static_cast<double>(ell), 2.0 / 3.0);
    const double rounded = std::round(raw);
    const auto upper = static_cast<double>(num_blocks - 1);
    if (rounded < 1.0 || rounded > upper) {
        const double clamped = std::clamp(rounded, 1.0, upper);
        if (warnings != nullptr) {
            warnings->push_back("m-rule value " + format_roundtrip(raw) + " for C=" + format_roundtrip(c) +
                                " clamped to " + format_roundtrip(clamped));
        }
        return static_cast<std::size_t>(clamped);
    }
    return static_cast<std::size_t>(rounded);
}

/// Series source for a simulation run; defaults to the built-in models.
using SeriesGenerator = std::function<TimeSeries(std::size_t n, Stream& rng)>;

struct ExperimentConfig {
    ModelSpec model;  // seed field unused; runs derive their own streams
    std::size_t n = 125;
    std::size_t ell = 5;
    BlockStyle style = BlockStyle::mbb;
    std::string functional = "mean";
    std::vector<Target> targets{Target::ecdf(0.0), Target::quantile(0.35), Target::quantile(0.80)};
    std::size_t replicates = 1000;   // K
    std::size_t runs = 500;          // R for the JAB pass
    std::size_t target_runs = 2000;  // R for the target-variance pass
    std::vector<double> c_list{0.1, 0.5, 1.0};
    JabMode mode = JabMode::reuse;
    std::size_t min_retained = 100;
    std::optional<std::size_t> ell1;  // unset: ell, or 0 when ell == 1
    std::uint64_t seed = 1;
    SeriesGenerator generator;  // test hook; overrides `model` when set
    std::string model_label;    // used in output when `generator` is set

    [[nodiscard]] std::string model_name() const {
        return generator ? (model_label.empty() ? std::string("custom") : model_label)
                         : std::string(to_string(model.kind));
    }
    [[nodiscard]] std::size_t lag_truncation() const { return ell1.value_or(ell == 1 ? 0 : ell); }
};

/// Hard errors are thrown; conditions outside the ranges covered by the
/// consistency theory come back as warnings.
[[nodiscard]] inline std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    if (cfg.runs < 2 || cfg.target_runs < 2) {
        throw std::invalid_argument("experiment: runs and target runs must be at least 2");
    }
    if (cfg.replicates < 2) {
        throw std::invalid_argument("experiment: K must be at least 2");
    }
    if (cfg.targets.empty()) {
        throw std::invalid_argument("experiment: no targets");
    }
    if (cfg.c_list.empty()) {
        throw std::invalid_argument("experiment: no m-rule constants");
    }
    const BlockScheme scheme = make_block_scheme(cfg.n, cfg.ell, cfg.style);
    if (cfg.lag_truncation() >= cfg.n) {
        throw std::invalid_argument("experiment: ell1 must be below n");
    }
    std::vector<std::string> warnings;
    const auto nd = static_cast<double>(cfg.n);
    const auto ld = static_cast<double>(cfg.ell);
    if (ld < std::pow(nd, 0.15) || ld > 2.0 * std::cbrt(nd)) {
        warnings.push_back("block length " + std::to_string(cfg.ell) + " outside [n^0.15, 2 n^(1/3)] = [" +
                           format_roundtrip(std::pow(nd, 0.15)) + ", " + format_roundtrip(2.0 * std::cbrt(nd)) +
                           "]");
    }
    for (double c : cfg.c_list) {
        const std::size_t m = jab_rule_m(cfg.n, cfg.ell, c, scheme.num_blocks, &warnings);
        if (m < cfg.ell) {
            warnings.push_back("C=" + format_roundtrip(c) + " gives m=" + std::to_string(m) +
                               " below the block length " + std::to_string(cfg.ell));
        }
    }
    return warnings;
}

namespace detail {

inline TimeSeries simulate(const ExperimentConfig& cfg, Stream& rng) {
    TimeSeries raw = cfg.generator ? cfg.generator(cfg.n, rng) : generate(cfg.model, cfg.n, rng);
    return prepare_series(raw, builtin_model(cfg.functional));
}

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace detail

struct TargetStats {
    Target target;
    double variance = 0.0;    // sample variance of phi_hat over runs, divisor R-1
    double std_error = 0.0;   // Monte Carlo standard error of `variance`
    double mean = 0.0;        // mean of phi_hat over runs
};

struct TargetVarianceResult {
    std::vector<TargetStats> stats;
    std::size_t runs = 0;
};

/// Sample variance and the delta-method standard error of a sample variance.
[[nodiscard]] inline std::tuple<double, double, double> variance_with_error(std::span<const double> x) {
    const auto r = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) {
        mean += v;
    }
    mean /= r;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double var = m2 / (r - 1.0);
    m4 /= r;
    const double pop = m2 / r;
    const double se2 = std::max(0.0, (m4 - pop * pop * (r - 3.0) / (r - 1.0)) / r);
    return {mean, var, std::sqrt(se2)};
}

/// Var(phi_hat) over `target_runs` independent series, each bootstrapped with K
/// replicates. Uses its own streams, independent of the JAB pass.
[[nodiscard]] inline TargetVarianceResult estimate_target_variance(const ExperimentConfig& cfg,
                                                                   std::size_t workers = default_workers(),
                                                                   const std::atomic<bool>* cancel = nullptr) {
    static_cast<void>(validate_config(cfg));
    const SmoothModel model = builtin_model(cfg.functional);
    const BlockScheme scheme = make_block_scheme(cfg.n, cfg.ell, cfg.style);
    const IndexSet all = IndexSet::full(scheme.num_blocks);
    const std::size_t nt = cfg.targets.size();
    std::vector<std::vector<double>> values(cfg.target_runs);
    parallel_for(
        cfg.target_runs, workers,
        [&](std::size_t r) {
            using detail::tag;
            Stream rng = Stream::from(cfg.seed, {tag(StreamTag::target_pass), r, tag(StreamTag::series)});
            const TimeSeries series = detail::simulate(cfg, rng);
            const BlockTable table(series, scheme);
            const auto ens = run_bootstrap(
                table, model, all, cfg.replicates,
                derive_key(cfg.seed, {tag(StreamTag::target_pass), r, tag(StreamTag::bootstrap)}));
            auto t = ens.t_stars();
            std::sort(t.begin(), t.end());
            std::vector<double> row(nt);
            for (std::size_t k = 0; k < nt; ++k) {
                row[k] = cfg.targets[k].evaluate_sorted(t);
            }
            values[r] = std::move(row);
        },
        cancel);
    std::size_t done = 0;
    while (done < values.size() && !values[done].empty()) {
        ++done;
    }
    if (done < 2) {
        throw std::runtime_error("target-variance pass interrupted before two runs completed");
    }
    TargetVarianceResult out;
    out.runs = done;
    std::vector<double> column(done);
    for (std::size_t k = 0; k < nt; ++k) {
        for (std::size_t r = 0; r < done; ++r) {
            column[r] = values[r][k];
        }
        const auto [mean, var, se] = variance_with_error(column);
        out.stats.push_back({cfg.targets[k], var, se, mean});
    }
    return out;
}

struct MetricsRow {
    std::string model;
    std::size_t n = 0;
    std::size_t ell = 0;
    std::string style;
    std::string functional;
    std::string target;
    double c = 0.0;
    std::size_t m = 0;
    std::size_t replicates = 0;  // K
    std::size_t runs = 0;        // R
    std::string mode;
    double target_var = 0.0;
    double jab_mean = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double mse = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Aggregate of JAB estimates against the target variance. sd uses divisor
/// R-1 and mse = bias^2 + ((R-1)/R) sd^2, which equals mean((est - target)^2).
struct Metrics {
    double mean = 0.0;
    double bias = 0.0;
    double sd = 0.0;
    double mse = 0.0;
};

[[nodiscard]] inline Metrics summarize_estimates(std::span<const double> estimates, double target_var) {
    const auto r = static_cast<double>(estimates.size());
    if (estimates.size() < 2) {
        throw std::invalid_argument("summarize_estimates: need at least two runs");
    }
    Metrics out;
    for (double e : estimates) {
        out.mean += e;
    }
    out.mean /= r;
    double ss = 0.0;
    double direct = 0.0;
    for (double e : estimates) {
        ss += (e - out.mean) * (e - out.mean);
        direct += (e - target_var) * (e - target_var);
    }
    direct /= r;
    out.bias = out.mean - target_var;
    out.sd = std::sqrt(ss / (r - 1.0));
    out.mse = out.bias * out.bias + (r - 1.0) / r * out.sd * out.sd;
    if (std::abs(out.mse - direct) > 1e-12 * std::max(direct, 1e-300)) {
        throw std::logic_error("mse self-check failed: " + format_roundtrip(out.mse) + " vs " +
                               format_roundtrip(direct));
    }
    return out;
}

struct RetentionStats {
    std::size_t min = 0;
    double median = 0.0;
    double mean_fraction = 0.0;  // retained / K averaged over runs and deletion points
};

[[nodiscard]] inline RetentionStats summarize_retention(std::vector<std::size_t> retained, std::size_t replicates) {
    RetentionStats s;
    if (retained.empty()) {
        return s;
    }
    double total = 0.0;
    for (auto v : retained) {
        total += static_cast<double>(v);
    }
    s.mean_fraction = total / (static_cast<double>(retained.size()) * static_cast<double>(replicates));
    std::sort(retained.begin(), retained.end());
    s.min = retained.front();
    const std::size_t h = retained.size() / 2;
    s.median = retained.size() % 2 == 1 ? static_cast<double>(retained[h])
                                        : 0.5 * (static_cast<double>(retained[h - 1]) + static_cast<double>(retained[h]));
    return s;
}

struct ExperimentResult {
    std::vector<MetricsRow> rows;
    std::size_t runs_completed = 0;
    std::vector<std::string> warnings;
    /// Raw JAB estimates, [c_index][target_index][run].
    std::vector<std::vector<std::vector<double>>> estimates;
    /// Reuse mode: retention per C over all runs and deletion points.
    std::vector<RetentionStats> retention;
};

/// JAB pass: for every run, a fresh series and one K-replicate ensemble; for every
/// C the JAB variance of each target; then bias/sd/mse against `target_vars`
/// (one per target, in config order). Interrupted runs are dropped and the
/// metrics cover the completed prefix.
[[nodiscard]] inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::span<const double> target_vars,
                                                     std::size_t workers = default_workers(),
                                                     const std::atomic<bool>* cancel = nullptr) {
    ExperimentResult result;
    result.warnings = validate_config(cfg);
    if (target_vars.size() != cfg.targets.size()) {
        throw std::invalid_argument("run_experiment: one target variance per target required");
    }
    const SmoothModel model = builtin_model(cfg.functional);
    const BlockScheme scheme = make_block_scheme(cfg.n, cfg.ell, cfg.style);
    const IndexSet all = IndexSet::full(scheme.num_blocks);
    std::vector<DeletionPlan> plans;
    for (double c : cfg.c_list) {
        plans.push_back(deletion_plan(scheme.num_blocks, jab_rule_m(cfg.n, cfg.ell, c, scheme.num_blocks)));
    }
    const std::size_t nc = plans.size();
    const std::size_t nt = cfg.targets.size();

    struct RunOutput {
        std::vector<double> variances;  // [c * nt + t]
        std::vector<std::vector<std::size_t>> retained;
        bool done = false;
    };
    std::vector<RunOutput> runs(cfg.runs);
    parallel_for(
        cfg.runs, workers,
        [&](std::size_t r) {
            using detail::tag;
            Stream rng = Stream::from(cfg.seed, {tag(StreamTag::jab_pass), r, tag(StreamTag::series)});
            const TimeSeries series = detail::simulate(cfg, rng);
            const BlockTable table(series, scheme);
            const auto ens = run_bootstrap(
                table, model, all, cfg.replicates,
                derive_key(cfg.seed, {tag(StreamTag::jab_pass), r, tag(StreamTag::bootstrap)}));
            RunOutput out;
            out.variances.resize(nc * nt);
            out.retained.resize(nc);
            for (std::size_t c = 0; c < nc; ++c) {
                JabOptions opt;
                opt.mode = cfg.mode;
                opt.fresh_replicates = cfg.replicates;
                opt.min_retained = cfg.min_retained;
                opt.stream_key = derive_key(
                    cfg.seed, {tag(StreamTag::jab_pass), r,
                               tag(cfg.mode == JabMode::fresh ? StreamTag::fresh : StreamTag::top_up), c});
                auto jab = run_jab(ens, table, model, plans[c], cfg.targets, opt);
                for (std::size_t t = 0; t < nt; ++t) {
                    out.variances[c * nt + t] = jab.estimates[t].variance;
                }
                out.retained[c] = std::move(jab.retained);
            }
            out.done = true;
            runs[r] = std::move(out);
        },
        cancel);

    std::size_t done = 0;
    while (done < runs.size() && runs[done].done) {
        ++done;
    }
    if (done < 2) {
        throw std::runtime_error("experiment interrupted before two runs completed");
    }
    result.runs_completed = done;
    result.estimates.assign(nc, std::vector<std::vector<double>>(nt, std::vector<double>(done)));
    for (std::size_t c = 0; c < nc; ++c) {
        std::vector<std::size_t> retained;
        for (std::size_t r = 0; r < done; ++r) {
            for (std::size_t t = 0; t < nt; ++t) {
                result.estimates[c][t][r] = runs[r].variances[c * nt + t];
            }
            retained.insert(retained.end(), runs[r].retained[c].begin(), runs[r].retained[c].end());
        }
        result.retention.push_back(summarize_retention(std::move(retained), cfg.replicates));
        for (std::size_t t = 0; t < nt; ++t) {
            const Metrics mt = summarize_estimates(result.estimates[c][t], target_vars[t]);
            MetricsRow row;
            row.model = cfg.model_name();
            row.n = cfg.n;
            row.ell = cfg.ell;
            row.style = std::string(to_string(cfg.style));
            row.functional = cfg.functional;
            row.target = cfg.targets[t].id();
            row.c = cfg.c_list[c];
            row.m = plans[c].m;
            row.replicates = cfg.replicates;
            row.runs = done;
            row.mode = std::string(to_string(cfg.mode));
            row.target_var = target_vars[t];
            row.jab_mean = mt.mean;
            row.bias = mt.bias;
            row.sd = mt.sd;
            row.mse = mt.mse;
            row.seed = cfg.seed;
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

/// Exact law of T* under uniform resampling from `allowed`, by enumerating all
/// |allowed|^b draws.
struct ExactLaw {
    std::vector<double> sorted_t;  // one entry per draw, ascending

    [[nodiscard]] double evaluate(const Target& target) const { return target.evaluate_sorted(sorted_t); }
};

inline constexpr std::uint64_t kMaxEnumeratedDraws = 1'000'000;

[[nodiscard]] inline ExactLaw enumerate_law(const BlockTable& table, const SmoothModel& model,
                                            const IndexSet& allowed) {
    const BlockScheme& scheme = table.scheme();
    double total = 1.0;
    for (std::size_t k = 0; k < scheme.b; ++k) {
        total *= static_cast<double>(allowed.size());
        if (total > static_cast<double>(kMaxEnumeratedDraws)) {
            throw std::invalid_argument("enumerate_exact: |allowed|^b exceeds 10^6 draws");
        }
    }
    const BootstrapCenter center = bootstrap_center(table, allowed, model);
    ExactLaw law;
    law.sorted_t.reserve(static_cast<std::size_t>(total));
    std::vector<std::size_t> digits(scheme.b, 0);
    BlockIndexDraw draw;
    draw.indices.resize(scheme.b);
    ReplicateWorkspace ws;
    while (true) {
        for (std::size_t k = 0; k < scheme.b; ++k) {
            draw.indices[k] = allowed[digits[k]];
        }
        law.sorted_t.push_back(replicate_statistic(table, center, model, draw, ws).t_star);
        std::size_t pos = 0;
        while (pos < scheme.b && ++digits[pos] == allowed.size()) {
            digits[pos] = 0;
            ++pos;
        }
        if (pos == scheme.b) {
            break;
        }
    }
    std::sort(law.sorted_t.begin(), law.sorted_t.end());
    return law;
}

[[nodiscard]] inline double enumerate_exact(const TimeSeries& series, const BlockScheme& scheme,
                                            const SmoothModel& model, const IndexSet& allowed, const Target& target) {
    return enumerate_law(BlockTable(series, scheme), model, allowed).evaluate(target);
}

inline constexpr std::string_view kResultsHeader =
    "model,n,ell,style,functional,target,C,m,K,R,mode,target_var,jab_mean,bias,sd,mse,seed";

[[nodiscard]] inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void sort_rows(std::vector<MetricsRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tie(a.model, a.target, a.c) < std::tie(b.model, b.target, b.c);
    });
}

inline void write_results(std::ostream& out, std::vector<MetricsRow> rows) {
    sort_rows(rows);
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        out << r.model << ',' << r.n << ',' << r.ell << ',' << r.style << ',' << r.functional << ',' << r.target
            << ',' << format_g17(r.c) << ',' << r.m << ',' << r.replicates << ',' << r.runs << ',' << r.mode << ','
            << format_g17(r.target_var) << ',' << format_g17(r.jab_mean) << ',' << format_g17(r.bias) << ','
            << format_g17(r.sd) << ',' << format_g17(r.mse) << ',' << r.seed << '\n';
    }
}

inline void write_results(const std::vector<MetricsRow>& rows, const std::string& path) {
    if (rows.empty()) {
        throw std::invalid_argument("write_results: empty table");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    write_results(out, rows);
    out.flush();
    if (!out) {
        throw std::runtime_error("error while writing " + path);
    }
}

[[nodiscard]] inline std::vector<MetricsRow> read_results(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kResultsHeader) {
        throw std::runtime_error("results file: unexpected header");
    }
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 17) {
            throw std::runtime_error("results file: expected 17 fields, got " + std::to_string(f.size()));
        }
        MetricsRow r;
        r.model = f[0];
        r.n = std::stoull(f[1]);
        r.ell = std::stoull(f[2]);
        r.style = f[3];
        r.functional = f[4];
        r.target = f[5];
        r.c = detail::parse_double(f[6], rows.size() + 2);
        r.m = std::stoull(f[7]);
        r.replicates = std::stoull(f[8]);
        r.runs = std::stoull(f[9]);
        r.mode = f[10];
        r.target_var = detail::parse_double(f[11], rows.size() + 2);
        r.jab_mean = detail::parse_double(f[12], rows.size() + 2);
        r.bias = detail::parse_double(f[13], rows.size() + 2);
        r.sd = detail::parse_double(f[14], rows.size() + 2);
        r.mse = detail::parse_double(f[15], rows.size() + 2);
        r.seed = std::stoull(f[16]);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace detail {

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = text.find(',');
        auto item = text.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) {
            out.emplace_back(item);
        }
        if (comma == std::string_view::npos) {
            return out;
        }
        text.remove_prefix(comma + 1);
    }
}

}  // namespace detail

[[nodiscard]] inline std::vector<Target> parse_targets(std::string_view text) {
    std::vector<Target> out;
    for (const auto& item : detail::split_list(text)) {
        out.push_back(parse_target(item));
    }
    return out;
}

[[nodiscard]] inline std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : detail::split_list(text)) {
        out.push_back(detail::parse_double(item, 0));
    }
    return out;
}

/// Applies one `key = value` setting, using the experiment CLI's option names.
/// Returns false for unknown keys.
inline bool apply_config_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                                 std::size_t* workers = nullptr) {
    const std::string v(value);
    if (key == "model") cfg.model.kind = parse_model_kind(v);
    else if (key == "burn-in" || key == "burn_in") cfg.model.burn_in = std::stoull(v);
    else if (key == "n") cfg.n = std::stoull(v);
    else if (key == "ell") cfg.ell = std::stoull(v);
    else if (key == "style") cfg.style = parse_block_style(v);
    else if (key == "functional") cfg.functional = std::string(builtin_model(v).name());
    else if (key == "targets") cfg.targets = parse_targets(v);
    else if (key == "K") cfg.replicates = std::stoull(v);
    else if (key == "runs") cfg.runs = std::stoull(v);
    else if (key == "target-runs" || key == "target_runs") cfg.target_runs = std::stoull(v);
    else if (key == "C") cfg.c_list = parse_double_list(v);
    else if (key == "mode") cfg.mode = parse_jab_mode(v);
    else if (key == "kmin") cfg.min_retained = std::stoull(v);
    else if (key == "ell1") cfg.ell1 = v == "auto" ? std::nullopt : std::optional<std::size_t>(std::stoull(v));
    else if (key == "seed") cfg.seed = std::stoull(v);
    else if (key == "workers") {
        if (workers != nullptr) *workers = std::stoull(v);
    } else {
        return false;
    }
    return true;
}

/// Reads `key = value` lines; '#' starts a comment.
inline void read_config(std::istream& in, ExperimentConfig& cfg, std::size_t* workers = nullptr) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!apply_config_setting(cfg, key, value, workers)) {
            throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace jabboot

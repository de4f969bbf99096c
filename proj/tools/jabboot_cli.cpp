// Command-line front end: series generation, bootstrap and JAB on a CSV
// series, the full simulation experiment, and the enumeration oracle.
// Block indices are 1-based in every external format.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jabboot/jabboot.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace jabboot;

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

struct SeriesArgs {
    std::string input;
    bool header = false;
    std::size_t ell = 5;
    std::string style = "mbb";
    std::string functional = "mean";
    std::uint64_t seed = 1;
};

void add_series_options(CLI::App& cmd, SeriesArgs& a) {
    cmd.add_option("--input", a.input, "Series CSV, one row per time point")->required();
    cmd.add_flag("--header", a.header, "Skip one header line");
    cmd.add_option("--ell", a.ell, "Block length")->check(CLI::PositiveNumber);
    cmd.add_option("--style", a.style, "Block style")->check(CLI::IsMember({"mbb", "nbb", "cbb"}));
    cmd.add_option("--functional", a.functional, "Smooth functional")
        ->check(CLI::IsMember({"mean", "variance", "ratio"}));
    cmd.add_option("--seed", a.seed, "Master seed");
}

struct LoadedSeries {
    SmoothModel model;
    TimeSeries series;
    BlockScheme scheme;
};

LoadedSeries load(const SeriesArgs& a) {
    SmoothModel model = builtin_model(a.functional);
    TimeSeries series = prepare_series(read_series_csv(a.input, a.header), model);
    require_bootstrappable(series);
    BlockScheme scheme = make_block_scheme(series.size(), a.ell, parse_block_style(a.style));
    return {std::move(model), std::move(series), scheme};
}

json scheme_json(const BlockScheme& s) {
    return {{"n", s.n}, {"ell", s.ell}, {"style", std::string(to_string(s.style))}, {"N", s.num_blocks},
            {"b", s.b},  {"n1", s.n1}};
}

std::vector<double> sorted_t(const BootstrapEnsemble& ens) {
    auto t = ens.t_stars();
    std::sort(t.begin(), t.end());
    return t;
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_generate(const std::string& model, std::size_t n, std::uint64_t seed, std::size_t burn_in,
                 const std::string& out) {
    const ModelSpec spec{parse_model_kind(model), burn_in, seed};
    const TimeSeries x = generate(spec, n);
    if (out.empty() || out == "-") {
        write_series_csv(std::cout, x);
    } else {
        std::ofstream file(out, std::ios::binary | std::ios::trunc);
        if (!file) {
            throw std::runtime_error("cannot open " + out + " for writing");
        }
        write_series_csv(file, x);
    }
    return 0;
}

int cmd_bootstrap(const SeriesArgs& a, std::size_t replicates, const std::vector<double>& x0s,
                  const std::vector<double>& alphas, const std::string& ell1_text) {
    const auto [model, series, scheme] = load(a);
    const std::size_t ell1 = ell1_text == "auto" ? (scheme.ell == 1 ? 0 : scheme.ell) : std::stoull(ell1_text);
    const auto ens = run_bootstrap(series, scheme, model, IndexSet::full(scheme.num_blocks), replicates,
                                   derive_key(a.seed, {static_cast<std::uint64_t>(StreamTag::bootstrap)}));
    const auto t = sorted_t(ens);
    json phi1 = json::array();
    for (double x0 : x0s) phi1.push_back({{"x0", x0}, {"value", Target::ecdf(x0).evaluate_sorted(t)}});
    json phi2 = json::array();
    for (double al : alphas) phi2.push_back({{"alpha", al}, {"value", Target::quantile(al).evaluate_sorted(t)}});
    const auto lw = lag_window_tau2(series, model, ell1);
    emit({{"phi1n", phi1},
          {"phi2n", phi2},
          {"K", replicates},
          {"scheme", scheme_json(scheme)},
          {"functional", a.functional},
          {"theta_hat", model.value(series.mean())},
          {"theta_tilde", ens.center.theta_tilde},
          {"tau_hat", std::sqrt(lw.tau2)},
          {"ell1", ell1},
          {"seed", a.seed}});
    return 0;
}

int cmd_jab(const SeriesArgs& a, std::size_t replicates, const std::string& m_text, double c,
            const std::string& target_text, const std::string& mode_text, std::size_t kmin) {
    const auto [model, series, scheme] = load(a);
    std::vector<std::string> warnings;
    const std::size_t m = m_text == "auto" ? jab_rule_m(series.size(), scheme.ell, c, scheme.num_blocks, &warnings)
                                           : std::stoull(m_text);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    const DeletionPlan plan = deletion_plan(scheme.num_blocks, m);
    const Target target = parse_target(target_text);
    const BlockTable table(series, scheme);
    using T = StreamTag;
    const auto ens = run_bootstrap(table, model, IndexSet::full(scheme.num_blocks), replicates,
                                   derive_key(a.seed, {static_cast<std::uint64_t>(T::bootstrap)}));
    JabOptions opt;
    opt.mode = parse_jab_mode(mode_text);
    opt.fresh_replicates = replicates;
    opt.min_retained = kmin;
    opt.stream_key =
        derive_key(a.seed, {static_cast<std::uint64_t>(opt.mode == JabMode::fresh ? T::fresh : T::top_up)});
    const auto res = run_jab(ens, table, model, plan, std::span(&target, 1), opt);
    const auto& est = res.estimates.front();
    json out{{"target", target.id()},
             {"phi_hat", est.phi_hat},
             {"var_jab", est.variance},
             {"m", plan.m},
             {"M", plan.num_points},
             {"N", plan.num_blocks},
             {"mode", std::string(to_string(opt.mode))}};
    if (opt.mode == JabMode::reuse) {
        const auto stats = summarize_retention(res.retained, replicates);
        std::size_t topped = 0;
        for (auto v : res.topped_up) topped += v;
        out["retained_min"] = stats.min;
        out["retained_median"] = stats.median;
        out["kmin"] = kmin;
        out["topped_up_total"] = topped;
    }
    out["K"] = replicates;
    out["point_values"] = est.point_values;  // i = 1..M
    out["seed"] = a.seed;
    emit(out);
    return 0;
}

int cmd_oracle(const SeriesArgs& a, const std::vector<std::size_t>& allowed_1based, const std::vector<double>& x0s,
               const std::vector<double>& alphas) {
    const auto [model, series, scheme] = load(a);
    IndexSet allowed = IndexSet::full(scheme.num_blocks);
    if (!allowed_1based.empty()) {
        std::vector<std::uint32_t> members;
        for (auto j : allowed_1based) {
            if (j < 1 || j > scheme.num_blocks) {
                throw std::invalid_argument("--allowed: block index " + std::to_string(j) + " outside 1.." +
                                            std::to_string(scheme.num_blocks));
            }
            members.push_back(static_cast<std::uint32_t>(j - 1));
        }
        allowed = IndexSet::of(scheme.num_blocks, members);
    }
    const auto law = enumerate_law(BlockTable(series, scheme), model, allowed);
    json phi1 = json::array();
    for (double x0 : x0s) phi1.push_back({{"x0", x0}, {"value", law.evaluate(Target::ecdf(x0))}});
    json phi2 = json::array();
    for (double al : alphas) phi2.push_back({{"alpha", al}, {"value", law.evaluate(Target::quantile(al))}});
    std::vector<std::size_t> external;
    for (auto j : allowed.members()) external.push_back(j + 1);
    emit({{"phi1n", phi1},
          {"phi2n", phi2},
          {"draws", law.sorted_t.size()},
          {"allowed", external},
          {"scheme", scheme_json(scheme)}});
    return 0;
}

int cmd_experiment(ExperimentConfig cfg, std::size_t workers, const std::vector<double>& supplied_vars,
                   const std::string& out) {
    for (const auto& w : validate_config(cfg)) std::cerr << "warning: " << w << '\n';
    std::signal(SIGINT, on_sigint);
    std::vector<double> target_vars = supplied_vars;
    if (target_vars.empty()) {
        std::cerr << "target-variance pass: " << cfg.target_runs << " runs\n";
        const auto tv = estimate_target_variance(cfg, workers, &g_interrupted);
        for (const auto& s : tv.stats) {
            std::cerr << "  " << s.target.id() << ": Var = " << format_g17(s.variance) << " (se "
                      << format_g17(s.std_error) << ", " << tv.runs << " runs)\n";
            target_vars.push_back(s.variance);
        }
    } else if (target_vars.size() != cfg.targets.size()) {
        throw std::invalid_argument("--target-vars: one value per target required");
    }
    std::cerr << "JAB pass: " << cfg.runs << " runs\n";
    const auto res = run_experiment(cfg, target_vars, workers, &g_interrupted);
    if (g_interrupted.load()) {
        std::cerr << "interrupted: writing metrics over " << res.runs_completed << " completed runs\n";
    }
    if (out.empty() || out == "-") {
        write_results(std::cout, res.rows);
    } else {
        write_results(res.rows, out);
    }
    if (cfg.mode == JabMode::reuse) {
        for (std::size_t c = 0; c < cfg.c_list.size(); ++c) {
            const auto& r = res.retention[c];
            std::cerr << "  C=" << format_roundtrip(cfg.c_list[c]) << ": retained min " << r.min << ", median "
                      << r.median << ", mean fraction " << r.mean_fraction << '\n';
        }
    }
    return g_interrupted.load() ? 130 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Block bootstrap and jackknife-after-bootstrap variance estimation"};
    app.require_subcommand(1);

    // generate
    std::string gen_model = "II";
    std::size_t gen_n = 125;
    std::uint64_t gen_seed = 1;
    std::size_t gen_burn = 500;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Simulate a series from a built-in model");
    gen->add_option("--model", gen_model, "I|II|III|IV|iid");
    gen->add_option("--n", gen_n, "Length")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_option("--burn-in", gen_burn, "Discarded warm-up for recursive models");
    gen->add_option("--out", gen_out, "Output CSV (default stdout)");

    // bootstrap
    SeriesArgs boot_args;
    std::size_t boot_k = 1000;
    std::vector<double> boot_x0{0.0};
    std::vector<double> boot_alpha{0.35, 0.80};
    std::string boot_ell1 = "auto";
    auto* boot = app.add_subcommand("bootstrap", "Bootstrap distribution function and quantiles of T*");
    add_series_options(*boot, boot_args);
    boot->add_option("--K", boot_k, "Bootstrap replicates")->check(CLI::PositiveNumber);
    boot->add_option("--x0", boot_x0, "ecdf arguments")->delimiter(',');
    boot->add_option("--alpha", boot_alpha, "Quantile levels")->delimiter(',');
    boot->add_option("--ell1", boot_ell1, "Lag-window truncation for tau_hat: auto (= ell, or 0 when ell = 1) or INT");

    // jab
    SeriesArgs jab_args;
    std::size_t jab_k = 1000;
    std::string jab_m = "auto";
    double jab_c = 0.1;
    std::string jab_target = "ecdf:0";
    std::string jab_mode = "reuse";
    std::size_t jab_kmin = 100;
    auto* jab = app.add_subcommand("jab", "Jackknife-after-bootstrap variance of one bootstrap target");
    add_series_options(*jab, jab_args);
    jab->add_option("--K", jab_k, "Bootstrap replicates")->check(CLI::PositiveNumber);
    jab->add_option("--m", jab_m, "Deleted blocks per point: INT or auto");
    jab->add_option("--C", jab_c, "Constant of the m rule when --m auto");
    jab->add_option("--target", jab_target, "ecdf:X or quantile:A");
    jab->add_option("--mode", jab_mode, "reuse|fresh")->check(CLI::IsMember({"reuse", "fresh"}));
    jab->add_option("--kmin", jab_kmin, "Reuse mode: minimum retained replicates before top-up");

    // experiment
    ExperimentConfig cfg;
    std::string exp_config;
    std::string exp_model = "II";
    std::string exp_style = "mbb";
    std::string exp_targets = "ecdf:0,quantile:0.35,quantile:0.80";
    std::string exp_c = "0.1,0.5,1.0";
    std::string exp_mode = "reuse";
    std::string exp_ell1 = "auto";
    std::string exp_vars;
    std::string exp_out;
    std::size_t workers = default_workers();
    auto* exp = app.add_subcommand("experiment", "Target-variance and JAB simulation passes, CSV metrics");
    exp->add_option("--config", exp_config, "key = value file; command-line options override it");
    exp->add_option("--model", exp_model, "I|II|III|IV|iid");
    exp->add_option("--burn-in", cfg.model.burn_in, "Discarded warm-up for recursive models");
    exp->add_option("--n", cfg.n, "Series length");
    exp->add_option("--ell", cfg.ell, "Block length");
    exp->add_option("--style", exp_style, "mbb|nbb|cbb");
    exp->add_option("--functional", cfg.functional, "mean|variance|ratio");
    exp->add_option("--targets", exp_targets, "Comma-separated targets");
    exp->add_option("--C", exp_c, "Comma-separated m-rule constants");
    exp->add_option("--K", cfg.replicates, "Bootstrap replicates");
    exp->add_option("--runs", cfg.runs, "JAB-pass runs");
    exp->add_option("--target-runs", cfg.target_runs, "Target-variance runs");
    exp->add_option("--target-vars", exp_vars, "Skip the target pass and use these variances");
    exp->add_option("--mode", exp_mode, "reuse|fresh");
    exp->add_option("--kmin", cfg.min_retained, "Reuse mode: minimum retained replicates");
    exp->add_option("--ell1", exp_ell1, "auto or INT");
    exp->add_option("--seed", cfg.seed, "Master seed");
    exp->add_option("--workers", workers, "Worker threads");
    exp->add_option("--out", exp_out, "Output CSV (default stdout)");

    // oracle
    SeriesArgs orc_args;
    std::vector<std::size_t> orc_allowed;
    std::vector<double> orc_x0{0.0};
    std::vector<double> orc_alpha{0.35, 0.80};
    auto* orc = app.add_subcommand("oracle", "Exact bootstrap law by enumerating every draw (tiny inputs)");
    add_series_options(*orc, orc_args);
    orc->add_option("--allowed", orc_allowed, "1-based block indices to resample from (default all)")
        ->delimiter(',');
    orc->add_option("--x0", orc_x0, "ecdf arguments")->delimiter(',');
    orc->add_option("--alpha", orc_alpha, "Quantile levels")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_generate(gen_model, gen_n, gen_seed, gen_burn, gen_out);
        }
        if (boot->parsed()) {
            return cmd_bootstrap(boot_args, boot_k, boot_x0, boot_alpha, boot_ell1);
        }
        if (jab->parsed()) {
            return cmd_jab(jab_args, jab_k, jab_m, jab_c, jab_target, jab_mode, jab_kmin);
        }
        if (orc->parsed()) {
            return cmd_oracle(orc_args, orc_allowed, orc_x0, orc_alpha);
        }
        if (exp->parsed()) {
            // File settings first, then explicit command-line options on top.
            ExperimentConfig merged;
            if (!exp_config.empty()) {
                std::ifstream in(exp_config);
                if (!in) {
                    throw std::runtime_error("cannot open config " + exp_config);
                }
                read_config(in, merged, &workers);
            }
            auto given = [&](const char* name) { return exp->get_option(name)->count() > 0; };
            if (given("--model") || exp_config.empty()) apply_config_setting(merged, "model", exp_model);
            if (given("--burn-in")) merged.model.burn_in = cfg.model.burn_in;
            if (given("--n")) merged.n = cfg.n;
            if (given("--ell")) merged.ell = cfg.ell;
            if (given("--style")) apply_config_setting(merged, "style", exp_style);
            if (given("--functional")) apply_config_setting(merged, "functional", cfg.functional);
            if (given("--targets")) apply_config_setting(merged, "targets", exp_targets);
            if (given("--C")) apply_config_setting(merged, "C", exp_c);
            if (given("--K")) merged.replicates = cfg.replicates;
            if (given("--runs")) merged.runs = cfg.runs;
            if (given("--target-runs")) merged.target_runs = cfg.target_runs;
            if (given("--mode")) apply_config_setting(merged, "mode", exp_mode);
            if (given("--kmin")) merged.min_retained = cfg.min_retained;
            if (given("--ell1")) apply_config_setting(merged, "ell1", exp_ell1);
            if (given("--seed")) merged.seed = cfg.seed;
            return cmd_experiment(std::move(merged), workers, exp_vars.empty() ? std::vector<double>{}
                                                                                 : parse_double_list(exp_vars),
                                  exp_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

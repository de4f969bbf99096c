#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jabboot/blocks.hpp"
#include "jabboot/boot.hpp"
#include "jabboot/rng.hpp"
#include "jabboot/series.hpp"
#include "jabboot/smooth.hpp"

namespace jabboot {

/// Deletion windows over the block pool: for i = 1..M the reduced pool is
/// I_i = {1..N} \ {i..i+m-1}, with M = N - m + 1 and no wraparound.
struct DeletionPlan {
    std::size_t num_blocks = 0;  // N
    std::size_t m = 0;
    std::size_t num_points = 0;  // M

    /// Reduced pool for deletion point i (0-based).
    [[nodiscard]] IndexSet window(std::size_t i) const {
        if (i >= num_points) {
            throw std::out_of_range("deletion point out of range");
        }
        return IndexSet::without_window(num_blocks, i, m);
    }
};

[[nodiscard]] inline DeletionPlan deletion_plan(std::size_t num_blocks, std::size_t m) {
    if (num_blocks < 2 || m < 1 || m > num_blocks - 1) {
        throw std::invalid_argument("deletion_plan: m must lie in [1, N-1] (N=" + std::to_string(num_blocks) +
                                    ", m=" + std::to_string(m) + ")");
    }
    return DeletionPlan{num_blocks, m, num_blocks - m + 1};
}

enum class JabMode { reuse, fresh };

[[nodiscard]] inline std::string_view to_string(JabMode mode) noexcept {
    return mode == JabMode::reuse ? "reuse" : "fresh";
}

[[nodiscard]] inline JabMode parse_jab_mode(std::string_view text) {
    if (text == "reuse") return JabMode::reuse;
    if (text == "fresh") return JabMode::fresh;
    throw std::invalid_argument("unknown JAB mode '" + std::string(text) + "' (expected reuse|fresh)");
}

struct JabEstimate {
    double phi_hat = 0.0;
    std::vector<double> point_values;
    std::vector<double> pseudo_values;
    double variance = 0.0;
    JabMode mode = JabMode::reuse;
};

/// phi~(i) = m^{-1}(N phi_hat - (N - m) phi(i)).
[[nodiscard]] inline std::vector<double> pseudo_values(const DeletionPlan& plan, double phi_hat,
                                                       std::span<const double> point_values) {
    if (point_values.size() != plan.num_points) {
        throw std::invalid_argument("pseudo_values: expected " + std::to_string(plan.num_points) +
                                    " point values, got " + std::to_string(point_values.size()));
    }
    const auto big_n = static_cast<double>(plan.num_blocks);
    const auto m = static_cast<double>(plan.m);
    std::vector<double> out;
    out.reserve(point_values.size());
    for (double v : point_values) {
        out.push_back((big_n * phi_hat - (big_n - m) * v) / m);
    }
    return out;
}

/// Var_JAB = (m/(N-m)) M^{-1} sum_i (phi~(i) - phi_hat)^2.
[[nodiscard]] inline JabEstimate jab_variance(const DeletionPlan& plan, double phi_hat,
                                              std::span<const double> point_values,
                                              JabMode mode = JabMode::reuse) {
    JabEstimate est;
    est.phi_hat = phi_hat;
    est.mode = mode;
    est.point_values.assign(point_values.begin(), point_values.end());
    est.pseudo_values = pseudo_values(plan, phi_hat, point_values);
    // phi~(i) - phi_hat = ((N - m)/m)(phi_hat - phi(i)); this form is exactly
    // zero when every point value equals phi_hat.
    const auto big_n = static_cast<double>(plan.num_blocks);
    const auto m = static_cast<double>(plan.m);
    const double ratio = (big_n - m) / m;
    double acc = 0.0;
    for (double v : point_values) {
        const double dev = ratio * (phi_hat - v);
        acc += dev * dev;
    }
    est.variance = m / (big_n - m) * acc / static_cast<double>(plan.num_points);
    return est;
}

/// Block jackknife variance of a statistic computed on the series with one
/// length-ell block of observations removed at a time (N = n - ell + 1 deletions).
/// With ell = 1 this is the ordinary delete-1 jackknife.
[[nodiscard]] inline double block_jackknife_variance(const TimeSeries& series,
                                                     const std::function<double(const TimeSeries&)>& statistic,
                                                     std::size_t ell) {
    const std::size_t n = series.size();
    if (ell < 1 || ell >= n) {
        throw std::invalid_argument("block_jackknife_variance: block length must lie in [1, n-1]");
    }
    const std::size_t d = series.dim();
    const std::size_t num_blocks = n - ell + 1;
    const double full = statistic(series);
    const auto nd = static_cast<double>(n);
    const auto ld = static_cast<double>(ell);
    const auto data = series.flat();
    double acc = 0.0;
    std::vector<double> kept;
    kept.reserve((n - ell) * d);
    for (std::size_t i = 0; i < num_blocks; ++i) {
        kept.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(i * d));
        kept.insert(kept.end(), data.begin() + static_cast<std::ptrdiff_t>((i + ell) * d), data.end());
        const double deleted = statistic(TimeSeries(kept, d));
        const double pseudo = (nd * full - (nd - ld) * deleted) / ld;
        acc += (pseudo - full) * (pseudo - full);
    }
    return ld / (nd - ld) * acc / static_cast<double>(num_blocks);
}

/// Sorted copies of each replicate's block indices, for fast retention tests.
class RetentionIndex {
public:
    explicit RetentionIndex(const BootstrapEnsemble& ensemble) : b_(ensemble.scheme.b) {
        sorted_.reserve(ensemble.size() * b_);
        for (const auto& rep : ensemble.replicates) {
            const auto first = sorted_.end() - sorted_.begin();
            sorted_.insert(sorted_.end(), rep.draw.indices.begin(), rep.draw.indices.end());
            std::sort(sorted_.begin() + first, sorted_.end());
        }
    }

    /// True when none of replicate k's blocks fall in [start, start + width).
    [[nodiscard]] bool retained(std::size_t k, std::size_t start, std::size_t width) const noexcept {
        const auto first = sorted_.begin() + static_cast<std::ptrdiff_t>(k * b_);
        const auto last = first + static_cast<std::ptrdiff_t>(b_);
        const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(start));
        return it == last || *it >= start + width;
    }

private:
    std::size_t b_;
    std::vector<std::uint32_t> sorted_;
};

struct DeletionDraw {
    std::vector<double> sorted_t;  // T*(i) values, ascending
    std::size_t retained = 0;      // reuse mode: replicates kept from the ensemble
    std::size_t topped_up = 0;     // reuse mode: fresh replicates added to reach the floor
};

/// T*(i) from K fresh draws uniform on I_i, recentered on I_i.
/// Replicate k of deletion point i uses derive_key(stream_key, {i, k}).
[[nodiscard]] inline DeletionDraw deletion_draw_fresh(const BlockTable& table, const SmoothModel& model,
                                                      const DeletionPlan& plan, std::size_t i, std::size_t replicates,
                                                      std::uint64_t stream_key) {
    if (replicates < 1) {
        throw std::invalid_argument("fresh JAB: K must be at least 1");
    }
    const IndexSet allowed = plan.window(i);
    const BootstrapCenter center = bootstrap_center(table, allowed, model);
    DeletionDraw out;
    out.sorted_t.reserve(replicates);
    ReplicateWorkspace ws;
    for (std::size_t k = 0; k < replicates; ++k) {
        Stream rng = Stream::from(stream_key, {i, k});
        out.sorted_t.push_back(
            replicate_statistic(table, center, model, draw_block_indices(table.scheme(), allowed, rng), ws).t_star);
    }
    std::sort(out.sorted_t.begin(), out.sorted_t.end());
    return out;
}

/// T*(i) from the ensemble replicates whose blocks all lie in I_i, each
/// restudentized around the I_i center. Conditional on retention those draws are
/// i.i.d. uniform on I_i. When fewer than `min_retained` survive, fresh draws on
/// I_i (stream derive_key(stream_key, {i, j})) fill the gap.
[[nodiscard]] inline DeletionDraw deletion_draw_reuse(const BootstrapEnsemble& ensemble,
                                                      const RetentionIndex& retention, const BlockTable& table,
                                                      const SmoothModel& model, const DeletionPlan& plan,
                                                      std::size_t i, std::size_t min_retained,
                                                      std::uint64_t stream_key) {
    const IndexSet allowed = plan.window(i);
    const BootstrapCenter center = bootstrap_center(table, allowed, model);
    const BlockScheme& scheme = table.scheme();
    DeletionDraw out;
    out.sorted_t.reserve(std::max(ensemble.size(), min_retained));
    for (std::size_t k = 0; k < ensemble.size(); ++k) {
        if (retention.retained(k, i, plan.m)) {
            const auto& rep = ensemble.replicates[k];
            out.sorted_t.push_back(studentize(rep.theta_star, rep.tau_star, center.theta_tilde, scheme));
        }
    }
    out.retained = out.sorted_t.size();
    ReplicateWorkspace ws;
    for (std::size_t j = 0; out.sorted_t.size() < min_retained; ++j) {
        Stream rng = Stream::from(stream_key, {i, j});
        out.sorted_t.push_back(
            replicate_statistic(table, center, model, draw_block_indices(scheme, allowed, rng), ws).t_star);
        ++out.topped_up;
    }
    std::sort(out.sorted_t.begin(), out.sorted_t.end());
    return out;
}

struct JabOptions {
    JabMode mode = JabMode::reuse;
    std::size_t fresh_replicates = 1000;  // K per deletion point in fresh mode
    std::size_t min_retained = 100;       // reuse-mode floor
    std::uint64_t stream_key = 0;
};

struct JabResult {
    std::vector<JabEstimate> estimates;  // one per target
    std::vector<std::size_t> retained;   // reuse mode: per deletion point
    std::vector<std::size_t> topped_up;  // reuse mode: per deletion point
};

/// Full JAB over all M deletion points for several targets at once; the
/// deletion draws are shared between targets.
[[nodiscard]] inline JabResult run_jab(const BootstrapEnsemble& ensemble, const BlockTable& table,
                                       const SmoothModel& model, const DeletionPlan& plan,
                                       std::span<const Target> targets, const JabOptions& options) {
    if (plan.num_blocks != table.size()) {
        throw std::invalid_argument("run_jab: deletion plan does not match the block scheme");
    }
    std::vector<double> full = ensemble.t_stars();
    std::sort(full.begin(), full.end());
    std::vector<std::vector<double>> points(targets.size(), std::vector<double>(plan.num_points));
    JabResult result;
    std::optional<RetentionIndex> retention;
    if (options.mode == JabMode::reuse) {
        retention.emplace(ensemble);
        result.retained.resize(plan.num_points);
        result.topped_up.resize(plan.num_points);
    }
    for (std::size_t i = 0; i < plan.num_points; ++i) {
        const DeletionDraw draw =
            options.mode == JabMode::reuse
                ? deletion_draw_reuse(ensemble, *retention, table, model, plan, i, options.min_retained,
                                      options.stream_key)
                : deletion_draw_fresh(table, model, plan, i, options.fresh_replicates, options.stream_key);
        if (options.mode == JabMode::reuse) {
            result.retained[i] = draw.retained;
            result.topped_up[i] = draw.topped_up;
        }
        for (std::size_t t = 0; t < targets.size(); ++t) {
            points[t][i] = targets[t].evaluate_sorted(draw.sorted_t);
        }
    }
    result.estimates.reserve(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        result.estimates.push_back(jab_variance(plan, targets[t].evaluate_sorted(full), points[t], options.mode));
    }
    return result;
}

/// Single point value phi(i) = phi(G_{n,i}) from fresh draws.
[[nodiscard]] inline double jab_point_value_fresh(const TimeSeries& series, const BlockScheme& scheme,
                                                  const SmoothModel& model, const DeletionPlan& plan, std::size_t i,
                                                  const Target& target, std::size_t replicates,
                                                  std::uint64_t stream_key) {
    const BlockTable table(series, scheme);
    return target.evaluate_sorted(deletion_draw_fresh(table, model, plan, i, replicates, stream_key).sorted_t);
}

/// Single point value phi(i) from retained ensemble replicates. `retained`
/// receives the number of ensemble replicates kept.
[[nodiscard]] inline double jab_point_value_reuse(const BootstrapEnsemble& ensemble, const TimeSeries& series,
                                                  const SmoothModel& model, const DeletionPlan& plan, std::size_t i,
                                                  const Target& target, std::size_t min_retained,
                                                  std::uint64_t stream_key, std::size_t* retained = nullptr) {
    const BlockTable table(series, ensemble.scheme);
    const RetentionIndex index(ensemble);
    const auto draw = deletion_draw_reuse(ensemble, index, table, model, plan, i, min_retained, stream_key);
    if (retained != nullptr) {
        *retained = draw.retained;
    }
    return target.evaluate_sorted(draw.sorted_t);
}

}  // namespace jabboot

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "jabboot/blocks.hpp"
#include "jabboot/rng.hpp"
#include "jabboot/series.hpp"
#include "jabboot/smooth.hpp"

namespace jabboot {

/// Centering for the bootstrap statistic: mu_hat = E_* Xbar* under uniform block
/// selection from the allowed set, theta_tilde = H(mu_hat).
struct BootstrapCenter {
    std::vector<double> mu_hat;
    double theta_tilde = 0.0;
};

[[nodiscard]] inline BootstrapCenter bootstrap_center(const BlockTable& table, const IndexSet& allowed,
                                                      const SmoothModel& model) {
    if (allowed.universe() != table.size()) {
        throw std::invalid_argument("bootstrap_center: index set does not match the block table");
    }
    BootstrapCenter c;
    c.mu_hat.assign(table.dim(), 0.0);
    const auto first = table.sum(allowed[0]);
    bool identical = true;
    for (auto j : allowed.members()) {
        const auto s = table.sum(j);
        for (std::size_t k = 0; k < s.size(); ++k) {
            c.mu_hat[k] += s[k];
            identical = identical && s[k] == first[k];
        }
    }
    const auto ell = static_cast<double>(table.scheme().ell);
    for (std::size_t k = 0; k < c.mu_hat.size(); ++k) {
        // Identical blocks take the same rounding path as replicate_statistic,
        // so a constant series gives theta* == theta_tilde exactly.
        c.mu_hat[k] = identical ? first[k] / ell : c.mu_hat[k] / (static_cast<double>(allowed.size()) * ell);
    }
    c.theta_tilde = model.value(c.mu_hat);
    return c;
}

[[nodiscard]] inline BootstrapCenter bootstrap_center(const TimeSeries& series, const BlockScheme& scheme,
                                                      const IndexSet& allowed, const SmoothModel& model) {
    return bootstrap_center(BlockTable(series, scheme), allowed, model);
}

struct BootstrapReplicate {
    BlockIndexDraw draw;
    double t_star = 0.0;
    double theta_star = 0.0;
    double tau_star = 0.0;
};

/// T* for a stored replicate under a (possibly different) center. Only the
/// centering term depends on the center; theta* and tau* are properties of the draw.
[[nodiscard]] inline double studentize(double theta_star, double tau_star, double theta_tilde,
                                       const BlockScheme& scheme) noexcept {
    return std::sqrt(static_cast<double>(scheme.n1)) * (theta_star - theta_tilde) /
           (tau_star + 1.0 / static_cast<double>(scheme.n));
}

/// Reusable per-thread buffers for replicate_statistic.
struct ReplicateWorkspace {
    std::vector<double> mean;
    std::vector<double> grad;
};

/// theta* = H(Xbar*), tau*^2 = (1/(ell b)) sum_i {h(Xbar*)'(S_i* - ell Xbar*)}^2 and
/// T* = sqrt(n1)(theta* - theta_tilde)/(tau* + 1/n), with n the original length.
[[nodiscard]] inline BootstrapReplicate replicate_statistic(const BlockTable& table, const BootstrapCenter& center,
                                                            const SmoothModel& model, BlockIndexDraw draw,
                                                            ReplicateWorkspace& ws) {
    const BlockScheme& scheme = table.scheme();
    check_draw(scheme, draw);
    const std::size_t d = table.dim();
    const auto ell = static_cast<double>(scheme.ell);
    ws.mean.assign(d, 0.0);
    ws.grad.resize(d);
    const auto first = table.sum(draw.indices.front());
    bool identical = true;
    for (auto j : draw.indices) {
        const auto s = table.sum(j);
        for (std::size_t k = 0; k < d; ++k) {
            ws.mean[k] += s[k];
            identical = identical && s[k] == first[k];
        }
    }
    for (std::size_t k = 0; k < d; ++k) {
        ws.mean[k] = identical ? first[k] / ell : ws.mean[k] / static_cast<double>(scheme.n1);
    }
    BootstrapReplicate rep;
    rep.theta_star = model.value(ws.mean);
    model.gradient(ws.mean, ws.grad);
    double acc = 0.0;
    for (auto j : draw.indices) {
        const auto s = table.sum(j);
        double proj = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            proj += ws.grad[k] * (s[k] - ell * ws.mean[k]);
        }
        acc += proj * proj;
    }
    rep.tau_star = std::sqrt(acc / (ell * static_cast<double>(scheme.b)));
    rep.t_star = studentize(rep.theta_star, rep.tau_star, center.theta_tilde, scheme);
    rep.draw = std::move(draw);
    return rep;
}

[[nodiscard]] inline BootstrapReplicate replicate_statistic(const BlockTable& table, const BootstrapCenter& center,
                                                            const SmoothModel& model, BlockIndexDraw draw) {
    ReplicateWorkspace ws;
    return replicate_statistic(table, center, model, std::move(draw), ws);
}

[[nodiscard]] inline BootstrapReplicate replicate_statistic(const TimeSeries& series, const BlockScheme& scheme,
                                                            const BootstrapCenter& center, const SmoothModel& model,
                                                            BlockIndexDraw draw) {
    return replicate_statistic(BlockTable(series, scheme), center, model, std::move(draw));
}

struct BootstrapEnsemble {
    std::vector<BootstrapReplicate> replicates;
    BootstrapCenter center;
    BlockScheme scheme;

    [[nodiscard]] std::size_t size() const noexcept { return replicates.size(); }

    [[nodiscard]] std::vector<double> t_stars() const {
        std::vector<double> t;
        t.reserve(replicates.size());
        for (const auto& r : replicates) {
            t.push_back(r.t_star);
        }
        return t;
    }
};

/// K replicates drawn uniformly from `allowed`. Replicate k uses the stream
/// derive_key(stream_key, {k}), so the ensemble does not depend on evaluation order.
[[nodiscard]] inline BootstrapEnsemble run_bootstrap(const BlockTable& table, const SmoothModel& model,
                                                     const IndexSet& allowed, std::size_t replicates,
                                                     std::uint64_t stream_key) {
    if (replicates < 1) {
        throw std::invalid_argument("run_bootstrap: K must be at least 1");
    }
    BootstrapEnsemble ens;
    ens.scheme = table.scheme();
    ens.center = bootstrap_center(table, allowed, model);
    ens.replicates.reserve(replicates);
    ReplicateWorkspace ws;
    for (std::size_t k = 0; k < replicates; ++k) {
        Stream rng = Stream::from(stream_key, {k});
        ens.replicates.push_back(
            replicate_statistic(table, ens.center, model, draw_block_indices(ens.scheme, allowed, rng), ws));
    }
    return ens;
}

[[nodiscard]] inline BootstrapEnsemble run_bootstrap(const TimeSeries& series, const BlockScheme& scheme,
                                                     const SmoothModel& model, const IndexSet& allowed,
                                                     std::size_t replicates, std::uint64_t stream_key) {
    return run_bootstrap(BlockTable(series, scheme), model, allowed, replicates, stream_key);
}

/// K^{-1} #{k : t_k <= x0}.
[[nodiscard]] inline double ecdf_at(std::span<const double> t_stars, double x0) {
    if (t_stars.empty()) {
        throw std::invalid_argument("ecdf_at: no replicates");
    }
    std::size_t count = 0;
    for (double t : t_stars) {
        count += t <= x0 ? 1 : 0;
    }
    return static_cast<double>(count) / static_cast<double>(t_stars.size());
}

[[nodiscard]] inline double ecdf_at(const BootstrapEnsemble& ensemble, double x0) {
    return ecdf_at(ensemble.t_stars(), x0);
}

/// Smallest c in 1..K with c/K >= alpha, computed with the same arithmetic as
/// ecdf_at so that ecdf_at(quantile(alpha)) >= alpha holds exactly.
[[nodiscard]] inline std::size_t quantile_rank(std::size_t count, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("quantile: alpha must lie in (0, 1)");
    }
    if (count == 0) {
        throw std::invalid_argument("quantile: no replicates");
    }
    const auto k = static_cast<double>(count);
    auto c = static_cast<std::size_t>(std::ceil(alpha * k));
    c = std::clamp<std::size_t>(c, 1, count);
    while (c > 1 && static_cast<double>(c - 1) / k >= alpha) {
        --c;
    }
    while (c < count && static_cast<double>(c) / k < alpha) {
        ++c;
    }
    return c;
}

/// inf{x : ecdf(x) >= alpha} of values already sorted ascending.
[[nodiscard]] inline double quantile_sorted(std::span<const double> sorted, double alpha) {
    return sorted[quantile_rank(sorted.size(), alpha) - 1];
}

[[nodiscard]] inline double quantile(std::vector<double> t_stars, double alpha) {
    const std::size_t c = quantile_rank(t_stars.size(), alpha);
    std::nth_element(t_stars.begin(), t_stars.begin() + static_cast<std::ptrdiff_t>(c - 1), t_stars.end());
    return t_stars[c - 1];
}

[[nodiscard]] inline double quantile(const BootstrapEnsemble& ensemble, double alpha) {
    return quantile(ensemble.t_stars(), alpha);
}

/// A bootstrap functional of the law of T*: the ecdf at x0 or the alpha-quantile.
struct Target {
    enum class Kind { ecdf, quantile };
    Kind kind = Kind::ecdf;
    double arg = 0.0;

    static Target ecdf(double x0) { return {Kind::ecdf, x0}; }
    static Target quantile(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::invalid_argument("quantile target: alpha must lie in (0, 1)");
        }
        return {Kind::quantile, alpha};
    }

    /// Evaluates on ascending t values.
    [[nodiscard]] double evaluate_sorted(std::span<const double> sorted) const {
        if (kind == Kind::quantile) {
            return quantile_sorted(sorted, arg);
        }
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), arg);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    }

    [[nodiscard]] std::string id() const {
        return std::string(kind == Kind::ecdf ? "ecdf:" : "quantile:") + format_roundtrip(arg);
    }

    friend bool operator==(const Target&, const Target&) = default;
};

[[nodiscard]] inline Target parse_target(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("target '" + std::string(text) + "' must look like ecdf:X or quantile:A");
    }
    const auto kind = text.substr(0, colon);
    const auto arg_text = text.substr(colon + 1);
    double arg = 0.0;
    const auto [ptr, ec] = std::from_chars(arg_text.data(), arg_text.data() + arg_text.size(), arg);
    if (ec != std::errc{} || ptr != arg_text.data() + arg_text.size() || !std::isfinite(arg)) {
        throw std::invalid_argument("target '" + std::string(text) + "': bad numeric argument");
    }
    if (kind == "ecdf") return Target::ecdf(arg);
    if (kind == "quantile") return Target::quantile(arg);
    throw std::invalid_argument("target '" + std::string(text) + "': kind must be ecdf or quantile");
}

}  // namespace jabboot

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jabboot/series.hpp"

namespace jabboot {

enum class SmoothKind { mean, variance, ratio, user };

/// Statistic of the form theta_hat = H(sample mean) with gradient h.
///
/// Built-ins:
///   mean      d = 1, H(u) = u
///   variance  d = 2 on (X, X^2), H(u, v) = v - u^2
///   ratio     d = 2, H(u, v) = u / v
/// A user-supplied H must be free of side effects; it is evaluated concurrently.
class SmoothModel {
public:
    using Function = std::function<double(std::span<const double>)>;
    using Gradient = std::function<void(std::span<const double>, std::span<double>)>;

    SmoothModel(SmoothKind kind, std::size_t dim, Function h_fn, Gradient grad_fn, std::string name)
        : kind_(kind), dim_(dim), fn_(std::move(h_fn)), grad_(std::move(grad_fn)), name_(std::move(name)) {
        if (dim_ == 0) {
            throw std::invalid_argument("SmoothModel: dimension must be at least 1");
        }
        if (!fn_) {
            throw std::invalid_argument("SmoothModel: H is empty");
        }
    }

    [[nodiscard]] SmoothKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    [[nodiscard]] double value(std::span<const double> x) const { return fn_(x); }

    void gradient(std::span<const double> x, std::span<double> out) const {
        if (grad_) {
            grad_(x, out);
        } else {
            finite_difference_gradient(fn_, x, out);
        }
    }

    [[nodiscard]] std::vector<double> gradient(std::span<const double> x) const {
        std::vector<double> g(dim_);
        gradient(x, g);
        return g;
    }

    [[nodiscard]] bool has_analytic_gradient() const noexcept { return static_cast<bool>(grad_); }

    /// Central differences with step 1e-5 (1 + ||x||).
    static void finite_difference_gradient(const Function& f, std::span<const double> x, std::span<double> out) {
        double norm2 = 0.0;
        for (double v : x) {
            norm2 += v * v;
        }
        const double step = 1e-5 * (1.0 + std::sqrt(norm2));
        std::vector<double> probe(x.begin(), x.end());
        for (std::size_t k = 0; k < x.size(); ++k) {
            probe[k] = x[k] + step;
            const double up = f(probe);
            probe[k] = x[k] - step;
            const double down = f(probe);
            probe[k] = x[k];
            out[k] = (up - down) / (2.0 * step);
        }
    }

private:
    SmoothKind kind_;
    std::size_t dim_;
    Function fn_;
    Gradient grad_;
    std::string name_;
};

[[nodiscard]] inline SmoothModel mean_model() {
    return SmoothModel(
        SmoothKind::mean, 1, [](std::span<const double> x) { return x[0]; },
        [](std::span<const double>, std::span<double> g) { g[0] = 1.0; }, "mean");
}

[[nodiscard]] inline SmoothModel variance_model() {
    return SmoothModel(
        SmoothKind::variance, 2, [](std::span<const double> x) { return x[1] - x[0] * x[0]; },
        [](std::span<const double> x, std::span<double> g) {
            g[0] = -2.0 * x[0];
            g[1] = 1.0;
        },
        "variance");
}

[[nodiscard]] inline SmoothModel ratio_model() {
    return SmoothModel(
        SmoothKind::ratio, 2, [](std::span<const double> x) { return x[0] / x[1]; },
        [](std::span<const double> x, std::span<double> g) {
            g[0] = 1.0 / x[1];
            g[1] = -x[0] / (x[1] * x[1]);
        },
        "ratio");
}

/// User functional; the gradient is taken numerically when none is given.
[[nodiscard]] inline SmoothModel user_model(std::size_t dim, SmoothModel::Function h_fn,
                                            SmoothModel::Gradient grad_fn = {}, std::string name = "user") {
    return SmoothModel(SmoothKind::user, dim, std::move(h_fn), std::move(grad_fn), std::move(name));
}

[[nodiscard]] inline SmoothModel builtin_model(std::string_view name) {
    if (name == "mean") return mean_model();
    if (name == "variance") return variance_model();
    if (name == "ratio") return ratio_model();
    throw std::invalid_argument("unknown functional '" + std::string(name) + "' (expected mean|variance|ratio)");
}

/// Brings a raw series into the coordinates the model is defined on: the
/// variance functional takes a univariate series to (X, X^2).
[[nodiscard]] inline TimeSeries prepare_series(const TimeSeries& raw, const SmoothModel& model) {
    if (model.kind() == SmoothKind::variance && raw.dim() == 1) {
        return augment_with_squares(raw);
    }
    if (raw.dim() != model.dim()) {
        throw std::invalid_argument("functional '" + model.name() + "' needs d=" + std::to_string(model.dim()) +
                                    " columns, series has " + std::to_string(raw.dim()));
    }
    return raw;
}

/// Dense row-major matrix, sized for the small d of smooth-function models.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) noexcept { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data[i * cols + j]; }
};

/// Gamma_n(k) = n^{-1} sum_{i=1}^{n-k} (X_i - Xbar)(X_{i+k} - Xbar)'. Divisor is n.
[[nodiscard]] inline Matrix autocovariance(const TimeSeries& series, std::size_t lag) {
    const std::size_t n = series.size();
    if (lag >= n) {
        throw std::invalid_argument("autocovariance: lag must be below n");
    }
    const std::size_t d = series.dim();
    const auto mean = series.mean();
    Matrix g(d, d);
    for (std::size_t i = 0; i + lag < n; ++i) {
        const auto a = series[i];
        const auto c = series[i + lag];
        for (std::size_t r = 0; r < d; ++r) {
            const double dr = a[r] - mean[r];
            for (std::size_t s = 0; s < d; ++s) {
                g(r, s) += dr * (c[s] - mean[s]);
            }
        }
    }
    for (double& v : g.data) {
        v /= static_cast<double>(n);
    }
    return g;
}

struct LagWindowEstimate {
    std::vector<Matrix> gammas;  // Gamma_n(0..ell1)
    Matrix sigma;
    std::size_t ell1 = 0;
    double tau2 = 0.0;
};

/// Truncated, unweighted lag-window estimate of the long-run covariance and the
/// plug-in variance tau^2 = |h(Xbar)' Sigma h(Xbar)|.
[[nodiscard]] inline LagWindowEstimate lag_window_tau2(const TimeSeries& series, const SmoothModel& model,
                                                       std::size_t ell1) {
    const std::size_t n = series.size();
    const std::size_t d = series.dim();
    if (d != model.dim()) {
        throw std::invalid_argument("lag_window_tau2: series dimension does not match the model");
    }
    if (ell1 >= n) {
        throw std::invalid_argument("lag_window_tau2: lag truncation must be below n");
    }
    LagWindowEstimate est;
    est.ell1 = ell1;
    est.gammas.reserve(ell1 + 1);
    for (std::size_t k = 0; k <= ell1; ++k) {
        est.gammas.push_back(autocovariance(series, k));
    }
    est.sigma = est.gammas[0];
    for (std::size_t k = 1; k <= ell1; ++k) {
        const Matrix& g = est.gammas[k];
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t s = 0; s < d; ++s) {
                est.sigma(r, s) += g(r, s) + g(s, r);
            }
        }
    }
    const auto grad = model.gradient(series.mean());
    for (double v : grad) {
        if (!std::isfinite(v)) {
            throw std::domain_error("lag_window_tau2: gradient of H is not finite at the sample mean");
        }
    }
    double q = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t s = 0; s < d; ++s) {
            q += grad[r] * est.sigma(r, s) * grad[s];
        }
    }
    est.tau2 = std::abs(q);
    return est;
}

/// T_n = sqrt(n) (H(Xbar) - theta) / (tau_hat + 1/n).
[[nodiscard]] inline double studentized_statistic(const TimeSeries& series, const SmoothModel& model, double theta,
                                                  std::size_t ell1) {
    const auto n = static_cast<double>(series.size());
    const auto est = lag_window_tau2(series, model, ell1);
    const double theta_hat = model.value(series.mean());
    return std::sqrt(n) * (theta_hat - theta) / (std::sqrt(est.tau2) + 1.0 / n);
}

}  // namespace jabboot

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jabboot/rng.hpp"
#include "jabboot/series.hpp"
#include "jabboot/smooth.hpp"

namespace jabboot {

/// Simulation models, all driven by i.i.d. N(0,1) innovations e_t:
///   I    X_t = (e_t + e_{t+1}) / sqrt(2)
///   II   X_t = 0.3 X_{t-1} + e_t
///   III  X_t = -0.1 X_{t-1} + e_t
///   IV   X_t = W_t^2 + W_t 1(W_t < 0),
///        W_t = 0.6 W_{t-1} - 0.3 W_{t-2} + 0.1 W_{t-3} + e_t + 0.2 e_{t-1} + 0.3 e_{t-2} + 0.1 e_{t-3}
///   iid  X_t = e_t
enum class ModelKind { I, II, III, IV, iid };

[[nodiscard]] inline std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::I: return "I";
        case ModelKind::II: return "II";
        case ModelKind::III: return "III";
        case ModelKind::IV: return "IV";
        case ModelKind::iid: return "iid";
    }
    return "?";
}

[[nodiscard]] inline ModelKind parse_model_kind(std::string_view text) {
    if (text == "I" || text == "1") return ModelKind::I;
    if (text == "II" || text == "2") return ModelKind::II;
    if (text == "III" || text == "3") return ModelKind::III;
    if (text == "IV" || text == "4") return ModelKind::IV;
    if (text == "iid" || text == "iid-normal") return ModelKind::iid;
    throw std::invalid_argument("unknown model '" + std::string(text) + "' (expected I|II|III|IV|iid)");
}

struct ModelSpec {
    ModelKind kind = ModelKind::II;
    std::size_t burn_in = 500;  // recursive models start from zeros
    std::uint64_t seed = 0;
};

inline void validate(const ModelSpec& spec) {
    if (spec.kind == ModelKind::IV && spec.burn_in < 100) {
        throw std::invalid_argument("model IV needs burn_in >= 100");
    }
}

/// n observations from the model, innovations taken from `rng`.
[[nodiscard]] inline TimeSeries generate(const ModelSpec& spec, std::size_t n, Stream& rng) {
    validate(spec);
    if (n < 1) {
        throw std::invalid_argument("generate: n must be at least 1");
    }
    std::vector<double> x(n);
    switch (spec.kind) {
        case ModelKind::iid:
            for (auto& v : x) {
                v = rng.normal();
            }
            break;
        case ModelKind::I: {
            double prev = rng.normal();
            for (auto& v : x) {
                const double next = rng.normal();
                v = (prev + next) / std::numbers::sqrt2;
                prev = next;
            }
            break;
        }
        case ModelKind::II:
        case ModelKind::III: {
            const double phi = spec.kind == ModelKind::II ? 0.3 : -0.1;
            double state = 0.0;
            for (std::size_t t = 0; t < spec.burn_in; ++t) {
                state = phi * state + rng.normal();
            }
            for (auto& v : x) {
                state = phi * state + rng.normal();
                v = state;
            }
            break;
        }
        case ModelKind::IV: {
            double w1 = 0.0, w2 = 0.0, w3 = 0.0;
            double e1 = 0.0, e2 = 0.0, e3 = 0.0;
            for (std::size_t t = 0; t < spec.burn_in + n; ++t) {
                const double e = rng.normal();
                const double w = 0.6 * w1 - 0.3 * w2 + 0.1 * w3 + e + 0.2 * e1 + 0.3 * e2 + 0.1 * e3;
                w3 = w2;
                w2 = w1;
                w1 = w;
                e3 = e2;
                e2 = e1;
                e1 = e;
                if (t >= spec.burn_in) {
                    x[t - spec.burn_in] = w * w + (w < 0.0 ? w : 0.0);
                }
            }
            break;
        }
    }
    return TimeSeries::scalar(std::move(x));
}

/// Same as above with the stream keyed by the spec's seed.
[[nodiscard]] inline TimeSeries generate(const ModelSpec& spec, std::size_t n) {
    Stream rng = Stream::from(spec.seed, {static_cast<std::uint64_t>(StreamTag::series)});
    return generate(spec, n, rng);
}

/// Stationary variance of the ARMA(3,3) driver W_t of model IV, from its
/// MA(infinity) weights.
[[nodiscard]] inline double model_iv_driver_variance() {
    constexpr double ar[3] = {0.6, -0.3, 0.1};
    constexpr double ma[3] = {0.2, 0.3, 0.1};
    std::vector<double> psi{1.0};
    double total = 1.0;
    for (std::size_t j = 1; j < 4000; ++j) {
        double p = j <= 3 ? ma[j - 1] : 0.0;
        for (std::size_t k = 1; k <= 3 && k <= j; ++k) {
            p += ar[k - 1] * psi[j - k];
        }
        psi.push_back(p);
        total += p * p;
    }
    return total;
}

/// theta = H(E X) for the built-in functionals on the simulation models.
[[nodiscard]] inline double true_theta(ModelKind kind, SmoothKind functional) {
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    if (functional == SmoothKind::mean) {
        if (kind == ModelKind::IV) {
            const double s2 = model_iv_driver_variance();
            return s2 - std::sqrt(s2) * inv_sqrt_2pi;
        }
        return 0.0;
    }
    if (functional == SmoothKind::variance) {
        switch (kind) {
            case ModelKind::I:
            case ModelKind::iid: return 1.0;
            case ModelKind::II: return 1.0 / (1.0 - 0.09);
            case ModelKind::III: return 1.0 / (1.0 - 0.01);
            case ModelKind::IV: {
                const double s2 = model_iv_driver_variance();
                const double s = std::sqrt(s2);
                const double mean = s2 - s * inv_sqrt_2pi;
                const double second = 3.0 * s2 * s2 - 4.0 * s2 * s * inv_sqrt_2pi + 0.5 * s2;
                return second - mean * mean;
            }
        }
    }
    throw std::invalid_argument("true_theta: no known parameter for this (model, functional) pair");
}

}  // namespace jabboot

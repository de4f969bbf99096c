#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace jabboot {

__extension__ using uint128 = unsigned __int128;

/// Stateless 64-bit finalizer (SplitMix64 output function).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a path of identifiers into a single stream key. Distinct paths give
/// statistically unrelated keys; the fold is order sensitive.
[[nodiscard]] constexpr std::uint64_t derive_key(std::uint64_t seed,
                                                 std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t id : path) {
        key = mix64(key + 0x9e3779b97f4a7c15ULL + mix64(id + 0x3c6ef372fe94f82bULL));
    }
    return key;
}

/// Domain tags for the stream key path. Every random quantity in the library is
/// drawn from a stream addressed as (seed, tag, run, replicate, deletion, ...),
/// so results never depend on the order in which work is scheduled.
enum class StreamTag : std::uint64_t {
    series = 1,
    bootstrap = 2,
    fresh = 3,
    top_up = 4,
    target_pass = 5,
    jab_pass = 6,
};

/// Counter-based random stream. The n-th output is mix64(key + n * gamma), so a
/// stream is fully determined by its key and position and can be created anywhere
/// without shared state. Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

    static constexpr Stream from(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
        return Stream(derive_key(seed, path));
    }

    [[nodiscard]] static constexpr result_type min() noexcept { return 0; }
    [[nodiscard]] static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept {
        ++counter_;
        return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-and-reject.
    std::uint64_t below(std::uint64_t bound) noexcept {
        uint128 m = static_cast<uint128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<uint128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal draw (Marsaglia polar method; the spare value is cached).
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        double v = 0.0;
        double s = 0.0;
        do {
            u = 2.0 * uniform_open() - 1.0;
            v = 2.0 * uniform_open() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] constexpr std::uint64_t position() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace jabboot

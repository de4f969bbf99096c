#pragma once

// Direct, deliberately naive re-implementations used as independent checks.
// Nothing here shares a code path with the library beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

/// T* for a univariate mean from an explicitly assembled bootstrap sample:
/// blocks are copied out of the raw data and every quantity is recomputed
/// from the concatenated sample.
inline double t_star_mean(const std::vector<double>& x, std::size_t ell, const std::vector<std::size_t>& draw_1based,
                          double mu_hat) {
    std::vector<double> sample;
    for (auto j : draw_1based) {
        for (std::size_t k = 0; k < ell; ++k) {
            sample.push_back(x[j - 1 + k]);
        }
    }
    const double n1 = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= n1;
    const std::size_t b = draw_1based.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < ell; ++k) s += sample[i * ell + k];
        acc += (s - static_cast<double>(ell) * mean) * (s - static_cast<double>(ell) * mean);
    }
    const double tau = std::sqrt(acc / (static_cast<double>(ell) * static_cast<double>(b)));
    return std::sqrt(n1) * (mean - mu_hat) / (tau + 1.0 / static_cast<double>(x.size()));
}

/// Mean of the MBB block means over 1-based indices `allowed`.
inline double mbb_center_mean(const std::vector<double>& x, std::size_t ell, const std::vector<std::size_t>& allowed) {
    double acc = 0.0;
    for (auto j : allowed) {
        double s = 0.0;
        for (std::size_t k = 0; k < ell; ++k) s += x[j - 1 + k];
        acc += s / static_cast<double>(ell);
    }
    return acc / static_cast<double>(allowed.size());
}

/// Every MBB draw in allowed^b, T* for each (univariate mean).
inline std::vector<double> enumerate_t_mean(const std::vector<double>& x, std::size_t ell,
                                            const std::vector<std::size_t>& allowed) {
    const std::size_t b = x.size() / ell;
    const double mu = mbb_center_mean(x, ell, allowed);
    std::vector<double> out;
    std::vector<std::size_t> pos(b, 0);
    while (true) {
        std::vector<std::size_t> draw(b);
        for (std::size_t k = 0; k < b; ++k) draw[k] = allowed[pos[k]];
        out.push_back(t_star_mean(x, ell, draw, mu));
        std::size_t p = 0;
        while (p < b && ++pos[p] == allowed.size()) {
            pos[p] = 0;
            ++p;
        }
        if (p == b) break;
    }
    return out;
}

inline double ecdf(const std::vector<double>& t, double x0) {
    return static_cast<double>(std::count_if(t.begin(), t.end(), [&](double v) { return v <= x0; })) /
           static_cast<double>(t.size());
}

/// inf{x : ecdf(x) >= alpha} by scanning every sample point.
inline double generalized_inverse(const std::vector<double>& t, double alpha) {
    double best = INFINITY;
    for (double v : t) {
        if (ecdf(t, v) >= alpha) best = std::min(best, v);
    }
    return best;
}

/// (m/(N-m)) M^{-1} sum ((N phi - (N-m) p_i)/m - phi)^2, written out longhand.
inline double jab_variance(std::size_t big_n, std::size_t m, double phi, const std::vector<double>& points) {
    const double nn = static_cast<double>(big_n);
    const double mm = static_cast<double>(m);
    long double sum = 0.0L;
    for (double p : points) {
        const long double pseudo = (static_cast<long double>(nn) * phi - (nn - mm) * static_cast<long double>(p)) / mm;
        sum += (pseudo - phi) * (pseudo - phi);
    }
    return static_cast<double>(static_cast<long double>(mm / (nn - mm)) * sum / static_cast<long double>(points.size()));
}

/// Delete-1 jackknife variance of the sample mean.
inline double delete_one_jackknife_mean(const std::vector<double>& x) {
    const std::size_t n = x.size();
    double total = 0.0;
    for (double v : x) total += v;
    const double full = total / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double loo = (total - x[i]) / static_cast<double>(n - 1);
        const double pseudo = static_cast<double>(n) * full - static_cast<double>(n - 1) * loo;
        acc += (pseudo - full) * (pseudo - full);
    }
    return acc / (static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace oracle

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jabboot/rng.hpp"
#include "jabboot/series.hpp"

namespace jabboot {

enum class BlockStyle { mbb, nbb, cbb };

[[nodiscard]] inline std::string_view to_string(BlockStyle style) noexcept {
    switch (style) {
        case BlockStyle::mbb: return "mbb";
        case BlockStyle::nbb: return "nbb";
        case BlockStyle::cbb: return "cbb";
    }
    return "?";
}

[[nodiscard]] inline BlockStyle parse_block_style(std::string_view text) {
    if (text == "mbb" || text == "MBB") return BlockStyle::mbb;
    if (text == "nbb" || text == "NBB") return BlockStyle::nbb;
    if (text == "cbb" || text == "CBB") return BlockStyle::cbb;
    throw std::invalid_argument("unknown block style '" + std::string(text) + "'");
}

/// Resampling universe over a series of length n.
///
///   mbb  overlapping blocks starting at 1..n-ell+1
///   nbb  disjoint blocks ((j-1)ell+1 .. j ell), the trailing partial block dropped
///   cbb  blocks starting at every t in 1..n, wrapping modulo n
///
/// All styles resample b = floor(n/ell) blocks, giving n1 = b ell observations.
struct BlockScheme {
    std::size_t n = 0;
    std::size_t ell = 0;
    BlockStyle style = BlockStyle::mbb;
    std::size_t num_blocks = 0;  // N
    std::size_t b = 0;
    std::size_t n1 = 0;

    /// 0-based offset of the first observation of block j (0-based).
    [[nodiscard]] std::size_t block_start(std::size_t j) const noexcept {
        return style == BlockStyle::nbb ? j * ell : j;
    }

    /// 0-based position of the k-th element of block j.
    [[nodiscard]] std::size_t position(std::size_t j, std::size_t k) const noexcept {
        const std::size_t p = block_start(j) + k;
        return style == BlockStyle::cbb ? p % n : p;
    }

    friend bool operator==(const BlockScheme&, const BlockScheme&) = default;
};

[[nodiscard]] inline BlockScheme make_block_scheme(std::size_t n, std::size_t ell,
                                                   BlockStyle style = BlockStyle::mbb) {
    if (n < 2) {
        throw std::invalid_argument("make_block_scheme: n must be at least 2");
    }
    if (ell < 1 || ell > n) {
        throw std::invalid_argument("make_block_scheme: block length must lie in [1, n]");
    }
    BlockScheme s;
    s.n = n;
    s.ell = ell;
    s.style = style;
    s.b = n / ell;
    s.n1 = s.b * ell;
    switch (style) {
        case BlockStyle::mbb: s.num_blocks = n - ell + 1; break;
        case BlockStyle::nbb: s.num_blocks = n / ell; break;
        case BlockStyle::cbb: s.num_blocks = n; break;
    }
    return s;
}

namespace detail {

inline void check_scheme_fits(const TimeSeries& series, const BlockScheme& scheme) {
    if (series.size() != scheme.n) {
        throw std::invalid_argument("block scheme was built for n=" + std::to_string(scheme.n) +
                                    " but the series has " + std::to_string(series.size()) +
                                    " observations");
    }
}

}  // namespace detail

/// Per-block sums, N rows of d values. The raw material of every bootstrap
/// statistic; a resampled block sum S_i* is just a row of this table.
class BlockTable {
public:
    BlockTable(const TimeSeries& series, const BlockScheme& scheme) : scheme_(scheme), dim_(series.dim()) {
        detail::check_scheme_fits(series, scheme);
        sums_.assign(scheme.num_blocks * dim_, 0.0);
        for (std::size_t j = 0; j < scheme.num_blocks; ++j) {
            double* row = sums_.data() + j * dim_;
            for (std::size_t k = 0; k < scheme.ell; ++k) {
                const auto x = series[scheme.position(j, k)];
                for (std::size_t c = 0; c < dim_; ++c) {
                    row[c] += x[c];
                }
            }
        }
    }

    [[nodiscard]] const BlockScheme& scheme() const noexcept { return scheme_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t size() const noexcept { return scheme_.num_blocks; }

    [[nodiscard]] std::span<const double> sum(std::size_t j) const noexcept {
        return {sums_.data() + j * dim_, dim_};
    }

private:
    BlockScheme scheme_;
    std::size_t dim_;
    std::vector<double> sums_;
};

/// Block means U_1..U_N under the scheme's style.
[[nodiscard]] inline std::vector<std::vector<double>> block_means(const TimeSeries& series,
                                                                  const BlockScheme& scheme) {
    const BlockTable table(series, scheme);
    std::vector<std::vector<double>> out(table.size(), std::vector<double>(table.dim()));
    const double inv = 1.0 / static_cast<double>(scheme.ell);
    for (std::size_t j = 0; j < table.size(); ++j) {
        const auto s = table.sum(j);
        for (std::size_t c = 0; c < s.size(); ++c) {
            out[j][c] = s[c] * inv;
        }
    }
    return out;
}

/// A nonempty set of admissible block indices (0-based, sorted, unique).
class IndexSet {
public:
    static IndexSet full(std::size_t num_blocks) {
        IndexSet s;
        s.universe_ = num_blocks;
        s.members_.resize(num_blocks);
        for (std::size_t j = 0; j < num_blocks; ++j) {
            s.members_[j] = static_cast<std::uint32_t>(j);
        }
        s.validate();
        return s;
    }

    /// {0..N-1} minus the window [start, start+width).
    static IndexSet without_window(std::size_t num_blocks, std::size_t start, std::size_t width) {
        if (start + width > num_blocks) {
            throw std::invalid_argument("IndexSet: deletion window exceeds the block range");
        }
        IndexSet s;
        s.universe_ = num_blocks;
        s.members_.reserve(num_blocks - width);
        for (std::size_t j = 0; j < num_blocks; ++j) {
            if (j < start || j >= start + width) {
                s.members_.push_back(static_cast<std::uint32_t>(j));
            }
        }
        s.validate();
        return s;
    }

    static IndexSet of(std::size_t num_blocks, std::vector<std::uint32_t> members) {
        IndexSet s;
        s.universe_ = num_blocks;
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        s.members_ = std::move(members);
        s.validate();
        return s;
    }

    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] std::size_t universe() const noexcept { return universe_; }
    [[nodiscard]] std::uint32_t operator[](std::size_t k) const noexcept { return members_[k]; }
    [[nodiscard]] std::span<const std::uint32_t> members() const noexcept { return members_; }

    [[nodiscard]] bool contains(std::uint32_t j) const noexcept {
        return std::binary_search(members_.begin(), members_.end(), j);
    }

private:
    void validate() const {
        if (members_.empty()) {
            throw std::invalid_argument("IndexSet: allowed block set is empty");
        }
        if (members_.back() >= universe_) {
            throw std::invalid_argument("IndexSet: block index out of range");
        }
    }

    std::size_t universe_ = 0;
    std::vector<std::uint32_t> members_;
};

/// Resampled block indices J_1..J_b (0-based internally).
struct BlockIndexDraw {
    std::vector<std::uint32_t> indices;

    friend bool operator==(const BlockIndexDraw&, const BlockIndexDraw&) = default;
};

/// Draws `count` indices i.i.d. uniform over `allowed`.
[[nodiscard]] inline BlockIndexDraw draw_block_indices(const IndexSet& allowed, std::size_t count,
                                                       Stream& rng) {
    BlockIndexDraw draw;
    draw.indices.resize(count);
    const std::uint64_t size = allowed.size();
    for (auto& j : draw.indices) {
        j = allowed[static_cast<std::size_t>(rng.below(size))];
    }
    return draw;
}

[[nodiscard]] inline BlockIndexDraw draw_block_indices(const BlockScheme& scheme, const IndexSet& allowed,
                                                       Stream& rng) {
    if (allowed.universe() != scheme.num_blocks) {
        throw std::invalid_argument("draw_block_indices: index set does not match the scheme");
    }
    return draw_block_indices(allowed, scheme.b, rng);
}

inline void check_draw(const BlockScheme& scheme, const BlockIndexDraw& draw) {
    if (draw.indices.size() != scheme.b) {
        throw std::invalid_argument("block draw has " + std::to_string(draw.indices.size()) +
                                    " indices, scheme requires " + std::to_string(scheme.b));
    }
    for (auto j : draw.indices) {
        if (j >= scheme.num_blocks) {
            throw std::invalid_argument("block index " + std::to_string(j + 1) + " outside 1.." +
                                        std::to_string(scheme.num_blocks));
        }
    }
}

/// Concatenates the drawn blocks in draw order; the result has n1 observations.
[[nodiscard]] inline TimeSeries assemble_bootstrap_sample(const TimeSeries& series, const BlockScheme& scheme,
                                                          const BlockIndexDraw& draw) {
    detail::check_scheme_fits(series, scheme);
    check_draw(scheme, draw);
    std::vector<double> out;
    out.reserve(scheme.n1 * series.dim());
    for (auto j : draw.indices) {
        for (std::size_t k = 0; k < scheme.ell; ++k) {
            const auto x = series[scheme.position(j, k)];
            out.insert(out.end(), x.begin(), x.end());
        }
    }
    return TimeSeries(std::move(out), series.dim());
}

}  // namespace jabboot

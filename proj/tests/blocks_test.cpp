#include "jabboot/blocks.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"

namespace jabboot {
namespace {

TEST(BlockSchemeTest, MovingBlockCounts) {
    const auto s = make_block_scheme(12, 4, BlockStyle::mbb);
    EXPECT_EQ(s.num_blocks, 9u);
    EXPECT_EQ(s.b, 3u);
    EXPECT_EQ(s.n1, 12u);

    const auto t = make_block_scheme(10, 3, BlockStyle::mbb);
    EXPECT_EQ(t.num_blocks, 8u);
    EXPECT_EQ(t.b, 3u);
    EXPECT_EQ(t.n1, 9u);
}

TEST(BlockSchemeTest, UnitBlocksAreClassicalBootstrap) {
    const auto s = make_block_scheme(7, 1, BlockStyle::mbb);
    EXPECT_EQ(s.num_blocks, 7u);
    EXPECT_EQ(s.b, 7u);
    EXPECT_EQ(s.n1, 7u);
}

TEST(BlockSchemeTest, NonOverlappingAndCircularCounts) {
    const auto nbb = make_block_scheme(10, 3, BlockStyle::nbb);
    EXPECT_EQ(nbb.num_blocks, 3u);
    EXPECT_EQ(nbb.b, 3u);
    const auto cbb = make_block_scheme(10, 3, BlockStyle::cbb);
    EXPECT_EQ(cbb.num_blocks, 10u);
    EXPECT_EQ(cbb.n1, 9u);
}

TEST(BlockSchemeTest, RejectsBadArguments) {
    EXPECT_THROW(make_block_scheme(10, 0), std::invalid_argument);
    EXPECT_THROW(make_block_scheme(10, 11), std::invalid_argument);
    EXPECT_THROW(make_block_scheme(1, 1), std::invalid_argument);
}

TEST(BlockSchemeTest, SampleLengthInvariant) {
    for (std::size_t n = 2; n < 60; ++n) {
        for (std::size_t ell = 1; ell <= n; ++ell) {
            for (auto style : {BlockStyle::mbb, BlockStyle::nbb, BlockStyle::cbb}) {
                const auto s = make_block_scheme(n, ell, style);
                EXPECT_EQ(s.n1, s.b * s.ell);
                EXPECT_LT(n - s.n1, ell);
                EXPECT_GE(s.num_blocks, 1u);
            }
        }
    }
}

TEST(BlockMeansTest, TwoPointAverages) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4});
    const auto u = block_means(x, make_block_scheme(4, 2, BlockStyle::mbb));
    ASSERT_EQ(u.size(), 3u);
    EXPECT_DOUBLE_EQ(u[0][0], 1.5);
    EXPECT_DOUBLE_EQ(u[1][0], 2.5);
    EXPECT_DOUBLE_EQ(u[2][0], 3.5);
}

TEST(BlockMeansTest, CircularBlockWraps) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4});
    const auto u = block_means(x, make_block_scheme(4, 2, BlockStyle::cbb));
    ASSERT_EQ(u.size(), 4u);
    EXPECT_DOUBLE_EQ(u[0][0], 1.5);
    EXPECT_DOUBLE_EQ(u[1][0], 2.5);
    EXPECT_DOUBLE_EQ(u[2][0], 3.5);
    EXPECT_DOUBLE_EQ(u[3][0], 2.5);
}

TEST(BlockMeansTest, NonOverlappingBlocks) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4, 5, 6, 7});
    const auto u = block_means(x, make_block_scheme(7, 3, BlockStyle::nbb));
    ASSERT_EQ(u.size(), 2u);
    EXPECT_DOUBLE_EQ(u[0][0], 2.0);
    EXPECT_DOUBLE_EQ(u[1][0], 5.0);
}

TEST(BlockMeansTest, ConstantSeries) {
    const TimeSeries x(std::vector<double>(20, 3.25), 2);
    for (std::size_t ell = 1; ell <= 10; ++ell) {
        for (const auto& u : block_means(x, make_block_scheme(10, ell))) {
            EXPECT_DOUBLE_EQ(u[0], 3.25);
            EXPECT_DOUBLE_EQ(u[1], 3.25);
        }
    }
}

TEST(BlockMeansTest, LengthMismatch) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4});
    EXPECT_THROW(block_means(x, make_block_scheme(5, 2)), std::invalid_argument);
}

TEST(DrawTest, SingletonAllowedSet) {
    const auto allowed = IndexSet::of(9, {4});
    Stream rng(7);
    const auto d = draw_block_indices(allowed, 6, rng);
    for (auto j : d.indices) {
        EXPECT_EQ(j, 4u);
    }
}

TEST(DrawTest, EmptyAllowedSetRejected) {
    EXPECT_THROW(IndexSet::of(5, {}), std::invalid_argument);
    EXPECT_THROW(IndexSet::without_window(3, 0, 3), std::invalid_argument);
}

TEST(DrawTest, DeterministicGivenStream) {
    const auto allowed = IndexSet::full(50);
    Stream a = Stream::from(11, {1, 2});
    Stream b = Stream::from(11, {1, 2});
    EXPECT_EQ(draw_block_indices(allowed, 40, a), draw_block_indices(allowed, 40, b));
    Stream c = Stream::from(11, {1, 3});
    Stream d = Stream::from(11, {1, 2});
    EXPECT_NE(draw_block_indices(allowed, 40, c), draw_block_indices(allowed, 40, d));
}

// Frequencies over 100,000 draws on a reduced pool: each allowed index within
// 4 binomial standard deviations of 1/(N-m), deleted indices never drawn.
TEST(DrawTest, UniformOnReducedPool) {
    constexpr std::size_t kN = 21;
    constexpr std::size_t kM = 5;
    const auto allowed = IndexSet::without_window(kN, 7, kM);
    Stream rng = Stream::from(2024, {9});
    constexpr std::size_t kDraws = 100'000;
    std::vector<std::size_t> counts(kN, 0);
    const auto d = draw_block_indices(allowed, kDraws, rng);
    for (auto j : d.indices) {
        ++counts[j];
    }
    const double p = 1.0 / static_cast<double>(kN - kM);
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    for (std::size_t j = 0; j < kN; ++j) {
        if (j >= 7 && j < 7 + kM) {
            EXPECT_EQ(counts[j], 0u) << j;
        } else {
            EXPECT_LT(std::abs(static_cast<double>(counts[j]) - kDraws * p), 4 * sigma) << j;
        }
    }
}

TEST(DrawTest, FullPoolMarginalIsUniform) {
    constexpr std::size_t kN = 9;
    Stream rng = Stream::from(5, {});
    constexpr std::size_t kDraws = 90'000;
    std::vector<std::size_t> counts(kN, 0);
    for (auto j : draw_block_indices(IndexSet::full(kN), kDraws, rng).indices) {
        ++counts[j];
    }
    const double p = 1.0 / kN;
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    for (auto c : counts) {
        EXPECT_LT(std::abs(static_cast<double>(c) - kDraws * p), 4 * sigma);
    }
}

TEST(AssembleTest, RepeatedBlock) {
    const auto x = TimeSeries::scalar({10, 20, 30});
    const auto s = make_block_scheme(3, 2);
    const auto out = assemble_bootstrap_sample(x, s, {{0}});
    EXPECT_EQ(out, TimeSeries::scalar({10, 20}));
    const auto s4 = make_block_scheme(4, 2);
    const auto x4 = TimeSeries::scalar({10, 20, 30, 40});
    EXPECT_EQ(assemble_bootstrap_sample(x4, s4, {{0, 0}}), TimeSeries::scalar({10, 20, 10, 20}));
}

TEST(AssembleTest, UnitBlocksPermute) {
    const auto x = TimeSeries::scalar({10, 20, 30});
    const auto s = make_block_scheme(3, 1);
    EXPECT_EQ(assemble_bootstrap_sample(x, s, {{2, 0, 1}}), TimeSeries::scalar({30, 10, 20}));
}

TEST(AssembleTest, HandConcatenation) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4});
    const auto s = make_block_scheme(4, 2);
    EXPECT_EQ(assemble_bootstrap_sample(x, s, {{2, 1}}), TimeSeries::scalar({3, 4, 2, 3}));
}

TEST(AssembleTest, CircularWrapAndMultivariate) {
    const TimeSeries x({1, 10, 2, 20, 3, 30}, 2);
    const auto s = make_block_scheme(3, 2, BlockStyle::cbb);
    EXPECT_EQ(assemble_bootstrap_sample(x, s, {{2}}), TimeSeries({3, 30, 1, 10}, 2));
}

TEST(AssembleTest, InvalidDrawRejected) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4});
    const auto s = make_block_scheme(4, 2);
    EXPECT_THROW(assemble_bootstrap_sample(x, s, {{3, 0}}), std::invalid_argument);
    EXPECT_THROW(assemble_bootstrap_sample(x, s, {{0}}), std::invalid_argument);
}

// With unit blocks, the reachable samples are exactly the with-replacement
// resamples of the data.
TEST(AssembleTest, UnitBlocksReachAllResamples) {
    const auto x = TimeSeries::scalar({1, 2, 3});
    const auto s = make_block_scheme(3, 1);
    std::set<std::vector<double>> seen;
    for (std::uint32_t a = 0; a < 3; ++a)
        for (std::uint32_t b = 0; b < 3; ++b)
            for (std::uint32_t c = 0; c < 3; ++c) {
                const auto out = assemble_bootstrap_sample(x, s, {{a, b, c}});
                seen.insert({out.flat().begin(), out.flat().end()});
            }
    EXPECT_EQ(seen.size(), 27u);
    for (const auto& v : seen) {
        for (double e : v) EXPECT_TRUE(e == 1 || e == 2 || e == 3);
    }
}

TEST(AssembleTest, PureFunctionOfSeed) {
    const auto x = TimeSeries::scalar({0.5, -1, 2, 3, 1, 4, -2, 0});
    const auto s = make_block_scheme(8, 3);
    const auto all = IndexSet::full(s.num_blocks);
    Stream a = Stream::from(3, {4});
    Stream b = Stream::from(3, {4});
    EXPECT_EQ(assemble_bootstrap_sample(x, s, draw_block_indices(s, all, a)),
              assemble_bootstrap_sample(x, s, draw_block_indices(s, all, b)));
}

TEST(SeriesCsvTest, ReadsColumnsAndHeader) {
    std::istringstream in("a,b\n1,2\n3.5, -4e-1\n\n");
    const auto s = read_series_csv(in, true);
    EXPECT_EQ(s.size(), 2u);
    EXPECT_EQ(s.dim(), 2u);
    EXPECT_DOUBLE_EQ(s[1][1], -0.4);
}

TEST(SeriesCsvTest, RejectsRaggedAndNonNumeric) {
    std::istringstream ragged("1,2\n3\n");
    EXPECT_THROW(read_series_csv(ragged), std::runtime_error);
    std::istringstream text("1\nabc\n");
    EXPECT_THROW(read_series_csv(text), std::runtime_error);
    std::istringstream nan("1\nnan\n");
    EXPECT_THROW(read_series_csv(nan), std::invalid_argument);
}

TEST(SeriesCsvTest, WriteReadIsExact) {
    Stream rng(99);
    std::vector<double> v(300);
    for (auto& e : v) e = rng.normal() * 1e3;
    const TimeSeries s(v, 3);
    std::stringstream io;
    write_series_csv(io, s);
    EXPECT_EQ(read_series_csv(io), s);
}

}  // namespace
}  // namespace jabboot

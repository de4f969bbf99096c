#include "jabboot/boot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "jabboot/harness.hpp"
#include "oracles.hpp"

namespace jabboot {
namespace {

TEST(CenterTest, UnitBlocksGiveSampleMean) {
    const auto x = TimeSeries::scalar({1, 4, 2, 8, 5});
    const auto s = make_block_scheme(5, 1);
    const auto c = bootstrap_center(x, s, IndexSet::full(5), mean_model());
    EXPECT_DOUBLE_EQ(c.mu_hat[0], 4.0);
    EXPECT_DOUBLE_EQ(c.theta_tilde, 4.0);
}

TEST(CenterTest, MeanOfBlockMeansDiffersFromSampleMean) {
    const auto x = TimeSeries::scalar({1, 2, 3, 5});
    const auto c = bootstrap_center(x, make_block_scheme(4, 2), IndexSet::full(3), mean_model());
    EXPECT_NEAR(c.mu_hat[0], 8.0 / 3.0, 1e-15);
    EXPECT_NE(c.mu_hat[0], 2.75);
}

TEST(CenterTest, ConstantSeriesAndReducedPool) {
    const auto x = TimeSeries::scalar(std::vector<double>(10, -2.0));
    const auto s = make_block_scheme(10, 3);
    const auto c = bootstrap_center(x, s, IndexSet::without_window(s.num_blocks, 2, 3), mean_model());
    EXPECT_DOUBLE_EQ(c.mu_hat[0], -2.0);
    EXPECT_DOUBLE_EQ(c.theta_tilde, -2.0);
}

TEST(CenterTest, MismatchedIndexSet) {
    const auto x = TimeSeries::scalar({1, 2, 3, 5});
    EXPECT_THROW(bootstrap_center(x, make_block_scheme(4, 2), IndexSet::full(4), mean_model()),
                 std::invalid_argument);
}

TEST(ReplicateTest, HandEvaluatedExample) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4});
    const auto s = make_block_scheme(4, 2);
    const auto c = bootstrap_center(x, s, IndexSet::full(3), mean_model());
    const auto rep = replicate_statistic(x, s, c, mean_model(), {{0, 2}});
    EXPECT_DOUBLE_EQ(rep.theta_star, 2.5);
    EXPECT_DOUBLE_EQ(rep.tau_star * rep.tau_star, 2.0);
    EXPECT_NEAR(rep.t_star, 0.0, 1e-15);
}

TEST(ReplicateTest, RepeatedBlockHasZeroTau) {
    const auto x = TimeSeries::scalar({1, 2, 3, 4, 6, 7});
    const auto s = make_block_scheme(6, 2);
    const auto c = bootstrap_center(x, s, IndexSet::full(s.num_blocks), mean_model());
    const auto rep = replicate_statistic(x, s, c, mean_model(), {{3, 3, 3}});
    EXPECT_DOUBLE_EQ(rep.tau_star, 0.0);
    EXPECT_NEAR(rep.t_star, 6.0 * std::sqrt(6.0) * (rep.theta_star - c.theta_tilde), 1e-12);
}

TEST(ReplicateTest, ConstantSeriesGivesZero) {
    const auto x = TimeSeries::scalar(std::vector<double>(12, 0.7));
    const auto s = make_block_scheme(12, 3);
    const auto ens = run_bootstrap(x, s, mean_model(), IndexSet::full(s.num_blocks), 50, 1);
    for (double t : ens.t_stars()) EXPECT_DOUBLE_EQ(t, 0.0);
    EXPECT_DOUBLE_EQ(ecdf_at(ens, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(ecdf_at(ens, -1e-9), 0.0);
}

// The fast block-sum path against a literal evaluation on the assembled sample.
TEST(ReplicateTest, MatchesAssembledSampleOracle) {
    Stream rng(77);
    std::vector<double> v(23);
    for (auto& e : v) e = rng.normal();
    const auto x = TimeSeries::scalar(v);
    const auto s = make_block_scheme(23, 4);
    const auto all = IndexSet::full(s.num_blocks);
    const auto c = bootstrap_center(x, s, all, mean_model());
    std::vector<std::size_t> all_1based(s.num_blocks);
    for (std::size_t j = 0; j < s.num_blocks; ++j) all_1based[j] = j + 1;
    EXPECT_NEAR(c.mu_hat[0], oracle::mbb_center_mean(v, 4, all_1based), 1e-14);
    for (int k = 0; k < 200; ++k) {
        auto draw = draw_block_indices(s, all, rng);
        std::vector<std::size_t> d1;
        for (auto j : draw.indices) d1.push_back(j + 1);
        const auto rep = replicate_statistic(x, s, c, mean_model(), draw);
        EXPECT_NEAR(rep.t_star, oracle::t_star_mean(v, 4, d1, c.mu_hat[0]), 1e-10);
    }
}

// Multivariate functional: tau* from the assembled sample with the gradient at Xbar*.
TEST(ReplicateTest, RatioFunctionalMatchesAssembledSample) {
    Stream rng(12);
    std::vector<double> v;
    for (int t = 0; t < 30; ++t) {
        v.push_back(rng.normal() + 1.0);
        v.push_back(std::abs(rng.normal()) + 2.0);
    }
    const TimeSeries x(v, 2);
    const auto s = make_block_scheme(30, 3, BlockStyle::cbb);
    const auto model = ratio_model();
    const auto c = bootstrap_center(x, s, IndexSet::full(s.num_blocks), model);
    for (int k = 0; k < 50; ++k) {
        const auto draw = draw_block_indices(s, IndexSet::full(s.num_blocks), rng);
        const auto sample = assemble_bootstrap_sample(x, s, draw);
        const auto mean = sample.mean();
        const auto g = model.gradient(mean);
        double acc = 0.0;
        for (std::size_t i = 0; i < s.b; ++i) {
            double proj = 0.0;
            for (std::size_t c2 = 0; c2 < 2; ++c2) {
                double sum = 0.0;
                for (std::size_t q = 0; q < s.ell; ++q) sum += sample[i * s.ell + q][c2];
                proj += g[c2] * (sum - 3.0 * mean[c2]);
            }
            acc += proj * proj;
        }
        const double tau = std::sqrt(acc / (3.0 * static_cast<double>(s.b)));
        const double expected = std::sqrt(30.0) * (model.value(mean) - c.theta_tilde) / (tau + 1.0 / 30.0);
        EXPECT_NEAR(replicate_statistic(x, s, c, model, draw).t_star, expected, 1e-9);
    }
}

TEST(RunBootstrapTest, SingleReplicateAndDeterminism) {
    const auto x = TimeSeries::scalar({0.1, -0.4, 1.3, 0.2, -0.9, 0.5, 0.8, -1.1});
    const auto s = make_block_scheme(8, 2);
    const auto all = IndexSet::full(s.num_blocks);
    const auto one = run_bootstrap(x, s, mean_model(), all, 1, 5);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_DOUBLE_EQ(quantile(one, 0.3), one.replicates[0].t_star);
    const auto a = run_bootstrap(x, s, mean_model(), all, 300, 42);
    const auto b = run_bootstrap(x, s, mean_model(), all, 300, 42);
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a.replicates[k].draw, b.replicates[k].draw);
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a.replicates[k].t_star),
                  std::bit_cast<std::uint64_t>(b.replicates[k].t_star));
    }
    EXPECT_THROW(run_bootstrap(x, s, mean_model(), all, 0, 1), std::invalid_argument);
}

TEST(EcdfTest, CountsAndBoundaries) {
    const std::vector<double> t{-1, 0, 1};
    EXPECT_NEAR(ecdf_at(t, 0.0), 2.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(ecdf_at(t, -5.0), 0.0);
    EXPECT_DOUBLE_EQ(ecdf_at(t, 1.0), 1.0);
}

TEST(QuantileTest, OrderStatistics) {
    EXPECT_DOUBLE_EQ(quantile(std::vector<double>{1, 2, 3, 4}, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(quantile(std::vector<double>{4, 3, 2, 1}, 0.51), 3.0);
    EXPECT_THROW(quantile(std::vector<double>{1, 2}, 0.0), std::invalid_argument);
    EXPECT_THROW(quantile(std::vector<double>{1, 2}, 1.0), std::invalid_argument);
}

TEST(QuantileTest, RankIsExactForDecimalLevels) {
    EXPECT_EQ(quantile_rank(1000, 0.35), 350u);
    EXPECT_EQ(quantile_rank(1000, 0.8), 800u);
    EXPECT_EQ(quantile_rank(100, 0.07), 7u);
}

// Generalized-inverse property against a brute-force scan, on data with ties.
TEST(QuantileTest, GeneralizedInverseProperty) {
    Stream rng(1);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> t(1 + rng.below(60));
        for (auto& e : t) e = static_cast<double>(rng.below(7)) - 3.0;
        for (int a = 1; a <= 99; ++a) {
            const double alpha = a / 100.0;
            const double q = quantile(t, alpha);
            EXPECT_EQ(q, oracle::generalized_inverse(t, alpha));
            EXPECT_GE(ecdf_at(t, q), alpha);
            for (double x : t) {
                if (x < q) {
                    EXPECT_LT(ecdf_at(t, x), alpha);
                }
            }
        }
    }
}

TEST(QuantileTest, MonotoneInAlpha) {
    Stream rng(2);
    std::vector<double> t(257);
    for (auto& e : t) e = rng.normal();
    double prev = -INFINITY;
    for (int a = 1; a <= 999; ++a) {
        const double q = quantile(t, a / 1000.0);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(TargetTest, ParseAndEvaluate) {
    const auto e = parse_target("ecdf:0");
    EXPECT_EQ(e.kind, Target::Kind::ecdf);
    EXPECT_EQ(e.id(), "ecdf:0");
    const auto q = parse_target("quantile:0.35");
    EXPECT_EQ(q.id(), "quantile:0.35");
    const std::vector<double> sorted{-2, -1, 0, 1, 2};
    EXPECT_DOUBLE_EQ(e.evaluate_sorted(sorted), 0.6);
    EXPECT_DOUBLE_EQ(q.evaluate_sorted(sorted), -1.0);
    EXPECT_THROW(parse_target("quantile:1.2"), std::invalid_argument);
    EXPECT_THROW(parse_target("median:0.5"), std::invalid_argument);
    EXPECT_THROW(parse_target("ecdf"), std::invalid_argument);
}

// Monte Carlo ecdf on the n=4, ell=2 instance against the 9 enumerated draws.
TEST(EnumerationTest, TinyInstanceWithinBinomialBand) {
    const std::vector<double> v{0.3, -1.2, 0.7, 2.1};
    const auto x = TimeSeries::scalar(v);
    const auto s = make_block_scheme(4, 2);
    const auto exact = oracle::enumerate_t_mean(v, 2, {1, 2, 3});
    ASSERT_EQ(exact.size(), 9u);
    constexpr std::size_t kK = 20'000;
    const auto ens = run_bootstrap(x, s, mean_model(), IndexSet::full(3), kK, 99);
    for (double x0 : {-1.0, 0.0, 1.0}) {
        const double p = oracle::ecdf(exact, x0);
        const double sigma = std::sqrt(p * (1 - p) / kK);
        EXPECT_LE(std::abs(ecdf_at(ens, x0) - p), 3 * sigma + 1e-12) << x0;
    }
}

// Unit blocks reproduce the classical Studentized-mean bootstrap computed directly.
TEST(ClassicalBootstrapTest, UnitBlocksMatchDirectImplementation) {
    Stream rng(606);
    std::vector<double> v(40);
    for (auto& e : v) e = rng.normal() * 2.0 + 1.0;
    const auto x = TimeSeries::scalar(v);
    const auto s = make_block_scheme(40, 1);
    const auto ens = run_bootstrap(x, s, mean_model(), IndexSet::full(40), 500, 8);
    double xbar = 0.0;
    for (double e : v) xbar += e;
    xbar /= 40.0;
    for (const auto& rep : ens.replicates) {
        double m = 0.0;
        for (auto j : rep.draw.indices) m += v[j];
        m /= 40.0;
        double ss = 0.0;
        for (auto j : rep.draw.indices) ss += (v[j] - m) * (v[j] - m);
        const double direct = std::sqrt(40.0) * (m - xbar) / (std::sqrt(ss / 40.0) + 1.0 / 40.0);
        EXPECT_NEAR(rep.t_star, direct, 1e-11);
    }
}

}  // namespace
}  // namespace jabboot

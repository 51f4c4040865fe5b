#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "rtlxv/reward/reward.hpp"

using namespace rtlxv;
using namespace rtlxv::reward;
using xverify::CompileError;
using xverify::PortMismatch;
using xverify::Ran;
using xverify::RuntimeError;

namespace {

// Oracle: fraction of k-subsets of n samples (the first c correct) holding at least one correct sample.
double pass_at_k_by_enumeration(int n, int c, int k) {
    std::uint64_t hit = 0, total = 0;
    const std::uint32_t correct_mask = (1u << c) - 1u;
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
        if (std::popcount(s) != k) continue;
        ++total;
        if (s & correct_mask) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(total);
}

sim::WaveTrace trace_of(const std::vector<std::uint64_t>& outs) {
    sim::WaveTrace t;
    t.ports = {{"out", sim::Direction::output, 8}};
    for (auto v : outs) t.cycles.push_back({{}, {{"out", v}}});
    return t;
}

xverify::MismatchReport report_at(std::vector<std::uint64_t> cycles) {
    xverify::MismatchReport r;
    for (auto c : cycles) r.items.push_back({c, "out", {8, 1}, {8, 2}, {}});
    r.total_compared = 10;
    r.num_vectors = 10;
    return r;
}

}  // namespace

TEST(LocalReward, TierValues) {
    EXPECT_DOUBLE_EQ(local_reward(CompileError{}), 0.0);
    EXPECT_DOUBLE_EQ(local_reward(RuntimeError{}), 0.1);
    EXPECT_DOUBLE_EQ(local_reward(PortMismatch{}), 0.2);
    EXPECT_NEAR(local_reward(Ran{0.5}), 0.6, 1e-12);
    EXPECT_NEAR(local_reward(Ran{1.0}), 1.0, 1e-12);
    EXPECT_NEAR(local_reward(Ran{0.0}), 0.2, 1e-12);
}

TEST(LocalReward, MonotoneInTierAndRatio) {
    EXPECT_LT(local_reward(CompileError{}), local_reward(RuntimeError{}));
    EXPECT_LT(local_reward(RuntimeError{}), local_reward(PortMismatch{}));
    double prev = local_reward(PortMismatch{});
    for (int i = 0; i <= 100; ++i) {
        double r = local_reward(Ran{i / 100.0});
        EXPECT_LE(local_reward(PortMismatch{}), r);
        if (i > 0) {
            EXPECT_GT(r, prev);
        }
        prev = r;
    }
    EXPECT_THROW((void)local_reward(Ran{1.5}), std::invalid_argument);
}

TEST(Aggregate, Weights) {
    EXPECT_NEAR(aggregate_reward(1, 1, 1).total, 10.7, 1e-12);
    EXPECT_EQ(aggregate_reward(0, 0, 0).total, 0.0);
    EXPECT_NEAR(aggregate_reward(0.6, 0, 0.5).total, 6.25, 1e-12);
    RewardWeights w{1, 2, 3};
    EXPECT_NEAR(aggregate_reward(0.5, 1, 0.25, w).total, 0.5 + 2 + 0.75, 1e-12);
    EXPECT_THROW((void)aggregate_reward(1.2, 0, 0), std::invalid_argument);
    EXPECT_THROW((void)aggregate_reward(0.5, 2, 0), std::invalid_argument);
    EXPECT_THROW((void)aggregate_reward(0.5, 0, 0, RewardWeights{-1, 0, 0}), std::invalid_argument);
}

TEST(Aggregate, LinearInEachComponent) {
    RewardWeights w;
    for (double m : {0.0, 0.3, 0.9}) {
        double base = aggregate_reward(0.4, 0, m).total;
        EXPECT_NEAR(aggregate_reward(0.5, 0, m).total - base, w.delta_local * 0.1, 1e-12);
        EXPECT_NEAR(aggregate_reward(0.4, 1, m).total - base, w.delta_fix, 1e-12);
    }
}

TEST(FixBonus, Cases) {
    auto prev = report_at({4});
    std::vector<std::uint64_t> base(10, 0);
    auto fixed = base;
    fixed[4] = 9;
    EXPECT_EQ(fix_bonus(prev, trace_of(fixed), trace_of(fixed), trace_of(fixed)), 1);
    auto golden = fixed;
    golden[4] = 8;
    EXPECT_EQ(fix_bonus(prev, trace_of(fixed), trace_of(fixed), trace_of(golden)), 0);
    auto other = fixed;
    other[4] = 7;
    EXPECT_EQ(fix_bonus(prev, trace_of(fixed), trace_of(other), trace_of(fixed)), 0);
    EXPECT_EQ(fix_bonus(report_at({}), trace_of(fixed), trace_of(fixed), trace_of(fixed)), 0);
    EXPECT_EQ(fix_bonus(report_at({2, 4, 6}), trace_of(fixed), trace_of(fixed), trace_of(fixed)), 1);
    EXPECT_THROW((void)fix_bonus(prev, trace_of(fixed), trace_of({1, 2}), trace_of(fixed)), std::invalid_argument);
}

TEST(PassAtK, Examples) {
    EXPECT_NEAR(pass_at_k(10, 3, 1), 0.3, 1e-12);
    EXPECT_NEAR(pass_at_k(10, 10, 5), 1.0, 1e-12);
    EXPECT_NEAR(pass_at_k(10, 3, 5), 1.0 - 21.0 / 252.0, 1e-12);
    EXPECT_EQ(pass_at_k(10, 0, 10), 0.0);
    EXPECT_THROW((void)pass_at_k(10, 11, 1), std::invalid_argument);
    EXPECT_THROW((void)pass_at_k(10, 3, 0), std::invalid_argument);
    EXPECT_THROW((void)pass_at_k(10, 3, 11), std::invalid_argument);
}

TEST(PassAtK, MatchesEnumeration) {
    for (int n = 1; n <= 12; ++n) {
        for (int c = 0; c <= n; ++c) {
            for (int k = 1; k <= n; ++k) {
                EXPECT_NEAR(pass_at_k(n, c, k), pass_at_k_by_enumeration(n, c, k), 1e-12) << n << " " << c << " " << k;
            }
        }
    }
}

TEST(PassAtK, MonotoneAndStableAtSixtyFour) {
    for (int c = 0; c <= 64; ++c) {
        for (int k = 1; k <= 64; ++k) {
            double v = pass_at_k(64, c, k);
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
            if (c > 0) EXPECT_GE(v + 1e-12, pass_at_k(64, c - 1, k));
            if (k > 1) EXPECT_GE(v + 1e-12, pass_at_k(64, c, k - 1));
        }
        EXPECT_EQ(pass_at_k(64, c, 64) == 1.0, c >= 1);
    }
}

TEST(Curate, ClosedInterval) {
    auto kept = curate_rl_set({{"a", 0.5}, {"b", 0.0}, {"c", 0.1}, {"d", 0.9}, {"e", 0.95}, {"f", 1.0}});
    EXPECT_EQ(kept, (std::vector<std::string>{"a", "c", "d"}));
    EXPECT_THROW((void)curate_rl_set({{"x", -0.1}}), std::invalid_argument);
}

TEST(Breakdown, JsonRoundTrip) {
    auto b = aggregate_reward(0.6, 1, 0.5, {}, MatchBasis::golden);
    auto j = to_json(b);
    EXPECT_EQ(j["basis"], "golden");
    auto back = breakdown_from_json(j);
    EXPECT_DOUBLE_EQ(back.total, b.total);
    EXPECT_EQ(back.fix, 1);
    EXPECT_EQ(back.basis, MatchBasis::golden);
}

TEST(GoldenRate, Fraction) {
    EXPECT_DOUBLE_EQ(golden_pass_rate(trace_of({1, 2, 3, 4}), trace_of({1, 2, 0, 4})), 0.75);
}

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rtlxv/sim/trace.hpp"
#include "rtlxv/xverify/report.hpp"

namespace rtlxv::reward {

struct RewardWeights {
    double delta_local = 10.0;
    double delta_fix = 0.2;
    double delta_match = 0.5;
};

/// Where the pass rate c inside the local reward came from.
enum class MatchBasis { peer, golden };

struct RewardBreakdown {
    double local = 0.0;
    int fix = 0;
    double match = 0.0;
    double total = 0.0;
    MatchBasis basis = MatchBasis::peer;
};

/// Tier score: compile 0, runtime 0.1, port 0.2, ran 0.2 + 0.8c.
[[nodiscard]] double local_reward(const xverify::FailureTier& t);

/// 1 iff some (cycle, signal) mismatched in `prev` now agrees across dut, ref and golden.
/// Throws std::invalid_argument when the three traces differ in length.
[[nodiscard]] int fix_bonus(const xverify::MismatchReport& prev, const sim::WaveTrace& dut, const sim::WaveTrace& ref,
                            const sim::WaveTrace& golden);

/// Weighted sum. Throws std::invalid_argument for components or weights out of range.
[[nodiscard]] RewardBreakdown aggregate_reward(double local, int fix, double match, const RewardWeights& w = {},
                                               MatchBasis basis = MatchBasis::peer);

/// Fraction of (cycle, output) pairs of `t` equal to `golden`.
[[nodiscard]] double golden_pass_rate(const sim::WaveTrace& t, const sim::WaveTrace& golden);

/// Unbiased pass@k: 1 - C(n-c, k) / C(n, k). Throws std::invalid_argument unless 0 <= c <= n and 1 <= k <= n.
[[nodiscard]] double pass_at_k(int n, int c, int k);

/// Problems whose pass@10 lies in the closed interval [0.1, 0.9], input order kept.
[[nodiscard]] std::vector<std::string> curate_rl_set(const std::vector<std::pair<std::string, double>>& items);

inline constexpr double kCurateLow = 0.1;
inline constexpr double kCurateHigh = 0.9;

[[nodiscard]] nlohmann::json to_json(const RewardBreakdown& b);
[[nodiscard]] RewardBreakdown breakdown_from_json(const nlohmann::json& j);

}  // namespace rtlxv::reward

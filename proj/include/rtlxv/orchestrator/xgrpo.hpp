#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtlxv/orchestrator/agent.hpp"
#include "rtlxv/orchestrator/evaluator.hpp"
#include "rtlxv/orchestrator/prompt.hpp"
#include "rtlxv/reward/reward.hpp"

namespace rtlxv::orchestrator {

inline constexpr double kStdFloor = 1e-8;

/// (r - mean) / population std; all zeros when std < kStdFloor.
[[nodiscard]] std::vector<double> group_advantages(const std::vector<double>& rewards);

/// -(1/K) * sum min(r*A, clip(r, 1-eps, 1+eps)*A) with r = exp(logp_new - logp_old).
/// Throws std::invalid_argument on length mismatch, empty input, eps <= 0 or non-finite values.
[[nodiscard]] double clipped_objective(const std::vector<double>& logp_new, const std::vector<double>& logp_old,
                                       const std::vector<double>& advantages, double eps);

/// Context shared by both agents at the start of a turn: the previous best pair and its diagnostics.
struct SharedPrefix {
    int turn = 0;
    std::vector<Attempt> verilog_history;
    std::vector<Attempt> python_history;
    std::optional<xverify::MismatchReport> report;
    int attempts = 0;
};

struct XgrpoGroup {
    std::vector<std::string> candidates;
    std::vector<double> rewards;
    std::vector<double> advantages;
};

struct XgrpoTurn {
    int turn = 0;
    XgrpoGroup verilog;
    XgrpoGroup python;
    std::vector<std::vector<double>> ratios;
    std::pair<std::size_t, std::size_t> best{0, 0};
    SharedPrefix next;
};

/// K candidates per agent from the shared prefix, K x K evaluation, per-agent groups with advantages.
[[nodiscard]] XgrpoTurn sample_xgrpo_turn(Agent& v_agent, Agent& p_agent, int k, const SharedPrefix& prefix,
                                          PairEvaluator& evaluator, const Problem& problem,
                                          const reward::RewardWeights& w = {}, std::uint64_t seed = 0);

/// Naive multi-turn grouping: one continuation per trajectory, so every group past turn 0 has size 1.
[[nodiscard]] XgrpoTurn sample_naive_turn(Agent& v_agent, Agent& p_agent, const SharedPrefix& prefix,
                                          PairEvaluator& evaluator, const Problem& problem,
                                          const reward::RewardWeights& w = {}, std::uint64_t seed = 0);

}  // namespace rtlxv::orchestrator

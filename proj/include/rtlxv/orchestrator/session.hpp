#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rtlxv/orchestrator/agent.hpp"
#include "rtlxv/orchestrator/evaluator.hpp"
#include "rtlxv/orchestrator/problem.hpp"
#include "rtlxv/orchestrator/prompt.hpp"
#include "rtlxv/reward/reward.hpp"

namespace rtlxv::orchestrator {

struct SessionConfig {
    int best_of = 3;    // N candidates per agent per turn
    int max_turns = 3;  // T
    xverify::StimulusPlan plan;
    reward::RewardWeights weights;
    double clip_eps = 0.2;
    int group_size = 4;  // K, X-GRPO mode
    bool backtrack = true;
    int transport_retries = 2;
    unsigned jobs = 1;
    std::uint64_t seed = 42;

    /// Throws std::invalid_argument when N < 1, T < 1, K < 2 or eps <= 0.
    void validate() const;
};

[[nodiscard]] bool backtrack_accept(double accepted, double candidate);

/// Maximum-ratio pair; ties go to the lexicographically smallest (i, j).
[[nodiscard]] std::pair<std::size_t, std::size_t> select_best_pair(const std::vector<std::vector<double>>& ratios);
[[nodiscard]] std::pair<std::size_t, std::size_t> select_best_pair(const EvalMatrix& m);

struct CandidateRecord {
    std::string response;
    std::string code;
    bool extracted = false;
    xverify::FailureTier tier;  // in this candidate's best pairing
    reward::RewardBreakdown reward;
};

struct TurnRecord {
    int turn = 0;
    std::string status = "ok";  // ok | skipped_compile | skipped_transport
    std::vector<CandidateRecord> verilog;
    std::vector<CandidateRecord> python;
    std::vector<std::vector<double>> ratios;
    std::pair<std::size_t, std::size_t> best{0, 0};
    double best_ratio = 0.0;
    bool accepted = false;
    double accepted_ratio = 0.0;  // after this turn's decision
    std::optional<xverify::MismatchReport> best_report;
    std::vector<ChatMessage> verilog_prompt;
    std::vector<ChatMessage> python_prompt;
};

enum class Termination { agreement, turn_limit };

struct SessionResult {
    std::string final_verilog;
    std::string final_python;
    double final_ratio = 0.0;
    std::vector<TurnRecord> turns;
    Termination termination = Termination::turn_limit;

    /// Accepted ratio after each recorded turn.
    [[nodiscard]] std::vector<double> accepted_ratios() const;
};

/// Multi-turn session with Best-of-N pairing and strict-improvement backtracking.
[[nodiscard]] SessionResult run_session(const Problem& problem, Agent& v_agent, Agent& p_agent,
                                        PairEvaluator& evaluator, const SessionConfig& cfg);

/// Per-candidate rewards for one evaluated turn: local tier, best pairing ratio, fix bonus against `prev`.
struct CandidateRewards {
    std::vector<reward::RewardBreakdown> verilog;
    std::vector<reward::RewardBreakdown> python;
    std::vector<std::size_t> v_partner;  // best peer index for each Verilog candidate
    std::vector<std::size_t> p_partner;
};
[[nodiscard]] CandidateRewards candidate_rewards(const EvalMatrix& m, const std::optional<xverify::MismatchReport>& prev,
                                                 const reward::RewardWeights& w);

[[nodiscard]] nlohmann::json to_json(const TurnRecord& t);
[[nodiscard]] nlohmann::json to_json(const SessionResult& r);
/// One JSON object per turn, then a summary line with "final": true.
[[nodiscard]] std::string session_log_jsonl(const SessionResult& r, const Problem& problem, const SessionConfig& cfg);
[[nodiscard]] nlohmann::json to_json(const xverify::MismatchReport& r);
[[nodiscard]] nlohmann::json to_json(const xverify::FailureTier& t);

}  // namespace rtlxv::orchestrator

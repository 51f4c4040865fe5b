#include "rtlxv/orchestrator/xgrpo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rtlxv/orchestrator/session.hpp"

namespace rtlxv::orchestrator {

std::vector<double> group_advantages(const std::vector<double>& rewards) {
    std::vector<double> out(rewards.size(), 0.0);
    if (rewards.empty()) return out;
    const double n = static_cast<double>(rewards.size());
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double sd = std::sqrt(var / n);
    if (sd < kStdFloor) return out;
    for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / sd;
    return out;
}

double clipped_objective(const std::vector<double>& logp_new, const std::vector<double>& logp_old,
                         const std::vector<double>& advantages, double eps) {
    if (logp_new.empty()) throw std::invalid_argument("empty group");
    if (logp_new.size() != logp_old.size() || logp_new.size() != advantages.size()) {
        throw std::invalid_argument("group arrays differ in length");
    }
    if (!(eps > 0) || !std::isfinite(eps)) throw std::invalid_argument("clip epsilon must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < logp_new.size(); ++i) {
        if (!std::isfinite(logp_new[i]) || !std::isfinite(logp_old[i]) || !std::isfinite(advantages[i])) {
            throw std::invalid_argument("non-finite value in group");
        }
        const double r = std::exp(logp_new[i] - logp_old[i]);
        const double clipped = std::clamp(r, 1.0 - eps, 1.0 + eps);
        sum += std::min(r * advantages[i], clipped * advantages[i]);
    }
    return -sum / static_cast<double>(logp_new.size());
}

namespace {

void push_attempt(std::vector<Attempt>& h, Attempt a) {
    h.push_back(std::move(a));
    while (h.size() > kHistoryDepth) h.erase(h.begin());
}

std::vector<std::string> codes_of(const std::vector<std::string>& responses, Role role) {
    std::vector<std::string> out;
    for (const auto& r : responses) out.push_back(extract_code(r, role).value_or(""));
    return out;
}

XgrpoTurn grouped_turn(Agent& v_agent, Agent& p_agent, int k, const SharedPrefix& prefix, PairEvaluator& evaluator,
                       const Problem& problem, const reward::RewardWeights& w, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("group size must be positive");
    const std::string skeleton = skeleton_for(problem);
    auto v_prompt = build_prompt(Role::verilog, problem, skeleton, prefix.verilog_history, prefix.report, prefix.turn);
    auto p_prompt = build_prompt(Role::python, problem, skeleton, prefix.python_history, prefix.report, prefix.turn);
    const SampleContext ctx{prefix.turn, seed};

    XgrpoTurn out;
    out.turn = prefix.turn;
    out.verilog.candidates = codes_of(v_agent.sample(v_prompt, k, ctx), Role::verilog);
    out.python.candidates = codes_of(p_agent.sample(p_prompt, k, ctx), Role::python);

    EvalMatrix m = evaluator.evaluate(out.verilog.candidates, out.python.candidates);
    auto rewards = candidate_rewards(m, prefix.report, w);
    for (const auto& b : rewards.verilog) out.verilog.rewards.push_back(b.total);
    for (const auto& b : rewards.python) out.python.rewards.push_back(b.total);
    out.verilog.advantages = group_advantages(out.verilog.rewards);
    out.python.advantages = group_advantages(out.python.rewards);

    out.ratios.resize(m.pairs.size());
    for (std::size_t i = 0; i < m.pairs.size(); ++i) {
        for (std::size_t j = 0; j < m.pairs[i].size(); ++j) out.ratios[i].push_back(m.ratio(i, j));
    }
    out.best = select_best_pair(out.ratios);

    out.next = prefix;
    out.next.turn = prefix.turn + 1;
    out.next.attempts = prefix.attempts + 1;
    push_attempt(out.next.verilog_history, {out.next.attempts, out.verilog.candidates[out.best.first]});
    push_attempt(out.next.python_history, {out.next.attempts, out.python.candidates[out.best.second]});
    out.next.report = m.pairs[out.best.first][out.best.second].report;
    return out;
}

}  // namespace

XgrpoTurn sample_xgrpo_turn(Agent& v_agent, Agent& p_agent, int k, const SharedPrefix& prefix,
                            PairEvaluator& evaluator, const Problem& problem, const reward::RewardWeights& w,
                            std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("group size must be at least 2");
    return grouped_turn(v_agent, p_agent, k, prefix, evaluator, problem, w, seed);
}

XgrpoTurn sample_naive_turn(Agent& v_agent, Agent& p_agent, const SharedPrefix& prefix, PairEvaluator& evaluator,
                            const Problem& problem, const reward::RewardWeights& w, std::uint64_t seed) {
    return grouped_turn(v_agent, p_agent, 1, prefix, evaluator, problem, w, seed);
}

}  // namespace rtlxv::orchestrator

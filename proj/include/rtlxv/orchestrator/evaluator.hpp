#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtlxv/orchestrator/problem.hpp"
#include "rtlxv/xverify/xverify.hpp"

namespace rtlxv::orchestrator {

/// All pairings of one turn's candidates. pairs[i][j] pairs Verilog candidate i with reference candidate j.
struct EvalMatrix {
    std::vector<std::vector<xverify::PairResult>> pairs;
    std::vector<std::optional<sim::WaveTrace>> v_traces;
    std::vector<std::optional<sim::WaveTrace>> p_traces;
    std::optional<sim::WaveTrace> golden;

    [[nodiscard]] double ratio(std::size_t i, std::size_t j) const { return pairs[i][j].match_ratio(); }
};

class PairEvaluator {
public:
    virtual ~PairEvaluator() = default;
    virtual EvalMatrix evaluate(const std::vector<std::string>& v_codes, const std::vector<std::string>& p_codes) = 0;
};

/// Runs each candidate once on the problem's stimuli, then compares every pair.
class XverifyEvaluator : public PairEvaluator {
public:
    XverifyEvaluator(Problem problem, xverify::XverifyOptions opts, unsigned jobs = 1);
    EvalMatrix evaluate(const std::vector<std::string>& v_codes, const std::vector<std::string>& p_codes) override;

private:
    Problem problem_;
    xverify::XverifyOptions opts_;
    unsigned jobs_;
    std::vector<sim::ValueMap> stimuli_;
    std::optional<sim::WaveTrace> golden_;
};

}  // namespace rtlxv::orchestrator

#include "rtlxv/orchestrator/evaluator.hpp"

#include <stdexcept>

#include "rtlxv/util/parallel.hpp"

namespace rtlxv::orchestrator {

XverifyEvaluator::XverifyEvaluator(Problem problem, xverify::XverifyOptions opts, unsigned jobs)
    : problem_(std::move(problem)), opts_(std::move(opts)), jobs_(jobs) {
    stimuli_ = xverify::gen_stimuli(problem_.iface.stimulus_ports(), opts_.plan);
    if (problem_.golden_verilog) {
        auto g = xverify::run_verilog(*problem_.golden_verilog, problem_.iface, stimuli_);
        if (!g.ran()) throw std::invalid_argument("golden design failed: " + xverify::describe(g.failure));
        golden_ = std::move(g.trace);
    }
}

EvalMatrix XverifyEvaluator::evaluate(const std::vector<std::string>& v_codes, const std::vector<std::string>& p_codes) {
    std::vector<xverify::SideRun> v(v_codes.size()), p(p_codes.size());
    util::parallel_for(v_codes.size() + p_codes.size(), jobs_, [&](std::size_t k) {
        if (k < v_codes.size()) {
            if (v_codes[k].empty()) {
                v[k].failure = xverify::CompileError{"no Verilog code block found in the response"};
            } else {
                v[k] = xverify::run_verilog(v_codes[k], problem_.iface, stimuli_);
            }
        } else {
            const std::size_t j = k - v_codes.size();
            if (p_codes[j].empty()) {
                p[j].failure = xverify::CompileError{"no Python code block found in the response"};
            } else {
                p[j] = xverify::run_python(p_codes[j], problem_.iface, stimuli_, opts_.shim);
            }
        }
    });
    EvalMatrix m;
    m.golden = golden_;
    m.pairs.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) m.pairs[i].push_back(xverify::pair_runs(v[i], p[j]));
        m.v_traces.push_back(v[i].trace);
    }
    for (const auto& run : p) m.p_traces.push_back(run.trace);
    return m;
}

}  // namespace rtlxv::orchestrator

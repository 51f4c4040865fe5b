#include "rtlxv/orchestrator/session.hpp"

#include <algorithm>
#include <stdexcept>

#include "rtlxv/util/sha256.hpp"

namespace rtlxv::orchestrator {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool is_compile_error(const xverify::FailureTier& t) { return std::holds_alternative<xverify::CompileError>(t); }

std::vector<std::string> sample_with_retries(Agent& agent, const std::vector<ChatMessage>& prompt, int n,
                                             const SampleContext& ctx, int retries, bool& failed) {
    for (int attempt = 0; attempt <= retries; ++attempt) {
        try {
            failed = false;
            return agent.sample(prompt, n, ctx);
        } catch (const AgentError&) {
            failed = true;
        }
    }
    return {};
}

void push_history(std::vector<Attempt>& h, Attempt a) {
    h.push_back(std::move(a));
    while (h.size() > kHistoryDepth) h.erase(h.begin());
}

// Places the error-log fragment ahead of the closing refine instruction.
void insert_error_log(std::string& user, Role role, const std::string& log) {
    const std::string refine =
        "\n\n" + prompt_template(role == Role::verilog ? "refine_verilog" : "refine_python");
    const std::string frag = "\n\n" + fill(prompt_template("error_log"), {{"error_log", log}});
    if (user.size() >= refine.size() && user.compare(user.size() - refine.size(), refine.size(), refine) == 0) {
        user.insert(user.size() - refine.size(), frag);
    } else {
        user += frag;
    }
}

json messages_json(const std::vector<ChatMessage>& msgs) {
    json out = json::array();
    for (const auto& m : msgs) out.push_back({{"role", m.role}, {"content", m.content}});
    return out;
}

json candidate_json(const CandidateRecord& c) {
    return {{"sha256", util::sha256_hex(c.code)},
            {"code", c.code},
            {"response", c.response},
            {"extracted", c.extracted},
            {"tier", to_json(c.tier)},
            {"reward", reward::to_json(c.reward)}};
}

}  // namespace

void SessionConfig::validate() const {
    if (best_of < 1) throw std::invalid_argument("best_of must be at least 1");
    if (max_turns < 1) throw std::invalid_argument("max_turns must be at least 1");
    if (group_size < 2) throw std::invalid_argument("group size must be at least 2");
    if (!(clip_eps > 0)) throw std::invalid_argument("clip epsilon must be positive");
    if (transport_retries < 0) throw std::invalid_argument("transport retries must be non-negative");
    xverify::validate(plan);
}

bool backtrack_accept(double accepted, double candidate) { return candidate > accepted; }

std::pair<std::size_t, std::size_t> select_best_pair(const std::vector<std::vector<double>>& ratios) {
    std::pair<std::size_t, std::size_t> best{0, 0};
    double best_ratio = -1.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        for (std::size_t j = 0; j < ratios[i].size(); ++j) {
            if (ratios[i][j] > best_ratio) {
                best_ratio = ratios[i][j];
                best = {i, j};
            }
        }
    }
    return best;
}

std::pair<std::size_t, std::size_t> select_best_pair(const EvalMatrix& m) {
    std::vector<std::vector<double>> r(m.pairs.size());
    for (std::size_t i = 0; i < m.pairs.size(); ++i) {
        for (std::size_t j = 0; j < m.pairs[i].size(); ++j) r[i].push_back(m.ratio(i, j));
    }
    return select_best_pair(r);
}

std::vector<double> SessionResult::accepted_ratios() const {
    std::vector<double> out;
    for (const auto& t : turns) out.push_back(t.accepted_ratio);
    return out;
}

CandidateRewards candidate_rewards(const EvalMatrix& m, const std::optional<xverify::MismatchReport>& prev,
                                   const reward::RewardWeights& w) {
    CandidateRewards out;
    const std::size_t nv = m.pairs.size();
    const std::size_t np = nv == 0 ? 0 : m.pairs[0].size();
    auto fix_for = [&](std::size_t i, std::size_t j) {
        if (!prev || !m.golden || i >= m.v_traces.size() || j >= m.p_traces.size()) return 0;
        if (!m.v_traces[i] || !m.p_traces[j]) return 0;
        return reward::fix_bonus(*prev, *m.v_traces[i], *m.p_traces[j], *m.golden);
    };
    for (std::size_t i = 0; i < nv; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < np; ++j) {
            if (m.ratio(i, j) > m.ratio(i, best)) best = j;
        }
        const double ratio = np ? m.ratio(i, best) : 0.0;
        const double local = np ? reward::local_reward(m.pairs[i][best].verilog) : 0.0;
        out.verilog.push_back(reward::aggregate_reward(local, np ? fix_for(i, best) : 0, ratio, w));
        out.v_partner.push_back(best);
    }
    for (std::size_t j = 0; j < np; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < nv; ++i) {
            if (m.ratio(i, j) > m.ratio(best, j)) best = i;
        }
        const double ratio = m.ratio(best, j);
        const double local = reward::local_reward(m.pairs[best][j].python);
        out.python.push_back(reward::aggregate_reward(local, fix_for(best, j), ratio, w));
        out.p_partner.push_back(best);
    }
    return out;
}

SessionResult run_session(const Problem& problem, Agent& v_agent, Agent& p_agent, PairEvaluator& evaluator,
                          const SessionConfig& cfg) {
    cfg.validate();
    if (v_agent.role() != Role::verilog || p_agent.role() != Role::python) {
        throw std::invalid_argument("agents must have the verilog and python roles");
    }
    const std::string skeleton = skeleton_for(problem);
    SessionResult res;
    std::vector<Attempt> v_hist, p_hist;
    std::optional<xverify::MismatchReport> acc_report;
    xverify::FailureTier acc_v_tier = xverify::CompileError{}, acc_p_tier = xverify::CompileError{};
    bool have_accepted = false;
    double acc_ratio = 0.0;

    for (int t = 0; t < cfg.max_turns; ++t) {
        TurnRecord rec;
        rec.turn = t;
        const int prompt_turn = have_accepted ? t : 0;
        rec.verilog_prompt = build_prompt(Role::verilog, problem, skeleton, v_hist, acc_report, prompt_turn);
        rec.python_prompt = build_prompt(Role::python, problem, skeleton, p_hist, acc_report, prompt_turn);
        if (have_accepted && !acc_report) {
            // No comparison happened; each side only hears about its own failure.
            insert_error_log(rec.verilog_prompt[1].content, Role::verilog, xverify::describe(acc_v_tier));
            insert_error_log(rec.python_prompt[1].content, Role::python, xverify::describe(acc_p_tier));
        }

        const SampleContext ctx{t, cfg.seed + static_cast<std::uint64_t>(t) * 1000003u};
        bool v_failed = false, p_failed = false;
        auto v_resp = sample_with_retries(v_agent, rec.verilog_prompt, cfg.best_of, ctx, cfg.transport_retries, v_failed);
        auto p_resp = sample_with_retries(p_agent, rec.python_prompt, cfg.best_of, ctx, cfg.transport_retries, p_failed);
        if (v_failed || p_failed || v_resp.empty() || p_resp.empty()) {
            rec.status = "skipped_transport";
            rec.accepted_ratio = acc_ratio;
            res.turns.push_back(std::move(rec));
            continue;
        }

        std::vector<std::string> v_codes, p_codes;
        for (const auto& r : v_resp) {
            auto code = extract_code(r, Role::verilog);
            rec.verilog.push_back({r, code.value_or(""), code.has_value(), xverify::CompileError{}, {}});
            v_codes.push_back(code.value_or(""));
        }
        for (const auto& r : p_resp) {
            auto code = extract_code(r, Role::python);
            rec.python.push_back({r, code.value_or(""), code.has_value(), xverify::CompileError{}, {}});
            p_codes.push_back(code.value_or(""));
        }

        EvalMatrix m = evaluator.evaluate(v_codes, p_codes);
        auto rewards = candidate_rewards(m, acc_report, cfg.weights);
        for (std::size_t i = 0; i < rec.verilog.size(); ++i) {
            rec.verilog[i].tier = m.pairs[i][rewards.v_partner[i]].verilog;
            rec.verilog[i].reward = rewards.verilog[i];
        }
        for (std::size_t j = 0; j < rec.python.size(); ++j) {
            rec.python[j].tier = m.pairs[rewards.p_partner[j]][j].python;
            rec.python[j].reward = rewards.python[j];
        }
        rec.ratios.resize(m.pairs.size());
        for (std::size_t i = 0; i < m.pairs.size(); ++i) {
            for (std::size_t j = 0; j < m.pairs[i].size(); ++j) rec.ratios[i].push_back(m.ratio(i, j));
        }
        rec.best = select_best_pair(rec.ratios);
        const auto& best = m.pairs[rec.best.first][rec.best.second];
        rec.best_ratio = best.match_ratio();
        rec.best_report = best.report;

        const bool all_compile = std::all_of(rec.verilog.begin(), rec.verilog.end(),
                                             [](const auto& c) { return is_compile_error(c.tier); }) &&
                                 std::all_of(rec.python.begin(), rec.python.end(),
                                             [](const auto& c) { return is_compile_error(c.tier); });
        if (all_compile) {
            rec.status = "skipped_compile";
        } else if (!have_accepted || !cfg.backtrack || backtrack_accept(acc_ratio, rec.best_ratio)) {
            rec.accepted = true;
            have_accepted = true;
            acc_ratio = rec.best_ratio;
            acc_report = best.report;
            acc_v_tier = best.verilog;
            acc_p_tier = best.python;
            res.final_verilog = v_codes[rec.best.first];
            res.final_python = p_codes[rec.best.second];
            push_history(v_hist, {t + 1, res.final_verilog});
            push_history(p_hist, {t + 1, res.final_python});
        }
        rec.accepted_ratio = acc_ratio;
        res.turns.push_back(std::move(rec));
        if (have_accepted && acc_ratio >= 1.0) {
            res.termination = Termination::agreement;
            break;
        }
    }
    res.final_ratio = acc_ratio;
    return res;
}

json to_json(const xverify::FailureTier& t) {
    return std::visit(
        overloaded{[](const xverify::CompileError& e) { return json{{"tier", "compile_error"}, {"detail", e.detail}}; },
                   [](const xverify::RuntimeError& e) {
                       json j{{"tier", "runtime_error"}, {"detail", e.detail}};
                       if (e.cycle) j["cycle"] = *e.cycle;
                       return j;
                   },
                   [](const xverify::PortMismatch& e) { return json{{"tier", "port_mismatch"}, {"detail", e.detail}}; },
                   [](const xverify::Ran& r) { return json{{"tier", "ran"}, {"match_ratio", r.match_ratio}}; }},
        t);
}

json to_json(const xverify::MismatchReport& r) {
    json items = json::array();
    for (const auto& it : r.items) {
        items.push_back({{"test", it.test_index}, {"signal", it.signal}, {"got", it.got.value}, {"exp", it.exp.value},
                         {"inputs", it.inputs}});
    }
    return {{"mismatches", r.items.size()},
            {"total_compared", r.total_compared},
            {"num_vectors", r.num_vectors},
            {"match_ratio", r.match_ratio()},
            {"items", items}};
}

json to_json(const TurnRecord& t) {
    json j = {{"turn", t.turn},
              {"status", t.status},
              {"ratios", t.ratios},
              {"best_pair", {t.best.first, t.best.second}},
              {"best_ratio", t.best_ratio},
              {"accepted", t.accepted},
              {"accepted_ratio", t.accepted_ratio},
              {"prompts", {{"verilog", messages_json(t.verilog_prompt)}, {"python", messages_json(t.python_prompt)}}}};
    j["verilog_candidates"] = json::array();
    for (const auto& c : t.verilog) j["verilog_candidates"].push_back(candidate_json(c));
    j["python_candidates"] = json::array();
    for (const auto& c : t.python) j["python_candidates"].push_back(candidate_json(c));
    if (t.best_report) j["best_report"] = to_json(*t.best_report);
    return j;
}

json to_json(const SessionResult& r) {
    return {{"final", true},
            {"final_ratio", r.final_ratio},
            {"termination", r.termination == Termination::agreement ? "agreement" : "turn_limit"},
            {"turns", r.turns.size()},
            {"accepted_ratios", r.accepted_ratios()},
            {"final_verilog", r.final_verilog},
            {"final_python", r.final_python}};
}

std::string session_log_jsonl(const SessionResult& r, const Problem& problem, const SessionConfig& cfg) {
    std::string out;
    for (const auto& t : r.turns) {
        json j = to_json(t);
        j["problem"] = problem.id;
        out += j.dump() + "\n";
    }
    json s = to_json(r);
    s["problem"] = problem.id;
    s["config"] = {{"best_of", cfg.best_of},
                   {"max_turns", cfg.max_turns},
                   {"num_vectors", cfg.plan.num_vectors},
                   {"seed", cfg.plan.seed},
                   {"reset_cycles", cfg.plan.reset_cycles},
                   {"backtrack", cfg.backtrack},
                   {"prompt_version", kPromptVersion}};
    out += s.dump() + "\n";
    return out;
}

}  // namespace rtlxv::orchestrator

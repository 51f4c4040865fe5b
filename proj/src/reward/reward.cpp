#include "rtlxv/reward/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace rtlxv::reward {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_unit(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

bool agree_at(const sim::WaveTrace& t, std::uint64_t cycle, const std::string& signal, std::uint64_t& value) {
    const auto& outs = t.cycles[cycle].outputs;
    auto f = outs.find(signal);
    if (f == outs.end()) return false;
    value = f->second;
    return true;
}

}  // namespace

double local_reward(const xverify::FailureTier& t) {
    return std::visit(overloaded{[](const xverify::CompileError&) { return 0.0; },
                                 [](const xverify::RuntimeError&) { return 0.1; },
                                 [](const xverify::PortMismatch&) { return 0.2; },
                                 [](const xverify::Ran& r) {
                                     require_unit(r.match_ratio, "match ratio");
                                     return 0.2 + 0.8 * r.match_ratio;
                                 }},
                      t);
}

int fix_bonus(const xverify::MismatchReport& prev, const sim::WaveTrace& dut, const sim::WaveTrace& ref,
              const sim::WaveTrace& golden) {
    if (dut.cycles.size() != ref.cycles.size() || dut.cycles.size() != golden.cycles.size()) {
        throw std::invalid_argument("fix bonus needs traces of equal length");
    }
    for (const auto& item : prev.items) {
        if (item.test_index >= dut.cycles.size()) continue;
        std::uint64_t a = 0, b = 0, g = 0;
        if (!agree_at(dut, item.test_index, item.signal, a) || !agree_at(ref, item.test_index, item.signal, b) ||
            !agree_at(golden, item.test_index, item.signal, g)) {
            continue;
        }
        if (a == b && b == g) return 1;
    }
    return 0;
}

RewardBreakdown aggregate_reward(double local, int fix, double match, const RewardWeights& w, MatchBasis basis) {
    require_unit(local, "local reward");
    require_unit(match, "match reward");
    if (fix != 0 && fix != 1) throw std::invalid_argument("fix bonus must be 0 or 1");
    if (!(w.delta_local >= 0 && w.delta_fix >= 0 && w.delta_match >= 0)) {
        throw std::invalid_argument("reward weights must be non-negative");
    }
    RewardBreakdown b{local, fix, match, 0.0, basis};
    b.total = w.delta_local * local + w.delta_fix * fix + w.delta_match * match;
    return b;
}

double golden_pass_rate(const sim::WaveTrace& t, const sim::WaveTrace& golden) {
    if (t.cycles.size() != golden.cycles.size()) throw std::invalid_argument("golden trace length differs");
    std::uint64_t total = 0, ok = 0;
    for (std::size_t i = 0; i < golden.cycles.size(); ++i) {
        for (const auto& [name, value] : golden.cycles[i].outputs) {
            ++total;
            auto f = t.cycles[i].outputs.find(name);
            ok += (f != t.cycles[i].outputs.end() && f->second == value) ? 1 : 0;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(total);
}

double pass_at_k(int n, int c, int k) {
    if (n < 1 || c < 0 || c > n || k < 1 || k > n) throw std::invalid_argument("pass@k needs 0<=c<=n and 1<=k<=n");
    if (n - c < k) return 1.0;
    // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k / i)
    double miss = 1.0;
    for (int i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
    return 1.0 - miss;
}

std::vector<std::string> curate_rl_set(const std::vector<std::pair<std::string, double>>& items) {
    std::vector<std::string> out;
    for (const auto& [id, p] : items) {
        require_unit(p, "pass@10");
        if (p >= kCurateLow && p <= kCurateHigh) out.push_back(id);
    }
    return out;
}

nlohmann::json to_json(const RewardBreakdown& b) {
    return {{"local", b.local},
            {"fix", b.fix},
            {"match", b.match},
            {"total", b.total},
            {"basis", b.basis == MatchBasis::golden ? "golden" : "peer"}};
}

RewardBreakdown breakdown_from_json(const nlohmann::json& j) {
    RewardBreakdown b;
    b.local = j.at("local").get<double>();
    b.fix = j.at("fix").get<int>();
    b.match = j.at("match").get<double>();
    b.total = j.at("total").get<double>();
    b.basis = j.value("basis", "peer") == "golden" ? MatchBasis::golden : MatchBasis::peer;
    return b;
}

}  // namespace rtlxv::reward

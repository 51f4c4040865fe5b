#include "rtlxv/xverify/report.hpp"

#include <algorithm>
#include <set>

namespace rtlxv::xverify {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

const char* tier_name(const FailureTier& t) {
    return std::visit(overloaded{[](const CompileError&) { return "compile_error"; },
                                 [](const RuntimeError&) { return "runtime_error"; },
                                 [](const PortMismatch&) { return "port_mismatch"; },
                                 [](const Ran&) { return "ran"; }},
                      t);
}

std::string describe(const FailureTier& t) {
    return std::visit(
        overloaded{[](const CompileError& e) { return "compile error: " + e.detail; },
                   [](const RuntimeError& e) {
                       std::string s = "runtime error";
                       if (e.cycle) s += " at cycle " + std::to_string(*e.cycle);
                       return s + ": " + e.detail;
                   },
                   [](const PortMismatch& e) { return "port mismatch: " + e.detail; },
                   [](const Ran& r) { return "ran, match ratio " + std::to_string(r.match_ratio); }},
        t);
}

double MismatchReport::match_ratio() const {
    if (total_compared == 0) return items.empty() ? 1.0 : 0.0;
    return 1.0 - static_cast<double>(items.size()) / static_cast<double>(total_compared);
}

std::variant<MismatchReport, PortMismatch> compare_traces(const sim::WaveTrace& dut, const sim::WaveTrace& ref) {
    auto dut_out = dut.output_names();
    auto ref_out = ref.output_names();
    std::set<std::string> dset(dut_out.begin(), dut_out.end());
    std::set<std::string> rset(ref_out.begin(), ref_out.end());
    if (dset != rset) {
        std::string detail;
        for (const auto& n : dset) {
            if (!rset.count(n)) detail += (detail.empty() ? "" : "; ") + std::string("reference lacks output ") + n;
        }
        for (const auto& n : rset) {
            if (!dset.count(n)) detail += (detail.empty() ? "" : "; ") + std::string("design lacks output ") + n;
        }
        return PortMismatch{detail};
    }
    if (dut.cycles.size() != ref.cycles.size()) {
        return PortMismatch{"trace lengths differ: " + std::to_string(dut.cycles.size()) + " vs " +
                            std::to_string(ref.cycles.size())};
    }

    MismatchReport r;
    r.num_vectors = dut.cycles.size();
    r.total_compared = r.num_vectors * dset.size();
    r.input_order = dut.input_names();
    for (std::size_t i = 0; i < dut.cycles.size(); ++i) {
        const auto& dc = dut.cycles[i];
        const auto& rc = ref.cycles[i];
        for (const auto& name : dset) {  // sorted, so items come out ordered by (cycle, name)
            auto di = dc.outputs.find(name);
            auto ri = rc.outputs.find(name);
            if (di == dc.outputs.end() || ri == rc.outputs.end()) {
                return PortMismatch{"output " + name + " missing at cycle " + std::to_string(i)};
            }
            if (di->second == ri->second) continue;
            const int dw = dut.width_of(name).value_or(64);
            const int rw = ref.width_of(name).value_or(dw);
            r.items.push_back({i, name, sim::BitVec(dw, di->second), sim::BitVec(rw, ri->second), dc.inputs});
        }
    }
    return r;
}

std::size_t count_code_points(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += is_continuation(c) ? 0 : 1;
    return n;
}

std::string truncate_code_points(const std::string& s, std::size_t limit) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (is_continuation(static_cast<unsigned char>(s[i]))) continue;
        if (n == limit) return s.substr(0, i);
        ++n;
    }
    return s;
}

std::string render_diagnostics(const MismatchReport& r, Role role) {
    if (r.items.empty()) return "No mismatches detected.";
    const bool v = role == Role::verilog;
    const std::string self = v ? "Verilog" : "Python";
    const std::string peer = v ? "Python" : "Verilog";

    std::string out = self + " vs " + peer + ": " + std::to_string(r.items.size()) + "/" +
                      std::to_string(r.total_compared) + " mismatches across " + std::to_string(r.num_vectors) +
                      " test vectors.\n";
    out += "First mismatches (got = your " + self + ", exp = peer " + peer + "):\n";
    const std::size_t shown = std::min(r.items.size(), kShownMismatches);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& it = r.items[i];
        const auto& got = v ? it.got : it.exp;
        const auto& exp = v ? it.exp : it.got;
        out += "  Test " + std::to_string(it.test_index) + ", signal `" + it.signal +
               "': got=" + std::to_string(got.value) + ", exp=" + std::to_string(exp.value) + "\n";
        std::string inputs;
        std::set<std::string> listed;
        auto add = [&](const std::string& name, std::uint64_t value) {
            inputs += (inputs.empty() ? "" : ", ") + name + "=" + std::to_string(value);
        };
        for (const auto& name : r.input_order) {
            if (auto f = it.inputs.find(name); f != it.inputs.end()) {
                add(name, f->second);
                listed.insert(name);
            }
        }
        for (const auto& [name, value] : it.inputs) {
            if (!listed.count(name)) add(name, value);
        }
        out += "    (inputs: " + inputs + ")\n";
    }
    if (r.items.size() > kShownMismatches) out += "  ...(up to 5 mismatches shown)...\n";
    out += "Check your logic carefully. Either you or the " + peer + " agent is wrong \xE2\x80\x94\n";
    out += "only change your code if you think your previous code is wrong.";
    return truncate_code_points(out, kDiagnosticLimit);
}

}  // namespace rtlxv::xverify

#include "rtlxv/xverify/xverify.hpp"

#include <algorithm>

#include "rtlxv/compile.hpp"
#include "rtlxv/sim/interpreter.hpp"

namespace rtlxv::xverify {

namespace {

std::string first_error(const CompileResult& r) {
    for (const auto& d : r.diagnostics) {
        if (d.severity == Severity::error) return format_diagnostic(d, r.origin);
    }
    return "compilation failed";
}

std::string port_difference(const std::vector<sim::PortInfo>& got, const std::vector<sim::PortInfo>& want) {
    auto key = [](const sim::PortInfo& p) { return p.name; };
    std::string detail;
    auto note = [&](const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; };
    for (const auto& w : want) {
        auto f = std::find_if(got.begin(), got.end(), [&](const sim::PortInfo& g) { return key(g) == w.name; });
        if (f == got.end()) {
            note("missing port " + w.name);
        } else if (f->direction != w.direction) {
            note("port " + w.name + " has the wrong direction");
        } else if (f->width != w.width) {
            note("port " + w.name + " is " + std::to_string(f->width) + " bits, expected " + std::to_string(w.width));
        }
    }
    for (const auto& g : got) {
        if (std::none_of(want.begin(), want.end(), [&](const sim::PortInfo& w) { return w.name == g.name; })) {
            note("unexpected port " + g.name);
        }
    }
    return detail;
}

}  // namespace

std::vector<StimulusPort> ProblemInterface::stimulus_ports() const {
    return xverify::stimulus_ports(ports, clocks);
}

ProblemInterface interface_of(const ir::Design& d) {
    ProblemInterface iface;
    iface.ports = sim::trace_ports(d);
    for (ir::NetId id : d.inputs()) {
        if (d.is_clock(id)) iface.clocks.push_back(d.nets[static_cast<std::size_t>(id)].name);
    }
    return iface;
}

SideRun run_verilog(const std::string& verilog_text, const ProblemInterface& iface,
                    const std::vector<sim::ValueMap>& stimuli) {
    SideRun out;
    auto compiled = compile_verilog({verilog_text, "candidate.v"});
    if (!compiled.ok()) {
        out.failure = CompileError{first_error(compiled)};
        return out;
    }
    const ir::Design& d = *compiled.design;
    auto ports = sim::trace_ports(d);
    if (auto diff = port_difference(ports, iface.ports); !diff.empty()) {
        out.failure = PortMismatch{diff};
        return out;
    }
    // Interface clocks that the design reads as data (or ignores) are held at 1, as on the reference side.
    std::vector<sim::ValueMap> applied = stimuli;
    for (ir::NetId id : d.inputs()) {
        const auto& name = d.nets[static_cast<std::size_t>(id)].name;
        if (d.is_clock(id) || std::find(iface.clocks.begin(), iface.clocks.end(), name) == iface.clocks.end()) continue;
        for (auto& m : applied) m.emplace(name, 1);
    }
    try {
        sim::WaveTrace t = sim::run_trace(d, applied);
        t.ports = iface.ports;
        out.trace = std::move(t);
        out.failure = Ran{1.0};
    } catch (const std::exception& e) {
        out.failure = RuntimeError{e.what(), std::nullopt};
    }
    return out;
}

SideRun run_python(const std::string& python_text, const ProblemInterface& iface,
                   const std::vector<sim::ValueMap>& stimuli, const ShimConfig& shim) {
    SideRun out;
    auto r = run_reference(python_text, iface.ports, stimuli, shim);
    if (auto* t = std::get_if<sim::WaveTrace>(&r)) {
        out.trace = std::move(*t);
        out.failure = Ran{1.0};
    } else {
        out.failure = std::get<FailureTier>(r);
    }
    return out;
}

PairResult pair_runs(const SideRun& v, const SideRun& p) {
    PairResult r{v.failure, p.failure, std::nullopt};
    if (v.ran() && p.ran()) {
        auto cmp = compare_traces(*v.trace, *p.trace);
        if (auto* rep = std::get_if<MismatchReport>(&cmp)) {
            r.verilog = Ran{rep->match_ratio()};
            r.python = Ran{rep->match_ratio()};
            r.report = std::move(*rep);
        } else {
            r.verilog = Ran{0.0};
            r.python = std::get<PortMismatch>(cmp);
        }
        return r;
    }
    if (v.ran()) r.verilog = Ran{0.0};
    if (p.ran()) r.python = Ran{0.0};
    return r;
}

PairResult cross_verify(const std::string& verilog_text, const std::string& python_text,
                        const std::optional<ProblemInterface>& iface, const XverifyOptions& opts) {
    std::optional<ProblemInterface> use = iface;
    if (!use) {
        auto compiled = compile_verilog({verilog_text, "candidate.v"});
        if (compiled.ok()) use = interface_of(*compiled.design);
    }
    if (!use) {
        // Nothing to drive the Python side with; only check that it loads.
        SideRun v;
        v.failure = CompileError{first_error(compile_verilog({verilog_text, "candidate.v"}))};
        SideRun p = run_python(python_text, ProblemInterface{}, {}, opts.shim);
        if (p.ran()) p.trace->cycles.clear();
        return pair_runs(v, p);
    }
    auto stimuli = gen_stimuli(use->stimulus_ports(), opts.plan);
    SideRun v = run_verilog(verilog_text, *use, stimuli);
    SideRun p = run_python(python_text, *use, stimuli, opts.shim);
    return pair_runs(v, p);
}

}  // namespace rtlxv::xverify

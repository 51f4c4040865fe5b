#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtlxv/ir/ir.hpp"
#include "rtlxv/sim/trace.hpp"
#include "rtlxv/xverify/report.hpp"
#include "rtlxv/xverify/shim.hpp"
#include "rtlxv/xverify/stimuli.hpp"

namespace rtlxv::xverify {

/// Port table of a problem plus the inputs that act as clocks.
struct ProblemInterface {
    std::vector<sim::PortInfo> ports;
    std::vector<std::string> clocks;

    [[nodiscard]] std::vector<StimulusPort> stimulus_ports() const;
    bool operator==(const ProblemInterface&) const = default;
};

[[nodiscard]] ProblemInterface interface_of(const ir::Design& d);

struct XverifyOptions {
    StimulusPlan plan;
    ShimConfig shim = ShimConfig::from_environment();
};

/// One side executed on the shared stimuli: a trace, or the tier it failed at.
struct SideRun {
    std::optional<sim::WaveTrace> trace;
    FailureTier failure = CompileError{};

    [[nodiscard]] bool ran() const { return trace.has_value(); }
};

/// Compiles and simulates Verilog; ports must equal the interface's (any order).
[[nodiscard]] SideRun run_verilog(const std::string& verilog_text, const ProblemInterface& iface,
                                  const std::vector<sim::ValueMap>& stimuli);
[[nodiscard]] SideRun run_python(const std::string& python_text, const ProblemInterface& iface,
                                 const std::vector<sim::ValueMap>& stimuli, const ShimConfig& shim);

struct PairResult {
    FailureTier verilog;
    FailureTier python;
    std::optional<MismatchReport> report;  // set when both sides ran

    [[nodiscard]] double match_ratio() const { return report ? report->match_ratio() : 0.0; }
};

/// Combines two side runs. A side that ran while its peer failed gets Ran(0).
[[nodiscard]] PairResult pair_runs(const SideRun& v, const SideRun& p);

/// End to end. Without an interface the Verilog design's own ports are used.
[[nodiscard]] PairResult cross_verify(const std::string& verilog_text, const std::string& python_text,
                                      const std::optional<ProblemInterface>& iface, const XverifyOptions& opts);

}  // namespace rtlxv::xverify

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rtlxv/pyref/emitter.hpp"
#include "rtlxv/sim/trace.hpp"
#include "rtlxv/xverify/report.hpp"

namespace rtlxv::xverify {

/// How to launch the reference-model runner. It speaks JSON lines on stdin/stdout.
struct ShimConfig {
    std::vector<std::string> command;
    std::chrono::milliseconds timeout{10000};  // wall clock per run

    /// RTLXV_SHIM (split on whitespace) if set, otherwise python3 with the bundled runner.
    static ShimConfig from_environment();
};

/// A running shim child. Not copyable; the destructor kills and reaps the child.
class ShimProcess {
public:
    explicit ShimProcess(const std::vector<std::string>& command);
    ~ShimProcess();
    ShimProcess(const ShimProcess&) = delete;
    ShimProcess& operator=(const ShimProcess&) = delete;

    enum class Status { ok, timeout, closed };

    /// Sends one frame and waits for one reply line until `deadline`.
    Status request(const nlohmann::json& frame, std::chrono::steady_clock::time_point deadline,
                   nlohmann::json& reply);
    /// Sends quit and waits briefly for the child to exit.
    void close();

private:
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

using ReferenceOutcome = std::variant<sim::WaveTrace, FailureTier>;

/// Runs a reference model over `stimuli`. Manifest inputs absent from a stimulus map (clocks) are sent as 1.
[[nodiscard]] ReferenceOutcome run_reference(const std::string& python_source,
                                             const std::vector<sim::PortInfo>& manifest,
                                             const std::vector<sim::ValueMap>& stimuli, const ShimConfig& cfg);
[[nodiscard]] ReferenceOutcome run_reference(const pyref::RefSource& src, const std::vector<sim::ValueMap>& stimuli,
                                             const ShimConfig& cfg);

}  // namespace rtlxv::xverify

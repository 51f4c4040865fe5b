#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rtlxv/orchestrator/agent.hpp"

namespace rtlxv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitError = 2;

/// Runs one command line (without the program name). Never throws; failures map to kExitError.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct AgentsConfig {
    orchestrator::AgentEndpoint verilog;
    orchestrator::AgentEndpoint python;
};

/// Reads the [verilog] and [python] (or [reference]) tables of an agents file.
/// Response files are resolved relative to the agents file. Throws std::runtime_error.
[[nodiscard]] AgentsConfig load_agents(const std::string& path);

}  // namespace rtlxv::cli

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "rtlxv/xverify/xverify.hpp"

namespace rtlxv::orchestrator {

/// One design task: natural-language description plus the port table both agents must honor.
struct Problem {
    std::string id;
    std::string description;
    xverify::ProblemInterface iface;
    std::string module_name = "TopModule";
    std::optional<std::string> skeleton;        // reference-side skeleton; derived from the port table when absent
    std::optional<std::string> golden_verilog;  // training-time oracle, never shown to agents
};

/// The reference-side skeleton for `p`.
[[nodiscard]] std::string skeleton_for(const Problem& p);

/// Builds a problem from a Verilog design: interface, skeleton and golden from the same source.
[[nodiscard]] Problem problem_from_verilog(const std::string& id, const std::string& description,
                                           const std::string& verilog_text);

[[nodiscard]] nlohmann::json to_json(const Problem& p);
/// Throws nlohmann::json::exception or std::invalid_argument on malformed input.
[[nodiscard]] Problem problem_from_json(const nlohmann::json& j);

}  // namespace rtlxv::orchestrator

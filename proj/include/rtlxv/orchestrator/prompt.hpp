#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rtlxv/orchestrator/agent.hpp"
#include "rtlxv/orchestrator/problem.hpp"
#include "rtlxv/xverify/report.hpp"

namespace rtlxv::orchestrator {

inline constexpr const char* kPromptVersion = "v1";
inline constexpr std::size_t kAttemptLimit = 1500;
inline constexpr std::size_t kHistoryDepth = 2;

/// Template text by name (file stem under prompts/v1), without the trailing newline.
/// Throws std::out_of_range for an unknown name.
[[nodiscard]] const std::string& prompt_template(const std::string& name);
[[nodiscard]] std::vector<std::string> prompt_template_names();

/// Replaces every {key} in `tmpl`; unknown placeholders are left as they are.
[[nodiscard]] std::string fill(std::string tmpl, const std::vector<std::pair<std::string, std::string>>& values);

/// Interface bullet list: "  - input  in  (3 bits)"; one-bit ports omit the width.
[[nodiscard]] std::string port_list(const std::vector<sim::PortInfo>& ports);

struct Attempt {
    int number = 1;  // 1-based attempt index within the session
    std::string code;
};

/// Code cut to kAttemptLimit code points, followed by the role's truncation marker when cut.
[[nodiscard]] std::string truncate_attempt(const std::string& code, Role role);

/// System prompt plus one user message. Retry fragments are appended only when turn > 0.
[[nodiscard]] std::vector<ChatMessage> build_prompt(Role role, const Problem& problem, const std::string& skeleton,
                                                    const std::vector<Attempt>& history,
                                                    const std::optional<xverify::MismatchReport>& report, int turn);

/// Code inside the last ```lang fence of the <answer> section (or of the whole response). nullopt if none.
[[nodiscard]] std::optional<std::string> extract_code(const std::string& response, Role role);

}  // namespace rtlxv::orchestrator

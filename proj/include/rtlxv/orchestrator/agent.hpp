#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtlxv/xverify/report.hpp"

namespace rtlxv::orchestrator {

using xverify::Role;

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
    bool operator==(const ChatMessage&) const = default;
};

/// Transport failure; the session retries the call.
class AgentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SampleContext {
    int turn = 0;
    std::uint64_t seed = 0;
};

/// Opaque sampler for one role. Returns raw responses; code is extracted by the caller.
class Agent {
public:
    explicit Agent(Role role) : role_(role) {}
    virtual ~Agent() = default;
    [[nodiscard]] Role role() const { return role_; }
    virtual std::vector<std::string> sample(const std::vector<ChatMessage>& prompt, int n, const SampleContext& ctx) = 0;

private:
    Role role_;
};

/// Cycles through a fixed list of responses.
class MockAgent : public Agent {
public:
    MockAgent(Role role, std::vector<std::string> outputs);
    std::vector<std::string> sample(const std::vector<ChatMessage>& prompt, int n, const SampleContext& ctx) override;

private:
    std::vector<std::string> outputs_;
};

/// Canned responses per turn; turns past the script repeat the last entry.
class ScriptedAgent : public Agent {
public:
    ScriptedAgent(Role role, std::vector<std::vector<std::string>> per_turn);
    std::vector<std::string> sample(const std::vector<ChatMessage>& prompt, int n, const SampleContext& ctx) override;
    [[nodiscard]] const std::vector<std::vector<ChatMessage>>& seen_prompts() const { return seen_; }

private:
    std::vector<std::vector<std::string>> per_turn_;
    std::vector<std::vector<ChatMessage>> seen_;
};

struct ChatSettings {
    std::string base_url;  // e.g. http://127.0.0.1:8000/v1
    std::string model;
    double temperature = 0.7;
    int max_tokens = 4096;
    std::string api_key;  // sent as a bearer token when non-empty
    int timeout_seconds = 120;
};

/// Chat-completion client: one POST to {base_url}/chat/completions per sample.
class ChatAgent : public Agent {
public:
    ChatAgent(Role role, ChatSettings settings);
    std::vector<std::string> sample(const std::vector<ChatMessage>& prompt, int n, const SampleContext& ctx) override;

private:
    ChatSettings s_;
};

/// Agent description as read from a configuration file.
struct AgentEndpoint {
    std::string kind = "mock";  // mock | scripted | chat
    Role role = Role::verilog;
    std::vector<std::string> outputs;                // mock
    std::vector<std::vector<std::string>> script;    // scripted
    ChatSettings chat;                               // chat
};

/// Throws std::invalid_argument for an unknown kind or a missing field.
[[nodiscard]] AgentEndpoint endpoint_from_json(const nlohmann::json& j);
[[nodiscard]] std::unique_ptr<Agent> make_agent(const AgentEndpoint& e);

}  // namespace rtlxv::orchestrator

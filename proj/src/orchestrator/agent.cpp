#include "rtlxv/orchestrator/agent.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>

namespace rtlxv::orchestrator {

using nlohmann::json;

MockAgent::MockAgent(Role role, std::vector<std::string> outputs) : Agent(role), outputs_(std::move(outputs)) {
    if (outputs_.empty()) throw std::invalid_argument("mock agent needs at least one output");
}

std::vector<std::string> MockAgent::sample(const std::vector<ChatMessage>&, int n, const SampleContext&) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(outputs_[static_cast<std::size_t>(i) % outputs_.size()]);
    return out;
}

ScriptedAgent::ScriptedAgent(Role role, std::vector<std::vector<std::string>> per_turn)
    : Agent(role), per_turn_(std::move(per_turn)) {
    if (per_turn_.empty() || std::any_of(per_turn_.begin(), per_turn_.end(), [](const auto& t) { return t.empty(); })) {
        throw std::invalid_argument("scripted agent needs a non-empty response list for every turn");
    }
}

std::vector<std::string> ScriptedAgent::sample(const std::vector<ChatMessage>& prompt, int n, const SampleContext& ctx) {
    seen_.push_back(prompt);
    const auto& turn = per_turn_[std::min<std::size_t>(static_cast<std::size_t>(std::max(ctx.turn, 0)), per_turn_.size() - 1)];
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) out.push_back(turn[static_cast<std::size_t>(i) % turn.size()]);
    return out;
}

ChatAgent::ChatAgent(Role role, ChatSettings settings) : Agent(role), s_(std::move(settings)) {
    if (s_.base_url.rfind("http://", 0) != 0) throw std::invalid_argument("chat base_url must start with http://");
    if (s_.model.empty()) throw std::invalid_argument("chat agent needs a model name");
}

std::vector<std::string> ChatAgent::sample(const std::vector<ChatMessage>& prompt, int n, const SampleContext& ctx) {
    const std::string rest = s_.base_url.substr(7);
    const std::size_t slash = rest.find('/');
    const std::string host = "http://" + rest.substr(0, slash);
    std::string path = slash == std::string::npos ? "" : rest.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
    path += "/chat/completions";

    httplib::Client cli(host);
    cli.set_connection_timeout(s_.timeout_seconds, 0);
    cli.set_read_timeout(s_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!s_.api_key.empty()) headers.emplace("Authorization", "Bearer " + s_.api_key);

    json messages = json::array();
    for (const auto& m : prompt) messages.push_back({{"role", m.role}, {"content", m.content}});

    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        json body = {{"model", s_.model},
                     {"messages", messages},
                     {"temperature", s_.temperature},
                     {"max_tokens", s_.max_tokens},
                     {"seed", ctx.seed + static_cast<std::uint64_t>(i)}};
        auto res = cli.Post(path, headers, body.dump(), "application/json");
        if (!res) throw AgentError("chat request failed: " + httplib::to_string(res.error()));
        if (res->status != 200) throw AgentError("chat endpoint returned HTTP " + std::to_string(res->status));
        auto reply = json::parse(res->body, nullptr, false);
        if (!reply.is_object() || !reply.contains("choices") || reply["choices"].empty()) {
            throw AgentError("chat endpoint returned no choices");
        }
        const auto& msg = reply["choices"][0]["message"];
        if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string()) {
            throw AgentError("chat reply has no message content");
        }
        out.push_back(msg["content"].get<std::string>());
    }
    return out;
}

AgentEndpoint endpoint_from_json(const json& j) {
    AgentEndpoint e;
    e.kind = j.value("kind", "mock");
    const std::string role = j.value("role", "verilog");
    if (role == "verilog") {
        e.role = Role::verilog;
    } else if (role == "python" || role == "reference") {
        e.role = Role::python;
    } else {
        throw std::invalid_argument("unknown agent role '" + role + "'");
    }
    if (e.kind == "mock") {
        e.outputs = j.at("outputs").get<std::vector<std::string>>();
    } else if (e.kind == "scripted") {
        e.script = j.at("script").get<std::vector<std::vector<std::string>>>();
    } else if (e.kind == "chat") {
        e.chat.base_url = j.at("base_url").get<std::string>();
        e.chat.model = j.at("model").get<std::string>();
        e.chat.temperature = j.value("temperature", 0.7);
        e.chat.max_tokens = j.value("max_tokens", 4096);
        e.chat.timeout_seconds = j.value("timeout_seconds", 120);
        const std::string env = j.value("api_key_env", "RTLXV_API_KEY");
        if (const char* key = std::getenv(env.c_str())) e.chat.api_key = key;
    } else {
        throw std::invalid_argument("unknown agent kind '" + e.kind + "'");
    }
    return e;
}

std::unique_ptr<Agent> make_agent(const AgentEndpoint& e) {
    if (e.kind == "mock") return std::make_unique<MockAgent>(e.role, e.outputs);
    if (e.kind == "scripted") return std::make_unique<ScriptedAgent>(e.role, e.script);
    if (e.kind == "chat") return std::make_unique<ChatAgent>(e.role, e.chat);
    throw std::invalid_argument("unknown agent kind '" + e.kind + "'");
}

}  // namespace rtlxv::orchestrator

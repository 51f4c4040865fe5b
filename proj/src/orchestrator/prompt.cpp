#include "rtlxv/orchestrator/prompt.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace rtlxv::orchestrator {

namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
}

namespace {

const char* side(Role r) { return r == Role::verilog ? "verilog" : "python"; }

const std::map<std::string, std::string>& templates() {
    static const std::map<std::string, std::string> table = [] {
        std::map<std::string, std::string> t;
        for (auto [name, text] : detail::embedded_prompts()) {
            if (!text.empty() && text.back() == '\n') text.pop_back();
            t.emplace(name, std::move(text));
        }
        return t;
    }();
    return table;
}

std::string trim_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

std::string pad(const std::string& s, std::size_t n) { return s.size() >= n ? s : s + std::string(n - s.size(), ' '); }

struct Fence {
    std::string lang;
    std::string body;
};

std::vector<Fence> fences(const std::string& text) {
    std::vector<Fence> out;
    std::size_t pos = 0;
    for (;;) {
        std::size_t open = text.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t eol = text.find('\n', open + 3);
        if (eol == std::string::npos) break;
        std::string lang = text.substr(open + 3, eol - open - 3);
        lang.erase(std::remove_if(lang.begin(), lang.end(), [](unsigned char c) { return std::isspace(c); }), lang.end());
        std::size_t close = text.find("```", eol + 1);
        if (close == std::string::npos) break;
        std::transform(lang.begin(), lang.end(), lang.begin(), [](unsigned char c) { return std::tolower(c); });
        out.push_back({lang, text.substr(eol + 1, close - eol - 1)});
        pos = close + 3;
    }
    return out;
}

bool lang_matches(const std::string& lang, Role role) {
    if (role == Role::verilog) return lang == "verilog" || lang == "systemverilog" || lang == "v" || lang == "sv";
    return lang == "python" || lang == "py" || lang == "python3";
}

}  // namespace

const std::string& prompt_template(const std::string& name) { return templates().at(name); }

std::vector<std::string> prompt_template_names() {
    std::vector<std::string> names;
    for (const auto& [n, _] : templates()) names.push_back(n);
    return names;
}

std::string fill(std::string tmpl, const std::vector<std::pair<std::string, std::string>>& values) {
    // Single left-to-right pass so substituted text is never rescanned.
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find('{', pos);
        if (open == std::string::npos) break;
        std::size_t close = tmpl.find('}', open);
        if (close == std::string::npos) break;
        const std::string key = tmpl.substr(open + 1, close - open - 1);
        auto it = std::find_if(values.begin(), values.end(), [&](const auto& kv) { return kv.first == key; });
        out.append(tmpl, pos, open - pos);
        if (it != values.end()) {
            out += it->second;
        } else {
            out.append(tmpl, open, close - open + 1);
        }
        pos = close + 1;
    }
    out.append(tmpl, pos, std::string::npos);
    return out;
}

std::string port_list(const std::vector<sim::PortInfo>& ports) {
    std::size_t name_w = 0;
    for (const auto& p : ports) name_w = std::max(name_w, p.name.size());
    std::string out;
    for (const auto& p : ports) {
        if (!out.empty()) out += "\n";
        std::string line = "  - " + pad(p.direction == sim::Direction::input ? "input" : "output", 6) + " ";
        if (p.width > 1) {
            line += pad(p.name, name_w) + " (" + std::to_string(p.width) + " bits)";
        } else {
            line += p.name;
        }
        out += line;
    }
    return out;
}

std::string truncate_attempt(const std::string& code, Role role) {
    std::string body = trim_trailing_newlines(code);
    if (xverify::count_code_points(body) <= kAttemptLimit) return body;
    return xverify::truncate_code_points(body, kAttemptLimit) + "\n" +
           prompt_template(std::string("truncation_") + side(role));
}

std::vector<ChatMessage> build_prompt(Role role, const Problem& problem, const std::string& skeleton,
                                      const std::vector<Attempt>& history,
                                      const std::optional<xverify::MismatchReport>& report, int turn) {
    const std::string s = side(role);
    std::string user;
    if (role == Role::verilog) {
        user = fill(prompt_template("user_verilog"), {{"module_name", problem.module_name},
                                                      {"port_list", port_list(problem.iface.ports)},
                                                      {"description", problem.description}});
    } else {
        user = fill(prompt_template("user_python"), {{"description", problem.description}, {"skeleton", skeleton}});
    }
    if (turn > 0) {
        std::vector<std::string> fragments;
        if (!history.empty()) {
            const std::size_t first = history.size() > kHistoryDepth ? history.size() - kHistoryDepth : 0;
            std::string attempts;
            for (std::size_t i = first; i < history.size(); ++i) {
                if (!attempts.empty()) attempts += "\n\n";
                attempts += fill(prompt_template("attempt_" + s),
                                 {{"number", std::to_string(history[i].number)},
                                  {"code", truncate_attempt(history[i].code, role)}});
            }
            fragments.push_back(fill(prompt_template("previous_code_" + s), {{"attempts", attempts}}));
        }
        if (report) {
            fragments.push_back(fill(prompt_template("error_log"),
                                     {{"error_log", xverify::render_diagnostics(*report, role)}}));
        }
        fragments.push_back(prompt_template("refine_" + s));
        for (const auto& f : fragments) user += "\n\n" + f;
    }
    return {{"system", prompt_template("system_" + s)}, {"user", user}};
}

std::optional<std::string> extract_code(const std::string& response, Role role) {
    std::string region = response;
    if (std::size_t a = response.rfind("<answer>"); a != std::string::npos) {
        std::size_t end = response.find("</answer>", a);
        region = response.substr(a + 8, end == std::string::npos ? std::string::npos : end - a - 8);
    }
    auto blocks = fences(region);
    if (blocks.empty() && region.size() != response.size()) blocks = fences(response);
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        if (lang_matches(it->lang, role)) return it->body;
    }
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        if (it->lang.empty()) return it->body;
    }
    return std::nullopt;
}

}  // namespace rtlxv::orchestrator

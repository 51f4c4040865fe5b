#include "rtlxv/orchestrator/problem.hpp"

#include <stdexcept>

#include "rtlxv/compile.hpp"
#include "rtlxv/pyref/emitter.hpp"

namespace rtlxv::orchestrator {

using nlohmann::json;

std::string skeleton_for(const Problem& p) {
    if (p.skeleton) return *p.skeleton;
    pyref::SkeletonSpec spec;
    spec.ports = p.iface.ports;
    spec.clocks = p.iface.clocks;
    spec.sequential = !p.iface.clocks.empty();
    return pyref::emit_skeleton(spec);
}

Problem problem_from_verilog(const std::string& id, const std::string& description, const std::string& verilog_text) {
    auto compiled = compile_verilog({verilog_text, id});
    if (!compiled.ok()) throw std::invalid_argument("golden design does not compile:\n" + compiled.message());
    Problem p;
    p.id = id;
    p.description = description;
    p.iface = xverify::interface_of(*compiled.design);
    p.skeleton = pyref::emit_skeleton(*compiled.design);
    p.golden_verilog = verilog_text;
    return p;
}

json to_json(const Problem& p) {
    json ports = json::array();
    for (const auto& port : p.iface.ports) {
        ports.push_back({{"name", port.name},
                         {"direction", port.direction == sim::Direction::input ? "input" : "output"},
                         {"width", port.width}});
    }
    json j = {{"id", p.id},
              {"description", p.description},
              {"module_name", p.module_name},
              {"ports", ports},
              {"clocks", p.iface.clocks}};
    if (p.skeleton) j["skeleton"] = *p.skeleton;
    if (p.golden_verilog) j["golden_verilog"] = *p.golden_verilog;
    return j;
}

Problem problem_from_json(const json& j) {
    Problem p;
    p.id = j.value("id", "");
    p.description = j.at("description").get<std::string>();
    p.module_name = j.value("module_name", "TopModule");
    for (const auto& port : j.at("ports")) {
        sim::PortInfo info;
        info.name = port.at("name").get<std::string>();
        const auto dir = port.at("direction").get<std::string>();
        if (dir != "input" && dir != "output") throw std::invalid_argument("port direction must be input or output");
        info.direction = dir == "input" ? sim::Direction::input : sim::Direction::output;
        info.width = port.value("width", 1);
        if (info.width < 1 || info.width > 64) throw std::invalid_argument("port width must be 1..64");
        p.iface.ports.push_back(std::move(info));
    }
    if (j.contains("clocks")) p.iface.clocks = j.at("clocks").get<std::vector<std::string>>();
    if (j.contains("skeleton")) p.skeleton = j.at("skeleton").get<std::string>();
    if (j.contains("golden_verilog")) p.golden_verilog = j.at("golden_verilog").get<std::string>();
    return p;
}

}  // namespace rtlxv::orchestrator

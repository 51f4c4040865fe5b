#include "rtlxv/sim/trace.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rtlxv::sim {

std::vector<std::string> WaveTrace::output_names() const {
    std::vector<std::string> r;
    for (const auto& p : ports) {
        if (p.direction == Direction::output) r.push_back(p.name);
    }
    return r;
}

std::vector<std::string> WaveTrace::input_names() const {
    std::vector<std::string> r;
    for (const auto& p : ports) {
        if (p.direction == Direction::input) r.push_back(p.name);
    }
    return r;
}

std::optional<int> WaveTrace::width_of(const std::string& name) const {
    for (const auto& p : ports) {
        if (p.name == name) return p.width;
    }
    return std::nullopt;
}

std::string to_jsonl(const WaveTrace& t) {
    std::string out;
    for (std::size_t i = 0; i < t.cycles.size(); ++i) {
        nlohmann::ordered_json rec;
        rec["cycle"] = i;
        nlohmann::ordered_json in = nlohmann::ordered_json::object();
        nlohmann::ordered_json outs = nlohmann::ordered_json::object();
        for (const auto& p : t.ports) {
            const ValueMap& src = p.direction == Direction::input ? t.cycles[i].inputs : t.cycles[i].outputs;
            auto it = src.find(p.name);
            if (it == src.end()) continue;
            (p.direction == Direction::input ? in : outs)[p.name] = it->second;
        }
        rec["inputs"] = std::move(in);
        rec["outputs"] = std::move(outs);
        out += rec.dump() + "\n";
    }
    return out;
}

WaveTrace from_jsonl(const std::string& text, const std::vector<PortInfo>& ports) {
    WaveTrace t;
    t.ports = ports;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw std::runtime_error("malformed trace line: " + line);
        CycleRecord rec;
        for (const char* key : {"inputs", "outputs"}) {
            if (!j.contains(key) || !j[key].is_object()) throw std::runtime_error("trace line lacks '" + std::string(key) + "'");
            ValueMap& dst = std::string(key) == "inputs" ? rec.inputs : rec.outputs;
            for (const auto& [name, v] : j[key].items()) {
                if (!v.is_number_unsigned()) throw std::runtime_error("trace value of '" + name + "' is not a non-negative integer");
                dst[name] = v.get<std::uint64_t>();
            }
        }
        t.cycles.push_back(std::move(rec));
    }
    return t;
}

namespace {

std::string vcd_id(std::size_t i) {
    std::string s;
    do {
        s.push_back(static_cast<char>('!' + i % 94));
        i /= 94;
    } while (i);
    return s;
}

std::string binary(std::uint64_t v, int width) {
    std::string s;
    for (int b = width - 1; b >= 0; --b) s.push_back(((v >> b) & 1) ? '1' : '0');
    return s;
}

}  // namespace

std::string to_vcd(const WaveTrace& t, const std::string& module_name) {
    std::ostringstream os;
    os << "$timescale 1ns $end\n$scope module " << module_name << " $end\n";
    for (std::size_t i = 0; i < t.ports.size(); ++i) {
        os << "$var wire " << t.ports[i].width << " " << vcd_id(i) << " " << t.ports[i].name << " $end\n";
    }
    os << "$upscope $end\n$enddefinitions $end\n";
    std::vector<std::optional<std::uint64_t>> last(t.ports.size());
    for (std::size_t c = 0; c < t.cycles.size(); ++c) {
        std::ostringstream changes;
        for (std::size_t i = 0; i < t.ports.size(); ++i) {
            const auto& p = t.ports[i];
            const ValueMap& src = p.direction == Direction::input ? t.cycles[c].inputs : t.cycles[c].outputs;
            auto it = src.find(p.name);
            if (it == src.end() || last[i] == it->second) continue;
            last[i] = it->second;
            if (p.width == 1) {
                changes << (it->second & 1) << vcd_id(i) << "\n";
            } else {
                changes << "b" << binary(it->second, p.width) << " " << vcd_id(i) << "\n";
            }
        }
        std::string body = changes.str();
        if (c == 0 || !body.empty()) os << "#" << c * 10 << "\n" << body;
    }
    os << "#" << t.cycles.size() * 10 << "\n";
    return os.str();
}

}  // namespace rtlxv::sim

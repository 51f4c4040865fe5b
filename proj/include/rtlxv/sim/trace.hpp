#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rtlxv::sim {

/// Fixed-width two-state value; the constructor masks to the width.
struct BitVec {
    int width = 1;
    std::uint64_t value = 0;

    BitVec() = default;
    BitVec(int w, std::uint64_t v);
    bool operator==(const BitVec&) const = default;
};

/// Port values by name.
using ValueMap = std::map<std::string, std::uint64_t>;

enum class Direction { input, output };

struct PortInfo {
    std::string name;
    Direction direction = Direction::input;
    int width = 1;
    bool operator==(const PortInfo&) const = default;
};

struct CycleRecord {
    ValueMap inputs;
    ValueMap outputs;
    bool operator==(const CycleRecord&) const = default;
};

/// Per-cycle input/output record of one run. `ports` fixes declaration order and widths.
struct WaveTrace {
    std::vector<PortInfo> ports;
    std::vector<CycleRecord> cycles;

    [[nodiscard]] std::vector<std::string> output_names() const;
    [[nodiscard]] std::vector<std::string> input_names() const;
    [[nodiscard]] std::optional<int> width_of(const std::string& name) const;
    bool operator==(const WaveTrace&) const = default;
};

/// One JSON object per line: {"cycle":i,"inputs":{...},"outputs":{...}} with keys in port order.
[[nodiscard]] std::string to_jsonl(const WaveTrace& t);
/// Inverse of to_jsonl; `ports` supplies order and widths. Throws std::runtime_error on malformed input.
[[nodiscard]] WaveTrace from_jsonl(const std::string& text, const std::vector<PortInfo>& ports);
/// Value-change dump, one time step of 10 units per cycle.
[[nodiscard]] std::string to_vcd(const WaveTrace& t, const std::string& module_name = "TopModule");

}  // namespace rtlxv::sim

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlxv/ir/ir.hpp"
#include "rtlxv/sim/trace.hpp"

namespace rtlxv::sim {

/// Register contents between edges. Every sequential target has an entry, initially 0.
struct SimState {
    std::map<std::string, BitVec> registers;
    std::uint64_t cycle = 0;
    bool operator==(const SimState&) const = default;
};

struct SimWarning {
    std::uint64_t cycle = 0;
    std::string message;
};

/// Raised for missing inputs and other caller errors.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CycleResult {
    ValueMap outputs;
    SimState next;
};

/// Executes one design; holds no per-run state, so one instance can serve concurrent runs.
class Interpreter {
public:
    explicit Interpreter(const ir::Design& d);

    [[nodiscard]] SimState initial_state() const;

    /// Applies one rising edge of every clock. Warnings (division by zero) are appended to `warnings`.
    [[nodiscard]] CycleResult eval_cycle(const SimState& s, const ValueMap& inputs,
                                         std::vector<SimWarning>* warnings = nullptr) const;

    /// Threads state across `stimuli` from the all-zero state.
    [[nodiscard]] WaveTrace run_trace(const std::vector<ValueMap>& stimuli,
                                      std::vector<SimWarning>* warnings = nullptr) const;

    [[nodiscard]] const ir::Design& design() const { return d_; }

private:
    ir::Design d_;
};

[[nodiscard]] CycleResult eval_cycle(const ir::Design& d, const SimState& s, const ValueMap& inputs,
                                     std::vector<SimWarning>* warnings = nullptr);
[[nodiscard]] WaveTrace run_trace(const ir::Design& d, const std::vector<ValueMap>& stimuli,
                                  std::vector<SimWarning>* warnings = nullptr);

/// Port list of `d` in the trace's representation.
[[nodiscard]] std::vector<PortInfo> trace_ports(const ir::Design& d);

}  // namespace rtlxv::sim

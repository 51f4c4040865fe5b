#pragma once

#include <string>
#include <vector>

#include "rtlxv/ir/ir.hpp"
#include "rtlxv/sim/trace.hpp"

namespace rtlxv::pyref {

/// Emitted reference model. Manifest names are the original port names.
struct RefSource {
    std::string text;
    std::string class_name = "TopModule";
    std::vector<sim::PortInfo> port_manifest;
};

/// Behavioral model: one `eval` call per rising edge, every write masked to its width.
[[nodiscard]] RefSource emit_reference(const ir::Design& d);

/// Completion skeleton: state initialization, masked input reads, placeholder body, output stub.
[[nodiscard]] std::string emit_skeleton(const ir::Design& d);

/// Skeleton inputs when no design is available (for example, a problem that only has a port table).
struct SkeletonSpec {
    std::vector<sim::PortInfo> ports;
    std::vector<std::string> clocks;      // inputs never read by the model
    std::vector<std::string> state_vars;  // empty for combinational problems
    bool sequential = false;
};
[[nodiscard]] std::string emit_skeleton(const SkeletonSpec& spec);

/// Port manifest of `d` in declaration order.
[[nodiscard]] std::vector<sim::PortInfo> port_manifest(const ir::Design& d);

/// Python-legal name for a Verilog identifier, avoiding `taken`; keywords and reserved names get `_v`.
[[nodiscard]] std::string python_name(const std::string& verilog_name, const std::vector<std::string>& taken = {});

}  // namespace rtlxv::pyref

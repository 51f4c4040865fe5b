#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtlxv/sim/trace.hpp"

namespace rtlxv::xverify {

struct CompileError {
    std::string detail;
};
struct RuntimeError {
    std::string detail;
    std::optional<std::uint64_t> cycle;
};
struct PortMismatch {
    std::string detail;
};
struct Ran {
    double match_ratio = 0.0;
};

using FailureTier = std::variant<CompileError, RuntimeError, PortMismatch, Ran>;

/// Short one-line description, e.g. "runtime error at cycle 7: ZeroDivisionError".
[[nodiscard]] std::string describe(const FailureTier& t);
[[nodiscard]] const char* tier_name(const FailureTier& t);

struct MismatchItem {
    std::uint64_t test_index = 0;
    std::string signal;
    sim::BitVec got;
    sim::BitVec exp;
    sim::ValueMap inputs;
};

struct MismatchReport {
    std::vector<MismatchItem> items;       // sorted by (test_index, signal)
    std::uint64_t total_compared = 0;      // cycles x output signals
    std::uint64_t num_vectors = 0;
    std::vector<std::string> input_order;  // rendering order for item inputs

    [[nodiscard]] double match_ratio() const;
};

/// Per (cycle, output) comparison. PortMismatch when output sets or lengths differ.
[[nodiscard]] std::variant<MismatchReport, PortMismatch> compare_traces(const sim::WaveTrace& dut,
                                                                       const sim::WaveTrace& ref);

/// Which agent reads the diagnostics. The report is always oriented dut = Verilog, ref = Python.
enum class Role { verilog, python };

inline constexpr std::size_t kDiagnosticLimit = 2000;
inline constexpr std::size_t kShownMismatches = 5;

/// Mismatch fragment for the retry prompt; at most kDiagnosticLimit code points.
[[nodiscard]] std::string render_diagnostics(const MismatchReport& r, Role role = Role::verilog);

/// Truncates UTF-8 text to at most `limit` code points.
[[nodiscard]] std::string truncate_code_points(const std::string& s, std::size_t limit);
[[nodiscard]] std::size_t count_code_points(const std::string& s);

}  // namespace rtlxv::xverify

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rtlxv/diagnostic.hpp"
#include "rtlxv/frontend/parser.hpp"
#include "rtlxv/ir/ir.hpp"

namespace rtlxv {

struct CompileResult {
    std::optional<ir::Design> design;
    std::vector<Diagnostic> diagnostics;
    std::string origin;

    [[nodiscard]] bool ok() const { return design.has_value(); }
    /// All diagnostics formatted one per line.
    [[nodiscard]] std::string message() const;
};

/// Parse, subset check and lowering in one step. Unsupported constructs are reported as errors.
[[nodiscard]] CompileResult compile_verilog(const SourceUnit& src, const frontend::ParamValues& overrides = {});

}  // namespace rtlxv

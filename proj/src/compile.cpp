#include "rtlxv/compile.hpp"

namespace rtlxv {

std::string CompileResult::message() const {
    std::string s;
    for (const auto& d : diagnostics) s += format_diagnostic(d, origin) + "\n";
    return s;
}

CompileResult compile_verilog(const SourceUnit& src, const frontend::ParamValues& overrides) {
    CompileResult out;
    out.origin = src.origin;
    auto parsed = frontend::parse_module(src);
    out.diagnostics = parsed.diagnostics;
    if (!parsed.ok()) return out;
    for (const auto& u : frontend::validate_subset(*parsed.module)) {
        out.diagnostics.push_back({Severity::error, "unsupported construct: " + u.feature, u.line, u.column});
    }
    if (has_errors(out.diagnostics)) return out;
    auto lowered = ir::lower_to_ir(*parsed.module, overrides);
    out.diagnostics.insert(out.diagnostics.end(), lowered.diagnostics.begin(), lowered.diagnostics.end());
    out.design = std::move(lowered.design);
    return out;
}

}  // namespace rtlxv

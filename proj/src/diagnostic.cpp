#include "rtlxv/diagnostic.hpp"

namespace rtlxv {

std::string format_diagnostic(const Diagnostic& d, const std::string& origin) {
    return origin + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
           (d.severity == Severity::error ? "error: " : "warning: ") + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) {
        if (d.severity == Severity::error) return true;
    }
    return false;
}

}  // namespace rtlxv

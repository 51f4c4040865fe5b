#pragma once

#include <string>
#include <vector>

namespace rtlxv {

/// Source text plus a label used in every diagnostic ("<inline>" when not from a file).
struct SourceUnit {
    std::string text;
    std::string origin = "<inline>";
};

struct SourceLoc {
    int line = 1;
    int column = 1;

    // Locations never take part in structural equality of syntax trees.
    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }
};

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string message;
    int line = 1;
    int column = 1;
};

[[nodiscard]] std::string format_diagnostic(const Diagnostic& d, const std::string& origin);
[[nodiscard]] bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace rtlxv

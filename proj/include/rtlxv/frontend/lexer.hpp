#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtlxv/diagnostic.hpp"

namespace rtlxv::frontend {

enum class TokenKind { identifier, system_identifier, number, symbol, end_of_file };

struct Token {
    TokenKind kind = TokenKind::end_of_file;
    std::string text;
    SourceLoc loc;

    // number payload
    std::uint64_t value = 0;
    std::uint64_t dont_care = 0;
    int width = 32;
    bool sized = false;
    bool is_signed = false;
};

struct LexResult {
    std::vector<Token> tokens;  // always terminated by end_of_file
    std::vector<Diagnostic> diagnostics;
};

/// Splits Verilog source into tokens. Comments and whitespace are dropped,
/// `timescale lines are skipped and (* ... *) attributes are skipped with a warning.
[[nodiscard]] LexResult tokenize(const std::string& text);

[[nodiscard]] bool is_keyword(const std::string& word);

}  // namespace rtlxv::frontend

#include "rtlxv/frontend/lexer.hpp"

#include <array>
#include <cctype>
#include <set>
#include <string_view>

namespace rtlxv::frontend {

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "module", "endmodule", "input", "output", "inout", "wire", "reg", "logic", "integer",
    "parameter", "localparam", "assign", "always", "always_comb", "always_ff", "posedge",
    "negedge", "or", "begin", "end", "if", "else", "case", "casez", "casex", "endcase",
    "default", "signed", "unsigned", "generate", "endgenerate", "genvar", "for", "while",
    "repeat", "forever", "initial", "function", "endfunction", "task", "endtask", "real",
    "time", "event", "supply0", "supply1", "tri", "wait", "fork", "join", "defparam",
};

// Longest symbols first.
constexpr std::array<std::string_view, 20> kMultiSymbols = {
    "<<<", ">>>", "===", "!==", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "~&", "~|", "~^", "^~", "+:", "-:", "**", "->",
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : src_(text) {}

    LexResult run() {
        while (true) {
            skip_trivia();
            if (pos_ >= src_.size()) break;
            lex_token();
        }
        Token eof;
        eof.kind = TokenKind::end_of_file;
        eof.loc = here();
        out_.tokens.push_back(eof);
        return std::move(out_);
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    LexResult out_;

    [[nodiscard]] SourceLoc here() const { return {line_, col_}; }
    [[nodiscard]] char peek(std::size_t off = 0) const {
        return pos_ + off < src_.size() ? src_[pos_ + off] : '\0';
    }
    void advance() {
        if (pos_ >= src_.size()) return;
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    void error(SourceLoc at, std::string msg) {
        out_.diagnostics.push_back({Severity::error, std::move(msg), at.line, at.column});
    }
    void warning(SourceLoc at, std::string msg) {
        out_.diagnostics.push_back({Severity::warning, std::move(msg), at.line, at.column});
    }

    void skip_line() {
        while (pos_ < src_.size() && peek() != '\n') advance();
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                skip_line();
            } else if (c == '/' && peek(1) == '*') {
                SourceLoc start = here();
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) {
                    error(start, "unterminated block comment");
                    return;
                }
                advance();
                advance();
            } else if (c == '(' && peek(1) == '*' && peek(2) != ')') {
                SourceLoc start = here();
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == ')')) advance();
                if (pos_ >= src_.size()) {
                    error(start, "unterminated attribute");
                    return;
                }
                advance();
                advance();
                warning(start, "attribute ignored");
            } else if (c == '`') {
                SourceLoc start = here();
                advance();
                std::string word;
                while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                    word.push_back(peek());
                    advance();
                }
                if (word == "timescale" || word == "default_nettype") {
                    skip_line();
                } else {
                    error(start, "unsupported preprocessor directive `" + word);
                    skip_line();
                }
            } else {
                return;
            }
        }
    }

    void lex_token() {
        SourceLoc start = here();
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            Token t;
            t.kind = TokenKind::identifier;
            t.loc = start;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '$') {
                t.text.push_back(peek());
                advance();
            }
            out_.tokens.push_back(std::move(t));
            return;
        }
        if (c == '$') {
            Token t;
            t.kind = TokenKind::system_identifier;
            t.loc = start;
            t.text.push_back(c);
            advance();
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                t.text.push_back(peek());
                advance();
            }
            out_.tokens.push_back(std::move(t));
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
            lex_number(start);
            return;
        }
        if (c == '"') {
            advance();
            while (pos_ < src_.size() && peek() != '"' && peek() != '\n') advance();
            advance();
            error(start, "string literals are not supported");
            return;
        }
        if (c == '\\') {
            error(start, "escaped identifiers are not supported");
            while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(peek()))) advance();
            return;
        }
        for (std::string_view sym : kMultiSymbols) {
            if (src_.compare(pos_, sym.size(), sym) == 0) {
                Token t;
                t.kind = TokenKind::symbol;
                t.text = std::string(sym);
                t.loc = start;
                for (std::size_t i = 0; i < sym.size(); ++i) advance();
                out_.tokens.push_back(std::move(t));
                return;
            }
        }
        static constexpr std::string_view kSingles = "+-*/%&|^~!<>=?:;,.()[]{}@#";
        if (kSingles.find(c) != std::string_view::npos) {
            Token t;
            t.kind = TokenKind::symbol;
            t.text = std::string(1, c);
            t.loc = start;
            advance();
            out_.tokens.push_back(std::move(t));
            return;
        }
        error(start, std::string("unexpected character '") + c + "'");
        advance();
    }

    std::string read_digits(bool allow_unknown) {
        std::string digits;
        while (true) {
            char c = peek();
            if (std::isxdigit(static_cast<unsigned char>(c)) || c == '_' ||
                (allow_unknown && (c == 'x' || c == 'X' || c == 'z' || c == 'Z' || c == '?'))) {
                if (c != '_') digits.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return digits;
    }

    void lex_number(SourceLoc start) {
        Token t;
        t.kind = TokenKind::number;
        t.loc = start;

        std::string size_text;
        if (peek() != '\'') {
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') {
                if (peek() != '_') size_text.push_back(peek());
                advance();
            }
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                advance();
                while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
                error(start, "real numbers are not supported");
                return;
            }
            if ((peek() == 'e' || peek() == 'E') && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                error(start, "real numbers are not supported");
                while (std::isalnum(static_cast<unsigned char>(peek()))) advance();
                return;
            }
            // Allow "8 'hFF".
            std::size_t save_pos = pos_;
            int save_line = line_, save_col = col_;
            while (peek() == ' ' || peek() == '\t') advance();
            if (peek() != '\'') {
                pos_ = save_pos;
                line_ = save_line;
                col_ = save_col;
                // plain unsized decimal
                std::uint64_t v = 0;
                bool overflow = false;
                for (char d : size_text) {
                    std::uint64_t next = v * 10 + static_cast<std::uint64_t>(d - '0');
                    if (next / 10 != v) overflow = true;
                    v = next;
                }
                if (overflow) {
                    error(start, "integer literal does not fit in 64 bits");
                    return;
                }
                t.value = v;
                t.width = v >> 32 ? 64 : 32;
                t.sized = false;
                t.is_signed = true;
                t.text = size_text;
                out_.tokens.push_back(std::move(t));
                return;
            }
        }
        // based literal
        advance();  // '
        bool is_signed = false;
        if (peek() == 's' || peek() == 'S') {
            is_signed = true;
            advance();
        }
        char base = static_cast<char>(std::tolower(static_cast<unsigned char>(peek())));
        if (base != 'b' && base != 'o' && base != 'd' && base != 'h') {
            error(start, "malformed based literal");
            return;
        }
        advance();
        while (peek() == ' ' || peek() == '\t') advance();
        std::string digits = read_digits(true);
        if (digits.empty()) {
            error(start, "based literal has no digits");
            return;
        }

        int width = 32;
        bool sized = !size_text.empty();
        if (sized) {
            unsigned long long w = 0;
            for (char d : size_text) {
                w = w * 10 + static_cast<unsigned long long>(d - '0');
                if (w > 1'000'000) break;
            }
            if (w == 0) {
                error(start, "literal width must be positive");
                return;
            }
            if (w > 64) {
                error(start, "literal wider than 64 bits is not supported");
                return;
            }
            width = static_cast<int>(w);
        }

        std::uint64_t value = 0;
        std::uint64_t dc = 0;
        bool overflow = false;
        int bits_per_digit = base == 'b' ? 1 : base == 'o' ? 3 : base == 'h' ? 4 : 0;
        for (char d : digits) {
            char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(d)));
            if (lower == 'x') {
                error(start, "x/z literals are not supported in two-state logic");
                return;
            }
            bool unknown = lower == 'z' || lower == '?';
            if (bits_per_digit == 0) {
                if (unknown) {
                    if (digits.size() != 1) {
                        error(start, "malformed decimal literal");
                        return;
                    }
                    dc = ~std::uint64_t{0};
                    continue;
                }
                if (!std::isdigit(static_cast<unsigned char>(d))) {
                    error(start, "invalid digit in decimal literal");
                    return;
                }
                std::uint64_t next = value * 10 + static_cast<std::uint64_t>(d - '0');
                if (next / 10 != value) overflow = true;
                value = next;
                continue;
            }
            int digit = 0;
            if (!unknown) {
                if (std::isdigit(static_cast<unsigned char>(d))) {
                    digit = d - '0';
                } else {
                    digit = 10 + (lower - 'a');
                }
                if (digit >= (1 << bits_per_digit)) {
                    error(start, "invalid digit for literal base");
                    return;
                }
            }
            if (bits_per_digit < 64 && (value >> (64 - bits_per_digit)) != 0) overflow = true;
            value = (value << bits_per_digit) | static_cast<std::uint64_t>(digit);
            dc = (dc << bits_per_digit) | (unknown ? ((1ULL << bits_per_digit) - 1) : 0);
        }
        if (overflow) {
            error(start, "literal value does not fit in 64 bits");
            return;
        }
        std::uint64_t mask = width >= 64 ? ~0ULL : ((1ULL << width) - 1);
        if ((value & ~mask) != 0) {
            warning(start, "literal value truncated to " + std::to_string(width) + " bits");
        }
        t.value = value & mask;
        t.dont_care = dc & mask;
        t.width = width;
        t.sized = sized;
        t.is_signed = is_signed;
        t.text = size_text + "'" + (is_signed ? "s" : "") + base + digits;
        out_.tokens.push_back(std::move(t));
    }
};

}  // namespace

bool is_keyword(const std::string& word) { return kKeywords.count(word) != 0; }

LexResult tokenize(const std::string& text) { return Lexer(text).run(); }

}  // namespace rtlxv::frontend

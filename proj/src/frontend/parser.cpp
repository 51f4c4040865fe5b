#include "rtlxv/frontend/parser.hpp"

#include <set>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "rtlxv/frontend/lexer.hpp"

namespace rtlxv::frontend {

namespace {

using ast::Expr;
using ast::ExprKind;
using ast::Stmt;
using ast::StmtKind;

// Thrown to unwind out of a syntax error; the diagnostic is recorded first.
struct SyntaxAbort {};

int binary_precedence(const std::string& op) {
    static const std::unordered_map<std::string, int> table = {
        {"||", 1}, {"&&", 2}, {"|", 3}, {"^", 4}, {"~^", 4}, {"^~", 4}, {"&", 5},
        {"==", 6}, {"!=", 6}, {"===", 6}, {"!==", 6}, {"<", 7}, {"<=", 7}, {">", 7},
        {">=", 7}, {"<<", 8}, {">>", 8}, {"<<<", 8}, {">>>", 8}, {"+", 9}, {"-", 9},
        {"*", 10}, {"/", 10}, {"%", 10}, {"**", 11},
    };
    auto it = table.find(op);
    return it == table.end() ? -1 : it->second;
}

bool is_unary_op(const std::string& op) {
    static const std::set<std::string> ops = {"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"};
    return ops.count(op) != 0;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    std::optional<ast::Module> parse() {
        try {
            ast::Module m = parse_module_decl();
            if (peek().kind != TokenKind::end_of_file) {
                if (is_kw("module")) {
                    error(peek().loc, "multiple modules in one source unit");
                } else {
                    error(peek().loc, "unexpected '" + peek().text + "' after endmodule");
                }
                return std::nullopt;
            }
            for (auto& u : unsupported_) m.items.emplace_back(std::move(u));
            resolve_port_widths(m);
            if (has_errors(diags_)) return std::nullopt;
            return m;
        } catch (const SyntaxAbort&) {
            return std::nullopt;
        }
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
    std::vector<ast::Unsupported> unsupported_;

    [[nodiscard]] const Token& peek(std::size_t off = 0) const {
        std::size_t i = std::min(pos_ + off, toks_.size() - 1);
        return toks_[i];
    }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[nodiscard]] bool is_sym(std::string_view s, std::size_t off = 0) const {
        return peek(off).kind == TokenKind::symbol && peek(off).text == s;
    }
    [[nodiscard]] bool is_kw(std::string_view s, std::size_t off = 0) const {
        return peek(off).kind == TokenKind::identifier && peek(off).text == s;
    }
    bool accept_sym(std::string_view s) {
        if (!is_sym(s)) return false;
        next();
        return true;
    }
    bool accept_kw(std::string_view s) {
        if (!is_kw(s)) return false;
        next();
        return true;
    }

    [[noreturn]] void fail(SourceLoc at, std::string msg) {
        error(at, std::move(msg));
        throw SyntaxAbort{};
    }
    void error(SourceLoc at, std::string msg) {
        diags_.push_back({Severity::error, std::move(msg), at.line, at.column});
    }
    void warning(SourceLoc at, std::string msg) {
        diags_.push_back({Severity::warning, std::move(msg), at.line, at.column});
    }
    void unsupported(SourceLoc at, std::string feature) {
        unsupported_.push_back({std::move(feature), at});
    }

    std::string describe(const Token& t) const {
        if (t.kind == TokenKind::end_of_file) return "end of input";
        return "'" + t.text + "'";
    }

    void expect_sym(std::string_view s) {
        if (!accept_sym(s)) fail(peek().loc, "expected '" + std::string(s) + "' but found " + describe(peek()));
    }
    void expect_kw(std::string_view s) {
        if (!accept_kw(s)) fail(peek().loc, "expected '" + std::string(s) + "' but found " + describe(peek()));
    }
    std::string expect_ident() {
        const Token& t = peek();
        if (t.kind != TokenKind::identifier || is_keyword(t.text)) {
            fail(t.loc, "expected identifier but found " + describe(t));
        }
        next();
        return t.text;
    }

    // Skips tokens until `end_kw` at nesting level zero (inclusive).
    void skip_until_kw(std::string_view end_kw) {
        while (peek().kind != TokenKind::end_of_file && !is_kw(end_kw)) next();
        if (!accept_kw(end_kw)) fail(peek().loc, "missing '" + std::string(end_kw) + "'");
    }
    void skip_to_semicolon() {
        int depth = 0;
        while (peek().kind != TokenKind::end_of_file) {
            if (is_sym("(") || is_sym("[") || is_sym("{")) ++depth;
            if (is_sym(")") || is_sym("]") || is_sym("}")) --depth;
            if (depth <= 0 && is_sym(";")) {
                next();
                return;
            }
            next();
        }
        fail(peek().loc, "missing ';'");
    }
    void skip_parenthesized() {
        expect_sym("(");
        int depth = 1;
        while (depth > 0) {
            if (peek().kind == TokenKind::end_of_file) fail(peek().loc, "unbalanced parentheses");
            if (is_sym("(")) ++depth;
            if (is_sym(")")) --depth;
            next();
        }
    }

    // ---------------------------------------------------------------- module

    ast::Module parse_module_decl() {
        if (!is_kw("module")) fail(peek().loc, "expected 'module' but found " + describe(peek()));
        next();
        ast::Module m;
        m.name = expect_ident();

        if (accept_sym("#")) {
            expect_sym("(");
            if (!is_sym(")")) {
                do {
                    bool local = false;
                    if (accept_kw("parameter")) {
                    } else if (accept_kw("localparam")) {
                        local = true;
                    }
                    parse_param_assignments(m, local, /*in_header=*/true, /*allow_multi=*/false);
                } while (accept_sym(","));
            }
            expect_sym(")");
        }

        std::vector<std::string> header_names;
        bool ansi = false;
        if (accept_sym("(")) {
            if (!is_sym(")")) {
                if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                    ansi = true;
                    parse_ansi_ports(m);
                } else {
                    do {
                        SourceLoc at = peek().loc;
                        std::string name = expect_ident();
                        for (const auto& n : header_names) {
                            if (n == name) fail(at, "duplicate port '" + name + "'");
                        }
                        header_names.push_back(name);
                    } while (accept_sym(","));
                }
            }
            expect_sym(")");
        }
        expect_sym(";");

        std::set<std::string> declared_ports;
        while (!is_kw("endmodule")) {
            if (peek().kind == TokenKind::end_of_file) fail(peek().loc, "missing 'endmodule'");
            parse_module_item(m, ansi, header_names, declared_ports);
        }
        next();

        if (!ansi) {
            for (const auto& name : header_names) {
                if (declared_ports.count(name) == 0) {
                    error(m.ports.empty() ? SourceLoc{} : m.ports.front().loc,
                          "port '" + name + "' has no direction declaration");
                }
            }
            // Reorder to header order.
            std::vector<ast::Port> ordered;
            for (const auto& name : header_names) {
                for (auto& p : m.ports) {
                    if (p.name == name) ordered.push_back(p);
                }
            }
            m.ports = std::move(ordered);
        }
        return m;
    }

    std::optional<ast::Range> parse_optional_range() {
        if (!is_sym("[")) return std::nullopt;
        next();
        ast::Range r;
        r.msb = parse_expr();
        expect_sym(":");
        r.lsb = parse_expr();
        expect_sym("]");
        return r;
    }

    void parse_ansi_ports(ast::Module& m) {
        ast::Direction dir = ast::Direction::input;
        bool is_reg = false;
        bool is_signed = false;
        std::optional<ast::Range> range;
        do {
            SourceLoc at = peek().loc;
            if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                if (is_kw("inout")) unsupported(at, "inout port");
                dir = is_kw("output") ? ast::Direction::output : ast::Direction::input;
                next();
                is_reg = false;
                is_signed = false;
                if (accept_kw("reg") || accept_kw("logic")) {
                    is_reg = true;
                } else {
                    accept_kw("wire");
                }
                if (accept_kw("signed")) is_signed = true;
                accept_kw("unsigned");
                range = parse_optional_range();
            }
            ast::Port p;
            p.loc = peek().loc;
            p.name = expect_ident();
            p.dir = dir;
            p.is_reg = is_reg;
            p.is_signed = is_signed;
            p.range = range;
            if (is_sym("[")) {
                unsupported(peek().loc, "array port");
                parse_optional_range();
            }
            for (const auto& q : m.ports) {
                if (q.name == p.name) fail(p.loc, "duplicate port '" + p.name + "'");
            }
            m.ports.push_back(std::move(p));
        } while (accept_sym(","));
    }

    void parse_param_assignments(ast::Module& m, bool local, bool in_header, bool allow_multi) {
        accept_kw("integer");
        accept_kw("signed");
        if (is_sym("[")) parse_optional_range();
        do {
            ast::Param p;
            p.loc = peek().loc;
            p.name = expect_ident();
            expect_sym("=");
            p.value = parse_expr();
            p.local = local;
            p.in_header = in_header;
            for (const auto& q : m.params) {
                if (q.name == p.name) fail(p.loc, "duplicate parameter '" + p.name + "'");
            }
            m.params.push_back(std::move(p));
            if (!allow_multi) break;
        } while (accept_sym(","));
    }

    void parse_module_item(ast::Module& m, bool ansi, const std::vector<std::string>& header_names,
                           std::set<std::string>& declared_ports) {
        const Token& t = peek();
        SourceLoc at = t.loc;
        if (t.kind == TokenKind::symbol && t.text == ";") {
            next();
            return;
        }
        if (t.kind != TokenKind::identifier) fail(at, "unexpected " + describe(t) + " in module body");

        if (is_kw("module")) fail(at, "multiple modules in one source unit");

        if (is_kw("input") || is_kw("output") || is_kw("inout")) {
            if (ansi) fail(at, "port direction redeclared in body of an ANSI-style module");
            if (is_kw("inout")) unsupported(at, "inout port");
            ast::Direction dir = is_kw("output") ? ast::Direction::output : ast::Direction::input;
            next();
            bool is_reg = false;
            if (accept_kw("reg") || accept_kw("logic")) {
                is_reg = true;
            } else {
                accept_kw("wire");
            }
            bool is_signed = accept_kw("signed");
            auto range = parse_optional_range();
            do {
                ast::Port p;
                p.loc = peek().loc;
                p.name = expect_ident();
                p.dir = dir;
                p.is_reg = is_reg;
                p.is_signed = is_signed;
                p.range = range;
                bool in_header = false;
                for (const auto& n : header_names) in_header = in_header || n == p.name;
                if (!in_header) fail(p.loc, "'" + p.name + "' is not in the module port list");
                if (!declared_ports.insert(p.name).second) fail(p.loc, "duplicate port '" + p.name + "'");
                m.ports.push_back(std::move(p));
            } while (accept_sym(","));
            expect_sym(";");
            return;
        }

        if (is_kw("wire") || is_kw("reg") || is_kw("logic")) {
            ast::NetKind kind = is_kw("wire") ? ast::NetKind::wire : ast::NetKind::reg;
            next();
            bool is_signed = accept_kw("signed");
            accept_kw("unsigned");
            auto range = parse_optional_range();
            do {
                ast::NetDecl d;
                d.loc = peek().loc;
                d.name = expect_ident();
                d.kind = kind;
                d.is_signed = is_signed;
                d.range = range;
                if (is_sym("[")) {
                    unsupported(peek().loc, "memory array");
                    parse_optional_range();
                }
                if (accept_sym("=")) d.init = parse_expr();
                // `output q; reg q;` folds the reg into the port.
                bool merged = false;
                for (auto& p : m.ports) {
                    if (p.name == d.name && !ansi) {
                        if (kind == ast::NetKind::reg) p.is_reg = true;
                        if (is_signed) p.is_signed = true;
                        if (!p.range && range) p.range = range;
                        merged = !d.init.has_value();
                        if (d.init) {
                            ast::ContAssign a;
                            a.loc = d.loc;
                            a.lhs = ident_expr(d.name, d.loc);
                            a.rhs = *d.init;
                            m.items.emplace_back(std::move(a));
                            merged = true;
                        }
                    }
                }
                if (!merged) m.items.emplace_back(std::move(d));
            } while (accept_sym(","));
            expect_sym(";");
            return;
        }

        if (is_kw("parameter") || is_kw("localparam")) {
            bool local = is_kw("localparam");
            next();
            parse_param_assignments(m, local, /*in_header=*/false, /*allow_multi=*/true);
            expect_sym(";");
            return;
        }

        if (is_kw("assign")) {
            next();
            if (is_sym("#")) {
                unsupported(peek().loc, "delay");
                next();
                parse_primary();
            }
            do {
                ast::ContAssign a;
                a.loc = peek().loc;
                a.lhs = parse_lvalue();
                expect_sym("=");
                a.rhs = parse_expr();
                m.items.emplace_back(std::move(a));
            } while (accept_sym(","));
            expect_sym(";");
            return;
        }

        if (is_kw("always") || is_kw("always_comb") || is_kw("always_ff")) {
            m.items.emplace_back(parse_always());
            return;
        }

        if (is_kw("initial")) {
            next();
            unsupported(at, "initial");
            parse_statement();
            return;
        }
        if (is_kw("generate")) {
            unsupported(at, "generate");
            skip_until_kw("endgenerate");
            return;
        }
        if (is_kw("genvar")) {
            unsupported(at, "generate");
            skip_to_semicolon();
            return;
        }
        if (is_kw("function")) {
            unsupported(at, "function");
            skip_until_kw("endfunction");
            return;
        }
        if (is_kw("task")) {
            unsupported(at, "task");
            skip_until_kw("endtask");
            return;
        }
        if (is_kw("integer") || is_kw("real") || is_kw("time") || is_kw("event") ||
            is_kw("supply0") || is_kw("supply1") || is_kw("tri") || is_kw("defparam")) {
            unsupported(at, t.text);
            skip_to_semicolon();
            return;
        }
        if (is_kw("for")) {
            unsupported(at, "generate");
            next();
            skip_parenthesized();
            parse_statement();
            return;
        }
        if (!is_keyword(t.text) && peek(1).kind == TokenKind::identifier) {
            unsupported(at, "module instantiation");
            skip_to_semicolon();
            return;
        }
        if (!is_keyword(t.text) && is_sym("#", 1)) {
            unsupported(at, "module instantiation");
            skip_to_semicolon();
            return;
        }
        fail(at, "unexpected " + describe(t) + " in module body");
    }

    ast::Always parse_always() {
        ast::Always a;
        a.loc = peek().loc;
        bool comb_kw = is_kw("always_comb");
        next();
        if (comb_kw) {
            a.star = true;
            a.body = parse_statement();
            return a;
        }
        if (!is_sym("@")) {
            unsupported(a.loc, "always without event control");
            a.star = true;
            a.body = parse_statement();
            return a;
        }
        next();
        if (accept_sym("*")) {
            a.star = true;
        } else {
            expect_sym("(");
            if (accept_sym("*")) {
                a.star = true;
            } else {
                do {
                    SourceLoc at = peek().loc;
                    if (is_kw("posedge") || is_kw("negedge")) {
                        ast::EdgeEvent ev;
                        ev.edge = is_kw("posedge") ? ast::Edge::posedge : ast::Edge::negedge;
                        next();
                        ev.signal = expect_ident();
                        a.edges.push_back(ev);
                    } else {
                        std::string name = expect_ident();
                        if (is_sym("[")) fail(at, "selects are not allowed in sensitivity lists");
                        a.levels.push_back(name);
                    }
                } while (accept_kw("or") || accept_sym(","));
            }
            expect_sym(")");
        }
        a.body = parse_statement();
        return a;
    }

    // ------------------------------------------------------------- statements

    Stmt parse_statement() {
        Stmt s;
        s.loc = peek().loc;
        const Token& t = peek();
        if (t.kind == TokenKind::symbol && t.text == ";") {
            next();
            s.kind = StmtKind::empty;
            return s;
        }
        if (t.kind == TokenKind::symbol && t.text == "#") {
            unsupported(s.loc, "delay");
            next();
            parse_primary();
            return parse_statement();
        }
        if (t.kind == TokenKind::symbol && t.text == "@") {
            unsupported(s.loc, "event control");
            next();
            if (is_sym("(")) {
                skip_parenthesized();
            } else {
                next();
            }
            return parse_statement();
        }
        if (t.kind == TokenKind::system_identifier) {
            unsupported(s.loc, "system task");
            skip_to_semicolon();
            s.kind = StmtKind::empty;
            return s;
        }
        if (accept_kw("begin")) {
            s.kind = StmtKind::block;
            if (accept_sym(":")) expect_ident();
            while (!is_kw("end")) {
                if (peek().kind == TokenKind::end_of_file) fail(peek().loc, "missing 'end'");
                s.body.push_back(parse_statement());
            }
            next();
            if (accept_sym(":")) expect_ident();
            return s;
        }
        if (accept_kw("if")) {
            s.kind = StmtKind::if_else;
            expect_sym("(");
            s.cond = parse_expr();
            expect_sym(")");
            s.body.push_back(parse_statement());
            if (accept_kw("else")) {
                s.has_else = true;
                s.body.push_back(parse_statement());
            }
            return s;
        }
        if (is_kw("case") || is_kw("casez") || is_kw("casex")) {
            if (is_kw("casex")) unsupported(s.loc, "casex");
            s.kind = StmtKind::case_stmt;
            s.casez = !is_kw("case");
            next();
            expect_sym("(");
            s.cond = parse_expr();
            expect_sym(")");
            while (!is_kw("endcase")) {
                if (peek().kind == TokenKind::end_of_file) fail(peek().loc, "missing 'endcase'");
                ast::CaseItem item;
                if (accept_kw("default")) {
                    item.is_default = true;
                    accept_sym(":");
                } else {
                    do {
                        item.labels.push_back(parse_expr());
                    } while (accept_sym(","));
                    expect_sym(":");
                }
                item.body.push_back(parse_statement());
                s.items.push_back(std::move(item));
            }
            next();
            return s;
        }
        if (is_kw("for") || is_kw("while") || is_kw("repeat")) {
            unsupported(s.loc, "loop");
            next();
            skip_parenthesized();
            parse_statement();
            s.kind = StmtKind::empty;
            return s;
        }
        if (is_kw("forever")) {
            unsupported(s.loc, "loop");
            next();
            parse_statement();
            s.kind = StmtKind::empty;
            return s;
        }
        if (t.kind == TokenKind::identifier && is_keyword(t.text)) {
            fail(t.loc, "unexpected " + describe(t) + " in statement");
        }
        s.lhs = parse_lvalue();
        if (accept_sym("=")) {
            s.kind = StmtKind::blocking;
        } else if (accept_sym("<=")) {
            s.kind = StmtKind::nonblocking;
        } else {
            fail(peek().loc, "expected '=' or '<=' but found " + describe(peek()));
        }
        if (is_sym("#")) {
            unsupported(peek().loc, "delay");
            next();
            parse_primary();
        }
        s.rhs = parse_expr();
        expect_sym(";");
        return s;
    }

    Expr parse_lvalue() {
        SourceLoc at = peek().loc;
        if (is_sym("{")) {
            Expr e = parse_primary();
            if (e.kind != ExprKind::concat) fail(at, "replication is not a valid assignment target");
            for (const auto& a : e.args) check_lvalue(a);
            return e;
        }
        Expr e = parse_primary();
        check_lvalue(e);
        return e;
    }

    void check_lvalue(const Expr& e) {
        switch (e.kind) {
            case ExprKind::ident:
            case ExprKind::bit_select:
            case ExprKind::part_select:
            case ExprKind::indexed_up:
            case ExprKind::indexed_down:
                return;
            case ExprKind::concat:
                for (const auto& a : e.args) check_lvalue(a);
                return;
            default:
                fail(e.loc, "invalid assignment target");
        }
    }

    // ------------------------------------------------------------ expressions

    static Expr ident_expr(const std::string& name, SourceLoc at) {
        Expr e;
        e.kind = ExprKind::ident;
        e.name = name;
        e.loc = at;
        return e;
    }

    Expr parse_expr() {
        Expr cond = parse_binary(1);
        if (is_sym("?")) {
            SourceLoc at = peek().loc;
            next();
            Expr t = parse_expr();
            expect_sym(":");
            Expr f = parse_expr();
            Expr e;
            e.kind = ExprKind::ternary;
            e.loc = at;
            e.args.push_back(std::move(cond));
            e.args.push_back(std::move(t));
            e.args.push_back(std::move(f));
            return e;
        }
        return cond;
    }

    Expr parse_binary(int min_prec) {
        Expr lhs = parse_unary();
        while (peek().kind == TokenKind::symbol) {
            std::string op = peek().text;
            int prec = binary_precedence(op);
            if (prec < min_prec) break;
            SourceLoc at = peek().loc;
            next();
            // ** is right-associative; everything else left.
            Expr rhs = parse_binary(op == "**" ? prec : prec + 1);
            Expr e;
            e.kind = ExprKind::binary;
            e.op = op == "^~" ? "~^" : op;
            e.loc = at;
            e.args.push_back(std::move(lhs));
            e.args.push_back(std::move(rhs));
            lhs = std::move(e);
        }
        return lhs;
    }

    Expr parse_unary() {
        if (peek().kind == TokenKind::symbol && is_unary_op(peek().text)) {
            Expr e;
            e.kind = ExprKind::unary;
            e.loc = peek().loc;
            e.op = next().text;
            if (e.op == "^~") e.op = "~^";
            e.args.push_back(parse_unary());
            return e;
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        SourceLoc at = t.loc;
        if (t.kind == TokenKind::number) {
            Expr e;
            e.kind = ExprKind::number;
            e.loc = at;
            e.value = t.value;
            e.dont_care = t.dont_care;
            e.width = t.width;
            e.sized = t.sized;
            e.is_signed = t.is_signed;
            next();
            return e;
        }
        if (t.kind == TokenKind::system_identifier) {
            std::string name = t.text;
            next();
            if (name != "$signed" && name != "$unsigned") fail(at, "unsupported system function " + name);
            Expr e;
            e.kind = ExprKind::call;
            e.name = name;
            e.loc = at;
            expect_sym("(");
            e.args.push_back(parse_expr());
            expect_sym(")");
            return e;
        }
        if (accept_sym("(")) {
            Expr e = parse_expr();
            expect_sym(")");
            return e;
        }
        if (accept_sym("{")) {
            Expr first = parse_expr();
            if (is_sym("{")) {
                next();
                Expr e;
                e.kind = ExprKind::replicate;
                e.loc = at;
                e.args.push_back(std::move(first));
                do {
                    e.args.push_back(parse_expr());
                } while (accept_sym(","));
                expect_sym("}");
                expect_sym("}");
                return e;
            }
            Expr e;
            e.kind = ExprKind::concat;
            e.loc = at;
            e.args.push_back(std::move(first));
            while (accept_sym(",")) e.args.push_back(parse_expr());
            expect_sym("}");
            return e;
        }
        if (t.kind == TokenKind::identifier && !is_keyword(t.text)) {
            std::string name = t.text;
            next();
            if (is_sym(".")) fail(peek().loc, "hierarchical references are not supported");
            if (!is_sym("[")) return ident_expr(name, at);
            SourceLoc sel_at = peek().loc;
            next();
            Expr e;
            e.name = name;
            e.loc = at;
            e.args.push_back(parse_expr());
            if (accept_sym("]")) {
                e.kind = ExprKind::bit_select;
            } else if (accept_sym(":")) {
                e.kind = ExprKind::part_select;
                e.args.push_back(parse_expr());
                expect_sym("]");
            } else if (accept_sym("+:")) {
                e.kind = ExprKind::indexed_up;
                e.args.push_back(parse_expr());
                expect_sym("]");
            } else if (accept_sym("-:")) {
                e.kind = ExprKind::indexed_down;
                e.args.push_back(parse_expr());
                expect_sym("]");
            } else {
                fail(peek().loc, "expected ']' but found " + describe(peek()));
            }
            if (is_sym("[")) fail(sel_at, "multi-dimensional selects are not supported");
            return e;
        }
        fail(at, "expected expression but found " + describe(t));
    }

    void resolve_port_widths(ast::Module& m) {
        std::vector<Diagnostic> local;
        auto params = elaborate_params(m, {}, &local);
        for (auto& d : local) diags_.push_back(d);
        if (!params) return;
        for (auto& p : m.ports) {
            if (!p.range) {
                p.width = 1;
                continue;
            }
            auto msb = eval_const(p.range->msb, *params);
            auto lsb = eval_const(p.range->lsb, *params);
            if (!msb || !lsb) {
                error(p.loc, "port '" + p.name + "' range is not constant");
                continue;
            }
            std::int64_t w = (*msb >= *lsb ? *msb - *lsb : *lsb - *msb) + 1;
            p.width = static_cast<int>(std::min<std::int64_t>(w, 1 << 20));
        }
    }
};

}  // namespace

ParseResult parse_module(const SourceUnit& src) {
    ParseResult result;
    LexResult lexed = tokenize(src.text);
    result.diagnostics = std::move(lexed.diagnostics);
    if (lexed.tokens.size() == 1) {
        result.diagnostics.push_back({Severity::error, "source contains no module", 1, 1});
        return result;
    }
    if (has_errors(result.diagnostics)) return result;
    Parser parser(std::move(lexed.tokens), result.diagnostics);
    result.module = parser.parse();
    if (has_errors(result.diagnostics)) result.module.reset();
    return result;
}

}  // namespace rtlxv::frontend

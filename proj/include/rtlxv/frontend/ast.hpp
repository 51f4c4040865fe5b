#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rtlxv/diagnostic.hpp"

namespace rtlxv::ast {

enum class ExprKind {
    number,
    ident,
    unary,
    binary,
    ternary,
    concat,
    replicate,     // args[0] = count, args[1..] = items
    bit_select,    // name[args[0]]
    part_select,   // name[args[0]:args[1]]
    indexed_up,    // name[args[0] +: args[1]]
    indexed_down,  // name[args[0] -: args[1]]
    call,          // $signed / $unsigned
};

struct Expr {
    ExprKind kind = ExprKind::number;
    SourceLoc loc;

    // number
    std::uint64_t value = 0;
    std::uint64_t dont_care = 0;  // '?' / 'z' digits, legal only in casez labels
    int width = 32;
    bool sized = false;
    bool is_signed = false;

    // ident / select base / call name / operator spelling
    std::string name;
    std::string op;

    std::vector<Expr> args;

    bool operator==(const Expr&) const = default;
};

enum class StmtKind { block, blocking, nonblocking, if_else, case_stmt, empty };

struct Stmt;

struct CaseItem {
    std::vector<Expr> labels;  // empty for default
    bool is_default = false;
    std::vector<Stmt> body;    // exactly one statement
    bool operator==(const CaseItem&) const = default;
};

struct Stmt {
    StmtKind kind = StmtKind::empty;
    SourceLoc loc;
    Expr lhs;
    Expr rhs;
    Expr cond;                   // if condition or case subject
    std::vector<Stmt> body;      // block contents; if: [then] or [then, else]
    bool has_else = false;
    bool casez = false;
    std::vector<CaseItem> items;

    bool operator==(const Stmt&) const = default;
};

enum class Direction { input, output };

struct Range {
    Expr msb;
    Expr lsb;
    bool operator==(const Range&) const = default;
};

struct Port {
    std::string name;
    Direction dir = Direction::input;
    bool is_reg = false;
    bool is_signed = false;
    std::optional<Range> range;
    int width = 1;  // resolved against parameter defaults at parse time
    SourceLoc loc;
    bool operator==(const Port&) const = default;
};

struct Param {
    std::string name;
    Expr value;
    bool local = false;
    bool in_header = false;
    SourceLoc loc;
    bool operator==(const Param&) const = default;
};

enum class NetKind { wire, reg };

struct NetDecl {
    NetKind kind = NetKind::wire;
    std::string name;
    bool is_signed = false;
    std::optional<Range> range;
    std::optional<Expr> init;  // `wire x = expr;`
    SourceLoc loc;
    bool operator==(const NetDecl&) const = default;
};

struct ContAssign {
    Expr lhs;
    Expr rhs;
    SourceLoc loc;
    bool operator==(const ContAssign&) const = default;
};

enum class Edge { posedge, negedge };

struct EdgeEvent {
    Edge edge = Edge::posedge;
    std::string signal;
    bool operator==(const EdgeEvent&) const = default;
};

struct Always {
    bool star = false;                 // @(*) / @*
    std::vector<EdgeEvent> edges;      // edge-triggered list
    std::vector<std::string> levels;   // plain level list, e.g. @(a or b)
    Stmt body;
    SourceLoc loc;
    bool operator==(const Always&) const = default;
};

/// A construct outside the accepted subset, kept so validation can name it.
struct Unsupported {
    std::string feature;
    SourceLoc loc;
    bool operator==(const Unsupported&) const = default;
};

using Item = std::variant<NetDecl, ContAssign, Always, Unsupported>;

struct Module {
    std::string name;
    std::vector<Param> params;  // header #(...) and body parameters, in order
    std::vector<Port> ports;
    std::vector<Item> items;
    bool operator==(const Module&) const = default;
};

}  // namespace rtlxv::ast

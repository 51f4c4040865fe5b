#include <sstream>

#include "rtlxv/frontend/parser.hpp"

namespace rtlxv::frontend {

namespace {

using ast::Expr;
using ast::ExprKind;
using ast::Stmt;
using ast::StmtKind;

std::string to_hex(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789ABCDEF";
    if (v == 0) return "0";
    std::string s;
    while (v) {
        s.insert(s.begin(), kDigits[v & 0xF]);
        v >>= 4;
    }
    return s;
}

std::string print_number(const Expr& e) {
    std::string prefix = (e.sized ? std::to_string(e.width) : std::string()) + "'" + (e.is_signed ? "s" : "");
    if (e.dont_care != 0) {
        int digits = e.width;
        if (!e.sized) {
            std::uint64_t all = e.value | e.dont_care;
            digits = 1;
            while (digits < 64 && (all >> digits) != 0) ++digits;
        }
        std::string bits;
        for (int i = digits - 1; i >= 0; --i) {
            if ((e.dont_care >> i) & 1) {
                bits.push_back('?');
            } else {
                bits.push_back(((e.value >> i) & 1) ? '1' : '0');
            }
        }
        return prefix + "b" + bits;
    }
    if (!e.sized && e.is_signed) return std::to_string(e.value);
    return prefix + "h" + to_hex(e.value);
}

std::string range_text(const std::optional<ast::Range>& r) {
    if (!r) return "";
    return "[" + print_expr(r->msb) + ":" + print_expr(r->lsb) + "] ";
}

void print_stmt(std::ostringstream& os, const Stmt& s, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    switch (s.kind) {
        case StmtKind::empty:
            os << pad << ";\n";
            return;
        case StmtKind::block:
            os << pad << "begin\n";
            for (const auto& b : s.body) print_stmt(os, b, indent + 1);
            os << pad << "end\n";
            return;
        case StmtKind::blocking:
        case StmtKind::nonblocking:
            os << pad << print_expr(s.lhs) << (s.kind == StmtKind::blocking ? " = " : " <= ")
               << print_expr(s.rhs) << ";\n";
            return;
        case StmtKind::if_else:
            // A then-branch that is an else-less if only parses back here inside a block,
            // so printing it verbatim cannot re-bind our else.
            os << pad << "if (" << print_expr(s.cond) << ")\n";
            print_stmt(os, s.body[0], indent + 1);
            if (s.has_else) {
                os << pad << "else\n";
                print_stmt(os, s.body[1], indent + 1);
            }
            return;
        case StmtKind::case_stmt:
            os << pad << (s.casez ? "casez (" : "case (") << print_expr(s.cond) << ")\n";
            for (const auto& item : s.items) {
                os << pad << "  ";
                if (item.is_default) {
                    os << "default:\n";
                } else {
                    for (std::size_t i = 0; i < item.labels.size(); ++i) {
                        if (i) os << ", ";
                        os << print_expr(item.labels[i]);
                    }
                    os << ":\n";
                }
                print_stmt(os, item.body[0], indent + 2);
            }
            os << pad << "endcase\n";
            return;
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    switch (e.kind) {
        case ExprKind::number:
            return print_number(e);
        case ExprKind::ident:
            return e.name;
        case ExprKind::unary:
            return "(" + e.op + print_expr(e.args[0]) + ")";
        case ExprKind::binary:
            return "(" + print_expr(e.args[0]) + " " + e.op + " " + print_expr(e.args[1]) + ")";
        case ExprKind::ternary:
            return "(" + print_expr(e.args[0]) + " ? " + print_expr(e.args[1]) + " : " + print_expr(e.args[2]) + ")";
        case ExprKind::concat: {
            std::string s = "{";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) s += ", ";
                s += print_expr(e.args[i]);
            }
            return s + "}";
        }
        case ExprKind::replicate: {
            std::string s = "{" + print_expr(e.args[0]) + "{";
            for (std::size_t i = 1; i < e.args.size(); ++i) {
                if (i > 1) s += ", ";
                s += print_expr(e.args[i]);
            }
            return s + "}}";
        }
        case ExprKind::bit_select:
            return e.name + "[" + print_expr(e.args[0]) + "]";
        case ExprKind::part_select:
            return e.name + "[" + print_expr(e.args[0]) + ":" + print_expr(e.args[1]) + "]";
        case ExprKind::indexed_up:
            return e.name + "[" + print_expr(e.args[0]) + " +: " + print_expr(e.args[1]) + "]";
        case ExprKind::indexed_down:
            return e.name + "[" + print_expr(e.args[0]) + " -: " + print_expr(e.args[1]) + "]";
        case ExprKind::call:
            return e.name + "(" + print_expr(e.args[0]) + ")";
    }
    return "";
}

std::string print_module(const ast::Module& m) {
    std::ostringstream os;
    os << "module " << m.name;
    bool any_header = false;
    for (const auto& p : m.params) any_header = any_header || p.in_header;
    if (any_header) {
        os << " #(";
        bool first = true;
        for (const auto& p : m.params) {
            if (!p.in_header) continue;
            if (!first) os << ", ";
            first = false;
            os << (p.local ? "localparam " : "parameter ") << p.name << " = " << print_expr(p.value);
        }
        os << ")";
    }
    os << " (";
    for (std::size_t i = 0; i < m.ports.size(); ++i) {
        const auto& p = m.ports[i];
        os << (i ? ",\n  " : "\n  ") << (p.dir == ast::Direction::input ? "input " : "output ")
           << (p.is_reg ? "reg " : "wire ") << (p.is_signed ? "signed " : "") << range_text(p.range) << p.name;
    }
    os << (m.ports.empty() ? ");\n" : "\n);\n");
    for (const auto& p : m.params) {
        if (p.in_header) continue;
        os << "  " << (p.local ? "localparam " : "parameter ") << p.name << " = " << print_expr(p.value) << ";\n";
    }
    for (const auto& item : m.items) {
        if (const auto* d = std::get_if<ast::NetDecl>(&item)) {
            os << "  " << (d->kind == ast::NetKind::wire ? "wire " : "reg ") << (d->is_signed ? "signed " : "")
               << range_text(d->range) << d->name;
            if (d->init) os << " = " << print_expr(*d->init);
            os << ";\n";
        } else if (const auto* a = std::get_if<ast::ContAssign>(&item)) {
            os << "  assign " << print_expr(a->lhs) << " = " << print_expr(a->rhs) << ";\n";
        } else if (const auto* al = std::get_if<ast::Always>(&item)) {
            os << "  always @(";
            if (al->star) {
                os << "*";
            } else if (!al->edges.empty()) {
                for (std::size_t i = 0; i < al->edges.size(); ++i) {
                    if (i) os << " or ";
                    os << (al->edges[i].edge == ast::Edge::posedge ? "posedge " : "negedge ") << al->edges[i].signal;
                }
            } else {
                for (std::size_t i = 0; i < al->levels.size(); ++i) {
                    if (i) os << " or ";
                    os << al->levels[i];
                }
            }
            os << ")\n";
            print_stmt(os, al->body, 2);
        } else if (const auto* u = std::get_if<ast::Unsupported>(&item)) {
            os << "  // unsupported: " << u->feature << "\n";
        }
    }
    os << "endmodule\n";
    return os.str();
}

}  // namespace rtlxv::frontend

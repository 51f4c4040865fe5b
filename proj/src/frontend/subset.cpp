#include "rtlxv/frontend/parser.hpp"

#include <algorithm>

namespace rtlxv::frontend {

namespace {

using ast::Expr;
using ast::ExprKind;
using ast::Stmt;
using ast::StmtKind;

class SubsetChecker {
public:
    std::vector<UnsupportedFeature> run(const ast::Module& m) {
        for (const auto& p : m.params) expr(p.value, false);
        for (const auto& port : m.ports) {
            if (port.range) {
                expr(port.range->msb, false);
                expr(port.range->lsb, false);
            }
        }
        for (const auto& item : m.items) {
            std::visit([this](const auto& it) { visit(it); }, item);
        }
        std::stable_sort(found_.begin(), found_.end(), [](const auto& a, const auto& b) {
            return a.line != b.line ? a.line < b.line : a.column < b.column;
        });
        return std::move(found_);
    }

private:
    std::vector<UnsupportedFeature> found_;

    void add(const std::string& feature, SourceLoc at) { found_.push_back({feature, at.line, at.column}); }

    void visit(const ast::Unsupported& u) { add(u.feature, u.loc); }
    void visit(const ast::NetDecl& d) {
        if (d.range) {
            expr(d.range->msb, false);
            expr(d.range->lsb, false);
        }
        if (d.init) expr(*d.init, false);
    }
    void visit(const ast::ContAssign& a) {
        expr(a.lhs, false);
        expr(a.rhs, false);
    }
    void visit(const ast::Always& a) {
        if (!a.star) {
            if (!a.levels.empty()) {
                add("explicit sensitivity list", a.loc);
            } else if (a.edges.empty() || a.edges.size() > 2) {
                add("sensitivity list", a.loc);
            } else if (a.edges[0].edge != ast::Edge::posedge) {
                add("negedge clock", a.loc);
            }
        }
        stmt(a.body);
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::block:
                for (const auto& b : s.body) stmt(b);
                break;
            case StmtKind::blocking:
            case StmtKind::nonblocking:
                expr(s.lhs, false);
                expr(s.rhs, false);
                break;
            case StmtKind::if_else:
                expr(s.cond, false);
                for (const auto& b : s.body) stmt(b);
                break;
            case StmtKind::case_stmt:
                expr(s.cond, false);
                for (const auto& item : s.items) {
                    for (const auto& l : item.labels) expr(l, s.casez);
                    for (const auto& b : item.body) stmt(b);
                }
                break;
            case StmtKind::empty:
                break;
        }
    }

    void expr(const Expr& e, bool wildcard_ok) {
        if (e.kind == ExprKind::number && e.dont_care != 0 && !wildcard_ok) add("z/? literal outside casez", e.loc);
        if (e.kind == ExprKind::binary) {
            if (e.op == "**") add("power operator", e.loc);
            if (e.op == "===" || e.op == "!==") add("case equality operator", e.loc);
        }
        for (const auto& a : e.args) expr(a, false);
    }
};

}  // namespace

std::vector<UnsupportedFeature> validate_subset(const ast::Module& m) { return SubsetChecker{}.run(m); }

}  // namespace rtlxv::frontend

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "rtlxv/ir/ir.hpp"

namespace rtlxv::ir {

namespace {

using ast::ExprKind;

struct LowerError {
    SourceLoc loc;
    std::string message;
};

struct Info {
    int width = 1;
    bool is_signed = false;
};

constexpr int kMaxWidth = 64;

bool is_arith_or_bitwise(const std::string& op) {
    return op == "+" || op == "-" || op == "*" || op == "/" || op == "%" || op == "&" || op == "|" ||
           op == "^" || op == "~^";
}
bool is_compare(const std::string& op) {
    return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}
bool is_shift(const std::string& op) { return op == "<<" || op == ">>" || op == "<<<" || op == ">>>"; }

std::uint64_t sign_extend(std::uint64_t v, int from, int to) {
    if (from >= 64 || from >= to) return v & width_mask(to);
    if ((v >> (from - 1)) & 1) v |= ~width_mask(from);
    return v & width_mask(to);
}

class Lowerer {
public:
    Lowerer(const ast::Module& m, std::vector<Diagnostic>& diags) : m_(m), diags_(diags) {}

    std::optional<Design> run(const frontend::ParamValues& overrides) {
        auto params = frontend::elaborate_params(m_, overrides, &diags_);
        if (!params) return std::nullopt;
        params_ = *params;
        d_.name = m_.name;

        declare_ports();
        declare_nets();
        if (has_errors(diags_)) return std::nullopt;

        int order = 0;
        for (const auto& item : m_.items) {
            try {
                if (const auto* a = std::get_if<ast::ContAssign>(&item)) {
                    ContAssign ca;
                    ca.assign = lower_assign(a->lhs, a->rhs, a->loc);
                    ca.source_order = order;
                    d_.assigns.push_back(std::move(ca));
                } else if (const auto* n = std::get_if<ast::NetDecl>(&item)) {
                    if (n->init) {
                        ast::Expr lhs;
                        lhs.kind = ExprKind::ident;
                        lhs.name = n->name;
                        lhs.loc = n->loc;
                        ContAssign ca;
                        ca.assign = lower_assign(lhs, *n->init, n->loc);
                        ca.source_order = order;
                        d_.assigns.push_back(std::move(ca));
                    }
                } else if (const auto* al = std::get_if<ast::Always>(&item)) {
                    lower_always(*al, order);
                } else if (const auto* u = std::get_if<ast::Unsupported>(&item)) {
                    error(u->loc, "unsupported construct: " + u->feature);
                }
            } catch (const LowerError& e) {
                error(e.loc, e.message);
            }
            ++order;
        }
        if (has_errors(diags_)) return std::nullopt;

        classify_drivers();
        collect_clocks_and_resets();
        if (has_errors(diags_)) return std::nullopt;

        OrderResult ordered = order_combinational(d_);
        if (!ordered.ok()) {
            std::string names;
            for (const auto& n : ordered.loop->nets) names += (names.empty() ? "" : ", ") + n;
            error(SourceLoc{}, "combinational loop through: " + names);
            return std::nullopt;
        }
        d_.comb_order = std::move(ordered.order);
        return std::move(d_);
    }

private:
    const ast::Module& m_;
    std::vector<Diagnostic>& diags_;
    frontend::ParamValues params_;
    Design d_;
    std::unordered_map<std::string, NetId> symbols_;
    std::vector<SourceLoc> net_locs_;

    void error(SourceLoc at, std::string msg) { diags_.push_back({Severity::error, std::move(msg), at.line, at.column}); }
    void warning(SourceLoc at, std::string msg) {
        diags_.push_back({Severity::warning, std::move(msg), at.line, at.column});
    }
    [[noreturn]] static void fail(SourceLoc at, std::string msg) { throw LowerError{at, std::move(msg)}; }

    std::int64_t const_int(const ast::Expr& e, const char* what) {
        auto v = frontend::eval_const(e, params_);
        if (!v) fail(e.loc, std::string(what) + " must be a constant expression");
        return *v;
    }

    bool resolve_range(const std::optional<ast::Range>& r, Net& net, SourceLoc at) {
        if (!r) {
            net.width = 1;
            net.msb = net.lsb = 0;
            return true;
        }
        auto msb = frontend::eval_const(r->msb, params_);
        auto lsb = frontend::eval_const(r->lsb, params_);
        if (!msb || !lsb) {
            error(at, "range of '" + net.name + "' is not constant");
            return false;
        }
        std::int64_t w = (*msb >= *lsb ? *msb - *lsb : *lsb - *msb) + 1;
        if (w > kMaxWidth) {
            error(at, "'" + net.name + "' is " + std::to_string(w) + " bits wide; at most 64 bits are supported");
            return false;
        }
        net.msb = static_cast<int>(*msb);
        net.lsb = static_cast<int>(*lsb);
        net.width = static_cast<int>(w);
        return true;
    }

    void add_net(Net net, SourceLoc at) {
        if (params_.count(net.name)) {
            error(at, "'" + net.name + "' is already declared as a parameter");
            return;
        }
        if (!symbols_.emplace(net.name, static_cast<NetId>(d_.nets.size())).second) {
            error(at, "'" + net.name + "' is declared more than once");
            return;
        }
        d_.nets.push_back(std::move(net));
        net_locs_.push_back(at);
    }

    void declare_ports() {
        for (const auto& p : m_.ports) {
            Net net;
            net.name = p.name;
            net.dir = p.dir == ast::Direction::input ? PortDir::input : PortDir::output;
            net.is_signed = p.is_signed;
            net.declared_reg = p.is_reg;
            if (p.dir == ast::Direction::input && p.is_reg) error(p.loc, "input '" + p.name + "' cannot be a reg");
            if (!resolve_range(p.range, net, p.loc)) continue;
            add_net(std::move(net), p.loc);
        }
        d_.num_ports = static_cast<int>(d_.nets.size());
    }

    void declare_nets() {
        for (const auto& item : m_.items) {
            const auto* n = std::get_if<ast::NetDecl>(&item);
            if (!n) continue;
            Net net;
            net.name = n->name;
            net.is_signed = n->is_signed;
            net.declared_reg = n->kind == ast::NetKind::reg;
            if (n->init && net.declared_reg) {
                error(n->loc, "reg '" + n->name + "' cannot have a declaration initializer");
                continue;
            }
            if (!resolve_range(n->range, net, n->loc)) continue;
            add_net(std::move(net), n->loc);
        }
    }

    // ------------------------------------------------------------ expressions

    NetId lookup_net(const std::string& name, SourceLoc at) {
        auto it = symbols_.find(name);
        if (it == symbols_.end()) {
            if (params_.count(name)) fail(at, "parameter '" + name + "' cannot be selected or assigned");
            fail(at, "undeclared identifier '" + name + "'");
        }
        return it->second;
    }

    static int param_width(std::int64_t v) {
        return (v >= INT32_MIN && v <= INT32_MAX) ? 32 : 64;
    }

    // Maps a declared index to a bit position of `net`.
    static std::int64_t position(const Net& net, std::int64_t index) {
        return net.descending() ? index - net.lsb : net.lsb - index;
    }

    Info info(const ast::Expr& e) {
        Info r = info_unchecked(e);
        if (r.width > kMaxWidth) fail(e.loc, "expression is " + std::to_string(r.width) + " bits wide; at most 64 bits are supported");
        return r;
    }

    Info info_unchecked(const ast::Expr& e) {
        switch (e.kind) {
            case ExprKind::number:
                return {e.width, e.is_signed};
            case ExprKind::ident: {
                auto p = params_.find(e.name);
                if (p != params_.end()) return {param_width(p->second), true};
                const Net& n = d_.nets[static_cast<std::size_t>(lookup_net(e.name, e.loc))];
                return {n.width, n.is_signed};
            }
            case ExprKind::unary:
                if (e.op == "+" || e.op == "-" || e.op == "~") return info(e.args[0]);
                info(e.args[0]);
                return {1, false};
            case ExprKind::binary: {
                Info a = info(e.args[0]);
                Info b = info(e.args[1]);
                if (is_arith_or_bitwise(e.op)) return {std::max(a.width, b.width), a.is_signed && b.is_signed};
                if (is_shift(e.op)) return a;
                if (is_compare(e.op) || e.op == "&&" || e.op == "||") return {1, false};
                fail(e.loc, "unsupported operator '" + e.op + "'");
            }
            case ExprKind::ternary: {
                info(e.args[0]);
                Info t = info(e.args[1]);
                Info f = info(e.args[2]);
                return {std::max(t.width, f.width), t.is_signed && f.is_signed};
            }
            case ExprKind::concat: {
                int w = 0;
                for (const auto& a : e.args) {
                    if (a.kind == ExprKind::number && !a.sized) fail(a.loc, "unsized constant in concatenation");
                    w += info(a).width;
                }
                return {w, false};
            }
            case ExprKind::replicate: {
                std::int64_t count = const_int(e.args[0], "replication count");
                if (count < 1 || count > kMaxWidth) fail(e.loc, "replication count must be between 1 and 64");
                int w = 0;
                for (std::size_t i = 1; i < e.args.size(); ++i) {
                    if (e.args[i].kind == ExprKind::number && !e.args[i].sized) {
                        fail(e.args[i].loc, "unsized constant in replication");
                    }
                    w += info(e.args[i]).width;
                }
                return {static_cast<int>(count) * w, false};
            }
            case ExprKind::bit_select:
                lookup_net(e.name, e.loc);
                info(e.args[0]);
                return {1, false};
            case ExprKind::part_select: {
                lookup_net(e.name, e.loc);
                std::int64_t a = const_int(e.args[0], "part-select bound");
                std::int64_t b = const_int(e.args[1], "part-select bound");
                return {static_cast<int>(std::min<std::int64_t>((a >= b ? a - b : b - a) + 1, 1 << 20)), false};
            }
            case ExprKind::indexed_up:
            case ExprKind::indexed_down: {
                lookup_net(e.name, e.loc);
                info(e.args[0]);
                std::int64_t w = const_int(e.args[1], "indexed part-select width");
                if (w < 1) fail(e.loc, "indexed part-select width must be positive");
                return {static_cast<int>(std::min<std::int64_t>(w, 1 << 20)), false};
            }
            case ExprKind::call: {
                Info a = info(e.args[0]);
                return {a.width, e.name == "$signed"};
            }
        }
        fail(e.loc, "unsupported expression");
    }

    static Expr extend(Expr node, int width, bool is_signed) {
        if (node.width >= width) return node;
        Expr x;
        x.op = is_signed ? Op::sext : Op::zext;
        x.width = width;
        x.is_signed = is_signed;
        x.args.push_back(std::move(node));
        return x;
    }

    static Expr make(Op op, int width, bool is_signed, std::vector<Expr> args) {
        Expr x;
        x.op = op;
        x.width = width;
        x.is_signed = is_signed;
        x.args = std::move(args);
        return x;
    }

    static Expr constant(std::uint64_t v, int width, bool is_signed) {
        Expr x;
        x.op = Op::constant;
        x.width = width;
        x.is_signed = is_signed;
        x.value = v & width_mask(width);
        return x;
    }

    Expr net_ref(NetId id) {
        const Net& n = d_.nets[static_cast<std::size_t>(id)];
        Expr x;
        x.op = Op::net;
        x.net = id;
        x.width = n.width;
        x.is_signed = n.is_signed;
        return x;
    }

    Expr lower_self(const ast::Expr& e) {
        Info i = info(e);
        return lower(e, i.width, i.is_signed);
    }

    Expr lower_bool(const ast::Expr& e) {
        Expr x = lower_self(e);
        if (x.width == 1) return x;
        return make(Op::red_or, 1, false, {std::move(x)});
    }

    Expr const_slice(NetId id, std::int64_t hi_index, std::int64_t lo_index, SourceLoc at) {
        const Net& n = d_.nets[static_cast<std::size_t>(id)];
        std::int64_t p_hi = position(n, hi_index);
        std::int64_t p_lo = position(n, lo_index);
        if (p_hi < p_lo) fail(at, "part-select direction does not match the declaration of '" + n.name + "'");
        if (p_lo < 0 || p_hi >= n.width) fail(at, "select out of range for '" + n.name + "'");
        Expr x = make(Op::slice, static_cast<int>(p_hi - p_lo + 1), false, {net_ref(id)});
        x.lo = static_cast<int>(p_lo);
        return x;
    }

    Expr lower(const ast::Expr& e, int W, bool S) {
        switch (e.kind) {
            case ExprKind::number: {
                if (e.dont_care != 0) fail(e.loc, "wildcard bits are only allowed in casez labels");
                std::uint64_t v = (e.is_signed && S) ? sign_extend(e.value, e.width, W) : e.value;
                return constant(v, W, S);
            }
            case ExprKind::ident: {
                auto p = params_.find(e.name);
                if (p != params_.end()) {
                    int pw = param_width(p->second);
                    std::uint64_t raw = static_cast<std::uint64_t>(p->second) & width_mask(pw);
                    std::uint64_t v = S ? sign_extend(raw, pw, W) : raw;
                    return constant(v, W, S);
                }
                NetId id = lookup_net(e.name, e.loc);
                return extend(net_ref(id), W, S);
            }
            case ExprKind::unary: {
                const std::string& op = e.op;
                if (op == "+") return lower(e.args[0], W, S);
                if (op == "-") return make(Op::neg, W, S, {lower(e.args[0], W, S)});
                if (op == "~") return make(Op::bit_not, W, S, {lower(e.args[0], W, S)});
                if (op == "!") return extend(make(Op::log_not, 1, false, {lower_self(e.args[0])}), W, S);
                static const std::map<std::string, Op> reductions = {
                    {"&", Op::red_and}, {"|", Op::red_or}, {"^", Op::red_xor},
                    {"~&", Op::red_nand}, {"~|", Op::red_nor}, {"~^", Op::red_xnor}};
                auto it = reductions.find(op);
                if (it == reductions.end()) fail(e.loc, "unsupported unary operator '" + op + "'");
                return extend(make(it->second, 1, false, {lower_self(e.args[0])}), W, S);
            }
            case ExprKind::binary: {
                const std::string& op = e.op;
                if (is_arith_or_bitwise(op)) {
                    static const std::map<std::string, Op> ops = {
                        {"+", Op::add}, {"-", Op::sub}, {"*", Op::mul}, {"/", Op::div}, {"%", Op::mod},
                        {"&", Op::bit_and}, {"|", Op::bit_or}, {"^", Op::bit_xor}, {"~^", Op::bit_xnor}};
                    Expr x = make(ops.at(op), W, S, {lower(e.args[0], W, S), lower(e.args[1], W, S)});
                    x.signed_operands = S && (x.op == Op::div || x.op == Op::mod);
                    return x;
                }
                if (is_compare(op)) {
                    Info a = info(e.args[0]);
                    Info b = info(e.args[1]);
                    int cw = std::max(a.width, b.width);
                    bool cs = a.is_signed && b.is_signed;
                    static const std::map<std::string, Op> ops = {{"==", Op::eq}, {"!=", Op::ne}, {"<", Op::lt},
                                                                  {"<=", Op::le}, {">", Op::gt}, {">=", Op::ge}};
                    Expr x = make(ops.at(op), 1, false, {lower(e.args[0], cw, cs), lower(e.args[1], cw, cs)});
                    x.signed_operands = cs;
                    return extend(std::move(x), W, S);
                }
                if (op == "&&" || op == "||") {
                    Expr x = make(op == "&&" ? Op::log_and : Op::log_or, 1, false,
                                  {lower_self(e.args[0]), lower_self(e.args[1])});
                    return extend(std::move(x), W, S);
                }
                if (is_shift(op)) {
                    Op sop = op == ">>>" && S ? Op::ashr : (op == ">>" || op == ">>>") ? Op::shr : Op::shl;
                    Expr x = make(sop, W, S, {lower(e.args[0], W, S), lower_self(e.args[1])});
                    x.signed_operands = sop == Op::ashr;
                    return x;
                }
                fail(e.loc, "unsupported operator '" + op + "'");
            }
            case ExprKind::ternary:
                return make(Op::mux, W, S, {lower_self(e.args[0]), lower(e.args[1], W, S), lower(e.args[2], W, S)});
            case ExprKind::concat: {
                std::vector<Expr> parts;
                int total = 0;
                for (const auto& a : e.args) {
                    parts.push_back(lower_self(a));
                    total += parts.back().width;
                }
                if (parts.size() == 1) return extend(std::move(parts[0]), W, S);
                return extend(make(Op::concat, total, false, std::move(parts)), W, S);
            }
            case ExprKind::replicate: {
                std::int64_t count = const_int(e.args[0], "replication count");
                std::vector<Expr> unit;
                for (std::size_t i = 1; i < e.args.size(); ++i) unit.push_back(lower_self(e.args[i]));
                std::vector<Expr> parts;
                int total = 0;
                for (std::int64_t c = 0; c < count; ++c) {
                    for (const auto& u : unit) {
                        parts.push_back(u);
                        total += u.width;
                    }
                }
                if (parts.size() == 1) return extend(std::move(parts[0]), W, S);
                return extend(make(Op::concat, total, false, std::move(parts)), W, S);
            }
            case ExprKind::bit_select: {
                NetId id = lookup_net(e.name, e.loc);
                auto idx = frontend::eval_const(e.args[0], params_);
                if (idx) return extend(const_slice(id, *idx, *idx, e.loc), W, S);
                const Net& n = d_.nets[static_cast<std::size_t>(id)];
                Expr x = make(Op::dyn_bit, 1, false, {net_ref(id), lower_self(e.args[0])});
                x.sel_lsb = n.lsb;
                x.sel_descending = n.descending();
                return extend(std::move(x), W, S);
            }
            case ExprKind::part_select: {
                NetId id = lookup_net(e.name, e.loc);
                std::int64_t a = const_int(e.args[0], "part-select bound");
                std::int64_t b = const_int(e.args[1], "part-select bound");
                return extend(const_slice(id, a, b, e.loc), W, S);
            }
            case ExprKind::indexed_up:
            case ExprKind::indexed_down: {
                NetId id = lookup_net(e.name, e.loc);
                const Net& n = d_.nets[static_cast<std::size_t>(id)];
                std::int64_t w = const_int(e.args[1], "indexed part-select width");
                bool down = e.kind == ExprKind::indexed_down;
                auto start = frontend::eval_const(e.args[0], params_);
                if (start) {
                    std::int64_t hi = down ? *start : *start + w - 1;
                    std::int64_t lo = down ? *start - w + 1 : *start;
                    if (!n.descending()) std::swap(hi, lo);
                    return extend(const_slice(id, hi, lo, e.loc), W, S);
                }
                if (!n.descending()) fail(e.loc, "indexed part-select of ascending range '" + n.name + "' is not supported");
                Expr x = make(Op::dyn_slice, static_cast<int>(w), false, {net_ref(id), lower_self(e.args[0])});
                x.sel_lsb = n.lsb;
                x.sel_descending = true;
                x.down = down;
                return extend(std::move(x), W, S);
            }
            case ExprKind::call: {
                Expr inner = lower_self(e.args[0]);
                int w = inner.width;
                bool to_signed = e.name == "$signed";
                return extend(make(to_signed ? Op::as_signed : Op::as_unsigned, w, to_signed, {std::move(inner)}), W, S);
            }
        }
        fail(e.loc, "unsupported expression");
    }

    // ------------------------------------------------------------ assignments

    void flatten_targets(const ast::Expr& lhs, std::vector<Target>& out) {
        switch (lhs.kind) {
            case ExprKind::concat:
                for (const auto& a : lhs.args) flatten_targets(a, out);
                return;
            case ExprKind::ident: {
                Target t;
                t.net = lookup_net(lhs.name, lhs.loc);
                t.kind = TargetKind::whole;
                t.width = d_.nets[static_cast<std::size_t>(t.net)].width;
                out.push_back(std::move(t));
                return;
            }
            case ExprKind::bit_select:
            case ExprKind::part_select:
            case ExprKind::indexed_up:
            case ExprKind::indexed_down: {
                Target t;
                t.net = lookup_net(lhs.name, lhs.loc);
                const Net& n = d_.nets[static_cast<std::size_t>(t.net)];
                Expr sel = lower_self(lhs);
                if (sel.op == Op::slice) {
                    t.kind = TargetKind::slice;
                    t.lo = sel.lo;
                    t.width = sel.width;
                } else if (sel.op == Op::dyn_bit) {
                    t.kind = TargetKind::dyn_bit;
                    t.width = 1;
                    t.index = sel.args[1];
                    t.sel_lsb = n.lsb;
                    t.sel_descending = n.descending();
                } else {
                    t.kind = TargetKind::dyn_slice;
                    t.width = sel.width;
                    t.index = sel.args[1];
                    t.sel_lsb = n.lsb;
                    t.sel_descending = true;
                    t.down = sel.down;
                }
                out.push_back(std::move(t));
                return;
            }
            default:
                fail(lhs.loc, "invalid assignment target");
        }
    }

    Assign lower_assign(const ast::Expr& lhs, const ast::Expr& rhs, SourceLoc at) {
        Assign a;
        a.loc = at;
        flatten_targets(lhs, a.targets);
        int total = 0;
        for (const auto& t : a.targets) total += t.width;
        if (total > kMaxWidth) fail(at, "assignment target is wider than 64 bits");
        Info ri = info(rhs);
        int W = std::max(ri.width, total);
        Expr v = lower(rhs, W, ri.is_signed);
        if (W > total) {
            Expr s = make(Op::slice, total, false, {std::move(v)});
            s.lo = 0;
            v = std::move(s);
        }
        a.value = std::move(v);
        return a;
    }

    // ------------------------------------------------------------ processes

    enum class ProcKind { comb, seq };

    void lower_stmt(const ast::Stmt& s, ProcKind kind, std::vector<Stmt>& out) {
        switch (s.kind) {
            case ast::StmtKind::empty:
                return;
            case ast::StmtKind::block:
                for (const auto& b : s.body) lower_stmt(b, kind, out);
                return;
            case ast::StmtKind::blocking:
            case ast::StmtKind::nonblocking: {
                if (kind == ProcKind::comb && s.kind == ast::StmtKind::nonblocking) {
                    fail(s.loc, "non-blocking assignment in a combinational block");
                }
                if (kind == ProcKind::seq && s.kind == ast::StmtKind::blocking) {
                    warning(s.loc, "blocking assignment in a sequential block is treated as non-blocking");
                }
                Stmt st;
                st.kind = StmtKind::assign;
                st.assign = lower_assign(s.lhs, s.rhs, s.loc);
                out.push_back(std::move(st));
                return;
            }
            case ast::StmtKind::if_else: {
                Stmt st;
                st.kind = StmtKind::if_else;
                st.cond = lower_self(s.cond);
                lower_stmt(s.body[0], kind, st.then_body);
                if (s.has_else) lower_stmt(s.body[1], kind, st.else_body);
                out.push_back(std::move(st));
                return;
            }
            case ast::StmtKind::case_stmt: {
                Stmt st;
                st.kind = StmtKind::case_stmt;
                Info si = info(s.cond);
                int cw = si.width;
                bool cs = si.is_signed;
                for (const auto& item : s.items) {
                    for (const auto& l : item.labels) {
                        Info li = l.kind == ExprKind::number ? Info{l.width, l.is_signed} : info(l);
                        cw = std::max(cw, li.width);
                        cs = cs && li.is_signed;
                    }
                }
                if (cw > kMaxWidth) fail(s.loc, "case expression wider than 64 bits");
                st.cond = lower(s.cond, cw, cs);
                int defaults = 0;
                for (const auto& item : s.items) {
                    if (item.is_default) {
                        if (++defaults > 1) fail(s.loc, "case statement has more than one default");
                        st.has_default = true;
                        lower_stmt(item.body[0], kind, st.default_body);
                        continue;
                    }
                    CaseArm arm;
                    for (const auto& l : item.labels) {
                        CaseLabel label;
                        if (l.kind == ExprKind::number && l.dont_care != 0) {
                            if (!s.casez) fail(l.loc, "wildcard bits are only allowed in casez labels");
                            ast::Expr plain = l;
                            plain.dont_care = 0;
                            label.value = lower(plain, cw, cs);
                            label.care = ~l.dont_care & width_mask(cw);
                        } else {
                            label.value = lower(l, cw, cs);
                            label.care = width_mask(cw);
                        }
                        arm.labels.push_back(std::move(label));
                    }
                    lower_stmt(item.body[0], kind, arm.body);
                    st.arms.push_back(std::move(arm));
                }
                if (kind == ProcKind::comb && !st.has_default) {
                    fail(s.loc, "case without default in a combinational block infers a latch");
                }
                out.push_back(std::move(st));
                return;
            }
        }
    }

    static void collect_targets(const std::vector<Stmt>& body, std::vector<NetId>& out) {
        auto add = [&](NetId id) {
            if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
        };
        for (const auto& s : body) {
            switch (s.kind) {
                case StmtKind::assign:
                    for (const auto& t : s.assign.targets) add(t.net);
                    break;
                case StmtKind::if_else:
                    collect_targets(s.then_body, out);
                    collect_targets(s.else_body, out);
                    break;
                case StmtKind::case_stmt:
                    for (const auto& a : s.arms) collect_targets(a.body, out);
                    collect_targets(s.default_body, out);
                    break;
            }
        }
    }

    void lower_always(const ast::Always& al, int order) {
        if (al.star) {
            CombProc p;
            p.source_order = order;
            lower_stmt(al.body, ProcKind::comb, p.body);
            collect_targets(p.body, p.targets);
            check_definite_assignment(p, al.loc);
            d_.comb_procs.push_back(std::move(p));
            return;
        }
        if (al.edges.empty() || !al.levels.empty() || al.edges.size() > 2) {
            fail(al.loc, "unsupported sensitivity list");
        }
        SeqProc p;
        p.source_order = order;
        std::size_t clock_idx = 0;
        if (al.edges.size() == 2) {
            bool first_is_reset = reset_name_polarity(al.edges[0].signal).has_value() &&
                                  !reset_name_polarity(al.edges[1].signal).has_value();
            clock_idx = first_is_reset ? 1 : 0;
        }
        const auto& clk = al.edges[clock_idx];
        if (clk.edge != ast::Edge::posedge) fail(al.loc, "clock '" + clk.signal + "' must be posedge");
        p.clock = lookup_net(clk.signal, al.loc);
        const Net& cn = d_.nets[static_cast<std::size_t>(p.clock)];
        if (cn.dir != PortDir::input || cn.width != 1) fail(al.loc, "clock '" + clk.signal + "' must be a 1-bit input");
        if (al.edges.size() == 2) {
            const auto& rst = al.edges[1 - clock_idx];
            NetId rid = lookup_net(rst.signal, al.loc);
            const Net& rn = d_.nets[static_cast<std::size_t>(rid)];
            if (rn.dir != PortDir::input || rn.width != 1) fail(al.loc, "reset '" + rst.signal + "' must be a 1-bit input");
            p.reset = rid;
            p.reset_active_high = rst.edge == ast::Edge::posedge;
        }
        lower_stmt(al.body, ProcKind::seq, p.body);
        collect_targets(p.body, p.targets);
        d_.seq_procs.push_back(std::move(p));
    }

    // Bits of each proc target that are assigned on every path so far.
    using Assigned = std::map<NetId, std::uint64_t>;

    void read_masks(const Expr& e, std::vector<std::pair<NetId, std::uint64_t>>& out) {
        if (e.op == Op::net) {
            out.emplace_back(e.net, width_mask(e.width));
            return;
        }
        if (e.op == Op::slice && e.args[0].op == Op::net) {
            std::uint64_t m = e.lo >= 64 ? 0 : (width_mask(e.width) << e.lo);
            out.emplace_back(e.args[0].net, m & width_mask(e.args[0].width));
            return;
        }
        for (const auto& a : e.args) read_masks(a, out);
    }

    void check_reads(const Expr& e, const Assigned& assigned, const std::set<NetId>& targets, SourceLoc at) {
        std::vector<std::pair<NetId, std::uint64_t>> reads;
        read_masks(e, reads);
        for (const auto& [id, mask] : reads) {
            if (!targets.count(id)) continue;
            auto it = assigned.find(id);
            std::uint64_t have = it == assigned.end() ? 0 : it->second;
            if ((have & mask) != mask) {
                fail(at, "combinational block reads '" + d_.nets[static_cast<std::size_t>(id)].name +
                             "' before assigning it (combinational loop)");
            }
        }
    }

    static Assigned intersect(const Assigned& a, const Assigned& b) {
        Assigned r;
        for (const auto& [id, m] : a) {
            auto it = b.find(id);
            if (it != b.end() && (m & it->second)) r[id] = m & it->second;
        }
        return r;
    }

    void definite(const std::vector<Stmt>& body, Assigned& assigned, const std::set<NetId>& targets) {
        for (const auto& s : body) {
            switch (s.kind) {
                case StmtKind::assign:
                    check_reads(s.assign.value, assigned, targets, s.assign.loc);
                    for (const auto& t : s.assign.targets) {
                        if (t.index) check_reads(*t.index, assigned, targets, s.assign.loc);
                    }
                    for (const auto& t : s.assign.targets) {
                        const Net& n = d_.nets[static_cast<std::size_t>(t.net)];
                        if (t.kind == TargetKind::whole) {
                            assigned[t.net] = width_mask(n.width);
                        } else if (t.kind == TargetKind::slice) {
                            assigned[t.net] |= (width_mask(t.width) << t.lo) & width_mask(n.width);
                        }
                    }
                    break;
                case StmtKind::if_else: {
                    check_reads(s.cond, assigned, targets, SourceLoc{});
                    Assigned a = assigned;
                    Assigned b = assigned;
                    definite(s.then_body, a, targets);
                    definite(s.else_body, b, targets);
                    assigned = intersect(a, b);
                    break;
                }
                case StmtKind::case_stmt: {
                    check_reads(s.cond, assigned, targets, SourceLoc{});
                    for (const auto& arm : s.arms) {
                        for (const auto& l : arm.labels) check_reads(l.value, assigned, targets, SourceLoc{});
                    }
                    Assigned merged = assigned;
                    definite(s.default_body, merged, targets);
                    for (const auto& arm : s.arms) {
                        Assigned a = assigned;
                        definite(arm.body, a, targets);
                        merged = intersect(merged, a);
                    }
                    assigned = merged;
                    break;
                }
            }
        }
    }

    void check_definite_assignment(const CombProc& p, SourceLoc at) {
        std::set<NetId> targets(p.targets.begin(), p.targets.end());
        Assigned assigned;
        definite(p.body, assigned, targets);
        for (NetId id : p.targets) {
            const Net& n = d_.nets[static_cast<std::size_t>(id)];
            auto it = assigned.find(id);
            if (it == assigned.end() || it->second != width_mask(n.width)) {
                fail(at, "'" + n.name + "' is not assigned on every path of a combinational block (latch inferred)");
            }
        }
    }

    // ------------------------------------------------------------ drivers

    void classify_drivers() {
        std::vector<int> comb_proc_owner(d_.nets.size(), -1);
        std::vector<int> seq_proc_owner(d_.nets.size(), -1);
        std::vector<std::vector<std::pair<std::uint64_t, SourceLoc>>> assign_bits(d_.nets.size());

        for (const auto& ca : d_.assigns) {
            for (const auto& t : ca.assign.targets) {
                const Net& n = d_.nets[static_cast<std::size_t>(t.net)];
                std::uint64_t bits = t.kind == TargetKind::slice ? ((width_mask(t.width) << t.lo) & width_mask(n.width))
                                                                 : width_mask(n.width);
                for (const auto& [prev, _] : assign_bits[static_cast<std::size_t>(t.net)]) {
                    if (prev & bits) error(ca.assign.loc, "'" + n.name + "' has multiple continuous drivers");
                }
                assign_bits[static_cast<std::size_t>(t.net)].emplace_back(bits, ca.assign.loc);
            }
        }
        for (std::size_t i = 0; i < d_.comb_procs.size(); ++i) {
            for (NetId id : d_.comb_procs[i].targets) {
                auto& owner = comb_proc_owner[static_cast<std::size_t>(id)];
                if (owner >= 0) error(SourceLoc{}, "'" + d_.nets[static_cast<std::size_t>(id)].name + "' is assigned in more than one always block");
                owner = static_cast<int>(i);
            }
        }
        for (std::size_t i = 0; i < d_.seq_procs.size(); ++i) {
            for (NetId id : d_.seq_procs[i].targets) {
                auto& owner = seq_proc_owner[static_cast<std::size_t>(id)];
                if (owner >= 0 || comb_proc_owner[static_cast<std::size_t>(id)] >= 0) {
                    error(SourceLoc{}, "'" + d_.nets[static_cast<std::size_t>(id)].name + "' is assigned in more than one always block");
                }
                owner = static_cast<int>(i);
            }
        }

        for (std::size_t id = 0; id < d_.nets.size(); ++id) {
            Net& n = d_.nets[id];
            SourceLoc at = net_locs_[id];
            bool cont = !assign_bits[id].empty();
            bool comb = comb_proc_owner[id] >= 0;
            bool seq = seq_proc_owner[id] >= 0;
            if (n.dir == PortDir::input) {
                if (cont || comb || seq) error(at, "input '" + n.name + "' is assigned");
                n.driver = DriverKind::input;
                continue;
            }
            if (int(cont) + int(comb) + int(seq) > 1) {
                error(at, "'" + n.name + "' is driven by more than one kind of driver");
                continue;
            }
            if (cont) {
                if (n.declared_reg) error(at, "continuous assignment to reg '" + n.name + "'");
                n.driver = DriverKind::continuous;
            } else if (comb) {
                if (!n.declared_reg) error(at, "procedural assignment to wire '" + n.name + "'");
                n.driver = DriverKind::combinational;
            } else if (seq) {
                if (!n.declared_reg) error(at, "sequential target '" + n.name + "' is not a reg");
                n.driver = DriverKind::sequential;
            } else {
                n.driver = DriverKind::undriven;
                if (n.dir == PortDir::output) warning(at, "output '" + n.name + "' is never driven; it reads as 0");
            }
        }
    }

    void collect_reads_stmt(const std::vector<Stmt>& body, std::vector<std::pair<NetId, SourceLoc>>& out) {
        for (const auto& s : body) {
            std::vector<NetId> ids;
            switch (s.kind) {
                case StmtKind::assign:
                    collect_reads(s.assign.value, ids);
                    for (const auto& t : s.assign.targets) {
                        if (t.index) collect_reads(*t.index, ids);
                    }
                    for (NetId id : ids) out.emplace_back(id, s.assign.loc);
                    break;
                case StmtKind::if_else:
                    collect_reads(s.cond, ids);
                    for (NetId id : ids) out.emplace_back(id, SourceLoc{});
                    collect_reads_stmt(s.then_body, out);
                    collect_reads_stmt(s.else_body, out);
                    break;
                case StmtKind::case_stmt:
                    collect_reads(s.cond, ids);
                    for (const auto& arm : s.arms) {
                        for (const auto& l : arm.labels) collect_reads(l.value, ids);
                        collect_reads_stmt(arm.body, out);
                    }
                    for (NetId id : ids) out.emplace_back(id, SourceLoc{});
                    collect_reads_stmt(s.default_body, out);
                    break;
            }
        }
    }

    void collect_clocks_and_resets() {
        for (const auto& p : d_.seq_procs) {
            if (std::find(d_.clocks.begin(), d_.clocks.end(), p.clock) == d_.clocks.end()) d_.clocks.push_back(p.clock);
        }
        std::sort(d_.clocks.begin(), d_.clocks.end());
        for (const auto& p : d_.seq_procs) {
            if (!p.reset) continue;
            bool seen = false;
            for (auto& r : d_.resets) {
                if (r.net == *p.reset) {
                    seen = true;
                    if (r.active_high != p.reset_active_high) {
                        error(SourceLoc{}, "reset '" + d_.nets[static_cast<std::size_t>(r.net)].name + "' is used with both polarities");
                    }
                }
            }
            if (!seen) d_.resets.push_back({*p.reset, p.reset_active_high});
        }
        for (NetId id = 0; id < d_.num_ports; ++id) {
            const Net& n = d_.nets[static_cast<std::size_t>(id)];
            if (n.dir != PortDir::input) continue;
            auto pol = reset_name_polarity(n.name);
            if (!pol || d_.is_clock(id)) continue;
            bool seen = false;
            for (const auto& r : d_.resets) seen = seen || r.net == id;
            if (!seen) d_.resets.push_back({id, *pol});
        }
        std::sort(d_.resets.begin(), d_.resets.end(), [](const auto& a, const auto& b) { return a.net < b.net; });
        for (const auto& r : d_.resets) {
            if (d_.nets[static_cast<std::size_t>(r.net)].width != 1) {
                error(SourceLoc{}, "reset '" + d_.nets[static_cast<std::size_t>(r.net)].name + "' must be 1 bit wide");
            }
        }

        if (d_.clocks.empty()) return;
        std::vector<std::pair<NetId, SourceLoc>> reads;
        for (const auto& ca : d_.assigns) {
            std::vector<NetId> ids;
            collect_reads(ca.assign.value, ids);
            for (const auto& t : ca.assign.targets) {
                if (t.index) collect_reads(*t.index, ids);
            }
            for (NetId id : ids) reads.emplace_back(id, ca.assign.loc);
        }
        for (const auto& p : d_.comb_procs) collect_reads_stmt(p.body, reads);
        for (const auto& p : d_.seq_procs) collect_reads_stmt(p.body, reads);
        for (const auto& [id, at] : reads) {
            if (d_.is_clock(id)) {
                error(at, "clock '" + d_.nets[static_cast<std::size_t>(id)].name + "' is used as data");
                return;
            }
        }
    }
};

}  // namespace

LowerResult lower_to_ir(const ast::Module& m, const frontend::ParamValues& overrides) {
    LowerResult r;
    Lowerer lowerer(m, r.diagnostics);
    r.design = lowerer.run(overrides);
    if (has_errors(r.diagnostics)) r.design.reset();
    return r;
}

}  // namespace rtlxv::ir

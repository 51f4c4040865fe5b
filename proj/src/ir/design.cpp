#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "rtlxv/ir/ir.hpp"

namespace rtlxv::ir {

std::uint64_t width_mask(int width) {
    if (width >= 64) return ~std::uint64_t{0};
    if (width <= 0) return 0;
    return (std::uint64_t{1} << width) - 1;
}

std::optional<bool> reset_name_polarity(const std::string& name) {
    std::string lower;
    for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "rst" || lower == "reset" || lower == "areset") return true;
    if (lower == "rst_n" || lower == "resetn" || lower == "reset_n") return false;
    return std::nullopt;
}

void collect_reads(const Expr& e, std::vector<NetId>& out) {
    if (e.op == Op::net) {
        if (std::find(out.begin(), out.end(), e.net) == out.end()) out.push_back(e.net);
        return;
    }
    for (const auto& a : e.args) collect_reads(a, out);
}

std::vector<IrPort> Design::ports() const {
    std::vector<IrPort> r;
    for (int i = 0; i < num_ports; ++i) {
        const Net& n = nets[static_cast<std::size_t>(i)];
        r.push_back({n.name, n.dir, n.width, n.is_signed});
    }
    return r;
}

std::vector<NetId> Design::inputs() const {
    std::vector<NetId> r;
    for (int i = 0; i < num_ports; ++i) {
        if (nets[static_cast<std::size_t>(i)].dir == PortDir::input) r.push_back(i);
    }
    return r;
}

std::vector<NetId> Design::outputs() const {
    std::vector<NetId> r;
    for (int i = 0; i < num_ports; ++i) {
        if (nets[static_cast<std::size_t>(i)].dir == PortDir::output) r.push_back(i);
    }
    return r;
}

std::vector<NetId> Design::state_nets() const {
    std::vector<NetId> r;
    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (nets[i].driver == DriverKind::sequential) r.push_back(static_cast<NetId>(i));
    }
    return r;
}

bool Design::is_clock(NetId id) const { return std::find(clocks.begin(), clocks.end(), id) != clocks.end(); }

const ResetInput* Design::reset_for(NetId id) const {
    for (const auto& r : resets) {
        if (r.net == id) return &r;
    }
    return nullptr;
}

std::optional<NetId> Design::find_net(const std::string& name) const {
    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (nets[i].name == name) return static_cast<NetId>(i);
    }
    return std::nullopt;
}

namespace {

const char* op_name(Op op) {
    switch (op) {
        case Op::constant: return "const";
        case Op::net: return "net";
        case Op::zext: return "zext";
        case Op::sext: return "sext";
        case Op::slice: return "slice";
        case Op::dyn_bit: return "dynbit";
        case Op::dyn_slice: return "dynslice";
        case Op::as_signed: return "signed";
        case Op::as_unsigned: return "unsigned";
        case Op::bit_not: return "not";
        case Op::neg: return "neg";
        case Op::add: return "add";
        case Op::sub: return "sub";
        case Op::mul: return "mul";
        case Op::div: return "div";
        case Op::mod: return "mod";
        case Op::bit_and: return "and";
        case Op::bit_or: return "or";
        case Op::bit_xor: return "xor";
        case Op::bit_xnor: return "xnor";
        case Op::shl: return "shl";
        case Op::shr: return "shr";
        case Op::ashr: return "ashr";
        case Op::eq: return "eq";
        case Op::ne: return "ne";
        case Op::lt: return "lt";
        case Op::le: return "le";
        case Op::gt: return "gt";
        case Op::ge: return "ge";
        case Op::log_and: return "land";
        case Op::log_or: return "lor";
        case Op::log_not: return "lnot";
        case Op::red_and: return "rand";
        case Op::red_or: return "ror";
        case Op::red_xor: return "rxor";
        case Op::red_nand: return "rnand";
        case Op::red_nor: return "rnor";
        case Op::red_xnor: return "rxnor";
        case Op::mux: return "mux";
        case Op::concat: return "concat";
    }
    return "?";
}

class Printer {
public:
    Printer(const Design& d, bool canonical) : d_(d), canonical_(canonical), names_(d.nets.size()) {}

    std::string run() {
        std::ostringstream& os = os_;
        os << "design" << (canonical_ ? "" : " " + d_.name) << "\n";
        for (std::size_t i = 0; i < d_.nets.size(); ++i) {
            const Net& n = d_.nets[i];
            if (canonical_ && !n.is_port()) continue;
            os << "  " << (n.dir == PortDir::input ? "input" : n.dir == PortDir::output ? "output" : "net") << " "
               << name(static_cast<NetId>(i)) << " : " << n.width << (n.is_signed ? "s" : "") << " "
               << driver_name(n.driver);
            if (!canonical_ && (n.msb != n.width - 1 || n.lsb != 0)) os << " [" << n.msb << ":" << n.lsb << "]";
            os << "\n";
        }
        for (NetId c : d_.clocks) os << "  clock " << name(c) << "\n";
        for (const auto& r : d_.resets) os << "  reset " << name(r.net) << (r.active_high ? " high" : " low") << "\n";
        for (const auto& ref : d_.comb_order) {
            if (ref.kind == DriverRef::Kind::assign) {
                os << "  assign ";
                assign(d_.assigns[static_cast<std::size_t>(ref.index)].assign);
                os << "\n";
            } else {
                os << "  comb\n";
                body(d_.comb_procs[static_cast<std::size_t>(ref.index)].body, 2);
            }
        }
        for (const auto& p : d_.seq_procs) {
            os << "  seq " << name(p.clock);
            if (p.reset) os << " reset " << name(*p.reset) << (p.reset_active_high ? " high" : " low");
            os << "\n";
            body(p.body, 2);
        }
        // Internal nets first named in the body are listed after it in canonical form.
        if (canonical_) {
            for (std::size_t i = 0; i < d_.nets.size(); ++i) {
                const Net& n = d_.nets[i];
                if (n.is_port() || names_[i].empty()) continue;
                os << "  net " << names_[i] << " : " << n.width << (n.is_signed ? "s" : "") << " "
                   << driver_name(n.driver) << "\n";
            }
        }
        return os.str();
    }

private:
    const Design& d_;
    bool canonical_;
    std::vector<std::string> names_;
    int next_ = 0;
    std::ostringstream os_;

    static const char* driver_name(DriverKind k) {
        switch (k) {
            case DriverKind::undriven: return "undriven";
            case DriverKind::input: return "in";
            case DriverKind::continuous: return "wire";
            case DriverKind::combinational: return "comb";
            case DriverKind::sequential: return "state";
        }
        return "?";
    }

    std::string name(NetId id) {
        auto& slot = names_[static_cast<std::size_t>(id)];
        if (slot.empty()) slot = canonical_ ? "n" + std::to_string(next_++) : d_.nets[static_cast<std::size_t>(id)].name;
        return slot;
    }

    std::string expr(const Expr& e) {
        if (e.op == Op::constant) return std::to_string(e.width) + (e.is_signed ? "'sd" : "'d") + std::to_string(e.value);
        if (e.op == Op::net) return name(e.net);
        std::string s = std::string(op_name(e.op)) + ":" + std::to_string(e.width);
        if (e.is_signed) s += "s";
        if (e.signed_operands) s += "!";
        if (e.op == Op::slice) s += "@" + std::to_string(e.lo);
        if (e.op == Op::dyn_bit || e.op == Op::dyn_slice) {
            s += "@" + std::to_string(e.sel_lsb) + (e.sel_descending ? "" : "asc") + (e.down ? "-" : "");
        }
        s += "(";
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) s += ", ";
            s += expr(e.args[i]);
        }
        return s + ")";
    }

    std::string target(const Target& t) {
        std::string s = name(t.net);
        switch (t.kind) {
            case TargetKind::whole: return s;
            case TargetKind::slice: return s + "[" + std::to_string(t.lo) + "+:" + std::to_string(t.width) + "]";
            case TargetKind::dyn_bit:
            case TargetKind::dyn_slice:
                return s + "[" + expr(*t.index) + (t.down ? " -: " : " +: ") + std::to_string(t.width) + " @" +
                       std::to_string(t.sel_lsb) + (t.sel_descending ? "" : "asc") + "]";
        }
        return s;
    }

    void assign(const Assign& a) {
        if (a.targets.size() == 1) {
            os_ << target(a.targets[0]);
        } else {
            os_ << "{";
            for (std::size_t i = 0; i < a.targets.size(); ++i) os_ << (i ? ", " : "") << target(a.targets[i]);
            os_ << "}";
        }
        os_ << " = " << expr(a.value);
    }

    void body(const std::vector<Stmt>& stmts, int indent) {
        std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        for (const auto& s : stmts) {
            switch (s.kind) {
                case StmtKind::assign:
                    os_ << pad;
                    assign(s.assign);
                    os_ << "\n";
                    break;
                case StmtKind::if_else:
                    os_ << pad << "if " << expr(s.cond) << "\n";
                    body(s.then_body, indent + 1);
                    if (!s.else_body.empty()) {
                        os_ << pad << "else\n";
                        body(s.else_body, indent + 1);
                    }
                    break;
                case StmtKind::case_stmt:
                    os_ << pad << "case " << expr(s.cond) << "\n";
                    for (const auto& arm : s.arms) {
                        os_ << pad << " ";
                        for (std::size_t i = 0; i < arm.labels.size(); ++i) {
                            os_ << (i ? ", " : " ") << expr(arm.labels[i].value);
                            if (arm.labels[i].care != width_mask(arm.labels[i].value.width)) {
                                os_ << " care " << arm.labels[i].care;
                            }
                        }
                        os_ << ":\n";
                        body(arm.body, indent + 2);
                    }
                    if (s.has_default) {
                        os_ << pad << "  default:\n";
                        body(s.default_body, indent + 2);
                    }
                    break;
            }
        }
    }
};

}  // namespace

std::string print_design(const Design& d, bool canonical) { return Printer(d, canonical).run(); }

}  // namespace rtlxv::ir

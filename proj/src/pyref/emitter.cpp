#include "rtlxv/pyref/emitter.hpp"
#include "rtlxv/sim/interpreter.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace rtlxv::pyref {

namespace {

using ir::Expr;
using ir::Op;
using ir::width_mask;

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << "0x" << std::uppercase << std::hex << v;
    return os.str();
}

const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {
        "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
        "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in",
        "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
        "self", "inputs", "outputs", "dict", "eval"};
    return words;
}

// Helper functions are emitted only when used, in this fixed order.
enum Helper { kShl, kExt, kStore, kUdiv, kUmod, kSdiv, kSmod, kParity, kHelperCount };

const std::array<const char*, kHelperCount> kHelperText = {
    "def _shl(v, n, w):\n"
    "    if n >= w:\n"
    "        return 0\n"
    "    return (v << n) & ((1 << w) - 1)\n",

    "def _ext(v, total, pos, w):\n"
    "    if pos >= total or pos + w <= 0:\n"
    "        return 0\n"
    "    if pos >= 0:\n"
    "        return (v >> pos) & ((1 << w) - 1)\n"
    "    return (v << -pos) & ((1 << w) - 1)\n",

    "def _store(old, total, pos, w, val):\n"
    "    if pos >= total or pos + w <= 0:\n"
    "        return old\n"
    "    field = (1 << w) - 1\n"
    "    if pos >= 0:\n"
    "        m = field << pos\n"
    "        val = (val & field) << pos\n"
    "    else:\n"
    "        m = field >> -pos\n"
    "        val = (val & field) >> -pos\n"
    "    m &= (1 << total) - 1\n"
    "    return (old & ~m & ((1 << total) - 1)) | (val & m)\n",

    "def _udiv(a, b):\n"
    "    if b == 0:\n"
    "        return 0\n"
    "    return a // b\n",

    "def _umod(a, b):\n"
    "    if b == 0:\n"
    "        return 0\n"
    "    return a % b\n",

    "def _sdiv(a, b, w):\n"
    "    s = 1 << (w - 1)\n"
    "    a = (a ^ s) - s\n"
    "    b = (b ^ s) - s\n"
    "    if b == 0:\n"
    "        return 0\n"
    "    q = (a if a >= 0 else -a) // (b if b >= 0 else -b)\n"
    "    if (a < 0) != (b < 0):\n"
    "        q = -q\n"
    "    return q & ((1 << w) - 1)\n",

    "def _smod(a, b, w):\n"
    "    s = 1 << (w - 1)\n"
    "    a = (a ^ s) - s\n"
    "    b = (b ^ s) - s\n"
    "    if b == 0:\n"
    "        return 0\n"
    "    r = (a if a >= 0 else -a) % (b if b >= 0 else -b)\n"
    "    if a < 0:\n"
    "        r = -r\n"
    "    return r & ((1 << w) - 1)\n",

    "def _parity(v):\n"
    "    p = 0\n"
    "    while v:\n"
    "        p ^= 1\n"
    "        v &= v - 1\n"
    "    return p\n",
};

std::string signed_view(const std::string& v, int width) {
    std::string s = hex(std::uint64_t{1} << (width - 1));
    return "((" + v + " ^ " + s + ") - " + s + ")";
}

class Emitter {
public:
    explicit Emitter(const ir::Design& d) : d_(d) { assign_names(); }

    std::string reference() {
        std::ostringstream body;
        emit_class(body);
        std::string helpers;
        for (int h = 0; h < kHelperCount; ++h) {
            if (used_[static_cast<std::size_t>(h)]) helpers += std::string(kHelperText[static_cast<std::size_t>(h)]) + "\n\n";
        }
        return helpers + body.str();
    }

    std::string skeleton() {
        SkeletonSpec spec;
        spec.ports = port_manifest(d_);
        for (ir::NetId c : d_.clocks) spec.clocks.push_back(d_.nets[static_cast<std::size_t>(c)].name);
        for (ir::NetId s : d_.state_nets()) spec.state_vars.push_back(d_.nets[static_cast<std::size_t>(s)].name);
        spec.sequential = !d_.seq_procs.empty();
        return emit_skeleton(spec);
    }

private:
    const ir::Design& d_;
    std::vector<std::string> names_;
    std::array<bool, kHelperCount> used_{};
    int tmp_ = 0;
    bool in_seq_ = false;  // writes go to next-state temporaries

    void assign_names() {
        std::vector<std::string> taken;
        for (const auto& n : d_.nets) {
            names_.push_back(python_name(n.name, taken));
            taken.push_back(names_.back());
        }
    }

    bool is_state(ir::NetId id) const { return d_.nets[static_cast<std::size_t>(id)].driver == ir::DriverKind::sequential; }
    int width(ir::NetId id) const { return d_.nets[static_cast<std::size_t>(id)].width; }

    std::string read_name(ir::NetId id) const {
        const std::string& n = names_[static_cast<std::size_t>(id)];
        return is_state(id) ? "self." + n : n;
    }

    std::string write_name(ir::NetId id) const {
        const std::string& n = names_[static_cast<std::size_t>(id)];
        return in_seq_ && is_state(id) ? "_nx_" + n : n;
    }

    std::string use(Helper h) {
        used_[static_cast<std::size_t>(h)] = true;
        static const std::array<const char*, kHelperCount> names = {"_shl", "_ext", "_store", "_udiv",
                                                                    "_umod", "_sdiv", "_smod", "_parity"};
        return names[static_cast<std::size_t>(h)];
    }

    std::string position(const std::string& idx, int sel_lsb, bool descending, bool down, int w) {
        std::string p = descending ? "(" + idx + " - " + std::to_string(sel_lsb) + ")"
                                   : "(" + std::to_string(sel_lsb) + " - " + idx + ")";
        if (down) p = "(" + p + " - " + std::to_string(w - 1) + ")";
        return p;
    }

    std::string expr(const Expr& e) {
        const std::string m = hex(width_mask(e.width));
        auto a = [&](std::size_t i) { return expr(e.args[i]); };
        switch (e.op) {
            case Op::constant:
                return std::to_string(e.value);
            case Op::net:
                return read_name(e.net);
            case Op::zext:
            case Op::as_signed:
            case Op::as_unsigned:
                return a(0);
            case Op::sext:
                return "(" + signed_view(a(0), e.args[0].width) + " & " + m + ")";
            case Op::slice:
                if (e.lo == 0) return "(" + a(0) + " & " + m + ")";
                return "((" + a(0) + " >> " + std::to_string(e.lo) + ") & " + m + ")";
            case Op::dyn_bit:
            case Op::dyn_slice:
                return use(kExt) + "(" + a(0) + ", " + std::to_string(e.args[0].width) + ", " +
                       position(a(1), e.sel_lsb, e.sel_descending, e.op == Op::dyn_slice && e.down, e.width) + ", " +
                       std::to_string(e.width) + ")";
            case Op::bit_not:
                return "(~" + a(0) + " & " + m + ")";
            case Op::neg:
                return "(-" + a(0) + " & " + m + ")";
            case Op::add:
                return "((" + a(0) + " + " + a(1) + ") & " + m + ")";
            case Op::sub:
                return "((" + a(0) + " - " + a(1) + ") & " + m + ")";
            case Op::mul:
                return "((" + a(0) + " * " + a(1) + ") & " + m + ")";
            case Op::div:
            case Op::mod:
                if (e.signed_operands) {
                    return use(e.op == Op::div ? kSdiv : kSmod) + "(" + a(0) + ", " + a(1) + ", " + std::to_string(e.width) + ")";
                }
                return use(e.op == Op::div ? kUdiv : kUmod) + "(" + a(0) + ", " + a(1) + ")";
            case Op::bit_and:
                return "(" + a(0) + " & " + a(1) + ")";
            case Op::bit_or:
                return "(" + a(0) + " | " + a(1) + ")";
            case Op::bit_xor:
                return "(" + a(0) + " ^ " + a(1) + ")";
            case Op::bit_xnor:
                return "(~(" + a(0) + " ^ " + a(1) + ") & " + m + ")";
            case Op::shl:
                return use(kShl) + "(" + a(0) + ", " + a(1) + ", " + std::to_string(e.width) + ")";
            case Op::shr:
                return "(" + a(0) + " >> " + a(1) + ")";
            case Op::ashr:
                return "((" + signed_view(a(0), e.width) + " >> " + a(1) + ") & " + m + ")";
            case Op::eq:
            case Op::ne:
            case Op::lt:
            case Op::le:
            case Op::gt:
            case Op::ge: {
                static const std::array<const char*, 6> sym = {" == ", " != ", " < ", " <= ", " > ", " >= "};
                std::string l = a(0);
                std::string r = a(1);
                if (e.signed_operands && e.op != Op::eq && e.op != Op::ne) {
                    l = signed_view(l, e.args[0].width);
                    r = signed_view(r, e.args[1].width);
                }
                return "(1 if " + l + sym[static_cast<std::size_t>(e.op) - static_cast<std::size_t>(Op::eq)] + r + " else 0)";
            }
            case Op::log_and:
                return "(1 if " + a(0) + " != 0 and " + a(1) + " != 0 else 0)";
            case Op::log_or:
                return "(1 if " + a(0) + " != 0 or " + a(1) + " != 0 else 0)";
            case Op::log_not:
                return "(1 if " + a(0) + " == 0 else 0)";
            case Op::red_and:
                return "(1 if " + a(0) + " == " + hex(width_mask(e.args[0].width)) + " else 0)";
            case Op::red_nand:
                return "(0 if " + a(0) + " == " + hex(width_mask(e.args[0].width)) + " else 1)";
            case Op::red_or:
                return "(1 if " + a(0) + " != 0 else 0)";
            case Op::red_nor:
                return "(0 if " + a(0) + " != 0 else 1)";
            case Op::red_xor:
                return use(kParity) + "(" + a(0) + ")";
            case Op::red_xnor:
                return "(" + use(kParity) + "(" + a(0) + ") ^ 1)";
            case Op::mux:
                return "(" + a(1) + " if " + a(0) + " != 0 else " + a(2) + ")";
            case Op::concat: {
                std::string s = "(";
                int shift = e.width;
                for (std::size_t i = 0; i < e.args.size(); ++i) {
                    shift -= e.args[i].width;
                    if (i) s += " | ";
                    s += shift ? "(" + a(i) + " << " + std::to_string(shift) + ")" : a(i);
                }
                return s + ")";
            }
        }
        return "0";
    }

    // ---------------------------------------------------------------- statements

    using Lines = std::vector<std::string>;

    static void line(Lines& out, int indent, const std::string& text) {
        out.push_back(std::string(static_cast<std::size_t>(indent) * 4, ' ') + text);
    }

    void write_target(Lines& out, int indent, const ir::Target& t, const std::string& part) {
        const int total = width(t.net);
        const std::string dst = write_name(t.net);
        switch (t.kind) {
            case ir::TargetKind::whole:
                line(out, indent, dst + " = " + part + " & " + hex(width_mask(total)));
                return;
            case ir::TargetKind::slice: {
                std::uint64_t keep = width_mask(total) & ~((width_mask(t.width) << t.lo) & width_mask(total));
                std::uint64_t field = width_mask(t.width) & (width_mask(total) >> t.lo);
                std::string placed = "(" + part + " & " + hex(field) + ")";
                if (t.lo) placed = "(" + placed + " << " + std::to_string(t.lo) + ")";
                line(out, indent, dst + " = (" + dst + " & " + hex(keep) + ") | " + placed);
                return;
            }
            case ir::TargetKind::dyn_bit:
            case ir::TargetKind::dyn_slice: {
                std::string pos = position(expr(*t.index), t.sel_lsb, t.sel_descending,
                                           t.kind == ir::TargetKind::dyn_slice && t.down, t.width);
                line(out, indent, dst + " = " + use(kStore) + "(" + dst + ", " + std::to_string(total) + ", " + pos +
                                      ", " + std::to_string(t.width) + ", " + part + ")");
                return;
            }
        }
    }

    void emit_assign(Lines& out, int indent, const ir::Assign& a) {
        std::string value = expr(a.value);
        if (a.targets.size() == 1 && a.targets[0].kind == ir::TargetKind::whole) {
            write_target(out, indent, a.targets[0], value);
            return;
        }
        std::string tmp = "_tmp" + std::to_string(tmp_++);
        line(out, indent, tmp + " = " + value);
        int offset = a.value.width;
        for (const auto& t : a.targets) {
            offset -= t.width;
            std::string part = offset ? "(" + tmp + " >> " + std::to_string(offset) + ")" : tmp;
            write_target(out, indent, t, part);
        }
    }

    void emit_body(Lines& out, int indent, const std::vector<ir::Stmt>& body) {
        std::size_t before = out.size();
        for (const auto& s : body) {
            switch (s.kind) {
                case ir::StmtKind::assign:
                    emit_assign(out, indent, s.assign);
                    break;
                case ir::StmtKind::if_else:
                    line(out, indent, "if " + expr(s.cond) + " != 0:");
                    emit_body(out, indent + 1, s.then_body);
                    if (!s.else_body.empty()) {
                        line(out, indent, "else:");
                        emit_body(out, indent + 1, s.else_body);
                    }
                    break;
                case ir::StmtKind::case_stmt: {
                    if (s.arms.empty()) {
                        emit_body(out, indent, s.default_body);
                        break;
                    }
                    std::string subject = "_tmp" + std::to_string(tmp_++);
                    line(out, indent, subject + " = " + expr(s.cond));
                    for (std::size_t i = 0; i < s.arms.size(); ++i) {
                        std::string cond;
                        for (std::size_t k = 0; k < s.arms[i].labels.size(); ++k) {
                            const auto& l = s.arms[i].labels[k];
                            if (k) cond += " or ";
                            if (l.care == width_mask(l.value.width)) {
                                cond += subject + " == " + expr(l.value);
                            } else {
                                cond += "((" + subject + " ^ " + expr(l.value) + ") & " + hex(l.care) + ") == 0";
                            }
                        }
                        line(out, indent, (i ? "elif " : "if ") + cond + ":");
                        emit_body(out, indent + 1, s.arms[i].body);
                    }
                    if (s.has_default && !s.default_body.empty()) {
                        line(out, indent, "else:");
                        emit_body(out, indent + 1, s.default_body);
                    }
                    break;
                }
            }
        }
        if (out.size() == before) line(out, indent, "pass");
    }

    void emit_settle(Lines& out, int indent) {
        for (std::size_t i = 0; i < d_.nets.size(); ++i) {
            const auto& n = d_.nets[i];
            if (n.dir == ir::PortDir::input || n.driver == ir::DriverKind::sequential) continue;
            line(out, indent, names_[i] + " = 0");
        }
        for (const auto& ref : d_.comb_order) {
            if (ref.kind == ir::DriverRef::Kind::assign) {
                emit_assign(out, indent, d_.assigns[static_cast<std::size_t>(ref.index)].assign);
            } else {
                emit_body(out, indent, d_.comb_procs[static_cast<std::size_t>(ref.index)].body);
            }
        }
    }

    std::string output_dict(bool zero) const {
        std::string s = "{";
        bool first = true;
        for (ir::NetId id : d_.outputs()) {
            if (!first) s += ", ";
            first = false;
            s += "\"" + d_.nets[static_cast<std::size_t>(id)].name + "\": ";
            s += zero ? "0" : read_name(id) + " & " + hex(width_mask(width(id)));
        }
        return s + "}";
    }

    void emit_class(std::ostringstream& os) {
        Lines out;
        line(out, 0, "class TopModule:");
        line(out, 1, "def __init__(self):");
        auto state = d_.state_nets();
        if (state.empty()) line(out, 2, "pass");
        for (ir::NetId id : state) line(out, 2, "self." + names_[static_cast<std::size_t>(id)] + " = 0");
        out.emplace_back();
        line(out, 1, "def eval(self, inputs: dict) -> dict:");
        for (ir::NetId id : d_.inputs()) {
            if (d_.is_clock(id)) continue;
            line(out, 2, names_[static_cast<std::size_t>(id)] + " = inputs.get(\"" + d_.nets[static_cast<std::size_t>(id)].name +
                             "\", 0) & " + hex(width_mask(width(id))));
        }
        if (!d_.resets.empty()) {
            std::string cond;
            for (const auto& r : d_.resets) {
                if (!cond.empty()) cond += " or ";
                const std::string& n = names_[static_cast<std::size_t>(r.net)];
                cond += r.active_high ? n + " != 0" : n + " == 0";
            }
            line(out, 2, "if " + cond + ":");
            for (ir::NetId id : state) line(out, 3, "self." + names_[static_cast<std::size_t>(id)] + " = 0");
            line(out, 3, "return " + output_dict(true));
        }
        emit_settle(out, 2);
        if (!d_.seq_procs.empty()) {
            in_seq_ = true;
            for (ir::NetId id : state) {
                line(out, 2, "_nx_" + names_[static_cast<std::size_t>(id)] + " = self." + names_[static_cast<std::size_t>(id)]);
            }
            for (const auto& p : d_.seq_procs) emit_body(out, 2, p.body);
            in_seq_ = false;
            for (ir::NetId id : state) {
                line(out, 2, "self." + names_[static_cast<std::size_t>(id)] + " = _nx_" + names_[static_cast<std::size_t>(id)]);
            }
            emit_settle(out, 2);
        }
        line(out, 2, "return " + output_dict(false));
        for (const auto& l : out) os << l << "\n";
    }
};

}  // namespace

std::string python_name(const std::string& verilog_name, const std::vector<std::string>& taken) {
    std::string n;
    for (char c : verilog_name) n.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_');
    if (n.empty()) n = "v";
    if (n[0] == '_' || std::isdigit(static_cast<unsigned char>(n[0]))) n = "v" + n;
    auto clash = [&](const std::string& s) {
        return reserved_words().count(s) || std::find(taken.begin(), taken.end(), s) != taken.end();
    };
    while (clash(n)) n += "_v";
    return n;
}

std::vector<sim::PortInfo> port_manifest(const ir::Design& d) { return sim::trace_ports(d); }

RefSource emit_reference(const ir::Design& d) {
    RefSource r;
    r.text = Emitter(d).reference();
    r.port_manifest = port_manifest(d);
    return r;
}

std::string emit_skeleton(const ir::Design& d) { return Emitter(d).skeleton(); }

std::string emit_skeleton(const SkeletonSpec& spec) {
    std::vector<std::string> taken;
    auto name_of = [&](const std::string& n) {
        std::string p = python_name(n, taken);
        taken.push_back(p);
        return p;
    };
    std::vector<std::string> state;
    for (const auto& s : spec.state_vars) state.push_back(name_of(s));
    std::ostringstream os;
    os << "class TopModule:\n    def __init__(self):\n";
    if (state.empty()) os << "        pass\n";
    std::size_t pad = 0;
    for (const auto& s : state) pad = std::max(pad, s.size());
    for (const auto& s : state) os << "        self." << s << std::string(pad - s.size(), ' ') << " = 0\n";
    os << "\n    def eval(self, inputs: dict) -> dict:\n";
    for (const auto& p : spec.ports) {
        if (p.direction != sim::Direction::input) continue;
        if (std::find(spec.clocks.begin(), spec.clocks.end(), p.name) != spec.clocks.end()) continue;
        os << "        " << name_of(p.name) << " = inputs.get(\"" << p.name << "\", 0) & " << hex(width_mask(p.width)) << "\n";
    }
    os << "        # TODO: implement " << (spec.sequential ? "sequential" : "combinational") << " logic\n";
    os << "        return {";
    bool first = true;
    for (const auto& p : spec.ports) {
        if (p.direction != sim::Direction::output) continue;
        os << (first ? "" : ", ") << "\"" << p.name << "\": ...";
        first = false;
    }
    os << "}\n";
    return os.str();
}

}  // namespace rtlxv::pyref

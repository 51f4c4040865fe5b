#include "rtlxv/sim/interpreter.hpp"

#include <bit>

namespace rtlxv::sim {

namespace {

using ir::Expr;
using ir::Op;
using ir::width_mask;

std::int64_t to_signed(std::uint64_t v, int width) {
    if (width >= 64) return static_cast<std::int64_t>(v);
    if ((v >> (width - 1)) & 1) return static_cast<std::int64_t>(v | ~width_mask(width));
    return static_cast<std::int64_t>(v);
}

std::uint64_t sign_extend(std::uint64_t v, int from, int to) {
    return static_cast<std::uint64_t>(to_signed(v, from)) & width_mask(to);
}

// Bits [pos, pos+w) of a `total`-bit value; positions outside the value read 0.
std::uint64_t extract(std::uint64_t v, int total, std::int64_t pos, int w) {
    if (pos >= total || pos + w <= 0) return 0;
    v &= width_mask(total);
    std::uint64_t r = pos >= 0 ? (pos >= 64 ? 0 : v >> pos) : (-pos >= 64 ? 0 : v << -pos);
    return r & width_mask(w);
}

// Writes `val` into bits [pos, pos+w) of `old`, dropping bits outside [0, total).
std::uint64_t store(std::uint64_t old, int total, std::int64_t pos, int w, std::uint64_t val) {
    if (pos >= total || pos + w <= 0) return old;
    std::uint64_t field = width_mask(w);
    std::uint64_t m;
    std::uint64_t shifted;
    if (pos >= 0) {
        m = field << pos;
        shifted = (val & field) << pos;
    } else {
        m = field >> -pos;
        shifted = (val & field) >> -pos;
    }
    m &= width_mask(total);
    return ((old & ~m) | (shifted & m)) & width_mask(total);
}

// Position of declared index `idx` within a net, clamped so huge indices stay out of range.
std::int64_t select_position(std::uint64_t idx, int sel_lsb, bool descending) {
    std::int64_t i = idx > (std::uint64_t{1} << 40) ? (std::int64_t{1} << 40) : static_cast<std::int64_t>(idx);
    return descending ? i - sel_lsb : sel_lsb - i;
}

class Machine {
public:
    Machine(const ir::Design& d, std::vector<SimWarning>* warnings, std::uint64_t cycle)
        : d_(d), vals_(d.nets.size(), 0), warnings_(warnings), cycle_(cycle) {}

    std::vector<std::uint64_t>& values() { return vals_; }

    void set_cycle(std::uint64_t c) { cycle_ = c; }

    bool reset_asserted() const {
        for (const auto& r : d_.resets) {
            bool high = vals_[static_cast<std::size_t>(r.net)] & 1;
            if (high == r.active_high) return true;
        }
        return false;
    }

    void settle() {
        for (std::size_t i = 0; i < d_.nets.size(); ++i) {
            auto k = d_.nets[i].driver;
            if (k == ir::DriverKind::continuous || k == ir::DriverKind::combinational) vals_[i] = 0;
        }
        for (const auto& ref : d_.comb_order) {
            if (ref.kind == ir::DriverRef::Kind::assign) {
                exec_assign(d_.assigns[static_cast<std::size_t>(ref.index)].assign, vals_);
            } else {
                exec(d_.comb_procs[static_cast<std::size_t>(ref.index)].body, vals_);
            }
        }
    }

    void clock_edge() {
        std::vector<std::uint64_t> next = vals_;
        for (const auto& p : d_.seq_procs) exec(p.body, next);
        for (std::size_t i = 0; i < d_.nets.size(); ++i) {
            if (d_.nets[i].driver == ir::DriverKind::sequential) vals_[i] = next[i];
        }
    }

    void zero_state() {
        for (std::size_t i = 0; i < d_.nets.size(); ++i) {
            if (d_.nets[i].dir != ir::PortDir::input) vals_[i] = 0;
        }
    }

    std::uint64_t eval(const Expr& e) const {
        const std::uint64_t m = width_mask(e.width);
        switch (e.op) {
            case Op::constant:
                return e.value;
            case Op::net:
                return vals_[static_cast<std::size_t>(e.net)] & m;
            case Op::zext:
            case Op::as_signed:
            case Op::as_unsigned:
                return eval(e.args[0]) & m;
            case Op::sext:
                return sign_extend(eval(e.args[0]), e.args[0].width, e.width);
            case Op::slice:
                return extract(eval(e.args[0]), e.args[0].width, e.lo, e.width);
            case Op::dyn_bit:
            case Op::dyn_slice: {
                std::int64_t pos = select_position(eval(e.args[1]), e.sel_lsb, e.sel_descending);
                if (e.op == Op::dyn_slice && e.down) pos -= e.width - 1;
                return extract(eval(e.args[0]), e.args[0].width, pos, e.width);
            }
            case Op::bit_not:
                return ~eval(e.args[0]) & m;
            case Op::neg:
                return (~eval(e.args[0]) + 1) & m;
            case Op::add:
                return (eval(e.args[0]) + eval(e.args[1])) & m;
            case Op::sub:
                return (eval(e.args[0]) - eval(e.args[1])) & m;
            case Op::mul:
                return (eval(e.args[0]) * eval(e.args[1])) & m;
            case Op::div:
            case Op::mod:
                return divide(e, eval(e.args[0]), eval(e.args[1]));
            case Op::bit_and:
                return eval(e.args[0]) & eval(e.args[1]);
            case Op::bit_or:
                return eval(e.args[0]) | eval(e.args[1]);
            case Op::bit_xor:
                return eval(e.args[0]) ^ eval(e.args[1]);
            case Op::bit_xnor:
                return ~(eval(e.args[0]) ^ eval(e.args[1])) & m;
            case Op::shl: {
                std::uint64_t a = eval(e.args[0]);
                std::uint64_t b = eval(e.args[1]);
                return b >= static_cast<std::uint64_t>(e.width) ? 0 : (a << b) & m;
            }
            case Op::shr: {
                std::uint64_t a = eval(e.args[0]);
                std::uint64_t b = eval(e.args[1]);
                return b >= static_cast<std::uint64_t>(e.width) ? 0 : a >> b;
            }
            case Op::ashr: {
                std::int64_t a = to_signed(eval(e.args[0]), e.width);
                std::uint64_t b = eval(e.args[1]);
                if (b >= static_cast<std::uint64_t>(e.width)) return a < 0 ? m : 0;
                return static_cast<std::uint64_t>(a >> b) & m;
            }
            case Op::eq:
                return eval(e.args[0]) == eval(e.args[1]) ? 1 : 0;
            case Op::ne:
                return eval(e.args[0]) != eval(e.args[1]) ? 1 : 0;
            case Op::lt:
            case Op::le:
            case Op::gt:
            case Op::ge:
                return compare(e) ? 1 : 0;
            case Op::log_and:
                return (eval(e.args[0]) != 0 && eval(e.args[1]) != 0) ? 1 : 0;
            case Op::log_or:
                return (eval(e.args[0]) != 0 || eval(e.args[1]) != 0) ? 1 : 0;
            case Op::log_not:
                return eval(e.args[0]) == 0 ? 1 : 0;
            case Op::red_and:
                return eval(e.args[0]) == width_mask(e.args[0].width) ? 1 : 0;
            case Op::red_nand:
                return eval(e.args[0]) == width_mask(e.args[0].width) ? 0 : 1;
            case Op::red_or:
                return eval(e.args[0]) != 0 ? 1 : 0;
            case Op::red_nor:
                return eval(e.args[0]) != 0 ? 0 : 1;
            case Op::red_xor:
                return static_cast<std::uint64_t>(std::popcount(eval(e.args[0])) & 1);
            case Op::red_xnor:
                return static_cast<std::uint64_t>((std::popcount(eval(e.args[0])) & 1) ^ 1);
            case Op::mux:
                return eval(e.args[0]) != 0 ? eval(e.args[1]) : eval(e.args[2]);
            case Op::concat: {
                std::uint64_t r = 0;
                for (const auto& a : e.args) r = (a.width >= 64 ? 0 : r << a.width) | eval(a);
                return r & m;
            }
        }
        return 0;
    }

private:
    const ir::Design& d_;
    std::vector<std::uint64_t> vals_;
    std::vector<SimWarning>* warnings_;
    std::uint64_t cycle_;

    std::uint64_t divide(const Expr& e, std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t m = width_mask(e.width);
        if (b == 0) {
            if (warnings_) warn(std::string(e.op == Op::div ? "division" : "modulo") + " by zero yields 0");
            return 0;
        }
        if (!e.signed_operands) return (e.op == Op::div ? a / b : a % b) & m;
        std::int64_t sa = to_signed(a, e.width);
        std::int64_t sb = to_signed(b, e.width);
        if (sb == -1) {
            // Avoids INT64_MIN / -1; the wrapped result is the same as negation.
            return e.op == Op::div ? (~a + 1) & m : 0;
        }
        std::int64_t r = e.op == Op::div ? sa / sb : sa % sb;
        return static_cast<std::uint64_t>(r) & m;
    }

    // Both settles of a cycle evaluate the same expressions; report each message once per cycle.
    void warn(std::string message) const {
        for (auto it = warnings_->rbegin(); it != warnings_->rend() && it->cycle == cycle_; ++it) {
            if (it->message == message) return;
        }
        warnings_->push_back({cycle_, std::move(message)});
    }

    bool compare(const Expr& e) const {
        std::uint64_t a = eval(e.args[0]);
        std::uint64_t b = eval(e.args[1]);
        if (e.signed_operands) {
            std::int64_t sa = to_signed(a, e.args[0].width);
            std::int64_t sb = to_signed(b, e.args[1].width);
            switch (e.op) {
                case Op::lt: return sa < sb;
                case Op::le: return sa <= sb;
                case Op::gt: return sa > sb;
                default: return sa >= sb;
            }
        }
        switch (e.op) {
            case Op::lt: return a < b;
            case Op::le: return a <= b;
            case Op::gt: return a > b;
            default: return a >= b;
        }
    }

    void write(const ir::Target& t, std::uint64_t part, std::vector<std::uint64_t>& dst) {
        const int total = d_.nets[static_cast<std::size_t>(t.net)].width;
        std::uint64_t& slot = dst[static_cast<std::size_t>(t.net)];
        switch (t.kind) {
            case ir::TargetKind::whole:
                slot = part & width_mask(total);
                return;
            case ir::TargetKind::slice:
                slot = store(slot, total, t.lo, t.width, part);
                return;
            case ir::TargetKind::dyn_bit:
            case ir::TargetKind::dyn_slice: {
                std::int64_t pos = select_position(eval(*t.index), t.sel_lsb, t.sel_descending);
                if (t.kind == ir::TargetKind::dyn_slice && t.down) pos -= t.width - 1;
                slot = store(slot, total, pos, t.width, part);
                return;
            }
        }
    }

    void exec_assign(const ir::Assign& a, std::vector<std::uint64_t>& dst) {
        std::uint64_t v = eval(a.value);
        int offset = a.value.width;
        for (const auto& t : a.targets) {
            offset -= t.width;
            write(t, extract(v, a.value.width, offset, t.width), dst);
        }
    }

    void exec(const std::vector<ir::Stmt>& body, std::vector<std::uint64_t>& dst) {
        for (const auto& s : body) {
            switch (s.kind) {
                case ir::StmtKind::assign:
                    exec_assign(s.assign, dst);
                    break;
                case ir::StmtKind::if_else:
                    exec(eval(s.cond) != 0 ? s.then_body : s.else_body, dst);
                    break;
                case ir::StmtKind::case_stmt: {
                    std::uint64_t subject = eval(s.cond);
                    const std::vector<ir::Stmt>* chosen = s.has_default ? &s.default_body : nullptr;
                    for (const auto& arm : s.arms) {
                        bool hit = false;
                        for (const auto& l : arm.labels) hit = hit || ((subject ^ eval(l.value)) & l.care) == 0;
                        if (hit) {
                            chosen = &arm.body;
                            break;
                        }
                    }
                    if (chosen) exec(*chosen, dst);
                    break;
                }
            }
        }
    }
};

void load_inputs(const ir::Design& d, const ValueMap& inputs, std::vector<std::uint64_t>& vals) {
    for (ir::NetId id : d.inputs()) {
        const ir::Net& n = d.nets[static_cast<std::size_t>(id)];
        if (d.is_clock(id)) continue;
        auto it = inputs.find(n.name);
        if (it == inputs.end()) throw SimError("missing value for input '" + n.name + "'");
        vals[static_cast<std::size_t>(id)] = it->second & width_mask(n.width);
    }
}

ValueMap collect_outputs(const ir::Design& d, const std::vector<std::uint64_t>& vals) {
    ValueMap out;
    for (ir::NetId id : d.outputs()) out[d.nets[static_cast<std::size_t>(id)].name] = vals[static_cast<std::size_t>(id)];
    return out;
}

ValueMap record_inputs(const ir::Design& d, const std::vector<std::uint64_t>& vals) {
    ValueMap in;
    for (ir::NetId id : d.inputs()) {
        in[d.nets[static_cast<std::size_t>(id)].name] = d.is_clock(id) ? 1 : vals[static_cast<std::size_t>(id)];
    }
    return in;
}

// One edge on an already-loaded machine; returns the outputs.
ValueMap step(const ir::Design& d, Machine& mc) {
    if (mc.reset_asserted()) {
        mc.zero_state();
        return collect_outputs(d, mc.values());
    }
    mc.settle();
    mc.clock_edge();
    mc.settle();
    return collect_outputs(d, mc.values());
}

}  // namespace

BitVec::BitVec(int w, std::uint64_t v) : width(w), value(v & ir::width_mask(w)) {}

std::vector<PortInfo> trace_ports(const ir::Design& d) {
    std::vector<PortInfo> ports;
    for (const auto& p : d.ports()) {
        ports.push_back({p.name, p.direction == ir::PortDir::input ? Direction::input : Direction::output, p.width});
    }
    return ports;
}

Interpreter::Interpreter(const ir::Design& d) : d_(d) {}

SimState Interpreter::initial_state() const {
    SimState s;
    for (ir::NetId id : d_.state_nets()) {
        const ir::Net& n = d_.nets[static_cast<std::size_t>(id)];
        s.registers[n.name] = BitVec(n.width, 0);
    }
    return s;
}

CycleResult Interpreter::eval_cycle(const SimState& s, const ValueMap& inputs, std::vector<SimWarning>* warnings) const {
    Machine mc(d_, warnings, s.cycle);
    for (ir::NetId id : d_.state_nets()) {
        const ir::Net& n = d_.nets[static_cast<std::size_t>(id)];
        auto it = s.registers.find(n.name);
        if (it != s.registers.end()) mc.values()[static_cast<std::size_t>(id)] = it->second.value & ir::width_mask(n.width);
    }
    load_inputs(d_, inputs, mc.values());
    CycleResult r;
    r.outputs = step(d_, mc);
    r.next.cycle = s.cycle + 1;
    for (ir::NetId id : d_.state_nets()) {
        const ir::Net& n = d_.nets[static_cast<std::size_t>(id)];
        r.next.registers[n.name] = BitVec(n.width, mc.values()[static_cast<std::size_t>(id)]);
    }
    return r;
}

WaveTrace Interpreter::run_trace(const std::vector<ValueMap>& stimuli, std::vector<SimWarning>* warnings) const {
    WaveTrace t;
    t.ports = trace_ports(d_);
    t.cycles.reserve(stimuli.size());
    Machine mc(d_, warnings, 0);
    for (std::size_t i = 0; i < stimuli.size(); ++i) {
        mc.set_cycle(i);
        load_inputs(d_, stimuli[i], mc.values());
        CycleRecord rec;
        rec.inputs = record_inputs(d_, mc.values());
        rec.outputs = step(d_, mc);
        t.cycles.push_back(std::move(rec));
    }
    return t;
}

CycleResult eval_cycle(const ir::Design& d, const SimState& s, const ValueMap& inputs, std::vector<SimWarning>* warnings) {
    return Interpreter(d).eval_cycle(s, inputs, warnings);
}

WaveTrace run_trace(const ir::Design& d, const std::vector<ValueMap>& stimuli, std::vector<SimWarning>* warnings) {
    return Interpreter(d).run_trace(stimuli, warnings);
}

}  // namespace rtlxv::sim

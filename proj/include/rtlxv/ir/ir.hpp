#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rtlxv/diagnostic.hpp"
#include "rtlxv/frontend/ast.hpp"
#include "rtlxv/frontend/parser.hpp"

namespace rtlxv::ir {

using NetId = int;

enum class PortDir { none, input, output };

/// How a net gets its value.
enum class DriverKind { undriven, input, continuous, combinational, sequential };

struct Net {
    std::string name;
    int width = 1;
    bool is_signed = false;
    PortDir dir = PortDir::none;
    bool declared_reg = false;
    int msb = 0;  // declared range, used to map select indices to bit positions
    int lsb = 0;
    DriverKind driver = DriverKind::undriven;

    [[nodiscard]] bool is_port() const { return dir != PortDir::none; }
    [[nodiscard]] bool descending() const { return msb >= lsb; }
    bool operator==(const Net&) const = default;
};

/// IR ports are the first nets of a design, in declaration order.
struct IrPort {
    std::string name;
    PortDir direction = PortDir::input;
    int width = 1;
    bool is_signed = false;
};

enum class Op {
    constant,
    net,
    zext,        // widen, zero fill
    sext,        // widen, sign fill
    slice,       // bits [lo, lo+width) of args[0]; bits outside the operand read 0
    dyn_bit,     // args[0][args[1]] using the net's declared range
    dyn_slice,   // args[0][args[1] +: width] or -: (down)
    as_signed,   // reinterpretation only; same width
    as_unsigned,
    bit_not,
    neg,
    add,
    sub,
    mul,
    div,
    mod,
    bit_and,
    bit_or,
    bit_xor,
    bit_xnor,
    shl,
    shr,
    ashr,
    eq,
    ne,
    lt,
    le,
    gt,
    ge,
    log_and,
    log_or,
    log_not,
    red_and,
    red_or,
    red_xor,
    red_nand,
    red_nor,
    red_xnor,
    mux,         // args: cond, then, else
    concat,      // args MSB first
};

/// Expression node. Every node carries its resolved width; values are kept masked to it.
struct Expr {
    Op op = Op::constant;
    int width = 1;
    bool is_signed = false;
    bool signed_operands = false;  // compare / div / mod / ashr interpret operands as two's complement
    std::uint64_t value = 0;       // constant
    NetId net = -1;                // net reference
    int lo = 0;                    // slice offset
    int sel_lsb = 0;               // dyn_bit / dyn_slice: declared range of the selected net
    bool sel_descending = true;
    bool down = false;             // dyn_slice: -:
    std::vector<Expr> args;

    bool operator==(const Expr&) const = default;
};

enum class TargetKind { whole, slice, dyn_bit, dyn_slice };

/// One assignable piece of a (possibly concatenated) left-hand side.
struct Target {
    NetId net = -1;
    TargetKind kind = TargetKind::whole;
    int lo = 0;      // slice
    int width = 1;   // bits written
    std::optional<Expr> index;  // dyn_bit / dyn_slice
    int sel_lsb = 0;
    bool sel_descending = true;
    bool down = false;

    bool operator==(const Target&) const = default;
};

struct Assign {
    std::vector<Target> targets;  // MSB first; value width equals the sum of target widths
    Expr value;
    SourceLoc loc;
    bool operator==(const Assign&) const = default;
};

struct CaseLabel {
    Expr value;
    std::uint64_t care = ~std::uint64_t{0};  // casez wildcard bits cleared
    bool operator==(const CaseLabel&) const = default;
};

struct Stmt;

struct CaseArm {
    std::vector<CaseLabel> labels;
    std::vector<Stmt> body;
    bool operator==(const CaseArm&) const = default;
};

enum class StmtKind { assign, if_else, case_stmt };

struct Stmt {
    StmtKind kind = StmtKind::assign;
    Assign assign;
    Expr cond;                       // if condition / case subject (already at compare width)
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
    std::vector<CaseArm> arms;
    bool has_default = false;
    std::vector<Stmt> default_body;
    bool operator==(const Stmt&) const = default;
};

struct ContAssign {
    Assign assign;
    int source_order = 0;
    bool operator==(const ContAssign&) const = default;
};

struct CombProc {
    std::vector<Stmt> body;
    std::vector<NetId> targets;  // nets written, in first-write order
    int source_order = 0;
    bool operator==(const CombProc&) const = default;
};

struct SeqProc {
    NetId clock = -1;
    std::optional<NetId> reset;
    bool reset_active_high = true;
    std::vector<Stmt> body;
    std::vector<NetId> targets;
    int source_order = 0;
    bool operator==(const SeqProc&) const = default;
};

struct ResetInput {
    NetId net = -1;
    bool active_high = true;
    bool operator==(const ResetInput&) const = default;
};

/// A combinational driver: either a continuous assign or a combinational process.
struct DriverRef {
    enum class Kind { assign, proc } kind = Kind::assign;
    int index = 0;
    bool operator==(const DriverRef&) const = default;
};

struct Design {
    std::string name;
    std::vector<Net> nets;  // ports first, in port order
    int num_ports = 0;
    std::vector<ContAssign> assigns;
    std::vector<CombProc> comb_procs;
    std::vector<SeqProc> seq_procs;
    std::vector<NetId> clocks;
    std::vector<ResetInput> resets;
    std::vector<DriverRef> comb_order;  // filled by lower_to_ir via order_combinational

    [[nodiscard]] std::vector<IrPort> ports() const;
    [[nodiscard]] std::vector<NetId> inputs() const;
    [[nodiscard]] std::vector<NetId> outputs() const;
    [[nodiscard]] std::vector<NetId> state_nets() const;  // sequential targets, in net order
    [[nodiscard]] bool is_clock(NetId id) const;
    [[nodiscard]] const ResetInput* reset_for(NetId id) const;
    [[nodiscard]] std::optional<NetId> find_net(const std::string& name) const;

    bool operator==(const Design&) const = default;
};

struct LowerResult {
    std::optional<Design> design;
    std::vector<Diagnostic> diagnostics;
    [[nodiscard]] bool ok() const { return design.has_value(); }
};

/// Lowers a validated module, elaborating parameters at their defaults unless overridden.
[[nodiscard]] LowerResult lower_to_ir(const ast::Module& m, const frontend::ParamValues& overrides = {});

struct CombLoopError {
    std::vector<std::string> nets;  // nets on the cycle, in declaration order
};

struct OrderResult {
    std::vector<DriverRef> order;
    std::optional<CombLoopError> loop;
    [[nodiscard]] bool ok() const { return !loop.has_value(); }
};

/// Topologically orders continuous assigns and combinational processes; ties keep source order.
[[nodiscard]] OrderResult order_combinational(const Design& d);

/// Human-readable dump. Canonical mode renames nets by first use and drops the module name.
[[nodiscard]] std::string print_design(const Design& d, bool canonical = false);

/// Reset naming convention: rst, reset, areset (active high); rst_n, resetn, reset_n (active low).
[[nodiscard]] std::optional<bool> reset_name_polarity(const std::string& name);

[[nodiscard]] std::uint64_t width_mask(int width);

/// Every net read by `e`, appended in first-read order (duplicates skipped).
void collect_reads(const Expr& e, std::vector<NetId>& out);

}  // namespace rtlxv::ir

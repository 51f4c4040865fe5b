#include "test_util.hpp"

namespace rtlxv {
namespace {

using test::lower_errors;
using test::lower_ok;

bool mentions(const std::vector<Diagnostic>& diags, const std::string& needle) {
    for (const auto& d : diags) {
        if (d.severity == Severity::error && d.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::vector<std::string> order_names(const ir::Design& d) {
    std::vector<std::string> names;
    for (const auto& ref : d.comb_order) {
        if (ref.kind == ir::DriverRef::Kind::assign) {
            names.push_back(d.nets[static_cast<std::size_t>(d.assigns[static_cast<std::size_t>(ref.index)].assign.targets[0].net)].name);
        } else {
            names.push_back(d.nets[static_cast<std::size_t>(d.comb_procs[static_cast<std::size_t>(ref.index)].targets[0])].name);
        }
    }
    return names;
}

TEST(Lower, Popcount) {
    ir::Design d = lower_ok(
        "module top_module(input [2:0] in, output [1:0] out); assign out = in[0]+in[1]+in[2]; endmodule");
    EXPECT_EQ(d.assigns.size(), 1u);
    EXPECT_EQ(d.seq_procs.size(), 0u);
    auto out = d.find_net("out");
    ASSERT_TRUE(out);
    EXPECT_EQ(d.nets[static_cast<std::size_t>(*out)].width, 2);
    // Assignment context widens the 1-bit selects to 2 bits before adding.
    EXPECT_EQ(d.assigns[0].assign.value.width, 2);
    EXPECT_EQ(d.assigns[0].assign.value.op, ir::Op::add);
}

TEST(Lower, DffHasOneSequentialProcess) {
    ir::Design d = lower_ok("module dff(input clk, input d, output reg q); always @(posedge clk) q <= d; endmodule");
    ASSERT_EQ(d.seq_procs.size(), 1u);
    EXPECT_EQ(d.nets[static_cast<std::size_t>(d.seq_procs[0].clock)].name, "clk");
    EXPECT_EQ(d.state_nets().size(), 1u);
    EXPECT_TRUE(d.is_clock(d.seq_procs[0].clock));
}

TEST(Lower, AluStateNets) {
    ir::Design d = lower_ok(test::read_file(test::test_path("corpus/alu_pipeline.v")));
    std::vector<std::string> names;
    for (ir::NetId id : d.state_nets()) names.push_back(d.nets[static_cast<std::size_t>(id)].name);
    EXPECT_EQ(names, (std::vector<std::string>{"stage1_d", "stage1_diff", "stage1_sum", "stage2_sum", "stage3_product"}));
    EXPECT_EQ(d.seq_procs.size(), 3u);
    EXPECT_EQ(d.clocks.size(), 2u);
    EXPECT_TRUE(d.resets.empty());
}

TEST(Lower, ProcessClassificationFollowsSensitivity) {
    ir::Design d = lower_ok(
        "module m(input clk, input a, output reg y, output reg z);\n"
        "always @(*) y = a;\nalways @(posedge clk) z <= a;\nendmodule\n");
    EXPECT_EQ(d.comb_procs.size(), 1u);
    EXPECT_EQ(d.seq_procs.size(), 1u);
    EXPECT_EQ(d.nets[static_cast<std::size_t>(*d.find_net("y"))].driver, ir::DriverKind::combinational);
    EXPECT_EQ(d.nets[static_cast<std::size_t>(*d.find_net("z"))].driver, ir::DriverKind::sequential);
}

TEST(Lower, UndeclaredIdentifier) {
    EXPECT_TRUE(mentions(lower_errors("module m(input a, output y); assign y = a & b; endmodule"), "undeclared"));
}

TEST(Lower, NonblockingInCombinationalIsError) {
    EXPECT_TRUE(mentions(lower_errors("module m(input a, output reg y); always @(*) y <= a; endmodule"),
                         "non-blocking"));
}

TEST(Lower, BlockingInSequentialWarns) {
    auto p = frontend::parse_module({"module m(input clk, a, output reg y); always @(posedge clk) y = a; endmodule"});
    ASSERT_TRUE(p.ok());
    auto r = ir::lower_to_ir(*p.module);
    ASSERT_TRUE(r.ok());
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].severity, Severity::warning);
}

TEST(Lower, CaseWithoutDefaultInCombinationalIsError) {
    EXPECT_TRUE(mentions(lower_errors("module m(input [1:0] s, output reg y);\n"
                                      "always @(*) case (s) 2'd0: y = 1; 2'd1: y = 0; endcase\nendmodule\n"),
                         "default"));
}

TEST(Lower, LatchInferenceIsError) {
    EXPECT_TRUE(mentions(lower_errors("module m(input a, b, output reg y); always @(*) if (a) y = b; endmodule"),
                         "latch"));
}

TEST(Lower, MultipleDriversRejected) {
    EXPECT_TRUE(mentions(lower_errors("module m(input a, b, output y); assign y = a; assign y = b; endmodule"),
                         "multiple"));
    EXPECT_TRUE(lower_errors("module m(input a, b, output [1:0] y); assign y[0] = a; assign y[1] = b; endmodule")
                    .empty());
}

TEST(Lower, SequentialTargetMustBeReg) {
    EXPECT_TRUE(mentions(lower_errors("module m(input clk, a, output y); always @(posedge clk) y <= a; endmodule"),
                         "not a reg"));
}

TEST(Lower, ClockUsedAsDataRejected) {
    EXPECT_TRUE(mentions(
        lower_errors("module m(input clk, a, output reg y); always @(posedge clk) y <= a ^ clk; endmodule"), "clock"));
}

TEST(Lower, WidthAboveSixtyFourRejected) {
    EXPECT_TRUE(mentions(lower_errors("module m(input [64:0] a, output y); assign y = a[0]; endmodule"), "64"));
}

TEST(Lower, ConstantSelectOutOfRangeRejected) {
    EXPECT_TRUE(mentions(lower_errors("module m(input [3:0] a, output y); assign y = a[4]; endmodule"), "out of range"));
}

TEST(Lower, ResetsByNameAndEdge) {
    ir::Design d = lower_ok(
        "module m(input clk, input rst_n, input [1:0] a, output reg [1:0] q);\n"
        "always @(posedge clk) if (!rst_n) q <= 0; else q <= a;\nendmodule\n");
    ASSERT_EQ(d.resets.size(), 1u);
    EXPECT_FALSE(d.resets[0].active_high);
    ir::Design e = lower_ok(
        "module m(input clk, input clear, input [1:0] a, output reg [1:0] q);\n"
        "always @(posedge clk or posedge clear) if (clear) q <= 0; else q <= a;\nendmodule\n");
    ASSERT_EQ(e.resets.size(), 1u);
    EXPECT_EQ(e.nets[static_cast<std::size_t>(e.resets[0].net)].name, "clear");
    EXPECT_TRUE(e.resets[0].active_high);
}

TEST(Lower, ContextWidthAndSignExtension) {
    ir::Design d = lower_ok(
        "module m(input signed [3:0] a, input signed [3:0] b, output signed [7:0] y, output [7:0] z);\n"
        "assign y = a + b;\nassign z = a + 4'd1;\nendmodule\n");
    const auto& y = d.assigns[0].assign.value;
    EXPECT_EQ(y.width, 8);
    ASSERT_EQ(y.args.size(), 2u);
    EXPECT_EQ(y.args[0].op, ir::Op::sext);
    const auto& z = d.assigns[1].assign.value;
    EXPECT_EQ(z.args[0].op, ir::Op::zext);
}

TEST(Lower, ComparisonIsOneBit) {
    ir::Design d = lower_ok("module m(input [7:0] a, b, output [3:0] y); assign y = a < b; endmodule");
    const auto& v = d.assigns[0].assign.value;
    EXPECT_EQ(v.width, 4);
    EXPECT_EQ(v.op, ir::Op::zext);
    EXPECT_EQ(v.args[0].op, ir::Op::lt);
    EXPECT_EQ(v.args[0].width, 1);
}

TEST(Lower, ParameterOverride) {
    auto p = frontend::parse_module({"module m #(parameter W = 4) (input [W-1:0] a, output [W-1:0] y); assign y = a; endmodule"});
    ASSERT_TRUE(p.ok());
    auto r = ir::lower_to_ir(*p.module, {{"W", 12}});
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.design->nets[0].width, 12);
}

TEST(Lower, IdempotentThroughPrinting) {
    const std::string src = test::read_file(test::test_path("corpus/alu_pipeline.v"));
    ir::Design first = lower_ok(src);
    ir::Design second = lower_ok(frontend::print_module(test::parse_ok(src)));
    EXPECT_EQ(first, second);
    EXPECT_EQ(ir::print_design(first), ir::print_design(second));
}

TEST(Lower, ClosureZeroLeavesFitWidth) {
    ir::Design d = lower_ok(test::read_file(test::test_path("corpus/alu_pipeline.v")));
    for (const auto& a : d.assigns) EXPECT_LE(a.assign.value.width, 64);
}

TEST(Order, Chain) {
    ir::Design d = lower_ok("module m(input a, output c); wire b; assign c = b; assign b = a; endmodule");
    EXPECT_EQ(order_names(d), (std::vector<std::string>{"b", "c"}));
}

TEST(Order, ChainInSourceOrder) {
    ir::Design d = lower_ok("module m(input a, output c); wire b; assign b = a; assign c = b; endmodule");
    EXPECT_EQ(order_names(d), (std::vector<std::string>{"b", "c"}));
}

TEST(Order, LoopNamesNets) {
    auto p = frontend::parse_module({"module m(output y); wire a, b; assign a = b; assign b = a; assign y = a; endmodule"});
    ASSERT_TRUE(p.ok());
    // Build the design without ordering to inspect the raw loop report.
    auto r = ir::lower_to_ir(*p.module);
    ASSERT_FALSE(r.ok());
    EXPECT_TRUE(mentions(r.diagnostics, "a, b"));
}

TEST(Order, LoopErrorValue) {
    ir::Design d = lower_ok("module m(input x, output y); wire a, b; assign a = x; assign b = a; assign y = b; endmodule");
    // Rewire b to feed a, forming a two-net cycle.
    auto b = *d.find_net("b");
    d.assigns[0].assign.value.op = ir::Op::net;
    d.assigns[0].assign.value.net = b;
    d.assigns[0].assign.value.args.clear();
    auto result = ir::order_combinational(d);
    ASSERT_FALSE(result.ok());
    EXPECT_EQ(result.loop->nets, (std::vector<std::string>{"a", "b"}));
}

TEST(Order, IndependentKeepSourceOrder) {
    ir::Design d = lower_ok("module m(input a, b, output x, y); assign y = b; assign x = a; endmodule");
    EXPECT_EQ(order_names(d), (std::vector<std::string>{"y", "x"}));
}

TEST(Order, ProcessAfterItsInputs) {
    ir::Design d = lower_ok(
        "module m(input [1:0] a, output reg [1:0] y, output [1:0] z);\n"
        "wire [1:0] t;\nalways @(*) begin y = t; end\nassign z = y;\nassign t = ~a;\nendmodule\n");
    EXPECT_EQ(order_names(d), (std::vector<std::string>{"t", "y", "z"}));
}

TEST(Print, CanonicalIsRenameInvariant) {
    ir::Design a = lower_ok("module m(input [3:0] p, q, output [3:0] r); wire [3:0] t; assign t = p & q; assign r = t + 4'd3; endmodule");
    ir::Design b = lower_ok("module other(input [3:0] x1, x2, output [3:0] o); wire [3:0] w; assign w = x1 & x2; assign o = w + 4'd3; endmodule");
    EXPECT_EQ(ir::print_design(a, true), ir::print_design(b, true));
    EXPECT_NE(ir::print_design(a), ir::print_design(b));
    ir::Design c = lower_ok("module m(input [3:0] p, q, output [3:0] r); wire [3:0] t; assign t = p | q; assign r = t + 4'd3; endmodule");
    EXPECT_NE(ir::print_design(a, true), ir::print_design(c, true));
}

}  // namespace
}  // namespace rtlxv

#include <gtest/gtest.h>

#include "rtlxv/pyref/emitter.hpp"
#include "test_util.hpp"

using namespace rtlxv;

namespace {

const char* kDff = "module dff(input clk, input d, output reg q);\n  always @(posedge clk) q <= d;\nendmodule\n";
const char* kPopcount =
    "module pc(input [2:0] in, output [1:0] out);\n  assign out = in[0] + in[1] + in[2];\nendmodule\n";
const char* kAdder =
    "module add(input [9:0] a, input [9:0] b, output [9:0] s);\n  assign s = a + b;\nendmodule\n";

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Emitter, DffInitializesStateAndMasks) {
    auto src = pyref::emit_reference(test::lower_ok(kDff));
    EXPECT_EQ(src.class_name, "TopModule");
    EXPECT_TRUE(contains(src.text, "class TopModule:\n    def __init__(self):\n        self.q = 0\n")) << src.text;
    EXPECT_TRUE(contains(src.text, "& 0x1")) << src.text;
    EXPECT_TRUE(contains(src.text, "return {\"q\": self.q & 0x1}")) << src.text;
    EXPECT_FALSE(contains(src.text, "import"));
}

TEST(Emitter, PopcountIsStateless) {
    auto src = pyref::emit_reference(test::lower_ok(kPopcount));
    EXPECT_TRUE(contains(src.text, "def __init__(self):\n        pass\n")) << src.text;
    EXPECT_FALSE(contains(src.text, "self.out"));
    EXPECT_TRUE(contains(src.text, "return {\"out\": out & 0x3}")) << src.text;
}

TEST(Emitter, InputReadsMasked) {
    auto src = pyref::emit_reference(test::lower_ok(kAdder));
    EXPECT_TRUE(contains(src.text, "a = inputs.get(\"a\", 0) & 0x3FF\n")) << src.text;
    EXPECT_TRUE(contains(src.text, "b = inputs.get(\"b\", 0) & 0x3FF\n")) << src.text;
}

TEST(Emitter, ManifestKeepsOriginalNames) {
    auto d = test::lower_ok(
        "module m(input [3:0] lambda, input clk, output reg [3:0] eval);\n"
        "  always @(posedge clk) eval <= lambda;\nendmodule\n");
    auto src = pyref::emit_reference(d);
    ASSERT_EQ(src.port_manifest.size(), 3u);
    EXPECT_EQ(src.port_manifest[0].name, "lambda");
    EXPECT_EQ(src.port_manifest[2].name, "eval");
    EXPECT_EQ(src.port_manifest[2].direction, sim::Direction::output);
    EXPECT_EQ(src.port_manifest[2].width, 4);
    EXPECT_TRUE(contains(src.text, "lambda_v = inputs.get(\"lambda\", 0) & 0xF")) << src.text;
    EXPECT_TRUE(contains(src.text, "self.eval_v = 0")) << src.text;
    EXPECT_TRUE(contains(src.text, "\"eval\": ")) << src.text;
}

TEST(Emitter, Deterministic) {
    auto text = test::read_file(test::test_path("corpus/fifo4x8.v"));
    auto a = pyref::emit_reference(test::lower_ok(text)).text;
    auto b = pyref::emit_reference(test::lower_ok(text)).text;
    EXPECT_EQ(a, b);
    EXPECT_EQ(pyref::emit_skeleton(test::lower_ok(text)), pyref::emit_skeleton(test::lower_ok(text)));
}

TEST(Skeleton, AluPipelineExact) {
    auto d = test::lower_ok(test::read_file(test::test_path("corpus/alu_pipeline.v")));
    const std::string expected =
        "class TopModule:\n"
        "    def __init__(self):\n"
        "        self.stage1_d       = 0\n"
        "        self.stage1_diff    = 0\n"
        "        self.stage1_sum     = 0\n"
        "        self.stage2_sum     = 0\n"
        "        self.stage3_product = 0\n"
        "\n"
        "    def eval(self, inputs: dict) -> dict:\n"
        "        a = inputs.get(\"a\", 0) & 0x3FF\n"
        "        b = inputs.get(\"b\", 0) & 0x3FF\n"
        "        c = inputs.get(\"c\", 0) & 0x3FF\n"
        "        d = inputs.get(\"d\", 0) & 0x3FF\n"
        "        # TODO: implement sequential logic\n"
        "        return {\"F\": ...}\n";
    EXPECT_EQ(pyref::emit_skeleton(d), expected);
}

TEST(Skeleton, CombinationalHasEmptyConstructor) {
    auto s = pyref::emit_skeleton(test::lower_ok(kAdder));
    EXPECT_TRUE(contains(s, "    def __init__(self):\n        pass\n")) << s;
    EXPECT_TRUE(contains(s, "# TODO: implement combinational logic")) << s;
    EXPECT_TRUE(contains(s, "return {\"s\": ...}")) << s;
    EXPECT_FALSE(contains(s, "self.s"));
}

TEST(Skeleton, FromPortTable) {
    pyref::SkeletonSpec spec;
    spec.ports = {{"clk", sim::Direction::input, 1}, {"x", sim::Direction::input, 3},
                  {"y", sim::Direction::output, 3}, {"z", sim::Direction::output, 1}};
    spec.clocks = {"clk"};
    spec.state_vars = {"acc"};
    spec.sequential = true;
    auto s = pyref::emit_skeleton(spec);
    EXPECT_TRUE(contains(s, "self.acc = 0\n")) << s;
    EXPECT_TRUE(contains(s, "x = inputs.get(\"x\", 0) & 0x7\n")) << s;
    EXPECT_FALSE(contains(s, "inputs.get(\"clk\""));
    EXPECT_TRUE(contains(s, "return {\"y\": ..., \"z\": ...}")) << s;
}

TEST(PythonName, Legalization) {
    EXPECT_EQ(pyref::python_name("data_in"), "data_in");
    EXPECT_EQ(pyref::python_name("pass"), "pass_v");
    EXPECT_EQ(pyref::python_name("self"), "self_v");
    EXPECT_EQ(pyref::python_name("inputs"), "inputs_v");
    EXPECT_EQ(pyref::python_name("_x"), "v_x");
    EXPECT_EQ(pyref::python_name("a$b"), "a_b");
    EXPECT_EQ(pyref::python_name("pass", {"pass_v"}), "pass_v_v");
}

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "rtlxv/pyref/emitter.hpp"
#include "rtlxv/sim/interpreter.hpp"
#include "rtlxv/xverify/xverify.hpp"
#include "test_util.hpp"

using namespace rtlxv;
using namespace rtlxv::xverify;

namespace {

sim::WaveTrace make_trace(const std::vector<std::pair<sim::ValueMap, std::uint64_t>>& rows) {
    sim::WaveTrace t;
    t.ports = {{"a", sim::Direction::input, 4},
               {"b", sim::Direction::input, 4},
               {"clk", sim::Direction::input, 1},
               {"out", sim::Direction::output, 8}};
    for (const auto& [in, out] : rows) t.cycles.push_back({in, {{"out", out}}});
    return t;
}

MismatchReport paper_like_report() {
    MismatchReport r;
    r.total_compared = 20;
    r.num_vectors = 10;
    r.input_order = {"a", "b", "clk"};
    r.items.push_back({0, "out", {8, 42}, {8, 37}, {{"a", 5}, {"b", 3}, {"clk", 1}}});
    r.items.push_back({4, "out", {8, 12}, {8, 8}, {{"a", 2}, {"b", 6}, {"clk", 1}}});
    return r;
}

const char* kDff = "module dff(input clk, input d, output reg q);\n  always @(posedge clk) q <= d;\nendmodule\n";

ShimConfig shim() { return ShimConfig::from_environment(); }

}  // namespace

TEST(Prng, XoshiroReferenceOutputs) {
    Xoshiro256 g(1, 2, 3, 4);
    EXPECT_EQ(g.next(), 11520u);
    EXPECT_EQ(g.next(), 0u);
    EXPECT_EQ(g.next(), 1509978240u);
    EXPECT_EQ(g.next(), 1215971899390074240u);
}

TEST(Prng, SplitmixReferenceOutput) {
    std::uint64_t s = 0;
    EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafull);
}

TEST(Prng, DrawUsesHighBits) {
    Xoshiro256 a(7), b(7);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.draw(5), b.next() >> 59);
}

TEST(Stimuli, RangeAndCount) {
    std::vector<StimulusPort> ports = {{"x", 3, InputRole::data}};
    auto v = gen_stimuli(ports, StimulusPlan{});
    ASSERT_EQ(v.size(), 1000u);
    for (const auto& m : v) EXPECT_LT(m.at("x"), 8u);
    std::vector<bool> seen(8);
    for (const auto& m : v) seen[m.at("x")] = true;
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST(Stimuli, Deterministic) {
    std::vector<StimulusPort> ports = {{"x", 13, InputRole::data}, {"y", 64, InputRole::data}};
    EXPECT_EQ(gen_stimuli(ports, {}), gen_stimuli(ports, {}));
    EXPECT_NE(gen_stimuli(ports, {}), gen_stimuli(ports, {1000, 43, 2}));
}

TEST(Stimuli, ActiveLowResetAndClockOmitted) {
    auto d = test::lower_ok(test::read_file(test::test_path("corpus/async_counter.v")));
    auto v = gen_stimuli(d, {});
    ASSERT_EQ(v.size(), 1000u);
    EXPECT_EQ(v[0].at("rst_n"), 0u);
    EXPECT_EQ(v[1].at("rst_n"), 0u);
    for (std::size_t i = 2; i < v.size(); ++i) EXPECT_EQ(v[i].at("rst_n"), 1u);
    for (const auto& m : v) EXPECT_EQ(m.count("clk"), 0u);
}

TEST(Stimuli, ActiveHighReset) {
    auto d = test::lower_ok(test::read_file(test::test_path("corpus/counter8.v")));
    auto v = gen_stimuli(d, {10, 1, 3});
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v[i].at("rst"), i < 3 ? 1u : 0u);
}

TEST(Stimuli, DrawsInPortOrder) {
    std::vector<StimulusPort> ports = {{"p", 8, InputRole::data}, {"clk", 1, InputRole::clock},
                                       {"q", 4, InputRole::data}};
    auto v = gen_stimuli(ports, {3, 42, 0});
    Xoshiro256 g(42);
    for (const auto& m : v) {
        EXPECT_EQ(m.at("p"), g.next() >> 56);
        EXPECT_EQ(m.at("q"), g.next() >> 60);
    }
}

TEST(Stimuli, PlanValidation) {
    std::vector<StimulusPort> ports = {{"x", 1, InputRole::data}};
    EXPECT_THROW((void)gen_stimuli(ports, {0, 42, 0}), std::invalid_argument);
    EXPECT_THROW((void)gen_stimuli(ports, {2, 42, 2}), std::invalid_argument);
    EXPECT_NO_THROW((void)gen_stimuli(ports, {1, 42, 0}));
}

TEST(Compare, IdenticalTraces) {
    auto t = make_trace({{{{"a", 1}, {"b", 2}, {"clk", 1}}, 3}, {{{"a", 4}, {"b", 4}, {"clk", 1}}, 8}});
    auto r = std::get<MismatchReport>(compare_traces(t, t));
    EXPECT_TRUE(r.items.empty());
    EXPECT_DOUBLE_EQ(r.match_ratio(), 1.0);
    EXPECT_EQ(r.total_compared, 2u);
}

TEST(Compare, SingleMismatchCarriesInputs) {
    auto dut = make_trace({{{{"a", 5}, {"b", 3}, {"clk", 1}}, 42}});
    auto ref = make_trace({{{{"a", 5}, {"b", 3}, {"clk", 1}}, 37}});
    auto r = std::get<MismatchReport>(compare_traces(dut, ref));
    ASSERT_EQ(r.items.size(), 1u);
    EXPECT_EQ(r.items[0].test_index, 0u);
    EXPECT_EQ(r.items[0].signal, "out");
    EXPECT_EQ(r.items[0].got.value, 42u);
    EXPECT_EQ(r.items[0].exp.value, 37u);
    EXPECT_EQ(r.items[0].inputs, (sim::ValueMap{{"a", 5}, {"b", 3}, {"clk", 1}}));
    EXPECT_DOUBLE_EQ(r.match_ratio(), 0.0);
}

TEST(Compare, MissingSignalIsPortMismatch) {
    auto dut = make_trace({{{{"a", 5}, {"b", 3}, {"clk", 1}}, 42}});
    auto ref = dut;
    ref.ports.back().name = "G";
    ref.cycles[0].outputs = {{"G", 42}};
    EXPECT_TRUE(std::holds_alternative<PortMismatch>(compare_traces(dut, ref)));
    auto shorter = dut;
    shorter.cycles.clear();
    EXPECT_TRUE(std::holds_alternative<PortMismatch>(compare_traces(dut, shorter)));
}

TEST(Compare, SymmetricCounting) {
    sim::WaveTrace a, b;
    a.ports = b.ports = {{"x", sim::Direction::input, 4}, {"p", sim::Direction::output, 4}, {"q", sim::Direction::output, 4}};
    Xoshiro256 g(9);
    for (int i = 0; i < 200; ++i) {
        sim::ValueMap in{{"x", g.draw(4)}};
        a.cycles.push_back({in, {{"p", g.draw(2)}, {"q", g.draw(2)}}});
        b.cycles.push_back({in, {{"p", g.draw(2)}, {"q", g.draw(2)}}});
    }
    auto ab = std::get<MismatchReport>(compare_traces(a, b));
    auto ba = std::get<MismatchReport>(compare_traces(b, a));
    ASSERT_EQ(ab.items.size(), ba.items.size());
    EXPECT_DOUBLE_EQ(ab.match_ratio(), ba.match_ratio());
    EXPECT_GT(ab.match_ratio(), 0.0);
    EXPECT_LT(ab.match_ratio(), 1.0);
    for (std::size_t i = 0; i < ab.items.size(); ++i) {
        EXPECT_EQ(ab.items[i].got, ba.items[i].exp);
        EXPECT_EQ(ab.items[i].exp, ba.items[i].got);
        if (i > 0) {
            auto prev = std::make_pair(ab.items[i - 1].test_index, ab.items[i - 1].signal);
            EXPECT_LT(prev, std::make_pair(ab.items[i].test_index, ab.items[i].signal));
        }
    }
}

TEST(Render, TwoItemsMatchGolden) {
    EXPECT_EQ(render_diagnostics(paper_like_report()), test::read_file(test::test_path("golden/diagnostics_two_items.txt")));
}

TEST(Render, PythonRoleSwapsSides) {
    EXPECT_EQ(render_diagnostics(paper_like_report(), Role::python),
              test::read_file(test::test_path("golden/diagnostics_two_items_python.txt")));
}

TEST(Render, TruncatesToFiveItems) {
    MismatchReport r = paper_like_report();
    r.items.clear();
    for (std::uint64_t i = 0; i < 12; ++i) r.items.push_back({i, "out", {8, i}, {8, i + 1}, {{"a", i}}});
    r.total_compared = 100;
    auto text = render_diagnostics(r);
    std::size_t count = 0;
    for (std::size_t p = text.find("  Test "); p != std::string::npos; p = text.find("  Test ", p + 1)) ++count;
    EXPECT_EQ(count, 5u);
    EXPECT_NE(text.find("\n  ...(up to 5 mismatches shown)...\nCheck your logic"), std::string::npos) << text;
    EXPECT_EQ(text.find("Test 5,"), std::string::npos);
}

TEST(Render, EmptyReport) { EXPECT_EQ(render_diagnostics(MismatchReport{}), "No mismatches detected."); }

TEST(Render, NeverExceedsLimit) {
    MismatchReport r;
    r.total_compared = 10;
    r.num_vectors = 10;
    for (std::uint64_t i = 0; i < 6; ++i) {
        sim::ValueMap in;
        for (int k = 0; k < 40; ++k) in["input_signal_with_long_name_" + std::to_string(k)] = 18446744073709551615ull;
        r.items.push_back({i, "signal", {64, 1}, {64, 2}, in});
    }
    auto text = render_diagnostics(r);
    EXPECT_LE(count_code_points(text), kDiagnosticLimit);
    EXPECT_EQ(count_code_points(text), kDiagnosticLimit);
    EXPECT_EQ(truncate_code_points("a\xE2\x80\x94" "b", 2), "a\xE2\x80\x94");
}

TEST(Shim, EmittedDffRunsThousandCycles) {
    auto d = test::lower_ok(kDff);
    auto stimuli = gen_stimuli(d, {});
    auto r = run_reference(pyref::emit_reference(d), stimuli, shim());
    ASSERT_TRUE(std::holds_alternative<sim::WaveTrace>(r)) << describe(std::get<FailureTier>(r));
    const auto& t = std::get<sim::WaveTrace>(r);
    ASSERT_EQ(t.cycles.size(), 1000u);
    EXPECT_EQ(t.cycles[5].outputs.at("q"), stimuli[5].at("d"));
    EXPECT_EQ(t.cycles[5].inputs.at("clk"), 1u);
}

TEST(Shim, SyntaxErrorIsCompileError) {
    std::vector<sim::PortInfo> ports = {{"d", sim::Direction::input, 1}, {"q", sim::Direction::output, 1}};
    auto r = run_reference("class TopModule:\n    def eval(self, inputs) -> dict\n", ports, {{{"d", 0}}}, shim());
    ASSERT_TRUE(std::holds_alternative<FailureTier>(r));
    auto& tier = std::get<FailureTier>(r);
    ASSERT_TRUE(std::holds_alternative<CompileError>(tier)) << describe(tier);
    EXPECT_NE(std::get<CompileError>(tier).detail.find("SyntaxError"), std::string::npos);
}

TEST(Shim, RaiseAtCycleSevenIsRuntimeError) {
    const std::string src =
        "class TopModule:\n"
        "    def __init__(self):\n"
        "        self.n = 0\n"
        "    def eval(self, inputs: dict) -> dict:\n"
        "        if self.n == 7:\n"
        "            raise ValueError('boom')\n"
        "        self.n += 1\n"
        "        return {\"q\": 0}\n";
    std::vector<sim::PortInfo> ports = {{"d", sim::Direction::input, 1}, {"q", sim::Direction::output, 1}};
    std::vector<sim::ValueMap> stimuli(20, sim::ValueMap{{"d", 1}});
    auto r = run_reference(src, ports, stimuli, shim());
    auto& tier = std::get<FailureTier>(r);
    ASSERT_TRUE(std::holds_alternative<RuntimeError>(tier)) << describe(tier);
    EXPECT_EQ(std::get<RuntimeError>(tier).cycle, 7u);
}

TEST(Shim, WrongOutputKeysArePortMismatch) {
    const std::string src =
        "class TopModule:\n"
        "    def eval(self, inputs: dict) -> dict:\n"
        "        return {\"Q\": 0}\n";
    std::vector<sim::PortInfo> ports = {{"d", sim::Direction::input, 1}, {"q", sim::Direction::output, 1}};
    auto r = run_reference(src, ports, {{{"d", 1}}}, shim());
    auto& tier = std::get<FailureTier>(r);
    EXPECT_TRUE(std::holds_alternative<PortMismatch>(tier)) << describe(tier);
}

TEST(Shim, TimeoutIsRuntimeError) {
    const std::string src =
        "class TopModule:\n"
        "    def eval(self, inputs: dict) -> dict:\n"
        "        while True:\n"
        "            pass\n";
    std::vector<sim::PortInfo> ports = {{"d", sim::Direction::input, 1}, {"q", sim::Direction::output, 1}};
    ShimConfig cfg = shim();
    cfg.timeout = std::chrono::milliseconds(800);
    auto r = run_reference(src, ports, {{{"d", 1}}}, cfg);
    auto& tier = std::get<FailureTier>(r);
    ASSERT_TRUE(std::holds_alternative<RuntimeError>(tier)) << describe(tier);
    EXPECT_EQ(std::get<RuntimeError>(tier).detail, "timeout");
}

TEST(Shim, MissingExecutableIsRuntimeError) {
    ShimConfig cfg;
    cfg.command = {"/nonexistent/shim-binary"};
    std::vector<sim::PortInfo> ports = {{"q", sim::Direction::output, 1}};
    auto r = run_reference("class TopModule:\n    pass\n", ports, {}, cfg);
    EXPECT_TRUE(std::holds_alternative<RuntimeError>(std::get<FailureTier>(r)));
}

TEST(CrossVerify, AgreementAndDisagreement) {
    XverifyOptions opts;
    opts.plan.num_vectors = 50;
    const std::string good =
        "class TopModule:\n"
        "    def __init__(self):\n"
        "        self.q = 0\n"
        "    def eval(self, inputs: dict) -> dict:\n"
        "        self.q = inputs.get(\"d\", 0) & 1\n"
        "        return {\"q\": self.q}\n";
    auto ok = cross_verify(kDff, good, std::nullopt, opts);
    ASSERT_TRUE(ok.report);
    EXPECT_TRUE(ok.report->items.empty());
    EXPECT_DOUBLE_EQ(std::get<Ran>(ok.verilog).match_ratio, 1.0);

    const std::string inverted =
        "class TopModule:\n"
        "    def eval(self, inputs: dict) -> dict:\n"
        "        return {\"q\": 1 - (inputs.get(\"d\", 0) & 1)}\n";
    auto bad = cross_verify(kDff, inverted, std::nullopt, opts);
    ASSERT_TRUE(bad.report);
    EXPECT_EQ(bad.report->items.size(), 50u);
    EXPECT_DOUBLE_EQ(std::get<Ran>(bad.python).match_ratio, 0.0);
}

TEST(CrossVerify, FailureTiersPerSide) {
    XverifyOptions opts;
    opts.plan.num_vectors = 10;
    ProblemInterface iface{{{"clk", sim::Direction::input, 1}, {"d", sim::Direction::input, 1}, {"q", sim::Direction::output, 1}},
                           {"clk"}};
    auto r = cross_verify("module dff(input clk, input d, output reg q)\n", "class TopModule:\n  pass\n", iface, opts);
    EXPECT_TRUE(std::holds_alternative<CompileError>(r.verilog));
    EXPECT_TRUE(std::holds_alternative<RuntimeError>(r.python)) << describe(r.python);  // class has no eval

    auto wide = cross_verify("module dff(input clk, input [1:0] d, output reg q);\n always @(posedge clk) q <= d[0];\nendmodule\n",
                             "class TopModule:\n    def eval(self, inputs):\n        return {'q': 0}\n", iface, opts);
    EXPECT_TRUE(std::holds_alternative<PortMismatch>(wide.verilog));
    ASSERT_TRUE(std::holds_alternative<Ran>(wide.python));
    EXPECT_DOUBLE_EQ(std::get<Ran>(wide.python).match_ratio, 0.0);
    EXPECT_FALSE(wide.report);
}

TEST(CrossVerify, DivisionByZeroInPythonIsRuntimeError) {
    XverifyOptions opts;
    opts.plan.num_vectors = 10;
    auto r = cross_verify(kDff,
                          "class TopModule:\n    def eval(self, inputs):\n        return {'q': 1 // 0}\n",
                          std::nullopt, opts);
    ASSERT_TRUE(std::holds_alternative<RuntimeError>(r.python));
    EXPECT_EQ(std::get<RuntimeError>(r.python).cycle, 0u);
    EXPECT_TRUE(std::holds_alternative<Ran>(r.verilog));
}

// Every corpus design: interpreter trace equals the emitted model's trace on 1000 seeded vectors.
class Differential : public ::testing::TestWithParam<std::string> {};

TEST_P(Differential, InterpreterMatchesEmittedModel) {
    auto d = test::lower_ok(test::read_file(test::test_path("corpus/" + GetParam())));
    auto stimuli = gen_stimuli(d, {});
    auto dut = sim::run_trace(d, stimuli);
    auto ref = run_reference(pyref::emit_reference(d), stimuli, shim());
    ASSERT_TRUE(std::holds_alternative<sim::WaveTrace>(ref)) << describe(std::get<FailureTier>(ref));
    auto cmp = compare_traces(dut, std::get<sim::WaveTrace>(ref));
    ASSERT_TRUE(std::holds_alternative<MismatchReport>(cmp)) << std::get<PortMismatch>(cmp).detail;
    const auto& rep = std::get<MismatchReport>(cmp);
    EXPECT_EQ(rep.num_vectors, 1000u);
    EXPECT_TRUE(rep.items.empty()) << render_diagnostics(rep);
}

namespace {
std::vector<std::string> corpus_files() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(test::test_path("corpus"))) {
        if (e.path().extension() == ".v") out.push_back(e.path().filename().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

INSTANTIATE_TEST_SUITE_P(Corpus, Differential, ::testing::ValuesIn(corpus_files()),
                         [](const auto& info) { return info.param.substr(0, info.param.size() - 2); });

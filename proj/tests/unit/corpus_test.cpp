#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "rtlxv/compile.hpp"
#include "rtlxv/corpus/corpus.hpp"
#include "support/synthetic_corpus.hpp"
#include "test_util.hpp"

using namespace rtlxv;
using namespace rtlxv::corpus;

namespace {

const char* kAdd = "module add(input [3:0] a, input [3:0] b, output [3:0] s);\n  assign s = a + b;\nendmodule\n";
const char* kGen =
    "module g(input [3:0] a, output [3:0] y);\n  genvar i;\n  generate for (i = 0; i < 4; i = i + 1) begin : bits\n"
    "    assign y[i] = a[3 - i];\n  end endgenerate\nendmodule\n";

std::vector<SourceUnit> corpus_files() { return load_sources(test::test_path("corpus")); }

ConvertOptions fast_options(std::uint64_t vectors = 200) {
    ConvertOptions o;
    o.plan.num_vectors = vectors;
    o.jobs = 4;
    return o;
}

}  // namespace

TEST(Fingerprint, InvariantUnderRenameAndReformat) {
    auto files = corpus_files();
    ASSERT_GE(files.size(), 30u);
    for (const auto& f : files) {
        auto variant = test::rename_and_reformat(f.text, "zz");
        ASSERT_TRUE(compile_verilog({variant}).ok()) << f.origin << "\n" << variant;
        EXPECT_EQ(fingerprint(f), fingerprint(SourceUnit{variant})) << f.origin;
    }
}

TEST(Fingerprint, SensitiveToOperatorsAndConstants) {
    const std::string base = "module m(input [7:0] a, output [7:0] y);\n  assign y = a + 8'd3;\nendmodule\n";
    const auto fp = fingerprint(SourceUnit{base});
    EXPECT_NE(fp, fingerprint(SourceUnit{"module m(input [7:0] a, output [7:0] y);\n  assign y = a - 8'd3;\nendmodule\n"}));
    EXPECT_NE(fp, fingerprint(SourceUnit{"module m(input [7:0] a, output [7:0] y);\n  assign y = a + 8'd4;\nendmodule\n"}));
    EXPECT_EQ(fp, fingerprint(SourceUnit{"module q(input [7:0] x, output [7:0] z); assign z = x + 8'h3; endmodule"}));
}

TEST(Fingerprint, DistinctAcrossCorpus) {
    std::set<std::string> seen;
    for (const auto& f : corpus_files()) EXPECT_TRUE(seen.insert(fingerprint(f)).second) << f.origin;
}

TEST(Fingerprint, UnparseableFallsBackToNormalizedText) {
    const std::string bad = "module broken(input a, output b);\n  assign b = a +;\nendmodule\n";
    EXPECT_EQ(normalized_text(bad), normalized_text(test::rename_and_reformat(bad, "r")));
    EXPECT_EQ(fingerprint(SourceUnit{bad}), fingerprint(SourceUnit{test::rename_and_reformat(bad, "r")}));
    EXPECT_NE(fingerprint(SourceUnit{bad}), fingerprint(SourceUnit{"module broken(input a, output b);\n  assign b = a -;\nendmodule\n"}));
}

TEST(Categorize, StructuralHeuristics) {
    auto cat = [](const std::string& name) {
        return categorize(test::lower_ok(test::read_file(test::test_path("corpus/" + name + ".v"))));
    };
    EXPECT_EQ(cat("seq_detect101"), Category::fsm);
    EXPECT_EQ(cat("traffic_light"), Category::fsm);
    EXPECT_EQ(cat("counter8"), Category::multi_cycle);
    EXPECT_EQ(cat("fifo4x8"), Category::multi_cycle);
    EXPECT_EQ(cat("parity16"), Category::bit_arith);
    EXPECT_EQ(cat("gray4"), Category::bit_arith);
    EXPECT_EQ(cat("adder8"), Category::other);
    EXPECT_EQ(cat("dff"), Category::other);
}

TEST(ConvertCorpus, UnsupportedSourceIsSkipped) {
    auto recs = convert_corpus({{kAdd, "a.v"}, {kGen, "g.v"}, {test::read_file(test::test_path("corpus/counter8.v")), "c.v"}},
                               fast_options());
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_TRUE(recs[0].verified);
    EXPECT_FALSE(recs[1].verified);
    EXPECT_EQ(recs[1].stage, "unsupported");
    EXPECT_EQ(recs[1].reason, "unsupported construct: generate");
    EXPECT_TRUE(recs[2].verified);
    EXPECT_FALSE(recs[0].reference.empty());
    EXPECT_EQ(recs[0].manifest.size(), 3u);
}

TEST(ConvertCorpus, InjectedEmitterBugIsCaught) {
    auto opts = fast_options();
    opts.emit = [](const ir::Design& d) {
        auto ref = pyref::emit_reference(d);
        auto at = ref.text.find("return {");
        ref.text.insert(at, "if self.cycle_count == 5:\n            s = s ^ 1\n        self.cycle_count += 1\n        ");
        auto init = ref.text.find("def __init__(self):\n");
        ref.text.insert(init + 20, "        self.cycle_count = 0\n");
        return ref;
    };
    auto recs = convert_corpus({{kAdd, "a.v"}}, opts);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_FALSE(recs[0].verified);
    EXPECT_EQ(recs[0].stage, "divergence");
    EXPECT_EQ(recs[0].reason, "divergence at cycle 5 on `s'") << recs[0].reference;
}

TEST(ConvertCorpus, EmitterExceptionAndParseErrors) {
    auto opts = fast_options();
    opts.emit = [](const ir::Design&) -> pyref::RefSource { throw std::runtime_error("emitter crashed"); };
    auto recs = convert_corpus({{kAdd, "a.v"}, {"module x(input a output b); endmodule", "bad.v"}}, opts);
    EXPECT_EQ(recs[0].stage, "emit");
    EXPECT_EQ(recs[0].reason, "emitter crashed");
    EXPECT_EQ(recs[1].stage, "parse");
    EXPECT_FALSE(recs[1].fingerprint.empty());
}

TEST(ConvertCorpus, EmptyInput) {
    EXPECT_TRUE(convert_corpus({}).empty());
    auto dir = std::filesystem::temp_directory_path() / "rtlxv_empty_corpus";
    std::filesystem::create_directories(dir);
    EXPECT_TRUE(load_sources(dir.string()).empty());
    EXPECT_THROW((void)load_sources((dir / "missing").string()), std::invalid_argument);
}

TEST(ConvertCorpus, WholeCommittedCorpusVerifies) {
    auto files = corpus_files();
    auto recs = convert_corpus(files, fast_options());
    ASSERT_EQ(recs.size(), files.size());
    for (const auto& r : recs) EXPECT_TRUE(r.verified) << r.id << ": " << r.stage << " " << r.reason;
}

TEST(Filter, Examples) {
    auto recs = convert_corpus({{kAdd, "a.v"}, {kAdd, "a_copy.v"}, {test::rename_and_reformat(kAdd, "p"), "a_renamed.v"},
                                {test::read_file(test::test_path("corpus/gray4.v")), "gray.v"},
                                {test::read_file(test::test_path("corpus/dff.v")), "dff.v"}},
                               fast_options(50));
    std::vector<SourceUnit> bench = {{test::rename_and_reformat(test::read_file(test::test_path("corpus/gray4.v")), "b"),
                                      "bench_gray.v"}};
    auto res = contamination_filter(recs, bench);
    std::vector<std::string> kept;
    for (const auto& r : res.kept) kept.push_back(r.id);
    EXPECT_EQ(kept, (std::vector<std::string>{"a.v", "dff.v"}));
    ASSERT_EQ(res.dropped.size(), 3u);
    EXPECT_EQ(res.dropped[0].reason, "duplicate of a.v");
    EXPECT_EQ(res.dropped[1].reason, "duplicate of a.v");
    EXPECT_EQ(res.dropped[2].reason, "benchmark overlap: bench_gray.v");
}

TEST(Filter, PlantedOverlapsInSyntheticCorpus) {
    auto bench_all = corpus_files();
    std::vector<SourceUnit> benchmark(bench_all.begin(), bench_all.begin() + 10);
    auto sources = test::generated_designs(90);
    std::set<std::string> planted;
    for (std::size_t i = 0; i < benchmark.size(); ++i) {
        const std::string id = "planted" + std::to_string(i) + ".v";
        sources.insert(sources.begin() + static_cast<long>(i * 9), {test::rename_and_reformat(benchmark[i].text, "w"), id});
        planted.insert(id);
    }
    ASSERT_EQ(sources.size(), 100u);
    auto recs = convert_corpus(sources, fast_options(100));
    ASSERT_EQ(recs.size(), 100u);
    auto res = contamination_filter(recs, benchmark);
    std::set<std::string> dropped;
    for (const auto& d : res.dropped) dropped.insert(d.id);
    EXPECT_EQ(dropped, planted);
    EXPECT_EQ(res.kept.size(), 90u);
}

TEST(Annotate, FillsReasoningForVerified) {
    auto recs = convert_corpus({{kAdd, "a.v"}, {kGen, "g.v"}}, fast_options(20));
    orchestrator::MockAgent agent(orchestrator::Role::verilog, {"It adds a and b."});
    annotate(recs, agent);
    EXPECT_EQ(recs[0].reasoning, "It adds a and b.");
    EXPECT_EQ(recs[1].reasoning, "");
}

TEST(DatasetJson, RecordAndSummary) {
    auto recs = convert_corpus({{kAdd, "a.v"}, {kGen, "g.v"}}, fast_options(20));
    auto j = to_json(recs[0]);
    EXPECT_EQ(j["status"], "verified");
    EXPECT_EQ(j["category"], "other");
    EXPECT_EQ(j["ports"][2]["direction"], "output");
    EXPECT_EQ(to_json(recs[1])["stage"], "unsupported");
    auto s = summary_json(recs, {{"x", "duplicate of a.v"}});
    EXPECT_EQ(s["records"], 2);
    EXPECT_EQ(s["status"]["verified"], 1);
    EXPECT_EQ(s["status"]["skipped"], 1);
    EXPECT_EQ(s["skipped_by_stage"]["unsupported"], 1);
    EXPECT_EQ(s["filtered"], 1);
}

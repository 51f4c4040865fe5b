#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "rtlxv/cli/cli.hpp"
#include "support/synthetic_corpus.hpp"
#include "test_util.hpp"

using namespace rtlxv;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run rtlxv_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("rtlxv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    [[nodiscard]] std::string tmp(const std::string& name) const { return (dir_ / name).string(); }
    static std::string fixture(const std::string& name) { return test::test_path("fixtures/cli/" + name); }
    static std::string corpus(const std::string& name) { return test::test_path("corpus/" + name); }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream(tmp(name), std::ios::binary) << text;
    }

    fs::path dir_;
};

std::vector<nlohmann::json> json_lines(const std::string& text) {
    std::vector<nlohmann::json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(nlohmann::json::parse(line));
    }
    return out;
}

}  // namespace

TEST_F(CliTest, XverifyEquivalentPairExitsZero) {
    ASSERT_EQ(rtlxv_cli({"emit-py", corpus("alu8.v"), "-o", tmp("m.py")}).code, 0);
    auto r = rtlxv_cli({"xverify", corpus("alu8.v"), tmp("m.py"), "--stimuli", "1000", "--seed", "42", "--out-dir", tmp("out")});
    EXPECT_EQ(r.code, cli::kExitOk) << r.out << r.err;
    auto report = nlohmann::json::parse(test::read_file(tmp("out/report.json")));
    EXPECT_EQ(report["match_ratio"], 1.0);
    EXPECT_EQ(report["plan"]["seed"], 42);
    EXPECT_EQ(report["plan"]["num_vectors"], 1000);
    EXPECT_NEAR(report["reward"]["verilog"]["total"].get<double>(), 10.5, 1e-12);
    EXPECT_EQ(test::read_file(tmp("out/diagnostics.txt")), "No mismatches detected.");
}

TEST_F(CliTest, XverifyOneBitBugExitsOneWithDiagnostics) {
    ASSERT_EQ(rtlxv_cli({"emit-py", corpus("adder8.v"), "-o", tmp("m.py")}).code, 0);
    auto model = test::read_file(tmp("m.py"));
    const std::string needle = "\"sum\": sum & 0xFF";
    auto at = model.find(needle);
    ASSERT_NE(at, std::string::npos) << model;
    model.replace(at, needle.size(), "\"sum\": (sum ^ 0x10) & 0xFF");
    write("bad.py", model);
    auto r = rtlxv_cli({"xverify", corpus("adder8.v"), tmp("bad.py"), "--stimuli", "1000", "--seed", "42", "--out-dir", tmp("out")});
    EXPECT_EQ(r.code, cli::kExitMismatch);
    auto diag = test::read_file(tmp("out/diagnostics.txt"));
    EXPECT_TRUE(diag.starts_with("Verilog vs Python: 1000/2000 mismatches across 1000 test vectors.\n"
                                 "First mismatches (got = your Verilog, exp = peer Python):\n  Test 0, signal `sum': got="))
        << diag;
    EXPECT_TRUE(diag.ends_with("  ...(up to 5 mismatches shown)...\nCheck your logic carefully. Either you or the Python "
                               "agent is wrong \xE2\x80\x94\nonly change your code if you think your previous code is wrong."));
    auto report = nlohmann::json::parse(test::read_file(tmp("out/report.json")));
    EXPECT_DOUBLE_EQ(report["match_ratio"].get<double>(), 0.5);
}

TEST_F(CliTest, XverifyBrokenModelIsMismatchTier) {
    write("broken.py", "class TopModule:\n    def eval(self, inputs)\n");
    auto r = rtlxv_cli({"xverify", corpus("adder8.v"), tmp("broken.py"), "--stimuli", "10", "--out-dir", tmp("o")});
    EXPECT_EQ(r.code, cli::kExitMismatch);
    auto report = nlohmann::json::parse(test::read_file(tmp("o/report.json")));
    EXPECT_EQ(report["python"]["tier"], "compile_error");
    EXPECT_EQ(report["verilog"]["tier"], "ran");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
    EXPECT_EQ(rtlxv_cli({}).code, cli::kExitError);
    EXPECT_EQ(rtlxv_cli({"frobnicate"}).code, cli::kExitError);
    EXPECT_EQ(rtlxv_cli({"parse", corpus("dff.v"), "--no-such-flag"}).code, cli::kExitError);
    auto missing = rtlxv_cli({"xverify", tmp("nope.v"), tmp("nope.py")});
    EXPECT_EQ(missing.code, cli::kExitError);
    EXPECT_NE(missing.err.find("nope.v"), std::string::npos);
    EXPECT_NE(missing.err.find("Usage"), std::string::npos);
    write("bad.v", "module m(input a, output b); assign b = ; endmodule\n");
    auto bad = rtlxv_cli({"parse", tmp("bad.v")});
    EXPECT_EQ(bad.code, cli::kExitError);
    EXPECT_NE(bad.err.find("bad.v:1:"), std::string::npos) << bad.err;
    EXPECT_EQ(rtlxv_cli({"simulate", corpus("dff.v"), "--stimuli", "0"}).code, cli::kExitError);
    EXPECT_EQ(rtlxv_cli({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, ParseEmitSimulate) {
    auto p = rtlxv_cli({"parse", corpus("param_adder.v"), "--ir", "--param", "WIDTH=4"});
    EXPECT_EQ(p.code, 0) << p.err;
    EXPECT_NE(p.out.find(": 4"), std::string::npos) << p.out;
    EXPECT_EQ(rtlxv_cli({"parse", corpus("gray4.v")}).code, 0);

    auto e = rtlxv_cli({"emit-py", corpus("dff.v"), "--skeleton", tmp("s.py"), "--manifest", tmp("m.json")});
    EXPECT_EQ(e.code, 0);
    EXPECT_NE(e.out.find("class TopModule:"), std::string::npos);
    EXPECT_NE(test::read_file(tmp("s.py")).find("# TODO"), std::string::npos);
    EXPECT_EQ(nlohmann::json::parse(test::read_file(tmp("m.json")))["ports"].size(), 3u);

    auto s = rtlxv_cli({"simulate", corpus("counter8.v"), "--stimuli", "6", "--seed", "3", "-o", tmp("t.jsonl"), "--vcd", tmp("t.vcd")});
    EXPECT_EQ(s.code, 0);
    auto lines = json_lines(test::read_file(tmp("t.jsonl")));
    ASSERT_EQ(lines.size(), 7u);
    EXPECT_EQ(lines[0]["plan"]["seed"], 3);
    EXPECT_EQ(lines[1]["outputs"]["count"], 0);
    EXPECT_NE(test::read_file(tmp("t.vcd")).find("$enddefinitions"), std::string::npos);
}

TEST_F(CliTest, ConfigFileBelowFlags) {
    write("cfg.toml", "stimuli = 4\nseed = 9\n");
    auto a = rtlxv_cli({"--config", tmp("cfg.toml"), "simulate", corpus("dff.v")});
    ASSERT_EQ(a.code, 0) << a.err;
    auto la = json_lines(a.out);
    EXPECT_EQ(la.size(), 5u);
    EXPECT_EQ(la[0]["plan"]["seed"], 9);
    auto b = rtlxv_cli({"--config", tmp("cfg.toml"), "simulate", corpus("dff.v"), "--seed", "11"});
    auto lb = json_lines(b.out);
    EXPECT_EQ(lb[0]["plan"]["seed"], 11);
    EXPECT_EQ(lb.size(), 5u);
    write("typo.toml", "stimulus = 4\n");
    EXPECT_EQ(rtlxv_cli({"--config", tmp("typo.toml"), "simulate", corpus("dff.v")}).code, cli::kExitError);
    auto c = rtlxv_cli({"simulate", corpus("dff.v")});
    EXPECT_EQ(json_lines(c.out).size(), 1001u);
}

TEST_F(CliTest, OrchestrateWritesSessionLog) {
    auto r = rtlxv_cli({"orchestrate", "--agents", fixture("agents_mock.toml"), "--design", fixture("popcount.v"),
                        "--description-file", fixture("popcount.txt"), "--best-of", "3", "--turns", "3", "--stimuli", "200",
                        "--jobs", "2", "--log", tmp("session.jsonl")});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
    auto lines = json_lines(test::read_file(tmp("session.jsonl")));
    ASSERT_GE(lines.size(), 2u);
    ASSERT_LE(lines.size(), 4u);  // at most 3 turns plus the summary
    EXPECT_EQ(lines.size(), 3u);
    EXPECT_LT(lines[0]["best_ratio"].get<double>(), 1.0);
    EXPECT_EQ(lines[0]["verilog_candidates"].size(), 3u);
    EXPECT_EQ(lines.back()["termination"], "agreement");
    EXPECT_EQ(lines.back()["config"]["seed"], 42);
    EXPECT_EQ(lines.back()["config"]["num_vectors"], 200);
    EXPECT_EQ(lines.back()["config"]["best_of"], 3);
    EXPECT_NE(lines[1]["prompts"]["verilog"][1]["content"].get<std::string>().find("Previous verification error"),
              std::string::npos);

    auto no_bt = rtlxv_cli({"orchestrate", "--agents", fixture("agents_mock.toml"), "--design", fixture("popcount.v"),
                            "--turns", "1", "--stimuli", "50"});
    EXPECT_EQ(no_bt.code, cli::kExitMismatch);
    EXPECT_EQ(json_lines(no_bt.out).size(), 2u);
    EXPECT_EQ(rtlxv_cli({"orchestrate", "--agents", fixture("agents_mock.toml")}).code, cli::kExitError);
}

TEST_F(CliTest, DatasetGenFiltersBenchmark) {
    fs::create_directories(tmp("src"));
    fs::create_directories(tmp("bench"));
    for (const char* n : {"adder8.v", "gray4.v", "counter8.v"}) fs::copy_file(corpus(n), tmp(std::string("src/") + n));
    write("src/gen.v", "module g(input [3:0] a, output [3:0] y);\n  genvar i;\nendmodule\n");
    write("bench/b.v", test::rename_and_reformat(test::read_file(corpus("gray4.v")), "k"));
    auto r = rtlxv_cli({"dataset-gen", tmp("src"), "--out", tmp("out"), "--benchmark", tmp("bench"), "--stimuli", "100",
                        "--jobs", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    auto summary = nlohmann::json::parse(test::read_file(tmp("out/summary.json")));
    EXPECT_EQ(summary["filtered"], 1);
    EXPECT_EQ(summary["records"], 3);
    EXPECT_EQ(summary["status"]["verified"], 2);
    EXPECT_EQ(summary["status"]["skipped"], 1);
    EXPECT_EQ(summary["plan"]["num_vectors"], 100);
    auto recs = json_lines(test::read_file(tmp("out/dataset.jsonl")));
    ASSERT_EQ(recs.size(), 3u);
    for (const auto& rec : recs) EXPECT_EQ(rec["plan"]["seed"], 42);
}

TEST_F(CliTest, RewardEval) {
    auto agg = rtlxv_cli({"reward-eval", "--local", "1", "--fix", "1", "--match", "1"});
    ASSERT_EQ(agg.code, 0) << agg.err;
    EXPECT_NEAR(nlohmann::json::parse(agg.out)["aggregate"]["total"].get<double>(), 10.7, 1e-12);

    write("samples.jsonl", "{\"problem\":\"p1\",\"n\":10,\"c\":3}\n{\"problem\":\"p2\",\"n\":10,\"c\":0}\n");
    auto pk = rtlxv_cli({"reward-eval", tmp("samples.jsonl"), "--k", "1,5"});
    ASSERT_EQ(pk.code, 0) << pk.err;
    auto j = nlohmann::json::parse(pk.out);
    EXPECT_NEAR(j["pass_at_k"]["pass@1"].get<double>(), 0.15, 1e-12);
    EXPECT_NEAR(j["pass_at_k"]["pass@5"].get<double>(), (1.0 - 21.0 / 252.0) / 2, 1e-12);
    EXPECT_EQ(rtlxv_cli({"reward-eval", tmp("samples.jsonl"), "--k", "11"}).code, cli::kExitError);

    ASSERT_EQ(rtlxv_cli({"orchestrate", "--agents", fixture("agents_mock.toml"), "--design", fixture("popcount.v"),
                         "--stimuli", "50", "--log", tmp("s.jsonl")})
                  .code,
              0);
    auto sess = rtlxv_cli({"reward-eval", tmp("s.jsonl")});
    ASSERT_EQ(sess.code, 0) << sess.err;
    auto sj = nlohmann::json::parse(sess.out);
    EXPECT_EQ(sj["sessions"]["count"], 1);
    EXPECT_EQ(sj["sessions"]["agreement"], 1);
    EXPECT_EQ(sj["candidate_rewards"]["verilog"]["count"], 6);
    EXPECT_EQ(rtlxv_cli({"reward-eval"}).code, cli::kExitError);
}

TEST_F(CliTest, AgentsFileFormats) {
    write("a.toml",
          "[verilog]\nkind = \"scripted\"\nturn0 = [\"first\\nline\", \"second\"]\nturn1 = [\"third\"]\n"
          "[reference]\nkind = \"chat\"\nbase_url = \"http://127.0.0.1:9/v1\"\nmodel = \"m\"\ntemperature = 0.2\n");
    auto cfg = cli::load_agents(tmp("a.toml"));
    EXPECT_EQ(cfg.verilog.kind, "scripted");
    ASSERT_EQ(cfg.verilog.script.size(), 2u);
    EXPECT_EQ(cfg.verilog.script[0][0], "first\nline");
    EXPECT_EQ(cfg.python.role, orchestrator::Role::python);
    EXPECT_DOUBLE_EQ(cfg.python.chat.temperature, 0.2);

    write("b.toml", "[verilog]\nkind = \"mock\"\noutputs = [\"x\"]\n");
    EXPECT_THROW((void)cli::load_agents(tmp("b.toml")), std::runtime_error);
    write("c.toml", "[verilog]\nkind = \"mock\"\ncolour = \"blue\"\n[python]\nkind = \"mock\"\noutputs = [\"y\"]\n");
    EXPECT_THROW((void)cli::load_agents(tmp("c.toml")), std::runtime_error);
    write("d.toml", "[verilog]\nkind = \"scripted\"\nturn1 = [\"x\"]\n[python]\nkind = \"mock\"\noutputs = [\"y\"]\n");
    EXPECT_THROW((void)cli::load_agents(tmp("d.toml")), std::runtime_error);
}

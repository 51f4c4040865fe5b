#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "rtlxv/pyref/emitter.hpp"
#include "rtlxv/sim/interpreter.hpp"
#include "rtlxv/xverify/shim.hpp"
#include "support/golden.hpp"
#include "test_util.hpp"

using namespace rtlxv;

namespace {

std::vector<std::string> golden_designs() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(test::test_path("golden/vectors"))) {
        out.push_back(e.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, InterpreterAndEmittedModelMatchHandVectors) {
    auto g = test::load_golden(test::test_path("golden/vectors/" + GetParam() + ".jsonl"));
    ASSERT_GE(g.inputs.size(), 5u);
    auto d = test::lower_ok(test::read_file(test::test_path("corpus/" + GetParam() + ".v")));

    auto trace = sim::run_trace(d, g.inputs);
    auto bad = test::golden_mismatches(trace, g);
    EXPECT_TRUE(bad.empty()) << "interpreter differs at cycle " << bad.front() << ":\n" << sim::to_jsonl(trace);

    auto ref = xverify::run_reference(pyref::emit_reference(d), g.inputs, xverify::ShimConfig::from_environment());
    ASSERT_TRUE(std::holds_alternative<sim::WaveTrace>(ref));
    auto bad_ref = test::golden_mismatches(std::get<sim::WaveTrace>(ref), g);
    EXPECT_TRUE(bad_ref.empty()) << "emitted model differs at cycle " << bad_ref.front();
}

TEST(GoldenSet, CoversTenDesigns) { EXPECT_GE(golden_designs().size(), 10u); }

INSTANTIATE_TEST_SUITE_P(Vectors, Golden, ::testing::ValuesIn(golden_designs()),
                         [](const auto& info) { return info.param; });

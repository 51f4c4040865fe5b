#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtlxv/diagnostic.hpp"
#include "rtlxv/ir/ir.hpp"
#include "rtlxv/orchestrator/agent.hpp"
#include "rtlxv/pyref/emitter.hpp"
#include "rtlxv/xverify/shim.hpp"
#include "rtlxv/xverify/stimuli.hpp"

namespace rtlxv::corpus {

enum class Category { fsm, multi_cycle, bit_arith, other };

[[nodiscard]] const char* category_name(Category c);

struct DatasetRecord {
    std::string id;
    std::string verilog;
    std::string reference;
    std::vector<sim::PortInfo> manifest;
    bool verified = false;
    std::string stage;   // failing stage when skipped: parse | unsupported | lower | emit | simulate | reference | divergence
    std::string reason;
    std::string fingerprint;
    std::optional<Category> category;
    std::string reasoning;  // filled by annotate()
};

using EmitFn = std::function<pyref::RefSource(const ir::Design&)>;

struct ConvertOptions {
    xverify::StimulusPlan plan;
    xverify::ShimConfig shim = xverify::ShimConfig::from_environment();
    unsigned jobs = 1;
    EmitFn emit = pyref::emit_reference;
};

/// SHA-256 of the canonical IR; sources that do not lower fall back to a digest of their normalized tokens.
[[nodiscard]] std::string fingerprint(const SourceUnit& src);
[[nodiscard]] std::string fingerprint(const ir::Design& d);
/// Identifiers renamed by first use, numbers in decimal, comments and layout dropped.
[[nodiscard]] std::string normalized_text(const std::string& verilog);

[[nodiscard]] Category categorize(const ir::Design& d);

/// One record per source, in input order. Failures become skipped records; nothing throws per source.
[[nodiscard]] std::vector<DatasetRecord> convert_corpus(const std::vector<SourceUnit>& sources,
                                                       const ConvertOptions& opts = {});

/// *.v and *.sv files of `dir` (non-recursive), sorted by name. Origins are the file names.
[[nodiscard]] std::vector<SourceUnit> load_sources(const std::string& dir);

struct DroppedRecord {
    std::string id;
    std::string reason;  // "benchmark overlap: <origin>" or "duplicate of <id>"
};

struct FilterResult {
    std::vector<DatasetRecord> kept;
    std::vector<DroppedRecord> dropped;
};

/// Drops records whose fingerprint matches a benchmark source, then keeps the first of each fingerprint.
[[nodiscard]] FilterResult contamination_filter(const std::vector<DatasetRecord>& records,
                                                const std::vector<SourceUnit>& benchmark);

/// Asks `agent` for a reasoning trace per verified record; transport failures leave the field empty.
void annotate(std::vector<DatasetRecord>& records, orchestrator::Agent& agent);

[[nodiscard]] nlohmann::json to_json(const DatasetRecord& r);
[[nodiscard]] nlohmann::json summary_json(const std::vector<DatasetRecord>& records,
                                          const std::vector<DroppedRecord>& dropped);

}  // namespace rtlxv::corpus

#include "rtlxv/corpus/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rtlxv/frontend/lexer.hpp"
#include "rtlxv/sim/interpreter.hpp"
#include "rtlxv/util/parallel.hpp"
#include "rtlxv/util/sha256.hpp"
#include "rtlxv/xverify/report.hpp"

namespace rtlxv::corpus {

using nlohmann::json;

const char* category_name(Category c) {
    switch (c) {
        case Category::fsm: return "fsm";
        case Category::multi_cycle: return "multi_cycle";
        case Category::bit_arith: return "bit_arith";
        case Category::other: return "other";
    }
    return "other";
}

std::string normalized_text(const std::string& verilog) {
    auto lexed = frontend::tokenize(verilog);
    std::map<std::string, std::string> names;
    std::string out;
    for (const auto& t : lexed.tokens) {
        if (t.kind == frontend::TokenKind::end_of_file) break;
        std::string piece = t.text;
        if (t.kind == frontend::TokenKind::identifier && !frontend::is_keyword(t.text)) {
            auto [it, fresh] = names.emplace(t.text, "");
            if (fresh) it->second = "i" + std::to_string(names.size() - 1);
            piece = it->second;
        } else if (t.kind == frontend::TokenKind::number) {
            piece = (t.sized ? std::to_string(t.width) : "") + (t.is_signed ? "'sd" : "'d") + std::to_string(t.value);
            if (t.dont_care) piece += "?" + std::to_string(t.dont_care);
        }
        if (!out.empty()) out += ' ';
        out += piece;
    }
    return out;
}

std::string fingerprint(const ir::Design& d) {
    // Name-derived reset entries would make the digest depend on port names.
    std::istringstream in(ir::print_design(d, true));
    std::string canon, line;
    while (std::getline(in, line)) {
        if (line.rfind("  reset ", 0) == 0) continue;
        canon += line + "\n";
    }
    return util::sha256_hex("ir\n" + canon);
}

std::string fingerprint(const SourceUnit& src) {
    auto parsed = frontend::parse_module(src);
    if (parsed.ok() && frontend::validate_subset(*parsed.module).empty()) {
        auto lowered = ir::lower_to_ir(*parsed.module);
        if (lowered.ok()) return fingerprint(*lowered.design);
    }
    return util::sha256_hex("text\n" + normalized_text(src.text));
}

namespace {

struct Features {
    bool state_case = false;   // case on a register whose arms decide that register's next value
    bool self_update = false;  // register updated from its own value
    bool indexed_write = false;
    bool arith = false;
};

using NetSet = std::set<ir::NetId>;

NetSet reads_of(const ir::Expr& e) {
    std::vector<ir::NetId> reads;
    ir::collect_reads(e, reads);
    return {reads.begin(), reads.end()};
}

void targets_of(const std::vector<ir::Stmt>& body, NetSet& out) {
    for (const auto& s : body) {
        if (s.kind == ir::StmtKind::assign) {
            for (const auto& t : s.assign.targets) out.insert(t.net);
        }
        targets_of(s.then_body, out);
        targets_of(s.else_body, out);
        for (const auto& arm : s.arms) targets_of(arm.body, out);
        targets_of(s.default_body, out);
    }
}

// Nets feeding each register's sequential assignments.
void feeds_of(const std::vector<ir::Stmt>& body, std::map<ir::NetId, NetSet>& feeds) {
    for (const auto& s : body) {
        if (s.kind == ir::StmtKind::assign) {
            auto r = reads_of(s.assign.value);
            for (const auto& t : s.assign.targets) feeds[t.net].insert(r.begin(), r.end());
        }
        feeds_of(s.then_body, feeds);
        feeds_of(s.else_body, feeds);
        for (const auto& arm : s.arms) feeds_of(arm.body, feeds);
        feeds_of(s.default_body, feeds);
    }
}

class Scanner {
public:
    explicit Scanner(const ir::Design& d) : d_(d) {
        for (const auto& p : d.seq_procs) feeds_of(p.body, feeds_);
    }

    Features run() {
        for (const auto& a : d_.assigns) assign(a.assign, false);
        for (const auto& p : d_.comb_procs) body(p.body, false);
        for (const auto& p : d_.seq_procs) body(p.body, true);
        return f_;
    }

private:
    const ir::Design& d_;
    std::map<ir::NetId, NetSet> feeds_;
    Features f_;

    void expr(const ir::Expr& e) {
        switch (e.op) {
            case ir::Op::add: case ir::Op::sub: case ir::Op::mul: case ir::Op::div: case ir::Op::mod:
            case ir::Op::neg: case ir::Op::lt: case ir::Op::le: case ir::Op::gt: case ir::Op::ge:
                f_.arith = true;
                break;
            default: break;
        }
        for (const auto& a : e.args) expr(a);
    }

    void assign(const ir::Assign& a, bool seq) {
        expr(a.value);
        const auto reads = reads_of(a.value);
        for (const auto& t : a.targets) {
            if (t.index) expr(*t.index);
            if (seq && (t.kind == ir::TargetKind::dyn_bit || t.kind == ir::TargetKind::dyn_slice)) f_.indexed_write = true;
            if (seq && reads.count(t.net)) f_.self_update = true;
        }
    }

    void dispatch(const ir::Stmt& s) {
        NetSet written;
        for (const auto& arm : s.arms) targets_of(arm.body, written);
        targets_of(s.default_body, written);
        for (ir::NetId r : reads_of(s.cond)) {
            if (d_.nets[static_cast<std::size_t>(r)].driver != ir::DriverKind::sequential) continue;
            if (written.count(r)) f_.state_case = true;
            auto it = feeds_.find(r);
            if (it == feeds_.end()) continue;
            for (ir::NetId w : written) {
                if (it->second.count(w)) f_.state_case = true;
            }
        }
    }

    void body(const std::vector<ir::Stmt>& stmts, bool seq) {
        for (const auto& s : stmts) {
            switch (s.kind) {
                case ir::StmtKind::assign: assign(s.assign, seq); break;
                case ir::StmtKind::if_else:
                    expr(s.cond);
                    body(s.then_body, seq);
                    body(s.else_body, seq);
                    break;
                case ir::StmtKind::case_stmt:
                    expr(s.cond);
                    dispatch(s);
                    for (const auto& arm : s.arms) body(arm.body, seq);
                    body(s.default_body, seq);
                    break;
            }
        }
    }
};

}  // namespace

Category categorize(const ir::Design& d) {
    const Features f = Scanner(d).run();
    if (f.state_case) return Category::fsm;
    if (!d.seq_procs.empty()) return f.self_update || f.indexed_write ? Category::multi_cycle : Category::other;
    return f.arith ? Category::other : Category::bit_arith;
}

namespace {

std::string first_error(const std::vector<Diagnostic>& diags, const std::string& origin) {
    for (const auto& d : diags) {
        if (d.severity == Severity::error) return format_diagnostic(d, origin);
    }
    return "failed";
}

DatasetRecord convert_one(const SourceUnit& src, const ConvertOptions& opts) {
    DatasetRecord r;
    r.id = src.origin;
    r.verilog = src.text;
    auto skip = [&](std::string stage, std::string reason) {
        r.stage = std::move(stage);
        r.reason = std::move(reason);
        return r;
    };
    auto parsed = frontend::parse_module(src);
    if (!parsed.ok()) {
        r.fingerprint = util::sha256_hex("text\n" + normalized_text(src.text));
        return skip("parse", first_error(parsed.diagnostics, src.origin));
    }
    if (auto unsupported = frontend::validate_subset(*parsed.module); !unsupported.empty()) {
        r.fingerprint = util::sha256_hex("text\n" + normalized_text(src.text));
        std::string features;
        for (const auto& u : unsupported) {
            if (features.find(u.feature) == std::string::npos) features += (features.empty() ? "" : ", ") + u.feature;
        }
        return skip("unsupported", "unsupported construct: " + features);
    }
    auto lowered = ir::lower_to_ir(*parsed.module);
    if (!lowered.ok()) {
        r.fingerprint = util::sha256_hex("text\n" + normalized_text(src.text));
        return skip("lower", first_error(lowered.diagnostics, src.origin));
    }
    const ir::Design& d = *lowered.design;
    r.fingerprint = fingerprint(d);
    r.category = categorize(d);
    r.manifest = sim::trace_ports(d);

    pyref::RefSource ref;
    try {
        ref = opts.emit(d);
    } catch (const std::exception& e) {
        return skip("emit", e.what());
    }
    r.reference = ref.text;

    auto stimuli = xverify::gen_stimuli(d, opts.plan);
    sim::WaveTrace dut;
    try {
        dut = sim::run_trace(d, stimuli);
    } catch (const std::exception& e) {
        return skip("simulate", e.what());
    }
    auto outcome = xverify::run_reference(ref, stimuli, opts.shim);
    if (auto* fail = std::get_if<xverify::FailureTier>(&outcome)) return skip("reference", xverify::describe(*fail));
    auto cmp = xverify::compare_traces(dut, std::get<sim::WaveTrace>(outcome));
    if (auto* pm = std::get_if<xverify::PortMismatch>(&cmp)) return skip("reference", pm->detail);
    const auto& rep = std::get<xverify::MismatchReport>(cmp);
    if (!rep.items.empty()) {
        return skip("divergence", "divergence at cycle " + std::to_string(rep.items.front().test_index) + " on `" +
                                      rep.items.front().signal + "'");
    }
    r.verified = true;
    return r;
}

}  // namespace

std::vector<DatasetRecord> convert_corpus(const std::vector<SourceUnit>& sources, const ConvertOptions& opts) {
    xverify::validate(opts.plan);
    std::vector<DatasetRecord> out(sources.size());
    util::parallel_for(sources.size(), opts.jobs, [&](std::size_t i) { out[i] = convert_one(sources[i], opts); });
    return out;
}

std::vector<SourceUnit> load_sources(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw std::invalid_argument("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".v" || ext == ".sv")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SourceUnit> out;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out.push_back({ss.str(), f.filename().string()});
    }
    return out;
}

FilterResult contamination_filter(const std::vector<DatasetRecord>& records, const std::vector<SourceUnit>& benchmark) {
    std::map<std::string, std::string> bench;
    for (const auto& b : benchmark) bench.emplace(fingerprint(b), b.origin);
    std::map<std::string, std::string> seen;
    FilterResult out;
    for (const auto& r : records) {
        if (auto it = bench.find(r.fingerprint); it != bench.end()) {
            out.dropped.push_back({r.id, "benchmark overlap: " + it->second});
        } else if (auto s = seen.find(r.fingerprint); s != seen.end()) {
            out.dropped.push_back({r.id, "duplicate of " + s->second});
        } else {
            seen.emplace(r.fingerprint, r.id);
            out.kept.push_back(r);
        }
    }
    return out;
}

void annotate(std::vector<DatasetRecord>& records, orchestrator::Agent& agent) {
    for (auto& r : records) {
        if (!r.verified) continue;
        std::vector<orchestrator::ChatMessage> prompt = {
            {"system", "Explain step by step how the given Verilog module works, as reasoning that leads to its code."},
            {"user", "```verilog\n" + r.verilog + "```"}};
        try {
            auto out = agent.sample(prompt, 1, {});
            if (!out.empty()) r.reasoning = out.front();
        } catch (const orchestrator::AgentError&) {
        }
    }
}

json to_json(const DatasetRecord& r) {
    json ports = json::array();
    for (const auto& p : r.manifest) {
        ports.push_back({{"name", p.name},
                         {"direction", p.direction == sim::Direction::input ? "input" : "output"},
                         {"width", p.width}});
    }
    json j = {{"id", r.id},
              {"status", r.verified ? "verified" : "skipped"},
              {"fingerprint", r.fingerprint},
              {"category", r.category ? json(category_name(*r.category)) : json(nullptr)},
              {"ports", ports},
              {"verilog", r.verilog},
              {"reference", r.reference},
              {"reasoning", r.reasoning}};
    if (!r.verified) {
        j["stage"] = r.stage;
        j["reason"] = r.reason;
    }
    return j;
}

json summary_json(const std::vector<DatasetRecord>& records, const std::vector<DroppedRecord>& dropped) {
    std::map<std::string, int> status, stage, category;
    for (const auto& r : records) {
        ++status[r.verified ? "verified" : "skipped"];
        if (!r.verified) ++stage[r.stage];
        if (r.category) ++category[category_name(*r.category)];
    }
    json drops = json::array();
    for (const auto& d : dropped) drops.push_back({{"id", d.id}, {"reason", d.reason}});
    return {{"records", records.size()},
            {"status", status},
            {"skipped_by_stage", stage},
            {"category", category},
            {"filtered", dropped.size()},
            {"dropped", drops}};
}

}  // namespace rtlxv::corpus

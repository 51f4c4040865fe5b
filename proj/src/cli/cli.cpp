#include "rtlxv/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "rtlxv/compile.hpp"
#include "rtlxv/corpus/corpus.hpp"
#include "rtlxv/orchestrator/session.hpp"
#include "rtlxv/pyref/emitter.hpp"
#include "rtlxv/reward/reward.hpp"
#include "rtlxv/sim/interpreter.hpp"
#include "rtlxv/xverify/xverify.hpp"

namespace rtlxv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("cannot write " + path.string());
    o << text;
}

json plan_json(const xverify::StimulusPlan& p) {
    return {{"num_vectors", p.num_vectors}, {"seed", p.seed}, {"reset_cycles", p.reset_cycles}};
}

json ports_json(const std::vector<sim::PortInfo>& ports) {
    json a = json::array();
    for (const auto& p : ports) {
        a.push_back({{"name", p.name}, {"direction", p.direction == sim::Direction::input ? "input" : "output"},
                     {"width", p.width}});
    }
    return a;
}

CompileResult compile_file(const std::string& path, const frontend::ParamValues& params, std::ostream& err) {
    auto r = compile_verilog({read_text(path), path}, params);
    for (const auto& d : r.diagnostics) err << format_diagnostic(d, path) << "\n";
    return r;
}

frontend::ParamValues parse_params(const std::vector<std::string>& kvs) {
    frontend::ParamValues out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects NAME=VALUE, got '" + kv + "'");
        try {
            out[kv.substr(0, eq)] = std::stoll(kv.substr(eq + 1), nullptr, 0);
        } catch (const std::exception&) {
            throw UsageError("bad parameter value in '" + kv + "'");
        }
    }
    return out;
}

// ---- agents file ----

std::vector<std::string> read_listed_files(const std::vector<std::string>& names, const fs::path& base) {
    std::vector<std::string> out;
    for (const auto& n : names) out.push_back(read_text((base / n).string()));
    return out;
}

orchestrator::AgentEndpoint endpoint_from_table(const std::string& section, const std::map<std::string, std::vector<std::string>>& kv,
                                                const fs::path& base) {
    json j;
    j["role"] = section;
    std::map<int, std::vector<std::string>> turns;
    std::vector<std::string> outputs;
    for (const auto& [key, values] : kv) {
        auto scalar = [&]() -> const std::string& {
            if (values.size() != 1) throw std::runtime_error("[" + section + "] " + key + " expects a single value");
            return values.front();
        };
        if (key == "kind" || key == "base_url" || key == "model" || key == "api_key_env") {
            j[key] = scalar();
        } else if (key == "temperature") {
            j[key] = std::stod(scalar());
        } else if (key == "max_tokens" || key == "timeout_seconds") {
            j[key] = std::stoi(scalar());
        } else if (key == "outputs") {
            outputs.insert(outputs.end(), values.begin(), values.end());
        } else if (key == "output_files") {
            auto files = read_listed_files(values, base);
            outputs.insert(outputs.end(), files.begin(), files.end());
        } else if (key.rfind("turn", 0) == 0) {
            const bool files = key.ends_with("_files");
            const std::string num = key.substr(4, key.size() - 4 - (files ? 6 : 0));
            if (num.empty() || !std::all_of(num.begin(), num.end(), ::isdigit)) {
                throw std::runtime_error("[" + section + "] unknown key " + key);
            }
            auto& t = turns[std::stoi(num)];
            auto add = files ? read_listed_files(values, base) : values;
            t.insert(t.end(), add.begin(), add.end());
        } else {
            throw std::runtime_error("[" + section + "] unknown key " + key);
        }
    }
    if (!outputs.empty()) j["outputs"] = outputs;
    if (!turns.empty()) {
        json script = json::array();
        int expect = 0;
        for (const auto& [n, list] : turns) {
            if (n != expect++) throw std::runtime_error("[" + section + "] turn tables must be numbered 0, 1, 2, ...");
            script.push_back(list);
        }
        j["script"] = script;
    }
    try {
        return orchestrator::endpoint_from_json(j);
    } catch (const json::exception& e) {
        throw std::runtime_error("[" + section + "] incomplete agent description: " + std::string(e.what()));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("[" + section + "] " + std::string(e.what()));
    }
}

}  // namespace

AgentsConfig load_agents(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read agents file " + path);
    std::map<std::string, std::map<std::string, std::vector<std::string>>> tables;
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;
        if (item.parents.size() != 1) throw std::runtime_error("agents file: key '" + item.name + "' is outside a table");
        auto& slot = tables[item.parents[0]][item.name];
        slot.insert(slot.end(), item.inputs.begin(), item.inputs.end());
    }
    const fs::path base = fs::path(path).parent_path();
    AgentsConfig cfg;
    bool have_v = false, have_p = false;
    for (const auto& [section, kv] : tables) {
        if (section == "verilog") {
            cfg.verilog = endpoint_from_table(section, kv, base);
            have_v = true;
        } else if (section == "python" || section == "reference") {
            cfg.python = endpoint_from_table(section, kv, base);
            have_p = true;
        } else {
            throw std::runtime_error("agents file: unknown table [" + section + "]");
        }
    }
    if (!have_v || !have_p) throw std::runtime_error("agents file needs both [verilog] and [python] tables");
    return cfg;
}

namespace {

// ---- subcommands ----

struct Globals {
    std::uint64_t stimuli = 1000;
    std::uint64_t seed = 42;
    std::uint64_t reset_cycles = 2;
    unsigned jobs = 1;

    [[nodiscard]] xverify::StimulusPlan plan() const {
        xverify::StimulusPlan p{stimuli, seed, reset_cycles};
        xverify::validate(p);
        return p;
    }
};

int cmd_parse(const std::string& file, bool ir, bool canonical, const std::vector<std::string>& params, std::ostream& out,
              std::ostream& err) {
    auto r = compile_file(file, parse_params(params), err);
    if (!r.ok()) return kExitError;
    if (ir) {
        out << ir::print_design(*r.design, canonical);
    } else {
        auto parsed = frontend::parse_module({read_text(file), file});
        out << frontend::print_module(*parsed.module);
    }
    return kExitOk;
}

int cmd_emit(const std::string& file, const std::string& out_path, const std::string& skeleton_path,
             const std::string& manifest_path, const std::vector<std::string>& params, std::ostream& out, std::ostream& err) {
    auto r = compile_file(file, parse_params(params), err);
    if (!r.ok()) return kExitError;
    auto ref = pyref::emit_reference(*r.design);
    if (out_path.empty()) {
        out << ref.text;
    } else {
        write_text(out_path, ref.text);
    }
    if (!skeleton_path.empty()) write_text(skeleton_path, pyref::emit_skeleton(*r.design));
    if (!manifest_path.empty()) {
        write_text(manifest_path, json{{"class_name", ref.class_name}, {"ports", ports_json(ref.port_manifest)}}.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_simulate(const std::string& file, const std::string& out_path, const std::string& vcd_path,
                 const std::vector<std::string>& params, const Globals& g, std::ostream& out, std::ostream& err) {
    auto r = compile_file(file, parse_params(params), err);
    if (!r.ok()) return kExitError;
    const auto plan = g.plan();
    auto trace = sim::run_trace(*r.design, xverify::gen_stimuli(*r.design, plan));
    const std::string text = json{{"design", r.design->name}, {"plan", plan_json(plan)}, {"ports", ports_json(trace.ports)}}.dump() +
                             "\n" + sim::to_jsonl(trace);
    if (out_path.empty()) {
        out << text;
    } else {
        write_text(out_path, text);
    }
    if (!vcd_path.empty()) write_text(vcd_path, sim::to_vcd(trace, r.design->name));
    return kExitOk;
}

int cmd_xverify(const std::string& dut, const std::string& model, const std::string& out_dir, const Globals& g,
                std::ostream& out) {
    xverify::XverifyOptions opts;
    opts.plan = g.plan();
    auto res = xverify::cross_verify(read_text(dut), read_text(model), std::nullopt, opts);
    const double ratio = res.match_ratio();
    const bool agree = res.report && res.report->items.empty();

    const auto v_reward = reward::aggregate_reward(reward::local_reward(res.verilog), 0, ratio);
    const auto p_reward = reward::aggregate_reward(reward::local_reward(res.python), 0, ratio);
    json report = {{"dut", dut},
                   {"model", model},
                   {"plan", plan_json(opts.plan)},
                   {"match_ratio", ratio},
                   {"verilog", orchestrator::to_json(res.verilog)},
                   {"python", orchestrator::to_json(res.python)},
                   {"reward", {{"verilog", reward::to_json(v_reward)}, {"python", reward::to_json(p_reward)}}}};
    if (res.report) report["report"] = orchestrator::to_json(*res.report);
    std::string diagnostics;
    if (res.report) {
        diagnostics = xverify::render_diagnostics(*res.report);
    } else {
        diagnostics = "Verilog: " + xverify::describe(res.verilog) + "\nPython: " + xverify::describe(res.python);
    }

    out << "match_ratio " << ratio << " (seed " << opts.plan.seed << ", " << opts.plan.num_vectors << " vectors)\n";
    out << "verilog: " << xverify::describe(res.verilog) << "\n";
    out << "python: " << xverify::describe(res.python) << "\n";
    if (!agree) out << diagnostics << "\n";
    if (!out_dir.empty()) {
        write_text(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
        write_text(fs::path(out_dir) / "diagnostics.txt", diagnostics);
    }
    return agree ? kExitOk : kExitMismatch;
}

int cmd_dataset(const std::string& src_dir, const std::string& out_dir, const std::string& bench_dir,
                const std::string& agents_path, const Globals& g, std::ostream& out) {
    corpus::ConvertOptions opts;
    opts.plan = g.plan();
    opts.jobs = g.jobs;
    auto records = corpus::convert_corpus(corpus::load_sources(src_dir), opts);
    std::vector<corpus::DroppedRecord> dropped;
    if (!bench_dir.empty()) {
        auto res = corpus::contamination_filter(records, corpus::load_sources(bench_dir));
        records = std::move(res.kept);
        dropped = std::move(res.dropped);
    }
    if (!agents_path.empty()) {
        auto agent = orchestrator::make_agent(load_agents(agents_path).verilog);
        corpus::annotate(records, *agent);
    }
    std::string lines;
    for (const auto& r : records) {
        json j = corpus::to_json(r);
        j["plan"] = plan_json(opts.plan);
        lines += j.dump() + "\n";
    }
    json summary = corpus::summary_json(records, dropped);
    summary["plan"] = plan_json(opts.plan);
    summary["source_dir"] = src_dir;
    write_text(fs::path(out_dir) / "dataset.jsonl", lines);
    write_text(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    out << summary.dump(2) << "\n";
    return kExitOk;
}

struct OrchestrateArgs {
    std::string agents, problem, design, description, description_file, log;
    int best_of = 3;
    int turns = 3;
    bool no_backtrack = false;
};

int cmd_orchestrate(const OrchestrateArgs& a, const Globals& g, std::ostream& out) {
    orchestrator::Problem problem;
    std::string description = a.description;
    if (!a.description_file.empty()) description = read_text(a.description_file);
    if (!a.problem.empty()) {
        problem = orchestrator::problem_from_json(json::parse(read_text(a.problem)));
        if (!description.empty()) problem.description = description;
    } else if (!a.design.empty()) {
        problem = orchestrator::problem_from_verilog(fs::path(a.design).stem().string(), description, read_text(a.design));
    } else {
        throw UsageError("orchestrate needs --problem or --design");
    }
    auto agents = load_agents(a.agents);
    auto v = orchestrator::make_agent(agents.verilog);
    auto p = orchestrator::make_agent(agents.python);

    orchestrator::SessionConfig cfg;
    cfg.best_of = a.best_of;
    cfg.max_turns = a.turns;
    cfg.backtrack = !a.no_backtrack;
    cfg.plan = g.plan();
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    xverify::XverifyOptions xo;
    xo.plan = cfg.plan;
    orchestrator::XverifyEvaluator ev(problem, xo, g.jobs);
    auto result = orchestrator::run_session(problem, *v, *p, ev, cfg);
    const auto log = orchestrator::session_log_jsonl(result, problem, cfg);
    if (a.log.empty()) {
        out << log;
    } else {
        write_text(a.log, log);
        out << orchestrator::to_json(result).dump() << "\n";
    }
    return result.final_ratio >= 1.0 ? kExitOk : kExitMismatch;
}

struct RewardArgs {
    std::vector<std::string> files;
    std::vector<int> ks{1};
    double local = -1, match = -1;
    int fix = 0;
};

int cmd_reward(const RewardArgs& a, std::ostream& out) {
    json result;
    if (a.local >= 0 || a.match >= 0) {
        if (a.local < 0 || a.match < 0) throw UsageError("--local and --match go together");
        result["aggregate"] = reward::to_json(reward::aggregate_reward(a.local, a.fix, a.match));
    }
    std::map<std::string, std::pair<int, int>> samples;  // problem -> (n, c)
    std::vector<double> v_rewards, p_rewards, finals;
    int sessions = 0, agreements = 0;
    for (const auto& f : a.files) {
        std::istringstream in(read_text(f));
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) throw UsageError(f + ":" + std::to_string(lineno) + ": not a JSON line");
            if (j.contains("verilog_candidates")) {
                for (const auto& c : j["verilog_candidates"]) v_rewards.push_back(c["reward"]["total"].get<double>());
                for (const auto& c : j["python_candidates"]) p_rewards.push_back(c["reward"]["total"].get<double>());
            } else if (j.value("final", false)) {
                ++sessions;
                finals.push_back(j["final_ratio"].get<double>());
                if (j.value("termination", "") == "agreement") ++agreements;
            } else if (j.contains("n") && j.contains("c")) {
                auto& s = samples[j.value("problem", f + ":" + std::to_string(lineno))];
                s.first += j["n"].get<int>();
                s.second += j["c"].get<int>();
            } else if (j.contains("passed")) {
                auto& s = samples[j.at("problem").get<std::string>()];
                s.first += 1;
                s.second += j["passed"].get<bool>() ? 1 : 0;
            } else {
                throw UsageError(f + ":" + std::to_string(lineno) + ": unrecognized record");
            }
        }
    }
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    if (!samples.empty()) {
        json pk = json::object();
        for (int k : a.ks) {
            double sum = 0;
            for (const auto& [id, nc] : samples) {
                if (nc.first < k) throw UsageError("problem " + id + " has " + std::to_string(nc.first) + " samples, fewer than k=" + std::to_string(k));
                sum += reward::pass_at_k(nc.first, nc.second, k);
            }
            pk["pass@" + std::to_string(k)] = sum / static_cast<double>(samples.size());
        }
        result["pass_at_k"] = pk;
        result["problems"] = samples.size();
    }
    if (!v_rewards.empty() || !p_rewards.empty()) {
        result["candidate_rewards"] = {{"verilog", {{"count", v_rewards.size()}, {"mean", mean(v_rewards)}}},
                                       {"python", {{"count", p_rewards.size()}, {"mean", mean(p_rewards)}}}};
    }
    if (sessions > 0) {
        result["sessions"] = {{"count", sessions}, {"agreement", agreements}, {"mean_final_ratio", mean(finals)}};
    }
    if (result.is_null()) throw UsageError("reward-eval: nothing to evaluate");
    out << result.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"RTL cross-verification toolkit", "rtlxv"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    Globals g;
    app.add_option("--stimuli", g.stimuli, "Stimulus vectors per run")->capture_default_str();
    app.add_option("--seed", g.seed, "Stimulus seed")->capture_default_str();
    app.add_option("--reset-cycles", g.reset_cycles, "Leading cycles with reset asserted")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Concurrent workers")->capture_default_str()->check(CLI::Range(1u, 1024u));
    app.fallthrough();

    std::string file, file2, out_path, skeleton_path, manifest_path, vcd_path, out_dir, bench_dir, agents_path;
    std::vector<std::string> params;
    bool ir = false, canonical = false;

    auto* parse = app.add_subcommand("parse", "Print the parsed module or its IR");
    parse->add_option("file", file, "Verilog source")->required()->check(CLI::ExistingFile);
    parse->add_flag("--ir", ir, "Print the lowered IR");
    parse->add_flag("--canonical", canonical, "IR with nets renamed by first use");
    parse->add_option("--param", params, "Parameter override NAME=VALUE");

    auto* emit = app.add_subcommand("emit-py", "Emit the Python reference model");
    emit->add_option("file", file, "Verilog source")->required()->check(CLI::ExistingFile);
    emit->add_option("-o,--output", out_path, "Reference model path (default stdout)");
    emit->add_option("--skeleton", skeleton_path, "Also write the class skeleton here");
    emit->add_option("--manifest", manifest_path, "Also write the port manifest here");
    emit->add_option("--param", params, "Parameter override NAME=VALUE");

    auto* simulate = app.add_subcommand("simulate", "Run a design on seeded stimuli");
    simulate->add_option("file", file, "Verilog source")->required()->check(CLI::ExistingFile);
    simulate->add_option("-o,--output", out_path, "Trace path, JSON lines (default stdout)");
    simulate->add_option("--vcd", vcd_path, "Also write a VCD file");
    simulate->add_option("--param", params, "Parameter override NAME=VALUE");

    auto* xv = app.add_subcommand("xverify", "Compare a Verilog design against a Python reference model");
    xv->add_option("dut", file, "Verilog design")->required()->check(CLI::ExistingFile);
    xv->add_option("model", file2, "Python reference model")->required()->check(CLI::ExistingFile);
    xv->add_option("--out-dir", out_dir, "Write report.json and diagnostics.txt here");

    auto* ds = app.add_subcommand("dataset-gen", "Convert a directory of designs into verified records");
    ds->add_option("src", file, "Directory of .v files")->required()->check(CLI::ExistingDirectory);
    ds->add_option("--out", out_dir, "Output directory")->required();
    ds->add_option("--benchmark", bench_dir, "Benchmark designs to filter against")->check(CLI::ExistingDirectory);
    ds->add_option("--annotate", agents_path, "Agents file; its [verilog] agent writes reasoning traces")
        ->check(CLI::ExistingFile);

    OrchestrateArgs oa;
    auto* orch = app.add_subcommand("orchestrate", "Run a multi-turn session between two agents");
    orch->add_option("--agents", oa.agents, "Agents file")->required()->check(CLI::ExistingFile);
    orch->add_option("--problem", oa.problem, "Problem JSON")->check(CLI::ExistingFile);
    orch->add_option("--design", oa.design, "Golden Verilog defining the interface")->check(CLI::ExistingFile);
    orch->add_option("--description", oa.description, "Problem text");
    orch->add_option("--description-file", oa.description_file, "Problem text file")->check(CLI::ExistingFile);
    orch->add_option("--best-of", oa.best_of, "Candidates per agent per turn")->capture_default_str()->check(CLI::PositiveNumber);
    orch->add_option("--turns", oa.turns, "Maximum turns")->capture_default_str()->check(CLI::PositiveNumber);
    orch->add_flag("--no-backtrack", oa.no_backtrack, "Accept every turn's best pair");
    orch->add_option("--log", oa.log, "Session log path (default stdout)");

    RewardArgs ra;
    auto* rw = app.add_subcommand("reward-eval", "Aggregate rewards, pass@k and session outcomes");
    rw->add_option("files", ra.files, "JSON-lines inputs")->check(CLI::ExistingFile);
    rw->add_option("--k", ra.ks, "k values for pass@k")->delimiter(',')->capture_default_str();
    rw->add_option("--local", ra.local, "Local reward component")->check(CLI::Range(0.0, 1.0));
    rw->add_option("--fix", ra.fix, "Fix bonus (0 or 1)")->check(CLI::Range(0, 1));
    rw->add_option("--match", ra.match, "Match ratio component")->check(CLI::Range(0.0, 1.0));

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kExitError;
    }

    try {
        if (parse->parsed()) return cmd_parse(file, ir, canonical, params, out, err);
        if (emit->parsed()) return cmd_emit(file, out_path, skeleton_path, manifest_path, params, out, err);
        if (simulate->parsed()) return cmd_simulate(file, out_path, vcd_path, params, g, out, err);
        if (xv->parsed()) return cmd_xverify(file, file2, out_dir, g, out);
        if (ds->parsed()) return cmd_dataset(file, out_dir, bench_dir, agents_path, g, out);
        if (orch->parsed()) return cmd_orchestrate(oa, g, out);
        if (rw->parsed()) return cmd_reward(ra, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace rtlxv::cli

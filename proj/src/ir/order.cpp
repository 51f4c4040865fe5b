#include <algorithm>
#include <set>

#include "rtlxv/ir/ir.hpp"

namespace rtlxv::ir {

namespace {

struct Node {
    DriverRef ref;
    int source_order = 0;
    std::set<NetId> writes;
    std::set<NetId> reads;
};

void stmt_reads(const std::vector<Stmt>& body, std::vector<NetId>& out) {
    for (const auto& s : body) {
        switch (s.kind) {
            case StmtKind::assign:
                collect_reads(s.assign.value, out);
                for (const auto& t : s.assign.targets) {
                    if (t.index) collect_reads(*t.index, out);
                }
                break;
            case StmtKind::if_else:
                collect_reads(s.cond, out);
                stmt_reads(s.then_body, out);
                stmt_reads(s.else_body, out);
                break;
            case StmtKind::case_stmt:
                collect_reads(s.cond, out);
                for (const auto& arm : s.arms) {
                    for (const auto& l : arm.labels) collect_reads(l.value, out);
                    stmt_reads(arm.body, out);
                }
                stmt_reads(s.default_body, out);
                break;
        }
    }
}

}  // namespace

OrderResult order_combinational(const Design& d) {
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < d.assigns.size(); ++i) {
        Node n;
        n.ref = {DriverRef::Kind::assign, static_cast<int>(i)};
        n.source_order = d.assigns[i].source_order;
        for (const auto& t : d.assigns[i].assign.targets) n.writes.insert(t.net);
        std::vector<NetId> reads;
        collect_reads(d.assigns[i].assign.value, reads);
        for (const auto& t : d.assigns[i].assign.targets) {
            if (t.index) collect_reads(*t.index, reads);
        }
        n.reads.insert(reads.begin(), reads.end());
        nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < d.comb_procs.size(); ++i) {
        Node n;
        n.ref = {DriverRef::Kind::proc, static_cast<int>(i)};
        n.source_order = d.comb_procs[i].source_order;
        n.writes.insert(d.comb_procs[i].targets.begin(), d.comb_procs[i].targets.end());
        std::vector<NetId> reads;
        stmt_reads(d.comb_procs[i].body, reads);
        // A process may read its own targets after writing them; definite assignment already checked order.
        for (NetId r : reads) {
            if (!n.writes.count(r)) n.reads.insert(r);
        }
        nodes.push_back(std::move(n));
    }
    std::stable_sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.source_order < b.source_order; });

    const std::size_t count = nodes.size();
    std::vector<std::vector<std::size_t>> succ(count);
    std::vector<int> indegree(count, 0);
    for (std::size_t a = 0; a < count; ++a) {
        for (std::size_t b = 0; b < count; ++b) {
            bool depends = false;
            for (NetId w : nodes[a].writes) depends = depends || nodes[b].reads.count(w);
            if (depends) {
                succ[a].push_back(b);
                ++indegree[b];
            }
        }
    }

    OrderResult result;
    std::set<std::size_t> ready;  // node indices are already in source order
    for (std::size_t i = 0; i < count; ++i) {
        if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<bool> done(count, false);
    while (!ready.empty()) {
        std::size_t n = *ready.begin();
        ready.erase(ready.begin());
        done[n] = true;
        result.order.push_back(nodes[n].ref);
        for (std::size_t s : succ[n]) {
            if (--indegree[s] == 0) ready.insert(s);
        }
    }
    if (result.order.size() == count) return result;

    // Drop nodes that merely hang off a cycle until only cycle members remain.
    std::vector<bool> alive(count);
    for (std::size_t i = 0; i < count; ++i) alive[i] = !done[i];
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < count; ++i) {
            if (!alive[i]) continue;
            bool feeds = false;
            for (std::size_t s : succ[i]) feeds = feeds || alive[s];
            if (!feeds) {
                alive[i] = false;
                changed = true;
            }
        }
    }
    std::set<NetId> loop_nets;
    for (std::size_t a = 0; a < count; ++a) {
        if (!alive[a]) continue;
        for (NetId w : nodes[a].writes) {
            for (std::size_t b = 0; b < count; ++b) {
                if (alive[b] && nodes[b].reads.count(w)) loop_nets.insert(w);
            }
        }
    }
    CombLoopError err;
    for (NetId id : loop_nets) err.nets.push_back(d.nets[static_cast<std::size_t>(id)].name);
    result.loop = std::move(err);
    return result;
}

}  // namespace rtlxv::ir

#include "structure.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hpk {

namespace {

struct Analysis {
    const ActivityGraph& g;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> fwd_out;   // node -> forward edge indices
    std::vector<std::vector<std::size_t>> fwd_in;
    std::vector<std::size_t> backedges;              // nondet_repetition edge indices
    std::vector<std::set<std::size_t>> dom;
    std::vector<std::set<std::size_t>> pdom;
    std::size_t initial = SIZE_MAX;
    std::size_t final = SIZE_MAX;

    explicit Analysis(const ActivityGraph& graph) : g(graph) {
        for (std::size_t i = 0; i < g.nodes.size(); ++i) index[g.nodes[i].id] = i;
        fwd_out.resize(g.nodes.size());
        fwd_in.resize(g.nodes.size());
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (g.edges[e].nondet_repetition) {
                backedges.push_back(e);
            } else {
                fwd_out[index.at(g.edges[e].from)].push_back(e);
                fwd_in[index.at(g.edges[e].to)].push_back(e);
            }
        }
    }

    std::size_t target(std::size_t e) const { return index.at(g.edges[e].to); }
    std::size_t source(std::size_t e) const { return index.at(g.edges[e].from); }
};

std::string edge_name(const ActivityGraph& g, std::size_t e) {
    return "edge#" + std::to_string(e) + " (" + g.edges[e].from + " -> " + g.edges[e].to + ")";
}

// Set-based dominator iteration; the graphs here are small.
std::vector<std::set<std::size_t>> dominators(std::size_t n, std::size_t root,
                                              const std::vector<std::vector<std::size_t>>& preds) {
    std::set<std::size_t> all;
    for (std::size_t i = 0; i < n; ++i) all.insert(i);
    std::vector<std::set<std::size_t>> dom(n, all);
    if (root < n) dom[root] = {root};
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == root) continue;
            std::set<std::size_t> meet = preds[i].empty() ? std::set<std::size_t>{} : all;
            for (std::size_t p : preds[i]) {
                std::set<std::size_t> tmp;
                std::set_intersection(meet.begin(), meet.end(), dom[p].begin(), dom[p].end(),
                                      std::inserter(tmp, tmp.begin()));
                meet = std::move(tmp);
            }
            meet.insert(i);
            if (meet != dom[i]) {
                dom[i] = std::move(meet);
                changed = true;
            }
        }
    }
    return dom;
}

bool has_forward_cycle(const Analysis& a) {
    std::vector<int> state(a.g.nodes.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < a.g.nodes.size(); ++s) {
        if (state[s]) continue;
        stack.push_back(s);
        while (!stack.empty()) {
            std::size_t n = stack.back();
            if (state[n] == 0) {
                state[n] = 1;
                for (std::size_t e : a.fwd_out[n]) {
                    std::size_t t = a.target(e);
                    if (state[t] == 1) return true;
                    if (state[t] == 0) stack.push_back(t);
                }
            } else {
                if (state[n] == 1) state[n] = 2;
                stack.pop_back();
            }
        }
    }
    return false;
}

} // namespace

std::string StructureReport::describe() const {
    if (well_structured) return "well-structured";
    std::string out = "not well-structured:";
    for (const auto& v : violations) out += "\n  " + v.where + ": " + v.reason;
    return out;
}

StructureReport validate_well_structured(const ActivityGraph& g) {
    StructureReport report;
    auto bad = [&](const std::string& where, const std::string& reason) {
        report.violations.push_back({where, reason});
    };

    Analysis a(g);
    const std::size_t n = g.nodes.size();
    if (n == 0) {
        bad("graph", "empty graph");
        return report;
    }

    std::size_t initial_count = 0, final_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Node& node = g.nodes[i];
        std::size_t out_deg = a.fwd_out[i].size();
        std::size_t in_deg = a.fwd_in[i].size();
        switch (node.kind) {
        case NodeKind::Initial:
            ++initial_count;
            a.initial = i;
            if (in_deg != 0) bad(node.id, "initial node has incoming edges");
            if (out_deg != 1) bad(node.id, "initial node must have exactly one outgoing edge");
            break;
        case NodeKind::Final:
            ++final_count;
            a.final = i;
            if (out_deg != 0) bad(node.id, "final node has outgoing edges");
            break;
        case NodeKind::Action:
            if (in_deg != 1) bad(node.id, "action node must have exactly one incoming edge");
            if (out_deg != 1) bad(node.id, "action node must have exactly one outgoing edge");
            break;
        case NodeKind::Decision:
            if (out_deg == 0) bad(node.id, "decision node has no outgoing edges");
            break;
        case NodeKind::Merge:
            if (out_deg > 1) bad(node.id, "merge node must have at most one outgoing edge");
            if (in_deg == 0) bad(node.id, "merge node has no incoming edges");
            break;
        }
    }
    if (initial_count != 1) bad("graph", initial_count == 0 ? "no initial node" : "multiple initial nodes");
    if (final_count != 1) bad("graph", final_count == 0 ? "no final node" : "multiple final nodes");

    for (std::size_t e : a.backedges) {
        const Edge& edge = g.edges[e];
        const Node* from = g.find_node(edge.from);
        const Node* to = g.find_node(edge.to);
        if (!from || from->kind != NodeKind::Merge)
            bad(edge_name(g, e), "repetition edge must start at a merge node");
        if (!to || to->kind != NodeKind::Decision)
            bad(edge_name(g, e), "repetition edge must end at a decision node");
        if (edge.guard) bad(edge_name(g, e), "repetition edge must not carry a guard");
    }
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (!g.edges[e].nondet_repetition && g.edges[e].loop_invariant)
            bad(edge_name(g, e), "loop invariant on a non-repetition edge");
    }

    if (has_forward_cycle(a)) bad("graph", "cycle without a repetition edge");

    if (!report.violations.empty()) return report;

    // Reachability in both directions.
    auto reach_from = [&](std::size_t root, const std::vector<std::vector<std::size_t>>& out,
                          bool forward) {
        std::set<std::size_t> seen{root};
        std::vector<std::size_t> work{root};
        while (!work.empty()) {
            std::size_t cur = work.back();
            work.pop_back();
            for (std::size_t e : out[cur]) {
                std::size_t nxt = forward ? a.target(e) : a.source(e);
                if (seen.insert(nxt).second) work.push_back(nxt);
            }
        }
        return seen;
    };
    auto reachable = reach_from(a.initial, a.fwd_out, true);
    auto coreachable = reach_from(a.final, a.fwd_in, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (!reachable.count(i)) bad(g.nodes[i].id, "unreachable from the initial node");
        else if (!coreachable.count(i)) bad(g.nodes[i].id, "cannot reach the final node");
    }
    if (!report.violations.empty()) return report;

    std::vector<std::vector<std::size_t>> preds(n), succs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e : a.fwd_in[i]) preds[i].push_back(a.source(e));
        for (std::size_t e : a.fwd_out[i]) succs[i].push_back(a.target(e));
    }
    a.dom = dominators(n, a.initial, preds);
    a.pdom = dominators(n, a.final, succs);

    // Immediate postdominator: the strict postdominator closest to the node,
    // i.e. the one every other strict postdominator postdominates (largest
    // postdominator set).
    auto ipdom = [&](std::size_t i) -> std::size_t {
        std::size_t best = SIZE_MAX;
        std::size_t best_size = 0;
        for (std::size_t c : a.pdom[i]) {
            if (c == i) continue;
            if (a.pdom[c].size() > best_size) {
                best = c;
                best_size = a.pdom[c].size();
            }
        }
        return best;
    };
    auto idom = [&](std::size_t i) -> std::size_t {
        std::size_t best = SIZE_MAX;
        std::size_t best_size = 0;
        for (std::size_t c : a.dom[i]) {
            if (c == i) continue;
            if (a.dom[c].size() > best_size) {
                best = c;
                best_size = a.dom[c].size();
            }
        }
        return best;
    };

    std::map<std::size_t, std::size_t> decision_merge; // node index -> node index
    std::set<std::size_t> used_merges;

    // Loop pairs are identified by their repetition edge.
    std::set<std::size_t> loop_decisions;
    for (std::size_t e : a.backedges) {
        std::size_t m = a.index.at(g.edges[e].from);
        std::size_t d = a.index.at(g.edges[e].to);
        if (loop_decisions.count(d)) {
            bad(g.nodes[d].id, "decision node has multiple repetition edges");
            continue;
        }
        if (used_merges.count(m)) {
            bad(g.nodes[m].id, "merge node belongs to multiple pairs");
            continue;
        }
        if (!a.dom[m].count(d)) {
            bad(g.nodes[d].id, "unstructured jump: paths enter the loop body of '" + g.nodes[d].id +
                                   "' without passing its decision");
            continue;
        }
        if (!a.pdom[d].count(m)) {
            bad(g.nodes[d].id, "unstructured jump: paths from decision '" + g.nodes[d].id +
                                   "' escape past its merge '" + g.nodes[m].id + "'");
            continue;
        }
        loop_decisions.insert(d);
        used_merges.insert(m);
        decision_merge[d] = m;

        LoopPair pair{g.nodes[d].id, g.nodes[m].id, e, false};
        std::size_t skip_count = 0;
        bool body_edges = false;
        for (std::size_t oe : a.fwd_out[d]) {
            if (a.target(oe) == m) {
                if (g.edges[oe].guard) bad(edge_name(g, oe), "guarded skip edge on a loop");
                ++skip_count;
            } else {
                body_edges = true;
            }
        }
        if (skip_count > 1) bad(g.nodes[d].id, "multiple skip edges on a loop");
        if (!body_edges) bad(g.nodes[d].id, "loop has no body");
        pair.has_skip_edge = skip_count >= 1;
        report.loop_pairs.push_back(pair);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (g.nodes[i].kind != NodeKind::Decision || loop_decisions.count(i)) continue;
        if (a.fwd_out[i].size() < 2) {
            bad(g.nodes[i].id, "decision node with a single branch and no repetition edge");
            continue;
        }
        std::size_t m = ipdom(i);
        if (m == SIZE_MAX || g.nodes[m].kind != NodeKind::Merge) {
            bad(g.nodes[i].id, "decision node has no matching merge");
            continue;
        }
        if (idom(m) != i) {
            bad(g.nodes[i].id,
                "ambiguous decision/merge pairing with '" + g.nodes[m].id + "'");
            continue;
        }
        if (used_merges.count(m)) {
            bad(g.nodes[m].id, "merge node belongs to multiple pairs");
            continue;
        }
        used_merges.insert(m);
        decision_merge[i] = m;
        report.branch_pairs.push_back({g.nodes[i].id, g.nodes[m].id});
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (g.nodes[i].kind == NodeKind::Merge && !used_merges.count(i))
            bad(g.nodes[i].id, "merge node without a matching decision");
    }

    // Region containment: everything strictly between a decision and its
    // merge must be dominated by the decision and postdominated by the merge.
    for (const auto& [d, m] : decision_merge) {
        std::set<std::size_t> region;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == d || i == m) continue;
            if (a.dom[i].count(d) && a.pdom[i].count(m)) region.insert(i);
        }
        std::set<std::size_t> frontier = region;
        frontier.insert(d);
        for (std::size_t node : frontier) {
            for (std::size_t e : a.fwd_out[node]) {
                std::size_t t = a.target(e);
                if (t != m && !region.count(t)) {
                    bad(edge_name(g, e),
                        "unstructured jump escaping the region between '" + g.nodes[d].id +
                            "' and '" + g.nodes[m].id + "'");
                }
            }
        }
    }

    report.well_structured = report.violations.empty();
    return report;
}

} // namespace hpk

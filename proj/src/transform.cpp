#include "transform.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hpk {

namespace {

ProgramPtr fold_chop(const std::vector<ProgramPtr>& items) {
    ProgramPtr acc = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) acc = chop(acc, items[i]);
    return acc;
}

ProgramPtr fold_choice(const std::vector<ProgramPtr>& items) {
    ProgramPtr acc = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) acc = choice(items[i], acc);
    return acc;
}

ProgramPtr action_program(const Node& n) {
    if (n.stereotype == Stereotype::Placeholder) return placeholder(n.label);
    return n.body;
}

// Structured rewriting. Pairing comes from the validation report; the walk
// follows single-successor chains and recurses into decision/merge regions.
class StructuredBuilder {
public:
    StructuredBuilder(const ActivityGraph& g, const StructureReport& report) : g_(g) {
        for (const auto& p : report.loop_pairs) loops_[p.decision] = p;
        for (const auto& p : report.branch_pairs) merges_[p.decision] = p.merge;
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            if (!g.edges[e].nondet_repetition) out_[g.edges[e].from].push_back(e);
        }
    }

    ProgramPtr build() {
        const Node* initial = nullptr;
        const Node* final_node = nullptr;
        for (const auto& n : g_.nodes) {
            if (n.kind == NodeKind::Initial) initial = &n;
            if (n.kind == NodeKind::Final) final_node = &n;
        }
        const Edge& first = g_.edges[out_.at(initial->id).front()];
        std::vector<ProgramPtr> items;
        if (first.guard) items.push_back(quest(first.guard));
        append_region(items, first.to, final_node->id);
        if (items.empty()) return quest(btrue());
        return fold_chop(items);
    }

    // Star nodes created for loop pairs, with the invariant from their
    // repetition edge.
    const std::vector<std::pair<ProgramPtr, FormulaPtr>>& star_invariants() const {
        return star_invariants_;
    }

private:
    const ActivityGraph& g_;
    std::map<std::string, LoopPair> loops_;
    std::map<std::string, std::string> merges_;
    std::map<std::string, std::vector<std::size_t>> out_;
    std::vector<std::pair<ProgramPtr, FormulaPtr>> star_invariants_;

    void append_region(std::vector<ProgramPtr>& items, std::string current,
                       const std::string& stop) {
        while (current != stop) {
            const Node* n = g_.find_node(current);
            if (n->kind == NodeKind::Action) {
                items.push_back(action_program(*n));
                const Edge& e = g_.edges[out_.at(current).front()];
                if (e.guard) items.push_back(quest(e.guard));
                current = e.to;
            } else if (n->kind == NodeKind::Decision) {
                std::string merge;
                items.push_back(build_decision(*n, merge));
                if (merge == stop) return;
                const Edge& e = g_.edges[out_.at(merge).front()];
                if (e.guard) items.push_back(quest(e.guard));
                current = e.to;
            } else {
                throw Error(ErrorCode::MalformedGraph,
                            "internal: unexpected node '" + current + "' in region walk");
            }
        }
    }

    struct Branch {
        FormulaPtr guard;           // guard on the decision's outgoing edge
        std::vector<ProgramPtr> body; // empty for a bare edge to the merge
        std::size_t order = 0;        // declaration index of the entry node
    };

    ProgramPtr branch_program(const Branch& b, bool guard_as_test) const {
        std::vector<ProgramPtr> items;
        if (guard_as_test && b.guard) items.push_back(quest(b.guard));
        items.insert(items.end(), b.body.begin(), b.body.end());
        if (items.empty()) return quest(btrue());
        return fold_chop(items);
    }

    ProgramPtr build_decision(const Node& d, std::string& merge_out) {
        auto loop_it = loops_.find(d.id);
        bool is_loop = loop_it != loops_.end();
        const std::string merge = is_loop ? loop_it->second.merge : merges_.at(d.id);
        merge_out = merge;

        std::vector<Branch> branches;
        for (std::size_t e : out_.at(d.id)) {
            const Edge& edge = g_.edges[e];
            if (is_loop && edge.to == merge && !edge.guard) continue; // skip edge
            Branch b;
            b.guard = edge.guard;
            std::size_t idx = 0;
            for (std::size_t i = 0; i < g_.nodes.size(); ++i)
                if (g_.nodes[i].id == edge.to) idx = i;
            b.order = idx;
            if (edge.to != merge) append_region(b.body, edge.to, merge);
            branches.push_back(std::move(b));
        }
        std::stable_sort(branches.begin(), branches.end(),
                         [](const Branch& a, const Branch& b) { return a.order < b.order; });

        if (is_loop) {
            std::vector<ProgramPtr> bodies;
            for (const auto& b : branches) bodies.push_back(branch_program(b, true));
            ProgramPtr body = fold_choice(bodies);
            ProgramPtr loop = star(body);
            if (g_.edges[loop_it->second.backedge].loop_invariant)
                star_invariants_.push_back({loop, g_.edges[loop_it->second.backedge].loop_invariant});
            if (loop_it->second.has_skip_edge) return loop;
            return chop(body, loop); // back edge without skip: at least one round
        }

        // if-fi: one guarded branch with statements, bypassed by a bare edge
        // carrying the syntactic negation of the guard.
        if (branches.size() == 2) {
            for (int i = 0; i < 2; ++i) {
                const Branch& act = branches[i];
                const Branch& bypass = branches[1 - i];
                if (act.body.empty() || !bypass.body.empty()) continue;
                if (!act.guard || !bypass.guard) continue;
                if (equal(bypass.guard, lnot(act.guard)) || equal(act.guard, lnot(bypass.guard)))
                    return if_then_else(act.guard, branch_program(act, false), nullptr);
            }
            // if-else: two statement branches with mutually negated guards.
            if (!branches[0].body.empty() && !branches[1].body.empty() &&
                branches[0].guard && branches[1].guard) {
                for (int i = 0; i < 2; ++i) {
                    if (equal(branches[1 - i].guard, lnot(branches[i].guard)))
                        return if_then_else(branches[i].guard, branch_program(branches[i], false),
                                            branch_program(branches[1 - i], false));
                }
            }
        }

        std::vector<ProgramPtr> programs;
        for (const auto& b : branches) programs.push_back(branch_program(b, true));
        return fold_choice(programs);
    }
};

} // namespace

Model to_hybrid_program(const ActivityGraph& g) {
    StructureReport report = validate_well_structured(g);
    if (!report.well_structured) throw NotWellStructuredError(std::move(report));

    StructuredBuilder builder(g, report);
    Model m;
    m.name = g.name;
    m.variables = g.variables;
    m.constants = g.constants;
    m.init = g.init;
    m.program = builder.build();
    m.safety = graph_contains_placeholder(g) ? land(g.safety, bfalse()) : g.safety;

    auto order = stars_preorder(m.program);
    for (const auto& [node, invariant] : builder.star_invariants()) {
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (order[i] == node) {
                m.loop_invariants[i] = invariant;
                break;
            }
        }
    }
    return m;
}

std::string embedding_location_var(const ActivityGraph& g) {
    std::set<std::string> taken(g.variables.begin(), g.variables.end());
    taken.insert(g.constants.begin(), g.constants.end());
    if (!taken.count("s")) return "s";
    for (int i = 1;; ++i) {
        std::string candidate = "s" + std::to_string(i);
        if (!taken.count(candidate)) return candidate;
    }
}

std::map<std::string, int> embedding_location_ids(const ActivityGraph& g) {
    std::map<std::string, int> ids;
    int next = 1;
    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::Initial) continue;
        ids[n.id] = next++;
    }
    return ids;
}

Model to_automaton_embedding(const ActivityGraph& g) {
    const Node* initial = nullptr;
    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::Initial) {
            if (initial)
                throw Error(ErrorCode::MalformedGraph, "multiple initial nodes");
            initial = &n;
        }
    }
    if (!initial) throw Error(ErrorCode::MalformedGraph, "graph has no initial node");

    auto ids = embedding_location_ids(g);
    const std::string loc = embedding_location_var(g);
    const int sink_id = (int)ids.size() + 1;

    std::map<std::string, std::vector<const Edge*>> out;
    for (const auto& e : g.edges) out[e.from].push_back(&e);

    auto initial_out = out.find(initial->id);
    if (initial_out == out.end() || initial_out->second.size() != 1)
        throw Error(ErrorCode::MalformedGraph,
                    "initial node must have exactly one outgoing edge");

    // One transition per outgoing edge: optional guard test, then the
    // location update.
    auto target_id = [&](const Edge& e) {
        auto it = ids.find(e.to);
        if (it == ids.end())
            throw Error(ErrorCode::MalformedGraph, "edge into the initial node '" + e.to + "'");
        return it->second;
    };
    auto transition = [&](const Edge& e) {
        std::vector<ProgramPtr> items;
        if (e.guard) items.push_back(quest(e.guard));
        items.push_back(assign(loc, num(target_id(e))));
        return fold_chop(items);
    };

    std::vector<ProgramPtr> blocks;
    for (const auto& n : g.nodes) {
        if (n.kind == NodeKind::Initial || n.kind == NodeKind::Final) continue;
        std::vector<ProgramPtr> items;
        items.push_back(quest(cmp(CompareOp::Eq, var(loc), num(ids.at(n.id)))));
        if (n.kind == NodeKind::Action) items.push_back(action_program(n));
        auto it = out.find(n.id);
        if (it == out.end() || it->second.empty()) {
            items.push_back(assign(loc, num(sink_id)));
        } else if (it->second.size() == 1) {
            items.push_back(transition(*it->second.front()));
        } else {
            std::vector<ProgramPtr> alts;
            for (const Edge* e : it->second) alts.push_back(transition(*e));
            items.push_back(fold_choice(alts));
        }
        blocks.push_back(fold_chop(items));
    }

    std::vector<ProgramPtr> top;
    const Edge& first = *initial_out->second.front();
    if (first.guard) top.push_back(quest(first.guard));
    top.push_back(assign(loc, num(target_id(first))));
    if (!blocks.empty()) top.push_back(star(fold_choice(blocks)));

    Model m;
    m.name = g.name;
    m.variables = g.variables;
    m.variables.push_back(loc);
    m.constants = g.constants;
    m.init = g.init;
    m.program = fold_chop(top);
    m.safety = graph_contains_placeholder(g) ? land(g.safety, bfalse()) : g.safety;
    return m;
}

} // namespace hpk

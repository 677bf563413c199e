#include "graph.hpp"

namespace hpk {

const Node* ActivityGraph::find_node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

std::vector<std::size_t> ActivityGraph::out_edges(const std::string& id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].from == id) out.push_back(i);
    return out;
}

std::vector<std::size_t> ActivityGraph::in_edges(const std::string& id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].to == id) out.push_back(i);
    return out;
}

bool equal(const Node& a, const Node& b) {
    if (a.id != b.id || a.kind != b.kind || a.stereotype != b.stereotype || a.label != b.label)
        return false;
    if ((a.body == nullptr) != (b.body == nullptr)) return false;
    if (a.body && !equal(a.body, b.body)) return false;
    if ((a.diff_invariant == nullptr) != (b.diff_invariant == nullptr)) return false;
    if (a.diff_invariant && !equal(a.diff_invariant, b.diff_invariant)) return false;
    return true;
}

bool equal(const Edge& a, const Edge& b) {
    if (a.from != b.from || a.to != b.to || a.nondet_repetition != b.nondet_repetition)
        return false;
    if ((a.guard == nullptr) != (b.guard == nullptr)) return false;
    if (a.guard && !equal(a.guard, b.guard)) return false;
    if ((a.loop_invariant == nullptr) != (b.loop_invariant == nullptr)) return false;
    if (a.loop_invariant && !equal(a.loop_invariant, b.loop_invariant)) return false;
    return true;
}

bool equal(const ActivityGraph& a, const ActivityGraph& b) {
    if (a.name != b.name || a.variables != b.variables || a.constants != b.constants)
        return false;
    if (!equal(a.init, b.init) || !equal(a.safety, b.safety)) return false;
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
        if (!equal(a.nodes[i], b.nodes[i])) return false;
    for (std::size_t i = 0; i < a.edges.size(); ++i)
        if (!equal(a.edges[i], b.edges[i])) return false;
    return true;
}

namespace {

// Splits a right- or left-nested chop spine into its atomic statements.
void flatten_chop(const ProgramPtr& p, std::vector<ProgramPtr>& out) {
    if (auto* c = std::get_if<HybridProgram::Chop>(&p->node)) {
        flatten_chop(c->first, out);
        flatten_chop(c->second, out);
    } else {
        out.push_back(p);
    }
}

} // namespace

std::string check_action_body(Stereotype st, const ProgramPtr& body) {
    using HP = HybridProgram;
    if (st == Stereotype::Placeholder) return "";
    if (!body) return "action body missing";
    std::vector<ProgramPtr> parts;
    flatten_chop(body, parts);
    switch (st) {
    case Stereotype::AssignAny:
        if (parts.size() != 1 || !std::holds_alternative<HP::AssignAny>(parts[0]->node))
            return "AssignAny body must be a single nondeterministic assignment";
        return "";
    case Stereotype::AssignTerm:
        if (parts.size() != 1 || !std::holds_alternative<HP::Assign>(parts[0]->node))
            return "AssignTerm body must be a single assignment";
        return "";
    case Stereotype::Dynamics: {
        for (std::size_t i = 0; i + 1 < parts.size(); ++i)
            if (!std::holds_alternative<HP::Assign>(parts[i]->node))
                return "Dynamics body must be assignments followed by one continuous evolution";
        if (parts.empty() || !std::holds_alternative<HP::ContinuousEvolution>(parts.back()->node))
            return "Dynamics body must end in a continuous evolution";
        return "";
    }
    case Stereotype::Placeholder:
        return "";
    }
    return "";
}

bool graph_contains_placeholder(const ActivityGraph& g) {
    for (const auto& n : g.nodes)
        if (n.stereotype == Stereotype::Placeholder) return true;
    return false;
}

} // namespace hpk

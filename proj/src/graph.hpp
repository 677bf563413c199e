#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ast.hpp"

namespace hpk {

enum class NodeKind { Initial, Final, Decision, Merge, Action };
enum class Stereotype { AssignAny, AssignTerm, Dynamics, Placeholder };

// Activity-graph node. Action bodies are restricted at parse/construction
// time: AssignAny holds a single AssignAny, AssignTerm a single Assign,
// Dynamics zero or more Assigns followed by one ContinuousEvolution.
struct Node {
    std::string id;
    NodeKind kind = NodeKind::Action;
    std::optional<Stereotype> stereotype;        // Action only
    ProgramPtr body;                             // Action only (except Placeholder)
    FormulaPtr diff_invariant;                   // Dynamics only, optional
    std::string label;                           // Placeholder only
};

struct Edge {
    std::string from;
    std::string to;
    FormulaPtr guard;                            // optional
    bool nondet_repetition = false;
    FormulaPtr loop_invariant;                   // only on nondet_repetition edges
};

struct ActivityGraph {
    std::string name;
    std::vector<std::string> variables;
    std::vector<std::string> constants;
    FormulaPtr init;
    FormulaPtr safety;
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    const Node* find_node(const std::string& id) const;
    std::vector<std::size_t> out_edges(const std::string& id) const;
    std::vector<std::size_t> in_edges(const std::string& id) const;
};

bool equal(const Node& a, const Node& b);
bool equal(const Edge& a, const Edge& b);
bool equal(const ActivityGraph& a, const ActivityGraph& b);

// Body-shape discipline for stereotyped actions; returns a problem
// description or empty string when the body fits the stereotype.
std::string check_action_body(Stereotype st, const ProgramPtr& body);

bool graph_contains_placeholder(const ActivityGraph& g);

} // namespace hpk

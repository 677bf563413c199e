#pragma once

#include <string>

#include "ast.hpp"
#include "graph.hpp"

namespace hpk {

// Canonical concrete syntax with minimal parentheses. Deterministic, and
// guaranteed to re-parse to a structurally equal tree.
std::string pretty_print(const TermPtr& t);
std::string pretty_print(const FormulaPtr& f);
std::string pretty_print(const ProgramPtr& p);
std::string pretty_print(const Model& m);
std::string pretty_print(const ActivityGraph& g);

std::string pretty_print(const Node& n);
std::string pretty_print(const Edge& e);

// Shortest decimal representation that round-trips to the same double.
std::string format_number(double value);

} // namespace hpk

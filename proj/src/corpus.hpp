#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ast.hpp"
#include "graph.hpp"
#include "simulate.hpp"

namespace hpk {

// Bundled example models, available both as constructed ASTs and as text
// files under models/.
struct CorpusEntry {
    std::string name;
    std::optional<Model> model;
    std::optional<ActivityGraph> graph;
    Box parameter_box;   // initial-state sampling intervals
    std::string description;
    std::string filename;
};

const std::vector<std::string>& corpus_names();
CorpusEntry get_model(const std::string& name); // throws UnknownName

// Building blocks shared between the one-dimensional robot variants and
// their equivalence tests.
FormulaPtr swd1d_safe_arithmetic();  // orientation folded into the arithmetic
FormulaPtr swd1d_safe_disjunction(); // orientation split by disjunction
ProgramPtr swd1d_turn_by_choice();   // explicit flip-or-keep branches
ProgramPtr swd1d_turn_by_arithmetic(); // o := *; ?o*o = 1

} // namespace hpk

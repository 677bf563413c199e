#pragma once

#include <string_view>

#include "ast.hpp"
#include "graph.hpp"

namespace hpk {

// Whitespace-insensitive concrete syntax with // line comments. Parse errors
// raise Error(Syntax/UndeclaredVariable/ConstantWritten/...) carrying a
// source span inside the input bounds. Parsing is pure: the same text always
// yields a structurally equal tree.
Model parse_model(std::string_view text);
ActivityGraph parse_activity_graph(std::string_view text);

TermPtr parse_term(std::string_view text);
FormulaPtr parse_formula(std::string_view text);
ProgramPtr parse_program(std::string_view text);

enum class InputKind { ModelFile, GraphFile, Unknown };

// Looks at the leading keyword (`model` / `graph`) to tell the two file
// formats apart.
InputKind sniff_input_kind(std::string_view text);

} // namespace hpk

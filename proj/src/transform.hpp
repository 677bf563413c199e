#pragma once

#include "ast.hpp"
#include "graph.hpp"
#include "structure.hpp"

namespace hpk {

class NotWellStructuredError : public Error {
public:
    explicit NotWellStructuredError(StructureReport report)
        : Error(ErrorCode::NotWellStructured, report.describe()), report_(std::move(report)) {}
    const StructureReport& report() const { return report_; }

private:
    StructureReport report_;
};

// Structured transformation of a well-structured activity graph into a
// hybrid program: edges become sequential composition, guards become tests,
// decision/merge pairs become repetition, if(-else) or nondeterministic
// choice. Placeholder actions lower to placeholder statements and make the
// safety condition unsatisfiable (safety & false).
Model to_hybrid_program(const ActivityGraph& g);

// Automaton embedding: every non-initial node becomes a location guarded by
// a test on a fresh location variable, control flow becomes location
// updates, and the whole system is one repetition over the choice of
// location blocks. The final location contributes no block. Works for
// graphs that are not well-structured.
Model to_automaton_embedding(const ActivityGraph& g);

// The location variable chosen for the embedding of g ("s" unless taken).
std::string embedding_location_var(const ActivityGraph& g);

// Location ids: consecutive integers from 1 over non-initial nodes in
// declaration order.
std::map<std::string, int> embedding_location_ids(const ActivityGraph& g);

} // namespace hpk

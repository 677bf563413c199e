#pragma once

#include <string>
#include <vector>

#include "graph.hpp"

namespace hpk {

struct Violation {
    std::string where;   // node id or "edge#k (a -> b)"
    std::string reason;
};

struct LoopPair {
    std::string decision;
    std::string merge;
    std::size_t backedge;       // index into graph.edges
    bool has_skip_edge = false; // direct unguarded decision -> merge edge
};

struct BranchPair {
    std::string decision;
    std::string merge;
};

// well_structured is true exactly when violations is empty.
struct StructureReport {
    bool well_structured = false;
    std::vector<Violation> violations;
    std::vector<LoopPair> loop_pairs;
    std::vector<BranchPair> branch_pairs;

    std::string describe() const;
};

// Checks the nesting discipline required by the structured transformation:
// unique initial/final, action nodes with in/out degree one, every decision
// paired with a unique merge (dominator/postdominator matching), back edges
// only as repetition edges from a merge to its paired decision, and no jumps
// escaping a decision/merge region.
StructureReport validate_well_structured(const ActivityGraph& g);

} // namespace hpk

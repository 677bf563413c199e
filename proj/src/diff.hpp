#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ast.hpp"
#include "graph.hpp"

namespace hpk {

enum class DiffKind { Add, Remove, Modify };

struct PathStep {
    int index;
    std::string kind;
};

struct DiffEntry {
    DiffKind kind;
    std::vector<PathStep> path;
    std::string element_kind;
    std::optional<std::string> before; // Remove/Modify
    std::optional<std::string> after;  // Add/Modify
};

// Positional structural comparison: nodes of the same kind at the same path
// align, a changed leaf is one Modify, a kind mismatch removes and adds the
// whole subtree. Graph node lists align by node id, edges by
// (from, to, guard) key. Ordered by path; empty exactly when the inputs are
// structurally equal.
std::vector<DiffEntry> diff_trees(const Model& a, const Model& b);
std::vector<DiffEntry> diff_trees(const ActivityGraph& a, const ActivityGraph& b);

std::string path_to_string(const std::vector<PathStep>& path);

// Human-readable or TSV (kind<TAB>path<TAB>element_kind<TAB>before<TAB>after)
// report.
std::string render_diff(const std::vector<DiffEntry>& entries, bool tsv);

} // namespace hpk

#include "diff.hpp"

#include <algorithm>

#include "printer.hpp"

namespace hpk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

// Uniform comparison view. Leaves carry their print as content; interior
// nodes carry a label (e.g. an if condition) compared the same way.
struct DNode {
    std::string kind;
    std::string content;
    std::string print;
    std::vector<DNode> children;
    bool by_key = false; // children matched by key instead of position
    std::string key;
};

DNode view_program(const ProgramPtr& p) {
    using HP = HybridProgram;
    DNode n;
    n.print = pretty_print(p);
    std::visit(overloaded{
                   [&](const HP::Chop& c) {
                       n.kind = "Chop";
                       n.children.push_back(view_program(c.first));
                       n.children.push_back(view_program(c.second));
                   },
                   [&](const HP::Choice& c) {
                       n.kind = "Choice";
                       n.children.push_back(view_program(c.left));
                       n.children.push_back(view_program(c.right));
                   },
                   [&](const HP::Star& s) {
                       n.kind = "Star";
                       n.children.push_back(view_program(s.body));
                   },
                   [&](const HP::IfThenElse& i) {
                       n.kind = "IfThenElse";
                       n.content = pretty_print(i.cond);
                       n.children.push_back(view_program(i.then_branch));
                       if (i.else_branch) n.children.push_back(view_program(i.else_branch));
                   },
                   [&](const HP::WhileSym& w) {
                       n.kind = "WhileSym";
                       n.content = pretty_print(w.cond);
                       n.children.push_back(view_program(w.body));
                   },
                   [&](const HP::Assign&) { n.kind = "Assign"; n.content = n.print; },
                   [&](const HP::AssignAny&) { n.kind = "AssignAny"; n.content = n.print; },
                   [&](const HP::ContinuousEvolution&) {
                       n.kind = "ContinuousEvolution";
                       n.content = n.print;
                   },
                   [&](const HP::Quest&) { n.kind = "Quest"; n.content = n.print; },
                   [&](const HP::Placeholder&) { n.kind = "Placeholder"; n.content = n.print; },
               },
               p->node);
    return n;
}

DNode leaf(std::string kind, std::string content) {
    DNode n;
    n.kind = std::move(kind);
    n.content = std::move(content);
    n.print = n.content;
    return n;
}

DNode name_list_node(const char* list_kind, const char* item_kind,
                     const std::vector<std::string>& names) {
    DNode n;
    n.kind = list_kind;
    n.print = list_kind;
    for (const auto& name : names) n.children.push_back(leaf(item_kind, name));
    return n;
}

DNode view_model(const Model& m) {
    DNode root;
    root.kind = "Model";
    root.print = pretty_print(m);
    root.children.push_back(leaf("Name", m.name));
    root.children.push_back(name_list_node("Variables", "Variable", m.variables));
    root.children.push_back(name_list_node("Constants", "Constant", m.constants));
    root.children.push_back(leaf("Init", pretty_print(m.init)));
    root.children.push_back(view_program(m.program));
    root.children.push_back(leaf("Safety", pretty_print(m.safety)));
    DNode invariants;
    invariants.kind = "Invariants";
    invariants.print = "Invariants";
    for (const auto& [idx, f] : m.loop_invariants)
        invariants.children.push_back(
            leaf("Invariant", std::to_string(idx) + ": " + pretty_print(f)));
    root.children.push_back(std::move(invariants));
    return root;
}

DNode view_graph(const ActivityGraph& g) {
    DNode root;
    root.kind = "ActivityGraph";
    root.print = pretty_print(g);
    root.children.push_back(leaf("Name", g.name));
    root.children.push_back(name_list_node("Variables", "Variable", g.variables));
    root.children.push_back(name_list_node("Constants", "Constant", g.constants));
    root.children.push_back(leaf("Init", pretty_print(g.init)));
    root.children.push_back(leaf("Safety", pretty_print(g.safety)));

    DNode nodes;
    nodes.kind = "Nodes";
    nodes.print = "Nodes";
    nodes.by_key = true;
    for (const auto& n : g.nodes) {
        DNode d = leaf("Node", pretty_print(n));
        d.key = n.id;
        nodes.children.push_back(std::move(d));
    }
    root.children.push_back(std::move(nodes));

    DNode edges;
    edges.kind = "Edges";
    edges.print = "Edges";
    edges.by_key = true;
    for (const auto& e : g.edges) {
        DNode d = leaf("Edge", pretty_print(e));
        d.key = e.from + " -> " + e.to + (e.guard ? " [" + pretty_print(e.guard) + "]" : "");
        edges.children.push_back(std::move(d));
    }
    root.children.push_back(std::move(edges));
    return root;
}

class Differ {
public:
    std::vector<DiffEntry> run(const DNode& a, const DNode& b) {
        compare(a, b, {});
        std::stable_sort(entries_.begin(), entries_.end(), [](const DiffEntry& x, const DiffEntry& y) {
            std::size_t n = std::min(x.path.size(), y.path.size());
            for (std::size_t i = 0; i < n; ++i) {
                if (x.path[i].index != y.path[i].index) return x.path[i].index < y.path[i].index;
            }
            if (x.path.size() != y.path.size()) return x.path.size() < y.path.size();
            auto rank = [](DiffKind k) { return k == DiffKind::Remove ? 0 : k == DiffKind::Add ? 1 : 2; };
            return rank(x.kind) < rank(y.kind);
        });
        return std::move(entries_);
    }

private:
    std::vector<DiffEntry> entries_;

    void emit(DiffKind kind, std::vector<PathStep> path, const std::string& element,
              std::optional<std::string> before, std::optional<std::string> after) {
        entries_.push_back({kind, std::move(path), element, std::move(before), std::move(after)});
    }

    void compare(const DNode& a, const DNode& b, std::vector<PathStep> path) {
        if (a.content != b.content)
            emit(DiffKind::Modify, path, a.kind, a.content, b.content);
        if (a.by_key && b.by_key) {
            compare_keyed(a, b, path);
            return;
        }
        std::size_t common = std::min(a.children.size(), b.children.size());
        for (std::size_t i = 0; i < common; ++i)
            compare_child(a.children[i], b.children[i], path, (int)i);
        for (std::size_t i = common; i < a.children.size(); ++i) {
            auto p = path;
            p.push_back({(int)i, a.children[i].kind});
            emit(DiffKind::Remove, std::move(p), a.children[i].kind, a.children[i].print, std::nullopt);
        }
        for (std::size_t i = common; i < b.children.size(); ++i) {
            auto p = path;
            p.push_back({(int)i, b.children[i].kind});
            emit(DiffKind::Add, std::move(p), b.children[i].kind, std::nullopt, b.children[i].print);
        }
    }

    void compare_child(const DNode& a, const DNode& b, const std::vector<PathStep>& path, int index) {
        if (a.kind != b.kind) {
            auto pa = path;
            pa.push_back({index, a.kind});
            emit(DiffKind::Remove, std::move(pa), a.kind, a.print, std::nullopt);
            auto pb = path;
            pb.push_back({index, b.kind});
            emit(DiffKind::Add, std::move(pb), b.kind, std::nullopt, b.print);
            return;
        }
        auto p = path;
        p.push_back({index, a.kind});
        compare(a, b, std::move(p));
    }

    void compare_keyed(const DNode& a, const DNode& b, const std::vector<PathStep>& path) {
        std::vector<bool> used(b.children.size(), false);
        for (std::size_t i = 0; i < a.children.size(); ++i) {
            std::size_t match = b.children.size();
            for (std::size_t j = 0; j < b.children.size(); ++j) {
                if (!used[j] && b.children[j].key == a.children[i].key) {
                    match = j;
                    break;
                }
            }
            if (match == b.children.size()) {
                auto p = path;
                p.push_back({(int)i, a.children[i].kind});
                emit(DiffKind::Remove, std::move(p), a.children[i].kind, a.children[i].print,
                     std::nullopt);
            } else {
                used[match] = true;
                compare_child(a.children[i], b.children[match], path, (int)i);
            }
        }
        for (std::size_t j = 0; j < b.children.size(); ++j) {
            if (used[j]) continue;
            auto p = path;
            p.push_back({(int)j, b.children[j].kind});
            emit(DiffKind::Add, std::move(p), b.children[j].kind, std::nullopt, b.children[j].print);
        }
    }
};

std::string escape_tsv(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\t') out += "\\t";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

} // namespace

std::vector<DiffEntry> diff_trees(const Model& a, const Model& b) {
    return Differ().run(view_model(a), view_model(b));
}

std::vector<DiffEntry> diff_trees(const ActivityGraph& a, const ActivityGraph& b) {
    return Differ().run(view_graph(a), view_graph(b));
}

std::string path_to_string(const std::vector<PathStep>& path) {
    if (path.empty()) return "/";
    std::string out;
    for (const auto& step : path) out += "/" + std::to_string(step.index) + ":" + step.kind;
    return out;
}

std::string render_diff(const std::vector<DiffEntry>& entries, bool tsv) {
    std::string out;
    for (const auto& e : entries) {
        const char* kind = e.kind == DiffKind::Add ? "add" : e.kind == DiffKind::Remove ? "remove" : "modify";
        if (tsv) {
            out += std::string(kind) + "\t" + path_to_string(e.path) + "\t" + e.element_kind + "\t" +
                   escape_tsv(e.before.value_or("")) + "\t" + escape_tsv(e.after.value_or("")) + "\n";
        } else {
            out += std::string(kind) + " " + e.element_kind + " at " + path_to_string(e.path) + "\n";
            if (e.before) out += "  - " + *e.before + "\n";
            if (e.after) out += "  + " + *e.after + "\n";
        }
    }
    return out;
}

} // namespace hpk

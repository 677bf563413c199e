#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus.hpp"
#include "diff.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "testutil.hpp"

using namespace hpk;

TEST_CASE("identity diffs are empty on the whole corpus") {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        if (e.model) CHECK(diff_trees(*e.model, *e.model).empty());
        if (e.graph) CHECK(diff_trees(*e.graph, *e.graph).empty());
    }
}

TEST_CASE("identity diffs are empty on fuzzed models and graphs") {
    testutil::AstGen gen(555);
    for (int i = 0; i < 200; ++i) {
        Model m = gen.model(6);
        CHECK(diff_trees(m, m).empty());
    }
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        testutil::GraphGen gen2(seed);
        ActivityGraph g = gen2.graph(2);
        CHECK(diff_trees(g, g).empty());
    }
}

TEST_CASE("a single guard edit is one Modify at the Quest path") {
    Model a = *get_model("watertank").model;
    Model b = a;
    // f <= (M - x)/eps  ->  f <= (M - x)/(2*eps)
    FormulaPtr new_guard =
        cmp(CompareOp::Le, var("f"), divt(sub(var("M"), var("x")), mul(num(2), var("eps"))));
    auto& loop = std::get<HybridProgram::Star>(a.program->node);
    auto& body = std::get<HybridProgram::Chop>(loop.body->node);
    auto& ctrl = std::get<HybridProgram::Chop>(body.first->node);
    b.program = star(chop(chop(ctrl.first, quest(new_guard)), body.second));

    auto entries = diff_trees(a, b);
    REQUIRE(entries.size() == 1);
    const DiffEntry& e = entries[0];
    CHECK(e.kind == DiffKind::Modify);
    CHECK(e.element_kind == "Quest");
    REQUIRE(e.before.has_value());
    REQUIRE(e.after.has_value());
    CHECK(*e.before == "?f <= (M - x) / eps");
    CHECK(*e.after == "?f <= (M - x) / (2 * eps)");

    std::vector<PathStep> expected = {{4, "Star"}, {0, "Chop"}, {0, "Chop"}, {1, "Quest"}};
    REQUIRE(e.path.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(e.path[i].index == expected[i].index);
        CHECK(e.path[i].kind == expected[i].kind);
    }
}

TEST_CASE("adding a graph branch reports one node and one edge addition") {
    ActivityGraph a = *get_model("watertank_graph").graph;
    ActivityGraph b = a;
    Node extra;
    extra.id = "vent";
    extra.kind = NodeKind::Action;
    extra.stereotype = Stereotype::AssignTerm;
    extra.body = assign("f", num(0));
    b.nodes.push_back(extra);
    Edge e;
    e.from = "loop_head";
    e.to = "vent";
    b.edges.push_back(e);

    auto entries = diff_trees(a, b);
    REQUIRE(entries.size() == 2);
    int node_adds = 0, edge_adds = 0;
    for (const auto& d : entries) {
        CHECK(d.kind == DiffKind::Add);
        if (d.element_kind == "Node") ++node_adds;
        if (d.element_kind == "Edge") ++edge_adds;
    }
    CHECK(node_adds == 1);
    CHECK(edge_adds == 1);
}

TEST_CASE("kind mismatch removes and adds whole subtrees") {
    Model a = parse_model("model m\nvars x\ninit true\nprog x := 1\nsafe true");
    Model b = parse_model("model m\nvars x\ninit true\nprog ?x = 1\nsafe true");
    auto entries = diff_trees(a, b);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].kind == DiffKind::Remove);
    CHECK(entries[0].element_kind == "Assign");
    CHECK(*entries[0].before == "x := 1");
    CHECK(entries[1].kind == DiffKind::Add);
    CHECK(entries[1].element_kind == "Quest");
    CHECK(*entries[1].after == "?x = 1");
}

TEST_CASE("magnitudes are symmetric with Add and Remove swapped") {
    testutil::AstGen gen(808);
    for (int i = 0; i < 60; ++i) {
        Model a = gen.model(5);
        Model b = gen.model(5);
        auto ab = diff_trees(a, b);
        auto ba = diff_trees(b, a);
        CHECK(ab.size() == ba.size());
        auto count = [](const std::vector<DiffEntry>& entries, DiffKind kind) {
            std::size_t n = 0;
            for (const auto& e : entries)
                if (e.kind == kind) ++n;
            return n;
        };
        CHECK(count(ab, DiffKind::Add) == count(ba, DiffKind::Remove));
        CHECK(count(ab, DiffKind::Remove) == count(ba, DiffKind::Add));
        CHECK(count(ab, DiffKind::Modify) == count(ba, DiffKind::Modify));
    }
}

TEST_CASE("single-leaf edits in other corpus models") {
    // changing an assignment term deep in the robot controller
    Model a = *get_model("swd1d").model;
    Model b = parse_model(pretty_print(a));
    REQUIRE(diff_trees(a, b).empty());

    std::string text = pretty_print(a);
    std::string needle = "a_r := -B";
    auto pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    std::string edited = text;
    edited.replace(pos, needle.size(), "a_r := -A");
    Model c = parse_model(edited);
    auto entries = diff_trees(a, c);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].kind == DiffKind::Modify);
    CHECK(entries[0].element_kind == "Assign");

    // changing the safety formula is one Modify at the Safety slot
    Model d = a;
    d.safety = btrue();
    auto safety_entries = diff_trees(a, d);
    REQUIRE(safety_entries.size() == 1);
    CHECK(safety_entries[0].element_kind == "Safety");
    REQUIRE(safety_entries[0].path.size() == 1);
    CHECK(safety_entries[0].path[0].index == 5);
}

TEST_CASE("changed edge attributes with a stable key are one Modify") {
    ActivityGraph a = *get_model("watertank_graph").graph;
    ActivityGraph b = a;
    for (auto& e : b.edges)
        if (e.nondet_repetition) e.loop_invariant = btrue();
    auto entries = diff_trees(a, b);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].kind == DiffKind::Modify);
    CHECK(entries[0].element_kind == "Edge");
}

TEST_CASE("report rendering") {
    Model a = *get_model("watertank").model;
    Model b = a;
    b.safety = btrue();
    auto entries = diff_trees(a, b);
    std::string text = render_diff(entries, false);
    CHECK(text.find("modify Safety at /5:Safety") != std::string::npos);
    std::string tsv = render_diff(entries, true);
    CHECK(tsv.find("modify\t/5:Safety\tSafety\t") != std::string::npos);
    CHECK(render_diff({}, false).empty());
}

TEST_CASE("output is ordered by path") {
    Model a = *get_model("watertank").model;
    Model b = a;
    b.name = "other";
    b.safety = btrue();
    auto entries = diff_trees(a, b);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].element_kind == "Name");
    CHECK(entries[1].element_kind == "Safety");
}

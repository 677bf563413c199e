// Acceptance suite. Each criterion prints one PASS/FAIL line; the binary
// exits non-zero if any criterion fails or overruns its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "diff.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "simulate.hpp"
#include "testutil.hpp"
#include "transform.hpp"

using namespace hpk;

namespace {

#define REQUIRE_THAT(cond, msg)                                                       \
    do {                                                                              \
        if (!(cond)) throw std::runtime_error(std::string("requirement failed: ") + msg); \
    } while (0)

Valuation val(std::initializer_list<std::pair<const std::string, double>> entries) {
    return Valuation(std::map<std::string, double>(entries));
}

Node simple(const std::string& id, NodeKind kind) {
    Node n;
    n.id = id;
    n.kind = kind;
    return n;
}

Node term_action(const std::string& id, ProgramPtr body) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Action;
    n.stereotype = Stereotype::AssignTerm;
    n.body = std::move(body);
    return n;
}

Edge flow(const std::string& from, const std::string& to, FormulaPtr guard = nullptr,
          bool repeat = false) {
    Edge e;
    e.from = from;
    e.to = to;
    e.guard = std::move(guard);
    e.nondet_repetition = repeat;
    return e;
}

ActivityGraph pattern_graph(std::vector<Node> nodes, std::vector<Edge> edges) {
    ActivityGraph g;
    g.name = "pattern";
    g.variables = {"x", "y", "z"};
    g.init = btrue();
    g.safety = cmp(CompareOp::Ge, var("x"), num(0));
    g.nodes = std::move(nodes);
    g.edges = std::move(edges);
    return g;
}

// --- criterion 1: parse/print round-trip --------------------------------------

void criterion_roundtrip() {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        if (e.model) {
            REQUIRE_THAT(equal(parse_model(pretty_print(*e.model)), *e.model),
                         name + " round-trip");
        } else {
            REQUIRE_THAT(equal(parse_activity_graph(pretty_print(*e.graph)), *e.graph),
                         name + " round-trip");
        }
    }
    testutil::AstGen gen(20240801);
    for (int i = 0; i < 500; ++i) {
        Model m = gen.model(8);
        REQUIRE_THAT(equal(parse_model(pretty_print(m)), m),
                     "fuzz round-trip #" + std::to_string(i));
    }
}

// --- criterion 2: structured transformation, one test per rewrite row ----------

void criterion_structured_rows() {
    ProgramPtr alpha = assign("x", num(1));
    ProgramPtr beta = assign("y", num(2));
    ProgramPtr gamma = assign("z", num(3));
    FormulaPtr f = cmp(CompareOp::Ge, var("x"), num(0));

    // row 1: direct flow is sequential composition
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), term_action("a", alpha), term_action("b", beta),
             simple("f", NodeKind::Final)},
            {flow("i", "a"), flow("a", "b"), flow("b", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, chop(alpha, beta)), "row 1");
    }
    // row 2: guarded flow inserts a test
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), term_action("a", alpha), term_action("b", beta),
             simple("f", NodeKind::Final)},
            {flow("i", "a"), flow("a", "b", f), flow("b", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, chop(chop(alpha, quest(f)), beta)),
                     "row 2");
    }
    // row 3: back edge plus skip edge is a repetition
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision),
             term_action("a", alpha), simple("m", NodeKind::Merge), simple("f", NodeKind::Final)},
            {flow("i", "d"), flow("d", "a"), flow("a", "m"), flow("d", "m"),
             flow("m", "d", nullptr, true), flow("m", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, star(alpha)), "row 3");
    }
    // row 4: back edge alone repeats at least once
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision),
             term_action("a", alpha), simple("m", NodeKind::Merge), simple("f", NodeKind::Final)},
            {flow("i", "d"), flow("d", "a"), flow("a", "m"), flow("m", "d", nullptr, true),
             flow("m", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, chop(alpha, star(alpha))), "row 4");
    }
    // row 5: guarded branch with negated bypass is if-fi
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision),
             term_action("a", alpha), simple("m", NodeKind::Merge), simple("f", NodeKind::Final)},
            {flow("i", "d"), flow("d", "a", f), flow("a", "m"), flow("d", "m", lnot(f)),
             flow("m", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, if_then_else(f, alpha, nullptr)),
                     "row 5");
    }
    // row 6: mutually negated guards on two branches are if-else
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision),
             term_action("a", alpha), term_action("b", beta), simple("m", NodeKind::Merge),
             simple("f", NodeKind::Final)},
            {flow("i", "d"), flow("d", "a", f), flow("a", "m"), flow("d", "b", lnot(f)),
             flow("b", "m"), flow("m", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, if_then_else(f, alpha, beta)), "row 6");
    }
    // row 7: plain fan-out/fan-in is a right-nested choice in declaration order
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision),
             term_action("a", alpha), term_action("b", beta), term_action("c", gamma),
             simple("m", NodeKind::Merge), simple("f", NodeKind::Final)},
            {flow("i", "d"), flow("d", "a"), flow("a", "m"), flow("d", "b"), flow("b", "m"),
             flow("d", "c"), flow("c", "m"), flow("m", "f")});
        REQUIRE_THAT(equal(to_hybrid_program(g).program, choice(alpha, choice(beta, gamma))),
                     "row 7");
    }
    // golden: the water tank graph produces the bundled water tank model
    Model transformed = to_hybrid_program(*get_model("watertank_graph").graph);
    REQUIRE_THAT(equal(transformed, *get_model("watertank").model), "water tank golden");
}

// --- criterion 3: automaton embedding, one test per rewrite row ----------------

void criterion_embedding_rows() {
    ProgramPtr alpha = assign("x", num(1));
    ProgramPtr beta = assign("y", num(2));
    FormulaPtr f = cmp(CompareOp::Ge, var("x"), num(0));
    auto loc_eq = [](int id) { return quest(cmp(CompareOp::Eq, var("s"), num(id))); };

    // row 1: ?s=id(a); a; s:=id(next)
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), term_action("a", alpha), simple("f", NodeKind::Final)},
            {flow("i", "a"), flow("a", "f")});
        Model m = to_automaton_embedding(g);
        ProgramPtr block = chop(chop(loc_eq(1), alpha), assign("s", num(2)));
        REQUIRE_THAT(equal(m.program, chop(assign("s", num(1)), star(block))), "row 1");
    }
    // row 2: flow into a decision assigns the decision's location
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), term_action("a", alpha),
             simple("d", NodeKind::Decision), simple("f", NodeKind::Final)},
            {flow("i", "a"), flow("a", "d"), flow("d", "f")});
        Model m = to_automaton_embedding(g);
        ProgramPtr block_a = chop(chop(loc_eq(1), alpha), assign("s", num(2)));
        ProgramPtr block_d = chop(loc_eq(2), assign("s", num(3)));
        REQUIRE_THAT(equal(m.program, chop(assign("s", num(1)), star(choice(block_a, block_d)))),
                     "row 2");
    }
    // row 3: a guard tests between the action and the location update
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), term_action("a", alpha), term_action("b", beta),
             simple("f", NodeKind::Final)},
            {flow("i", "a"), flow("a", "b", f), flow("b", "f")});
        Model m = to_automaton_embedding(g);
        ProgramPtr block_a = chop(chop(loc_eq(1), alpha), chop(quest(f), assign("s", num(2))));
        ProgramPtr block_b = chop(chop(loc_eq(2), beta), assign("s", num(3)));
        REQUIRE_THAT(equal(m.program, chop(assign("s", num(1)), star(choice(block_a, block_b)))),
                     "row 3");
    }
    // row 4: decision fan-out becomes a choice of location updates
    {
        ActivityGraph g = pattern_graph(
            {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision),
             term_action("a", alpha), term_action("b", beta), simple("f", NodeKind::Final)},
            {flow("i", "d"), flow("d", "a"), flow("d", "b"), flow("a", "f"), flow("b", "f")});
        Model m = to_automaton_embedding(g);
        ProgramPtr block_d = chop(loc_eq(1), choice(assign("s", num(2)), assign("s", num(3))));
        ProgramPtr block_a = chop(chop(loc_eq(2), alpha), assign("s", num(4)));
        ProgramPtr block_b = chop(chop(loc_eq(3), beta), assign("s", num(4)));
        REQUIRE_THAT(
            equal(m.program, chop(assign("s", num(1)),
                                  star(choice(block_d, choice(block_a, block_b))))),
            "row 4");
    }
    // final-location rule and the loop-of-choices wrapper on the water tank
    {
        Model m = to_automaton_embedding(*get_model("watertank_graph").graph);
        auto* top = std::get_if<HybridProgram::Chop>(&m.program->node);
        REQUIRE_THAT(top != nullptr, "wrapper is assignment; repetition");
        REQUIRE_THAT(std::holds_alternative<HybridProgram::Assign>(top->first->node),
                     "wrapper starts with the location assignment");
        auto* loop = std::get_if<HybridProgram::Star>(&top->second->node);
        REQUIRE_THAT(loop != nullptr, "wrapper loops over the blocks");
        int blocks = 1;
        ProgramPtr cursor = loop->body;
        while (auto* c = std::get_if<HybridProgram::Choice>(&cursor->node)) {
            ++blocks;
            cursor = c->right;
        }
        REQUIRE_THAT(blocks == 4, "the final location contributes no block");
        REQUIRE_THAT(m.variables.back() == "s", "the location variable is declared");
    }
}

// --- criterion 4: structured vs embedded reachability ---------------------------

void criterion_equivalence() {
    const std::vector<double> values = {0, 1, 2};
    auto S0 = testutil::all_valuations({"p", "q", "w"}, values);
    int kept = 0;
    for (std::uint64_t seed = 1; kept < 10 && seed < 200; ++seed) {
        testutil::GraphGen gen(seed);
        ActivityGraph g = gen.graph(2);
        if (!validate_well_structured(g).well_structured) continue;
        Model structured = to_hybrid_program(g);
        Model embedded = to_automaton_embedding(g);

        auto reached = enumerate_reachable_discrete(structured.program, S0, values, 5);
        if (reached != enumerate_reachable_discrete(structured.program, S0, values, 13)) continue;

        int locations = 0;
        std::string final_id;
        for (const auto& n : g.nodes) {
            if (n.kind != NodeKind::Initial) ++locations;
            if (n.kind == NodeKind::Final) final_id = n.id;
        }
        std::set<Valuation> S0_loc;
        for (auto v : S0) {
            v.set("s", 0);
            S0_loc.insert(std::move(v));
        }
        int depth = 5 * locations;
        auto embedded_reach = enumerate_reachable_discrete(embedded.program, S0_loc, values, depth);
        if (embedded_reach !=
            enumerate_reachable_discrete(embedded.program, S0_loc, values, depth + 40))
            continue;

        double final_loc = (double)embedding_location_ids(g).at(final_id);
        std::set<Valuation> projected;
        for (const auto& v : embedded_reach) {
            if (v.get("s") != final_loc) continue;
            auto entries = v.entries();
            entries.erase("s");
            projected.insert(Valuation(std::move(entries)));
        }
        ++kept;
        REQUIRE_THAT(projected == reached,
                     "graph seed " + std::to_string(seed) + " reaches the same end states");
    }
    REQUIRE_THAT(kept >= 10, "at least 10 randomized graphs compared");
}

// --- criterion 5: water tank safety and its mutant -------------------------------

void criterion_watertank_safety() {
    CorpusEntry e = get_model("watertank");
    SimPolicy policy;
    policy.seed = 42;
    CheckResult ok = check_safety(*e.model, 1000, policy, e.parameter_box);
    REQUIRE_THAT(ok.verdict == Verdict::NoCounterexampleFound,
                 "water tank is not falsified in 1000 runs");
    REQUIRE_THAT(ok.runs_executed == 1000, "all runs executed");

    Model mutant = *e.model;
    auto& loop = std::get<HybridProgram::Star>(mutant.program->node);
    auto& body = std::get<HybridProgram::Chop>(loop.body->node);
    auto& ctrl = std::get<HybridProgram::Chop>(body.first->node);
    mutant.program = star(chop(ctrl.first, body.second)); // drop ?f <= (M - x)/eps
    CheckResult bad = check_safety(mutant, 1000, policy, e.parameter_box);
    REQUIRE_THAT(bad.verdict == Verdict::Counterexample,
                 "the unguarded mutant overflows within 1000 runs");
    REQUIRE_THAT(bad.trace.has_value(), "counterexample trace attached");
}

// --- criterion 6: one-dimensional robot safety ------------------------------------

void criterion_swd1d_safety() {
    CorpusEntry e = get_model("swd1d");
    SimPolicy policy;
    policy.seed = 42;
    CheckResult r = check_safety(*e.model, 500, policy, e.parameter_box);
    REQUIRE_THAT(r.verdict == Verdict::NoCounterexampleFound,
                 "neither the safety condition nor the stoppable invariant is violated");
    REQUIRE_THAT(r.runs_executed == 500, "all runs executed");
}

// --- criterion 7: variant equivalences ---------------------------------------------

void criterion_variants() {
    FormulaPtr by_disjunction = swd1d_safe_disjunction();
    FormulaPtr by_arithmetic = swd1d_safe_arithmetic();
    Model v3 = *get_model("swd1d_variant_iii").model;
    Model v4 = *get_model("swd1d_variant_iv").model;
    int points = 0;
    for (double o_r : {-1.0, 1.0}) {
        for (int vi = 0; vi < 10; ++vi) {
            double v_r = vi / 9.0;
            for (int xi = 0; xi < 500; ++xi) {
                double x_r = 1.0 + 18.0 * xi / 499.0;
                Valuation v(std::map<std::string, double>{
                    {"o_r", o_r}, {"v_r", v_r}, {"x_r", x_r}, {"a_r", 0}, {"t", 0},
                    {"A", 1}, {"B", 1}, {"eps", 0.5}, {"xb_lo", 0}, {"xb_hi", 20}});
                REQUIRE_THAT(eval_formula(by_disjunction, v) == eval_formula(by_arithmetic, v),
                             "safe encodings agree");
                REQUIRE_THAT(eval_formula(v3.init, v) == eval_formula(v4.init, v),
                             "antecedent encodings agree");
                ++points;
            }
        }
    }
    REQUIRE_THAT(points == 10000, "grid size");

    std::set<Valuation> start;
    for (double o : {-1.0, 1.0})
        start.insert(val({{"o_r", o}, {"v_r", 0}, {"a_r", 0}}));
    auto by_choice = enumerate_reachable_discrete(swd1d_turn_by_choice(), start, {-1, 0, 1}, 4);
    auto by_arith =
        enumerate_reachable_discrete(swd1d_turn_by_arithmetic(), start, {-1, 0, 1}, 4);
    REQUIRE_THAT(by_choice == by_arith, "turning encodings reach the same orientations");
}

// --- criterion 8: numerics ------------------------------------------------------------

void criterion_numerics() {
    SimPolicy policy;
    policy.ode_max_duration = 10.0;
    OdeSegment constant = integrate_ode({{"x", num(3)}}, val({{"x", 0}}), btrue(), policy);
    REQUIRE_THAT(std::fabs(constant.states.back()[0] - 30.0) <= 1e-9,
                 "constant-derivative error within 1e-9 over t <= 10");

    SimPolicy defaults;
    OdeSegment braking = integrate_ode({{"v", num(-1)}}, val({{"v", 1}}),
                                       cmp(CompareOp::Ge, var("v"), num(0)), defaults);
    REQUIRE_THAT(braking.exit == OdeExit::DomainBoundary, "braking exits on the boundary");
    REQUIRE_THAT(std::fabs(braking.times.back() - 1.0) <= 1e-6,
                 "event localized within 1e-6");
    REQUIRE_THAT(braking.states.back()[0] == 0.0, "velocity snapped exactly to the boundary");

    for (const char* name : {"watertank", "swd1d", "robot2d"}) {
        CorpusEntry e = get_model(name);
        for (std::uint64_t seed : {3ull, 42ull}) {
            SimPolicy p;
            p.seed = seed;
            Trace original = simulate_run(*e.model, p, e.parameter_box);
            Trace replayed = replay_run(*e.model, p, original.decisions, e.parameter_box);
            REQUIRE_THAT(original.samples.size() == replayed.samples.size(),
                         "replay sample count");
            for (std::size_t i = 0; i < original.samples.size(); ++i) {
                const Sample& a = original.samples[i];
                const Sample& b = replayed.samples[i];
                REQUIRE_THAT(a.time == b.time && a.tag == b.tag && a.values == b.values,
                             "replay is bitwise identical");
            }
        }
    }
}

// --- criterion 9: placeholder lowering --------------------------------------------------

void criterion_placeholder() {
    SimPolicy policy;
    policy.seed = 1;

    Node ph;
    ph.id = "p";
    ph.kind = NodeKind::Action;
    ph.stereotype = Stereotype::Placeholder;
    ph.label = "dynamics";

    // straight-line graph: the placeholder would execute before any boundary
    ActivityGraph line = pattern_graph({simple("i", NodeKind::Initial), ph,
                                        simple("f", NodeKind::Final)},
                                       {flow("i", "p"), flow("p", "f")});
    // looped graph: the placeholder sits inside a repetition
    ActivityGraph looped = pattern_graph(
        {simple("i", NodeKind::Initial), simple("d", NodeKind::Decision), ph,
         simple("m", NodeKind::Merge), simple("f", NodeKind::Final)},
        {flow("i", "d"), flow("d", "p"), flow("p", "m"), flow("d", "m"),
         flow("m", "d", nullptr, true), flow("m", "f")});

    Box box{{"x", {0, 1}}, {"y", {0, 1}}, {"z", {0, 1}}};
    for (const ActivityGraph* g : {&line, &looped}) {
        for (Model m : {to_hybrid_program(*g), to_automaton_embedding(*g)}) {
            for (const auto& v :
                 {val({{"x", 0.5}, {"y", 0.0}, {"z", 1.0}}), val({{"x", -3}, {"y", 7}, {"z", 0}})})
                REQUIRE_THAT(!eval_formula(m.safety, v), "lowered safety is unsatisfiable");
            CheckResult r = check_safety(m, 100, policy, box);
            REQUIRE_THAT(r.verdict == Verdict::Counterexample, "counterexample verdict");
            REQUIRE_THAT(r.runs_executed == 1, "found on the first run");
        }
    }
}

// --- criterion 10: structural diff --------------------------------------------------------

void criterion_diff() {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        if (e.model) REQUIRE_THAT(diff_trees(*e.model, *e.model).empty(), name + " identity");
        if (e.graph) REQUIRE_THAT(diff_trees(*e.graph, *e.graph).empty(), name + " identity");
    }

    Model a = *get_model("watertank").model;
    auto& loop = std::get<HybridProgram::Star>(a.program->node);
    auto& body = std::get<HybridProgram::Chop>(loop.body->node);
    auto& ctrl = std::get<HybridProgram::Chop>(body.first->node);
    FormulaPtr halved =
        cmp(CompareOp::Le, var("f"), divt(sub(var("M"), var("x")), mul(num(2), var("eps"))));
    Model b = a;
    b.program = star(chop(chop(ctrl.first, quest(halved)), body.second));

    auto entries = diff_trees(a, b);
    REQUIRE_THAT(entries.size() == 1, "single-leaf edit yields exactly one entry");
    REQUIRE_THAT(entries[0].kind == DiffKind::Modify, "the entry is a Modify");
    REQUIRE_THAT(entries[0].element_kind == "Quest", "categorized as the edited element");
    std::vector<PathStep> expected = {{4, "Star"}, {0, "Chop"}, {0, "Chop"}, {1, "Quest"}};
    REQUIRE_THAT(entries[0].path.size() == expected.size(), "path length");
    for (std::size_t i = 0; i < expected.size(); ++i) {
        REQUIRE_THAT(entries[0].path[i].index == expected[i].index &&
                         entries[0].path[i].kind == expected[i].kind,
                     "path step " + std::to_string(i));
    }
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<void()> run;
};

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"1-roundtrip-corpus-and-fuzz", 5.0, criterion_roundtrip},
        {"2-structured-transformation-rows", 30.0, criterion_structured_rows},
        {"3-automaton-embedding-rows", 30.0, criterion_embedding_rows},
        {"4-structured-vs-embedded-reachability", 30.0, criterion_equivalence},
        {"5-watertank-safety-and-mutant", 60.0, criterion_watertank_safety},
        {"6-swd1d-safety-and-invariant", 120.0, criterion_swd1d_safety},
        {"7-variant-equivalences", 10.0, criterion_variants},
        {"8-numerics-and-replay", 30.0, criterion_numerics},
        {"9-placeholder-lowering", 30.0, criterion_placeholder},
        {"10-structural-diff", 30.0, criterion_diff},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string problem;
        try {
            c.run();
        } catch (const std::exception& e) {
            problem = e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (problem.empty() && elapsed > c.budget_seconds) {
            problem = "exceeded the " + std::to_string(c.budget_seconds) + "s budget";
        }
        if (problem.empty()) {
            std::printf("PASS criterion %s (%.2fs)\n", c.name, elapsed);
        } else {
            std::printf("FAIL criterion %s (%.2fs): %s\n", c.name, elapsed, problem.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures == 0 ? 0 : 1;
}

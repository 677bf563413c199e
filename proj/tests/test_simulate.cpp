#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "corpus.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "simulate.hpp"
#include "testutil.hpp"
#include "transform.hpp"

using namespace hpk;

namespace {

Valuation val(std::initializer_list<std::pair<const std::string, double>> entries) {
    return Valuation(std::map<std::string, double>(entries));
}

bool traces_identical(const Trace& a, const Trace& b) {
    if (a.columns != b.columns) return false;
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const Sample& x = a.samples[i];
        const Sample& y = b.samples[i];
        if (std::bit_cast<std::uint64_t>(x.time) != std::bit_cast<std::uint64_t>(y.time))
            return false;
        if (x.tag != y.tag || x.star_index != y.star_index) return false;
        if (x.values.size() != y.values.size()) return false;
        for (std::size_t j = 0; j < x.values.size(); ++j)
            if (std::bit_cast<std::uint64_t>(x.values[j]) !=
                std::bit_cast<std::uint64_t>(y.values[j]))
                return false;
    }
    if (a.decisions.size() != b.decisions.size()) return false;
    for (std::size_t i = 0; i < a.decisions.size(); ++i) {
        if (a.decisions[i].kind != b.decisions[i].kind) return false;
        if (std::bit_cast<std::uint64_t>(a.decisions[i].value) !=
            std::bit_cast<std::uint64_t>(b.decisions[i].value))
            return false;
    }
    return true;
}

Model simple_model(const std::string& vars_line, const std::string& init,
                   const std::string& prog, const std::string& safe) {
    return parse_model("model t\nvars " + vars_line + "\ninit " + init + "\nprog " + prog +
                       "\nsafe " + safe);
}

} // namespace

TEST_CASE("integration exits at the clock boundary") {
    SimPolicy policy;
    OdeSegment seg = integrate_ode({{"x", var("f")}, {"c", num(1)}},
                                   val({{"x", 0}, {"c", 0}, {"f", 2}}),
                                   cmp(CompareOp::Le, var("c"), num(0.5)), policy);
    CHECK(seg.exit == OdeExit::DomainBoundary);
    double t_exit = seg.times.back();
    CHECK(std::fabs(t_exit - 0.5) <= 1e-6);
    Valuation end = seg.valuation_at(seg.states.size() - 1);
    CHECK(std::fabs(end.get("x") - 1.0) <= 1e-6);
    // the active clock conjunct snaps exactly onto its bound
    CHECK(end.get("c") == 0.5);
}

TEST_CASE("integration of a constant system runs to the duration cap") {
    SimPolicy policy;
    policy.ode_max_duration = 2.0;
    OdeSegment seg = integrate_ode({{"x", num(0)}}, val({{"x", 3}}), btrue(), policy);
    CHECK(seg.exit == OdeExit::MaxDuration);
    CHECK(seg.times.back() == doctest::Approx(2.0));
    for (const auto& state : seg.states) CHECK(state[0] == 3.0);
}

TEST_CASE("braking stops exactly on the velocity boundary") {
    SimPolicy policy;
    OdeSegment seg = integrate_ode({{"v", num(-1)}}, val({{"v", 1}}),
                                   cmp(CompareOp::Ge, var("v"), num(0)), policy);
    CHECK(seg.exit == OdeExit::DomainBoundary);
    CHECK(std::fabs(seg.times.back() - 1.0) <= 1e-6);
    // snapped so a later ?v = 0 can pass
    CHECK(seg.states.back()[0] == 0.0);
}

TEST_CASE("integration accuracy for constant derivatives") {
    SimPolicy policy;
    policy.ode_max_duration = 10.0;
    OdeSegment seg = integrate_ode({{"x", num(3)}}, val({{"x", 0}}), btrue(), policy);
    CHECK(seg.exit == OdeExit::MaxDuration);
    CHECK(std::fabs(seg.states.back()[0] - 30.0) <= 1e-9);
}

TEST_CASE("every accepted integration point satisfies the domain") {
    SimPolicy policy;
    FormulaPtr domain = land(cmp(CompareOp::Le, var("c"), num(0.3)),
                             cmp(CompareOp::Ge, var("x"), num(0)));
    OdeSegment seg = integrate_ode({{"x", num(-2)}, {"c", num(1)}}, val({{"x", 0.4}, {"c", 0}}),
                                   domain, policy);
    for (std::size_t i = 0; i < seg.states.size(); ++i)
        CHECK(eval_formula(domain, seg.valuation_at(i)));
    CHECK(seg.exit == OdeExit::DomainBoundary);
    // x falls to zero before the clock runs out; x is the active boundary
    CHECK(seg.states.back()[seg.columns[1] == "x" ? 1 : 0] == 0.0);
}

TEST_CASE("a false domain gives a zero-duration evolution") {
    SimPolicy policy;
    OdeSegment seg = integrate_ode({{"x", num(1)}}, val({{"x", 5}}),
                                   cmp(CompareOp::Le, var("x"), num(1)), policy);
    CHECK(seg.exit == OdeExit::DomainBoundary);
    CHECK(seg.times.size() == 1);
    CHECK(seg.states.back()[0] == 5.0);
}

TEST_CASE("division by zero during integration is reported") {
    SimPolicy policy;
    OdeSegment seg = integrate_ode({{"x", divt(num(1), var("y"))}}, val({{"x", 0}, {"y", 0}}),
                                   btrue(), policy);
    CHECK(seg.exit == OdeExit::DivisionByZero);

    Model m = simple_model("x, y", "x = 0 & y = 0", "{x' = 1 / y}", "true");
    SimPolicy pol;
    Box box{{"x", {0, 0}}, {"y", {0, 0}}};
    CHECK_THROWS_AS(simulate_run(m, pol, box), Error);
}

TEST_CASE("water tank runs stay within the level bounds") {
    CorpusEntry e = get_model("watertank");
    SimPolicy policy;
    policy.seed = 7;
    Trace t = simulate_run(*e.model, policy, e.parameter_box);
    CHECK(t.completed());
    FormulaPtr bounds = e.model->safety;
    for (std::size_t i = 0; i < t.samples.size(); ++i)
        CHECK(eval_formula(bounds, t.valuation_at(i)));
}

TEST_CASE("trace times never decrease and valuations are total") {
    for (const char* name : {"watertank", "swd1d", "robot2d"}) {
        CorpusEntry e = get_model(name);
        for (std::uint64_t seed : {2ull, 13ull}) {
            SimPolicy policy;
            policy.seed = seed;
            Trace t = simulate_run(*e.model, policy, e.parameter_box);
            double last = 0.0;
            for (const auto& s : t.samples) {
                CHECK(s.time >= last);
                last = s.time;
                CHECK(s.values.size() == t.columns.size());
            }
        }
    }
}

TEST_CASE("same model and seed give bitwise identical traces") {
    CorpusEntry e = get_model("watertank");
    SimPolicy policy;
    policy.seed = 7;
    Trace a = simulate_run(*e.model, policy, e.parameter_box);
    Trace b = simulate_run(*e.model, policy, e.parameter_box);
    CHECK(traces_identical(a, b));
}

TEST_CASE("executing a placeholder is an error carrying the partial trace") {
    Model m = simple_model("x", "x = 0", "placeholder(\"dyn\")", "true");
    SimPolicy policy;
    Box box{{"x", {0, 0}}};
    try {
        simulate_run(m, policy, box);
        CHECK(false);
    } catch (const PlaceholderExecutedError& e) {
        CHECK(e.code() == ErrorCode::PlaceholderExecuted);
        CHECK(!e.partial_trace().samples.empty());
    }
}

TEST_CASE("replaying the decision log reproduces the trace bitwise") {
    for (const char* name : {"watertank", "swd1d", "robot2d"}) {
        CorpusEntry e = get_model(name);
        for (std::uint64_t seed : {1ull, 9ull, 77ull}) {
            SimPolicy policy;
            policy.seed = seed;
            Trace original = simulate_run(*e.model, policy, e.parameter_box);
            Trace replayed = replay_run(*e.model, policy, original.decisions, e.parameter_box);
            CHECK(traces_identical(original, replayed));
        }
    }
}

TEST_CASE("quest failure aborts the run with a test_fail sample") {
    Model m = simple_model("x", "x = 0", "x := 1; ?x = 0; x := 2", "true");
    SimPolicy policy;
    Box box{{"x", {0, 0}}};
    Trace t = simulate_run(m, policy, box);
    CHECK_FALSE(t.completed());
    CHECK(t.samples.back().tag == SampleTag::TestFail);
}

TEST_CASE("assign-any rejects against the following test chain") {
    Model m = simple_model("x", "x = 0", "x := *; ?x >= 0; ?x <= 1", "true");
    SimPolicy policy;
    policy.seed = 3;
    Box box{{"x", {0, 0}}};
    for (int i = 0; i < 20; ++i) {
        policy.seed = derive_seed(11, (std::uint64_t)i);
        Trace t = simulate_run(m, policy, box);
        REQUIRE(t.completed());
        double x = t.samples.back().values[0];
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("equality chains after assign-any are satisfiable") {
    Model m = simple_model("o", "true", "o := *; ?o * o = 1", "true");
    SimPolicy policy;
    std::set<double> seen;
    for (int i = 0; i < 40; ++i) {
        policy.seed = derive_seed(77, (std::uint64_t)i);
        Trace t = simulate_run(m, policy);
        if (t.completed()) seen.insert(t.samples.back().values[0]);
    }
    CHECK(seen == std::set<double>{-1.0, 1.0});
}

TEST_CASE("water tank safety holds over 200 seeded runs") {
    CorpusEntry e = get_model("watertank");
    SimPolicy policy;
    policy.seed = 42;
    CheckResult r = check_safety(*e.model, 200, policy, e.parameter_box);
    CHECK(r.verdict == Verdict::NoCounterexampleFound);
    CHECK(r.runs_executed == 200);
}

TEST_CASE("removing the flow guard admits an overflow counterexample") {
    CorpusEntry e = get_model("watertank");
    Model mutant = *e.model;
    // drop the ?f <= (M - x)/eps test from the loop body
    auto& loop = std::get<HybridProgram::Star>(mutant.program->node);
    auto& body = std::get<HybridProgram::Chop>(loop.body->node);
    auto& ctrl = std::get<HybridProgram::Chop>(body.first->node);
    mutant.program = star(chop(ctrl.first, body.second));

    SimPolicy policy;
    policy.seed = 42;
    CheckResult r = check_safety(mutant, 1000, policy, e.parameter_box);
    REQUIRE(r.verdict == Verdict::Counterexample);
    REQUIRE(r.trace.has_value());
    REQUIRE(r.violated_at.has_value());
    // the violating sample exceeds the maximum level
    bool overflow = false;
    for (std::size_t i = 0; i < r.trace->samples.size(); ++i) {
        Valuation v = r.trace->valuation_at(i);
        if (v.get("x") > v.get("M")) overflow = true;
    }
    CHECK(overflow);

    // the counterexample trace replays bitwise
    SimPolicy run_policy = policy;
    run_policy.seed = r.trace_seed;
    Trace replayed = replay_run(mutant, run_policy, r.trace->decisions, e.parameter_box);
    CHECK(traces_identical(*r.trace, replayed));
}

TEST_CASE("the one-dimensional robot stays safe in 100 runs") {
    CorpusEntry e = get_model("swd1d");
    SimPolicy policy;
    policy.seed = 42;
    CheckResult r = check_safety(*e.model, 100, policy, e.parameter_box);
    CHECK(r.verdict == Verdict::NoCounterexampleFound);
}

TEST_CASE("an unsatisfiable safety condition falsifies on the first run") {
    Model m = simple_model("x", "x = 0", "x := 1", "false");
    SimPolicy policy;
    Box box{{"x", {0, 0}}};
    CheckResult r = check_safety(m, 100, policy, box);
    CHECK(r.verdict == Verdict::Counterexample);
    CHECK(r.runs_executed == 1);
}

TEST_CASE("check_safety reports a counterexample for placeholder models on run one") {
    Model m = simple_model("x", "x = 0", "placeholder(\"dyn\")", "true");
    m.safety = land(m.safety, bfalse());
    SimPolicy policy;
    Box box{{"x", {0, 0}}};
    CheckResult r = check_safety(m, 100, policy, box);
    CHECK(r.verdict == Verdict::Counterexample);
    CHECK(r.runs_executed == 1);

    // with a satisfiable safety condition the error propagates instead
    Model honest = simple_model("x", "x = 0", "placeholder(\"dyn\")", "true");
    CHECK_THROWS_AS(check_safety(honest, 10, policy, box), PlaceholderExecutedError);
}

TEST_CASE("diamond witness search") {
    SimPolicy policy;
    policy.seed = 5;
    Box box{{"x", {0, 0}}};

    Model reach_one = simple_model("x", "true", "x := 1", "x = 1");
    CheckResult r = check_diamond(reach_one, 50, policy, box);
    CHECK(r.verdict == Verdict::WitnessFound);
    REQUIRE(r.trace.has_value());

    Model stuck = simple_model("x", "true", "?false", "true");
    CheckResult s = check_diamond(stuck, 50, policy, box);
    CHECK(s.verdict == Verdict::NoWitnessFound);
    CHECK(s.runs_executed == 50);

    // the water tank can half-fill from empty
    CorpusEntry e = get_model("watertank");
    Model goal = *e.model;
    goal.safety = cmp(CompareOp::Ge, var("x"), divt(var("M"), num(2)));
    Box start = e.parameter_box;
    start["x"] = {0, 0};
    CheckResult w = check_diamond(goal, 1000, policy, start);
    CHECK(w.verdict == Verdict::WitnessFound);
}

TEST_CASE("discrete reachability oracle") {
    const std::vector<double> values = {0, 1, 2};

    ProgramPtr two_way = choice(assign("x", num(0)), assign("x", num(1)));
    auto from_two = enumerate_reachable_discrete(
        two_way, {val({{"x", 2}})}, values, 5);
    CHECK(from_two == std::set<Valuation>{val({{"x", 0}}), val({{"x", 1}})});

    ProgramPtr identity_loop = star(assign("x", var("x")));
    auto fix = enumerate_reachable_discrete(identity_loop, {val({{"x", 1}})}, values, 5);
    CHECK(fix == std::set<Valuation>{val({{"x", 1}})});

    ProgramPtr filtered = chop(quest(cmp(CompareOp::Eq, var("x"), num(0))), assign("x", num(1)));
    auto filtered_reach = enumerate_reachable_discrete(
        filtered, {val({{"x", 0}}), val({{"x", 2}})}, values, 5);
    CHECK(filtered_reach == std::set<Valuation>{val({{"x", 1}})});
}

TEST_CASE("discrete reachability is monotone in the star depth and reaches a fixpoint") {
    // x counts up and wraps within {0,1,2} via an if-else
    ProgramPtr body = if_then_else(cmp(CompareOp::Le, var("x"), num(1)),
                                   assign("x", add(var("x"), num(1))), assign("x", num(0)));
    ProgramPtr loop = star(body);
    std::set<Valuation> init{val({{"x", 0}})};
    const std::vector<double> values = {0, 1, 2};
    std::size_t previous = 0;
    for (int depth = 0; depth <= 4; ++depth) {
        auto reach = enumerate_reachable_discrete(loop, init, values, depth);
        CHECK(reach.size() >= previous);
        previous = reach.size();
    }
    auto at_fixpoint = enumerate_reachable_discrete(loop, init, values, 3);
    auto beyond = enumerate_reachable_discrete(loop, init, values, 30);
    CHECK(at_fixpoint == beyond);
    CHECK(at_fixpoint.size() == 3);
}

TEST_CASE("reachability grows monotonically on random structured programs") {
    const std::vector<double> values = {0, 1, 2};
    auto S0 = testutil::all_valuations({"p", "q", "w"}, values);
    for (std::uint64_t seed = 30; seed < 40; ++seed) {
        testutil::GraphGen gen(seed);
        ActivityGraph g = gen.graph(2);
        Model m = to_hybrid_program(g);
        std::set<Valuation> previous;
        for (int depth = 0; depth <= 6; depth += 2) {
            auto reached = enumerate_reachable_discrete(m.program, S0, values, depth);
            CHECK(std::includes(reached.begin(), reached.end(), previous.begin(), previous.end()));
            previous = std::move(reached);
        }
    }
}

TEST_CASE("the oracle refuses continuous evolutions") {
    ProgramPtr p = continuous({{"x", num(1)}}, btrue());
    try {
        enumerate_reachable_discrete(p, {val({{"x", 0}})}, {0, 1}, 3);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ContinuousPresent);
    }
}

TEST_CASE("while loops execute deterministically") {
    Model m = simple_model("x", "x = 0", "while (x < 5) x := x + 1 end", "true");
    SimPolicy policy;
    Box box{{"x", {0, 0}}};
    Trace t = simulate_run(m, policy, box);
    REQUIRE(t.completed());
    CHECK(t.samples.back().values[0] == 5.0);

    auto reach = enumerate_reachable_discrete(parse_program("while (x < 2) x := x + 1 end"),
                                              {val({{"x", 0}})}, {0, 1, 2}, 5);
    CHECK(reach == std::set<Valuation>{val({{"x", 2}})});
}

TEST_CASE("simulation prechecks") {
    Model quantified = simple_model("x", "x = 0", "?forall q . q >= 0", "true");
    SimPolicy policy;
    Box box{{"x", {0, 0}}};
    try {
        simulate_run(quantified, policy, box);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::QuantifierInProgram);
    }

    Model unbounded = simple_model("x, c", "x = 0 & c = 0",
                                   "while (x < 1) {x' = 1} end", "true");
    Box box2{{"x", {0, 0}}, {"c", {0, 0}}};
    try {
        simulate_run(unbounded, policy, box2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnboundedWhileDynamics);
    }

    // a clock-bounded evolution inside a while loop is fine
    Model bounded = simple_model("x, c", "x = 0 & c = 0",
                                 "while (x < 1) c := 0; {x' = 1, c' = 1 & c <= 0.25} end",
                                 "true");
    Trace t = simulate_run(bounded, policy, box2);
    CHECK(t.completed());
    CHECK(t.samples.back().values[0] >= 1.0);
}

TEST_CASE("unsatisfiable init conditions are reported") {
    Model m = simple_model("x", "x > 1 & x < 0", "?true", "true");
    SimPolicy policy;
    policy.assign_any_retries = 2;
    try {
        simulate_run(m, policy);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InitUnsatisfiableAfterRetries);
    }
}

TEST_CASE("policy validation") {
    SimPolicy bad;
    bad.ode_step = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = SimPolicy{};
    bad.assign_any_lo = 5;
    bad.assign_any_hi = 5;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("trace CSV export") {
    Model m = simple_model("x", "x = 1", "x := 2", "true");
    SimPolicy policy;
    Box box{{"x", {1, 1}}};
    Trace t = simulate_run(m, policy, box);
    std::string csv = trace_to_csv(t);
    CHECK(csv.rfind("time,x,tag\n", 0) == 0);
    CHECK(csv.find(",end\n") != std::string::npos);
    CHECK(csv.find("2") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "simulate.hpp"
#include "testutil.hpp"

using namespace hpk;

namespace {
const std::string kModelsDir = HPK_MODELS_DIR;
}

TEST_CASE("the corpus has the ten expected entries") {
    CHECK(corpus_names().size() == 10);
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        CHECK(e.name == name);
        CHECK((e.model.has_value() ^ e.graph.has_value()));
        CHECK(!e.description.empty());
        CHECK(!e.filename.empty());
        CHECK(!e.parameter_box.empty());
    }
    CHECK_THROWS_AS(get_model("nonsense"), Error);
}

TEST_CASE("golden files parse to the constructed trees") {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        std::string text = testutil::read_file(kModelsDir + "/" + e.filename);
        if (e.model) {
            Model parsed = parse_model(text);
            CHECK(equal(parsed, *e.model));
            // and printing the construction reproduces the file
            CHECK(pretty_print(*e.model) == text);
        } else {
            ActivityGraph parsed = parse_activity_graph(text);
            CHECK(equal(parsed, *e.graph));
            CHECK(pretty_print(*e.graph) == text);
        }
    }
}

TEST_CASE("every corpus model passes the declaration checks") {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        if (e.model) CHECK(check_model(*e.model).empty());
    }
}

TEST_CASE("parameter boxes cover the declared names") {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        const auto& vars = e.model ? e.model->variables : e.graph->variables;
        const auto& consts = e.model ? e.model->constants : e.graph->constants;
        for (const auto& v : vars) CHECK(e.parameter_box.count(v) == 1);
        for (const auto& c : consts) CHECK(e.parameter_box.count(c) == 1);
    }
}

TEST_CASE("the water tank guard prints in its canonical form") {
    Model wt = *get_model("watertank").model;
    auto& loop = std::get<HybridProgram::Star>(wt.program->node);
    auto& body = std::get<HybridProgram::Chop>(loop.body->node);
    auto& ctrl = std::get<HybridProgram::Chop>(body.first->node);
    auto& guard = std::get<HybridProgram::Quest>(ctrl.second->node);
    CHECK(pretty_print(guard.cond) == "f <= (M - x) / eps");
}

TEST_CASE("the one-dimensional robot carries the full obstacle margin") {
    std::string text = pretty_print(*get_model("swd1d").model);
    CHECK(text.find("v_r * v_r / (2 * B) + (A / B + 1) * (A / 2 * eps * eps + eps * v_r) + "
                    "V * (eps + (v_r + A * eps) / B)") != std::string::npos);
}

TEST_CASE("variant (i) distinguishes the orientation by disjunction") {
    Model v1 = *get_model("swd1d_variant_i").model;
    // the safe-acceleration branch tests a disjunction over o_r = -1 / o_r = 1
    auto& loop = std::get<HybridProgram::Star>(v1.program->node);
    auto& body = std::get<HybridProgram::Chop>(loop.body->node);
    auto& ctrl = std::get<HybridProgram::Choice>(body.first->node);
    auto& rest = std::get<HybridProgram::Choice>(ctrl.right->node);
    auto& safe_branch = std::get<HybridProgram::Chop>(rest.left->node);
    auto& safe_test = std::get<HybridProgram::Quest>(safe_branch.first->node);
    auto* disj = std::get_if<Formula::Or>(&safe_test.cond->node);
    REQUIRE(disj);
    auto* left = std::get_if<Formula::And>(&disj->left->node);
    REQUIRE(left);
    CHECK(pretty_print(left->left) == "o_r = -1");
    CHECK(equal(safe_test.cond, swd1d_safe_disjunction()));
}

TEST_CASE("disjunction and arithmetic safe encodings agree on the grid") {
    FormulaPtr by_disjunction = swd1d_safe_disjunction();
    FormulaPtr by_arithmetic = swd1d_safe_arithmetic();
    int points = 0;
    for (double o_r : {-1.0, 1.0}) {
        for (int vi = 0; vi < 10; ++vi) {
            double v_r = vi / 9.0;
            for (int xi = 0; xi < 500; ++xi) {
                double x_r = 1.0 + 18.0 * xi / 499.0;
                Valuation v(std::map<std::string, double>{
                    {"o_r", o_r}, {"v_r", v_r}, {"x_r", x_r}, {"A", 1}, {"B", 1},
                    {"eps", 0.5}, {"xb_lo", 0}, {"xb_hi", 20}});
                CHECK(eval_formula(by_disjunction, v) == eval_formula(by_arithmetic, v));
                ++points;
            }
        }
    }
    CHECK(points == 10000);
}

TEST_CASE("variant (iii) and (iv) antecedents agree on the grid") {
    Model v3 = *get_model("swd1d_variant_iii").model;
    Model v4 = *get_model("swd1d_variant_iv").model;
    for (double o_r : {-1.0, 1.0}) {
        for (int vi = 0; vi < 10; ++vi) {
            double v_r = vi / 9.0;
            for (int xi = 0; xi < 500; ++xi) {
                double x_r = 1.0 + 18.0 * xi / 499.0;
                Valuation v(std::map<std::string, double>{
                    {"o_r", o_r}, {"v_r", v_r}, {"x_r", x_r}, {"a_r", 0}, {"t", 0},
                    {"A", 1}, {"B", 1}, {"eps", 0.5}, {"xb_lo", 0}, {"xb_hi", 20}});
                CHECK(eval_formula(v3.init, v) == eval_formula(v4.init, v));
            }
        }
    }
}

TEST_CASE("turning by choice and by arithmetic reach the same orientations") {
    const std::vector<double> values = {-1, 0, 1};
    std::set<Valuation> start;
    for (double o : {-1.0, 1.0}) {
        start.insert(Valuation(std::map<std::string, double>{
            {"o_r", o}, {"v_r", 0}, {"a_r", 0}}));
    }
    auto by_choice = enumerate_reachable_discrete(swd1d_turn_by_choice(), start, values, 4);
    auto by_arith = enumerate_reachable_discrete(swd1d_turn_by_arithmetic(), start, values, 4);
    CHECK(by_choice == by_arith);
    std::set<double> orientations;
    for (const auto& v : by_choice) orientations.insert(v.get("o_r"));
    CHECK(orientations == std::set<double>{-1.0, 1.0});
}

TEST_CASE("initial sampling from the boxes satisfies the init conditions") {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        if (!e.model) continue;
        SimPolicy policy;
        policy.seed = 31337;
        Trace t = simulate_run(*e.model, policy, e.parameter_box);
        REQUIRE(!t.samples.empty());
        CHECK(eval_formula(e.model->init, t.valuation_at(0)));
    }
}

TEST_CASE("round-trip through print and parse for all corpus entries") {
    for (const auto& name : corpus_names()) {
        CorpusEntry e = get_model(name);
        if (e.model) {
            CHECK(equal(parse_model(pretty_print(*e.model)), *e.model));
        } else {
            CHECK(equal(parse_activity_graph(pretty_print(*e.graph)), *e.graph));
        }
    }
}

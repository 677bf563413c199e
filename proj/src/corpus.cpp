#include "corpus.hpp"

namespace hpk {

namespace {

TermPtr operator+(const TermPtr& a, const TermPtr& b) { return add(a, b); }
TermPtr operator-(const TermPtr& a, const TermPtr& b) { return sub(a, b); }
TermPtr operator*(const TermPtr& a, const TermPtr& b) { return mul(a, b); }
TermPtr operator/(const TermPtr& a, const TermPtr& b) { return divt(a, b); }
TermPtr operator-(const TermPtr& a) { return neg(a); }

FormulaPtr le(TermPtr a, TermPtr b) { return cmp(CompareOp::Le, std::move(a), std::move(b)); }
FormulaPtr lt(TermPtr a, TermPtr b) { return cmp(CompareOp::Lt, std::move(a), std::move(b)); }
FormulaPtr ge(TermPtr a, TermPtr b) { return cmp(CompareOp::Ge, std::move(a), std::move(b)); }
FormulaPtr gt(TermPtr a, TermPtr b) { return cmp(CompareOp::Gt, std::move(a), std::move(b)); }
FormulaPtr eq(TermPtr a, TermPtr b) { return cmp(CompareOp::Eq, std::move(a), std::move(b)); }

ProgramPtr fold_chop_left(const std::vector<ProgramPtr>& items) {
    ProgramPtr acc = items.front();
    for (std::size_t i = 1; i < items.size(); ++i) acc = chop(acc, items[i]);
    return acc;
}

// ---- water tank -------------------------------------------------------------

FormulaPtr watertank_level_bounds() {
    return land(le(num(0), var("x")), le(var("x"), var("M")));
}

FormulaPtr watertank_guard() {
    return le(var("f"), (var("M") - var("x")) / var("eps"));
}

ProgramPtr watertank_dyn_body() {
    return chop(assign("c", num(0)),
                continuous({{"x", var("f")}, {"c", num(1)}},
                           land(le(var("c"), var("eps")), ge(var("x"), num(0)))));
}

Model watertank_model() {
    Model m;
    m.name = "watertank";
    m.variables = {"x", "f", "c"};
    m.constants = {"M", "eps"};
    m.init = conj({le(num(0), var("x")), le(var("x"), var("M")), gt(var("eps"), num(0)),
                   ge(var("M"), num(0))});
    m.program = star(chop(chop(assign_any("f"), quest(watertank_guard())), watertank_dyn_body()));
    m.safety = watertank_level_bounds();
    m.loop_invariants[0] = watertank_level_bounds();
    return m;
}

ActivityGraph watertank_graph() {
    ActivityGraph g;
    g.name = "watertank";
    g.variables = {"x", "f", "c"};
    g.constants = {"M", "eps"};
    g.init = conj({le(num(0), var("x")), le(var("x"), var("M")), gt(var("eps"), num(0)),
                   ge(var("M"), num(0))});
    g.safety = watertank_level_bounds();
    g.nodes = {
        {"entry", NodeKind::Initial, {}, nullptr, nullptr, ""},
        {"loop_head", NodeKind::Decision, {}, nullptr, nullptr, ""},
        {"ctrl", NodeKind::Action, Stereotype::AssignAny, assign_any("f"), nullptr, ""},
        {"dyn", NodeKind::Action, Stereotype::Dynamics, watertank_dyn_body(), nullptr, ""},
        {"loop_end", NodeKind::Merge, {}, nullptr, nullptr, ""},
        {"exit", NodeKind::Final, {}, nullptr, nullptr, ""},
    };
    g.edges = {
        {"entry", "loop_head", nullptr, false, nullptr},
        {"loop_head", "ctrl", nullptr, false, nullptr},
        {"ctrl", "dyn", watertank_guard(), false, nullptr},
        {"dyn", "loop_end", nullptr, false, nullptr},
        {"loop_end", "exit", nullptr, false, nullptr},
        {"loop_head", "loop_end", nullptr, false, nullptr},
        {"loop_end", "loop_head", nullptr, true, watertank_level_bounds()},
    };
    return g;
}

Box watertank_box() {
    return {{"x", {0, 1}}, {"f", {0, 0}}, {"c", {0, 0}}, {"M", {1, 1}}, {"eps", {0.5, 0.5}}};
}

// ---- planar robot -----------------------------------------------------------

// Braking distance plus worst-case travel while accelerating for one cycle.
TermPtr accel_margin(const TermPtr& v) {
    TermPtr braking = v * v / (num(2) * var("B"));
    TermPtr worst = (var("A") / var("B") + num(1)) *
                    (var("A") / num(2) * var("eps") * var("eps") + var("eps") * v);
    return braking + worst;
}

TermPtr robot_maxnorm() {
    return call(CallFn::Max, {call(CallFn::Abs, {var("x") - var("xo")}),
                              call(CallFn::Abs, {var("y") - var("yo")})});
}

FormulaPtr robot_sense_guard() { return gt(robot_maxnorm(), accel_margin(var("v"))); }

FormulaPtr robot_invariant() {
    return land(ge(var("v"), num(0)),
                gt(robot_maxnorm(), var("v") * var("v") / (num(2) * var("B"))));
}

ProgramPtr robot_dyn_body() {
    return chop(assign("c", num(0)),
                continuous({{"x", var("v") * var("dx")},
                            {"y", var("v") * var("dy")},
                            {"dx", -var("v") * var("dy") / var("r")},
                            {"dy", var("v") * var("dx") / var("r")},
                            {"v", var("a")},
                            {"c", num(1)}},
                           land(ge(var("v"), num(0)), le(var("c"), var("eps")))));
}

FormulaPtr robot_accel_bounds() {
    return land(le(-var("B"), var("a")), le(var("a"), var("A")));
}

Model robot2d_model() {
    Model m;
    m.name = "robot2d";
    m.variables = {"x", "y", "dx", "dy", "v", "a", "r", "c", "xo", "yo"};
    m.constants = {"A", "B", "eps"};
    m.init = conj({ge(var("A"), num(0)), gt(var("B"), num(0)), gt(var("eps"), num(0)),
                   ge(var("v"), num(0)),
                   gt(robot_maxnorm(), var("v") * var("v") / (num(2) * var("B")))});
    ProgramPtr sense_branch = fold_chop_left({assign_any("xo"), assign_any("yo"),
                                              quest(robot_sense_guard()), assign_any("r"),
                                              quest(lnot(eq(var("r"), num(0)))), assign_any("a"),
                                              quest(robot_accel_bounds())});
    ProgramPtr brake = assign("a", -var("B"));
    ProgramPtr stop = chop(quest(eq(var("v"), num(0))), assign("a", num(0)));
    m.program = star(chop(choice(sense_branch, choice(brake, stop)), robot_dyn_body()));
    m.safety = gt((var("x") - var("xo")) * (var("x") - var("xo")) +
                      (var("y") - var("yo")) * (var("y") - var("yo")),
                  num(0));
    m.loop_invariants[0] = robot_invariant();
    return m;
}

ActivityGraph robot2d_graph() {
    const Model m = robot2d_model();
    ActivityGraph g;
    g.name = "robot2d";
    g.variables = m.variables;
    g.constants = m.constants;
    g.init = m.init;
    g.safety = m.safety;
    g.nodes = {
        {"entry", NodeKind::Initial, {}, nullptr, nullptr, ""},
        {"loop_head", NodeKind::Decision, {}, nullptr, nullptr, ""},
        {"choice_head", NodeKind::Decision, {}, nullptr, nullptr, ""},
        {"sense_xo", NodeKind::Action, Stereotype::AssignAny, assign_any("xo"), nullptr, ""},
        {"sense_yo", NodeKind::Action, Stereotype::AssignAny, assign_any("yo"), nullptr, ""},
        {"curve", NodeKind::Action, Stereotype::AssignAny, assign_any("r"), nullptr, ""},
        {"acc", NodeKind::Action, Stereotype::AssignAny, assign_any("a"), nullptr, ""},
        {"brake", NodeKind::Action, Stereotype::AssignTerm, assign("a", -var("B")), nullptr, ""},
        {"stop", NodeKind::Action, Stereotype::AssignTerm, assign("a", num(0)), nullptr, ""},
        {"choice_end", NodeKind::Merge, {}, nullptr, nullptr, ""},
        {"dyn", NodeKind::Action, Stereotype::Dynamics, robot_dyn_body(), robot_invariant(), ""},
        {"loop_end", NodeKind::Merge, {}, nullptr, nullptr, ""},
        {"exit", NodeKind::Final, {}, nullptr, nullptr, ""},
    };
    g.edges = {
        {"entry", "loop_head", nullptr, false, nullptr},
        {"loop_head", "choice_head", nullptr, false, nullptr},
        {"choice_head", "sense_xo", nullptr, false, nullptr},
        {"sense_xo", "sense_yo", nullptr, false, nullptr},
        {"sense_yo", "curve", robot_sense_guard(), false, nullptr},
        {"curve", "acc", lnot(eq(var("r"), num(0))), false, nullptr},
        {"acc", "choice_end", robot_accel_bounds(), false, nullptr},
        {"choice_head", "brake", nullptr, false, nullptr},
        {"brake", "choice_end", nullptr, false, nullptr},
        {"choice_head", "stop", eq(var("v"), num(0)), false, nullptr},
        {"stop", "choice_end", nullptr, false, nullptr},
        {"choice_end", "dyn", nullptr, false, nullptr},
        {"dyn", "loop_end", nullptr, false, nullptr},
        {"loop_end", "exit", nullptr, false, nullptr},
        {"loop_head", "loop_end", nullptr, false, nullptr},
        {"loop_end", "loop_head", nullptr, true, robot_invariant()},
    };
    return g;
}

Box robot2d_box() {
    return {{"x", {-5, 5}},  {"y", {-5, 5}},  {"dx", {0, 1}}, {"dy", {0, 1}},
            {"v", {0, 1}},   {"a", {0, 0}},   {"r", {0.5, 2}}, {"c", {0, 0}},
            {"xo", {-5, 5}}, {"yo", {-5, 5}}, {"A", {1, 1}},  {"B", {1, 1}},
            {"eps", {0.5, 0.5}}};
}

// ---- one-dimensional robot (single wheel drive) ------------------------------

TermPtr swd_brake_margin() { return var("v_r") * var("v_r") / (num(2) * var("B")); }

// Orientation selects which bound needs the margin: (1-o)/2 and (1+o)/2
// vanish for o = 1 and o = -1 respectively.
FormulaPtr swd_bounds_with(const TermPtr& margin) {
    return land(lt(var("xb_lo") + (num(1) - var("o_r")) / num(2) * margin, var("x_r")),
                lt(var("x_r"), var("xb_hi") - (num(1) + var("o_r")) / num(2) * margin));
}

FormulaPtr swd_obstacle_clause() {
    TermPtr obstacle_travel = var("V") * (var("eps") + (var("v_r") + var("A") * var("eps")) / var("B"));
    return ge(call(CallFn::Abs, {var("x_r") - var("x_o")}),
              accel_margin(var("v_r")) + obstacle_travel);
}

ProgramPtr swd_brake() { return assign("a_r", -var("B")); }

ProgramPtr swd_safe_accel(const FormulaPtr& safe) {
    return seq({quest(safe), assign_any("a_r"),
                quest(land(le(-var("B"), var("a_r")), le(var("a_r"), var("A"))))});
}

FormulaPtr swd_stoppable_bounds() {
    return conj({lt(var("xb_lo") + (num(1) - var("o_r")) / num(2) * swd_brake_margin(), var("x_r")),
                 lt(var("x_r"), var("xb_hi") - (num(1) + var("o_r")) / num(2) * swd_brake_margin()),
                 ge(var("v_r"), num(0))});
}

std::vector<FormulaPtr> swd_consts_ok() {
    return {ge(var("A"), num(0)), gt(var("B"), num(0)), gt(var("eps"), num(0)),
            lt(var("xb_lo"), var("xb_hi"))};
}

Model swd1d_model() {
    Model m;
    m.name = "swd1d";
    m.variables = {"x_r", "v_r", "a_r", "o_r", "x_o", "v_o", "o_o", "t"};
    m.constants = {"A", "B", "V", "eps", "xb_lo", "xb_hi"};

    FormulaPtr safe = land(swd_bounds_with(accel_margin(var("v_r"))), swd_obstacle_clause());
    ProgramPtr ctrl_r = choice(swd_brake(), choice(swd_safe_accel(safe), swd1d_turn_by_arithmetic()));
    ProgramPtr obstacle_turn = seq({quest(eq(var("v_o"), num(0))), assign_any("o_o"),
                                    quest(eq(var("o_o") * var("o_o"), num(1)))});
    ProgramPtr obstacle_velocity = seq({assign_any("v_o"),
                                        quest(land(le(num(0), var("v_o")), le(var("v_o"), var("V"))))});
    ProgramPtr ctrl_o = choice(obstacle_turn, obstacle_velocity);
    ProgramPtr dyn = seq({assign("t", num(0)),
                          continuous({{"x_r", var("o_r") * var("v_r")},
                                      {"v_r", var("a_r")},
                                      {"x_o", var("o_o") * var("v_o")},
                                      {"t", num(1)}},
                                     conj({ge(var("v_r"), num(0)), ge(var("v_o"), num(0)),
                                           le(var("t"), var("eps"))}))});
    m.program = star(chop(chop(ctrl_r, ctrl_o), dyn));

    // Stoppable: room to brake to a stand-still before the obstacle (which
    // may close in at up to V during the braking time v_r/B) or either bound.
    FormulaPtr stoppable =
        conj({ge(call(CallFn::Abs, {var("x_r") - var("x_o")}),
                 swd_brake_margin() + var("V") * var("v_r") / var("B")),
              lt(var("xb_lo") + (num(1) - var("o_r")) / num(2) * swd_brake_margin(), var("x_r")),
              lt(var("x_r"), var("xb_hi") - (num(1) + var("o_r")) / num(2) * swd_brake_margin()),
              ge(var("v_r"), num(0)), eq(var("o_r") * var("o_r"), num(1)),
              eq(var("o_o") * var("o_o"), num(1)), le(num(0), var("v_o")),
              le(var("v_o"), var("V"))});

    std::vector<FormulaPtr> init_parts = swd_consts_ok();
    init_parts.push_back(ge(var("V"), num(0)));
    init_parts.push_back(stoppable);
    m.init = conj(std::move(init_parts));
    m.safety = conj({implies(gt(var("v_r"), num(0)),
                             gt(call(CallFn::Abs, {var("x_r") - var("x_o")}), num(0))),
                     lt(var("xb_lo"), var("x_r")), lt(var("x_r"), var("xb_hi"))});
    m.loop_invariants[0] = stoppable;
    return m;
}

Box swd1d_box() {
    return {{"A", {1, 1}},     {"B", {1, 1}},      {"V", {0.5, 0.5}}, {"eps", {0.5, 0.5}},
            {"xb_lo", {0, 0}}, {"xb_hi", {20, 20}}, {"x_r", {1, 19}},  {"v_r", {0, 1}},
            {"a_r", {0, 0}},   {"o_r", {-1, 1}},   {"x_o", {0, 20}},  {"v_o", {0, 0.5}},
            {"o_o", {-1, 1}},  {"t", {0, 0}}};
}

enum class Antecedent { KnownDirection, Disjunction, Arithmetic };
enum class TurnStyle { Choice, Arithmetic };

Model swd1d_variant(const std::string& name, const FormulaPtr& safe, Antecedent antecedent,
                    TurnStyle turn_style) {
    Model m;
    m.name = name;
    m.variables = {"x_r", "v_r", "a_r", "o_r", "t"};
    m.constants = {"A", "B", "eps", "xb_lo", "xb_hi"};

    ProgramPtr turn =
        turn_style == TurnStyle::Choice ? swd1d_turn_by_choice() : swd1d_turn_by_arithmetic();
    ProgramPtr ctrl_r = choice(swd_brake(), choice(swd_safe_accel(safe), turn));
    ProgramPtr dyn = seq({assign("t", num(0)),
                          continuous({{"x_r", var("o_r") * var("v_r")},
                                      {"v_r", var("a_r")},
                                      {"t", num(1)}},
                                     land(ge(var("v_r"), num(0)), le(var("t"), var("eps"))))});
    m.program = star(chop(ctrl_r, dyn));

    std::vector<FormulaPtr> init_parts = swd_consts_ok();
    switch (antecedent) {
    case Antecedent::KnownDirection: init_parts.push_back(eq(var("o_r"), num(1))); break;
    case Antecedent::Disjunction:
        init_parts.push_back(lor(eq(var("o_r"), num(1)), eq(var("o_r"), neg(num(1)))));
        break;
    case Antecedent::Arithmetic:
        init_parts.push_back(eq(var("o_r") * var("o_r"), num(1)));
        break;
    }
    init_parts.push_back(swd_stoppable_bounds());
    m.init = conj(std::move(init_parts));
    m.safety = land(lt(var("xb_lo"), var("x_r")), lt(var("x_r"), var("xb_hi")));
    m.loop_invariants[0] = land(eq(var("o_r") * var("o_r"), num(1)), swd_stoppable_bounds());
    return m;
}

Box swd1d_variant_box(bool known_direction) {
    Box box = {{"A", {1, 1}},      {"B", {1, 1}},    {"eps", {0.5, 0.5}}, {"xb_lo", {0, 0}},
               {"xb_hi", {20, 20}}, {"x_r", {1, 19}}, {"v_r", {0, 1}},     {"a_r", {0, 0}},
               {"t", {0, 0}}};
    box["o_r"] = known_direction ? std::make_pair(1.0, 1.0) : std::make_pair(-1.0, 1.0);
    return box;
}

} // namespace

FormulaPtr swd1d_safe_arithmetic() { return swd_bounds_with(accel_margin(var("v_r"))); }

FormulaPtr swd1d_safe_disjunction() {
    TermPtr margin = accel_margin(var("v_r"));
    return lor(land(eq(var("o_r"), neg(num(1))), lt(var("xb_lo") + margin, var("x_r"))),
               land(eq(var("o_r"), num(1)), lt(var("x_r"), var("xb_hi") - margin)));
}

ProgramPtr swd1d_turn_by_choice() {
    return choice(seq({quest(eq(var("v_r"), num(0))), assign("a_r", num(0)),
                       assign("o_r", -var("o_r"))}),
                  seq({quest(eq(var("v_r"), num(0))), assign("a_r", num(0))}));
}

ProgramPtr swd1d_turn_by_arithmetic() {
    return seq({quest(eq(var("v_r"), num(0))), assign("a_r", num(0)), assign_any("o_r"),
                quest(eq(var("o_r") * var("o_r"), num(1)))});
}

const std::vector<std::string>& corpus_names() {
    static const std::vector<std::string> names = {
        "watertank",       "watertank_graph",  "robot2d",          "robot2d_graph",
        "swd1d",           "swd1d_variant_i",  "swd1d_variant_ii", "swd1d_variant_iii",
        "swd1d_variant_iv", "swd1d_variant_v",
    };
    return names;
}

CorpusEntry get_model(const std::string& name) {
    CorpusEntry e;
    e.name = name;
    if (name == "watertank") {
        e.model = watertank_model();
        e.parameter_box = watertank_box();
        e.description = "Water tank whose inflow is re-chosen once per cycle; the level must stay "
                        "between empty and the maximum.";
        e.filename = "watertank.hpk";
    } else if (name == "watertank_graph") {
        e.graph = watertank_graph();
        e.parameter_box = watertank_box();
        e.description = "Activity-graph form of the water tank: a controller/dynamics loop with a "
                        "guarded hand-over.";
        e.filename = "watertank.hpg";
    } else if (name == "robot2d") {
        e.model = robot2d_model();
        e.parameter_box = robot2d_box();
        e.description = "Planar robot on circular arcs avoiding a sensed obstacle; accelerates "
                        "only when the measured distance covers the worst case.";
        e.filename = "robot2d.hpk";
    } else if (name == "robot2d_graph") {
        e.graph = robot2d_graph();
        e.parameter_box = robot2d_box();
        e.description = "Activity-graph form of the planar robot controller and dynamics.";
        e.filename = "robot2d.hpg";
    } else if (name == "swd1d") {
        e.model = swd1d_model();
        e.parameter_box = swd1d_box();
        e.description = "One-dimensional robot between two bounds with a moving obstacle; brake, "
                        "safe acceleration, and turn-on-standstill controls.";
        e.filename = "swd1d.hpk";
    } else if (name == "swd1d_variant_i") {
        e.model = swd1d_variant("swd1d_variant_i", swd1d_safe_disjunction(),
                                Antecedent::KnownDirection, TurnStyle::Choice);
        e.parameter_box = swd1d_variant_box(true);
        e.description = "Obstacle-free variant: known starting direction, safety bound split by "
                        "disjunction, turning as explicit choice.";
        e.filename = "swd1d_variant_i.hpk";
    } else if (name == "swd1d_variant_ii") {
        e.model = swd1d_variant("swd1d_variant_ii", swd1d_safe_arithmetic(),
                                Antecedent::KnownDirection, TurnStyle::Choice);
        e.parameter_box = swd1d_variant_box(true);
        e.description = "Obstacle-free variant: known starting direction, orientation folded into "
                        "the arithmetic of the safety bound.";
        e.filename = "swd1d_variant_ii.hpk";
    } else if (name == "swd1d_variant_iii") {
        e.model = swd1d_variant("swd1d_variant_iii", swd1d_safe_disjunction(),
                                Antecedent::Disjunction, TurnStyle::Choice);
        e.parameter_box = swd1d_variant_box(false);
        e.description = "Obstacle-free variant: arbitrary starting direction stated as a "
                        "disjunction.";
        e.filename = "swd1d_variant_iii.hpk";
    } else if (name == "swd1d_variant_iv") {
        e.model = swd1d_variant("swd1d_variant_iv", swd1d_safe_arithmetic(),
                                Antecedent::Arithmetic, TurnStyle::Choice);
        e.parameter_box = swd1d_variant_box(false);
        e.description = "Obstacle-free variant: arbitrary starting direction stated as o_r*o_r = 1.";
        e.filename = "swd1d_variant_iv.hpk";
    } else if (name == "swd1d_variant_v") {
        e.model = swd1d_variant("swd1d_variant_v", swd1d_safe_arithmetic(),
                                Antecedent::Arithmetic, TurnStyle::Arithmetic);
        e.parameter_box = swd1d_variant_box(false);
        e.description = "Obstacle-free variant: turning choice replaced by a nondeterministic "
                        "assignment guarded with o_r*o_r = 1.";
        e.filename = "swd1d_variant_v.hpk";
    } else {
        throw Error(ErrorCode::UnknownName, "unknown corpus entry '" + name + "'");
    }
    return e;
}

} // namespace hpk

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

// Abstract syntax for terms, formulas, hybrid programs and models.
// All nodes are immutable after construction and shared via shared_ptr,
// so trees may be freely aliased across threads.

namespace hpk {

struct Term;
struct Formula;
struct HybridProgram;

using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;
using ProgramPtr = std::shared_ptr<const HybridProgram>;

enum class UnaryOp { Negate };
enum class BinaryOp { Add, Sub, Mul, Div };
enum class CallFn { Abs, Max, Min };
enum class CompareOp { Lt, Le, Eq, Ge, Gt };

struct Term {
    struct Number { double value; };
    struct Variable { std::string name; };
    struct Unary { UnaryOp op; TermPtr arg; };
    struct Binary { BinaryOp op; TermPtr left; TermPtr right; };
    struct Call { CallFn fn; std::vector<TermPtr> args; };

    std::variant<Number, Variable, Unary, Binary, Call> node;
};

struct Formula {
    struct Compare { CompareOp op; TermPtr left; TermPtr right; };
    struct Not { FormulaPtr arg; };
    struct And { FormulaPtr left; FormulaPtr right; };
    struct Or { FormulaPtr left; FormulaPtr right; };
    struct Implies { FormulaPtr left; FormulaPtr right; };
    struct Equiv { FormulaPtr left; FormulaPtr right; };
    struct Forall { std::string var; FormulaPtr body; };
    struct Exists { std::string var; FormulaPtr body; };
    struct Box { ProgramPtr program; FormulaPtr post; };
    struct Diamond { ProgramPtr program; FormulaPtr post; };
    struct BoolConst { bool value; };

    std::variant<Compare, Not, And, Or, Implies, Equiv, Forall, Exists, Box,
                 Diamond, BoolConst>
        node;
};

struct HybridProgram {
    struct Chop { ProgramPtr first; ProgramPtr second; };
    struct Choice { ProgramPtr left; ProgramPtr right; };
    struct Star { ProgramPtr body; };
    struct Assign { std::string var; TermPtr term; };
    struct AssignAny { std::string var; };
    // Each evolved variable appears at most once on a left-hand side.
    struct ContinuousEvolution {
        std::vector<std::pair<std::string, TermPtr>> equations;
        FormulaPtr domain;
    };
    struct Quest { FormulaPtr cond; };
    struct IfThenElse { FormulaPtr cond; ProgramPtr then_branch; ProgramPtr else_branch; /* may be null */ };
    struct WhileSym { FormulaPtr cond; ProgramPtr body; };
    struct Placeholder { std::string label; };

    std::variant<Chop, Choice, Star, Assign, AssignAny, ContinuousEvolution,
                 Quest, IfThenElse, WhileSym, Placeholder>
        node;
};

// A named model: declarations, initial condition, program, safety condition
// and loop invariants keyed by the preorder index of their Star node.
struct Model {
    std::string name;
    std::vector<std::string> variables;
    std::vector<std::string> constants;
    FormulaPtr init;
    ProgramPtr program;
    FormulaPtr safety;
    std::map<std::size_t, FormulaPtr> loop_invariants;
};

// Construction helpers. Call arity is checked here (abs=1, max=2, min=2).
TermPtr num(double value);
TermPtr var(const std::string& name);
TermPtr neg(TermPtr arg);
TermPtr binop(BinaryOp op, TermPtr left, TermPtr right);
TermPtr add(TermPtr l, TermPtr r);
TermPtr sub(TermPtr l, TermPtr r);
TermPtr mul(TermPtr l, TermPtr r);
TermPtr divt(TermPtr l, TermPtr r);
TermPtr call(CallFn fn, std::vector<TermPtr> args);

FormulaPtr cmp(CompareOp op, TermPtr l, TermPtr r);
FormulaPtr lnot(FormulaPtr f);
FormulaPtr land(FormulaPtr l, FormulaPtr r);
FormulaPtr lor(FormulaPtr l, FormulaPtr r);
FormulaPtr implies(FormulaPtr l, FormulaPtr r);
FormulaPtr equiv(FormulaPtr l, FormulaPtr r);
FormulaPtr forall(std::string v, FormulaPtr body);
FormulaPtr exists(std::string v, FormulaPtr body);
FormulaPtr box(ProgramPtr p, FormulaPtr post);
FormulaPtr diamond(ProgramPtr p, FormulaPtr post);
FormulaPtr btrue();
FormulaPtr bfalse();
// Right-nested conjunction of one or more conjuncts.
FormulaPtr conj(std::vector<FormulaPtr> fs);

ProgramPtr chop(ProgramPtr a, ProgramPtr b);
ProgramPtr choice(ProgramPtr a, ProgramPtr b);
ProgramPtr star(ProgramPtr body);
ProgramPtr assign(std::string v, TermPtr t);
ProgramPtr assign_any(std::string v);
ProgramPtr continuous(std::vector<std::pair<std::string, TermPtr>> eqs, FormulaPtr domain);
ProgramPtr quest(FormulaPtr f);
ProgramPtr if_then_else(FormulaPtr cond, ProgramPtr then_branch, ProgramPtr else_branch);
ProgramPtr while_sym(FormulaPtr cond, ProgramPtr body);
ProgramPtr placeholder(std::string label);
// Right-nested chop/choice of one or more programs.
ProgramPtr seq(std::vector<ProgramPtr> ps);
ProgramPtr alt(std::vector<ProgramPtr> ps);

bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const ProgramPtr& a, const ProgramPtr& b);
bool equal(const Model& a, const Model& b);

std::set<std::string> free_variables(const TermPtr& t);
std::set<std::string> free_variables(const FormulaPtr& f);
std::set<std::string> free_variables(const ProgramPtr& p);

// Variables written by Assign/AssignAny or evolved by a ContinuousEvolution.
std::set<std::string> write_set(const ProgramPtr& p);

bool contains_placeholder(const ProgramPtr& p);
bool contains_continuous(const ProgramPtr& p);

// Declaration discipline: every free variable declared, no constant written,
// no duplicate declarations. Returns human-readable problem descriptions;
// empty means the model is well-formed.
std::vector<std::string> check_model(const Model& m);

// Stars of p in preorder; index in the result is the star's invariant key.
std::vector<ProgramPtr> stars_preorder(const ProgramPtr& p);

} // namespace hpk

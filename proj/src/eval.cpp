#include "eval.hpp"

#include <cmath>

namespace hpk {

namespace {
template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;
} // namespace

double eval_term(const TermPtr& t, const Valuation& v) {
    return std::visit(
        overloaded{
            [&](const Term::Number& n) { return n.value; },
            [&](const Term::Variable& x) { return v.get(x.name); },
            [&](const Term::Unary& u) { return -eval_term(u.arg, v); },
            [&](const Term::Binary& b) {
                double l = eval_term(b.left, v);
                double r = eval_term(b.right, v);
                switch (b.op) {
                case BinaryOp::Add: return l + r;
                case BinaryOp::Sub: return l - r;
                case BinaryOp::Mul: return l * r;
                case BinaryOp::Div:
                    if (r == 0.0) throw Error(ErrorCode::DivisionByZero, "division by zero");
                    return l / r;
                }
                return 0.0;
            },
            [&](const Term::Call& c) {
                switch (c.fn) {
                case CallFn::Abs: return std::fabs(eval_term(c.args[0], v));
                case CallFn::Max: return std::fmax(eval_term(c.args[0], v), eval_term(c.args[1], v));
                case CallFn::Min: return std::fmin(eval_term(c.args[0], v), eval_term(c.args[1], v));
                }
                return 0.0;
            },
        },
        t->node);
}

bool eval_formula(const FormulaPtr& f, const Valuation& v) {
    return std::visit(
        overloaded{
            [&](const Formula::Compare& c) {
                double l = eval_term(c.left, v);
                double r = eval_term(c.right, v);
                switch (c.op) {
                case CompareOp::Lt: return l < r;
                case CompareOp::Le: return l <= r;
                case CompareOp::Eq: return l == r;
                case CompareOp::Ge: return l >= r;
                case CompareOp::Gt: return l > r;
                }
                return false;
            },
            [&](const Formula::Not& n) { return !eval_formula(n.arg, v); },
            [&](const Formula::And& b) { return eval_formula(b.left, v) && eval_formula(b.right, v); },
            [&](const Formula::Or& b) { return eval_formula(b.left, v) || eval_formula(b.right, v); },
            [&](const Formula::Implies& b) {
                return !eval_formula(b.left, v) || eval_formula(b.right, v);
            },
            [&](const Formula::Equiv& b) {
                return eval_formula(b.left, v) == eval_formula(b.right, v);
            },
            [&](const Formula::Forall&) -> bool {
                throw Error(ErrorCode::UnsupportedConstruct, "cannot evaluate quantifier");
            },
            [&](const Formula::Exists&) -> bool {
                throw Error(ErrorCode::UnsupportedConstruct, "cannot evaluate quantifier");
            },
            [&](const Formula::Box&) -> bool {
                throw Error(ErrorCode::UnsupportedConstruct, "cannot evaluate modality");
            },
            [&](const Formula::Diamond&) -> bool {
                throw Error(ErrorCode::UnsupportedConstruct, "cannot evaluate modality");
            },
            [&](const Formula::BoolConst& b) { return b.value; },
        },
        f->node);
}

} // namespace hpk

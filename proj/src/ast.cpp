#include "ast.hpp"

#include <algorithm>

namespace hpk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

std::size_t call_arity(CallFn fn) {
    switch (fn) {
    case CallFn::Abs: return 1;
    case CallFn::Max: return 2;
    case CallFn::Min: return 2;
    }
    return 0;
}

} // namespace

TermPtr num(double value) { return std::make_shared<Term>(Term{Term::Number{value}}); }
TermPtr var(const std::string& name) { return std::make_shared<Term>(Term{Term::Variable{name}}); }
TermPtr neg(TermPtr arg) { return std::make_shared<Term>(Term{Term::Unary{UnaryOp::Negate, std::move(arg)}}); }
TermPtr binop(BinaryOp op, TermPtr l, TermPtr r) {
    return std::make_shared<Term>(Term{Term::Binary{op, std::move(l), std::move(r)}});
}
TermPtr add(TermPtr l, TermPtr r) { return binop(BinaryOp::Add, std::move(l), std::move(r)); }
TermPtr sub(TermPtr l, TermPtr r) { return binop(BinaryOp::Sub, std::move(l), std::move(r)); }
TermPtr mul(TermPtr l, TermPtr r) { return binop(BinaryOp::Mul, std::move(l), std::move(r)); }
TermPtr divt(TermPtr l, TermPtr r) { return binop(BinaryOp::Div, std::move(l), std::move(r)); }

TermPtr call(CallFn fn, std::vector<TermPtr> args) {
    if (args.size() != call_arity(fn))
        throw Error(ErrorCode::UnsupportedConstruct, "wrong call arity");
    return std::make_shared<Term>(Term{Term::Call{fn, std::move(args)}});
}

FormulaPtr cmp(CompareOp op, TermPtr l, TermPtr r) {
    return std::make_shared<Formula>(Formula{Formula::Compare{op, std::move(l), std::move(r)}});
}
FormulaPtr lnot(FormulaPtr f) { return std::make_shared<Formula>(Formula{Formula::Not{std::move(f)}}); }
FormulaPtr land(FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(Formula{Formula::And{std::move(l), std::move(r)}});
}
FormulaPtr lor(FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(Formula{Formula::Or{std::move(l), std::move(r)}});
}
FormulaPtr implies(FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(Formula{Formula::Implies{std::move(l), std::move(r)}});
}
FormulaPtr equiv(FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(Formula{Formula::Equiv{std::move(l), std::move(r)}});
}
FormulaPtr forall(std::string v, FormulaPtr body) {
    return std::make_shared<Formula>(Formula{Formula::Forall{std::move(v), std::move(body)}});
}
FormulaPtr exists(std::string v, FormulaPtr body) {
    return std::make_shared<Formula>(Formula{Formula::Exists{std::move(v), std::move(body)}});
}
FormulaPtr box(ProgramPtr p, FormulaPtr post) {
    return std::make_shared<Formula>(Formula{Formula::Box{std::move(p), std::move(post)}});
}
FormulaPtr diamond(ProgramPtr p, FormulaPtr post) {
    return std::make_shared<Formula>(Formula{Formula::Diamond{std::move(p), std::move(post)}});
}
FormulaPtr btrue() {
    static const FormulaPtr t = std::make_shared<Formula>(Formula{Formula::BoolConst{true}});
    return t;
}
FormulaPtr bfalse() {
    static const FormulaPtr f = std::make_shared<Formula>(Formula{Formula::BoolConst{false}});
    return f;
}

FormulaPtr conj(std::vector<FormulaPtr> fs) {
    if (fs.empty()) return btrue();
    FormulaPtr acc = fs.back();
    for (auto it = fs.rbegin() + 1; it != fs.rend(); ++it) acc = land(*it, acc);
    return acc;
}

ProgramPtr chop(ProgramPtr a, ProgramPtr b) {
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::Chop{std::move(a), std::move(b)}});
}
ProgramPtr choice(ProgramPtr a, ProgramPtr b) {
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::Choice{std::move(a), std::move(b)}});
}
ProgramPtr star(ProgramPtr body) {
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::Star{std::move(body)}});
}
ProgramPtr assign(std::string v, TermPtr t) {
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::Assign{std::move(v), std::move(t)}});
}
ProgramPtr assign_any(std::string v) {
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::AssignAny{std::move(v)}});
}
ProgramPtr continuous(std::vector<std::pair<std::string, TermPtr>> eqs, FormulaPtr domain) {
    if (eqs.empty())
        throw Error(ErrorCode::UnsupportedConstruct, "continuous evolution needs at least one equation");
    for (std::size_t i = 0; i < eqs.size(); ++i)
        for (std::size_t j = i + 1; j < eqs.size(); ++j)
            if (eqs[i].first == eqs[j].first)
                throw Error(ErrorCode::UnsupportedConstruct,
                            "variable '" + eqs[i].first + "' evolved twice");
    return std::make_shared<HybridProgram>(
        HybridProgram{HybridProgram::ContinuousEvolution{std::move(eqs), std::move(domain)}});
}
ProgramPtr quest(FormulaPtr f) {
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::Quest{std::move(f)}});
}
ProgramPtr if_then_else(FormulaPtr cond, ProgramPtr then_branch, ProgramPtr else_branch) {
    return std::make_shared<HybridProgram>(HybridProgram{
        HybridProgram::IfThenElse{std::move(cond), std::move(then_branch), std::move(else_branch)}});
}
ProgramPtr while_sym(FormulaPtr cond, ProgramPtr body) {
    return std::make_shared<HybridProgram>(
        HybridProgram{HybridProgram::WhileSym{std::move(cond), std::move(body)}});
}
ProgramPtr placeholder(std::string label) {
    if (label.empty())
        throw Error(ErrorCode::UnsupportedConstruct, "placeholder label must be non-empty");
    if (label.find('"') != std::string::npos || label.find('\n') != std::string::npos)
        throw Error(ErrorCode::UnsupportedConstruct,
                    "placeholder label cannot contain quotes or newlines");
    return std::make_shared<HybridProgram>(HybridProgram{HybridProgram::Placeholder{std::move(label)}});
}

ProgramPtr seq(std::vector<ProgramPtr> ps) {
    if (ps.empty()) return quest(btrue());
    ProgramPtr acc = ps.back();
    for (auto it = ps.rbegin() + 1; it != ps.rend(); ++it) acc = chop(*it, acc);
    return acc;
}
ProgramPtr alt(std::vector<ProgramPtr> ps) {
    if (ps.empty()) return quest(bfalse());
    ProgramPtr acc = ps.back();
    for (auto it = ps.rbegin() + 1; it != ps.rend(); ++it) acc = choice(*it, acc);
    return acc;
}

bool equal(const TermPtr& a, const TermPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const Term::Number& x) { return x.value == std::get<Term::Number>(b->node).value; },
            [&](const Term::Variable& x) { return x.name == std::get<Term::Variable>(b->node).name; },
            [&](const Term::Unary& x) {
                const auto& y = std::get<Term::Unary>(b->node);
                return x.op == y.op && equal(x.arg, y.arg);
            },
            [&](const Term::Binary& x) {
                const auto& y = std::get<Term::Binary>(b->node);
                return x.op == y.op && equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Term::Call& x) {
                const auto& y = std::get<Term::Call>(b->node);
                if (x.fn != y.fn || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!equal(x.args[i], y.args[i])) return false;
                return true;
            },
        },
        a->node);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const Formula::Compare& x) {
                const auto& y = std::get<Formula::Compare>(b->node);
                return x.op == y.op && equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Formula::Not& x) { return equal(x.arg, std::get<Formula::Not>(b->node).arg); },
            [&](const Formula::And& x) {
                const auto& y = std::get<Formula::And>(b->node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Formula::Or& x) {
                const auto& y = std::get<Formula::Or>(b->node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Formula::Implies& x) {
                const auto& y = std::get<Formula::Implies>(b->node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Formula::Equiv& x) {
                const auto& y = std::get<Formula::Equiv>(b->node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const Formula::Forall& x) {
                const auto& y = std::get<Formula::Forall>(b->node);
                return x.var == y.var && equal(x.body, y.body);
            },
            [&](const Formula::Exists& x) {
                const auto& y = std::get<Formula::Exists>(b->node);
                return x.var == y.var && equal(x.body, y.body);
            },
            [&](const Formula::Box& x) {
                const auto& y = std::get<Formula::Box>(b->node);
                return equal(x.program, y.program) && equal(x.post, y.post);
            },
            [&](const Formula::Diamond& x) {
                const auto& y = std::get<Formula::Diamond>(b->node);
                return equal(x.program, y.program) && equal(x.post, y.post);
            },
            [&](const Formula::BoolConst& x) {
                return x.value == std::get<Formula::BoolConst>(b->node).value;
            },
        },
        a->node);
}

bool equal(const ProgramPtr& a, const ProgramPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->node.index() != b->node.index()) return false;
    using HP = HybridProgram;
    return std::visit(
        overloaded{
            [&](const HP::Chop& x) {
                const auto& y = std::get<HP::Chop>(b->node);
                return equal(x.first, y.first) && equal(x.second, y.second);
            },
            [&](const HP::Choice& x) {
                const auto& y = std::get<HP::Choice>(b->node);
                return equal(x.left, y.left) && equal(x.right, y.right);
            },
            [&](const HP::Star& x) { return equal(x.body, std::get<HP::Star>(b->node).body); },
            [&](const HP::Assign& x) {
                const auto& y = std::get<HP::Assign>(b->node);
                return x.var == y.var && equal(x.term, y.term);
            },
            [&](const HP::AssignAny& x) { return x.var == std::get<HP::AssignAny>(b->node).var; },
            [&](const HP::ContinuousEvolution& x) {
                const auto& y = std::get<HP::ContinuousEvolution>(b->node);
                if (x.equations.size() != y.equations.size()) return false;
                for (std::size_t i = 0; i < x.equations.size(); ++i) {
                    if (x.equations[i].first != y.equations[i].first) return false;
                    if (!equal(x.equations[i].second, y.equations[i].second)) return false;
                }
                return equal(x.domain, y.domain);
            },
            [&](const HP::Quest& x) { return equal(x.cond, std::get<HP::Quest>(b->node).cond); },
            [&](const HP::IfThenElse& x) {
                const auto& y = std::get<HP::IfThenElse>(b->node);
                if (!equal(x.cond, y.cond) || !equal(x.then_branch, y.then_branch)) return false;
                if ((x.else_branch == nullptr) != (y.else_branch == nullptr)) return false;
                return x.else_branch == nullptr || equal(x.else_branch, y.else_branch);
            },
            [&](const HP::WhileSym& x) {
                const auto& y = std::get<HP::WhileSym>(b->node);
                return equal(x.cond, y.cond) && equal(x.body, y.body);
            },
            [&](const HP::Placeholder& x) {
                return x.label == std::get<HP::Placeholder>(b->node).label;
            },
        },
        a->node);
}

bool equal(const Model& a, const Model& b) {
    if (a.name != b.name || a.variables != b.variables || a.constants != b.constants) return false;
    if (!equal(a.init, b.init) || !equal(a.program, b.program) || !equal(a.safety, b.safety))
        return false;
    if (a.loop_invariants.size() != b.loop_invariants.size()) return false;
    auto ia = a.loop_invariants.begin();
    auto ib = b.loop_invariants.begin();
    for (; ia != a.loop_invariants.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !equal(ia->second, ib->second)) return false;
    }
    return true;
}

namespace {

void collect(const TermPtr& t, std::set<std::string>& out) {
    std::visit(overloaded{
                   [&](const Term::Number&) {},
                   [&](const Term::Variable& v) { out.insert(v.name); },
                   [&](const Term::Unary& u) { collect(u.arg, out); },
                   [&](const Term::Binary& b) { collect(b.left, out); collect(b.right, out); },
                   [&](const Term::Call& c) { for (const auto& a : c.args) collect(a, out); },
               },
               t->node);
}

void collect(const FormulaPtr& f, std::set<std::string>& out);
void collect(const ProgramPtr& p, std::set<std::string>& out);

void collect(const FormulaPtr& f, std::set<std::string>& out) {
    std::visit(overloaded{
                   [&](const Formula::Compare& c) { collect(c.left, out); collect(c.right, out); },
                   [&](const Formula::Not& n) { collect(n.arg, out); },
                   [&](const Formula::And& b) { collect(b.left, out); collect(b.right, out); },
                   [&](const Formula::Or& b) { collect(b.left, out); collect(b.right, out); },
                   [&](const Formula::Implies& b) { collect(b.left, out); collect(b.right, out); },
                   [&](const Formula::Equiv& b) { collect(b.left, out); collect(b.right, out); },
                   [&](const Formula::Forall& q) {
                       std::set<std::string> inner;
                       collect(q.body, inner);
                       inner.erase(q.var);
                       out.insert(inner.begin(), inner.end());
                   },
                   [&](const Formula::Exists& q) {
                       std::set<std::string> inner;
                       collect(q.body, inner);
                       inner.erase(q.var);
                       out.insert(inner.begin(), inner.end());
                   },
                   [&](const Formula::Box& m) { collect(m.program, out); collect(m.post, out); },
                   [&](const Formula::Diamond& m) { collect(m.program, out); collect(m.post, out); },
                   [&](const Formula::BoolConst&) {},
               },
               f->node);
}

void collect(const ProgramPtr& p, std::set<std::string>& out) {
    using HP = HybridProgram;
    std::visit(overloaded{
                   [&](const HP::Chop& c) { collect(c.first, out); collect(c.second, out); },
                   [&](const HP::Choice& c) { collect(c.left, out); collect(c.right, out); },
                   [&](const HP::Star& s) { collect(s.body, out); },
                   [&](const HP::Assign& a) { out.insert(a.var); collect(a.term, out); },
                   [&](const HP::AssignAny& a) { out.insert(a.var); },
                   [&](const HP::ContinuousEvolution& c) {
                       for (const auto& [v, rhs] : c.equations) {
                           out.insert(v);
                           collect(rhs, out);
                       }
                       collect(c.domain, out);
                   },
                   [&](const HP::Quest& q) { collect(q.cond, out); },
                   [&](const HP::IfThenElse& i) {
                       collect(i.cond, out);
                       collect(i.then_branch, out);
                       if (i.else_branch) collect(i.else_branch, out);
                   },
                   [&](const HP::WhileSym& w) { collect(w.cond, out); collect(w.body, out); },
                   [&](const HP::Placeholder&) {},
               },
               p->node);
}

} // namespace

std::set<std::string> free_variables(const TermPtr& t) {
    std::set<std::string> out;
    collect(t, out);
    return out;
}
std::set<std::string> free_variables(const FormulaPtr& f) {
    std::set<std::string> out;
    collect(f, out);
    return out;
}
std::set<std::string> free_variables(const ProgramPtr& p) {
    std::set<std::string> out;
    collect(p, out);
    return out;
}

namespace {

void writes(const ProgramPtr& p, std::set<std::string>& out) {
    using HP = HybridProgram;
    std::visit(overloaded{
                   [&](const HP::Chop& c) { writes(c.first, out); writes(c.second, out); },
                   [&](const HP::Choice& c) { writes(c.left, out); writes(c.right, out); },
                   [&](const HP::Star& s) { writes(s.body, out); },
                   [&](const HP::Assign& a) { out.insert(a.var); },
                   [&](const HP::AssignAny& a) { out.insert(a.var); },
                   [&](const HP::ContinuousEvolution& c) {
                       for (const auto& [v, rhs] : c.equations) out.insert(v);
                   },
                   [&](const HP::Quest&) {},
                   [&](const HP::IfThenElse& i) {
                       writes(i.then_branch, out);
                       if (i.else_branch) writes(i.else_branch, out);
                   },
                   [&](const HP::WhileSym& w) { writes(w.body, out); },
                   [&](const HP::Placeholder&) {},
               },
               p->node);
}

template <class Pred>
bool any_node(const ProgramPtr& p, Pred pred) {
    using HP = HybridProgram;
    if (pred(*p)) return true;
    return std::visit(
        overloaded{
            [&](const HP::Chop& c) { return any_node(c.first, pred) || any_node(c.second, pred); },
            [&](const HP::Choice& c) { return any_node(c.left, pred) || any_node(c.right, pred); },
            [&](const HP::Star& s) { return any_node(s.body, pred); },
            [&](const HP::IfThenElse& i) {
                return any_node(i.then_branch, pred) ||
                       (i.else_branch && any_node(i.else_branch, pred));
            },
            [&](const HP::WhileSym& w) { return any_node(w.body, pred); },
            [&](const auto&) { return false; },
        },
        p->node);
}

} // namespace

std::set<std::string> write_set(const ProgramPtr& p) {
    std::set<std::string> out;
    writes(p, out);
    return out;
}

bool contains_placeholder(const ProgramPtr& p) {
    return any_node(p, [](const HybridProgram& n) {
        return std::holds_alternative<HybridProgram::Placeholder>(n.node);
    });
}

bool contains_continuous(const ProgramPtr& p) {
    return any_node(p, [](const HybridProgram& n) {
        return std::holds_alternative<HybridProgram::ContinuousEvolution>(n.node);
    });
}

std::vector<std::string> check_model(const Model& m) {
    std::vector<std::string> problems;
    std::set<std::string> declared;
    for (const auto& v : m.variables) {
        if (!declared.insert(v).second) problems.push_back("duplicate declaration of '" + v + "'");
    }
    for (const auto& c : m.constants) {
        if (!declared.insert(c).second) problems.push_back("duplicate declaration of '" + c + "'");
    }

    auto check_free = [&](const std::set<std::string>& fv, const std::string& where) {
        for (const auto& v : fv) {
            if (!declared.count(v))
                problems.push_back("undeclared variable '" + v + "' in " + where);
        }
    };
    check_free(free_variables(m.init), "init");
    check_free(free_variables(m.program), "program");
    check_free(free_variables(m.safety), "safety");
    for (const auto& [idx, f] : m.loop_invariants)
        check_free(free_variables(f), "invariant " + std::to_string(idx));

    std::set<std::string> consts(m.constants.begin(), m.constants.end());
    for (const auto& w : write_set(m.program)) {
        if (consts.count(w)) problems.push_back("constant '" + w + "' is written by the program");
    }

    std::size_t nstars = stars_preorder(m.program).size();
    for (const auto& [idx, f] : m.loop_invariants) {
        if (idx >= nstars)
            problems.push_back("invariant index " + std::to_string(idx) + " has no matching loop");
    }
    return problems;
}

namespace {

void stars(const ProgramPtr& p, std::vector<ProgramPtr>& out) {
    using HP = HybridProgram;
    std::visit(overloaded{
                   [&](const HP::Chop& c) { stars(c.first, out); stars(c.second, out); },
                   [&](const HP::Choice& c) { stars(c.left, out); stars(c.right, out); },
                   [&](const HP::Star& s) {
                       out.push_back(p);
                       stars(s.body, out);
                   },
                   [&](const HP::IfThenElse& i) {
                       stars(i.then_branch, out);
                       if (i.else_branch) stars(i.else_branch, out);
                   },
                   [&](const HP::WhileSym& w) { stars(w.body, out); },
                   [&](const auto&) {},
               },
               p->node);
}

} // namespace

std::vector<ProgramPtr> stars_preorder(const ProgramPtr& p) {
    std::vector<ProgramPtr> out;
    stars(p, out);
    return out;
}

} // namespace hpk

#include "printer.hpp"

#include <charconv>
#include <sstream>

namespace hpk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

// Precedence levels, loosest first. A child is parenthesized when its own
// level is looser than the context requires. +,- and *,/ associate left;
// all formula and program connectives associate right.
enum TermLevel { kAdditive = 0, kMultiplicative = 1, kUnary = 2, kTermAtom = 3 };
enum FormulaLevel { kEquiv = 0, kImplies = 1, kOr = 2, kAnd = 3, kFormulaUnary = 4, kFormulaAtom = 5 };
enum ProgramLevel { kChoice = 0, kChop = 1, kStar = 2, kProgramAtom = 3 };

void print_term(std::string& out, const TermPtr& t, int min_level);
void print_formula(std::string& out, const FormulaPtr& f, int min_level);
void print_program(std::string& out, const ProgramPtr& p, int min_level);

int term_level(const Term& t) {
    return std::visit(overloaded{
                          [](const Term::Binary& b) {
                              return (b.op == BinaryOp::Add || b.op == BinaryOp::Sub)
                                         ? (int)kAdditive
                                         : (int)kMultiplicative;
                          },
                          [](const Term::Unary&) { return (int)kUnary; },
                          [](const auto&) { return (int)kTermAtom; },
                      },
                      t.node);
}

const char* binop_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return " + ";
    case BinaryOp::Sub: return " - ";
    case BinaryOp::Mul: return " * ";
    case BinaryOp::Div: return " / ";
    }
    return "";
}

void print_term(std::string& out, const TermPtr& t, int min_level) {
    bool parens = term_level(*t) < min_level;
    if (parens) out += '(';
    std::visit(overloaded{
                   [&](const Term::Number& n) { out += format_number(n.value); },
                   [&](const Term::Variable& v) { out += v.name; },
                   [&](const Term::Unary& u) {
                       out += '-';
                       print_term(out, u.arg, kUnary);
                   },
                   [&](const Term::Binary& b) {
                       int lvl = term_level(*t);
                       print_term(out, b.left, lvl);
                       out += binop_text(b.op);
                       print_term(out, b.right, lvl + 1);
                   },
                   [&](const Term::Call& c) {
                       switch (c.fn) {
                       case CallFn::Abs: out += "abs"; break;
                       case CallFn::Max: out += "max"; break;
                       case CallFn::Min: out += "min"; break;
                       }
                       out += '(';
                       for (std::size_t i = 0; i < c.args.size(); ++i) {
                           if (i) out += ", ";
                           print_term(out, c.args[i], kAdditive);
                       }
                       out += ')';
                   },
               },
               t->node);
    if (parens) out += ')';
}

int formula_level(const Formula& f) {
    return std::visit(overloaded{
                          [](const Formula::Equiv&) { return (int)kEquiv; },
                          [](const Formula::Implies&) { return (int)kImplies; },
                          [](const Formula::Or&) { return (int)kOr; },
                          [](const Formula::And&) { return (int)kAnd; },
                          [](const Formula::Not&) { return (int)kFormulaUnary; },
                          [](const Formula::Forall&) { return (int)kFormulaUnary; },
                          [](const Formula::Exists&) { return (int)kFormulaUnary; },
                          [](const Formula::Box&) { return (int)kFormulaUnary; },
                          [](const Formula::Diamond&) { return (int)kFormulaUnary; },
                          [](const auto&) { return (int)kFormulaAtom; },
                      },
                      f.node);
}

const char* compare_text(CompareOp op) {
    switch (op) {
    case CompareOp::Lt: return " < ";
    case CompareOp::Le: return " <= ";
    case CompareOp::Eq: return " = ";
    case CompareOp::Ge: return " >= ";
    case CompareOp::Gt: return " > ";
    }
    return "";
}

void print_formula(std::string& out, const FormulaPtr& f, int min_level) {
    bool parens = formula_level(*f) < min_level;
    if (parens) out += '(';
    std::visit(
        overloaded{
            [&](const Formula::Compare& c) {
                print_term(out, c.left, kAdditive);
                out += compare_text(c.op);
                print_term(out, c.right, kAdditive);
            },
            [&](const Formula::Not& n) {
                out += '!';
                print_formula(out, n.arg, kFormulaUnary);
            },
            [&](const Formula::And& b) {
                print_formula(out, b.left, kAnd + 1);
                out += " & ";
                print_formula(out, b.right, kAnd);
            },
            [&](const Formula::Or& b) {
                print_formula(out, b.left, kOr + 1);
                out += " | ";
                print_formula(out, b.right, kOr);
            },
            [&](const Formula::Implies& b) {
                print_formula(out, b.left, kImplies + 1);
                out += " -> ";
                print_formula(out, b.right, kImplies);
            },
            [&](const Formula::Equiv& b) {
                print_formula(out, b.left, kEquiv + 1);
                out += " <-> ";
                print_formula(out, b.right, kEquiv);
            },
            [&](const Formula::Forall& q) {
                out += "forall " + q.var + " . ";
                print_formula(out, q.body, kFormulaUnary);
            },
            [&](const Formula::Exists& q) {
                out += "exists " + q.var + " . ";
                print_formula(out, q.body, kFormulaUnary);
            },
            [&](const Formula::Box& m) {
                out += '[';
                print_program(out, m.program, kChoice);
                out += "] ";
                print_formula(out, m.post, kFormulaUnary);
            },
            [&](const Formula::Diamond& m) {
                out += '<';
                print_program(out, m.program, kChoice);
                out += "> ";
                print_formula(out, m.post, kFormulaUnary);
            },
            [&](const Formula::BoolConst& b) { out += b.value ? "true" : "false"; },
        },
        f->node);
    if (parens) out += ')';
}

int program_level(const HybridProgram& p) {
    using HP = HybridProgram;
    return std::visit(overloaded{
                          [](const HP::Choice&) { return (int)kChoice; },
                          [](const HP::Chop&) { return (int)kChop; },
                          [](const HP::Star&) { return (int)kStar; },
                          [](const auto&) { return (int)kProgramAtom; },
                      },
                      p.node);
}

void print_program(std::string& out, const ProgramPtr& p, int min_level) {
    using HP = HybridProgram;
    bool parens = program_level(*p) < min_level;
    if (parens) out += '(';
    std::visit(
        overloaded{
            [&](const HP::Chop& c) {
                print_program(out, c.first, kChop + 1);
                out += "; ";
                print_program(out, c.second, kChop);
            },
            [&](const HP::Choice& c) {
                print_program(out, c.left, kChoice + 1);
                out += " ++ ";
                print_program(out, c.right, kChoice);
            },
            [&](const HP::Star& s) {
                // A trailing `*` would be swallowed by most body forms, so the
                // body is always parenthesized except for the brace-delimited
                // continuous evolution.
                if (std::holds_alternative<HP::ContinuousEvolution>(s.body->node)) {
                    print_program(out, s.body, kProgramAtom);
                } else {
                    out += '(';
                    print_program(out, s.body, kChoice);
                    out += ')';
                }
                out += '*';
            },
            [&](const HP::Assign& a) {
                out += a.var + " := ";
                print_term(out, a.term, kAdditive);
            },
            [&](const HP::AssignAny& a) { out += a.var + " := *"; },
            [&](const HP::ContinuousEvolution& c) {
                out += '{';
                for (std::size_t i = 0; i < c.equations.size(); ++i) {
                    if (i) out += ", ";
                    out += c.equations[i].first + "' = ";
                    print_term(out, c.equations[i].second, kAdditive);
                }
                bool trivially_true = false;
                if (auto* bc = std::get_if<Formula::BoolConst>(&c.domain->node))
                    trivially_true = bc->value;
                if (!trivially_true) {
                    out += " & ";
                    print_formula(out, c.domain, kEquiv);
                }
                out += '}';
            },
            [&](const HP::Quest& q) {
                out += '?';
                print_formula(out, q.cond, kEquiv);
            },
            [&](const HP::IfThenElse& i) {
                out += "if (";
                print_formula(out, i.cond, kEquiv);
                out += ") ";
                print_program(out, i.then_branch, kChoice);
                if (i.else_branch) {
                    out += " else ";
                    print_program(out, i.else_branch, kChoice);
                }
                out += " fi";
            },
            [&](const HP::WhileSym& w) {
                out += "while (";
                print_formula(out, w.cond, kEquiv);
                out += ") ";
                print_program(out, w.body, kChoice);
                out += " end";
            },
            [&](const HP::Placeholder& ph) { out += "placeholder(\"" + ph.label + "\")"; },
        },
        p->node);
    if (parens) out += ')';
}

void print_name_list(std::string& out, const char* keyword,
                     const std::vector<std::string>& names) {
    if (names.empty()) return;
    out += keyword;
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += i ? ", " : " ";
        out += names[i];
    }
    out += '\n';
}

} // namespace

std::string format_number(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string pretty_print(const TermPtr& t) {
    std::string out;
    print_term(out, t, kAdditive);
    return out;
}

std::string pretty_print(const FormulaPtr& f) {
    std::string out;
    print_formula(out, f, kEquiv);
    return out;
}

std::string pretty_print(const ProgramPtr& p) {
    std::string out;
    print_program(out, p, kChoice);
    return out;
}

std::string pretty_print(const Model& m) {
    std::string out = "model " + m.name + "\n";
    print_name_list(out, "vars", m.variables);
    print_name_list(out, "consts", m.constants);
    out += "init " + pretty_print(m.init) + "\n";
    out += "prog " + pretty_print(m.program) + "\n";
    out += "safe " + pretty_print(m.safety) + "\n";
    if (!m.loop_invariants.empty()) {
        // Invariant lines bind to stars in preorder, so interior gaps are
        // filled with the inert `true`.
        std::size_t last = m.loop_invariants.rbegin()->first;
        for (std::size_t i = 0; i <= last; ++i) {
            auto it = m.loop_invariants.find(i);
            out += "invariant " + (it != m.loop_invariants.end() ? pretty_print(it->second) : "true") + "\n";
        }
    }
    return out;
}

std::string pretty_print(const Node& n) {
    std::string out = "node " + n.id + " ";
    switch (n.kind) {
    case NodeKind::Initial: out += "initial"; break;
    case NodeKind::Final: out += "final"; break;
    case NodeKind::Decision: out += "decision"; break;
    case NodeKind::Merge: out += "merge"; break;
    case NodeKind::Action:
        out += "action ";
        switch (*n.stereotype) {
        case Stereotype::AssignAny: out += "AssignAny"; break;
        case Stereotype::AssignTerm: out += "AssignTerm"; break;
        case Stereotype::Dynamics: out += "Dynamics"; break;
        case Stereotype::Placeholder: out += "Placeholder"; break;
        }
        if (*n.stereotype == Stereotype::Placeholder) {
            out += " \"" + n.label + "\"";
        } else {
            out += " { " + pretty_print(n.body) + " }";
            if (n.diff_invariant) out += " diffinv " + pretty_print(n.diff_invariant);
        }
        break;
    }
    return out;
}

std::string pretty_print(const Edge& e) {
    std::string out = "edge " + e.from + " -> " + e.to;
    if (e.guard) out += " [" + pretty_print(e.guard) + "]";
    if (e.nondet_repetition) {
        out += " repeat";
        if (e.loop_invariant) out += " invariant " + pretty_print(e.loop_invariant);
    }
    return out;
}

std::string pretty_print(const ActivityGraph& g) {
    std::string out = "graph " + g.name + "\n";
    print_name_list(out, "vars", g.variables);
    print_name_list(out, "consts", g.constants);
    out += "init " + pretty_print(g.init) + "\n";
    out += "safe " + pretty_print(g.safety) + "\n";
    for (const auto& n : g.nodes) out += pretty_print(n) + "\n";
    for (const auto& e : g.edges) out += pretty_print(e) + "\n";
    return out;
}

} // namespace hpk

#include "parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <unordered_set>

namespace hpk {

namespace {

enum class Tok {
    Ident, Number, String,
    Assign,     // :=
    PlusPlus,   // ++
    Semi, Star, Quest, LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Amp, Pipe, Bang, Arrow, DArrow,   // -> and <->
    Lt, Le, Eq, Ge, Gt,
    Comma, Prime, Dot, Plus, Minus, Slash,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    SourceSpan span;
};

const std::unordered_set<std::string>& reserved_words() {
    static const std::unordered_set<std::string> words = {
        "model", "vars", "consts", "init", "prog", "safe", "invariant",
        "graph", "node", "edge", "action", "initial", "final", "decision",
        "merge", "repeat", "diffinv", "if", "else", "fi", "while", "end",
        "placeholder", "forall", "exists", "true", "false", "abs", "max", "min",
    };
    return words;
}

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> toks;
    int line = 1, col = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto make_span = [&](int l, int c, std::size_t len) {
        return SourceSpan{l, c, (int)std::max<std::size_t>(len, 1)};
    };
    auto advance = [&](std::size_t count) {
        for (std::size_t k = 0; k < count; ++k, ++i) {
            if (text[i] == '\n') { ++line; col = 1; } else { ++col; }
        }
    };

    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { advance(1); continue; }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            while (i < n && text[i] != '\n') advance(1);
            continue;
        }
        int tl = line, tc = col;
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t j = i;
            while (j < n && (std::isalnum((unsigned char)text[j]) || text[j] == '_')) ++j;
            std::string word(text.substr(i, j - i));
            toks.push_back({Tok::Ident, word, 0.0, make_span(tl, tc, j - i)});
            advance(j - i);
            continue;
        }
        if (std::isdigit((unsigned char)c)) {
            std::size_t j = i;
            while (j < n && std::isdigit((unsigned char)text[j])) ++j;
            if (j < n && text[j] == '.' && j + 1 < n && std::isdigit((unsigned char)text[j + 1])) {
                ++j;
                while (j < n && std::isdigit((unsigned char)text[j])) ++j;
            }
            if (j < n && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < n && std::isdigit((unsigned char)text[k])) {
                    while (k < n && std::isdigit((unsigned char)text[k])) ++k;
                    j = k;
                }
            }
            std::string word(text.substr(i, j - i));
            double value = 0.0;
            auto res = std::from_chars(word.data(), word.data() + word.size(), value);
            if (res.ec != std::errc()) {
                throw Error(ErrorCode::Syntax, make_span(tl, tc, j - i),
                            "number literal out of range: " + word);
            }
            toks.push_back({Tok::Number, word, value, make_span(tl, tc, j - i)});
            advance(j - i);
            continue;
        }
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < n && text[j] != '"' && text[j] != '\n') ++j;
            if (j >= n || text[j] != '"')
                throw Error(ErrorCode::Syntax, make_span(tl, tc, j - i), "unterminated string");
            std::string word(text.substr(i + 1, j - i - 1));
            toks.push_back({Tok::String, word, 0.0, make_span(tl, tc, j - i + 1)});
            advance(j - i + 1);
            continue;
        }

        auto sym = [&](Tok kind, std::size_t len, const char* txt) {
            toks.push_back({kind, txt, 0.0, make_span(tl, tc, len)});
            advance(len);
        };
        auto rest = text.substr(i);
        if (rest.rfind("<->", 0) == 0) { sym(Tok::DArrow, 3, "<->"); continue; }
        if (rest.rfind(":=", 0) == 0) { sym(Tok::Assign, 2, ":="); continue; }
        if (rest.rfind("++", 0) == 0) { sym(Tok::PlusPlus, 2, "++"); continue; }
        if (rest.rfind("->", 0) == 0) { sym(Tok::Arrow, 2, "->"); continue; }
        if (rest.rfind("<=", 0) == 0) { sym(Tok::Le, 2, "<="); continue; }
        if (rest.rfind(">=", 0) == 0) { sym(Tok::Ge, 2, ">="); continue; }
        switch (c) {
        case ';': sym(Tok::Semi, 1, ";"); continue;
        case '*': sym(Tok::Star, 1, "*"); continue;
        case '?': sym(Tok::Quest, 1, "?"); continue;
        case '{': sym(Tok::LBrace, 1, "{"); continue;
        case '}': sym(Tok::RBrace, 1, "}"); continue;
        case '(': sym(Tok::LParen, 1, "("); continue;
        case ')': sym(Tok::RParen, 1, ")"); continue;
        case '[': sym(Tok::LBracket, 1, "["); continue;
        case ']': sym(Tok::RBracket, 1, "]"); continue;
        case '&': sym(Tok::Amp, 1, "&"); continue;
        case '|': sym(Tok::Pipe, 1, "|"); continue;
        case '!': sym(Tok::Bang, 1, "!"); continue;
        case '<': sym(Tok::Lt, 1, "<"); continue;
        case '>': sym(Tok::Gt, 1, ">"); continue;
        case '=': sym(Tok::Eq, 1, "="); continue;
        case ',': sym(Tok::Comma, 1, ","); continue;
        case '\'': sym(Tok::Prime, 1, "'"); continue;
        case '.': sym(Tok::Dot, 1, "."); continue;
        case '+': sym(Tok::Plus, 1, "+"); continue;
        case '-': sym(Tok::Minus, 1, "-"); continue;
        case '/': sym(Tok::Slash, 1, "/"); continue;
        default:
            throw Error(ErrorCode::Syntax, make_span(tl, tc, 1),
                        std::string("unexpected character '") + c + "'");
        }
    }
    toks.push_back({Tok::End, "<end of input>", 0.0, make_span(line, std::max(col - 1, 1), 1)});
    return toks;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(lex(text)) {}

    Model model_file();
    ActivityGraph graph_file();

    TermPtr term_only() {
        TermPtr t = additive();
        expect(Tok::End, "end of input");
        return t;
    }
    FormulaPtr formula_only() {
        FormulaPtr f = formula();
        expect(Tok::End, "end of input");
        return f;
    }
    ProgramPtr program_only() {
        ProgramPtr p = program();
        expect(Tok::End, "end of input");
        return p;
    }

private:
    struct Occurrence {
        std::string name;
        SourceSpan span;
        bool written;
    };

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Occurrence> occurrences_;
    std::vector<std::string> bound_;

    const Token& peek() const { return toks_[pos_]; }
    const Token& get() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

    bool at(Tok kind) const { return peek().kind == kind; }
    bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

    bool accept(Tok kind) {
        if (!at(kind)) return false;
        ++pos_;
        return true;
    }
    bool accept_word(const char* w) {
        if (!at_word(w)) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(const std::string& expected) const {
        throw Error(ErrorCode::Syntax, peek().span,
                    "expected " + expected + ", found '" + peek().text + "'");
    }

    Token expect(Tok kind, const std::string& what) {
        if (!at(kind)) fail(what);
        return get();
    }
    void expect_word(const char* w) {
        if (!accept_word(w)) fail(std::string("'") + w + "'");
    }

    std::string identifier(const char* what) {
        if (!at(Tok::Ident)) fail(what);
        if (reserved_words().count(peek().text))
            fail(std::string(what) + " (\"" + peek().text + "\" is reserved)");
        return get().text;
    }

    bool is_bound(const std::string& name) const {
        return std::find(bound_.begin(), bound_.end(), name) != bound_.end();
    }
    void record(const std::string& name, const SourceSpan& span, bool written) {
        if (!is_bound(name)) occurrences_.push_back({name, span, written});
    }

    // ---- terms -----------------------------------------------------------

    TermPtr additive() {
        TermPtr t = multiplicative();
        for (;;) {
            if (accept(Tok::Plus)) t = add(t, multiplicative());
            else if (accept(Tok::Minus)) t = sub(t, multiplicative());
            else return t;
        }
    }

    TermPtr multiplicative() {
        TermPtr t = unary();
        for (;;) {
            if (accept(Tok::Star)) t = mul(t, unary());
            else if (accept(Tok::Slash)) t = divt(t, unary());
            else return t;
        }
    }

    TermPtr unary() {
        if (accept(Tok::Minus)) return neg(unary());
        return primary();
    }

    TermPtr primary() {
        if (at(Tok::Number)) return num(get().number);
        if (accept(Tok::LParen)) {
            TermPtr t = additive();
            expect(Tok::RParen, "')'");
            return t;
        }
        if (at(Tok::Ident)) {
            const std::string& word = peek().text;
            if (word == "abs" || word == "max" || word == "min") {
                CallFn fn = word == "abs" ? CallFn::Abs : word == "max" ? CallFn::Max : CallFn::Min;
                get();
                expect(Tok::LParen, "'('");
                std::vector<TermPtr> args;
                args.push_back(additive());
                while (accept(Tok::Comma)) args.push_back(additive());
                expect(Tok::RParen, "')'");
                if (args.size() != (fn == CallFn::Abs ? 1u : 2u))
                    throw Error(ErrorCode::Syntax, peek().span,
                                word + " takes " + (fn == CallFn::Abs ? "1 argument" : "2 arguments"));
                return call(fn, std::move(args));
            }
            if (reserved_words().count(word)) fail("a term");
            Token tok = get();
            record(tok.text, tok.span, false);
            return var(tok.text);
        }
        fail("a term");
    }

    // ---- formulas ----------------------------------------------------------

    FormulaPtr formula() { return equiv_level(); }

    FormulaPtr equiv_level() {
        FormulaPtr f = implies_level();
        if (accept(Tok::DArrow)) return equiv(f, equiv_level());
        return f;
    }
    FormulaPtr implies_level() {
        FormulaPtr f = or_level();
        if (accept(Tok::Arrow)) return implies(f, implies_level());
        return f;
    }
    FormulaPtr or_level() {
        FormulaPtr f = and_level();
        if (accept(Tok::Pipe)) return lor(f, or_level());
        return f;
    }
    FormulaPtr and_level() {
        FormulaPtr f = unary_formula();
        if (accept(Tok::Amp)) return land(f, and_level());
        return f;
    }

    FormulaPtr unary_formula() {
        if (accept(Tok::Bang)) return lnot(unary_formula());
        if (accept_word("forall")) {
            std::string v = identifier("a quantified variable");
            expect(Tok::Dot, "'.'");
            bound_.push_back(v);
            FormulaPtr body = unary_formula();
            bound_.pop_back();
            return forall(v, body);
        }
        if (accept_word("exists")) {
            std::string v = identifier("a quantified variable");
            expect(Tok::Dot, "'.'");
            bound_.push_back(v);
            FormulaPtr body = unary_formula();
            bound_.pop_back();
            return exists(v, body);
        }
        if (accept(Tok::LBracket)) {
            ProgramPtr p = program();
            expect(Tok::RBracket, "']'");
            return box(p, unary_formula());
        }
        if (accept(Tok::Lt)) {
            ProgramPtr p = program();
            expect(Tok::Gt, "'>'");
            return diamond(p, unary_formula());
        }
        if (accept_word("true")) return btrue();
        if (accept_word("false")) return bfalse();
        return comparison_or_paren();
    }

    // A '(' may open either a parenthesized formula or a parenthesized term
    // inside a comparison; resolved by trying the comparison first.
    FormulaPtr comparison_or_paren() {
        std::size_t save_pos = pos_;
        std::size_t save_occ = occurrences_.size();
        bool starts_with_paren = at(Tok::LParen);
        try {
            TermPtr left = additive();
            CompareOp op;
            if (accept(Tok::Lt)) op = CompareOp::Lt;
            else if (accept(Tok::Le)) op = CompareOp::Le;
            else if (accept(Tok::Eq)) op = CompareOp::Eq;
            else if (accept(Tok::Ge)) op = CompareOp::Ge;
            else if (accept(Tok::Gt)) op = CompareOp::Gt;
            else fail("a comparison operator");
            TermPtr right = additive();
            return cmp(op, left, right);
        } catch (const Error&) {
            if (!starts_with_paren) throw;
            pos_ = save_pos;
            occurrences_.resize(save_occ);
        }
        expect(Tok::LParen, "'('");
        FormulaPtr f = formula();
        expect(Tok::RParen, "')'");
        return f;
    }

    // ---- programs ----------------------------------------------------------

    ProgramPtr program() { return choice_level(); }

    ProgramPtr choice_level() {
        ProgramPtr p = seq_level();
        if (accept(Tok::PlusPlus)) return choice(p, choice_level());
        return p;
    }
    ProgramPtr seq_level() {
        ProgramPtr p = postfix_level();
        if (accept(Tok::Semi)) return chop(p, seq_level());
        return p;
    }
    ProgramPtr postfix_level() {
        ProgramPtr p = program_atom();
        if (accept(Tok::Star)) return star(p);
        return p;
    }

    ProgramPtr program_atom() {
        if (accept(Tok::Quest)) return quest(formula());
        if (accept(Tok::LParen)) {
            ProgramPtr p = program();
            expect(Tok::RParen, "')'");
            return p;
        }
        if (accept(Tok::LBrace)) return continuous_evolution();
        if (accept_word("if")) {
            expect(Tok::LParen, "'('");
            FormulaPtr cond = formula();
            expect(Tok::RParen, "')'");
            ProgramPtr then_branch = program();
            ProgramPtr else_branch;
            if (accept_word("else")) else_branch = program();
            expect_word("fi");
            return if_then_else(cond, then_branch, else_branch);
        }
        if (accept_word("while")) {
            expect(Tok::LParen, "'('");
            FormulaPtr cond = formula();
            expect(Tok::RParen, "')'");
            ProgramPtr body = program();
            expect_word("end");
            return while_sym(cond, body);
        }
        if (accept_word("placeholder")) {
            expect(Tok::LParen, "'('");
            if (!at(Tok::String)) fail("a string label");
            Token label = get();
            expect(Tok::RParen, "')'");
            if (label.text.empty())
                throw Error(ErrorCode::Syntax, label.span, "placeholder label must be non-empty");
            return placeholder(label.text);
        }
        if (at(Tok::Ident)) {
            Token name = peek();
            if (reserved_words().count(name.text)) fail("a statement");
            get();
            expect(Tok::Assign, "':='");
            record(name.text, name.span, true);
            if (accept(Tok::Star)) return assign_any(name.text);
            return assign(name.text, additive());
        }
        fail("a statement");
    }

    ProgramPtr continuous_evolution() {
        std::vector<std::pair<std::string, TermPtr>> eqs;
        for (;;) {
            Token name = peek();
            std::string v = identifier("an evolved variable");
            record(name.text, name.span, true);
            expect(Tok::Prime, "'''");
            expect(Tok::Eq, "'='");
            eqs.push_back({v, additive()});
            if (!accept(Tok::Comma)) break;
        }
        for (std::size_t i = 0; i < eqs.size(); ++i)
            for (std::size_t j = i + 1; j < eqs.size(); ++j)
                if (eqs[i].first == eqs[j].first)
                    throw Error(ErrorCode::Syntax, peek().span,
                                "variable '" + eqs[i].first + "' evolved twice");
        FormulaPtr domain = btrue();
        if (accept(Tok::Amp)) domain = formula();
        expect(Tok::RBrace, "'}'");
        return continuous(std::move(eqs), domain);
    }

    // ---- files -------------------------------------------------------------

    std::vector<std::string> name_list() {
        std::vector<std::string> names;
        names.push_back(identifier("an identifier"));
        while (accept(Tok::Comma)) names.push_back(identifier("an identifier"));
        return names;
    }

    void check_declarations(const std::vector<std::string>& variables,
                            const std::vector<std::string>& constants) {
        std::set<std::string> declared;
        for (const auto& v : variables)
            if (!declared.insert(v).second)
                throw Error(ErrorCode::Syntax, toks_.front().span, "duplicate declaration of '" + v + "'");
        for (const auto& c : constants)
            if (!declared.insert(c).second)
                throw Error(ErrorCode::Syntax, toks_.front().span, "duplicate declaration of '" + c + "'");
        std::set<std::string> consts(constants.begin(), constants.end());
        for (const auto& occ : occurrences_) {
            if (!declared.count(occ.name))
                throw Error(ErrorCode::UndeclaredVariable, occ.span,
                            "undeclared variable '" + occ.name + "'");
            if (occ.written && consts.count(occ.name))
                throw Error(ErrorCode::ConstantWritten, occ.span,
                            "constant '" + occ.name + "' is written");
        }
    }
};

Model Parser::model_file() {
    Model m;
    expect_word("model");
    m.name = identifier("a model name");
    if (accept_word("vars")) m.variables = name_list();
    if (accept_word("consts")) m.constants = name_list();
    expect_word("init");
    m.init = formula();
    expect_word("prog");
    m.program = program();
    expect_word("safe");
    m.safety = formula();
    std::size_t index = 0;
    while (accept_word("invariant")) m.loop_invariants[index++] = formula();
    expect(Tok::End, "end of input");

    check_declarations(m.variables, m.constants);
    std::size_t nstars = stars_preorder(m.program).size();
    if (index > nstars)
        throw Error(ErrorCode::Syntax, toks_.back().span,
                    "more invariant lines than loops in the program");
    return m;
}

ActivityGraph Parser::graph_file() {
    ActivityGraph g;
    expect_word("graph");
    g.name = identifier("a graph name");
    if (accept_word("vars")) g.variables = name_list();
    if (accept_word("consts")) g.constants = name_list();
    expect_word("init");
    g.init = formula();
    expect_word("safe");
    g.safety = formula();

    std::set<std::string> ids;
    std::vector<std::pair<SourceSpan, SourceSpan>> endpoint_spans;
    while (!at(Tok::End)) {
        if (accept_word("node")) {
            Node node;
            Token id_tok = peek();
            node.id = identifier("a node id");
            if (!ids.insert(node.id).second)
                throw Error(ErrorCode::DuplicateNodeId, id_tok.span,
                            "duplicate node id '" + node.id + "'");
            if (accept_word("initial")) node.kind = NodeKind::Initial;
            else if (accept_word("final")) node.kind = NodeKind::Final;
            else if (accept_word("decision")) node.kind = NodeKind::Decision;
            else if (accept_word("merge")) node.kind = NodeKind::Merge;
            else if (accept_word("action")) {
                node.kind = NodeKind::Action;
                Token st_tok = peek();
                if (accept_word("AssignAny")) node.stereotype = Stereotype::AssignAny;
                else if (accept_word("AssignTerm")) node.stereotype = Stereotype::AssignTerm;
                else if (accept_word("Dynamics")) node.stereotype = Stereotype::Dynamics;
                else if (accept_word("Placeholder")) node.stereotype = Stereotype::Placeholder;
                else fail("a stereotype (AssignAny, AssignTerm, Dynamics or Placeholder)");
                if (*node.stereotype == Stereotype::Placeholder) {
                    if (!at(Tok::String)) fail("a string label");
                    Token label = get();
                    if (label.text.empty())
                        throw Error(ErrorCode::Syntax, label.span,
                                    "placeholder label must be non-empty");
                    node.label = label.text;
                } else {
                    expect(Tok::LBrace, "'{'");
                    node.body = program();
                    expect(Tok::RBrace, "'}'");
                    if (accept_word("diffinv")) {
                        if (*node.stereotype != Stereotype::Dynamics)
                            throw Error(ErrorCode::Syntax, st_tok.span,
                                        "diffinv is only allowed on Dynamics actions");
                        node.diff_invariant = formula();
                    }
                    std::string problem = check_action_body(*node.stereotype, node.body);
                    if (!problem.empty())
                        throw Error(ErrorCode::Syntax, st_tok.span, problem);
                }
            } else {
                fail("a node kind (initial, final, decision, merge or action)");
            }
            g.nodes.push_back(std::move(node));
        } else if (accept_word("edge")) {
            Edge edge;
            Token from_tok = peek();
            edge.from = identifier("a node id");
            expect(Tok::Arrow, "'->'");
            Token to_tok = peek();
            edge.to = identifier("a node id");
            if (accept(Tok::LBracket)) {
                edge.guard = formula();
                expect(Tok::RBracket, "']'");
            }
            if (accept_word("repeat")) {
                edge.nondet_repetition = true;
                if (accept_word("invariant")) edge.loop_invariant = formula();
            }
            endpoint_spans.push_back({from_tok.span, to_tok.span});
            g.edges.push_back(std::move(edge));
        } else {
            fail("'node' or 'edge'");
        }
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (!ids.count(g.edges[i].from))
            throw Error(ErrorCode::DanglingEdge, endpoint_spans[i].first,
                        "edge references unknown node '" + g.edges[i].from + "'");
        if (!ids.count(g.edges[i].to))
            throw Error(ErrorCode::DanglingEdge, endpoint_spans[i].second,
                        "edge references unknown node '" + g.edges[i].to + "'");
    }
    check_declarations(g.variables, g.constants);
    return g;
}

} // namespace

Model parse_model(std::string_view text) { return Parser(text).model_file(); }
ActivityGraph parse_activity_graph(std::string_view text) { return Parser(text).graph_file(); }
TermPtr parse_term(std::string_view text) { return Parser(text).term_only(); }
FormulaPtr parse_formula(std::string_view text) { return Parser(text).formula_only(); }
ProgramPtr parse_program(std::string_view text) { return Parser(text).program_only(); }

InputKind sniff_input_kind(std::string_view text) {
    try {
        auto toks = lex(text);
        if (!toks.empty() && toks.front().kind == Tok::Ident) {
            if (toks.front().text == "model") return InputKind::ModelFile;
            if (toks.front().text == "graph") return InputKind::GraphFile;
        }
    } catch (const Error&) {
    }
    return InputKind::Unknown;
}

} // namespace hpk

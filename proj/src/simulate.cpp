#include "simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <map>

#include "rng.hpp"

namespace hpk {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr long kWhileIterationCap = 1000000;

// ---- compiled expressions over a flat state vector -------------------------

struct CExpr {
    enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Abs, Max, Min };
    struct Ins {
        Op op;
        int index = 0;
        double value = 0.0;
    };
    std::vector<Ins> code;

    double eval(const double* state) const {
        double stack[64];
        int top = -1;
        for (const Ins& ins : code) {
            switch (ins.op) {
            case Op::Const: stack[++top] = ins.value; break;
            case Op::Var: stack[++top] = state[ins.index]; break;
            case Op::Neg: stack[top] = -stack[top]; break;
            case Op::Add: --top; stack[top] += stack[top + 1]; break;
            case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::Div:
                --top;
                if (stack[top + 1] == 0.0)
                    throw Error(ErrorCode::DivisionByZero, "division by zero");
                stack[top] /= stack[top + 1];
                break;
            case Op::Abs: stack[top] = std::fabs(stack[top]); break;
            case Op::Max: --top; stack[top] = std::fmax(stack[top], stack[top + 1]); break;
            case Op::Min: --top; stack[top] = std::fmin(stack[top], stack[top + 1]); break;
            }
        }
        return stack[0];
    }
};

void compile_term(const TermPtr& t, const std::map<std::string, int>& cols, CExpr& out,
                  int depth = 0) {
    if (depth > 50)
        throw Error(ErrorCode::UnsupportedConstruct, "term too deep to compile");
    std::visit(
        overloaded{
            [&](const Term::Number& n) { out.code.push_back({CExpr::Op::Const, 0, n.value}); },
            [&](const Term::Variable& v) {
                auto it = cols.find(v.name);
                if (it == cols.end())
                    throw Error(ErrorCode::UnboundVariable, "unbound variable '" + v.name + "'");
                out.code.push_back({CExpr::Op::Var, it->second, 0.0});
            },
            [&](const Term::Unary& u) {
                compile_term(u.arg, cols, out, depth + 1);
                out.code.push_back({CExpr::Op::Neg});
            },
            [&](const Term::Binary& b) {
                compile_term(b.left, cols, out, depth + 1);
                compile_term(b.right, cols, out, depth + 1);
                CExpr::Op op = b.op == BinaryOp::Add   ? CExpr::Op::Add
                               : b.op == BinaryOp::Sub ? CExpr::Op::Sub
                               : b.op == BinaryOp::Mul ? CExpr::Op::Mul
                                                       : CExpr::Op::Div;
                out.code.push_back({op});
            },
            [&](const Term::Call& c) {
                for (const auto& a : c.args) compile_term(a, cols, out, depth + 1);
                CExpr::Op op = c.fn == CallFn::Abs   ? CExpr::Op::Abs
                               : c.fn == CallFn::Max ? CExpr::Op::Max
                                                     : CExpr::Op::Min;
                out.code.push_back({op});
            },
        },
        t->node);
}

CExpr compile_term(const TermPtr& t, const std::map<std::string, int>& cols) {
    CExpr e;
    compile_term(t, cols, e);
    return e;
}

struct CFormula {
    enum class K { Cmp, Not, And, Or, Implies, Equiv, Const };
    K k = K::Const;
    CompareOp op = CompareOp::Eq;
    CExpr left, right;
    std::vector<CFormula> kids;
    bool value = false;

    bool eval(const double* state) const {
        switch (k) {
        case K::Cmp: {
            double l = left.eval(state);
            double r = right.eval(state);
            switch (op) {
            case CompareOp::Lt: return l < r;
            case CompareOp::Le: return l <= r;
            case CompareOp::Eq: return l == r;
            case CompareOp::Ge: return l >= r;
            case CompareOp::Gt: return l > r;
            }
            return false;
        }
        case K::Not: return !kids[0].eval(state);
        case K::And: return kids[0].eval(state) && kids[1].eval(state);
        case K::Or: return kids[0].eval(state) || kids[1].eval(state);
        case K::Implies: return !kids[0].eval(state) || kids[1].eval(state);
        case K::Equiv: return kids[0].eval(state) == kids[1].eval(state);
        case K::Const: return value;
        }
        return false;
    }
};

CFormula compile_formula(const FormulaPtr& f, const std::map<std::string, int>& cols) {
    CFormula out;
    std::visit(
        overloaded{
            [&](const Formula::Compare& c) {
                out.k = CFormula::K::Cmp;
                out.op = c.op;
                out.left = compile_term(c.left, cols);
                out.right = compile_term(c.right, cols);
            },
            [&](const Formula::Not& n) {
                out.k = CFormula::K::Not;
                out.kids.push_back(compile_formula(n.arg, cols));
            },
            [&](const Formula::And& b) {
                out.k = CFormula::K::And;
                out.kids.push_back(compile_formula(b.left, cols));
                out.kids.push_back(compile_formula(b.right, cols));
            },
            [&](const Formula::Or& b) {
                out.k = CFormula::K::Or;
                out.kids.push_back(compile_formula(b.left, cols));
                out.kids.push_back(compile_formula(b.right, cols));
            },
            [&](const Formula::Implies& b) {
                out.k = CFormula::K::Implies;
                out.kids.push_back(compile_formula(b.left, cols));
                out.kids.push_back(compile_formula(b.right, cols));
            },
            [&](const Formula::Equiv& b) {
                out.k = CFormula::K::Equiv;
                out.kids.push_back(compile_formula(b.left, cols));
                out.kids.push_back(compile_formula(b.right, cols));
            },
            [&](const Formula::BoolConst& b) {
                out.k = CFormula::K::Const;
                out.value = b.value;
            },
            [&](const auto&) {
                throw Error(ErrorCode::UnsupportedConstruct,
                            "cannot evaluate quantifier or modality numerically");
            },
        },
        f->node);
    return out;
}

// ---- quantifier / while checks ---------------------------------------------

bool contains_equality(const FormulaPtr& f) {
    return std::visit(
        overloaded{
            [&](const Formula::Compare& c) { return c.op == CompareOp::Eq; },
            [&](const Formula::Not& n) { return contains_equality(n.arg); },
            [&](const Formula::And& b) {
                return contains_equality(b.left) || contains_equality(b.right);
            },
            [&](const Formula::Or& b) {
                return contains_equality(b.left) || contains_equality(b.right);
            },
            [&](const Formula::Implies& b) {
                return contains_equality(b.left) || contains_equality(b.right);
            },
            [&](const Formula::Equiv& b) {
                return contains_equality(b.left) || contains_equality(b.right);
            },
            [&](const auto&) { return false; },
        },
        f->node);
}

bool has_quantifier(const FormulaPtr& f) {
    return std::visit(
        overloaded{
            [&](const Formula::Compare&) { return false; },
            [&](const Formula::Not& n) { return has_quantifier(n.arg); },
            [&](const Formula::And& b) { return has_quantifier(b.left) || has_quantifier(b.right); },
            [&](const Formula::Or& b) { return has_quantifier(b.left) || has_quantifier(b.right); },
            [&](const Formula::Implies& b) {
                return has_quantifier(b.left) || has_quantifier(b.right);
            },
            [&](const Formula::Equiv& b) { return has_quantifier(b.left) || has_quantifier(b.right); },
            [&](const Formula::Forall&) { return true; },
            [&](const Formula::Exists&) { return true; },
            [&](const Formula::Box&) { return false; },
            [&](const Formula::Diamond&) { return false; },
            [&](const Formula::BoolConst&) { return false; },
        },
        f->node);
}

void conjuncts_of(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (auto* a = std::get_if<Formula::And>(&f->node)) {
        conjuncts_of(a->left, out);
        conjuncts_of(a->right, out);
    } else {
        out.push_back(f);
    }
}

// A syntactic upper time bound: some conjunct `v <= t` or `v < t` over an
// evolved variable.
bool has_time_bound(const HybridProgram::ContinuousEvolution& c) {
    std::set<std::string> evolved;
    for (const auto& [v, rhs] : c.equations) evolved.insert(v);
    std::vector<FormulaPtr> parts;
    conjuncts_of(c.domain, parts);
    for (const auto& part : parts) {
        if (auto* cmp_node = std::get_if<Formula::Compare>(&part->node)) {
            if (cmp_node->op == CompareOp::Le || cmp_node->op == CompareOp::Lt) {
                if (auto* v = std::get_if<Term::Variable>(&cmp_node->left->node))
                    if (evolved.count(v->name)) return true;
            }
            if (cmp_node->op == CompareOp::Ge || cmp_node->op == CompareOp::Gt) {
                if (auto* v = std::get_if<Term::Variable>(&cmp_node->right->node))
                    if (evolved.count(v->name)) return true;
            }
        }
    }
    return false;
}

void precheck_program(const ProgramPtr& p, bool inside_while) {
    using HP = HybridProgram;
    auto check_formula = [](const FormulaPtr& f) {
        if (has_quantifier(f))
            throw Error(ErrorCode::QuantifierInProgram,
                        "quantifier inside a simulated test or domain");
    };
    std::visit(
        overloaded{
            [&](const HP::Chop& c) {
                precheck_program(c.first, inside_while);
                precheck_program(c.second, inside_while);
            },
            [&](const HP::Choice& c) {
                precheck_program(c.left, inside_while);
                precheck_program(c.right, inside_while);
            },
            [&](const HP::Star& s) { precheck_program(s.body, inside_while); },
            [&](const HP::Assign&) {},
            [&](const HP::AssignAny&) {},
            [&](const HP::ContinuousEvolution& c) {
                check_formula(c.domain);
                if (inside_while && !has_time_bound(c))
                    throw Error(ErrorCode::UnboundedWhileDynamics,
                                "while body contains a continuous evolution without a time bound");
            },
            [&](const HP::Quest& q) { check_formula(q.cond); },
            [&](const HP::IfThenElse& i) {
                check_formula(i.cond);
                precheck_program(i.then_branch, inside_while);
                if (i.else_branch) precheck_program(i.else_branch, inside_while);
            },
            [&](const HP::WhileSym& w) {
                check_formula(w.cond);
                precheck_program(w.body, true);
            },
            [&](const HP::Placeholder&) {},
        },
        p->node);
}

// ---- integration -----------------------------------------------------------

struct CompiledOde {
    std::vector<std::pair<int, CExpr>> system; // column index, derivative
    CFormula domain;
};

struct IntegrationResult {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    OdeExit exit = OdeExit::MaxDuration;
    std::string error;
};

void rk4_step(const CompiledOde& ode, const std::vector<double>& from, double h,
              std::vector<double>& out) {
    const std::size_t k = ode.system.size();
    static thread_local std::vector<double> k1, k2, k3, k4, tmp;
    k1.resize(k); k2.resize(k); k3.resize(k); k4.resize(k);
    tmp = from;

    for (std::size_t i = 0; i < k; ++i) k1[i] = ode.system[i].second.eval(from.data());
    for (std::size_t i = 0; i < k; ++i) tmp[ode.system[i].first] = from[ode.system[i].first] + 0.5 * h * k1[i];
    for (std::size_t i = 0; i < k; ++i) k2[i] = ode.system[i].second.eval(tmp.data());
    for (std::size_t i = 0; i < k; ++i) tmp[ode.system[i].first] = from[ode.system[i].first] + 0.5 * h * k2[i];
    for (std::size_t i = 0; i < k; ++i) k3[i] = ode.system[i].second.eval(tmp.data());
    for (std::size_t i = 0; i < k; ++i) tmp[ode.system[i].first] = from[ode.system[i].first] + h * k3[i];
    for (std::size_t i = 0; i < k; ++i) k4[i] = ode.system[i].second.eval(tmp.data());

    out = from;
    for (std::size_t i = 0; i < k; ++i)
        out[ode.system[i].first] =
            from[ode.system[i].first] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

// Snap the final state onto the boundary of the conjunct that flipped, when
// that conjunct compares a bare variable against a bound not involving it.
void snap_to_boundary(const FormulaPtr& domain, const std::vector<std::string>& columns,
                      const std::map<std::string, int>& cols, const std::vector<double>& bad_state,
                      std::vector<double>& good_state) {
    auto valuation_of = [&](const std::vector<double>& s) {
        std::map<std::string, double> m;
        for (std::size_t i = 0; i < columns.size(); ++i) m[columns[i]] = s[i];
        return Valuation(std::move(m));
    };
    Valuation bad = valuation_of(bad_state);
    std::vector<FormulaPtr> parts;
    conjuncts_of(domain, parts);
    for (const auto& part : parts) {
        auto* c = std::get_if<Formula::Compare>(&part->node);
        if (!c) continue;
        bool flipped = false;
        try {
            flipped = !eval_formula(part, bad);
        } catch (const Error&) {
            continue;
        }
        if (!flipped) continue;
        const Term::Variable* v = std::get_if<Term::Variable>(&c->left->node);
        TermPtr bound = c->right;
        if (!v) {
            v = std::get_if<Term::Variable>(&c->right->node);
            bound = c->left;
        }
        if (!v) continue;
        if (free_variables(bound).count(v->name)) continue;
        auto it = cols.find(v->name);
        if (it == cols.end()) continue;
        try {
            good_state[it->second] = eval_term(bound, valuation_of(good_state));
        } catch (const Error&) {
        }
    }
}

IntegrationResult integrate_compiled(const CompiledOde& ode, const FormulaPtr& domain_ast,
                                     const std::vector<std::string>& columns,
                                     const std::map<std::string, int>& cols,
                                     std::vector<double> state, const SimPolicy& policy) {
    IntegrationResult res;
    res.times.push_back(0.0);
    res.states.push_back(state);

    auto domain_ok = [&](const std::vector<double>& s) { return ode.domain.eval(s.data()); };

    try {
        if (!domain_ok(state)) {
            res.exit = OdeExit::DomainBoundary;
            return res;
        }
        double t = 0.0;
        std::vector<double> next;
        while (t < policy.ode_max_duration) {
            double h = std::min(policy.ode_step, policy.ode_max_duration - t);
            rk4_step(ode, state, h, next);
            if (!domain_ok(next)) {
                // Bisect the crossing well below event_tolerance so that
                // states derived from the exit time stay within tolerance
                // too, not just the time itself.
                const double target = policy.event_tolerance * 1e-3;
                double lo = 0.0, hi = h;
                std::vector<double> lo_state = state;
                std::vector<double> mid;
                while (hi - lo > target) {
                    double step = (hi - lo) / 2.0;
                    rk4_step(ode, lo_state, step, mid);
                    if (domain_ok(mid)) {
                        lo += step;
                        lo_state = mid;
                    } else {
                        hi = lo + step;
                    }
                }
                snap_to_boundary(domain_ast, columns, cols, next, lo_state);
                res.times.push_back(t + lo);
                res.states.push_back(lo_state);
                res.exit = OdeExit::DomainBoundary;
                return res;
            }
            t += h;
            state = next;
            res.times.push_back(t);
            res.states.push_back(state);
        }
        res.exit = OdeExit::MaxDuration;
        return res;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DivisionByZero) {
            res.exit = OdeExit::DivisionByZero;
            res.error = e.what();
            return res;
        }
        throw;
    }
}

std::map<std::string, int> column_index(const std::vector<std::string>& columns) {
    std::map<std::string, int> cols;
    for (std::size_t i = 0; i < columns.size(); ++i) cols[columns[i]] = (int)i;
    return cols;
}

} // namespace

void SimPolicy::validate() const {
    if (!(assign_any_lo < assign_any_hi))
        throw Error(ErrorCode::BadPolicy, "assign_any_range must have lo < hi");
    if (assign_any_retries < 1) throw Error(ErrorCode::BadPolicy, "assign_any_retries must be >= 1");
    if (max_star_iterations < 0)
        throw Error(ErrorCode::BadPolicy, "max_star_iterations must be >= 0");
    if (!(ode_step > 0.0)) throw Error(ErrorCode::BadPolicy, "ode_step must be positive");
    if (!(ode_max_duration > 0.0))
        throw Error(ErrorCode::BadPolicy, "ode_max_duration must be positive");
    if (!(event_tolerance > 0.0))
        throw Error(ErrorCode::BadPolicy, "event_tolerance must be positive");
}

Valuation Trace::valuation_at(std::size_t sample_index) const {
    std::map<std::string, double> m;
    const Sample& s = samples.at(sample_index);
    for (std::size_t i = 0; i < columns.size(); ++i) m[columns[i]] = s.values[i];
    return Valuation(std::move(m));
}

Valuation OdeSegment::valuation_at(std::size_t index) const {
    std::map<std::string, double> m;
    for (std::size_t i = 0; i < columns.size(); ++i) m[columns[i]] = states.at(index)[i];
    return Valuation(std::move(m));
}

OdeSegment integrate_ode(const std::vector<std::pair<std::string, TermPtr>>& equations,
                         const Valuation& start, const FormulaPtr& domain,
                         const SimPolicy& policy) {
    policy.validate();
    OdeSegment seg;
    for (const auto& [name, value] : start.entries()) seg.columns.push_back(name);
    auto cols = column_index(seg.columns);

    CompiledOde ode;
    for (const auto& [v, rhs] : equations) {
        auto it = cols.find(v);
        if (it == cols.end())
            throw Error(ErrorCode::UnboundVariable, "evolved variable '" + v + "' not in valuation");
        ode.system.push_back({it->second, compile_term(rhs, cols)});
    }
    ode.domain = compile_formula(domain, cols);

    std::vector<double> state(seg.columns.size());
    for (std::size_t i = 0; i < seg.columns.size(); ++i) state[i] = start.get(seg.columns[i]);

    IntegrationResult res = integrate_compiled(ode, domain, seg.columns, cols, std::move(state), policy);
    seg.times = std::move(res.times);
    seg.states = std::move(res.states);
    seg.exit = res.exit;
    seg.error = std::move(res.error);
    return seg;
}

// ---- execution engine ------------------------------------------------------

namespace {

struct RunAborted {};

class Engine {
public:
    Engine(const Model& m, const SimPolicy& policy, const Box& box,
           const std::vector<Decision>* replay)
        : model_(m), policy_(policy), box_(box), replay_(replay), rng_(policy.seed) {
        policy_.validate();
        precheck_program(m.program, false);
        for (const auto& v : m.variables) columns_.push_back(v);
        for (const auto& c : m.constants) columns_.push_back(c);
        cols_ = column_index(columns_);
        auto order = stars_preorder(m.program);
        for (std::size_t i = 0; i < order.size(); ++i) star_index_[order[i].get()] = (int)i;
    }

    Trace run() {
        trace_.columns = columns_;
        state_.resize(columns_.size(), 0.0);
        sample_initial_state();
        emit(SampleTag::Sample);
        try {
            std::deque<ProgramPtr> work{model_.program};
            exec(work);
            emit(SampleTag::End);
        } catch (RunAborted&) {
            // trace already ends with the failing test sample
        }
        return std::move(trace_);
    }

private:
    const Model& model_;
    SimPolicy policy_;
    Box box_;
    const std::vector<Decision>* replay_;
    std::size_t replay_pos_ = 0;
    SplitMix64 rng_;

    std::vector<std::string> columns_;
    std::map<std::string, int> cols_;
    std::vector<double> state_;
    double now_ = 0.0;
    Trace trace_;
    std::map<const HybridProgram*, int> star_index_;
    std::map<const HybridProgram*, CompiledOde> ode_cache_;

    void emit(SampleTag tag, int star = -1) {
        trace_.samples.push_back({now_, state_, tag, star});
    }

    Valuation current_valuation() const {
        std::map<std::string, double> m;
        for (std::size_t i = 0; i < columns_.size(); ++i) m[columns_[i]] = state_[i];
        return Valuation(std::move(m));
    }

    int column_of(const std::string& name) const {
        auto it = cols_.find(name);
        if (it == cols_.end())
            throw Error(ErrorCode::UnboundVariable, "undeclared variable '" + name + "'");
        return it->second;
    }

    double draw(Decision::Kind kind, double live_value) {
        if (replay_) {
            if (replay_pos_ >= replay_->size() || (*replay_)[replay_pos_].kind != kind)
                throw Error(ErrorCode::UnsupportedConstruct, "replay log does not match the model");
            live_value = (*replay_)[replay_pos_++].value;
        }
        trace_.decisions.push_back({kind, live_value});
        return live_value;
    }
    bool replaying() const { return replay_ != nullptr; }

    std::pair<double, double> init_range(const std::string& name) const {
        auto it = box_.find(name);
        if (it != box_.end()) return it->second;
        return {policy_.assign_any_lo, policy_.assign_any_hi};
    }

    // Mixture proposal: mostly uniform, sometimes one of {0, 1, -1}. Used for
    // initial states and for assignments whose test chain demands an exact
    // value (the ?o*o = 1 orientation idiom), which continuous draws never hit.
    double propose_mixed_value(double lo, double hi) {
        if (rng_.uniform01() < 1.0 / 3.0) {
            double specials[3];
            int count = 0;
            for (double s : {0.0, 1.0, -1.0})
                if (s >= lo && s <= hi) specials[count++] = s;
            if (count > 0) return specials[rng_.below(count)];
        }
        return rng_.uniform(lo, hi);
    }

    void sample_initial_state() {
        if (replaying()) {
            for (std::size_t i = 0; i < columns_.size(); ++i)
                state_[i] = draw(Decision::Kind::InitValue, 0.0);
            return;
        }
        CFormula init = compile_formula(model_.init, cols_);
        const long attempts = 100L * policy_.assign_any_retries;
        for (long a = 0; a < attempts; ++a) {
            for (std::size_t i = 0; i < columns_.size(); ++i) {
                auto [lo, hi] = init_range(columns_[i]);
                state_[i] = propose_mixed_value(lo, hi);
            }
            if (init.eval(state_.data())) {
                for (std::size_t i = 0; i < columns_.size(); ++i)
                    draw(Decision::Kind::InitValue, state_[i]);
                return;
            }
        }
        throw Error(ErrorCode::InitUnsatisfiableAfterRetries,
                    "no initial state satisfying the init condition after " +
                        std::to_string(attempts) + " samples");
    }

    // Unfold chop spines at the front of the worklist so the next atomic
    // statement is visible.
    static void expose_front(std::deque<ProgramPtr>& work) {
        while (!work.empty()) {
            auto* c = std::get_if<HybridProgram::Chop>(&work.front()->node);
            if (!c) return;
            ProgramPtr first = c->first, second = c->second;
            work.pop_front();
            work.push_front(second);
            work.push_front(first);
        }
    }

    static void flatten_choice(const ProgramPtr& p, std::vector<ProgramPtr>& leaves) {
        if (auto* c = std::get_if<HybridProgram::Choice>(&p->node)) {
            flatten_choice(c->left, leaves);
            flatten_choice(c->right, leaves);
        } else {
            leaves.push_back(p);
        }
    }

    void exec(std::deque<ProgramPtr>& work) {
        using HP = HybridProgram;
        while (!work.empty()) {
            expose_front(work);
            if (work.empty()) return;
            ProgramPtr p = work.front();
            work.pop_front();
            std::visit(
                overloaded{
                    [&](const HP::Chop&) {
                        work.push_front(p); // re-expose
                        expose_front(work);
                    },
                    [&](const HP::Choice&) {
                        std::vector<ProgramPtr> leaves;
                        flatten_choice(p, leaves);
                        int idx = (int)draw(Decision::Kind::ChoiceIndex,
                                            (double)rng_.below(leaves.size()));
                        if (idx < 0 || idx >= (int)leaves.size())
                            throw Error(ErrorCode::UnsupportedConstruct, "bad choice index in replay");
                        work.push_front(leaves[idx]);
                    },
                    [&](const HP::Star& s) {
                        int star_id = star_index_.at(p.get());
                        int n = (int)draw(Decision::Kind::StarCount,
                                          (double)rng_.below((std::uint64_t)policy_.max_star_iterations + 1));
                        if (n < 0) throw Error(ErrorCode::UnsupportedConstruct, "bad star count");
                        emit(SampleTag::LoopBoundary, star_id);
                        for (int i = 0; i < n; ++i) {
                            std::deque<ProgramPtr> inner{s.body};
                            exec(inner);
                            emit(SampleTag::LoopBoundary, star_id);
                        }
                    },
                    [&](const HP::Assign& a) {
                        state_[column_of(a.var)] = eval_term(a.term, current_valuation());
                    },
                    [&](const HP::AssignAny& a) { run_assign_any(a.var, work); },
                    [&](const HP::ContinuousEvolution&) { run_continuous(p); },
                    [&](const HP::Quest& q) {
                        bool ok = eval_formula(q.cond, current_valuation());
                        emit(ok ? SampleTag::TestPass : SampleTag::TestFail);
                        if (!ok) throw RunAborted{};
                    },
                    [&](const HP::IfThenElse& i) {
                        if (eval_formula(i.cond, current_valuation())) {
                            work.push_front(i.then_branch);
                        } else if (i.else_branch) {
                            work.push_front(i.else_branch);
                        }
                    },
                    [&](const HP::WhileSym& w) {
                        long rounds = 0;
                        while (eval_formula(w.cond, current_valuation())) {
                            if (++rounds > kWhileIterationCap)
                                throw Error(ErrorCode::SimulationDiverged,
                                            "while loop exceeded the iteration cap");
                            std::deque<ProgramPtr> inner{w.body};
                            exec(inner);
                        }
                    },
                    [&](const HP::Placeholder& ph) {
                        throw PlaceholderExecutedError(ph.label, trace_);
                    },
                },
                p->node);
        }
    }

    // Nondeterministic assignment with rejection against the maximal chain
    // of tests that immediately follows it; the chain is consumed here.
    void run_assign_any(const std::string& name, std::deque<ProgramPtr>& work) {
        std::vector<FormulaPtr> chain;
        for (;;) {
            expose_front(work);
            if (work.empty()) break;
            auto* q = std::get_if<HybridProgram::Quest>(&work.front()->node);
            if (!q) break;
            chain.push_back(q->cond);
            work.pop_front();
        }
        int col = column_of(name);
        Valuation v = current_valuation();
        auto chain_holds = [&](double candidate) {
            v.set(name, candidate);
            for (const auto& q : chain)
                if (!eval_formula(q, v)) return false;
            return true;
        };

        if (replaying()) {
            // A log that ends here means the original run exhausted its
            // retries at this assignment; reproduce the abort.
            if (replay_pos_ >= replay_->size()) {
                emit(SampleTag::TestFail);
                throw RunAborted{};
            }
            double value = draw(Decision::Kind::AssignAnyValue, 0.0);
            state_[col] = value;
            bool ok = chain_holds(value);
            for (std::size_t i = 0; i < chain.size(); ++i)
                emit(ok ? SampleTag::TestPass : SampleTag::TestFail);
            if (!ok) throw RunAborted{};
            return;
        }

        // Exact-equality tests (the ?o*o = 1 orientation idiom) are never hit
        // by continuous draws, so such chains also propose the unit values.
        bool wants_exact = false;
        for (const auto& q : chain) wants_exact = wants_exact || contains_equality(q);

        for (int attempt = 0; attempt < policy_.assign_any_retries; ++attempt) {
            double candidate = wants_exact
                                   ? propose_mixed_value(policy_.assign_any_lo, policy_.assign_any_hi)
                                   : rng_.uniform(policy_.assign_any_lo, policy_.assign_any_hi);
            if (chain_holds(candidate)) {
                draw(Decision::Kind::AssignAnyValue, candidate);
                state_[col] = candidate;
                for (std::size_t i = 0; i < chain.size(); ++i) emit(SampleTag::TestPass);
                return;
            }
        }
        emit(SampleTag::TestFail);
        throw RunAborted{};
    }

    const CompiledOde& compiled_ode(const ProgramPtr& p) {
        auto it = ode_cache_.find(p.get());
        if (it != ode_cache_.end()) return it->second;
        const auto& c = std::get<HybridProgram::ContinuousEvolution>(p->node);
        CompiledOde ode;
        for (const auto& [v, rhs] : c.equations)
            ode.system.push_back({column_of(v), compile_term(rhs, cols_)});
        ode.domain = compile_formula(c.domain, cols_);
        return ode_cache_.emplace(p.get(), std::move(ode)).first->second;
    }

    void run_continuous(const ProgramPtr& p) {
        const auto& c = std::get<HybridProgram::ContinuousEvolution>(p->node);
        const CompiledOde& ode = compiled_ode(p);

        IntegrationResult res =
            integrate_compiled(ode, c.domain, columns_, cols_, state_, policy_);
        if (res.exit == OdeExit::DivisionByZero)
            throw Error(ErrorCode::DivisionByZero, res.error);

        double feasible = res.times.back();
        double stop;
        if (replaying()) {
            stop = draw(Decision::Kind::OdeStopTime, 0.0);
        } else {
            // Half the runs take the whole feasible duration so boundary
            // states (and the exact values snapping produces) are reachable;
            // the rest stop at a uniform prefix.
            double t = rng_.uniform01() < 0.5 ? feasible : rng_.uniform01() * feasible;
            stop = draw(Decision::Kind::OdeStopTime, t);
        }

        double base = now_;
        if (stop >= feasible) {
            for (std::size_t i = 0; i + 1 < res.times.size(); ++i) {
                now_ = base + res.times[i];
                state_ = res.states[i];
                emit(SampleTag::Sample);
            }
            now_ = base + res.times.back();
            state_ = res.states.back();
            emit(res.exit == OdeExit::DomainBoundary ? SampleTag::DomainExit : SampleTag::Sample);
            return;
        }

        std::size_t last = 0;
        for (std::size_t i = 0; i < res.times.size() && res.times[i] < stop; ++i) {
            last = i;
            now_ = base + res.times[i];
            state_ = res.states[i];
            emit(SampleTag::Sample);
        }
        std::vector<double> partial;
        rk4_step(ode, res.states[last], stop - res.times[last], partial);
        if (ode.domain.eval(partial.data())) {
            state_ = std::move(partial);
            now_ = base + stop;
        } else {
            state_ = res.states[last];
            now_ = base + res.times[last];
        }
        emit(SampleTag::Sample);
    }
};

std::optional<std::pair<double, FormulaPtr>> scan_trace(const Model& m, const Trace& t,
                                                        bool want_violation) {
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        const Sample& s = t.samples[i];
        if (s.tag != SampleTag::LoopBoundary && s.tag != SampleTag::End) continue;
        Valuation v = t.valuation_at(i);
        bool safe = eval_formula(m.safety, v);
        if (want_violation) {
            if (!safe) return std::make_pair(s.time, m.safety);
            if (s.tag == SampleTag::LoopBoundary && s.star_index >= 0) {
                auto it = m.loop_invariants.find((std::size_t)s.star_index);
                if (it != m.loop_invariants.end() && !eval_formula(it->second, v))
                    return std::make_pair(s.time, it->second);
            }
        } else {
            if (safe) return std::make_pair(s.time, m.safety);
        }
    }
    return std::nullopt;
}

} // namespace

Trace simulate_run(const Model& m, const SimPolicy& policy, const Box& box) {
    return Engine(m, policy, box, nullptr).run();
}

Trace replay_run(const Model& m, const SimPolicy& policy, const std::vector<Decision>& decisions,
                 const Box& box) {
    return Engine(m, policy, box, &decisions).run();
}

CheckResult check_safety(const Model& m, int runs, const SimPolicy& policy, const Box& box) {
    CheckResult result;
    for (int i = 0; i < runs; ++i) {
        SimPolicy run_policy = policy;
        run_policy.seed = derive_seed(policy.seed, (std::uint64_t)i);
        result.runs_executed = i + 1;
        Trace trace;
        try {
            trace = simulate_run(m, run_policy, box);
        } catch (const PlaceholderExecutedError& e) {
            const Trace& partial = e.partial_trace();
            auto hit = scan_trace(m, partial, true);
            if (!hit && !partial.samples.empty()) {
                std::size_t last = partial.samples.size() - 1;
                if (!eval_formula(m.safety, partial.valuation_at(last)))
                    hit = std::make_pair(partial.samples[last].time, m.safety);
            }
            if (hit) {
                result.verdict = Verdict::Counterexample;
                result.trace = partial;
                result.violated_at = hit;
                result.trace_seed = run_policy.seed;
                return result;
            }
            throw;
        }
        auto hit = scan_trace(m, trace, true);
        if (hit) {
            result.verdict = Verdict::Counterexample;
            result.trace = std::move(trace);
            result.violated_at = hit;
            result.trace_seed = run_policy.seed;
            return result;
        }
    }
    result.verdict = Verdict::NoCounterexampleFound;
    return result;
}

CheckResult check_diamond(const Model& m, int runs, const SimPolicy& policy, const Box& box) {
    CheckResult result;
    for (int i = 0; i < runs; ++i) {
        SimPolicy run_policy = policy;
        run_policy.seed = derive_seed(policy.seed, (std::uint64_t)i);
        result.runs_executed = i + 1;
        Trace trace = simulate_run(m, run_policy, box);
        auto hit = scan_trace(m, trace, false);
        if (hit) {
            result.verdict = Verdict::WitnessFound;
            result.trace = std::move(trace);
            result.violated_at = hit;
            result.trace_seed = run_policy.seed;
            return result;
        }
    }
    result.verdict = Verdict::NoWitnessFound;
    return result;
}

// ---- discrete reachability oracle -------------------------------------------

namespace {

std::set<Valuation> reach(const ProgramPtr& p, const std::set<Valuation>& in,
                          const std::vector<double>& values, int star_depth);

std::set<Valuation> filter(const FormulaPtr& f, const std::set<Valuation>& in) {
    std::set<Valuation> out;
    for (const auto& v : in)
        if (eval_formula(f, v)) out.insert(v);
    return out;
}

std::set<Valuation> reach(const ProgramPtr& p, const std::set<Valuation>& in,
                          const std::vector<double>& values, int star_depth) {
    using HP = HybridProgram;
    return std::visit(
        overloaded{
            [&](const HP::Chop& c) {
                return reach(c.second, reach(c.first, in, values, star_depth), values, star_depth);
            },
            [&](const HP::Choice& c) {
                std::set<Valuation> out = reach(c.left, in, values, star_depth);
                auto right = reach(c.right, in, values, star_depth);
                out.insert(right.begin(), right.end());
                return out;
            },
            [&](const HP::Star& s) {
                std::set<Valuation> acc = in;
                std::set<Valuation> frontier = in;
                for (int depth = 0; depth < star_depth && !frontier.empty(); ++depth) {
                    auto next = reach(s.body, frontier, values, star_depth);
                    frontier.clear();
                    for (const auto& v : next)
                        if (acc.insert(v).second) frontier.insert(v);
                }
                return acc;
            },
            [&](const HP::Assign& a) {
                std::set<Valuation> out;
                for (const auto& v : in) {
                    Valuation next = v;
                    next.set(a.var, eval_term(a.term, v));
                    out.insert(std::move(next));
                }
                return out;
            },
            [&](const HP::AssignAny& a) {
                std::set<Valuation> out;
                for (const auto& v : in) {
                    for (double d : values) {
                        Valuation next = v;
                        next.set(a.var, d);
                        out.insert(std::move(next));
                    }
                }
                return out;
            },
            [&](const HP::ContinuousEvolution&) -> std::set<Valuation> {
                throw Error(ErrorCode::ContinuousPresent,
                            "discrete reachability cannot handle continuous evolutions");
            },
            [&](const HP::Quest& q) { return filter(q.cond, in); },
            [&](const HP::IfThenElse& i) {
                std::set<Valuation> out = reach(i.then_branch, filter(i.cond, in), values, star_depth);
                std::set<Valuation> other = filter(lnot(i.cond), in);
                if (i.else_branch) other = reach(i.else_branch, other, values, star_depth);
                out.insert(other.begin(), other.end());
                return out;
            },
            [&](const HP::WhileSym& w) {
                std::set<Valuation> done = filter(lnot(w.cond), in);
                std::set<Valuation> alive = filter(w.cond, in);
                std::set<Valuation> seen = in;
                long rounds = 0;
                while (!alive.empty()) {
                    if (++rounds > kWhileIterationCap)
                        throw Error(ErrorCode::SimulationDiverged,
                                    "while loop exceeded the iteration cap");
                    auto next = reach(w.body, alive, values, star_depth);
                    alive.clear();
                    for (const auto& v : next) {
                        if (!seen.insert(v).second) continue;
                        if (eval_formula(w.cond, v)) alive.insert(v);
                        else done.insert(v);
                    }
                }
                return done;
            },
            [&](const HP::Placeholder& ph) -> std::set<Valuation> {
                throw PlaceholderExecutedError(ph.label, Trace{});
            },
        },
        p->node);
}

} // namespace

std::set<Valuation> enumerate_reachable_discrete(const ProgramPtr& p,
                                                 const std::set<Valuation>& initial,
                                                 const std::vector<double>& domain_values,
                                                 int star_depth) {
    return reach(p, initial, domain_values, star_depth);
}

std::string trace_to_csv(const Trace& t) {
    std::string out = "time";
    for (const auto& c : t.columns) out += "," + c;
    out += ",tag\n";
    char buf[64];
    auto fmt = [&](double x) {
        auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
        return std::string(buf, res.ptr);
    };
    for (const auto& s : t.samples) {
        out += fmt(s.time);
        for (double v : s.values) out += "," + fmt(v);
        switch (s.tag) {
        case SampleTag::Sample: out += ",sample"; break;
        case SampleTag::LoopBoundary: out += ",loop_boundary"; break;
        case SampleTag::DomainExit: out += ",domain_exit"; break;
        case SampleTag::TestPass: out += ",test_pass"; break;
        case SampleTag::TestFail: out += ",test_fail"; break;
        case SampleTag::End: out += ",end"; break;
        }
        out += '\n';
    }
    return out;
}

} // namespace hpk

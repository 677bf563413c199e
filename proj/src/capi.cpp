#include "hpk.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "ast.hpp"
#include "corpus.hpp"
#include "diff.hpp"
#include "eval.hpp"
#include "graph.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "simulate.hpp"
#include "transform.hpp"

using namespace hpk;

struct hpk_model {
    Model value;
};
struct hpk_graph {
    ActivityGraph value;
};
struct hpk_trace {
    Trace value;
};
struct hpk_check {
    CheckResult value;
    std::unique_ptr<hpk_trace> trace_wrapper;

    explicit hpk_check(CheckResult r) : value(std::move(r)) {
        if (value.trace) trace_wrapper = std::make_unique<hpk_trace>(hpk_trace{*value.trace});
    }
};
struct hpk_box {
    Box value;
};

namespace {

char* dup_string(const std::string& s) {
    char* out = (char*)std::malloc(s.size() + 1);
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

hpk_status status_of(const Error& e) {
    switch (e.code()) {
    case ErrorCode::Syntax: return HPK_ERR_SYNTAX;
    case ErrorCode::UndeclaredVariable: return HPK_ERR_UNDECLARED;
    case ErrorCode::ConstantWritten: return HPK_ERR_CONSTANT_WRITTEN;
    case ErrorCode::DanglingEdge:
    case ErrorCode::DuplicateNodeId:
    case ErrorCode::MalformedGraph: return HPK_ERR_GRAPH;
    case ErrorCode::NotWellStructured: return HPK_ERR_NOT_WELL_STRUCTURED;
    case ErrorCode::UnboundVariable:
    case ErrorCode::DivisionByZero:
    case ErrorCode::UnsupportedConstruct:
    case ErrorCode::ContinuousPresent: return HPK_ERR_EVAL;
    case ErrorCode::PlaceholderExecuted:
    case ErrorCode::InitUnsatisfiableAfterRetries:
    case ErrorCode::QuantifierInProgram:
    case ErrorCode::UnboundedWhileDynamics:
    case ErrorCode::SimulationDiverged: return HPK_ERR_SIMULATION;
    case ErrorCode::UnknownName: return HPK_ERR_UNKNOWN_NAME;
    case ErrorCode::KindMismatch: return HPK_ERR_KIND_MISMATCH;
    case ErrorCode::BadPolicy: return HPK_ERR_BAD_ARGUMENT;
    }
    return HPK_ERR_INTERNAL;
}

std::string describe(const Error& e) {
    std::string msg = e.what();
    if (e.span()) {
        msg = "line " + std::to_string(e.span()->line) + ", column " +
              std::to_string(e.span()->column) + ": " + msg;
    }
    return msg;
}

template <typename Fn>
hpk_status guarded(char** err, Fn&& fn) {
    if (err) *err = nullptr;
    try {
        fn();
        return HPK_OK;
    } catch (const Error& e) {
        if (err) *err = dup_string(describe(e));
        return status_of(e);
    } catch (const std::exception& e) {
        if (err) *err = dup_string(e.what());
        return HPK_ERR_INTERNAL;
    }
}

SimPolicy to_policy(const hpk_policy* p) {
    SimPolicy out;
    if (!p) return out;
    out.seed = p->seed;
    out.assign_any_lo = p->assign_any_lo;
    out.assign_any_hi = p->assign_any_hi;
    out.assign_any_retries = p->assign_any_retries;
    out.max_star_iterations = p->max_star_iterations;
    out.ode_step = p->ode_step;
    out.ode_max_duration = p->ode_max_duration;
    out.event_tolerance = p->event_tolerance;
    return out;
}

Box to_box(const hpk_box* box) { return box ? box->value : Box{}; }

} // namespace

extern "C" {

const char* hpk_version(void) { return "1.0.0"; }

void hpk_string_free(char* s) { std::free(s); }

void hpk_policy_init(hpk_policy* policy) {
    if (!policy) return;
    SimPolicy defaults;
    policy->seed = defaults.seed;
    policy->assign_any_lo = defaults.assign_any_lo;
    policy->assign_any_hi = defaults.assign_any_hi;
    policy->assign_any_retries = defaults.assign_any_retries;
    policy->max_star_iterations = defaults.max_star_iterations;
    policy->ode_step = defaults.ode_step;
    policy->ode_max_duration = defaults.ode_max_duration;
    policy->event_tolerance = defaults.event_tolerance;
}

hpk_input_kind hpk_sniff(const char* text) {
    switch (sniff_input_kind(text ? text : "")) {
    case InputKind::ModelFile: return HPK_INPUT_MODEL;
    case InputKind::GraphFile: return HPK_INPUT_GRAPH;
    default: return HPK_INPUT_UNKNOWN;
    }
}

hpk_status hpk_model_parse(const char* text, hpk_model** out, char** err) {
    return guarded(err, [&] { *out = new hpk_model{parse_model(text ? text : "")}; });
}

hpk_status hpk_graph_parse(const char* text, hpk_graph** out, char** err) {
    return guarded(err, [&] { *out = new hpk_graph{parse_activity_graph(text ? text : "")}; });
}

void hpk_model_free(hpk_model* m) { delete m; }
void hpk_graph_free(hpk_graph* g) { delete g; }

char* hpk_model_format(const hpk_model* m) { return dup_string(pretty_print(m->value)); }
char* hpk_graph_format(const hpk_graph* g) { return dup_string(pretty_print(g->value)); }
const char* hpk_model_name(const hpk_model* m) { return m->value.name.c_str(); }
const char* hpk_graph_name(const hpk_graph* g) { return g->value.name.c_str(); }

hpk_status hpk_to_hybrid_program(const hpk_graph* g, hpk_model** out, char** err) {
    return guarded(err, [&] { *out = new hpk_model{to_hybrid_program(g->value)}; });
}

hpk_status hpk_to_automaton_embedding(const hpk_graph* g, hpk_model** out, char** err) {
    return guarded(err, [&] { *out = new hpk_model{to_automaton_embedding(g->value)}; });
}

hpk_box* hpk_box_new(void) { return new hpk_box{}; }
void hpk_box_set(hpk_box* box, const char* var, double lo, double hi) {
    if (box && var) box->value[var] = {lo, hi};
}
void hpk_box_free(hpk_box* box) { delete box; }

hpk_status hpk_simulate(const hpk_model* m, const hpk_policy* policy, const hpk_box* box,
                        hpk_trace** out, char** err) {
    return guarded(err, [&] {
        *out = new hpk_trace{simulate_run(m->value, to_policy(policy), to_box(box))};
    });
}

void hpk_trace_free(hpk_trace* t) { delete t; }
char* hpk_trace_csv(const hpk_trace* t) { return dup_string(trace_to_csv(t->value)); }
int hpk_trace_sample_count(const hpk_trace* t) { return (int)t->value.samples.size(); }

hpk_status hpk_check_safety(const hpk_model* m, int runs, const hpk_policy* policy,
                            const hpk_box* box, hpk_check** out, char** err) {
    return guarded(err, [&] {
        *out = new hpk_check(check_safety(m->value, runs, to_policy(policy), to_box(box)));
    });
}

hpk_status hpk_check_diamond(const hpk_model* m, int runs, const hpk_policy* policy,
                             const hpk_box* box, hpk_check** out, char** err) {
    return guarded(err, [&] {
        *out = new hpk_check(check_diamond(m->value, runs, to_policy(policy), to_box(box)));
    });
}

void hpk_check_free(hpk_check* c) { delete c; }

hpk_verdict hpk_check_verdict(const hpk_check* c) {
    switch (c->value.verdict) {
    case Verdict::NoCounterexampleFound: return HPK_NO_COUNTEREXAMPLE;
    case Verdict::Counterexample: return HPK_COUNTEREXAMPLE;
    case Verdict::WitnessFound: return HPK_WITNESS_FOUND;
    case Verdict::NoWitnessFound: return HPK_NO_WITNESS_FOUND;
    }
    return HPK_NO_COUNTEREXAMPLE;
}

int hpk_check_runs_executed(const hpk_check* c) { return c->value.runs_executed; }

const hpk_trace* hpk_check_trace(const hpk_check* c) { return c->trace_wrapper.get(); }

double hpk_check_violation_time(const hpk_check* c) {
    return c->value.violated_at ? c->value.violated_at->first : 0.0;
}

char* hpk_check_violation_formula(const hpk_check* c) {
    if (!c->value.violated_at) return nullptr;
    return dup_string(pretty_print(c->value.violated_at->second));
}

hpk_status hpk_reach(const hpk_model* m, const double* values, int value_count, int star_depth,
                     char** out, char** err) {
    return guarded(err, [&] {
        if (!values || value_count <= 0)
            throw Error(ErrorCode::BadPolicy, "reach needs a non-empty value set");
        std::vector<double> vals(values, values + value_count);
        std::vector<std::string> names = m->value.variables;
        names.insert(names.end(), m->value.constants.begin(), m->value.constants.end());

        // Initial set: every grid valuation satisfying the init formula.
        std::set<Valuation> initial;
        std::vector<std::size_t> idx(names.size(), 0);
        for (;;) {
            std::map<std::string, double> entry;
            for (std::size_t i = 0; i < names.size(); ++i) entry[names[i]] = vals[idx[i]];
            Valuation v(std::move(entry));
            if (eval_formula(m->value.init, v)) initial.insert(std::move(v));
            std::size_t k = 0;
            while (k < idx.size() && ++idx[k] == vals.size()) idx[k++] = 0;
            if (k == idx.size()) break;
        }

        auto states = enumerate_reachable_discrete(m->value.program, initial, vals, star_depth);
        std::string text;
        for (const auto& v : states) {
            text += "{";
            bool first = true;
            for (const auto& [name, value] : v.entries()) {
                if (!first) text += ", ";
                first = false;
                text += name + "=" + format_number(value);
            }
            text += "}\n";
        }
        *out = dup_string(text);
    });
}

hpk_status hpk_diff_models(const hpk_model* a, const hpk_model* b, int tsv, char** report,
                           int* entry_count, char** err) {
    return guarded(err, [&] {
        auto entries = diff_trees(a->value, b->value);
        if (entry_count) *entry_count = (int)entries.size();
        if (report) *report = dup_string(render_diff(entries, tsv != 0));
    });
}

hpk_status hpk_diff_graphs(const hpk_graph* a, const hpk_graph* b, int tsv, char** report,
                           int* entry_count, char** err) {
    return guarded(err, [&] {
        auto entries = diff_trees(a->value, b->value);
        if (entry_count) *entry_count = (int)entries.size();
        if (report) *report = dup_string(render_diff(entries, tsv != 0));
    });
}

int hpk_corpus_count(void) { return (int)corpus_names().size(); }

const char* hpk_corpus_name(int index) {
    const auto& names = corpus_names();
    if (index < 0 || (std::size_t)index >= names.size()) return nullptr;
    return names[(std::size_t)index].c_str();
}

int hpk_corpus_is_graph(const char* name) {
    try {
        return get_model(name ? name : "").graph ? 1 : 0;
    } catch (const Error&) {
        return 0;
    }
}

const char* hpk_corpus_filename(const char* name) {
    // Filenames are fixed; return a pointer into the static name table.
    static thread_local std::string last;
    try {
        last = get_model(name ? name : "").filename;
        return last.c_str();
    } catch (const Error&) {
        return nullptr;
    }
}

char* hpk_corpus_description(const char* name) {
    try {
        return dup_string(get_model(name ? name : "").description);
    } catch (const Error&) {
        return nullptr;
    }
}

hpk_status hpk_corpus_model(const char* name, hpk_model** out, char** err) {
    return guarded(err, [&] {
        CorpusEntry e = get_model(name ? name : "");
        if (!e.model)
            throw Error(ErrorCode::KindMismatch, "corpus entry '" + e.name + "' is a graph");
        *out = new hpk_model{std::move(*e.model)};
    });
}

hpk_status hpk_corpus_graph(const char* name, hpk_graph** out, char** err) {
    return guarded(err, [&] {
        CorpusEntry e = get_model(name ? name : "");
        if (!e.graph)
            throw Error(ErrorCode::KindMismatch, "corpus entry '" + e.name + "' is a model");
        *out = new hpk_graph{std::move(*e.graph)};
    });
}

hpk_status hpk_corpus_box(const char* name, hpk_box** out, char** err) {
    return guarded(err, [&] { *out = new hpk_box{get_model(name ? name : "").parameter_box}; });
}

} // extern "C"

// Command-line front end for the hpk library. Links against the shared C API
// only. Exit codes: 0 success / property holds as far as tested, 1 a
// counterexample or difference was found, 2 usage or input errors.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpk.h"

namespace {

struct ScopedString {
    char* value = nullptr;
    ~ScopedString() { hpk_string_free(value); }
};

[[noreturn]] void fail_usage(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(2);
}

void fail_api(const char* what, hpk_status status, const ScopedString& err) {
    std::cerr << "error: " << what << ": " << (err.value ? err.value : "unknown error")
              << " (status " << (int)status << ")\n";
    std::exit(2);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_usage("cannot open '" + path + "'");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) fail_usage("cannot write '" + path + "'");
    out << content;
}

hpk_model* load_model(const std::string& path) {
    std::string text = read_file(path);
    hpk_model* model = nullptr;
    ScopedString err;
    hpk_status status = hpk_model_parse(text.c_str(), &model, &err.value);
    if (status != HPK_OK) fail_api(path.c_str(), status, err);
    return model;
}

hpk_graph* load_graph(const std::string& path) {
    std::string text = read_file(path);
    hpk_graph* graph = nullptr;
    ScopedString err;
    hpk_status status = hpk_graph_parse(text.c_str(), &graph, &err.value);
    if (status != HPK_OK) fail_api(path.c_str(), status, err);
    return graph;
}

uint64_t default_seed() {
    if (const char* env = std::getenv("HPK_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            fail_usage("HPK_SEED is not a number");
        }
    }
    return 0;
}

void apply_policy_overrides(hpk_policy& policy, const std::vector<std::string>& overrides) {
    for (const auto& item : overrides) {
        auto eq = item.find('=');
        if (eq == std::string::npos) fail_usage("--policy expects key=value, got '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string value = item.substr(eq + 1);
        try {
            if (key == "seed") policy.seed = std::stoull(value);
            else if (key == "assign_any_retries") policy.assign_any_retries = std::stoi(value);
            else if (key == "max_star_iterations") policy.max_star_iterations = std::stoi(value);
            else if (key == "ode_step") policy.ode_step = std::stod(value);
            else if (key == "ode_max_duration") policy.ode_max_duration = std::stod(value);
            else if (key == "event_tolerance") policy.event_tolerance = std::stod(value);
            else if (key == "assign_any_lo") policy.assign_any_lo = std::stod(value);
            else if (key == "assign_any_hi") policy.assign_any_hi = std::stod(value);
            else if (key == "assign_any_range") {
                auto comma = value.find(',');
                if (comma == std::string::npos)
                    fail_usage("assign_any_range expects LO,HI");
                policy.assign_any_lo = std::stod(value.substr(0, comma));
                policy.assign_any_hi = std::stod(value.substr(comma + 1));
            } else {
                fail_usage("unknown policy field '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            fail_usage("bad value for policy field '" + key + "'");
        } catch (const std::out_of_range&) {
            fail_usage("bad value for policy field '" + key + "'");
        }
    }
}

hpk_box* make_box(const std::vector<std::string>& entries) {
    if (entries.empty()) return nullptr;
    hpk_box* box = hpk_box_new();
    for (const auto& item : entries) {
        auto eq = item.find('=');
        auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos)
            fail_usage("--box expects VAR=LO:HI, got '" + item + "'");
        try {
            double lo = std::stod(item.substr(eq + 1, colon - eq - 1));
            double hi = std::stod(item.substr(colon + 1));
            hpk_box_set(box, item.substr(0, eq).c_str(), lo, hi);
        } catch (...) {
            fail_usage("bad bounds in --box entry '" + item + "'");
        }
    }
    return box;
}

int cmd_fmt(const std::string& path) {
    std::string text = read_file(path);
    ScopedString err;
    switch (hpk_sniff(text.c_str())) {
    case HPK_INPUT_MODEL: {
        hpk_model* m = nullptr;
        hpk_status status = hpk_model_parse(text.c_str(), &m, &err.value);
        if (status != HPK_OK) fail_api(path.c_str(), status, err);
        ScopedString out{hpk_model_format(m)};
        std::cout << out.value;
        hpk_model_free(m);
        return 0;
    }
    case HPK_INPUT_GRAPH: {
        hpk_graph* g = nullptr;
        hpk_status status = hpk_graph_parse(text.c_str(), &g, &err.value);
        if (status != HPK_OK) fail_api(path.c_str(), status, err);
        ScopedString out{hpk_graph_format(g)};
        std::cout << out.value;
        hpk_graph_free(g);
        return 0;
    }
    default:
        fail_usage("'" + path + "' is neither a model nor a graph file");
    }
}

int cmd_transform(const std::string& path, const std::string& out_path, bool embed) {
    hpk_graph* g = load_graph(path);
    hpk_model* m = nullptr;
    ScopedString err;
    hpk_status status = embed ? hpk_to_automaton_embedding(g, &m, &err.value)
                              : hpk_to_hybrid_program(g, &m, &err.value);
    if (status != HPK_OK) fail_api(path.c_str(), status, err);
    ScopedString text{hpk_model_format(m)};
    if (out_path.empty()) std::cout << text.value;
    else write_file(out_path, text.value);
    hpk_model_free(m);
    hpk_graph_free(g);
    return 0;
}

int cmd_simulate(const std::string& path, const hpk_policy& policy, const std::string& out_path,
                 hpk_box* box) {
    hpk_model* m = load_model(path);
    hpk_trace* trace = nullptr;
    ScopedString err;
    hpk_status status = hpk_simulate(m, &policy, box, &trace, &err.value);
    if (status != HPK_OK) fail_api(path.c_str(), status, err);
    ScopedString csv{hpk_trace_csv(trace)};
    if (out_path.empty()) std::cout << csv.value;
    else write_file(out_path, csv.value);
    hpk_trace_free(trace);
    hpk_model_free(m);
    return 0;
}

int cmd_check(const std::string& path, int runs, const hpk_policy& policy,
              const std::string& cex_path, hpk_box* box) {
    hpk_model* m = load_model(path);
    hpk_check* check = nullptr;
    ScopedString err;
    hpk_status status = hpk_check_safety(m, runs, &policy, box, &check, &err.value);
    if (status != HPK_OK) fail_api(path.c_str(), status, err);
    int exit_code = 0;
    if (hpk_check_verdict(check) == HPK_COUNTEREXAMPLE) {
        ScopedString formula{hpk_check_violation_formula(check)};
        std::cout << "counterexample in run " << hpk_check_runs_executed(check) << " of " << runs
                  << ": violates " << (formula.value ? formula.value : "safety") << " at t="
                  << hpk_check_violation_time(check) << "\n";
        if (!cex_path.empty() && hpk_check_trace(check)) {
            ScopedString csv{hpk_trace_csv(hpk_check_trace(check))};
            write_file(cex_path, csv.value);
        }
        exit_code = 1;
    } else {
        std::cout << "no counterexample in " << hpk_check_runs_executed(check) << " runs\n";
    }
    hpk_check_free(check);
    hpk_model_free(m);
    return exit_code;
}

int cmd_reach(const std::string& path, const std::string& values_text, int depth) {
    std::vector<double> values;
    std::stringstream ss(values_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (...) {
            fail_usage("bad value '" + item + "' in --values");
        }
    }
    hpk_model* m = load_model(path);
    ScopedString out, err;
    hpk_status status =
        hpk_reach(m, values.data(), (int)values.size(), depth, &out.value, &err.value);
    if (status != HPK_OK) fail_api(path.c_str(), status, err);
    std::cout << out.value;
    hpk_model_free(m);
    return 0;
}

int cmd_diff(const std::string& path_a, const std::string& path_b, bool tsv) {
    std::string text_a = read_file(path_a);
    std::string text_b = read_file(path_b);
    hpk_input_kind kind_a = hpk_sniff(text_a.c_str());
    hpk_input_kind kind_b = hpk_sniff(text_b.c_str());
    if (kind_a == HPK_INPUT_UNKNOWN) fail_usage("'" + path_a + "' is neither a model nor a graph");
    if (kind_b == HPK_INPUT_UNKNOWN) fail_usage("'" + path_b + "' is neither a model nor a graph");
    if (kind_a != kind_b)
        fail_usage("cannot compare a model with an activity graph");

    ScopedString report, err;
    int count = 0;
    if (kind_a == HPK_INPUT_MODEL) {
        hpk_model* a = load_model(path_a);
        hpk_model* b = load_model(path_b);
        hpk_status status = hpk_diff_models(a, b, tsv ? 1 : 0, &report.value, &count, &err.value);
        if (status != HPK_OK) fail_api("diff", status, err);
        hpk_model_free(a);
        hpk_model_free(b);
    } else {
        hpk_graph* a = load_graph(path_a);
        hpk_graph* b = load_graph(path_b);
        hpk_status status = hpk_diff_graphs(a, b, tsv ? 1 : 0, &report.value, &count, &err.value);
        if (status != HPK_OK) fail_api("diff", status, err);
        hpk_graph_free(a);
        hpk_graph_free(b);
    }
    std::cout << report.value;
    return count > 0 ? 1 : 0;
}

int cmd_corpus(const std::string& action, const std::string& arg) {
    if (action == "list") {
        for (int i = 0; i < hpk_corpus_count(); ++i) {
            const char* name = hpk_corpus_name(i);
            ScopedString desc{hpk_corpus_description(name)};
            std::cout << name << "\t" << hpk_corpus_filename(name) << "\t"
                      << (desc.value ? desc.value : "") << "\n";
        }
        return 0;
    }
    if (action == "show") {
        ScopedString err;
        if (hpk_corpus_is_graph(arg.c_str())) {
            hpk_graph* g = nullptr;
            hpk_status status = hpk_corpus_graph(arg.c_str(), &g, &err.value);
            if (status != HPK_OK) fail_api(arg.c_str(), status, err);
            ScopedString text{hpk_graph_format(g)};
            std::cout << text.value;
            hpk_graph_free(g);
        } else {
            hpk_model* m = nullptr;
            hpk_status status = hpk_corpus_model(arg.c_str(), &m, &err.value);
            if (status != HPK_OK) fail_api(arg.c_str(), status, err);
            ScopedString text{hpk_model_format(m)};
            std::cout << text.value;
            hpk_model_free(m);
        }
        return 0;
    }
    if (action == "export") {
        for (int i = 0; i < hpk_corpus_count(); ++i) {
            const char* name = hpk_corpus_name(i);
            std::string path = arg + "/" + hpk_corpus_filename(name);
            ScopedString err;
            if (hpk_corpus_is_graph(name)) {
                hpk_graph* g = nullptr;
                hpk_status status = hpk_corpus_graph(name, &g, &err.value);
                if (status != HPK_OK) fail_api(name, status, err);
                ScopedString text{hpk_graph_format(g)};
                write_file(path, text.value);
                hpk_graph_free(g);
            } else {
                hpk_model* m = nullptr;
                hpk_status status = hpk_corpus_model(name, &m, &err.value);
                if (status != HPK_OK) fail_api(name, status, err);
                ScopedString text{hpk_model_format(m)};
                write_file(path, text.value);
                hpk_model_free(m);
            }
            std::cerr << "wrote " << path << "\n";
        }
        return 0;
    }
    fail_usage("corpus expects list, show NAME or export DIR");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hpk - hybrid program toolkit"};
    app.require_subcommand(1);

    std::string file, file_b, out_path, values_text, cex_path, format = "text", corpus_arg;
    std::vector<std::string> policy_overrides, box_entries;
    uint64_t seed = default_seed();
    int runs = 100, depth = 5;

    auto* fmt = app.add_subcommand("fmt", "Parse a model or graph file and reprint it");
    fmt->add_option("file", file)->required();

    auto* transform = app.add_subcommand("transform", "Structured graph-to-program transformation");
    transform->add_option("graph", file)->required();
    transform->add_option("-o,--out", out_path, "Output model file (default stdout)");

    auto* embed = app.add_subcommand("embed", "Automaton embedding of an activity graph");
    embed->add_option("graph", file)->required();
    embed->add_option("-o,--out", out_path, "Output model file (default stdout)");

    auto* simulate = app.add_subcommand("simulate", "Run one seeded simulation, exporting CSV");
    simulate->add_option("model", file)->required();
    simulate->add_option("--seed", seed, "Run seed (default HPK_SEED or 0)");
    simulate->add_option("--out", out_path, "CSV output path (default stdout)");
    simulate->add_option("--policy", policy_overrides, "Policy override key=value");
    simulate->add_option("--box", box_entries, "Initial sampling interval VAR=LO:HI");

    auto* check = app.add_subcommand("check", "Falsification: search for a safety counterexample");
    check->add_option("model", file)->required();
    check->add_option("--runs", runs, "Number of seeded runs")->required();
    check->add_option("--seed", seed, "Batch seed (default HPK_SEED or 0)");
    check->add_option("--csv-counterexample", cex_path, "Write the violating trace as CSV");
    check->add_option("--policy", policy_overrides, "Policy override key=value");
    check->add_option("--box", box_entries, "Initial sampling interval VAR=LO:HI");

    auto* reach = app.add_subcommand("reach", "Exact discrete reachability over a finite value set");
    reach->add_option("model", file)->required();
    reach->add_option("--values", values_text, "Comma-separated value set")->required();
    reach->add_option("--depth", depth, "Star iteration depth")->required();

    auto* diff = app.add_subcommand("diff", "Structural comparison of two models or graphs");
    diff->add_option("a", file)->required();
    diff->add_option("b", file_b)->required();
    diff->add_option("--format", format, "Report format: text or tsv")
        ->check(CLI::IsMember({"text", "tsv"}));

    auto* corpus = app.add_subcommand("corpus", "List, show or export the bundled models");
    corpus->add_option("action", corpus_arg)->required();
    std::string corpus_name;
    corpus->add_option("name_or_dir", corpus_name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    hpk_policy policy;
    hpk_policy_init(&policy);
    policy.seed = default_seed();
    apply_policy_overrides(policy, policy_overrides);
    if (simulate->count("--seed") || check->count("--seed")) policy.seed = seed;

    hpk_box* box = make_box(box_entries);
    int code = 2;
    if (app.got_subcommand(fmt)) code = cmd_fmt(file);
    else if (app.got_subcommand(transform)) code = cmd_transform(file, out_path, false);
    else if (app.got_subcommand(embed)) code = cmd_transform(file, out_path, true);
    else if (app.got_subcommand(simulate)) code = cmd_simulate(file, policy, out_path, box);
    else if (app.got_subcommand(check)) code = cmd_check(file, runs, policy, cex_path, box);
    else if (app.got_subcommand(reach)) code = cmd_reach(file, values_text, depth);
    else if (app.got_subcommand(diff)) code = cmd_diff(file, file_b, format == "tsv");
    else if (app.got_subcommand(corpus)) {
        if (corpus_arg != "list" && corpus_name.empty())
            fail_usage("corpus " + corpus_arg + " needs an argument");
        code = cmd_corpus(corpus_arg, corpus_name);
    }
    if (box) hpk_box_free(box);
    return code;
}

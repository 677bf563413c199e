#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ast.hpp"
#include "eval.hpp"

namespace hpk {

// Knobs that resolve the nondeterminism a hybrid program leaves open.
struct SimPolicy {
    std::uint64_t seed = 0;
    double assign_any_lo = -10.0;
    double assign_any_hi = 10.0;
    int assign_any_retries = 100;
    int max_star_iterations = 10;
    double ode_step = 1e-3;
    double ode_max_duration = 100.0;
    double event_tolerance = 1e-6;

    void validate() const; // throws BadPolicy
};

// Per-variable sampling intervals for the initial state; variables without
// an entry fall back to the policy's assign-any range.
using Box = std::map<std::string, std::pair<double, double>>;

enum class SampleTag { Sample, LoopBoundary, DomainExit, TestPass, TestFail, End };

struct Sample {
    double time = 0.0;
    std::vector<double> values; // one per trace column
    SampleTag tag = SampleTag::Sample;
    int star_index = -1;        // preorder star index for LoopBoundary samples
};

// Replayable resolution log. Re-running a model against a trace's decisions
// reproduces the trace bit for bit.
struct Decision {
    enum class Kind { InitValue, ChoiceIndex, StarCount, AssignAnyValue, OdeStopTime };
    Kind kind;
    double value;
};

struct Trace {
    std::vector<std::string> columns; // declared variables, then constants
    std::vector<Sample> samples;
    std::vector<Decision> decisions;

    bool completed() const {
        return !samples.empty() && samples.back().tag == SampleTag::End;
    }
    Valuation valuation_at(std::size_t sample_index) const;
};

// CSV export: header `time,<var1>,...,tag`, one row per sample.
std::string trace_to_csv(const Trace& t);

enum class OdeExit { DomainBoundary, MaxDuration, DivisionByZero };

struct OdeSegment {
    std::vector<std::string> columns;
    std::vector<double> times;                // local, starting at 0
    std::vector<std::vector<double>> states;
    OdeExit exit = OdeExit::MaxDuration;
    std::string error;                        // set for DivisionByZero

    Valuation valuation_at(std::size_t index) const;
};

// Fixed-step classical Runge-Kutta integration of the equation system from
// `start`, stopping at the first evolution-domain violation (localized by
// bisection to within event_tolerance in time) or at ode_max_duration.
// When the boundary conjunct compares a bare variable against a bound, the
// final state snaps that variable to the exact bound value so later exact
// tests can pass. If the domain is false at `start`, the segment is the
// start point alone with a domain-boundary exit.
OdeSegment integrate_ode(const std::vector<std::pair<std::string, TermPtr>>& equations,
                         const Valuation& start, const FormulaPtr& domain,
                         const SimPolicy& policy);

class PlaceholderExecutedError : public Error {
public:
    PlaceholderExecutedError(const std::string& label, Trace partial)
        : Error(ErrorCode::PlaceholderExecuted, "placeholder \"" + label + "\" executed"),
          partial_(std::move(partial)) {}
    const Trace& partial_trace() const { return partial_; }

private:
    Trace partial_;
};

// One seeded run of the model. Quest failure ends the trace with a test_fail
// sample (callers discard and resample); placeholders raise
// PlaceholderExecutedError carrying the partial trace.
Trace simulate_run(const Model& m, const SimPolicy& policy, const Box& box = {});

// Re-executes a run with `decisions` as the resolution source.
Trace replay_run(const Model& m, const SimPolicy& policy, const std::vector<Decision>& decisions,
                 const Box& box = {});

enum class Verdict { NoCounterexampleFound, Counterexample, WitnessFound, NoWitnessFound };

struct CheckResult {
    Verdict verdict = Verdict::NoCounterexampleFound;
    int runs_executed = 0;
    std::optional<Trace> trace;
    std::optional<std::pair<double, FormulaPtr>> violated_at;
    std::uint64_t trace_seed = 0; // seed of the reported run
};

// Falsification: run up to `runs` seeded simulations, evaluating the safety
// formula (and any loop invariants) at every loop boundary and at run end.
// Never a proof; the lowest-index violating run wins.
CheckResult check_safety(const Model& m, int runs, const SimPolicy& policy, const Box& box = {});

// Witness search for a diamond goal stored in m.safety: reports the first
// run reaching a legal stopping state that satisfies the goal.
CheckResult check_diamond(const Model& m, int runs, const SimPolicy& policy, const Box& box = {});

// Exact forward-image computation for continuous-free programs over a finite
// value set; the testing oracle for the two graph semantics. AssignAny
// ranges over domain_values; Star iterates to fixpoint or star_depth.
std::set<Valuation> enumerate_reachable_discrete(const ProgramPtr& p,
                                                 const std::set<Valuation>& initial,
                                                 const std::vector<double>& domain_values,
                                                 int star_depth);

} // namespace hpk

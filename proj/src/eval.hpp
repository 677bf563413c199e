#pragma once

#include <map>
#include <string>

#include "ast.hpp"

namespace hpk {

// Total assignment of 64-bit floats to a fixed set of identifiers.
// Lookup of an unbound identifier is an error.
class Valuation {
public:
    Valuation() = default;
    explicit Valuation(std::map<std::string, double> values) : values_(std::move(values)) {}

    double get(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end())
            throw Error(ErrorCode::UnboundVariable, "unbound variable '" + name + "'");
        return it->second;
    }
    void set(const std::string& name, double value) { values_[name] = value; }
    bool has(const std::string& name) const { return values_.count(name) != 0; }

    const std::map<std::string, double>& entries() const { return values_; }

    friend bool operator<(const Valuation& a, const Valuation& b) { return a.values_ < b.values_; }
    friend bool operator==(const Valuation& a, const Valuation& b) { return a.values_ == b.values_; }

private:
    std::map<std::string, double> values_;
};

// Standard real arithmetic on doubles; abs/max/min per their mathematical
// definition. Division by exactly 0.0 raises DivisionByZero.
double eval_term(const TermPtr& t, const Valuation& v);

// Classical two-valued evaluation of a quantifier- and modality-free formula.
// `=` is exact float equality. Forall/Exists/Box/Diamond raise
// UnsupportedConstruct.
bool eval_formula(const FormulaPtr& f, const Valuation& v);

} // namespace hpk

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace hpk {

// 1-based location of a token in source text.
struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 1;
};

enum class ErrorCode {
    Syntax,
    UnboundVariable,
    DivisionByZero,
    UnsupportedConstruct,
    UndeclaredVariable,
    ConstantWritten,
    DanglingEdge,
    DuplicateNodeId,
    NotWellStructured,
    MalformedGraph,
    PlaceholderExecuted,
    InitUnsatisfiableAfterRetries,
    QuantifierInProgram,
    UnboundedWhileDynamics,
    SimulationDiverged,
    ContinuousPresent,
    UnknownName,
    KindMismatch,
    BadPolicy,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Error(ErrorCode code, SourceSpan span, std::string message)
        : std::runtime_error(std::move(message)), code_(code), span_(span) {}

    ErrorCode code() const { return code_; }
    const std::optional<SourceSpan>& span() const { return span_; }

private:
    ErrorCode code_;
    std::optional<SourceSpan> span_;
};

} // namespace hpk

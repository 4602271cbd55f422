#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace mtlviz {

// ==============================================================================
// RAM model and execution trace
// ==============================================================================

class Value {
public:
    Value() = default;
    Value(std::int64_t v) : v_(v) {}  // NOLINT(google-explicit-constructor)
    Value(int v) : v_(std::int64_t{v}) {}  // NOLINT(google-explicit-constructor)
    Value(std::string s) : v_(std::move(s)) {}  // NOLINT(google-explicit-constructor)
    Value(const char* s) : v_(std::string(s)) {}  // NOLINT(google-explicit-constructor)

    bool is_integer() const { return std::holds_alternative<std::int64_t>(v_); }
    bool is_text() const { return !is_integer(); }
    std::int64_t integer() const { return std::get<std::int64_t>(v_); }
    const std::string& text() const { return std::get<std::string>(v_); }

    /// Integers in decimal, texts verbatim. Used for concatenation and output.
    std::string to_text() const { return is_integer() ? std::to_string(integer()) : text(); }

    /// Integers in decimal, texts in double quotes. Used in RAM diagrams.
    std::string display() const { return is_integer() ? std::to_string(integer()) : "\"" + text() + "\""; }

    bool operator==(const Value&) const = default;

private:
    std::variant<std::int64_t, std::string> v_{std::int64_t{0}};
};

/// Reserved, or holding a value. A cell never goes back to Reserved.
struct CellState {
    std::optional<Value> value;

    static CellState reserved() { return {}; }
    static CellState holds(Value v) { return {std::move(v)}; }
    bool is_reserved() const { return !value.has_value(); }

    bool operator==(const CellState&) const = default;
};

struct Cell {
    std::string name;  // "sum" or "num(0)"
    CellState state;

    bool operator==(const Cell&) const = default;
};

/// Cells in declaration order; array elements index-ascending.
struct RamSnapshot {
    std::vector<Cell> cells;

    const Cell* find(std::string_view name) const {
        for (const auto& c : cells)
            if (c.name == name) return &c;
        return nullptr;
    }
    bool empty() const { return cells.empty(); }
    std::size_t size() const { return cells.size(); }

    bool operator==(const RamSnapshot&) const = default;
};

struct IoEvent {
    enum class Kind { InputRequested, InputConsumed, OutputEmitted };

    Kind kind = Kind::OutputEmitted;
    std::string prompt;  // input events
    std::string raw;     // InputConsumed
    std::string text;    // OutputEmitted

    static IoEvent requested(std::string prompt) { return {Kind::InputRequested, std::move(prompt), {}, {}}; }
    static IoEvent consumed(std::string prompt, std::string raw) {
        return {Kind::InputConsumed, std::move(prompt), std::move(raw), {}};
    }
    static IoEvent output(std::string text) { return {Kind::OutputEmitted, {}, {}, std::move(text)}; }

    bool operator==(const IoEvent&) const = default;
};

struct TraceStep {
    std::size_t index = 0;
    int line = 0;
    std::string statement_text;
    RamSnapshot ram_after;
    std::vector<std::string> annotations;  // headline first, then one caption per affected cell
    std::vector<IoEvent> io;
    std::vector<std::string> changed_cells;  // names of the cells this step wrote or added

    bool operator==(const TraceStep&) const = default;
};

enum class FaultKind { NotANumber, ValueNotSet, IndexOutOfRange, DivisionByZero, Overflow, InfiniteLoopSuspected };

inline const char* to_string(FaultKind k) {
    switch (k) {
        case FaultKind::NotANumber: return "NotANumber";
        case FaultKind::ValueNotSet: return "ValueNotSet";
        case FaultKind::IndexOutOfRange: return "IndexOutOfRange";
        case FaultKind::DivisionByZero: return "DivisionByZero";
        case FaultKind::Overflow: return "Overflow";
        case FaultKind::InfiniteLoopSuspected: return "InfiniteLoopSuspected";
    }
    return "?";
}

struct Fault {
    int line = 0;
    FaultKind kind = FaultKind::ValueNotSet;
    std::string message;
    std::string suggestion;

    bool operator==(const Fault&) const = default;
};

enum class RunStatus { Ready, AwaitingInput, Finished, Faulted, Truncated };

inline const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Ready: return "ready";
        case RunStatus::AwaitingInput: return "awaiting_input";
        case RunStatus::Finished: return "finished";
        case RunStatus::Faulted: return "faulted";
        case RunStatus::Truncated: return "truncated";
    }
    return "?";
}

struct Trace {
    std::vector<TraceStep> steps;
    RunStatus status = RunStatus::Ready;
    std::vector<std::string> outputs;  // OutputEmitted texts in order
    std::optional<Fault> fault;        // Faulted and Truncated
    std::optional<std::string> prompt; // AwaitingInput

    bool operator==(const Trace&) const = default;
};

/// RAM after step k; k == -1 is the empty pre-execution RAM.
inline RamSnapshot snapshot_at(const Trace& trace, long long k) {
    if (k == -1) return {};
    if (k < -1 || k >= static_cast<long long>(trace.steps.size()))
        throw std::out_of_range("step " + std::to_string(k) + " is outside the trace (-1 to " +
                                std::to_string(static_cast<long long>(trace.steps.size()) - 1) + ")");
    return trace.steps[static_cast<std::size_t>(k)].ram_after;
}

}  // namespace mtlviz

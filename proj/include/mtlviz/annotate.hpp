#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtlviz/ast.hpp"
#include "mtlviz/trace.hpp"

namespace mtlviz {

// Human-readable step annotations: one headline describing the executed line,
// then one caption per RAM cell the line touched.

/// "first" .. "tenth" for indices 0..9; "element <index>" beyond that.
inline std::string element_phrase(std::int64_t index, const std::string& array) {
    static constexpr const char* ordinals[] = {"first", "second", "third", "fourth", "fifth",
                                               "sixth", "seventh", "eighth", "ninth", "tenth"};
    if (index >= 0 && index < 10) return std::string("the ") + ordinals[index] + " element of array " + array;
    return "element " + std::to_string(index) + " of array " + array;
}

struct CellEffect {
    enum class Kind { DeclaredScalar, DeclaredElement, Assigned, InputStored };

    Kind kind = Kind::Assigned;
    std::string cell;   // "sum" or "num(0)"
    std::string array;  // element effects: the array name
    std::int64_t index = -1;
    Value value;

    bool is_element() const { return index >= 0; }
};

struct StepEffects {
    std::string headline;
    std::vector<CellEffect> cells;
};

inline std::string caption(const CellEffect& e) {
    switch (e.kind) {
        case CellEffect::Kind::DeclaredScalar:
            return "A memory location is reserved for holding a value to be assigned to " + e.cell + ".";
        case CellEffect::Kind::DeclaredElement:
            return "Memory location is reserved for holding " + element_phrase(e.index, e.array) + ".";
        case CellEffect::Kind::Assigned:
            return "A memory location holding " + e.value.display() + " as the current value of " + e.cell + ".";
        case CellEffect::Kind::InputStored: {
            const std::string where =
                e.is_element() ? element_phrase(e.index, e.array) : e.cell;
            const std::string what =
                e.value.is_integer() ? "number " + e.value.to_text() : "the text " + e.value.display();
            return "A memory location reserved for " + where + " is now holding " + what + ".";
        }
    }
    return {};
}

/// Headline followed by one caption per affected cell.
inline std::vector<std::string> annotate(const StepEffects& effects) {
    std::vector<std::string> out;
    out.reserve(1 + effects.cells.size());
    out.push_back(effects.headline);
    for (const auto& c : effects.cells) out.push_back(caption(c));
    return out;
}

namespace headline {

inline std::string line(int n) { return "Line " + std::to_string(n); }

inline const char* type_phrase(ScalarType t) { return t == ScalarType::Integer ? "integer" : "text"; }

inline std::string declare_scalar(int n, const std::string& name, ScalarType t) {
    return line(n) + " declares " + (t == ScalarType::Integer ? "an " : "a ") + type_phrase(t) +
           " variable named " + name + ".";
}

inline std::string declare_array(int n, const std::string& name, ScalarType t, std::int64_t upper) {
    const std::string count = std::to_string(upper + 1);
    std::string s = line(n) + " declares " + (t == ScalarType::Integer ? "an " : "a ") + type_phrase(t) +
                    " array named " + name + " with " + count + (upper == 0 ? " element, " : " elements, ") +
                    name + "(0)";
    if (upper > 0) s += " to " + name + "(" + std::to_string(upper) + ")";
    return s + ".";
}

inline std::string assign(int n, const std::string& cell, const Value& v) {
    return line(n) + " stores " + v.display() + " in " + cell + ".";
}

inline std::string input(int n, const std::string& prompt, const std::string& cell, const Value& v) {
    return line(n) + " asks the user for a value with the prompt \"" + prompt + "\" and stores " + v.display() +
           " in " + cell + ".";
}

inline std::string condition_text(const std::string& counter, bool descending, std::int64_t end) {
    return counter + (descending ? " >= " : " <= ") + std::to_string(end);
}

inline std::string loop_start(int n, const std::string& counter, std::int64_t start, bool descending,
                              std::int64_t end, bool enters, int next_line) {
    std::string s = line(n) + " starts a loop with " + counter + " = " + std::to_string(start) +
                    "; the condition " + condition_text(counter, descending, end) + " is ";
    if (enters) return s + "true, so the loop body runs.";
    return s + "false, so the loop body is skipped and execution continues after line " +
           std::to_string(next_line) + ".";
}

inline std::string loop_recheck(int n, const std::string& counter, std::int64_t current, bool descending,
                                std::int64_t end, bool enters, int next_line) {
    std::string s = line(n) + " checks the loop condition again: " + condition_text(counter, descending, end) +
                    " is ";
    if (enters) return s + "true (" + counter + " is " + std::to_string(current) + "), so the loop body runs again.";
    return s + "false (" + counter + " is " + std::to_string(current) +
           "), so the loop ends and execution continues after line " + std::to_string(next_line) + ".";
}

inline std::string loop_next(int n, const std::string& counter, std::int64_t step, int header_line) {
    std::string change;
    if (step >= 0)
        change = "adds " + std::to_string(step) + " to";
    else
        change = "subtracts " + (step == INT64_MIN ? std::string("9223372036854775808") : std::to_string(-step)) +
                 " from";
    return line(n) + " " + change + " the loop counter " + counter + " and sends execution back to line " +
           std::to_string(header_line) + ".";
}

inline std::string if_test(int n, const std::string& condition, bool holds, int skip_past_line) {
    std::string s = line(n) + " checks the condition " + condition + ": it is ";
    if (holds) return s + "true, so the lines inside the If run.";
    return s + "false, so execution continues after line " + std::to_string(skip_past_line) + ".";
}

inline std::string else_skip(int n, int end_if_line) {
    return line(n) + " ends the part of the If that ran; execution continues after line " +
           std::to_string(end_if_line) + ".";
}

inline std::string end_if(int n) { return line(n) + " marks the end of the If block."; }

inline std::string output(int n, const std::string& text) {
    return line(n) + " displays the message \"" + text + "\".";
}

}  // namespace headline

}  // namespace mtlviz

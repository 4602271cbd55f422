#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "json.hpp"

#include "mtlviz/source.hpp"
#include "mtlviz/trace.hpp"

namespace mtlviz {

// ==============================================================================
// Rendering: RAM diagrams, step listings, trace JSON v1
// ==============================================================================

using ordered_json = nlohmann::ordered_json;

/// The three RAM blocks: before execution, after declaration, after
/// assignment. All three are views over one snapshot.
struct ThreeBlockView {
    RamSnapshot before;
    RamSnapshot after_declaration;
    RamSnapshot after_assignment;
};

inline ThreeBlockView three_block_view(const RamSnapshot& current) {
    ThreeBlockView v;
    v.after_assignment = current;
    v.after_declaration.cells.reserve(current.cells.size());
    for (const auto& c : current.cells) v.after_declaration.cells.push_back({c.name, CellState::reserved()});
    return v;
}

inline ThreeBlockView three_block_view(const Trace& trace, long long k) {
    return three_block_view(snapshot_at(trace, k));
}

inline std::string state_text(const CellState& s) { return s.is_reserved() ? "RESERVED" : s.value->display(); }

namespace detail {

/// Display width in code points.
inline std::size_t text_width(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

inline std::string pad(const std::string& s, std::size_t width) {
    const std::size_t w = text_width(s);
    return w >= width ? s : s + std::string(width - w, ' ');
}

inline void render_box(std::string& out, const char* title, const RamSnapshot& ram) {
    out += title;
    out += '\n';
    if (ram.empty()) {
        out += "+---------+\n| (empty) |\n+---------+\n";
        return;
    }
    std::size_t name_w = 0, state_w = 0;
    for (const auto& c : ram.cells) {
        name_w = std::max(name_w, text_width(c.name));
        state_w = std::max(state_w, text_width(state_text(c.state)));
    }
    const std::string border = "+" + std::string(name_w + 2, '-') + "+" + std::string(state_w + 2, '-') + "+\n";
    out += border;
    for (const auto& c : ram.cells) out += "| " + pad(c.name, name_w) + " | " + pad(state_text(c.state), state_w) + " |\n";
    out += border;
}

}  // namespace detail

/// Three ASCII boxes separated by blank lines; column widths fit the widest
/// entry of each box.
inline std::string render_ram_text(const ThreeBlockView& view) {
    std::string out;
    detail::render_box(out, "RAM: BEFORE EXECUTION", view.before);
    out += '\n';
    detail::render_box(out, "RAM: AFTER DECLARATION", view.after_declaration);
    out += '\n';
    detail::render_box(out, "RAM: AFTER ASSIGNMENT", view.after_assignment);
    return out;
}

inline constexpr const char* kHighlightOn = "\x1b[1;30;43m";
inline constexpr const char* kHighlightOff = "\x1b[0m";

/// Numbered listing with no line marked.
inline std::string render_listing(const SourceProgram& program, int highlighted = 0, bool color = false) {
    std::string out;
    for (const auto& l : program.lines()) {
        const bool hit = l.number == highlighted;
        std::string row = (hit ? "=> " : "   ") + std::to_string(l.number) + "." + (l.raw.empty() ? "" : " " + l.raw);
        if (hit && color) row = kHighlightOn + row + kHighlightOff;
        out += row;
        out += '\n';
    }
    return out;
}

/// Listing with the executed line marked "=> ", then the step's annotations.
inline std::string render_step_text(const TraceStep& step, const SourceProgram& program, bool color = false) {
    std::string out = render_listing(program, step.line, color);
    for (const auto& a : step.annotations) {
        out += a;
        out += '\n';
    }
    return out;
}

// --- trace JSON v1 -----------------------------------------------------------

inline ordered_json cell_json(const Cell& c) {
    ordered_json j;
    j["cell"] = c.name;
    if (c.state.is_reserved()) {
        j["state"] = "reserved";
    } else {
        j["state"] = "value";
        const Value& v = *c.state.value;
        if (v.is_integer()) {
            j["type"] = "Integer";
            j["value"] = v.integer();
        } else {
            j["type"] = "String";
            j["value"] = v.text();
        }
    }
    return j;
}

inline ordered_json ram_json(const RamSnapshot& ram) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : ram.cells) arr.push_back(cell_json(c));
    return arr;
}

inline ordered_json io_json(const IoEvent& ev) {
    ordered_json j;
    switch (ev.kind) {
        case IoEvent::Kind::InputRequested:
            j["type"] = "input_requested";
            j["prompt"] = ev.prompt;
            break;
        case IoEvent::Kind::InputConsumed:
            j["type"] = "input_consumed";
            j["prompt"] = ev.prompt;
            j["raw"] = ev.raw;
            break;
        case IoEvent::Kind::OutputEmitted:
            j["type"] = "output";
            j["text"] = ev.text;
            break;
    }
    return j;
}

inline ordered_json step_json(const TraceStep& s) {
    ordered_json j;
    j["index"] = s.index;
    j["line"] = s.line;
    j["statement"] = s.statement_text;
    j["annotations"] = s.annotations;
    ordered_json io = ordered_json::array();
    for (const auto& ev : s.io) io.push_back(io_json(ev));
    j["io"] = std::move(io);
    j["ram"] = ram_json(s.ram_after);
    return j;
}

inline ordered_json fault_json(const Fault& f) {
    ordered_json j;
    j["line"] = f.line;
    j["kind"] = to_string(f.kind);
    j["message"] = f.message;
    j["suggestion"] = f.suggestion;
    return j;
}

inline ordered_json diagnostic_json(const Diagnostic& d) {
    ordered_json j;
    j["severity"] = std::string(to_string(d.severity));
    j["line"] = d.line;
    j["column"] = d.column;
    j["message"] = d.message;
    j["suggestion"] = d.suggestion;
    return j;
}

inline ordered_json trace_json(const Trace& trace) {
    ordered_json j;
    j["version"] = 1;
    j["status"] = to_string(trace.status);
    j["outputs"] = trace.outputs;
    ordered_json steps = ordered_json::array();
    for (const auto& s : trace.steps) steps.push_back(step_json(s));
    j["steps"] = std::move(steps);
    if (trace.fault) j["fault"] = fault_json(*trace.fault);
    return j;
}

inline ordered_json three_block_json(const ThreeBlockView& v) {
    ordered_json j;
    j["before"] = ram_json(v.before);
    j["after_declaration"] = ram_json(v.after_declaration);
    j["after_assignment"] = ram_json(v.after_assignment);
    return j;
}

/// Compact canonical form: fixed key order, no whitespace, UTF-8 passed
/// through (invalid sequences replaced).
inline std::string dump_canonical(const ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::string render_trace_json(const Trace& trace) { return dump_canonical(trace_json(trace)); }

}  // namespace mtlviz

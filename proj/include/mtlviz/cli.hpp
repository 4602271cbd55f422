#pragma once

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mtlviz/checker.hpp"
#include "mtlviz/machine.hpp"
#include "mtlviz/render.hpp"
#include "mtlviz/snippets.hpp"

namespace mtlviz::cli {

// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kDiagnostics = 1,
    kEnvironment = 2,
    kRuntimeFault = 3,
    kStarvedInput = 4,
};

enum class OutputFormat { Text, Json };

struct CliConfig {
    OutputFormat format = OutputFormat::Text;
    bool color = false;  // resolved from auto|always|never by the caller
    std::vector<std::string> inputs;
    std::size_t step_cap = kDefaultStepCap;
    int delay_ms = 0;
};

inline std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

/// Step cap from MTLVIZ_STEP_CAP when set to a positive integer.
inline std::optional<std::size_t> step_cap_from_env(const char* value) {
    if (!value || !*value) return std::nullopt;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != std::string_view(value).size() || v < 1) return std::nullopt;
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

namespace detail {

inline void print_diagnostics(const Diagnostics& diags, std::ostream& err) {
    for (const auto& d : diags) err << format_diagnostic(d) << '\n';
}

inline void print_fault(const Fault& f, std::ostream& err) {
    err << f.line << ": error: " << f.message << " (hint: " << f.suggestion << ")\n";
}

inline void print_io(const TraceStep& s, std::ostream& out) {
    for (const auto& ev : s.io) {
        if (ev.kind == IoEvent::Kind::InputConsumed)
            out << "Input (" << ev.prompt << "): " << ev.raw << '\n';
        else if (ev.kind == IoEvent::Kind::OutputEmitted)
            out << "Output: " << ev.text << '\n';
    }
}

inline void print_step(const TraceStep& s, const SourceProgram& src, bool color, std::ostream& out) {
    out << "--- step " << s.index << " (line " << s.line << ") ---\n";
    out << render_step_text(s, src, color);
    print_io(s, out);
}

/// Loads and checks a program; prints diagnostics and sets `code` on failure.
inline std::optional<CheckedProgram> load(const std::string& path, std::ostream& err, int& code) {
    auto text = read_file(path);
    if (!text) {
        err << "error: cannot read '" << path << "' (hint: check that the file exists and is readable)\n";
        code = kEnvironment;
        return std::nullopt;
    }
    CheckResult r = compile(SourceProgram(std::move(*text)));
    if (!r.ok()) {
        print_diagnostics(r.diagnostics, err);
        code = kDiagnostics;
        return std::nullopt;
    }
    code = kOk;
    return std::move(r.program);
}

}  // namespace detail

inline int cmd_check(const std::string& path, std::ostream& /*out*/, std::ostream& err) {
    int code = kOk;
    detail::load(path, err, code);
    return code;
}

inline int cmd_run(const std::string& path, const CliConfig& cfg, std::ostream& out, std::ostream& err) {
    int code = kOk;
    auto program = detail::load(path, err, code);
    if (!program) return code;

    Session session(std::move(*program), ExecutionMode::CompleteRun, cfg.inputs, cfg.step_cap);
    const Trace& trace = session.run_to_end();
    const SourceProgram& src = session.program().source;

    if (cfg.format == OutputFormat::Json) {
        out << render_trace_json(trace) << '\n';
    } else {
        for (const auto& s : trace.steps) {
            detail::print_step(s, src, cfg.color, out);
            out << '\n';
            out.flush();
            if (cfg.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(cfg.delay_ms));
        }
        out << render_ram_text(three_block_view(session.ram()));
        out << "\nOutputs:\n";
        if (trace.outputs.empty()) out << "(none)\n";
        for (const auto& o : trace.outputs) out << o << '\n';
        out << "Status: " << to_string(trace.status) << " after " << trace.steps.size()
            << (trace.steps.size() == 1 ? " step\n" : " steps\n");
    }

    switch (trace.status) {
        case RunStatus::Finished: return kOk;
        case RunStatus::Faulted:
        case RunStatus::Truncated:
            detail::print_fault(*trace.fault, err);
            return kRuntimeFault;
        case RunStatus::AwaitingInput:
            err << session.current_line().value_or(0) << ": error: the program is waiting for input \""
                << trace.prompt.value_or("") << "\" (hint: pass a value with --input, e.g. --input 42)\n";
            return kStarvedInput;
        case RunStatus::Ready: break;
    }
    return kOk;
}

/// Interactive stepping: Enter runs the next line, "r <k>" replays step k,
/// "q" quits. InputBox values are read from `in` when the program asks.
inline int cmd_step(const std::string& path, const CliConfig& cfg, std::istream& in, std::ostream& out,
                    std::ostream& err) {
    int code = kOk;
    auto program = detail::load(path, err, code);
    if (!program) return code;

    Session session(std::move(*program), ExecutionMode::LineByLine, cfg.inputs, cfg.step_cap);
    const SourceProgram& src = session.program().source;

    out << "Press Enter to run the next line, \"r <k>\" to replay step k (-1 = before execution), \"q\" to quit.\n\n";
    out << render_listing(src) << '\n' << render_ram_text(three_block_view(RamSnapshot{}));

    std::string command;
    for (;;) {
        out << "> " << std::flush;
        if (!std::getline(in, command)) break;
        if (!command.empty() && command.back() == '\r') command.pop_back();
        const auto first = command.find_first_not_of(" \t");
        command = first == std::string::npos ? "" : command.substr(first);

        if (command == "q" || command == "quit") return kOk;

        if (command.rfind("r", 0) == 0 && (command.size() == 1 || command[1] == ' ')) {
            const Trace& t = session.trace();
            std::istringstream args(command.substr(1));
            long long k = 0;
            std::string rest;
            if (!(args >> k) || (args >> rest) || k < -1 || k >= static_cast<long long>(t.steps.size())) {
                const auto from = command.find_first_not_of(" \t", 1);
                out << "There is no step '" << (from == std::string::npos ? "" : command.substr(from))
                    << "'. Choose a step from -1 to "
                    << static_cast<long long>(t.steps.size()) - 1 << ".\n";
                continue;
            }
            out << (k == -1 ? std::string("--- before execution ---\n")
                            : "--- replay of step " + std::to_string(k) + " ---\n");
            if (k == -1)
                out << render_listing(src);
            else
                out << render_step_text(t.steps[static_cast<std::size_t>(k)], src, cfg.color);
            out << '\n' << render_ram_text(three_block_view(t, k));
            continue;
        }

        if (!command.empty()) {
            out << "Unknown command '" << command << "'. Press Enter to step, type r <k> to replay, or q to quit.\n";
            continue;
        }

        if (session.status() == RunStatus::Finished) {
            out << "The program has finished. Type r <k> to replay a step or q to quit.\n";
            continue;
        }

        StepResult r = session.step();
        while (auto* wait = std::get_if<AwaitingInput>(&r)) {
            out << wait->prompt << ": " << std::flush;
            std::string value;
            if (!std::getline(in, value)) return kOk;
            if (!value.empty() && value.back() == '\r') value.pop_back();
            session.provide_input(value);
            r = session.step();
        }
        if (auto* s = std::get_if<TraceStep>(&r)) {
            detail::print_step(*s, src, cfg.color, out);
            out << '\n' << render_ram_text(three_block_view(s->ram_after));
        }
        if (auto* f = std::get_if<Faulted>(&r)) {
            out << "The program stopped on line " << f->fault.line << ": " << f->fault.message << "\n";
            out << "Hint: " << f->fault.suggestion << "\n";
            detail::print_fault(f->fault, err);
            return kRuntimeFault;
        }
        if (session.status() == RunStatus::Finished) {
            out << "\nProgram finished after " << session.trace().steps.size() << " steps.\n";
            for (const auto& o : session.trace().outputs) out << "Output: " << o << '\n';
        }
    }
    return kOk;
}

/// --param values arrive as "key=value".
inline int cmd_snippet(const std::string& kind_text, const std::vector<std::string>& params, std::ostream& out,
                       std::ostream& err) {
    auto kind = parse_snippet_kind(kind_text);
    if (!kind) {
        err << "error: unknown control '" << kind_text
            << "' (hint: use declaration, assignment, data_input, data_output, condition, looping or insert_text)\n";
        return kDiagnostics;
    }
    SnippetRequest req{*kind, {}};
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
            err << "error: parameter '" << p << "' is not key=value (hint: write it like --param name=sum)\n";
            return kDiagnostics;
        }
        req.params[p.substr(0, eq)] = p.substr(eq + 1);
    }
    SnippetResult r = generate_snippet(req);
    if (auto* e = std::get_if<SnippetError>(&r)) {
        err << "error: " << e->message << " (hint: " << e->suggestion << ")\n";
        return kDiagnostics;
    }
    for (const auto& line : std::get<Snippet>(r).lines) out << line << '\n';
    return kOk;
}

}  // namespace mtlviz::cli

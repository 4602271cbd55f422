#pragma once

#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mtlviz/annotate.hpp"
#include "mtlviz/checker.hpp"
#include "mtlviz/trace.hpp"

namespace mtlviz {

// ==============================================================================
// Small-step interpreter
// ==============================================================================
//
// A Session executes one source line per step. Each step appends a TraceStep
// holding the RAM after the line, so replay is a lookup into the history and
// never re-executes anything.
//
// Loop protocol: the For line runs on first entry (initialize counter, test)
// and again every time Next sends control back (test only). Next adds the
// step to the counter. The header therefore shows up once per test.

enum class ExecutionMode { LineByLine, CompleteRun };

inline const char* to_string(ExecutionMode m) {
    return m == ExecutionMode::LineByLine ? "line_by_line" : "complete_run";
}

inline constexpr std::size_t kDefaultStepCap = 10000;

struct AwaitingInput {
    std::string prompt;
};
struct Finished {};
struct Faulted {
    Fault fault;
};

using StepResult = std::variant<TraceStep, AwaitingInput, Finished, Faulted>;

/// Converts InputBox text to an Integer: surrounding whitespace is ignored,
/// an optional sign is allowed, everything else is rejected.
inline std::optional<std::int64_t> parse_whole_number(std::string_view raw, bool& overflow) {
    overflow = false;
    std::size_t b = 0, e = raw.size();
    while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
    raw = raw.substr(b, e - b);
    bool negative = false;
    if (!raw.empty() && (raw[0] == '-' || raw[0] == '+')) {
        negative = raw[0] == '-';
        raw.remove_prefix(1);
    }
    if (raw.empty()) return std::nullopt;
    std::int64_t value = 0;
    for (char c : raw) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        const int d = c - '0';
        // accumulate negatively so INT64_MIN is representable
        if (__builtin_mul_overflow(value, 10, &value) || __builtin_sub_overflow(value, d, &value)) {
            overflow = true;
            return std::nullopt;
        }
    }
    if (!negative) {
        if (value == INT64_MIN) {
            overflow = true;
            return std::nullopt;
        }
        value = -value;
    }
    return value;
}

class Session {
public:
    Session(std::shared_ptr<const CheckedProgram> program, ExecutionMode mode,
            std::vector<std::string> initial_inputs = {}, std::size_t step_cap = kDefaultStepCap)
        : program_(std::move(program)),
          mode_(mode),
          inputs_(initial_inputs.begin(), initial_inputs.end()),
          step_cap_(step_cap == 0 ? 1 : step_cap) {}

    Session(CheckedProgram program, ExecutionMode mode, std::vector<std::string> initial_inputs = {},
            std::size_t step_cap = kDefaultStepCap)
        : Session(std::make_shared<const CheckedProgram>(std::move(program)), mode, std::move(initial_inputs),
                  step_cap) {}

    const CheckedProgram& program() const { return *program_; }
    ExecutionMode mode() const { return mode_; }
    RunStatus status() const { return trace_.status; }
    std::size_t step_cap() const { return step_cap_; }
    std::size_t queued_inputs() const { return inputs_.size(); }
    const Trace& trace() const { return trace_; }
    const RamSnapshot& ram() const { return ram_; }

    /// Line the next step would execute, if any.
    std::optional<int> current_line() const {
        if (pc_ >= program_->statements.size()) return std::nullopt;
        return program_->statements[pc_].line;
    }

    /// Executes exactly one line, or reports why it cannot.
    StepResult step() {
        switch (trace_.status) {
            case RunStatus::Finished: return Finished{};
            case RunStatus::Faulted:
            case RunStatus::Truncated: return Faulted{*trace_.fault};
            case RunStatus::AwaitingInput:
                if (inputs_.empty()) return AwaitingInput{*trace_.prompt};
                set_ready();
                break;
            case RunStatus::Ready: break;
        }
        if (pc_ >= program_->statements.size()) {
            trace_.status = RunStatus::Finished;
            return Finished{};
        }
        if (trace_.steps.size() >= step_cap_) {
            const int line = program_->statements[pc_].line;
            trace_.status = RunStatus::Truncated;
            trace_.fault = Fault{line, FaultKind::InfiniteLoopSuspected,
                                 "the program ran for " + std::to_string(step_cap_) +
                                     " steps without finishing, so it may be stuck in a loop",
                                 "Check that your loop condition can become false."};
            return Faulted{*trace_.fault};
        }

        Pending pending;
        try {
            pending = execute(pc_);
        } catch (const RuntimeFault& f) {
            trace_.status = RunStatus::Faulted;
            trace_.fault = f.fault;
            return Faulted{f.fault};
        }
        if (pending.awaiting) {
            trace_.status = RunStatus::AwaitingInput;
            trace_.prompt = *pending.awaiting;
            return AwaitingInput{*pending.awaiting};
        }

        // commit
        ram_ = std::move(pending.ram);
        cell_index_ = std::move(pending.cell_index);
        pc_ = pending.next_pc;
        reentry_ = pending.reentry;
        if (pending.loop_update) {
            if (pending.loop_update->second)
                loops_[pending.loop_update->first] = *pending.loop_update->second;
            else
                loops_.erase(pending.loop_update->first);
        }
        if (pending.consumed_input) inputs_.pop_front();

        TraceStep step;
        step.index = trace_.steps.size();
        step.line = program_->statements[pending.executed].line;
        step.statement_text = program_->statement_text(pending.executed);
        step.ram_after = ram_;
        step.annotations = annotate(pending.effects);
        step.io = std::move(pending.io);
        for (const auto& c : pending.effects.cells) step.changed_cells.push_back(c.cell);
        for (const auto& ev : step.io)
            if (ev.kind == IoEvent::Kind::OutputEmitted) trace_.outputs.push_back(ev.text);
        trace_.steps.push_back(step);
        if (pc_ >= program_->statements.size()) trace_.status = RunStatus::Finished;
        return step;
    }

    /// Queues input; a session waiting for input becomes ready again.
    RunStatus provide_input(std::string raw) {
        inputs_.push_back(std::move(raw));
        if (trace_.status == RunStatus::AwaitingInput) set_ready();
        return trace_.status;
    }

    /// Steps until the program finishes, faults, hits the step cap, or needs
    /// input that is not queued.
    const Trace& run_to_end() {
        for (;;) {
            if (trace_.status == RunStatus::AwaitingInput && inputs_.empty()) break;
            StepResult r = step();
            if (!std::holds_alternative<TraceStep>(r)) break;
        }
        return trace_;
    }

private:
    struct LoopState {
        std::int64_t end = 0;
        std::int64_t step = 1;
    };

    struct RuntimeFault {
        Fault fault;
    };

    struct Pending {
        std::size_t executed = 0;
        RamSnapshot ram;
        std::unordered_map<std::string, std::size_t> cell_index;
        std::size_t next_pc = 0;
        std::optional<std::size_t> reentry;
        std::optional<std::pair<std::size_t, std::optional<LoopState>>> loop_update;
        bool consumed_input = false;
        std::optional<std::string> awaiting;
        StepEffects effects;
        std::vector<IoEvent> io;
    };

    void set_ready() {
        trace_.status = RunStatus::Ready;
        trace_.prompt.reset();
    }

    [[noreturn]] static void fault(int line, FaultKind kind, std::string message, std::string suggestion) {
        throw RuntimeFault{{line, kind, std::move(message), std::move(suggestion)}};
    }

    std::size_t index_of(int line) const { return *program_->index_of_line(line); }

    // --- expression evaluation over the pending RAM ---------------------------

    static std::string element_name(const std::string& array, std::int64_t index) {
        return array + "(" + std::to_string(index) + ")";
    }

    std::int64_t checked_index(const Pending& p, const std::string& array, const Expr& index_expr, int line) const {
        const Value idx = eval(p, index_expr, line);
        const Symbol* sym = program_->symbols.find(array);
        const std::int64_t upper = sym && sym->upper_bound ? *sym->upper_bound : -1;
        const std::int64_t i = idx.integer();
        if (i < 0 || i > upper)
            fault(line, FaultKind::IndexOutOfRange,
                  element_name(array, i) + " does not exist; " + array + " has elements " + array + "(0) to " +
                      element_name(array, upper),
                  "Use an index from 0 to " + std::to_string(upper) + ", or declare a larger array with Dim " +
                      array + "(" + std::to_string(i < 0 ? upper : i) + ")");
        return i;
    }

    const Value& read_cell(const Pending& p, const std::string& cell, int line) const {
        auto it = p.cell_index.find(cell);
        if (it == p.cell_index.end() || p.ram.cells[it->second].state.is_reserved())
            fault(line, FaultKind::ValueNotSet, cell + " has no value yet; its memory location is only RESERVED",
                  "Assign a value to " + cell + " before using it, e.g. " + cell + " = 0");
        return *p.ram.cells[it->second].state.value;
    }

    static std::int64_t overflow_fault(int line) {
        fault(line, FaultKind::Overflow, "the result is too large to store in an Integer",
              "Keep whole numbers between -9223372036854775808 and 9223372036854775807");
    }

    Value eval(const Pending& p, const Expr& e, int line) const {
        switch (e.kind) {
            case Expr::Kind::IntLiteral: return e.int_value;
            case Expr::Kind::StringLiteral: return e.text;
            case Expr::Kind::Variable: return read_cell(p, e.text, line);
            case Expr::Kind::ArrayElement: {
                const std::int64_t i = checked_index(p, e.text, e.operands[0], line);
                return read_cell(p, element_name(e.text, i), line);
            }
            case Expr::Kind::InputBox:
                // only reachable as the right side of an assignment, handled there
                return eval(p, e.operands[0], line).to_text();
            case Expr::Kind::Negate: {
                const std::int64_t v = eval(p, e.operands[0], line).integer();
                if (v == INT64_MIN) return overflow_fault(line);
                return -v;
            }
            case Expr::Kind::Binary: {
                const Value l = eval(p, e.operands[0], line);
                const Value r = eval(p, e.operands[1], line);
                if (is_comparison(e.op)) return compare(e.op, l, r) ? 1 : 0;
                if (e.op == BinaryOp::Add && (l.is_text() || r.is_text())) return l.to_text() + r.to_text();
                const std::int64_t a = l.integer(), b = r.integer();
                std::int64_t out = 0;
                switch (e.op) {
                    case BinaryOp::Add:
                        if (__builtin_add_overflow(a, b, &out)) return overflow_fault(line);
                        return out;
                    case BinaryOp::Sub:
                        if (__builtin_sub_overflow(a, b, &out)) return overflow_fault(line);
                        return out;
                    case BinaryOp::Mul:
                        if (__builtin_mul_overflow(a, b, &out)) return overflow_fault(line);
                        return out;
                    case BinaryOp::IntDiv:
                    case BinaryOp::Mod:
                        if (b == 0)
                            fault(line, FaultKind::DivisionByZero,
                                  std::string("cannot divide by zero with ") + op_text(e.op),
                                  "Make sure the number after " + std::string(op_text(e.op)) +
                                      " is not 0, for example by checking it with an If first");
                        if (b == -1) {
                            // a % -1 is always 0; only a \ -1 can overflow
                            if (e.op == BinaryOp::Mod) return std::int64_t{0};
                            if (a == INT64_MIN) return overflow_fault(line);
                        }
                        return e.op == BinaryOp::IntDiv ? a / b : a % b;
                    default: break;
                }
                return 0;
            }
        }
        return 0;
    }

    static bool compare(BinaryOp op, const Value& l, const Value& r) {
        int c = 0;
        if (l.is_integer() && r.is_integer())
            c = l.integer() < r.integer() ? -1 : (l.integer() > r.integer() ? 1 : 0);
        else
            c = l.to_text().compare(r.to_text());
        switch (op) {
            case BinaryOp::Eq: return c == 0;
            case BinaryOp::Ne: return c != 0;
            case BinaryOp::Lt: return c < 0;
            case BinaryOp::Le: return c <= 0;
            case BinaryOp::Gt: return c > 0;
            case BinaryOp::Ge: return c >= 0;
            default: return false;
        }
    }

    // --- RAM mutation on the pending copy ------------------------------------

    static void add_cell(Pending& p, const std::string& name) {
        p.cell_index.emplace(name, p.ram.cells.size());
        p.ram.cells.push_back({name, CellState::reserved()});
    }

    static void write_cell(Pending& p, const std::string& name, Value v) {
        auto it = p.cell_index.find(name);
        if (it == p.cell_index.end()) {
            add_cell(p, name);
            it = p.cell_index.find(name);
        }
        p.ram.cells[it->second].state = CellState::holds(std::move(v));
    }

    std::int64_t read_counter(const Pending& p, const std::string& counter, int line) const {
        return read_cell(p, counter, line).integer();
    }

    // --- one line ------------------------------------------------------------

    Pending execute(std::size_t pc) const {
        Pending p;
        p.executed = pc;
        p.ram = ram_;
        p.cell_index = cell_index_;
        p.next_pc = pc + 1;
        const Statement& stmt = program_->statements[pc];
        const int line = stmt.line;

        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, DeclareScalar>) {
                    add_cell(p, k.name);
                    p.effects.headline = headline::declare_scalar(line, k.name, k.type);
                    p.effects.cells.push_back({CellEffect::Kind::DeclaredScalar, k.name, {}, -1, {}});
                } else if constexpr (std::is_same_v<T, DeclareArray>) {
                    const std::int64_t upper = *program_->symbols.find(k.name)->upper_bound;
                    p.effects.headline = headline::declare_array(line, k.name, k.type, upper);
                    for (std::int64_t i = 0; i <= upper; ++i) {
                        add_cell(p, element_name(k.name, i));
                        p.effects.cells.push_back(
                            {CellEffect::Kind::DeclaredElement, element_name(k.name, i), k.name, i, {}});
                    }
                } else if constexpr (std::is_same_v<T, Assign>) {
                    exec_assign(p, k, line);
                } else if constexpr (std::is_same_v<T, Output>) {
                    std::string text = eval(p, k.value, line).to_text();
                    p.effects.headline = headline::output(line, text);
                    p.io.push_back(IoEvent::output(std::move(text)));
                } else if constexpr (std::is_same_v<T, ForHeader>) {
                    exec_for(p, k, pc, line);
                } else if constexpr (std::is_same_v<T, Next>) {
                    const int header_line = program_->blocks.next_to_for.at(line);
                    const std::size_t header = index_of(header_line);
                    const auto& f = std::get<ForHeader>(program_->statements[header].kind);
                    const LoopState state = loops_.at(header);
                    std::int64_t counter = read_counter(p, f.counter, line);
                    if (__builtin_add_overflow(counter, state.step, &counter)) overflow_fault(line);
                    write_cell(p, f.counter, counter);
                    p.effects.headline = headline::loop_next(line, f.counter, state.step, header_line);
                    p.effects.cells.push_back({CellEffect::Kind::Assigned, f.counter, {}, -1, counter});
                    p.next_pc = header;
                    p.reentry = header;
                } else if constexpr (std::is_same_v<T, IfHeader>) {
                    const bool holds = eval(p, k.condition, line).integer() != 0;
                    const IfBlock& block = program_->blocks.if_blocks.at(line);
                    const int skip_past = block.else_line ? *block.else_line : block.end_line;
                    p.effects.headline = headline::if_test(line, format_expr(k.condition), holds, skip_past);
                    if (!holds) p.next_pc = index_of(skip_past) + 1;
                } else if constexpr (std::is_same_v<T, ElseMarker>) {
                    const int end_line = program_->blocks.if_blocks.at(program_->blocks.else_to_if.at(line)).end_line;
                    p.effects.headline = headline::else_skip(line, end_line);
                    p.next_pc = index_of(end_line) + 1;
                } else if constexpr (std::is_same_v<T, EndIfMarker>) {
                    p.effects.headline = headline::end_if(line);
                }
            },
            stmt.kind);
        return p;
    }

    void exec_assign(Pending& p, const Assign& a, int line) const {
        std::string cell = a.target.name;
        const Symbol* sym = program_->symbols.find(a.target.name);
        std::int64_t index = -1;
        if (a.target.index) {
            index = checked_index(p, a.target.name, *a.target.index, line);
            cell = element_name(a.target.name, index);
        }
        const ScalarType target_type = sym ? sym->type : ScalarType::Integer;

        if (a.value.kind == Expr::Kind::InputBox) {
            std::string prompt = eval(p, a.value.operands[0], line).to_text();
            if (inputs_.empty()) {
                p.awaiting = std::move(prompt);
                return;
            }
            const std::string& raw = inputs_.front();
            p.consumed_input = true;
            p.io.push_back(IoEvent::requested(prompt));
            p.io.push_back(IoEvent::consumed(prompt, raw));
            Value stored = raw;
            if (target_type == ScalarType::Integer) {
                bool overflow = false;
                auto n = parse_whole_number(raw, overflow);
                if (overflow)
                    fault(line, FaultKind::Overflow, "the number '" + raw + "' is too large to store in " + cell,
                          "Type a whole number between -9223372036854775808 and 9223372036854775807");
                if (!n)
                    fault(line, FaultKind::NotANumber,
                          "'" + raw + "' is not a whole number, so it cannot be stored in " + cell,
                          "Type a whole number such as 42");
                stored = *n;
            }
            write_cell(p, cell, stored);
            p.effects.headline = headline::input(line, prompt, cell, stored);
            p.effects.cells.push_back({CellEffect::Kind::InputStored, cell, a.target.index ? a.target.name : "",
                                       index, stored});
            return;
        }

        Value v = eval(p, a.value, line);
        if (target_type == ScalarType::String && v.is_integer()) v = v.to_text();
        write_cell(p, cell, v);
        p.effects.headline = headline::assign(line, cell, v);
        p.effects.cells.push_back({CellEffect::Kind::Assigned, cell, a.target.index ? a.target.name : "", index, v});
    }

    void exec_for(Pending& p, const ForHeader& f, std::size_t pc, int line) const {
        const int next_line = program_->blocks.for_to_next.at(line);
        const std::size_t after_loop = index_of(next_line) + 1;
        LoopState state;
        bool reentry = reentry_ == pc;
        std::int64_t counter = 0;
        if (reentry) {
            state = loops_.at(pc);
            counter = read_counter(p, f.counter, line);
        } else {
            counter = eval(p, f.start, line).integer();
            state.end = eval(p, f.end, line).integer();
            state.step = f.step ? eval(p, *f.step, line).integer() : 1;
            write_cell(p, f.counter, counter);
        }
        const bool descending = state.step < 0;
        const bool enters = descending ? counter >= state.end : counter <= state.end;
        if (reentry) {
            p.effects.headline =
                headline::loop_recheck(line, f.counter, counter, descending, state.end, enters, next_line);
        } else {
            p.effects.headline =
                headline::loop_start(line, f.counter, counter, descending, state.end, enters, next_line);
            p.effects.cells.push_back({CellEffect::Kind::Assigned, f.counter, {}, -1, counter});
        }
        if (enters) {
            p.loop_update = {pc, state};
        } else {
            p.loop_update = {pc, std::nullopt};
            p.next_pc = after_loop;
        }
    }

    std::shared_ptr<const CheckedProgram> program_;
    ExecutionMode mode_;
    std::deque<std::string> inputs_;
    std::size_t step_cap_;

    std::size_t pc_ = 0;
    std::optional<std::size_t> reentry_;       // header index when arriving from Next
    std::map<std::size_t, LoopState> loops_;   // active loops by header index
    RamSnapshot ram_;
    std::unordered_map<std::string, std::size_t> cell_index_;
    Trace trace_;
};

// Free-function surface mirroring the session operations.

inline Session new_session(CheckedProgram program, ExecutionMode mode, std::vector<std::string> initial_inputs = {},
                           std::size_t step_cap = kDefaultStepCap) {
    return Session(std::move(program), mode, std::move(initial_inputs), step_cap);
}

inline StepResult step(Session& session) { return session.step(); }

inline RunStatus provide_input(Session& session, std::string raw) { return session.provide_input(std::move(raw)); }

inline Trace run_to_end(Session& session) { return session.run_to_end(); }

}  // namespace mtlviz

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtlviz/ast.hpp"
#include "mtlviz/parser.hpp"
#include "mtlviz/source.hpp"

namespace mtlviz {

// ==============================================================================
// Static checking
// ==============================================================================
//
// Scoping rules:
//   - Dim is only allowed outside of any For/If block.
//   - `For i As Integer` declares i. At the top level i stays usable after the
//     loop; inside another block it is usable from its For line to its Next.
//   - Every other name must be declared on an earlier line.

struct Symbol {
    std::string name;  // first-declared spelling
    ScalarType type = ScalarType::Integer;
    std::optional<std::int64_t> upper_bound;  // arrays only: elements 0..upper_bound
    int declared_on = 0;
    bool loop_counter = false;

    bool is_array() const { return upper_bound.has_value(); }
};

class SymbolTable {
public:
    const Symbol* find(std::string_view name) const {
        auto it = index_.find(ascii_lower(name));
        return it == index_.end() ? nullptr : &symbols_[it->second];
    }
    const Symbol& add(Symbol s) {
        index_.emplace(ascii_lower(s.name), symbols_.size());
        symbols_.push_back(std::move(s));
        return symbols_.back();
    }
    /// Declaration order.
    const std::deque<Symbol>& all() const { return symbols_; }
    bool empty() const { return symbols_.empty(); }

private:
    std::deque<Symbol> symbols_;  // stable addresses for find()
    std::unordered_map<std::string, std::size_t> index_;
};

struct IfBlock {
    int if_line = 0;
    std::optional<int> else_line;
    int end_line = 0;
};

struct BlockTable {
    std::map<int, int> for_to_next;
    std::map<int, int> next_to_for;
    std::map<int, IfBlock> if_blocks;    // keyed by If line
    std::map<int, int> else_to_if;       // Else line -> If line
    std::map<int, int> end_if_to_if;     // End If line -> If line

    bool empty() const { return for_to_next.empty() && if_blocks.empty(); }
};

struct CheckedProgram {
    SourceProgram source;
    std::vector<Statement> statements;
    BlockTable blocks;
    SymbolTable symbols;

    /// Index into `statements` of the statement on `line`, if any.
    std::optional<std::size_t> index_of_line(int line) const {
        auto it = line_index_.find(line);
        if (it == line_index_.end()) return std::nullopt;
        return it->second;
    }

    std::string statement_text(std::size_t index) const {
        const Statement& s = statements[index];
        std::string_view raw = source.line_text(s.line);
        return raw.empty() ? format_statement(s) : std::string(raw);
    }

    void index_lines() {
        line_index_.clear();
        for (std::size_t i = 0; i < statements.size(); ++i) line_index_[statements[i].line] = i;
    }

private:
    std::map<int, std::size_t> line_index_;
};

struct CheckResult {
    std::optional<CheckedProgram> program;
    Diagnostics diagnostics;

    bool ok() const { return program.has_value(); }
};

namespace detail {

class Checker {
public:
    explicit Checker(std::vector<Statement> statements) : stmts_(std::move(statements)) {}

    CheckResult run(SourceProgram source) {
        for (auto& stmt : stmts_) check_statement(stmt);
        while (!open_.empty()) {
            const OpenBlock& b = open_.back();
            if (b.kind == OpenBlock::For)
                error(b.line, b.column, "this For has no matching Next",
                      "Add a Next line after the last line of the loop body");
            else
                error(b.line, b.column, "this If has no matching End If",
                      "Add an End If line after the last line of the If block");
            open_.pop_back();
        }
        CheckResult result;
        sort_diagnostics(diags_);
        result.diagnostics = std::move(diags_);
        if (!has_errors(result.diagnostics)) {
            CheckedProgram p;
            p.source = std::move(source);
            p.statements = std::move(stmts_);
            p.blocks = std::move(blocks_);
            p.symbols = std::move(symbols_);
            p.index_lines();
            result.program = std::move(p);
        }
        return result;
    }

private:
    struct OpenBlock {
        enum Kind { For, If } kind;
        int line;
        int column;
        std::string counter;               // For only, lowercase
        std::vector<std::string> scoped;   // lowercase names visible only inside this block
        bool has_else = false;
    };

    struct ExprContext {
        bool comparison_at_top = false;
        bool input_at_top = false;
    };

    void error(int line, int column, std::string message, std::string suggestion) {
        diags_.push_back({Severity::Error, line, column, std::move(message), std::move(suggestion)});
    }

    bool in_block() const { return !open_.empty(); }

    const OpenBlock* enclosing_for_with_counter(const std::string& lower) const {
        for (auto it = open_.rbegin(); it != open_.rend(); ++it)
            if (it->kind == OpenBlock::For && it->counter == lower) return &*it;
        return nullptr;
    }

    /// Looks up a name for use at (line, column); reports and returns null when
    /// it is not usable here.
    const Symbol* resolve(std::string& name, int line, int column) {
        const std::string lower = ascii_lower(name);
        const Symbol* sym = symbols_.find(name);
        if (!sym) {
            error(line, column, "'" + name + "' is used before it is declared",
                  "Declare it first with a line such as Dim " + name + " As Integer");
            return nullptr;
        }
        if (hidden_.count(lower)) {
            error(line, column,
                  "'" + sym->name + "' can only be used inside the For loop on line " +
                      std::to_string(hidden_.at(lower)),
                  "Declare it at the top with Dim " + sym->name +
                      " As Integer and write the loop as For " + sym->name + " = ...");
            return nullptr;
        }
        name = sym->name;
        return sym;
    }

    std::optional<ScalarType> type_of(Expr& e, int line, ExprContext ctx, bool top = true) {
        const ExprContext inner{};
        switch (e.kind) {
            case Expr::Kind::IntLiteral: return ScalarType::Integer;
            case Expr::Kind::StringLiteral: return ScalarType::String;
            case Expr::Kind::Variable: {
                const Symbol* sym = resolve(e.text, line, e.column);
                if (!sym) return std::nullopt;
                if (sym->is_array()) {
                    error(line, e.column, "'" + sym->name + "' is an array, so pick one of its elements",
                          "Write " + sym->name + "(0) to use its first element");
                    return std::nullopt;
                }
                return sym->type;
            }
            case Expr::Kind::ArrayElement: {
                const Symbol* sym = resolve(e.text, line, e.column);
                auto idx = type_of(e.operands[0], line, inner, false);
                if (!sym) return std::nullopt;
                if (!sym->is_array()) {
                    error(line, e.column, "'" + sym->name + "' is not an array, so it cannot be indexed",
                          "Remove the brackets and write just " + sym->name);
                    return std::nullopt;
                }
                if (idx == ScalarType::String)
                    error(line, e.operands[0].column, "an array index must be a whole number",
                          "Use a number or an Integer variable, e.g. " + sym->name + "(i)");
                return sym->type;
            }
            case Expr::Kind::InputBox: {
                if (!(top && ctx.input_at_top)) {
                    error(line, e.column, "InputBox must be the whole right-hand side of an assignment",
                          "Read the value on its own line first, e.g. x = InputBox(\"Enter x\")");
                }
                type_of(e.operands[0], line, inner, false);
                return ScalarType::String;
            }
            case Expr::Kind::Negate: {
                auto t = type_of(e.operands[0], line, inner, false);
                if (t == ScalarType::String) {
                    error(line, e.column, "a minus sign cannot be put in front of text",
                          "Only numbers can be negated, e.g. -5 or -sum");
                    return std::nullopt;
                }
                return t;
            }
            case Expr::Kind::Binary: {
                if (is_comparison(e.op) && !(top && ctx.comparison_at_top)) {
                    error(line, e.column, "a comparison can only be used as the condition of an If",
                          "Use it in an If line, e.g. If a > b Then");
                }
                auto l = type_of(e.operands[0], line, inner, false);
                auto r = type_of(e.operands[1], line, inner, false);
                if (!l || !r) return std::nullopt;
                if (is_comparison(e.op)) {
                    if (*l != *r) {
                        error(line, e.column, "a number cannot be compared with a text",
                              "Compare numbers with numbers and texts with texts");
                    }
                    return ScalarType::Integer;
                }
                if (e.op == BinaryOp::Add)
                    return (*l == ScalarType::String || *r == ScalarType::String) ? ScalarType::String
                                                                                    : ScalarType::Integer;
                if (*l == ScalarType::String || *r == ScalarType::String) {
                    error(line, e.column, std::string("'") + op_text(e.op) + "' works only on numbers",
                          "Use + to join texts; -, *, \\ and Mod need whole numbers");
                    return std::nullopt;
                }
                return ScalarType::Integer;
            }
        }
        return std::nullopt;
    }

    void require_integer(Expr& e, int line, const std::string& what) {
        auto t = type_of(e, line, {}, true);
        if (t == ScalarType::String)
            error(line, e.column, what + " must be a whole number",
                  "Use a number or an Integer variable here");
    }

    /// Evaluates a declaration-time array bound made only of literals.
    std::optional<std::int64_t> constant_value(const Expr& e, bool& non_constant) const {
        switch (e.kind) {
            case Expr::Kind::IntLiteral: return e.int_value;
            case Expr::Kind::Negate: {
                auto v = constant_value(e.operands[0], non_constant);
                if (!v || *v == INT64_MIN) return std::nullopt;
                return -*v;
            }
            case Expr::Kind::Binary: {
                if (is_comparison(e.op)) { non_constant = true; return std::nullopt; }
                auto l = constant_value(e.operands[0], non_constant);
                auto r = constant_value(e.operands[1], non_constant);
                if (!l || !r) return std::nullopt;
                std::int64_t out = 0;
                switch (e.op) {
                    case BinaryOp::Add: if (__builtin_add_overflow(*l, *r, &out)) return std::nullopt; return out;
                    case BinaryOp::Sub: if (__builtin_sub_overflow(*l, *r, &out)) return std::nullopt; return out;
                    case BinaryOp::Mul: if (__builtin_mul_overflow(*l, *r, &out)) return std::nullopt; return out;
                    case BinaryOp::IntDiv:
                        if (*r == 0 || (*l == INT64_MIN && *r == -1)) return std::nullopt;
                        return *l / *r;
                    case BinaryOp::Mod:
                        if (*r == 0) return std::nullopt;
                        if (*r == -1) return 0;
                        return *l % *r;
                    default: return std::nullopt;
                }
            }
            default:
                non_constant = true;
                return std::nullopt;
        }
    }

    void declare(const std::string& name, ScalarType type, std::optional<std::int64_t> bound, int line,
                 int column, bool counter) {
        if (const Symbol* prev = symbols_.find(name)) {
            error(line, column,
                  "'" + prev->name + "' is already declared on line " + std::to_string(prev->declared_on),
                  "Remove this declaration or choose a different name");
            return;
        }
        symbols_.add({name, type, bound, line, counter});
    }

    void check_statement(Statement& stmt) {
        const int line = stmt.line;
        const int col = stmt.column;
        std::visit(
            [&](auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, DeclareScalar>) {
                    if (in_block()) {
                        error(line, col, "variables must be declared outside of For and If blocks",
                              "Move Dim " + k.name + " As " + type_name(k.type) +
                                  " to the top of the program");
                        return;
                    }
                    declare(k.name, k.type, std::nullopt, line, col, false);
                } else if constexpr (std::is_same_v<T, DeclareArray>) {
                    if (in_block()) {
                        error(line, col, "arrays must be declared outside of For and If blocks",
                              "Move the Dim " + k.name + "(...) line to the top of the program");
                        return;
                    }
                    bool non_constant = false;
                    auto bound = constant_value(k.upper_bound, non_constant);
                    if (non_constant) {
                        error(line, k.upper_bound.column, "the array size must be a fixed number",
                              "Write a number, e.g. Dim " + k.name + "(1) As " + type_name(k.type));
                        return;
                    }
                    if (!bound) {
                        error(line, k.upper_bound.column, "the array size cannot be worked out",
                              "Write a small number, e.g. Dim " + k.name + "(1) As " + type_name(k.type));
                        return;
                    }
                    if (*bound < 0) {
                        error(line, k.upper_bound.column, "the array size cannot be negative",
                              "Dim " + k.name + "(1) makes two elements, " + k.name + "(0) and " + k.name +
                                  "(1); use 0 or more");
                        return;
                    }
                    if (*bound > kMaxUpperBound) {
                        error(line, k.upper_bound.column, "the array is too large to show in RAM",
                              "Use at most " + std::to_string(kMaxUpperBound + 1) + " elements, e.g. Dim " +
                                  k.name + "(9) As " + type_name(k.type));
                        return;
                    }
                    declare(k.name, k.type, bound, line, col, false);
                } else if constexpr (std::is_same_v<T, Assign>) {
                    check_assign(k, line);
                } else if constexpr (std::is_same_v<T, Output>) {
                    type_of(k.value, line, {}, true);
                } else if constexpr (std::is_same_v<T, ForHeader>) {
                    check_for(k, line, col);
                } else if constexpr (std::is_same_v<T, Next>) {
                    check_next(k, line, col);
                } else if constexpr (std::is_same_v<T, IfHeader>) {
                    const bool cmp = k.condition.kind == Expr::Kind::Binary && is_comparison(k.condition.op);
                    if (!cmp) {
                        error(line, k.condition.column, "the If condition must be a comparison",
                              "Compare two values, e.g. If sum > 10 Then");
                        type_of(k.condition, line, {}, true);
                    } else {
                        type_of(k.condition, line, ExprContext{true, false}, true);
                    }
                    open_.push_back({OpenBlock::If, line, col, {}, {}, false});
                    blocks_.if_blocks[line] = IfBlock{line, std::nullopt, 0};
                } else if constexpr (std::is_same_v<T, ElseMarker>) {
                    if (open_.empty() || open_.back().kind != OpenBlock::If) {
                        error(line, col, "this Else has no matching If",
                              open_.empty() ? "Add an If ... Then line above it"
                                            : "Close the loop with Next before Else");
                        return;
                    }
                    OpenBlock& b = open_.back();
                    if (b.has_else) {
                        error(line, col,
                              "the If on line " + std::to_string(b.line) + " already has an Else",
                              "Use only one Else per If, or start a new If block");
                        return;
                    }
                    b.has_else = true;
                    blocks_.if_blocks[b.line].else_line = line;
                    blocks_.else_to_if[line] = b.line;
                } else if constexpr (std::is_same_v<T, EndIfMarker>) {
                    if (open_.empty() || open_.back().kind != OpenBlock::If) {
                        error(line, col, "this End If has no matching If",
                              open_.empty() ? "Remove it or add an If ... Then line above it"
                                            : "Close the loop with Next before End If");
                        return;
                    }
                    const OpenBlock b = open_.back();
                    close_block();
                    blocks_.if_blocks[b.line].end_line = line;
                    blocks_.end_if_to_if[line] = b.line;
                }
            },
            stmt.kind);
    }

    void check_assign(Assign& a, int line) {
        const Symbol* sym = resolve(a.target.name, line, a.target.column);
        if (a.target.index) {
            auto idx = type_of(*a.target.index, line, {}, false);
            if (idx == ScalarType::String)
                error(line, a.target.index->column, "an array index must be a whole number",
                      "Use a number or an Integer variable, e.g. " + a.target.name + "(i)");
        }
        auto value_type = type_of(a.value, line, ExprContext{false, true}, true);
        if (!sym) return;
        if (sym->is_array() && !a.target.index) {
            error(line, a.target.column, "'" + sym->name + "' is an array, so pick one of its elements",
                  "Write " + sym->name + "(0) = ... to set its first element");
            return;
        }
        if (!sym->is_array() && a.target.index) {
            error(line, a.target.column, "'" + sym->name + "' is not an array, so it cannot be indexed",
                  "Remove the brackets and write " + sym->name + " = ...");
            return;
        }
        if (sym->type == ScalarType::Integer && value_type == ScalarType::String &&
            a.value.kind != Expr::Kind::InputBox) {
            error(line, a.value.column,
                  "a text cannot be stored in the Integer variable '" + format_lvalue(a.target) + "'",
                  "Declare it As String, or assign a number to it");
        }
    }

    void check_for(ForHeader& f, int line, int col) {
        // bounds are evaluated before the counter exists
        require_integer(f.start, line, "the starting value");
        require_integer(f.end, line, "the final value");
        if (f.step) require_integer(*f.step, line, "the Step value");

        const std::string lower = ascii_lower(f.counter);
        bool scoped = false;
        if (const OpenBlock* outer = enclosing_for_with_counter(lower)) {
            error(line, col,
                  "this loop reuses the counter '" + f.counter + "' of the loop on line " +
                      std::to_string(outer->line),
                  "Give the inner loop its own counter, e.g. For j As Integer = 0 To 1");
        } else if (f.declares_counter) {
            const Symbol* prev = symbols_.find(f.counter);
            if (prev && !prev->loop_counter) {
                error(line, col,
                      "'" + prev->name + "' is already declared on line " + std::to_string(prev->declared_on),
                      "Drop 'As Integer' and write For " + prev->name + " = ...");
            } else {
                if (!prev) symbols_.add({f.counter, ScalarType::Integer, std::nullopt, line, true});
                f.counter = symbols_.find(f.counter)->name;
                if (in_block() && (!prev || hidden_.count(lower))) scoped = true;
                if (!in_block()) scoped = false;
                hidden_.erase(lower);
            }
        } else if (const Symbol* sym = resolve(f.counter, line, col)) {
            if (sym->is_array() || sym->type != ScalarType::Integer)
                error(line, col, "the loop counter '" + sym->name + "' must be an Integer variable",
                      "Use an Integer, e.g. For i As Integer = 0 To 1");
        }

        OpenBlock b{OpenBlock::For, line, col, lower, {}, false};
        if (scoped) b.scoped.push_back(lower);
        open_.push_back(std::move(b));
    }

    void check_next(Next& n, int line, int col) {
        auto it = std::find_if(open_.rbegin(), open_.rend(),
                               [](const OpenBlock& b) { return b.kind == OpenBlock::For; });
        if (it == open_.rend()) {
            error(line, col, "this Next has no matching For",
                  "Remove it, or add a For line such as For i As Integer = 0 To 1 above it");
            return;
        }
        if (it != open_.rbegin()) {
            error(line, col,
                  "this Next comes before the End If of the If on line " + std::to_string(open_.back().line),
                  "Close the If block with End If before Next");
            while (open_.back().kind != OpenBlock::For) open_.pop_back();
        }
        const OpenBlock& b = open_.back();
        if (n.counter) {
            if (ascii_lower(*n.counter) != b.counter) {
                const Symbol* sym = symbols_.find(b.counter);
                const std::string shown = sym ? sym->name : b.counter;
                error(line, col,
                      "Next " + *n.counter + " does not match the loop counter '" + shown +
                          "' of the For on line " + std::to_string(b.line),
                      "Write Next " + shown + " or just Next");
            } else if (const Symbol* sym = symbols_.find(b.counter)) {
                n.counter = sym->name;
            }
        }
        blocks_.for_to_next[b.line] = line;
        blocks_.next_to_for[line] = b.line;
        close_block();
    }

    void close_block() {
        for (const auto& name : open_.back().scoped) hidden_[name] = open_.back().line;
        open_.pop_back();
    }

    static constexpr std::int64_t kMaxUpperBound = 999;

    std::vector<Statement> stmts_;
    Diagnostics diags_;
    SymbolTable symbols_;
    BlockTable blocks_;
    std::vector<OpenBlock> open_;
    std::unordered_map<std::string, int> hidden_;  // out-of-scope loop counters -> For line
};

}  // namespace detail

/// Statically checks parsed statements. Diagnostics come back sorted by line,
/// then column.
inline CheckResult check(std::vector<Statement> statements, SourceProgram source = {}) {
    return detail::Checker(std::move(statements)).run(std::move(source));
}

/// parse + check. Parse errors stop before checking.
inline CheckResult compile(const SourceProgram& source) {
    ParseResult parsed = parse(source);
    if (!parsed.ok()) {
        CheckResult r;
        r.diagnostics = std::move(parsed.diagnostics);
        return r;
    }
    CheckResult r = check(std::move(parsed.statements), source);
    return r;
}

inline CheckResult compile(std::string text) { return compile(SourceProgram(std::move(text))); }

}  // namespace mtlviz

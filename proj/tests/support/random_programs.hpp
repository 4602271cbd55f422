#pragma once

// Seeded generator of small programs (straight-line code, at most one For and
// at most one If, possibly nested) and an independent big-step evaluator used
// as a test oracle. Both work on the generator's own representation; neither
// touches the library's parser, AST or machine.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtltest::gen {

struct GExpr {
    enum Kind { Int, Str, Var, Elem, Neg, Bin };
    Kind kind = Int;
    std::int64_t n = 0;
    std::string s;   // literal text, or variable / array name
    std::string op;  // "+", "-", "*", "\\", "Mod"
    std::vector<GExpr> kids;
    bool text = false;  // static type
};

struct GCond {
    GExpr lhs;
    std::string op;  // "=", "<>", "<", "<=", ">", ">="
    GExpr rhs;
};

struct GStmt {
    enum Kind { DimScalar, DimArray, Assign, Input, Output, For, If };
    Kind kind = Assign;
    int line = 0;

    std::string name;  // Dim name, Assign/Input target, For counter
    bool text = false;
    std::int64_t bound = 0;

    std::optional<GExpr> index;  // array-element target
    GExpr value;                 // Assign value, Output value, Input prompt

    bool inline_counter = false;  // For i As Integer = ...
    bool named_next = false;
    GExpr from, to;
    std::optional<GExpr> step;
    int next_line = 0;

    GCond cond;
    bool has_else = false;
    int else_line = 0, end_line = 0;

    std::vector<GStmt> body;       // For body / If then-branch
    std::vector<GStmt> else_body;  // If else-branch
};

struct GProgram {
    std::vector<GStmt> stmts;
    std::vector<std::string> inputs;
    std::string source;
    bool uses_input = false;
};

class Generator {
public:
    struct Options {
        bool allow_input = false;
    };

    Generator(std::uint64_t seed, Options opt) : rng_(seed), opt_(opt) {}
    explicit Generator(std::uint64_t seed) : Generator(seed, Options{}) {}

    GProgram generate() {
        vars_.clear();
        used_for_ = used_if_ = false;
        GProgram p;
        const int dims = between(1, 3);
        for (int i = 0; i < dims; ++i) dim(p.stmts);
        const int items = between(3, 9);
        for (int i = 0; i < items; ++i) {
            if (chance(0.15)) dim(p.stmts);
            statement(p.stmts, 0, true);
        }
        for (const auto& s : p.stmts) p.uses_input |= mentions_input(s);
        if (p.uses_input) {
            static const char* pool[] = {"7", "-3", " 12 ", "0", "abc", "+5", "", "99999999999999999999", "4"};
            const int n = between(0, 6);
            for (int i = 0; i < n; ++i) p.inputs.push_back(pool[between(0, 8)]);
        }
        int line = 1;
        p.source = emit_block(p.stmts, line);
        return p;
    }

private:
    struct Var {
        std::string name;
        bool text = false;
        std::optional<std::int64_t> bound;
        bool counter = false;  // active loop counter: readable, never assigned
        bool set = false;      // surely holds a value at this point of the program
    };

    int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

    bool declared(const std::string& name) const {
        for (const auto& v : vars_)
            if (v.name == name) return true;
        for (const auto& n : retired_)
            if (n == name) return true;
        return false;
    }

    /// Readable variables of one shape; mostly ones that surely hold a value,
    /// so that only some programs read a RESERVED cell.
    std::vector<const Var*> matching(bool text, bool array) {
        const bool only_set = chance(0.95);
        std::vector<const Var*> out;
        for (const auto& v : vars_)
            if (v.text == text && v.bound.has_value() == array && (v.set || !only_set)) out.push_back(&v);
        return out;
    }

    void mark_set(const std::string& name) {
        for (auto& v : vars_)
            if (v.name == name) v.set = true;
    }

    void dim(std::vector<GStmt>& out) {
        static const char* ints[] = {"a", "b", "c", "total", "x1"};
        static const char* texts[] = {"s", "msg"};
        static const char* arrays[] = {"arr", "vals", "words"};
        GStmt d;
        const int pick = between(0, 9);
        if (pick < 5) {
            d.kind = GStmt::DimScalar;
            d.name = ints[between(0, 4)];
        } else if (pick < 7) {
            d.kind = GStmt::DimScalar;
            d.name = texts[between(0, 1)];
            d.text = true;
        } else {
            d.kind = GStmt::DimArray;
            const int a = between(0, 2);
            d.name = arrays[a];
            d.text = a == 2;
            d.bound = between(0, 4);
        }
        if (declared(d.name)) return;
        vars_.push_back({d.name, d.text,
                         d.kind == GStmt::DimArray ? std::optional<std::int64_t>(d.bound) : std::nullopt});
        out.push_back(d);
        // usually give the new cell a value straight away
        const Var v = vars_.back();
        if (d.kind == GStmt::DimScalar) {
            if (chance(0.9)) {
                out.push_back(assignment_to(v));
                mark_set(v.name);
            }
            return;
        }
        if (chance(0.15)) return;
        for (std::int64_t i = 0; i <= d.bound; ++i) {
            GStmt a;
            a.kind = GStmt::Assign;
            a.name = v.name;
            a.text = v.text;
            a.index = literal(i);
            a.value = v.text ? text_expr(1) : int_expr(1);
            out.push_back(a);
        }
        mark_set(v.name);
    }

    GExpr literal(std::int64_t n) {
        GExpr e;
        e.kind = GExpr::Int;
        e.n = n;
        return e;
    }

    GExpr int_leaf() {
        const int pick = between(0, 9);
        if (pick < 4 || vars_.empty()) {
            if (chance(0.04)) return literal(chance(0.5) ? 4611686018427387904LL : 3037000500LL);
            return literal(between(0, 12));
        }
        if (pick < 8) {
            auto vs = matching(false, false);
            if (!vs.empty()) return ref(*vs[between(0, static_cast<int>(vs.size()) - 1)]);
        }
        auto arrs = matching(false, true);
        if (!arrs.empty()) return element(*arrs[between(0, static_cast<int>(arrs.size()) - 1)]);
        return literal(between(0, 12));
    }

    GExpr ref(const Var& v) {
        GExpr e;
        e.kind = GExpr::Var;
        e.s = v.name;
        e.text = v.text;
        return e;
    }

    GExpr index_for(const Var& array) {
        if (chance(0.92)) return literal(between(0, static_cast<int>(*array.bound)));
        if (chance(0.5)) return literal(*array.bound + between(1, 2));
        return int_expr(1);
    }

    GExpr element(const Var& array) {
        GExpr e;
        e.kind = GExpr::Elem;
        e.s = array.name;
        e.text = array.text;
        e.kids.push_back(index_for(array));
        return e;
    }

    GExpr int_expr(int depth) {
        if (depth <= 0 || chance(0.4)) return int_leaf();
        if (chance(0.12)) {
            GExpr e;
            e.kind = GExpr::Neg;
            e.kids.push_back(int_expr(depth - 1));
            return e;
        }
        static const char* ops[] = {"+", "-", "*", "\\", "Mod"};
        GExpr e;
        e.kind = GExpr::Bin;
        e.op = ops[between(0, 4)];
        e.kids.push_back(int_expr(depth - 1));
        const bool divides = e.op == "\\" || e.op == "Mod";
        e.kids.push_back(divides && chance(0.85) ? literal(between(1, 9)) : int_expr(depth - 1));
        return e;
    }

    GExpr text_leaf() {
        static const char* lits[] = {"hi", "sum is ", "", "say \"yes\"", "n="};
        const int pick = between(0, 5);
        if (pick >= 3) {
            auto vs = matching(true, false);
            if (!vs.empty()) return ref(*vs[between(0, static_cast<int>(vs.size()) - 1)]);
            auto arrs = matching(true, true);
            if (!arrs.empty() && pick == 5) return element(*arrs[between(0, static_cast<int>(arrs.size()) - 1)]);
        }
        GExpr e;
        e.kind = GExpr::Str;
        e.s = lits[between(0, 4)];
        e.text = true;
        return e;
    }

    GExpr text_expr(int depth) {
        if (depth <= 0 || chance(0.4)) return text_leaf();
        GExpr e;
        e.kind = GExpr::Bin;
        e.op = "+";
        e.text = true;
        const int shape = between(0, 2);
        e.kids.push_back(shape == 2 ? int_expr(depth - 1) : text_expr(depth - 1));
        e.kids.push_back(shape == 1 ? int_expr(depth - 1) : text_expr(depth - 1));
        return e;
    }

    GStmt assignment_to(const Var& v) {
        GStmt a;
        a.kind = GStmt::Assign;
        a.name = v.name;
        a.text = v.text;
        if (v.bound) a.index = index_for(v);
        a.value = v.text && chance(0.8) ? text_expr(2) : int_expr(2);
        return a;
    }

    std::vector<const Var*> assignable() const {
        std::vector<const Var*> out;
        for (const auto& v : vars_)
            if (!v.counter) out.push_back(&v);
        return out;
    }

    void simple(std::vector<GStmt>& out, int depth) {
        const int pick = between(0, 9);
        auto targets = assignable();
        if (pick < 6 && !targets.empty()) {
            const Var& v = *targets[between(0, static_cast<int>(targets.size()) - 1)];
            out.push_back(assignment_to(v));
            if (depth == 0 && !v.bound) mark_set(v.name);
            return;
        }
        if (pick < 8 && opt_.allow_input && !targets.empty()) {
            const Var& v = *targets[between(0, static_cast<int>(targets.size()) - 1)];
            GStmt in;
            in.kind = GStmt::Input;
            in.name = v.name;
            in.text = v.text;
            if (v.bound) in.index = index_for(v);
            in.value = chance(0.5) ? text_leaf() : [&] {
                GExpr e;
                e.kind = GExpr::Bin;
                e.op = "+";
                e.text = true;
                GExpr lit;
                lit.kind = GExpr::Str;
                lit.s = "Enter ";
                lit.text = true;
                e.kids.push_back(lit);
                e.kids.push_back(int_leaf());
                return e;
            }();
            out.push_back(in);
            return;
        }
        GStmt o;
        o.kind = GStmt::Output;
        o.value = chance(0.5) ? text_expr(2) : int_expr(2);
        out.push_back(o);
    }

    void statement(std::vector<GStmt>& out, int depth, bool top) {
        const int pick = between(0, 9);
        if (pick == 0 && !used_for_ && depth < 2) return loop(out, depth);
        if (pick == 1 && !used_if_ && depth < 2) return branch(out, depth);
        (void)top;
        simple(out, depth);
    }

    GExpr bound_expr() {
        if (chance(0.8)) return literal(between(0, 6));
        if (chance(0.5)) {
            GExpr e;
            e.kind = GExpr::Neg;
            e.kids.push_back(literal(between(1, 3)));
            return e;
        }
        GExpr e;
        e.kind = GExpr::Bin;
        e.op = chance(0.5) ? "+" : "-";
        e.kids.push_back(literal(between(0, 4)));
        e.kids.push_back(literal(between(0, 2)));
        return e;
    }

    void loop(std::vector<GStmt>& out, int depth) {
        used_for_ = true;
        GStmt f;
        f.kind = GStmt::For;
        f.name = chance(0.5) ? "i" : "j";
        if (declared(f.name)) return simple(out, depth);
        f.inline_counter = depth > 0 || chance(0.6);
        if (!f.inline_counter) {
            GStmt d;
            d.kind = GStmt::DimScalar;
            d.name = f.name;
            out.push_back(d);
        }
        f.from = bound_expr();
        f.to = bound_expr();
        if (chance(0.5)) {
            const int steps[] = {1, 2, 3, -1, -2};
            std::int64_t s = steps[between(0, 4)];
            if (s > 0)
                f.step = literal(s);
            else {
                GExpr e;
                e.kind = GExpr::Neg;
                e.kids.push_back(literal(-s));
                f.step = e;
            }
        }
        f.named_next = chance(0.5);
        vars_.push_back({f.name, false, std::nullopt, true, true});
        const std::size_t counter_slot = vars_.size() - 1;
        const int n = between(1, 4);
        for (int i = 0; i < n; ++i) statement(f.body, depth + 1, false);
        if (f.inline_counter) {
            retired_.push_back(f.name);
            vars_.erase(vars_.begin() + static_cast<std::ptrdiff_t>(counter_slot));
        } else {
            vars_[counter_slot].counter = false;
            vars_[counter_slot].set = depth == 0;
        }
        out.push_back(std::move(f));
    }

    GCond condition() {
        static const char* ops[] = {"=", "<>", "<", "<=", ">", ">="};
        GCond c;
        c.op = ops[between(0, 5)];
        if (chance(0.2)) {
            c.lhs = text_expr(1);
            c.rhs = text_expr(1);
        } else {
            c.lhs = int_expr(1);
            c.rhs = int_expr(1);
        }
        return c;
    }

    void branch(std::vector<GStmt>& out, int depth) {
        used_if_ = true;
        GStmt b;
        b.kind = GStmt::If;
        b.cond = condition();
        const int n = between(1, 3);
        for (int i = 0; i < n; ++i) statement(b.body, depth + 1, false);
        b.has_else = chance(0.5);
        if (b.has_else) {
            const int m = between(1, 3);
            for (int i = 0; i < m; ++i) statement(b.else_body, depth + 1, false);
        }
        out.push_back(std::move(b));
    }

    static bool mentions_input(const GStmt& s) {
        if (s.kind == GStmt::Input) return true;
        for (const auto& c : s.body)
            if (mentions_input(c)) return true;
        for (const auto& c : s.else_body)
            if (mentions_input(c)) return true;
        return false;
    }

    // --- source emission ------------------------------------------------------

    std::string kw(const std::string& word) {
        const int pick = between(0, 19);
        std::string out = word;
        if (pick == 0)
            for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else if (pick == 1)
            for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return out;
    }

    std::string name_ref(const std::string& name) {
        if (!chance(0.1)) return name;
        std::string out = name;
        for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return out;
    }

    static std::string quote(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }

    std::string expr(const GExpr& e) {
        switch (e.kind) {
            case GExpr::Int: return std::to_string(e.n);
            case GExpr::Str: return quote(e.s);
            case GExpr::Var: return name_ref(e.s);
            case GExpr::Elem: return name_ref(e.s) + "(" + expr(e.kids[0]) + ")";
            case GExpr::Neg: {
                const GExpr& k = e.kids[0];
                if (k.kind == GExpr::Bin || k.kind == GExpr::Neg) return "-(" + expr(k) + ")";
                return "-" + expr(k);
            }
            case GExpr::Bin: {
                auto side = [&](const GExpr& k) { return k.kind == GExpr::Bin ? "(" + expr(k) + ")" : expr(k); };
                const std::string op = e.op == "Mod" ? kw("Mod") : e.op;
                return side(e.kids[0]) + " " + op + " " + side(e.kids[1]);
            }
        }
        return {};
    }

    std::string target(const GStmt& s) {
        return name_ref(s.name) + (s.index ? "(" + expr(*s.index) + ")" : std::string());
    }

    std::string emit_block(std::vector<GStmt>& block, int& line) {
        std::string out;
        for (auto& s : block) out += emit(s, line);
        return out;
    }

    std::string emit(GStmt& s, int& line) {
        std::string out;
        if (chance(0.05)) {
            out += chance(0.5) ? "\n" : "' note\n";
            ++line;
        }
        s.line = line++;
        switch (s.kind) {
            case GStmt::DimScalar:
                out += kw("Dim") + " " + s.name + " " + kw("As") + " " + kw(s.text ? "String" : "Integer") + "\n";
                break;
            case GStmt::DimArray:
                out += kw("Dim") + " " + s.name + (chance(0.3) ? " (" : "(") + std::to_string(s.bound) + ") " +
                       kw("As") + " " + kw(s.text ? "String" : "Integer") + "\n";
                break;
            case GStmt::Assign: out += target(s) + " = " + expr(s.value) + "\n"; break;
            case GStmt::Input: out += target(s) + " = " + kw("InputBox") + "(" + expr(s.value) + ")\n"; break;
            case GStmt::Output: out += kw("MsgBox") + "(" + expr(s.value) + ")\n"; break;
            case GStmt::For: {
                out += kw("For") + " " + s.name + (s.inline_counter ? " " + kw("As") + " " + kw("Integer") : "") +
                       " = " + expr(s.from) + " " + kw("To") + " " + expr(s.to);
                if (s.step) out += " " + kw("Step") + " " + expr(*s.step);
                out += "\n" + emit_block(s.body, line);
                s.next_line = line++;
                out += kw("Next") + (s.named_next ? " " + s.name : "") + "\n";
                break;
            }
            case GStmt::If: {
                out += kw("If") + " " + expr(s.cond.lhs) + " " + s.cond.op + " " + expr(s.cond.rhs) + " " +
                       kw("Then") + "\n";
                out += emit_block(s.body, line);
                if (s.has_else) {
                    s.else_line = line++;
                    out += kw("Else") + "\n" + emit_block(s.else_body, line);
                }
                s.end_line = line++;
                out += kw("End") + " " + kw("If") + "\n";
                break;
            }
        }
        return out;
    }

    std::mt19937_64 rng_;
    Options opt_;
    std::vector<Var> vars_;
    std::vector<std::string> retired_;
    bool used_for_ = false, used_if_ = false;
};

// ==============================================================================
// Big-step oracle
// ==============================================================================

struct OValue {
    bool text = false;
    std::int64_t n = 0;
    std::string s;

    std::string to_text() const { return text ? s : std::to_string(n); }
};

struct OracleResult {
    std::vector<std::pair<std::string, std::optional<OValue>>> ram;  // declaration order
    std::vector<std::string> outputs;
    bool faulted = false;
    std::string fault_kind;
    int fault_line = 0;
};

class Oracle {
public:
    OracleResult run(const GProgram& p) {
        result_ = {};
        where_.clear();
        bounds_.clear();
        try {
            block(p.stmts);
        } catch (const Stop& s) {
            result_.faulted = true;
            result_.fault_kind = s.kind;
            result_.fault_line = s.line;
        }
        return result_;
    }

private:
    struct Stop {
        std::string kind;
        int line;
    };

    using Wide = __int128;

    [[noreturn]] static void stop(const char* kind, int line) { throw Stop{kind, line}; }

    static std::int64_t fit(Wide v, int line) {
        if (v > INT64_MAX || v < INT64_MIN) stop("Overflow", line);
        return static_cast<std::int64_t>(v);
    }

    void create(const std::string& cell) {
        where_[cell] = result_.ram.size();
        result_.ram.push_back({cell, std::nullopt});
    }

    void store(const std::string& cell, OValue v) {
        if (!where_.count(cell)) create(cell);
        result_.ram[where_[cell]].second = std::move(v);
    }

    const OValue& load(const std::string& cell, int line) const {
        auto it = where_.find(cell);
        if (it == where_.end() || !result_.ram[it->second].second) stop("ValueNotSet", line);
        return *result_.ram[it->second].second;
    }

    std::string element(const std::string& array, const GExpr& index, int line) const {
        const std::int64_t i = value(index, line).n;
        if (i < 0 || i > bounds_.at(array)) stop("IndexOutOfRange", line);
        return array + "(" + std::to_string(i) + ")";
    }

    OValue value(const GExpr& e, int line) const {
        switch (e.kind) {
            case GExpr::Int: return {false, e.n, {}};
            case GExpr::Str: return {true, 0, e.s};
            case GExpr::Var: return load(e.s, line);
            case GExpr::Elem: return load(element(e.s, e.kids[0], line), line);
            case GExpr::Neg: return {false, fit(-Wide(value(e.kids[0], line).n), line), {}};
            case GExpr::Bin: {
                const OValue l = value(e.kids[0], line);
                const OValue r = value(e.kids[1], line);
                if (e.op == "+" && (l.text || r.text)) return {true, 0, l.to_text() + r.to_text()};
                const Wide a = l.n, b = r.n;
                if (e.op == "+") return {false, fit(a + b, line), {}};
                if (e.op == "-") return {false, fit(a - b, line), {}};
                if (e.op == "*") return {false, fit(a * b, line), {}};
                if (b == 0) stop("DivisionByZero", line);
                const Wide q = a / b;  // truncates toward zero
                if (e.op == "\\") return {false, fit(q, line), {}};
                return {false, fit(a - q * b, line), {}};
            }
        }
        return {};
    }

    bool holds(const GCond& c, int line) const {
        const OValue l = value(c.lhs, line);
        const OValue r = value(c.rhs, line);
        int cmp = 0;
        if (l.text)
            cmp = l.s < r.s ? -1 : (r.s < l.s ? 1 : 0);
        else
            cmp = l.n < r.n ? -1 : (r.n < l.n ? 1 : 0);
        if (c.op == "=") return cmp == 0;
        if (c.op == "<>") return cmp != 0;
        if (c.op == "<") return cmp < 0;
        if (c.op == "<=") return cmp <= 0;
        if (c.op == ">") return cmp > 0;
        return cmp >= 0;
    }

    void block(const std::vector<GStmt>& stmts) {
        for (const auto& s : stmts) exec(s);
    }

    void exec(const GStmt& s) {
        switch (s.kind) {
            case GStmt::DimScalar: create(s.name); break;
            case GStmt::DimArray:
                bounds_[s.name] = s.bound;
                for (std::int64_t i = 0; i <= s.bound; ++i) create(s.name + "(" + std::to_string(i) + ")");
                break;
            case GStmt::Assign: {
                const std::string cell = s.index ? element(s.name, *s.index, s.line) : s.name;
                OValue v = value(s.value, s.line);
                if (s.text && !v.text) v = {true, 0, v.to_text()};
                store(cell, v);
                break;
            }
            case GStmt::Input: throw std::logic_error("the oracle does not model input");
            case GStmt::Output: result_.outputs.push_back(value(s.value, s.line).to_text()); break;
            case GStmt::For: {
                const std::int64_t from = value(s.from, s.line).n;
                const std::int64_t to = value(s.to, s.line).n;
                const std::int64_t by = s.step ? value(*s.step, s.line).n : 1;
                store(s.name, {false, from, {}});
                for (;;) {
                    const std::int64_t c = load(s.name, s.line).n;
                    if (by < 0 ? c < to : c > to) break;
                    block(s.body);
                    store(s.name, {false, fit(Wide(load(s.name, s.next_line).n) + by, s.next_line), {}});
                }
                break;
            }
            case GStmt::If:
                if (holds(s.cond, s.line))
                    block(s.body);
                else
                    block(s.else_body);
                break;
        }
    }

    OracleResult result_;
    std::map<std::string, std::size_t> where_;
    std::map<std::string, std::int64_t> bounds_;
};

}  // namespace mtltest::gen

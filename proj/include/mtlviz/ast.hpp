#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mtlviz {

enum class ScalarType { Integer, String };

inline const char* type_name(ScalarType t) { return t == ScalarType::Integer ? "Integer" : "String"; }

enum class BinaryOp { Add, Sub, Mul, IntDiv, Mod, Eq, Ne, Lt, Le, Gt, Ge };

inline bool is_comparison(BinaryOp op) {
    switch (op) {
        case BinaryOp::Eq: case BinaryOp::Ne: case BinaryOp::Lt:
        case BinaryOp::Le: case BinaryOp::Gt: case BinaryOp::Ge:
            return true;
        default:
            return false;
    }
}

inline const char* op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::IntDiv: return "\\";
        case BinaryOp::Mod: return "Mod";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

/// Binding strength; higher binds tighter.
inline int precedence(BinaryOp op) {
    if (is_comparison(op)) return 1;
    if (op == BinaryOp::Add || op == BinaryOp::Sub) return 2;
    return 3;
}

struct Expr {
    enum class Kind { IntLiteral, StringLiteral, Variable, ArrayElement, InputBox, Negate, Binary };

    Kind kind = Kind::IntLiteral;
    std::int64_t int_value = 0;
    std::string text;  // string literal value, or variable / array name
    BinaryOp op = BinaryOp::Add;
    std::vector<Expr> operands;  // ArrayElement: [index]; InputBox: [prompt]; Negate: [x]; Binary: [l, r]
    int column = 1;

    static Expr integer(std::int64_t v, int col = 1) {
        Expr e;
        e.kind = Kind::IntLiteral;
        e.int_value = v;
        e.column = col;
        return e;
    }
    static Expr string(std::string v, int col = 1) {
        Expr e;
        e.kind = Kind::StringLiteral;
        e.text = std::move(v);
        e.column = col;
        return e;
    }
    static Expr variable(std::string name, int col = 1) {
        Expr e;
        e.kind = Kind::Variable;
        e.text = std::move(name);
        e.column = col;
        return e;
    }
    static Expr element(std::string name, Expr index, int col = 1) {
        Expr e;
        e.kind = Kind::ArrayElement;
        e.text = std::move(name);
        e.operands.push_back(std::move(index));
        e.column = col;
        return e;
    }
    static Expr input_box(Expr prompt, int col = 1) {
        Expr e;
        e.kind = Kind::InputBox;
        e.operands.push_back(std::move(prompt));
        e.column = col;
        return e;
    }
    static Expr negate(Expr x, int col = 1) {
        Expr e;
        e.kind = Kind::Negate;
        e.operands.push_back(std::move(x));
        e.column = col;
        return e;
    }
    static Expr binary(BinaryOp op, Expr l, Expr r, int col = 1) {
        Expr e;
        e.kind = Kind::Binary;
        e.op = op;
        e.operands.push_back(std::move(l));
        e.operands.push_back(std::move(r));
        e.column = col;
        return e;
    }
};

/// Structural equality, ignoring source columns.
inline bool same_shape(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.operands.size() != b.operands.size()) return false;
    switch (a.kind) {
        case Expr::Kind::IntLiteral:
            if (a.int_value != b.int_value) return false;
            break;
        case Expr::Kind::StringLiteral:
        case Expr::Kind::Variable:
        case Expr::Kind::ArrayElement:
            if (a.text != b.text) return false;
            break;
        case Expr::Kind::Binary:
            if (a.op != b.op) return false;
            break;
        default:
            break;
    }
    for (std::size_t i = 0; i < a.operands.size(); ++i)
        if (!same_shape(a.operands[i], b.operands[i])) return false;
    return true;
}

/// Assignment target: `name` or `name(index)`.
struct LValue {
    std::string name;
    std::optional<Expr> index;
    int column = 1;
};

struct DeclareScalar {
    std::string name;
    ScalarType type = ScalarType::Integer;
};
struct DeclareArray {
    std::string name;
    Expr upper_bound;
    ScalarType type = ScalarType::Integer;
};
struct Assign {
    LValue target;
    Expr value;
};
struct Output {
    Expr value;
};
struct ForHeader {
    std::string counter;
    bool declares_counter = false;  // `For i As Integer = ...`
    Expr start;
    Expr end;
    std::optional<Expr> step;
};
struct Next {
    std::optional<std::string> counter;
};
struct IfHeader {
    Expr condition;
};
struct ElseMarker {};
struct EndIfMarker {};

using StatementKind = std::variant<DeclareScalar, DeclareArray, Assign, Output, ForHeader, Next,
                                   IfHeader, ElseMarker, EndIfMarker>;

struct Statement {
    int line = 0;
    int column = 1;
    StatementKind kind;
};

namespace detail {

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string format_expr(const Expr& e, int parent_prec, bool right_side) {
    switch (e.kind) {
        case Expr::Kind::IntLiteral: return std::to_string(e.int_value);
        case Expr::Kind::StringLiteral: return quote(e.text);
        case Expr::Kind::Variable: return e.text;
        case Expr::Kind::ArrayElement: return e.text + "(" + format_expr(e.operands[0], 0, false) + ")";
        case Expr::Kind::InputBox: return "InputBox(" + format_expr(e.operands[0], 0, false) + ")";
        case Expr::Kind::Negate: {
            const auto& x = e.operands[0];
            // A negative literal printed bare would lex as minus + digits anyway,
            // but nested negation and binaries keep explicit parens.
            const bool bare = x.kind != Expr::Kind::Binary && x.kind != Expr::Kind::Negate &&
                              !(x.kind == Expr::Kind::IntLiteral && x.int_value < 0);
            return bare ? "-" + format_expr(x, 4, false) : "-(" + format_expr(x, 0, false) + ")";
        }
        case Expr::Kind::Binary: {
            const int p = precedence(e.op);
            std::string s = format_expr(e.operands[0], p, false) + " " + op_text(e.op) + " " +
                            format_expr(e.operands[1], p, true);
            // left-associative: equal precedence on the right needs parens
            const bool wrap = p < parent_prec || (p == parent_prec && right_side) ||
                              (is_comparison(e.op) && parent_prec == 1);
            return wrap ? "(" + s + ")" : s;
        }
    }
    return {};
}

}  // namespace detail

inline std::string format_expr(const Expr& e) { return detail::format_expr(e, 0, false); }

inline std::string format_lvalue(const LValue& lv) {
    return lv.index ? lv.name + "(" + format_expr(*lv.index) + ")" : lv.name;
}

/// Canonical source text for a statement; re-parsing it yields the same shape.
inline std::string format_statement(const Statement& stmt) {
    struct Visitor {
        std::string operator()(const DeclareScalar& d) const {
            return "Dim " + d.name + " As " + type_name(d.type);
        }
        std::string operator()(const DeclareArray& d) const {
            return "Dim " + d.name + "(" + format_expr(d.upper_bound) + ") As " + type_name(d.type);
        }
        std::string operator()(const Assign& a) const {
            return format_lvalue(a.target) + " = " + format_expr(a.value);
        }
        std::string operator()(const Output& o) const { return "MsgBox(" + format_expr(o.value) + ")"; }
        std::string operator()(const ForHeader& f) const {
            std::string s = "For " + f.counter + (f.declares_counter ? " As Integer" : "") + " = " +
                            format_expr(f.start) + " To " + format_expr(f.end);
            if (f.step) s += " Step " + format_expr(*f.step);
            return s;
        }
        std::string operator()(const Next& n) const { return n.counter ? "Next " + *n.counter : "Next"; }
        std::string operator()(const IfHeader& i) const { return "If " + format_expr(i.condition) + " Then"; }
        std::string operator()(const ElseMarker&) const { return "Else"; }
        std::string operator()(const EndIfMarker&) const { return "End If"; }
    };
    return std::visit(Visitor{}, stmt.kind);
}

inline bool same_shape(const LValue& a, const LValue& b) {
    if (a.name != b.name || a.index.has_value() != b.index.has_value()) return false;
    return !a.index || same_shape(*a.index, *b.index);
}

inline bool same_shape(const std::optional<Expr>& a, const std::optional<Expr>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || same_shape(*a, *b);
}

/// Structural equality of statement kinds, ignoring line and column.
inline bool same_shape(const Statement& a, const Statement& b) {
    if (a.kind.index() != b.kind.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.kind);
            if constexpr (std::is_same_v<T, DeclareScalar>) {
                return x.name == y.name && x.type == y.type;
            } else if constexpr (std::is_same_v<T, DeclareArray>) {
                return x.name == y.name && x.type == y.type && same_shape(x.upper_bound, y.upper_bound);
            } else if constexpr (std::is_same_v<T, Assign>) {
                return same_shape(x.target, y.target) && same_shape(x.value, y.value);
            } else if constexpr (std::is_same_v<T, Output>) {
                return same_shape(x.value, y.value);
            } else if constexpr (std::is_same_v<T, ForHeader>) {
                return x.counter == y.counter && x.declares_counter == y.declares_counter &&
                       same_shape(x.start, y.start) && same_shape(x.end, y.end) &&
                       same_shape(x.step, y.step);
            } else if constexpr (std::is_same_v<T, Next>) {
                return x.counter == y.counter;
            } else if constexpr (std::is_same_v<T, IfHeader>) {
                return same_shape(x.condition, y.condition);
            } else {
                return true;
            }
        },
        a.kind);
}

}  // namespace mtlviz

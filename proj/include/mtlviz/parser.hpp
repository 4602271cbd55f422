#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtlviz/ast.hpp"
#include "mtlviz/lexer.hpp"
#include "mtlviz/source.hpp"

namespace mtlviz {

struct ParseResult {
    std::vector<Statement> statements;
    Diagnostics diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

namespace detail {

struct SyntaxError {
    Diagnostic diagnostic;
};

class LineParser {
public:
    LineParser(std::vector<Token> tokens, int line) : tokens_(std::move(tokens)), line_(line) {}

    Statement parse_statement() {
        Statement stmt;
        stmt.line = line_;
        stmt.column = peek().column;
        const Token& head = peek();
        switch (head.kind) {
            case TokenKind::KwDim: stmt.kind = parse_dim(); break;
            case TokenKind::KwFor: stmt.kind = parse_for(); break;
            case TokenKind::KwNext: stmt.kind = parse_next(); break;
            case TokenKind::KwIf: stmt.kind = parse_if(); break;
            case TokenKind::KwElse: stmt.kind = parse_else(); break;
            case TokenKind::KwEnd: stmt.kind = parse_end(); break;
            case TokenKind::KwMsgBox: stmt.kind = parse_msgbox(); break;
            case TokenKind::Identifier: stmt.kind = parse_assign(); break;
            default:
                error(head, "a line cannot start with " + found(head),
                      "Start the line with Dim, For, Next, If, Else, End If, MsgBox, or a "
                      "variable name for an assignment such as sum = 0");
        }
        return stmt;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() {
        const Token& t = tokens_[pos_];
        if (t.kind != TokenKind::EndOfLine) ++pos_;
        return t;
    }
    bool accept(TokenKind k) {
        if (peek().kind != k) return false;
        take();
        return true;
    }

    [[noreturn]] void error(const Token& at, std::string message, std::string suggestion) const {
        throw SyntaxError{{Severity::Error, line_, at.column, std::move(message), std::move(suggestion)}};
    }

    static std::string found(const Token& t) {
        switch (t.kind) {
            case TokenKind::Identifier: return "the name '" + t.text + "'";
            case TokenKind::Integer: return "the number " + t.text;
            case TokenKind::String: return "a text in quotes";
            case TokenKind::EndOfLine: return "the end of the line";
            default: return "'" + t.text + "'";
        }
    }

    const Token& expect(TokenKind k, const std::string& context, const std::string& suggestion) {
        if (peek().kind != k)
            error(peek(), "expected " + std::string(describe(k)) + " " + context + " but found " +
                              found(peek()),
                  suggestion);
        return take();
    }

    std::string expect_name(const std::string& context, const std::string& example) {
        const Token& t = peek();
        if (t.kind == TokenKind::Identifier) return take().text;
        if (t.kind >= TokenKind::KwDim && t.kind <= TokenKind::KwMod)
            error(t, "'" + t.text + "' is a reserved word and cannot be used as a name",
                  "Choose a different name, e.g. " + example);
        error(t, "expected a name " + context + " but found " + found(t),
              "Names start with a letter, e.g. " + example);
    }

    void expect_end(const std::string& suggestion) {
        if (peek().kind != TokenKind::EndOfLine)
            error(peek(), "unexpected " + found(peek()) + " at the end of the statement", suggestion);
    }

    ScalarType parse_type(const std::string& name) {
        const Token& t = peek();
        if (t.kind == TokenKind::KwInteger) { take(); return ScalarType::Integer; }
        if (t.kind == TokenKind::KwString) { take(); return ScalarType::String; }
        const std::string shown = name.empty() ? "sum" : name;
        if (t.kind == TokenKind::EndOfLine)
            error(t, "expected a type after 'As'",
                  "Write Integer or String, e.g. Dim " + shown + " As Integer");
        error(t, "expected a type after 'As' but found " + found(t),
              "Write Integer or String, e.g. Dim " + shown + " As Integer");
    }

    StatementKind parse_dim() {
        take();
        std::string name = expect_name("after 'Dim'", "Dim total As Integer");
        if (accept(TokenKind::LParen)) {
            Expr bound = parse_expr();
            expect(TokenKind::RParen, "after the array size",
                   "Close the size with ), e.g. Dim " + name + "(1) As Integer");
            expect(TokenKind::KwAs, "after the array size",
                   "Give the element type, e.g. Dim " + name + "(1) As Integer");
            ScalarType type = parse_type(name);
            expect_end("Declare one array per line, e.g. Dim " + name + "(1) As Integer");
            return DeclareArray{std::move(name), std::move(bound), type};
        }
        expect(TokenKind::KwAs, "after the variable name",
               "Give the type, e.g. Dim " + name + " As Integer");
        ScalarType type = parse_type(name);
        expect_end("Declare one variable per line, e.g. Dim " + name + " As Integer");
        return DeclareScalar{std::move(name), type};
    }

    StatementKind parse_for() {
        take();
        ForHeader f;
        f.counter = expect_name("after 'For'", "For i As Integer = 0 To 1");
        if (accept(TokenKind::KwAs)) {
            if (peek().kind != TokenKind::KwInteger)
                error(peek(), "a loop counter must be an Integer",
                      "Write For " + f.counter + " As Integer = 0 To 1");
            take();
            f.declares_counter = true;
        }
        expect(TokenKind::Equal, "after the loop counter",
               "Give the starting value, e.g. For " + f.counter + " As Integer = 0 To 1");
        f.start = parse_expr();
        expect(TokenKind::KwTo, "after the starting value",
               "Give the final value with To, e.g. For " + f.counter + " As Integer = 0 To 1");
        f.end = parse_expr();
        if (accept(TokenKind::KwStep)) f.step = parse_expr();
        expect_end("Put the loop body on the following lines and finish with Next");
        return f;
    }

    StatementKind parse_next() {
        take();
        Next n;
        if (peek().kind == TokenKind::Identifier) n.counter = take().text;
        expect_end("Write Next on its own, or Next followed by the loop counter, e.g. Next i");
        return n;
    }

    StatementKind parse_if() {
        take();
        IfHeader h;
        h.condition = parse_expr();
        expect(TokenKind::KwThen, "after the condition", "End the condition with Then, e.g. If sum > 10 Then");
        if (peek().kind != TokenKind::EndOfLine)
            error(peek(), "a statement cannot follow Then on the same line",
                  "Move it to the next line and close the block with End If");
        return h;
    }

    StatementKind parse_else() {
        take();
        if (peek().kind == TokenKind::KwIf)
            error(peek(), "Else If is not supported",
                  "Write Else on its own line and put a new If ... End If block inside it");
        expect_end("Write Else on its own line");
        return ElseMarker{};
    }

    StatementKind parse_end() {
        take();
        expect(TokenKind::KwIf, "after 'End'", "Close an If block with End If");
        expect_end("Write End If on its own line");
        return EndIfMarker{};
    }

    StatementKind parse_msgbox() {
        take();
        Output o;
        if (peek().kind == TokenKind::EndOfLine)
            error(peek(), "MsgBox needs something to display",
                  "Put the message in parentheses, e.g. MsgBox(\"The sum is\" + sum)");
        o.value = parse_expr();
        expect_end("Join texts with +, e.g. MsgBox(\"The sum is\" + sum)");
        return o;
    }

    StatementKind parse_assign() {
        const Token& name_tok = take();
        if (ascii_lower(name_tok.text) == "endif")
            error(name_tok, "'EndIf' is written as two words", "Write End If");
        if (ascii_lower(name_tok.text) == "elseif")
            error(name_tok, "ElseIf is not supported",
                  "Write Else on its own line and put a new If ... End If block inside it");
        Assign a;
        a.target.name = name_tok.text;
        a.target.column = name_tok.column;
        if (accept(TokenKind::LParen)) {
            a.target.index = parse_expr();
            expect(TokenKind::RParen, "after the element index",
                   "Close the index with ), e.g. " + name_tok.text + "(0) = 5");
        }
        expect(TokenKind::Equal, "after '" + format_lvalue(a.target) + "'",
               "Write an assignment like " + name_tok.text + " = 0");
        if (peek().kind == TokenKind::EndOfLine)
            error(peek(), "the assignment has no value after '='",
                  "Give a value, e.g. " + name_tok.text + " = 0");
        a.value = parse_expr();
        expect_end("Write one assignment per line, e.g. " + name_tok.text + " = " + name_tok.text + " + 1");
        return a;
    }

    static std::optional<BinaryOp> comparison_op(TokenKind k) {
        switch (k) {
            case TokenKind::Equal: return BinaryOp::Eq;
            case TokenKind::NotEqual: return BinaryOp::Ne;
            case TokenKind::Less: return BinaryOp::Lt;
            case TokenKind::LessEqual: return BinaryOp::Le;
            case TokenKind::Greater: return BinaryOp::Gt;
            case TokenKind::GreaterEqual: return BinaryOp::Ge;
            default: return std::nullopt;
        }
    }

    struct DepthGuard {
        int& depth;
        explicit DepthGuard(int& d) : depth(d) { ++depth; }
        ~DepthGuard() { --depth; }
    };

    Expr parse_expr() {
        DepthGuard guard(depth_);
        if (depth_ > kMaxDepth)
            error(peek(), "this expression is nested too deeply",
                  "Split it into smaller steps using extra variables");
        Expr lhs = parse_additive();
        while (auto op = comparison_op(peek().kind)) {
            const int col = take().column;
            Expr rhs = parse_additive();
            lhs = Expr::binary(*op, std::move(lhs), std::move(rhs), col);
        }
        return lhs;
    }

    Expr parse_additive() {
        Expr lhs = parse_multiplicative();
        for (;;) {
            BinaryOp op;
            if (peek().kind == TokenKind::Plus) op = BinaryOp::Add;
            else if (peek().kind == TokenKind::Minus) op = BinaryOp::Sub;
            else break;
            const int col = take().column;
            Expr rhs = parse_multiplicative();
            lhs = Expr::binary(op, std::move(lhs), std::move(rhs), col);
        }
        return lhs;
    }

    Expr parse_multiplicative() {
        Expr lhs = parse_unary();
        for (;;) {
            BinaryOp op;
            if (peek().kind == TokenKind::Star) op = BinaryOp::Mul;
            else if (peek().kind == TokenKind::Backslash) op = BinaryOp::IntDiv;
            else if (peek().kind == TokenKind::KwMod) op = BinaryOp::Mod;
            else break;
            const int col = take().column;
            Expr rhs = parse_unary();
            lhs = Expr::binary(op, std::move(lhs), std::move(rhs), col);
        }
        return lhs;
    }

    Expr parse_unary() {
        if (peek().kind == TokenKind::Minus) {
            DepthGuard guard(depth_);
            if (depth_ > kMaxDepth)
                error(peek(), "this expression is nested too deeply",
                      "Split it into smaller steps using extra variables");
            const int col = take().column;
            return Expr::negate(parse_unary(), col);
        }
        return parse_primary();
    }

    Expr parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokenKind::Integer: take(); return Expr::integer(t.number, t.column);
            case TokenKind::String: take(); return Expr::string(t.text, t.column);
            case TokenKind::Identifier: {
                take();
                if (accept(TokenKind::LParen)) {
                    Expr index = parse_expr();
                    expect(TokenKind::RParen, "after the element index",
                           "Close the index with ), e.g. " + t.text + "(0)");
                    return Expr::element(t.text, std::move(index), t.column);
                }
                return Expr::variable(t.text, t.column);
            }
            case TokenKind::KwInputBox: {
                take();
                expect(TokenKind::LParen, "after 'InputBox'",
                       "Put the prompt in parentheses, e.g. InputBox(\"Input number\")");
                Expr prompt = parse_expr();
                expect(TokenKind::RParen, "after the prompt",
                       "Close the prompt with ), e.g. InputBox(\"Input number\")");
                return Expr::input_box(std::move(prompt), t.column);
            }
            case TokenKind::LParen: {
                take();
                Expr inner = parse_expr();
                expect(TokenKind::RParen, "to close the parenthesis", "Add the missing )");
                return inner;
            }
            case TokenKind::EndOfLine:
                error(t, "expected a value but the line ended",
                      "Finish the expression with a number, a text in quotes or a variable name");
            default:
                if (t.kind >= TokenKind::KwDim && t.kind <= TokenKind::KwMod)
                    error(t, "'" + t.text + "' is a reserved word and cannot be used as a value",
                          "Use a number, a text in quotes or a declared variable name");
                error(t, "expected a value but found " + found(t),
                      "Use a number, a text in quotes or a variable name, e.g. sum + 1");
        }
    }

    std::vector<Token> tokens_;
    static constexpr int kMaxDepth = 200;

    std::size_t pos_ = 0;
    int line_;
    int depth_ = 0;
};

inline bool is_blank_or_comment(const std::vector<Token>& tokens) {
    return tokens.size() == 1 && tokens.front().kind == TokenKind::EndOfLine;
}

}  // namespace detail

/// Parses one statement per non-blank, non-comment line. Errors are collected
/// per line and parsing resumes at the next line.
inline ParseResult parse(const SourceProgram& source) {
    ParseResult result;
    for (const auto& line : source.lines()) {
        LineTokens lexed = lex_line(line.raw, line.number);
        if (!lexed.diagnostics.empty()) {
            for (auto& d : lexed.diagnostics) result.diagnostics.push_back(std::move(d));
            continue;
        }
        if (detail::is_blank_or_comment(lexed.tokens)) continue;
        try {
            detail::LineParser parser(std::move(lexed.tokens), line.number);
            result.statements.push_back(parser.parse_statement());
        } catch (const detail::SyntaxError& e) {
            result.diagnostics.push_back(e.diagnostic);
        }
    }
    sort_diagnostics(result.diagnostics);
    return result;
}

inline ParseResult parse(std::string text) { return parse(SourceProgram(std::move(text))); }

}  // namespace mtlviz

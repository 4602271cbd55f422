#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtlviz/source.hpp"

namespace mtlviz {

enum class TokenKind {
    Identifier,
    Integer,
    String,
    // keywords
    KwDim, KwAs, KwInteger, KwString, KwFor, KwTo, KwStep, KwNext,
    KwIf, KwThen, KwElse, KwEnd, KwInputBox, KwMsgBox, KwMod,
    // punctuation and operators
    LParen, RParen, Plus, Minus, Star, Backslash,
    Equal, NotEqual, Less, LessEqual, Greater, GreaterEqual,
    EndOfLine,
};

struct Token {
    TokenKind kind = TokenKind::EndOfLine;
    std::string text;         // identifier spelling, string literal value, or lexeme
    std::int64_t number = 0;  // Integer tokens
    int column = 1;
};

inline std::string_view describe(TokenKind k) {
    switch (k) {
        case TokenKind::Identifier: return "a name";
        case TokenKind::Integer: return "a number";
        case TokenKind::String: return "a text in quotes";
        case TokenKind::KwDim: return "'Dim'";
        case TokenKind::KwAs: return "'As'";
        case TokenKind::KwInteger: return "'Integer'";
        case TokenKind::KwString: return "'String'";
        case TokenKind::KwFor: return "'For'";
        case TokenKind::KwTo: return "'To'";
        case TokenKind::KwStep: return "'Step'";
        case TokenKind::KwNext: return "'Next'";
        case TokenKind::KwIf: return "'If'";
        case TokenKind::KwThen: return "'Then'";
        case TokenKind::KwElse: return "'Else'";
        case TokenKind::KwEnd: return "'End'";
        case TokenKind::KwInputBox: return "'InputBox'";
        case TokenKind::KwMsgBox: return "'MsgBox'";
        case TokenKind::KwMod: return "'Mod'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Backslash: return "'\\'";
        case TokenKind::Equal: return "'='";
        case TokenKind::NotEqual: return "'<>'";
        case TokenKind::Less: return "'<'";
        case TokenKind::LessEqual: return "'<='";
        case TokenKind::Greater: return "'>'";
        case TokenKind::GreaterEqual: return "'>='";
        case TokenKind::EndOfLine: return "the end of the line";
    }
    return "?";
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline std::optional<TokenKind> keyword_kind(std::string_view word) {
    static constexpr std::pair<std::string_view, TokenKind> table[] = {
        {"dim", TokenKind::KwDim},       {"as", TokenKind::KwAs},
        {"integer", TokenKind::KwInteger}, {"string", TokenKind::KwString},
        {"for", TokenKind::KwFor},       {"to", TokenKind::KwTo},
        {"step", TokenKind::KwStep},     {"next", TokenKind::KwNext},
        {"if", TokenKind::KwIf},         {"then", TokenKind::KwThen},
        {"else", TokenKind::KwElse},     {"end", TokenKind::KwEnd},
        {"inputbox", TokenKind::KwInputBox}, {"msgbox", TokenKind::KwMsgBox},
        {"mod", TokenKind::KwMod},
    };
    const std::string lower = ascii_lower(word);
    for (const auto& [name, kind] : table)
        if (name == lower) return kind;
    return std::nullopt;
}

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

/// Identifier lexical rule: a letter, then letters, digits or underscores,
/// and not a keyword.
inline bool is_valid_identifier(std::string_view s) {
    if (s.empty() || !is_ident_start(s.front())) return false;
    for (char c : s)
        if (!is_ident_char(c)) return false;
    return !keyword_kind(s).has_value();
}

struct LineTokens {
    std::vector<Token> tokens;  // always terminated by EndOfLine
    Diagnostics diagnostics;
};

/// Tokenizes one source line. Columns count code points, starting at 1.
/// A lexical error stops the line; the token list is still terminated.
inline LineTokens lex_line(std::string_view text, int line_number) {
    LineTokens out;
    std::size_t i = 0;
    int column = 1;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++column;
        }
    };
    auto fail = [&](int col, std::string message, std::string suggestion) {
        out.diagnostics.push_back(
            {Severity::Error, line_number, col, std::move(message), std::move(suggestion)});
    };
    auto push = [&](TokenKind k, std::string lexeme, int col) {
        Token t;
        t.kind = k;
        t.text = std::move(lexeme);
        t.column = col;
        out.tokens.push_back(std::move(t));
    };

    while (i < text.size()) {
        const char c = text[i];
        const int start_col = column;
        if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
            advance(1);
            continue;
        }
        if (c == '\'') break;  // comment to end of line
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            std::string word(text.substr(i, j - i));
            advance(j - i);
            if (auto kw = keyword_kind(word))
                push(*kw, std::move(word), start_col);
            else
                push(TokenKind::Identifier, std::move(word), start_col);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            std::string digits(text.substr(i, j - i));
            advance(j - i);
            if (j < text.size() && is_ident_char(text[j])) {
                fail(start_col, "a name cannot start with a digit",
                     "Start names with a letter, e.g. x1 instead of 1x");
                break;
            }
            std::int64_t value = 0;
            bool overflow = false;
            for (char d : digits) {
                if (__builtin_mul_overflow(value, 10, &value) ||
                    __builtin_add_overflow(value, d - '0', &value)) {
                    overflow = true;
                    break;
                }
            }
            if (overflow) {
                fail(start_col, "the number " + digits + " is too large",
                     "Use a whole number no larger than 9223372036854775807");
                break;
            }
            Token t;
            t.kind = TokenKind::Integer;
            t.text = std::move(digits);
            t.number = value;
            t.column = start_col;
            out.tokens.push_back(std::move(t));
            continue;
        }
        if (c == '"') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < text.size()) {
                if (text[j] == '"') {
                    if (j + 1 < text.size() && text[j + 1] == '"') {
                        value += '"';
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                value += text[j++];
            }
            if (!closed) {
                fail(start_col, "this text is missing its closing quote",
                     "Add a \" at the end of the text, e.g. \"Input number\"");
                break;
            }
            advance(j - i);
            push(TokenKind::String, std::move(value), start_col);
            continue;
        }
        auto two = text.substr(i, 2);
        if (two == "<>") { push(TokenKind::NotEqual, "<>", start_col); advance(2); continue; }
        if (two == "<=") { push(TokenKind::LessEqual, "<=", start_col); advance(2); continue; }
        if (two == ">=") { push(TokenKind::GreaterEqual, ">=", start_col); advance(2); continue; }
        std::optional<TokenKind> single;
        switch (c) {
            case '(': single = TokenKind::LParen; break;
            case ')': single = TokenKind::RParen; break;
            case '+': single = TokenKind::Plus; break;
            case '-': single = TokenKind::Minus; break;
            case '*': single = TokenKind::Star; break;
            case '\\': single = TokenKind::Backslash; break;
            case '=': single = TokenKind::Equal; break;
            case '<': single = TokenKind::Less; break;
            case '>': single = TokenKind::Greater; break;
            default: break;
        }
        if (single) {
            push(*single, std::string(1, c), start_col);
            advance(1);
            continue;
        }
        std::string shown;
        if (c == '/')
            fail(start_col, "'/' is not an operator here",
                 "Use \\ for whole-number division, e.g. total \\ 2");
        else if (c == '&')
            fail(start_col, "'&' is not an operator here",
                 "Use + to join texts, e.g. \"Total: \" + sum");
        else if (c == ';' || c == ':')
            fail(start_col, std::string("unexpected '") + c + "'",
                 "Write one statement per line without separators");
        else {
            std::size_t len = 1;
            const auto b = static_cast<unsigned char>(c);
            if (b >= 0xF0) len = 4;
            else if (b >= 0xE0) len = 3;
            else if (b >= 0xC0) len = 2;
            shown = std::string(text.substr(i, len));
            fail(start_col, "unexpected character '" + shown + "'",
                 "Remove it; names use letters, digits and _, and texts go inside quotes");
        }
        break;
    }
    Token eol;
    eol.kind = TokenKind::EndOfLine;
    eol.column = column;
    out.tokens.push_back(std::move(eol));
    return out;
}

}  // namespace mtlviz

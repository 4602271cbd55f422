#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtlviz/lexer.hpp"
#include "mtlviz/parser.hpp"

namespace mtlviz {

// ==============================================================================
// Snippet generation for the controls window
// ==============================================================================
//
// Each control turns a flat string map of parameters into ready-to-insert
// lines. Required keys per kind:
//   declaration  name, type            (optional: bound -> array form)
//   assignment   target, expr
//   data_input   target, prompt
//   data_output  expr
//   condition    condition             (optional: else = true|false)
//   looping      counter, from, to     (optional: step)
//   insert_text  text

enum class SnippetKind { Declaration, Assignment, DataInput, DataOutput, ConditionStatement, LoopingStatement, InsertText };

inline constexpr SnippetKind kAllSnippetKinds[] = {
    SnippetKind::Declaration, SnippetKind::Assignment,         SnippetKind::DataInput,
    SnippetKind::DataOutput,  SnippetKind::ConditionStatement, SnippetKind::LoopingStatement,
    SnippetKind::InsertText,
};

inline const char* to_string(SnippetKind k) {
    switch (k) {
        case SnippetKind::Declaration: return "declaration";
        case SnippetKind::Assignment: return "assignment";
        case SnippetKind::DataInput: return "data_input";
        case SnippetKind::DataOutput: return "data_output";
        case SnippetKind::ConditionStatement: return "condition";
        case SnippetKind::LoopingStatement: return "looping";
        case SnippetKind::InsertText: return "insert_text";
    }
    return "?";
}

/// Accepts the canonical names, with '-' in place of '_' also allowed.
inline std::optional<SnippetKind> parse_snippet_kind(std::string_view text) {
    std::string s = ascii_lower(text);
    for (char& c : s)
        if (c == '-') c = '_';
    for (SnippetKind k : kAllSnippetKinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

using SnippetParams = std::map<std::string, std::string>;

struct SnippetRequest {
    SnippetKind kind = SnippetKind::InsertText;
    SnippetParams params;
};

/// Caret position after insertion: 0-based line offset into the snippet and
/// 1-based column.
struct CursorHint {
    int line_offset = 0;
    int column = 1;

    bool operator==(const CursorHint&) const = default;
};

struct Snippet {
    std::vector<std::string> lines;
    CursorHint cursor_hint;

    bool operator==(const Snippet&) const = default;
};

struct SnippetError {
    std::string param;  // offending key, empty when not tied to one
    std::string message;
    std::string suggestion;
};

using SnippetResult = std::variant<Snippet, SnippetError>;

namespace detail {

struct SnippetFailure {
    SnippetError error;
};

class SnippetBuilder {
public:
    explicit SnippetBuilder(const SnippetRequest& req) : req_(req) {}

    Snippet build() {
        switch (req_.kind) {
            case SnippetKind::Declaration: return declaration();
            case SnippetKind::Assignment: {
                const std::string target = lvalue("target");
                return single(target + " = " + expression("expr", "sum + 1"));
            }
            case SnippetKind::DataInput: {
                const std::string target = lvalue("target");
                return single(target + " = InputBox(" + quote(require("prompt", "Input number")) + ")");
            }
            case SnippetKind::DataOutput: return single("MsgBox(" + expression("expr", "\"The sum is\" + sum") + ")");
            case SnippetKind::ConditionStatement: {
                const std::string cond = expression("condition", "sum > 10");
                std::vector<std::string> lines{"If " + cond + " Then"};
                if (flag("else")) lines.push_back("Else");
                lines.push_back("End If");
                validate(lines.front(), "condition", "sum > 10");
                return {lines, {1, 1}};
            }
            case SnippetKind::LoopingStatement: {
                const std::string counter = identifier("counter", "i");
                const std::string from = expression("from", "0");
                const std::string to = expression("to", "1");
                std::string head = "For " + counter + " As Integer = " + from + " To " + to;
                if (auto step = optional("step")) head += " Step " + checked_expression(*step, "step", "1");
                validate(head, "from", "0");
                return {{head, "Next"}, {1, 1}};
            }
            case SnippetKind::InsertText: {
                const std::string& text = require("text", "sum = 0");
                std::vector<std::string> lines;
                std::size_t pos = 0;
                for (;;) {
                    std::size_t nl = text.find('\n', pos);
                    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    lines.push_back(std::move(line));
                    if (nl == std::string::npos) break;
                    pos = nl + 1;
                }
                const int last = static_cast<int>(lines.size()) - 1;
                return {lines, {last, static_cast<int>(text_width(lines.back())) + 1}};
            }
        }
        return {};
    }

private:
    [[noreturn]] static void fail(std::string param, std::string message, std::string suggestion) {
        throw SnippetFailure{{std::move(param), std::move(message), std::move(suggestion)}};
    }

    static std::size_t text_width(std::string_view s) {
        std::size_t n = 0;
        for (char c : s)
            if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
        return n;
    }

    static std::string quote(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    }

    const std::string& require(const std::string& key, const std::string& example) const {
        auto it = req_.params.find(key);
        if (it == req_.params.end())
            fail(key, std::string("the ") + to_string(req_.kind) + " control needs a '" + key + "' parameter",
                 "Provide " + key + ", e.g. " + key + "=" + example);
        return it->second;
    }

    std::optional<std::string> optional(const std::string& key) const {
        auto it = req_.params.find(key);
        if (it == req_.params.end() || trim(it->second).empty()) return std::nullopt;
        return trim(it->second);
    }

    bool flag(const std::string& key) const {
        auto v = optional(key);
        if (!v) return false;
        const std::string lower = ascii_lower(*v);
        if (lower == "true" || lower == "yes" || lower == "1") return true;
        if (lower == "false" || lower == "no" || lower == "0") return false;
        fail(key, "'" + *v + "' is not a yes/no value for " + key, "Use " + key + "=true or " + key + "=false");
    }

    std::string identifier(const std::string& key, const std::string& example) const {
        const std::string name = trim(require(key, example));
        if (name.empty()) fail(key, "the " + key + " is empty", "Type a name such as " + example);
        if (keyword_kind(name))
            fail(key, "'" + name + "' is a reserved word and cannot be used as a name",
                 "Choose a different name, e.g. " + example);
        if (!is_valid_identifier(name))
            fail(key, "'" + name + "' is not a valid name",
                 "Names start with a letter and use only letters, digits and _, e.g. " + example);
        return name;
    }

    /// Parses `line` on its own and reports the first syntax error against `key`.
    static void validate(const std::string& line, const std::string& key, const std::string& example) {
        ParseResult r = parse(line);
        if (!r.ok())
            fail(key, "the generated line '" + line + "' is not valid: " + r.diagnostics.front().message,
                 r.diagnostics.front().suggestion.empty() ? "Check the value of " + key + ", e.g. " + example
                                                          : r.diagnostics.front().suggestion);
    }

    std::string checked_expression(const std::string& text, const std::string& key, const std::string& example) const {
        if (text.empty()) fail(key, "the " + key + " is empty", "Type a value such as " + example);
        // parse as the right side of a throwaway assignment
        ParseResult r = parse("x = " + text);
        if (!r.ok() || r.statements.size() != 1)
            fail(key, "'" + text + "' is not a valid expression" +
                          (r.diagnostics.empty() ? std::string() : ": " + r.diagnostics.front().message),
                 "Write a value such as " + example);
        return text;
    }

    std::string expression(const std::string& key, const std::string& example) const {
        return checked_expression(trim(require(key, example)), key, example);
    }

    std::string lvalue(const std::string& key) const {
        const std::string text = trim(require(key, "sum"));
        if (text.empty()) fail(key, "the " + key + " is empty", "Type a variable name such as sum or num(0)");
        ParseResult r = parse(text + " = 0");
        if (!r.ok() || r.statements.size() != 1)
            fail(key, "'" + text + "' is not a variable or array element",
                 "Use a name such as sum, or an element such as num(i)");
        return text;
    }

    Snippet single(std::string line) const {
        validate(line, "", "");
        const int col = static_cast<int>(text_width(line)) + 1;
        return {{std::move(line)}, {0, col}};
    }

    Snippet declaration() const {
        const std::string name = identifier("name", "sum");
        const std::string type_text = trim(require("type", "Integer"));
        const std::string lower = ascii_lower(type_text);
        std::string type;
        if (lower == "integer") type = "Integer";
        else if (lower == "string") type = "String";
        else fail("type", "'" + type_text + "' is not a type", "Use type=Integer or type=String");
        if (auto bound = optional("bound")) {
            const std::string b = checked_expression(*bound, "bound", "1");
            return single("Dim " + name + "(" + b + ") As " + type);
        }
        return single("Dim " + name + " As " + type);
    }

    const SnippetRequest& req_;
};

}  // namespace detail

inline SnippetResult generate_snippet(const SnippetRequest& request) {
    try {
        return detail::SnippetBuilder(request).build();
    } catch (const detail::SnippetFailure& f) {
        return f.error;
    }
}

}  // namespace mtlviz

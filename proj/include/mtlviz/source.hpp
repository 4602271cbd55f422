#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mtlviz {

// ==============================================================================
// Source text and diagnostics
// ==============================================================================

struct SourceLine {
    int number = 0;          // 1-based
    std::string raw;         // line content without its terminator
    std::string terminator;  // "\n", "\r\n" or "" for an unterminated last line
};

/// A program listing split into numbered lines. Concatenating every
/// `raw + terminator` reproduces `text` exactly.
class SourceProgram {
public:
    SourceProgram() = default;

    explicit SourceProgram(std::string text) : text_(std::move(text)) {
        std::size_t pos = 0;
        int number = 1;
        while (pos < text_.size()) {
            std::size_t nl = text_.find('\n', pos);
            SourceLine line;
            line.number = number++;
            if (nl == std::string::npos) {
                line.raw = text_.substr(pos);
                pos = text_.size();
            } else {
                std::size_t end = nl;
                if (end > pos && text_[end - 1] == '\r') {
                    --end;
                    line.terminator = "\r\n";
                } else {
                    line.terminator = "\n";
                }
                line.raw = text_.substr(pos, end - pos);
                pos = nl + 1;
            }
            lines_.push_back(std::move(line));
        }
    }

    const std::string& text() const { return text_; }
    const std::vector<SourceLine>& lines() const { return lines_; }

    /// Raw text of a 1-based line, or empty when out of range.
    std::string_view line_text(int number) const {
        if (number < 1 || number > static_cast<int>(lines_.size())) return {};
        return lines_[static_cast<std::size_t>(number - 1)].raw;
    }

    std::string reassemble() const {
        std::string out;
        out.reserve(text_.size());
        for (const auto& l : lines_) {
            out += l.raw;
            out += l.terminator;
        }
        return out;
    }

private:
    std::string text_;
    std::vector<SourceLine> lines_;
};

enum class Severity { Error, Warning };

inline std::string_view to_string(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

/// A novice-facing message. Error diagnostics always carry a suggestion.
struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 0;
    int column = 1;
    std::string message;
    std::string suggestion;

    bool operator==(const Diagnostic&) const = default;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

/// Orders by line, then column. Stable, so same-position diagnostics keep
/// their discovery order.
inline void sort_diagnostics(Diagnostics& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.line != b.line) return a.line < b.line;
        return a.column < b.column;
    });
}

/// "line:col: error: <message> (hint: <suggestion>)"
inline std::string format_diagnostic(const Diagnostic& d) {
    std::string out = std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
                      std::string(to_string(d.severity)) + ": " + d.message;
    if (!d.suggestion.empty()) out += " (hint: " + d.suggestion + ")";
    return out;
}

}  // namespace mtlviz

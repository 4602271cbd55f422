#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtlviz/mtlviz.hpp"

namespace mtltest {

namespace fs = std::filesystem;

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

/// The worked example: sums two numbers read through InputBox.
inline const std::vector<std::string> kSumInputs = {"409", "91"};
inline const std::vector<int> kSumLines = {1, 2, 3, 4, 5, 6, 7, 4, 5, 6, 7, 4, 8};

/// A corpus program plus the inputs from its optional "<name>.inputs" sidecar
/// (one raw input per line).
struct CorpusProgram {
    std::string name;
    fs::path path;
    std::string source;
    std::vector<std::string> inputs;
};

inline std::vector<std::string> read_inputs(const fs::path& sidecar) {
    std::vector<std::string> out;
    if (!fs::exists(sidecar)) return out;
    std::istringstream in(read_text(sidecar));
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

inline std::vector<CorpusProgram> load_corpus(const fs::path& test_dir) {
    std::vector<CorpusProgram> out;
    for (const auto& entry : fs::directory_iterator(test_dir / "corpus")) {
        if (entry.path().extension() != ".mtl") continue;
        CorpusProgram p;
        p.name = entry.path().stem().string();
        p.path = entry.path();
        p.source = read_text(entry.path());
        p.inputs = read_inputs(fs::path(entry.path()).replace_extension(".inputs"));
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

inline mtlviz::CheckedProgram must_compile(const std::string& source) {
    mtlviz::CheckResult r = mtlviz::compile(source);
    if (!r.ok()) {
        std::string msg = "program does not check:";
        for (const auto& d : r.diagnostics) msg += "\n  " + mtlviz::format_diagnostic(d);
        throw std::runtime_error(msg);
    }
    return std::move(*r.program);
}

/// Drives a line-by-line session by hand, supplying each input only when the
/// session asks for it.
inline mtlviz::Trace step_manually(const mtlviz::CheckedProgram& program, const std::vector<std::string>& inputs,
                                   std::size_t step_cap = mtlviz::kDefaultStepCap) {
    using namespace mtlviz;
    Session s(program, ExecutionMode::LineByLine, {}, step_cap);
    std::size_t next_input = 0;
    for (;;) {
        StepResult r = s.step();
        if (std::holds_alternative<TraceStep>(r)) continue;
        if (std::holds_alternative<AwaitingInput>(r) && next_input < inputs.size()) {
            s.provide_input(inputs[next_input++]);
            continue;
        }
        break;
    }
    return s.trace();
}

inline mtlviz::Trace run_complete(const mtlviz::CheckedProgram& program, const std::vector<std::string>& inputs,
                                  std::size_t step_cap = mtlviz::kDefaultStepCap) {
    mtlviz::Session s(program, mtlviz::ExecutionMode::CompleteRun, inputs, step_cap);
    return s.run_to_end();
}

/// Returns a description of the first monotonicity violation, or "" if the
/// trace only ever appends cells and never turns a value back into RESERVED.
inline std::string monotone_violation(const mtlviz::Trace& trace) {
    const mtlviz::RamSnapshot* prev = nullptr;
    mtlviz::RamSnapshot empty;
    prev = &empty;
    for (const auto& step : trace.steps) {
        const auto& cur = step.ram_after;
        if (cur.size() < prev->size()) return "step " + std::to_string(step.index) + " removed cells";
        for (std::size_t i = 0; i < prev->size(); ++i) {
            if (cur.cells[i].name != prev->cells[i].name)
                return "step " + std::to_string(step.index) + " reordered cell " + prev->cells[i].name;
            if (!prev->cells[i].state.is_reserved() && cur.cells[i].state.is_reserved())
                return "step " + std::to_string(step.index) + " reset " + cur.cells[i].name + " to RESERVED";
        }
        prev = &cur;
    }
    return {};
}

}  // namespace mtltest

#include "depfix/prompts.hpp"

#include <cstdint>
#include <cstdio>

namespace depfix {

std::string to_string(Origin origin) {
    return origin == Origin::outdated ? "O" : "U";
}

std::string PromptSample::prompt_text() const {
    std::string out;
    for (std::size_t i = 0; i < prompt_lines.size(); ++i) {
        if (i) out += '\n';
        out += prompt_lines[i];
    }
    return out;
}

std::string stable_id(const std::string& file, const std::string& function, int reference_line) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        h ^= 0x1f;
        h *= 0x100000001b3ull;
    };
    mix(file);
    mix(function);
    mix(std::to_string(reference_line));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<PromptSample> build_prompt(const MatchedFunction& m, PromptRejection* rejection) {
    const SourceFunction& fn = m.function;
    int ref_idx = m.reference_call.line - fn.span_start;  // 0-based into source_lines
    if (ref_idx < 0 || ref_idx >= static_cast<int>(fn.source_lines.size())) {
        if (rejection)
            *rejection = {fn.file, fn.qualified_name, m.reference_call.line,
                          "reference line outside function span"};
        return std::nullopt;
    }
    if (ref_idx == 0) {
        if (rejection)
            *rejection = {fn.file, fn.qualified_name, m.reference_call.line, "empty prompt"};
        return std::nullopt;
    }

    PromptSample s;
    s.id = stable_id(fn.file, fn.qualified_name, m.reference_call.line);
    s.prompt_lines.assign(fn.source_lines.begin(), fn.source_lines.begin() + ref_idx);
    s.mapping = m.mapping;
    s.origin = m.kind == MatchKind::outdated ? Origin::outdated : Origin::up_to_dated;
    s.ground_truth_line = fn.source_lines[ref_idx];
    s.context_imports = m.context_imports;
    s.file = fn.file;
    s.function = fn.qualified_name;
    s.reference_line = m.reference_call.line;
    return s;
}

std::pair<PromptDataset, PromptDataset> partition(const std::vector<PromptSample>& samples) {
    PromptDataset outdated{.samples = {}, .label = "O"};
    PromptDataset up_to_dated{.samples = {}, .label = "U"};
    for (const auto& s : samples)
        (s.origin == Origin::outdated ? outdated : up_to_dated).samples.push_back(s);
    return {std::move(outdated), std::move(up_to_dated)};
}

}  // namespace depfix

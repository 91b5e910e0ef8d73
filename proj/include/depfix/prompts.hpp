// Conversion of matched functions into line-level completion prompts and
// partitioning into the outdated / up-to-dated datasets.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depfix/resolver.hpp"

namespace depfix {

enum class Origin { outdated, up_to_dated };

std::string to_string(Origin origin);

struct PromptSample {
    std::string id;  // stable hash of (file, function, reference line)
    std::vector<std::string> prompt_lines;  // function lines before the invocation line
    ApiMapping mapping;
    Origin origin;
    std::string ground_truth_line;  // the reference invocation line, verbatim
    std::vector<std::string> context_imports;  // for annotation only, never sent to the LLM
    std::string file;
    std::string function;
    int reference_line = 0;  // 1-based file line

    std::string prompt_text() const;  // prompt_lines joined with '\n'
};

struct PromptRejection {
    std::string file;
    std::string function;
    int reference_line = 0;
    std::string reason;
};

/// Stable 64-bit FNV-1a hash, hex-rendered; used for sample ids.
std::string stable_id(const std::string& file, const std::string& function, int reference_line);

/// Builds a prompt from a matched function. Returns nullopt (with the
/// rejection reason) when the reference call sits on the first function
/// line, which would leave an empty prompt.
std::optional<PromptSample> build_prompt(const MatchedFunction& m,
                                         PromptRejection* rejection = nullptr);

struct PromptDataset {
    std::vector<PromptSample> samples;
    std::string label;  // "O", "U", or "All"
};

/// Stable partition by origin.
std::pair<PromptDataset, PromptDataset> partition(const std::vector<PromptSample>& samples);

}  // namespace depfix

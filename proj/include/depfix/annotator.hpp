// Classification of completions as good / bad / irrelevant against a
// sample's API mapping, plus the Contains predicate used by the fixer.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depfix/gateway.hpp"
#include "depfix/prompts.hpp"
#include "depfix/resolver.hpp"

namespace depfix {

enum class VerdictLabel { good, bad, irrelevant };

std::string to_string(VerdictLabel label);

struct Verdict {
    VerdictLabel label = VerdictLabel::irrelevant;
    std::optional<ResolvedCall> matched_call;  // present iff label != irrelevant
    bool parse_failed = false;  // completion unparsable even with lenient fallback
    /// Deprecated APIs of OTHER mappings spotted in the completion; informational.
    std::vector<std::string> other_deprecated;
};

inline bool plausible(const Verdict& v) {
    return v.label != VerdictLabel::irrelevant;
}

/// All calls on the completion line, resolved under the sample's context
/// (context imports, prompt lines, completion analyzed as one unit).
/// Line/col of the returned calls index into the completion string.
std::vector<ResolvedCall> resolve_completion_calls(const std::string& completion_line,
                                                   const PromptSample& sample,
                                                   bool* parse_failed = nullptr);

/// Labels a completion against the sample's own mapping. When both the
/// deprecated and the replacement API occur, the first call left-to-right
/// decides. Completions with no mapped API are irrelevant.
Verdict annotate(const Completion& comp, const PromptSample& sample,
                 const MappingSet* all_mappings = nullptr);

/// True iff some call in the completion resolves to `dep` under the
/// sample's import context.
bool contains(const std::string& completion_line, const Fqn& dep, const PromptSample& sample);

}  // namespace depfix

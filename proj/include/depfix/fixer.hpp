// Deprecation-aware completion: detect a deprecated API in a completion
// and repair it via ReplaceAPI (prefix splice + regeneration) or
// InsertPrompt (guidance comments + regeneration).
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depfix/annotator.hpp"
#include "depfix/gateway.hpp"

namespace depfix {

enum class FixStrategy { replace_api, insert_prompt };

std::string to_string(FixStrategy strategy);
FixStrategy fix_strategy_from_string(const std::string& s);

enum class FixStatus { fixed, not_fixed, strategy_unsupported, backend_error };

std::string to_string(FixStatus status);

struct FixOutcome {
    std::string sample_id;
    FixStrategy strategy = FixStrategy::replace_api;
    std::string original_comp;
    std::string fixed_comp;                 // comp*
    std::optional<Verdict> fixed_verdict;   // absent when no fix was produced
    std::string ground_truth_line;
    FixStatus status = FixStatus::not_fixed;
    std::string prefix;           // replace-api only
    std::string inserted_prompt;  // insert-prompt only
    std::string error;            // diagnostic for unsupported/error statuses
};

struct FixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReplacedPrefix {
    std::string prefix;
    bool needs_import = false;  // replacement root not reachable from existing imports
};

/// Cuts `comp` at the start of the deprecated call's callee and splices in
/// the replacement, rendered under the sample's import context (alias
/// preserving). Everything from the callee onward is dropped.
/// Throws FixError when the deprecated callee span cannot be located.
ReplacedPrefix replace_dep(const std::string& comp, const Fqn& dep, const Fqn& rep,
                           const PromptSample& sample);

/// Renders `rep` the way the sample's imports would write it: the longest
/// bound prefix's local name, else the full dotted form (needs_import set).
ReplacedPrefix render_replacement(const Fqn& rep, const PromptSample& sample);

/// The two-comment replacing prompt, indented like the last non-blank
/// prompt line:
///   <indent># {comp}
///   <indent># {dep} is deprecated, use {rep} instead and revise the return
///   value and arguments.
std::string create_rep_pmpt(const std::string& comp, const Fqn& dep, const Fqn& rep,
                            const std::string& pmpt);

/// ReplaceAPI: prefix <- replace_dep; suffix <- LLM(pmpt (+) prefix);
/// comp* = prefix (+) suffix. Fills prefix/fixed_comp/status on `out`.
void fix_replace_api(const std::string& pmpt, const std::string& comp, const Fqn& dep,
                     const Fqn& rep, Backend& backend, const DecodingParams& params,
                     const PromptSample& sample, FixOutcome& out);

/// InsertPrompt: comp* <- LLM(pmpt (+) pmpt'). Works on any backend.
void fix_insert_prompt(const std::string& pmpt, const std::string& comp, const Fqn& dep,
                       const Fqn& rep, Backend& backend, const DecodingParams& params,
                       const PromptSample& sample, FixOutcome& out);

/// Applies one fix strategy to a completion known to contain `dep`, then
/// annotates the result against the sample's own mapping.
FixOutcome run_fix(const PromptSample& sample, const std::string& original_comp,
                   FixStrategy strategy, Backend& backend, const DecodingParams& params);

struct DeprecationAwareResult {
    Completion completion;              // final comp (possibly fixed)
    std::optional<FixOutcome> outcome;  // present when a fix was attempted
    int fix_invocations = 0;            // always 0 or 1
};

/// Algorithm: comp <- LLM(pmpt); iterate mappings in file order; on the
/// first mapping whose deprecated API the completion contains, fix once
/// and break.
DeprecationAwareResult deprecation_aware_complete(const PromptSample& sample,
                                                  const MappingSet& mappings, Backend& backend,
                                                  FixStrategy strategy,
                                                  const DecodingParams& params = {});

/// Evaluation set: the up-to-dated samples whose completion was bad.
std::vector<PromptSample> build_eval_set(const std::vector<PromptSample>& up_to_dated,
                                         const std::vector<Verdict>& verdicts);

}  // namespace depfix

// JSONL stage-file records and their (de)serialization.
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "depfix/annotator.hpp"
#include "depfix/fixer.hpp"
#include "depfix/prompts.hpp"
#include "depfix/resolver.hpp"

namespace depfix {

struct JsonlError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json matched_function_to_json(const MatchedFunction& m);
MatchedFunction matched_function_from_json(const nlohmann::json& obj);

nlohmann::json prompt_sample_to_json(const PromptSample& s);
PromptSample prompt_sample_from_json(const nlohmann::json& obj);

/// Reads a JSONL file; ignores the optional `_header` line. Throws
/// JsonlError naming the offending line on malformed input.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

/// Writes records one per line, preceded by a `_header` line (stage name
/// + timestamp) unless `header` is false.
void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& records,
                 const std::string& stage, bool header);

/// Appends records to an existing file (resume mode).
void append_jsonl(const std::string& path, const std::vector<nlohmann::json>& records);

}  // namespace depfix

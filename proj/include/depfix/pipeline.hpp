// Stage runners behind the CLI: each reads the previous stage's JSONL,
// writes its own, and reports counts and warnings.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "depfix/fixer.hpp"
#include "depfix/gateway.hpp"
#include "depfix/metrics.hpp"

namespace depfix {

struct StageOptions {
    bool header = true;    // emit the timestamp header line
    bool resume = false;   // skip ids already present in the output file
    int concurrency = 4;   // bounded-parallel backend requests
};

struct StageResult {
    std::size_t records_in = 0;
    std::size_t records_out = 0;
    std::size_t skipped = 0;  // resume skips or rejections
    std::vector<std::string> warnings;
    std::map<std::string, std::size_t> counts;  // stage-specific tallies
};

StageResult run_scan(const std::string& corpus_root, const std::string& mappings_path,
                     const std::string& out_path, const std::string& extension = ".py",
                     const StageOptions& options = {});

StageResult run_prompts(const std::string& functions_path, const std::string& out_path,
                        const StageOptions& options = {});

StageResult run_complete(const std::string& prompts_path, Backend& backend,
                         const std::string& out_path, const DecodingParams& params = {},
                         const StageOptions& options = {});

StageResult run_annotate(const std::string& completions_path, const std::string& mappings_path,
                         const std::string& out_path, const StageOptions& options = {});

StageResult run_fix(const std::string& annotated_path, FixStrategy strategy, Backend& backend,
                    const std::string& out_path, const DecodingParams& params = {},
                    const StageOptions& options = {});

/// Renders the metrics report ("json" or "csv") from stage outputs.
/// `fixed_path` may be empty.
std::string run_report(const std::string& annotated_path, const std::string& fixed_path,
                       const std::vector<std::string>& group_by, const std::string& format);

}  // namespace depfix

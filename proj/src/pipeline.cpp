#include "depfix/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <set>

#include "depfix/jsonl.hpp"

namespace depfix {

using nlohmann::json;

namespace {

// resume support: keep only records whose key is not already in the file
std::vector<json> apply_resume(const std::string& out_path, std::vector<json> records,
                               const std::function<std::string(const json&)>& key,
                               StageResult& result, bool resume) {
    if (!resume || !std::filesystem::exists(out_path)) return records;
    std::set<std::string> existing;
    for (const json& r : read_jsonl(out_path)) existing.insert(key(r));
    std::vector<json> fresh;
    for (json& r : records) {
        if (existing.count(key(r)))
            ++result.skipped;
        else
            fresh.push_back(std::move(r));
    }
    return fresh;
}

void emit(const std::string& out_path, std::vector<json> records, const std::string& stage,
          const StageOptions& options, StageResult& result,
          const std::function<std::string(const json&)>& key) {
    records = apply_resume(out_path, std::move(records), key, result, options.resume);
    result.records_out = records.size();
    if (options.resume && std::filesystem::exists(out_path))
        append_jsonl(out_path, records);
    else
        write_jsonl(out_path, records, stage, options.header);
}

std::string id_key(const json& r) {
    return r.value("id", "");
}

}  // namespace

StageResult run_scan(const std::string& corpus_root, const std::string& mappings_path,
                     const std::string& out_path, const std::string& extension,
                     const StageOptions& options) {
    StageResult result;
    MappingSet mappings = load_mappings(mappings_path);
    for (const auto& w : mappings.warnings()) result.warnings.push_back(w);

    ScanResult scan = match_corpus(corpus_root, mappings, extension);
    result.warnings.insert(result.warnings.end(), scan.warnings.begin(), scan.warnings.end());

    std::vector<json> records;
    for (const MatchedFunction& m : scan.matches) {
        ++result.counts[m.mapping.library + "/" + to_string(m.kind)];
        records.push_back(matched_function_to_json(m));
    }
    result.records_in = scan.matches.size();
    emit(out_path, std::move(records), "scan", options, result, [](const json& r) {
        return r.value("file", "") + "|" + r.value("function", "") + "|" +
               std::to_string(r.value("reference_line", 0));
    });
    return result;
}

StageResult run_prompts(const std::string& functions_path, const std::string& out_path,
                        const StageOptions& options) {
    StageResult result;
    std::vector<json> records;
    for (const json& obj : read_jsonl(functions_path)) {
        ++result.records_in;
        MatchedFunction m = matched_function_from_json(obj);
        PromptRejection rejection;
        if (auto sample = build_prompt(m, &rejection)) {
            records.push_back(prompt_sample_to_json(*sample));
        } else {
            ++result.skipped;
            result.warnings.push_back("rejected " + rejection.file + ":" +
                                      std::to_string(rejection.reference_line) + " (" +
                                      rejection.function + "): " + rejection.reason);
        }
    }
    emit(out_path, std::move(records), "prompts", options, result, id_key);
    return result;
}

StageResult run_complete(const std::string& prompts_path, Backend& backend,
                         const std::string& out_path, const DecodingParams& params,
                         const StageOptions& options) {
    StageResult result;
    std::vector<json> inputs = read_jsonl(prompts_path);
    result.records_in = inputs.size();

    // bounded-parallel fan-out; results collected in sample order
    auto one = [&](const json& obj) -> json {
        PromptSample sample = prompt_sample_from_json(obj);
        json out = obj;
        out["params"] = {{"max_new_tokens", params.max_new_tokens},
                         {"strategy", params.strategy},
                         {"temperature", params.temperature}};
        try {
            Completion c = complete(sample.prompt_text(), backend, params, sample.id);
            out["completion"] = c.text;
            out["raw"] = c.raw;
            out["backend"] = c.backend;
            out["truncated"] = c.truncated;
        } catch (const GatewayError& e) {
            out["completion"] = "";
            out["raw"] = "";
            out["backend"] = backend.name();
            out["truncated"] = false;
            out["error"] = e.what();
        }
        return out;
    };

    std::vector<json> records(inputs.size());
    std::size_t window = std::max(1, options.concurrency);
    for (std::size_t base = 0; base < inputs.size(); base += window) {
        std::size_t end = std::min(inputs.size(), base + window);
        std::vector<std::future<json>> futures;
        for (std::size_t i = base; i < end; ++i)
            futures.push_back(std::async(std::launch::async, one, std::cref(inputs[i])));
        for (std::size_t i = base; i < end; ++i) records[i] = futures[i - base].get();
    }
    for (const json& r : records)
        if (r.contains("error"))
            result.warnings.push_back("sample " + r.value("id", "?") + ": " +
                                      r.value("error", ""));

    emit(out_path, std::move(records), "complete", options, result, id_key);
    return result;
}

StageResult run_annotate(const std::string& completions_path, const std::string& mappings_path,
                         const std::string& out_path, const StageOptions& options) {
    StageResult result;
    MappingSet mappings = load_mappings(mappings_path);

    std::vector<json> records;
    for (const json& obj : read_jsonl(completions_path)) {
        ++result.records_in;
        PromptSample sample = prompt_sample_from_json(obj);
        Completion comp;
        comp.text = obj.value("completion", "");
        comp.raw = obj.value("raw", comp.text);
        comp.backend = obj.value("backend", "");
        Verdict v = annotate(comp, sample, &mappings);
        json out = obj;
        out["label"] = to_string(v.label);
        out["matched_fqn"] = v.matched_call && v.matched_call->fqn
                                 ? json(v.matched_call->fqn->dotted())
                                 : json(nullptr);
        out["matched_line_col"] =
            v.matched_call ? json(json::array({v.matched_call->line, v.matched_call->col}))
                           : json(nullptr);
        out["parse_failed"] = v.parse_failed;
        if (!v.other_deprecated.empty()) out["other_deprecated"] = v.other_deprecated;
        ++result.counts[to_string(v.label)];
        records.push_back(std::move(out));
    }
    emit(out_path, std::move(records), "annotate", options, result, id_key);
    return result;
}

StageResult run_fix(const std::string& annotated_path, FixStrategy strategy, Backend& backend,
                    const std::string& out_path, const DecodingParams& params,
                    const StageOptions& options) {
    StageResult result;
    std::vector<json> records;
    for (const json& obj : read_jsonl(annotated_path)) {
        ++result.records_in;
        // evaluation set: up-to-dated samples whose completion was bad
        if (obj.value("label", "") != "bad" || obj.value("origin", "") != "U") continue;
        PromptSample sample = prompt_sample_from_json(obj);
        FixOutcome out = run_fix(sample, obj.value("completion", ""), strategy, backend, params);
        json rec;
        rec["id"] = out.sample_id;
        rec["strategy"] = to_string(out.strategy);
        rec["original_completion"] = out.original_comp;
        if (strategy == FixStrategy::replace_api) rec["prefix"] = out.prefix;
        if (strategy == FixStrategy::insert_prompt) rec["inserted_prompt"] = out.inserted_prompt;
        rec["fixed_completion"] = out.fixed_comp;
        rec["fixed_label"] =
            out.fixed_verdict ? json(to_string(out.fixed_verdict->label)) : json(nullptr);
        rec["status"] = to_string(out.status);
        if (!out.error.empty()) rec["error"] = out.error;
        rec["ground_truth_line"] = out.ground_truth_line;
        rec["backend"] = backend.name();
        rec["library"] = sample.mapping.library;
        rec["origin"] = to_string(sample.origin);
        ++result.counts[to_string(out.status)];
        records.push_back(std::move(rec));
    }
    emit(out_path, std::move(records), "fix", options, result, id_key);
    return result;
}

std::string run_report(const std::string& annotated_path, const std::string& fixed_path,
                       const std::vector<std::string>& group_by, const std::string& format) {
    std::vector<AnnotatedRecord> annotated;
    for (const json& obj : read_jsonl(annotated_path)) {
        AnnotatedRecord r;
        r.id = obj.value("id", "");
        r.backend = obj.value("backend", "");
        r.library = obj.value("library", "");
        r.dataset = obj.value("origin", "");
        std::string label = obj.value("label", "irrelevant");
        r.label = label == "good"  ? VerdictLabel::good
                  : label == "bad" ? VerdictLabel::bad
                                   : VerdictLabel::irrelevant;
        annotated.push_back(std::move(r));
    }

    std::vector<FixRecord> fixed;
    if (!fixed_path.empty()) {
        for (const json& obj : read_jsonl(fixed_path)) {
            FixRecord r;
            r.id = obj.value("id", "");
            r.backend = obj.value("backend", "");
            r.library = obj.value("library", "");
            r.dataset = obj.value("origin", "");
            r.strategy = obj.value("strategy", "");
            std::string status = obj.value("status", "not-fixed");
            r.status = status == "fixed"                  ? FixStatus::fixed
                       : status == "strategy-unsupported" ? FixStatus::strategy_unsupported
                       : status == "backend-error"        ? FixStatus::backend_error
                                                          : FixStatus::not_fixed;
            r.fixed_comp = obj.value("fixed_completion", "");
            r.ground_truth = obj.value("ground_truth_line", "");
            fixed.push_back(std::move(r));
        }
    }

    Report report = build_report(annotated, fixed, group_by);
    if (format == "csv") return report_to_csv(report);
    if (format == "json") return report_to_json(report);
    throw UsageError("unknown report format: " + format + " (expected json or csv)");
}

}  // namespace depfix

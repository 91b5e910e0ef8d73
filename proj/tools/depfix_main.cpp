// depfix: stage-oriented pipeline CLI.
//   scan -> prompts -> complete -> annotate -> fix -> report
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "depfix/pipeline.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

struct GlobalOpts {
    std::string config_path;
    bool no_header = false;
    bool resume = false;
};

void print_result(const std::string& stage, const depfix::StageResult& r) {
    std::cout << stage << ": " << r.records_out << " records written";
    if (r.skipped) std::cout << ", " << r.skipped << " skipped";
    std::cout << "\n";
    for (const auto& [key, n] : r.counts) std::cout << "  " << key << ": " << n << "\n";
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
}

// run-config file: JSON object of default flag values
nlohmann::json load_config(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw depfix::UsageError("cannot open config file: " + path);
    nlohmann::json doc;
    in >> doc;
    return doc;
}

std::string cfg(const nlohmann::json& config, const std::string& key, const std::string& flag) {
    return flag.empty() ? config.value(key, "") : flag;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deprecated-API detection and repair for LLM line completions"};
    app.require_subcommand(1);

    GlobalOpts global;
    app.add_option("--config", global.config_path, "Run-config JSON with default flag values");
    app.add_flag("--no-header", global.no_header, "Suppress the timestamp header line");
    app.add_flag("--resume", global.resume, "Skip ids already present in the output file");

    std::string corpus, mappings, out, ext = ".py";
    std::string functions, prompts, backend_cfg, backend_name, completions, annotated;
    std::string strategy = "insert-prompt", fixed, format = "json", group_by_csv = "dataset";
    int concurrency = 4, max_tokens = 50;

    auto* scan = app.add_subcommand("scan", "Match corpus functions against API mappings");
    scan->add_option("--corpus", corpus, "Corpus root directory");
    scan->add_option("--mappings", mappings, "API mapping JSON file");
    scan->add_option("--out", out, "Output functions.jsonl");
    scan->add_option("--ext", ext, "Source file extension filter");

    auto* prompts_cmd = app.add_subcommand("prompts", "Build line-level completion prompts");
    prompts_cmd->add_option("--functions", functions, "functions.jsonl from scan");
    prompts_cmd->add_option("--out", out, "Output prompts.jsonl");

    auto* complete_cmd = app.add_subcommand("complete", "Generate completions via a backend");
    complete_cmd->add_option("--prompts", prompts, "prompts.jsonl");
    complete_cmd->add_option("--backend-config", backend_cfg, "Backend config JSON");
    complete_cmd->add_option("--backend", backend_name, "Backend name within the config");
    complete_cmd->add_option("--out", out, "Output completions.jsonl");
    complete_cmd->add_option("--concurrency", concurrency, "Parallel backend requests");
    complete_cmd->add_option("--max-tokens", max_tokens, "Token budget per completion");

    auto* annotate_cmd = app.add_subcommand("annotate", "Label completions good/bad/irrelevant");
    annotate_cmd->add_option("--completions", completions, "completions.jsonl");
    annotate_cmd->add_option("--mappings", mappings, "API mapping JSON file");
    annotate_cmd->add_option("--out", out, "Output annotated.jsonl");

    auto* fix_cmd = app.add_subcommand("fix", "Repair bad completions");
    fix_cmd->add_option("--annotated", annotated, "annotated.jsonl");
    fix_cmd->add_option("--strategy", strategy, "replace-api or insert-prompt");
    fix_cmd->add_option("--backend-config", backend_cfg, "Backend config JSON");
    fix_cmd->add_option("--backend", backend_name, "Backend name within the config");
    fix_cmd->add_option("--out", out, "Output fixed.jsonl");

    auto* report_cmd = app.add_subcommand("report", "Emit grouped AUP/DUR/FR/ES/EM metrics");
    report_cmd->add_option("--annotated", annotated, "annotated.jsonl");
    report_cmd->add_option("--fixed", fixed, "fixed.jsonl (optional)");
    report_cmd->add_option("--group-by", group_by_csv, "Comma list of backend,library,dataset");
    report_cmd->add_option("--format", format, "json or csv");

    CLI11_PARSE(app, argc, argv);

    depfix::StageOptions options;
    options.header = !global.no_header;
    options.resume = global.resume;
    options.concurrency = concurrency;

    try {
        nlohmann::json config = load_config(global.config_path);
        mappings = cfg(config, "mappings", mappings);
        corpus = cfg(config, "corpus", corpus);
        backend_cfg = cfg(config, "backend_config", backend_cfg);
        if (backend_name.empty()) backend_name = config.value("backend", "");
        if (config.contains("strategy") && !fix_cmd->count("--strategy"))
            strategy = config["strategy"].get<std::string>();

        depfix::DecodingParams params;
        params.max_new_tokens = max_tokens;

        if (scan->parsed()) {
            if (corpus.empty() || mappings.empty() || out.empty())
                throw depfix::UsageError("scan requires --corpus, --mappings, --out");
            print_result("scan", depfix::run_scan(corpus, mappings, out, ext, options));
        } else if (prompts_cmd->parsed()) {
            if (functions.empty() || out.empty())
                throw depfix::UsageError("prompts requires --functions, --out");
            print_result("prompts", depfix::run_prompts(functions, out, options));
        } else if (complete_cmd->parsed()) {
            if (prompts.empty() || backend_cfg.empty() || out.empty())
                throw depfix::UsageError("complete requires --prompts, --backend-config, --out");
            auto backend = depfix::make_backend(
                depfix::load_backend_config(backend_cfg, backend_name));
            print_result("complete",
                         depfix::run_complete(prompts, *backend, out, params, options));
        } else if (annotate_cmd->parsed()) {
            if (completions.empty() || mappings.empty() || out.empty())
                throw depfix::UsageError("annotate requires --completions, --mappings, --out");
            print_result("annotate", depfix::run_annotate(completions, mappings, out, options));
        } else if (fix_cmd->parsed()) {
            if (annotated.empty() || backend_cfg.empty() || out.empty())
                throw depfix::UsageError("fix requires --annotated, --backend-config, --out");
            auto backend = depfix::make_backend(
                depfix::load_backend_config(backend_cfg, backend_name));
            print_result("fix", depfix::run_fix(annotated, depfix::fix_strategy_from_string(strategy),
                                                *backend, out, params, options));
        } else if (report_cmd->parsed()) {
            if (annotated.empty()) throw depfix::UsageError("report requires --annotated");
            std::vector<std::string> group_by;
            std::size_t pos = 0;
            while (pos <= group_by_csv.size() && !group_by_csv.empty()) {
                std::size_t comma = group_by_csv.find(',', pos);
                group_by.push_back(group_by_csv.substr(
                    pos, comma == std::string::npos ? std::string::npos : comma - pos));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            std::cout << depfix::run_report(annotated, fixed, group_by, format);
        }
    } catch (const depfix::TransportError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}

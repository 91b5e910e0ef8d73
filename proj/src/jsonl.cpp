#include "depfix/jsonl.hpp"

#include <chrono>
#include <fstream>

namespace depfix {

using nlohmann::json;

json matched_function_to_json(const MatchedFunction& m) {
    json obj;
    obj["file"] = m.function.file;
    obj["function"] = m.function.qualified_name;
    obj["span"] = json::array({m.function.span_start, m.function.span_end});
    obj["kind"] = to_string(m.kind);
    obj["reference_line"] = m.reference_call.line;
    obj["reference_col"] = m.reference_call.col;
    obj["reference_fqn"] = m.reference_call.fqn ? m.reference_call.fqn->dotted() : "";
    obj["deprecated"] = m.mapping.deprecated.dotted();
    obj["replacement"] = m.mapping.replacement.dotted();
    obj["library"] = m.mapping.library;
    obj["source_lines"] = m.function.source_lines;
    obj["context_imports"] = m.context_imports;
    return obj;
}

MatchedFunction matched_function_from_json(const json& obj) {
    MatchedFunction m;
    m.function.file = obj.at("file").get<std::string>();
    m.function.qualified_name = obj.at("function").get<std::string>();
    m.function.span_start = obj.at("span").at(0).get<int>();
    m.function.span_end = obj.at("span").at(1).get<int>();
    m.function.source_lines = obj.at("source_lines").get<std::vector<std::string>>();
    m.kind = obj.at("kind").get<std::string>() == "outdated" ? MatchKind::outdated
                                                             : MatchKind::up_to_dated;
    m.reference_call.line = obj.at("reference_line").get<int>();
    m.reference_call.col = obj.value("reference_col", 0);
    if (auto fqn = Fqn::try_parse(obj.at("reference_fqn").get<std::string>()))
        m.reference_call.fqn = std::move(*fqn);
    m.mapping.deprecated = Fqn::parse(obj.at("deprecated").get<std::string>());
    m.mapping.replacement = Fqn::parse(obj.at("replacement").get<std::string>());
    m.mapping.library = obj.at("library").get<std::string>();
    m.context_imports = obj.value("context_imports", std::vector<std::string>{});
    return m;
}

json prompt_sample_to_json(const PromptSample& s) {
    json obj;
    obj["id"] = s.id;
    obj["origin"] = to_string(s.origin);
    obj["library"] = s.mapping.library;
    obj["deprecated"] = s.mapping.deprecated.dotted();
    obj["replacement"] = s.mapping.replacement.dotted();
    obj["prompt_lines"] = s.prompt_lines;
    obj["context_imports"] = s.context_imports;
    obj["ground_truth_line"] = s.ground_truth_line;
    obj["file"] = s.file;
    obj["function"] = s.function;
    obj["reference_line"] = s.reference_line;
    return obj;
}

PromptSample prompt_sample_from_json(const json& obj) {
    PromptSample s;
    s.id = obj.at("id").get<std::string>();
    s.origin = obj.at("origin").get<std::string>() == "O" ? Origin::outdated : Origin::up_to_dated;
    s.mapping.library = obj.at("library").get<std::string>();
    s.mapping.deprecated = Fqn::parse(obj.at("deprecated").get<std::string>());
    s.mapping.replacement = Fqn::parse(obj.at("replacement").get<std::string>());
    s.prompt_lines = obj.at("prompt_lines").get<std::vector<std::string>>();
    s.context_imports = obj.value("context_imports", std::vector<std::string>{});
    s.ground_truth_line = obj.at("ground_truth_line").get<std::string>();
    s.file = obj.value("file", "");
    s.function = obj.value("function", "");
    s.reference_line = obj.value("reference_line", 0);
    return s;
}

std::vector<json> read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw JsonlError("cannot open " + path);
    std::vector<json> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw JsonlError(path + ":" + std::to_string(line_no) + ": malformed JSONL: " +
                             e.what());
        }
        if (obj.is_object() && obj.contains("_header")) continue;
        records.push_back(std::move(obj));
    }
    return records;
}

void write_jsonl(const std::string& path, const std::vector<json>& records,
                 const std::string& stage, bool header) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw JsonlError("cannot write " + path);
    if (header) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        json h;
        h["_header"] = {{"stage", stage},
                        {"timestamp",
                         std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
        out << h.dump() << "\n";
    }
    for (const json& r : records) out << r.dump() << "\n";
}

void append_jsonl(const std::string& path, const std::vector<json>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw JsonlError("cannot append to " + path);
    for (const json& r : records) out << r.dump() << "\n";
}

}  // namespace depfix

#include "depfix/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace depfix {

using nlohmann::json;

std::string to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::http_raw: return "http-raw";
        case BackendKind::http_instruct: return "http-instruct";
        case BackendKind::scripted: return "scripted";
    }
    return "scripted";
}

BackendKind backend_kind_from_string(const std::string& s) {
    if (s == "http-raw") return BackendKind::http_raw;
    if (s == "http-instruct") return BackendKind::http_instruct;
    if (s == "scripted") return BackendKind::scripted;
    throw GatewayError("unknown backend kind: " + s);
}

std::string instruct_template(const std::string& pmpt) {
    return "Complete and output the next line for the following Python function: " + pmpt;
}

std::string first_nonempty_line(const std::string& raw) {
    std::size_t pos = 0;
    while (pos < raw.size()) {
        std::size_t nl = raw.find('\n', pos);
        std::string line =
            nl == std::string::npos ? raw.substr(pos) : raw.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) return line;
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return "";
}

Completion complete(const std::string& pmpt, Backend& backend, const DecodingParams& params,
                    const std::string& key) {
    std::string wire = backend.kind() == BackendKind::http_instruct ? instruct_template(pmpt) : pmpt;
    Completion c;
    c.raw = backend.generate(wire, params, key);
    c.text = first_nonempty_line(c.raw);
    c.backend = backend.name();
    c.params = params;
    c.truncated = backend.last_truncated();
    return c;
}

std::string continue_from(const std::string& pmpt, const std::string& prefix, Backend& backend,
                          const DecodingParams& params) {
    if (!backend.supports_continuation())
        throw StrategyUnsupported("backend '" + backend.name() +
                                  "' cannot continue from a forced prefix");
    return backend.continuation(pmpt, prefix, params);
}

// ---------------------------------------------------------------------------
// scripted backend

ScriptedBackend::ScriptedBackend(std::string name, std::map<std::string, std::string> completions,
                                 std::map<std::string, std::string> continuations)
    : name_(std::move(name)),
      completions_(std::move(completions)),
      continuations_(std::move(continuations)) {}

std::string ScriptedBackend::generate(const std::string& prompt, const DecodingParams&,
                                      const std::string& key) {
    if (!key.empty()) {
        auto it = completions_.find(key);
        if (it != completions_.end()) return it->second;
    }
    auto it = completions_.find(prompt_hash(prompt));
    if (it != completions_.end()) return it->second;
    it = completions_.find(prompt);
    if (it != completions_.end()) return it->second;
    throw ScriptedMiss("no scripted completion for key '" + key + "' (prompt hash " +
                       prompt_hash(prompt) + ")");
}

std::string ScriptedBackend::continuation(const std::string&, const std::string& prefix,
                                          const DecodingParams&) {
    auto it = continuations_.find(prefix);
    if (it != continuations_.end()) return it->second;
    throw ScriptedMiss("no scripted continuation for prefix '" + prefix + "'");
}

std::string prompt_hash(const std::string& prompt) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : prompt) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::unique_ptr<ScriptedBackend> load_scripted_backend(const std::string& path,
                                                       const std::string& name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GatewayError("cannot open scripted backend file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw GatewayError(path + ": malformed script file: " + e.what());
    }
    std::map<std::string, std::string> completions, continuations;
    if (!doc.is_object()) throw GatewayError(path + ": script file must be a JSON object");
    if (doc.contains("completions") || doc.contains("continuations")) {
        const json comp_table = doc.value("completions", json::object());
        const json cont_table = doc.value("continuations", json::object());
        for (auto& [k, v] : comp_table.items()) completions[k] = v.get<std::string>();
        for (auto& [k, v] : cont_table.items()) continuations[k] = v.get<std::string>();
    } else {
        for (auto& [k, v] : doc.items()) completions[k] = v.get<std::string>();
    }
    return std::make_unique<ScriptedBackend>(name, std::move(completions),
                                             std::move(continuations));
}

// ---------------------------------------------------------------------------
// HTTP backend

std::string build_request_body(const BackendConfig& config, const std::string& prompt,
                               const DecodingParams& params) {
    auto field = [&](const std::string& logical) {
        auto it = config.field_map.find(logical);
        return it != config.field_map.end() ? it->second : logical;
    };
    json body;
    body[field("model")] = config.model;
    body[field("temperature")] = params.temperature;
    body[field("max_tokens")] = params.max_new_tokens;
    if (config.kind == BackendKind::http_instruct) {
        body[field("messages")] = json::array({json{{"role", "user"}, {"content", prompt}}});
    } else {
        body[field("prompt")] = prompt;
    }
    return body.dump();
}

namespace {

class HttpBackend : public Backend {
public:
    explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
        if (const char* key = std::getenv("DEPFIX_API_KEY")) api_key_ = key;
    }

    const std::string& name() const override { return config_.name; }
    BackendKind kind() const override { return config_.kind; }
    bool supports_continuation() const override { return config_.kind == BackendKind::http_raw; }

    std::string generate(const std::string& prompt, const DecodingParams& params,
                         const std::string&) override {
        return post(build_request_body(config_, prompt, params));
    }

    std::string continuation(const std::string& prompt, const std::string& prefix,
                             const DecodingParams& params) override {
        // the forced prefix begins the line to be completed
        std::string text = post(build_request_body(config_, prompt + "\n" + prefix, params));
        std::size_t nl = text.find('\n');
        return nl == std::string::npos ? text : text.substr(0, nl);
    }

    bool last_truncated() const override { return last_truncated_; }

private:
    std::string post(const std::string& body) {
        const int max_attempts = 3;
        std::string last_error;
        for (int attempt = 1; attempt <= max_attempts; ++attempt) {
            httplib::Client client(config_.base_url);
            client.set_read_timeout(120, 0);
            httplib::Headers headers;
            if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
            auto path = config_.field_map.count("path") ? config_.field_map.at("path")
                        : config_.kind == BackendKind::http_instruct ? "/v1/chat/completions"
                                                                     : "/v1/completions";
            auto res = client.Post(path, headers, body, "application/json");
            if (res && res->status >= 200 && res->status < 300) return parse_response(res->body);
            last_error = res ? "HTTP " + std::to_string(res->status) + ": " + res->body
                             : "transport error: " + httplib::to_string(res.error());
            if (attempt < max_attempts)
                std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
        }
        throw TransportError("backend '" + config_.name + "' failed after " +
                             std::to_string(max_attempts) + " attempts: " + last_error);
    }

    std::string parse_response(const std::string& body) {
        last_truncated_ = false;
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::parse_error&) {
            return body;  // non-JSON backends return plain text
        }
        if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
            const json& choice = doc["choices"][0];
            last_truncated_ = choice.value("finish_reason", "") == "length";
            if (choice.contains("text")) return choice["text"].get<std::string>();
            if (choice.contains("message") && choice["message"].contains("content"))
                return choice["message"]["content"].get<std::string>();
        }
        if (doc.contains("completion")) return doc["completion"].get<std::string>();
        if (doc.contains("text")) return doc["text"].get<std::string>();
        throw TransportError("backend '" + config_.name + "': unrecognized response shape");
    }

    BackendConfig config_;
    std::string api_key_;
    bool last_truncated_ = false;
};

BackendConfig config_from_json(const json& obj, const std::filesystem::path& base_dir) {
    BackendConfig c;
    c.name = obj.value("name", "default");
    c.kind = backend_kind_from_string(obj.value("kind", "scripted"));
    c.base_url = obj.value("base_url", "");
    c.model = obj.value("model", "");
    const json field_map = obj.value("field_map", json::object());
    for (auto& [k, v] : field_map.items()) c.field_map[k] = v.get<std::string>();
    c.script = obj.value("script", "");
    if (!c.script.empty() && std::filesystem::path(c.script).is_relative())
        c.script = (base_dir / c.script).generic_string();
    return c;
}

}  // namespace

BackendConfig load_backend_config(const std::string& path, const std::string& backend_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GatewayError("cannot open backend config: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw GatewayError(path + ": malformed backend config: " + e.what());
    }
    auto base_dir = std::filesystem::path(path).parent_path();
    std::vector<json> entries;
    if (doc.is_array())
        entries.assign(doc.begin(), doc.end());
    else
        entries.push_back(doc);

    for (const json& entry : entries) {
        BackendConfig c = config_from_json(entry, base_dir);
        if (backend_name.empty() || c.name == backend_name) return c;
    }
    throw GatewayError(path + ": no backend named '" + backend_name + "'");
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    if (config.kind == BackendKind::scripted) {
        if (config.script.empty()) throw GatewayError("scripted backend needs a script path");
        return load_scripted_backend(config.script, config.name);
    }
    if (config.base_url.empty())
        throw GatewayError("http backend '" + config.name + "' needs a base_url");
    return std::make_unique<HttpBackend>(config);
}

}  // namespace depfix

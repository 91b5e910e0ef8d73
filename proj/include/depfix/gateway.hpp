// Uniform completion interface over pluggable LLM backends: HTTP backends
// for real models and a scripted deterministic backend for tests.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "depfix/prompts.hpp"

namespace depfix {

struct GatewayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Backend cannot serve the requested operation (e.g. continuation on an
/// instruct-only backend).
struct StrategyUnsupported : GatewayError {
    using GatewayError::GatewayError;
};
/// Scripted backend has no entry for the requested key.
struct ScriptedMiss : GatewayError {
    using GatewayError::GatewayError;
};
/// Network failure after bounded retries.
struct TransportError : GatewayError {
    using GatewayError::GatewayError;
};

struct DecodingParams {
    int max_new_tokens = 50;
    std::string strategy = "greedy";
    double temperature = 0.0;
};

enum class BackendKind { http_raw, http_instruct, scripted };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(const std::string& s);

struct Completion {
    std::string text;  // first non-empty emitted line, trailing newline stripped
    std::string raw;   // full emitted text
    std::string backend;
    DecodingParams params;
    bool truncated = false;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual const std::string& name() const = 0;
    virtual BackendKind kind() const = 0;
    virtual bool supports_continuation() const = 0;

    /// Raw generation. `key` is the sample id (used by scripted backends);
    /// HTTP backends ignore it. Returns the full emitted text.
    virtual std::string generate(const std::string& prompt, const DecodingParams& params,
                                 const std::string& key) = 0;

    /// Continuation of `prefix` under `prompt` context; returns only the
    /// newly generated text, up to end-of-line or token budget.
    virtual std::string continuation(const std::string& prompt, const std::string& prefix,
                                     const DecodingParams& params) = 0;

    virtual bool last_truncated() const { return false; }
};

/// The instruction wrapper applied for instruct-style backends.
std::string instruct_template(const std::string& pmpt);

std::string first_nonempty_line(const std::string& raw);

/// comp <- LLM(pmpt). For http-instruct backends the prompt is wrapped in
/// the instruction template before sending.
Completion complete(const std::string& pmpt, Backend& backend, const DecodingParams& params,
                    const std::string& key = "");

/// suffix <- LLM(pmpt (+) prefix). Throws StrategyUnsupported when the
/// backend cannot continue from a forced prefix.
std::string continue_from(const std::string& pmpt, const std::string& prefix, Backend& backend,
                          const DecodingParams& params);

/// Deterministic backend backed by completion / continuation tables.
class ScriptedBackend : public Backend {
public:
    ScriptedBackend(std::string name, std::map<std::string, std::string> completions,
                    std::map<std::string, std::string> continuations);

    const std::string& name() const override { return name_; }
    BackendKind kind() const override { return BackendKind::scripted; }
    bool supports_continuation() const override { return true; }

    std::string generate(const std::string& prompt, const DecodingParams& params,
                         const std::string& key) override;
    std::string continuation(const std::string& prompt, const std::string& prefix,
                             const DecodingParams& params) override;

private:
    std::string name_;
    std::map<std::string, std::string> completions_;   // sample id or prompt hash -> text
    std::map<std::string, std::string> continuations_; // prefix -> suffix
};

/// Loads a scripted backend from JSON:
///   {"completions": {key: text, ...}, "continuations": {prefix: suffix, ...}}
/// A top-level object of plain string pairs is accepted as completions only.
std::unique_ptr<ScriptedBackend> load_scripted_backend(const std::string& path,
                                                       const std::string& name = "scripted");

/// 64-bit FNV-1a hex hash of a prompt, usable as a scripted-backend key.
std::string prompt_hash(const std::string& prompt);

struct BackendConfig {
    std::string name;
    BackendKind kind = BackendKind::scripted;
    std::string base_url;   // http kinds
    std::string model;
    std::map<std::string, std::string> field_map;  // logical field -> wire field
    std::string script;     // scripted kind: path to script file
};

/// Parses a backend config file (a single object or an array of objects)
/// and returns the entry named `backend_name` (or the sole entry when the
/// name is empty). Relative script paths resolve against the config file.
BackendConfig load_backend_config(const std::string& path, const std::string& backend_name = "");

/// Instantiates a backend from its config. HTTP backends read the API key
/// from the DEPFIX_API_KEY environment variable.
std::unique_ptr<Backend> make_backend(const BackendConfig& config);

/// Request body an HTTP backend would send; exposed for byte-level tests.
std::string build_request_body(const BackendConfig& config, const std::string& prompt,
                               const DecodingParams& params);

}  // namespace depfix

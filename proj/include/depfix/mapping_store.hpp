// Loading and indexing of deprecated-to-replacement API mappings.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "depfix/fqn.hpp"

namespace depfix {

/// One deprecated API mapped to exactly one replacement within a library.
struct ApiMapping {
    std::string library;
    Fqn deprecated;
    Fqn replacement;
    std::optional<std::string> deprecated_in_version;
};

struct MappingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable, ordered collection of one-to-one API mappings.
/// Iteration order equals mapping-file order; lookups return the first match.
class MappingSet {
public:
    MappingSet() = default;
    explicit MappingSet(std::vector<ApiMapping> mappings);

    const std::vector<ApiMapping>& mappings() const { return mappings_; }
    std::size_t size() const { return mappings_.size(); }

    /// First mapping (file order) whose deprecated FQN equals `fqn`.
    std::optional<ApiMapping> find_by_deprecated(const Fqn& fqn) const;

    /// First mapping (file order) whose replacement FQN equals `fqn`.
    std::optional<ApiMapping> find_by_replacement(const Fqn& fqn) const;

    /// Warnings collected at load time (e.g. library/root mismatches).
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    friend MappingSet load_mappings(const std::string& path);
    friend MappingSet parse_mappings(const std::string& json_text, const std::string& origin);

    std::vector<ApiMapping> mappings_;
    std::unordered_map<std::string, std::size_t> by_deprecated_;   // first index
    std::unordered_map<std::string, std::size_t> by_replacement_;  // first index
    std::vector<std::string> warnings_;
};

/// Loads mappings from a JSON file: an array of
/// {"library": str, "deprecated": str, "replacements": [str, ...], "version"?: str}.
/// Each object with k replacements yields k one-to-one mappings in file order.
/// Throws MappingError on malformed JSON, invalid identifiers, empty
/// replacement arrays, or duplicate (deprecated, replacement) pairs.
MappingSet load_mappings(const std::string& path);

/// Same as load_mappings but from an in-memory JSON string.
MappingSet parse_mappings(const std::string& json_text, const std::string& origin = "<string>");

/// Serializes a MappingSet back to the one-to-one JSON array form.
std::string serialize_mappings(const MappingSet& set);

}  // namespace depfix

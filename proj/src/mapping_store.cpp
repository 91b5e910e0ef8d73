#include "depfix/mapping_store.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace depfix {

using nlohmann::json;

MappingSet::MappingSet(std::vector<ApiMapping> mappings) : mappings_(std::move(mappings)) {
    for (std::size_t i = 0; i < mappings_.size(); ++i) {
        by_deprecated_.try_emplace(mappings_[i].deprecated.dotted(), i);
        by_replacement_.try_emplace(mappings_[i].replacement.dotted(), i);
    }
}

std::optional<ApiMapping> MappingSet::find_by_deprecated(const Fqn& fqn) const {
    auto it = by_deprecated_.find(fqn.dotted());
    if (it == by_deprecated_.end()) return std::nullopt;
    return mappings_[it->second];
}

std::optional<ApiMapping> MappingSet::find_by_replacement(const Fqn& fqn) const {
    auto it = by_replacement_.find(fqn.dotted());
    if (it == by_replacement_.end()) return std::nullopt;
    return mappings_[it->second];
}

static Fqn parse_fqn_or_throw(const std::string& text, const std::string& entry_desc) {
    auto fqn = Fqn::try_parse(text);
    if (!fqn)
        throw MappingError("invalid FQN '" + text + "' in mapping entry " + entry_desc);
    return *fqn;
}

MappingSet parse_mappings(const std::string& json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw MappingError(origin + ": malformed JSON: " + e.what());
    }
    if (!doc.is_array())
        throw MappingError(origin + ": mapping file must be a JSON array of objects");

    std::vector<ApiMapping> mappings;
    std::vector<std::string> warnings;
    std::set<std::pair<std::string, std::string>> seen;

    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& obj = doc[i];
        std::string desc = "#" + std::to_string(i);
        if (!obj.is_object() || !obj.contains("library") || !obj.contains("deprecated") ||
            !obj.contains("replacements"))
            throw MappingError(origin + ": entry " + desc +
                               " must be an object with library, deprecated, replacements");

        std::string library = obj.at("library").get<std::string>();
        if (library.empty())
            throw MappingError(origin + ": entry " + desc + " has an empty library name");
        desc += " (" + obj.at("deprecated").get<std::string>() + ")";

        Fqn dep = parse_fqn_or_throw(obj.at("deprecated").get<std::string>(), desc);
        const json& reps = obj.at("replacements");
        if (!reps.is_array() || reps.empty())
            throw MappingError(origin + ": entry " + desc + " has an empty replacements array");

        std::optional<std::string> version;
        if (obj.contains("version")) version = obj.at("version").get<std::string>();

        for (const json& rep_text : reps) {
            Fqn rep = parse_fqn_or_throw(rep_text.get<std::string>(), desc);
            if (dep == rep)
                throw MappingError(origin + ": entry " + desc + " maps an FQN to itself");
            if (!seen.emplace(dep.dotted(), rep.dotted()).second)
                throw MappingError(origin + ": duplicate mapping " + dep.dotted() + " -> " +
                                   rep.dotted());
            if (dep.root() != library && rep.root() != library)
                warnings.push_back("mapping " + dep.dotted() + " -> " + rep.dotted() +
                                   ": neither FQN is rooted in library '" + library + "'");
            mappings.push_back(ApiMapping{library, dep, rep, version});
        }
    }

    MappingSet set(std::move(mappings));
    set.warnings_ = std::move(warnings);
    return set;
}

MappingSet load_mappings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MappingError("cannot open mapping file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mappings(buf.str(), path);
}

std::string serialize_mappings(const MappingSet& set) {
    json out = json::array();
    for (const ApiMapping& m : set.mappings()) {
        json obj;
        obj["library"] = m.library;
        obj["deprecated"] = m.deprecated.dotted();
        obj["replacements"] = json::array({m.replacement.dotted()});
        if (m.deprecated_in_version) obj["version"] = *m.deprecated_in_version;
        out.push_back(std::move(obj));
    }
    return out.dump(2);
}

}  // namespace depfix

#include "depfix/resolver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace depfix {

namespace fs = std::filesystem;

std::string to_string(ResolutionKind kind) {
    switch (kind) {
        case ResolutionKind::direct: return "direct";
        case ResolutionKind::alias: return "alias";
        case ResolutionKind::from_import: return "from-import";
        case ResolutionKind::object_type: return "object-type";
        case ResolutionKind::unresolved: return "unresolved";
    }
    return "unresolved";
}

std::string to_string(MatchKind kind) {
    return kind == MatchKind::outdated ? "outdated" : "up-to-dated";
}

void AliasTable::add(const py::ImportBinding& binding) {
    entries_.push_back(binding);
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const py::ImportBinding& a, const py::ImportBinding& b) {
                         return a.line < b.line;
                     });
}

const py::ImportBinding* AliasTable::lookup(const std::string& name, int line) const {
    const py::ImportBinding* best = nullptr;
    for (const auto& e : entries_) {
        if (e.local != name) continue;
        if (line > 0 && e.line > line) continue;
        best = &e;  // entries are line-ordered; later wins
    }
    return best;
}

void ObjectTypeTable::add(Entry entry) {
    entries_.push_back(std::move(entry));
}

const ObjectTypeTable::Entry* ObjectTypeTable::lookup(const std::string& name, int line) const {
    const Entry* best = nullptr;
    for (const auto& e : entries_) {
        if (e.name != name) continue;
        if (e.line >= line) continue;  // only assigns strictly before the call
        if (!best || e.line >= best->line) best = &e;
    }
    return best;
}

AliasTable build_alias_table(const py::ModuleIndex& mod, int function_index) {
    AliasTable table;
    for (const auto& b : mod.module_imports) table.add(b);
    // walk enclosing chain from outermost to innermost
    std::vector<int> chain;
    for (int i = function_index; i >= 0; i = mod.functions[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    for (int i : chain)
        for (const auto& b : mod.functions[i].imports) table.add(b);
    return table;
}

namespace {

// Resolves a dotted name (not necessarily a call) via the alias table only.
std::optional<Fqn> resolve_dotted(const std::vector<std::string>& segs, int line,
                                  const AliasTable& aliases) {
    if (segs.empty()) return std::nullopt;
    const py::ImportBinding* b = aliases.lookup(segs[0], line);
    if (!b) return std::nullopt;
    auto base = Fqn::try_parse(b->target);
    if (!base) return std::nullopt;
    return base->joined(std::span<const std::string>(segs.data() + 1, segs.size() - 1));
}

}  // namespace

ObjectTypeTable build_object_type_table(const py::FunctionDef& fn, const AliasTable& aliases) {
    ObjectTypeTable table;
    for (const auto& as : fn.assigns) {
        if (as.rhs_callee.empty()) continue;
        auto fqn = resolve_dotted(as.rhs_callee, as.line, aliases);
        if (fqn) table.add(ObjectTypeTable::Entry{as.target, std::move(*fqn), as.line});
    }
    return table;
}

ResolvedCall resolve_call(const py::CallSite& call, const AliasTable& aliases,
                          const ObjectTypeTable& objects) {
    ResolvedCall rc;
    rc.line = call.line;
    rc.col = call.col;
    rc.callee_text = call.callee_text;
    if (call.chained || call.callee.empty()) return rc;

    const std::string& head = call.callee[0];
    if (call.callee.size() >= 2) {
        if (const auto* obj = objects.lookup(head, call.line)) {
            rc.fqn = obj->type.joined(
                std::span<const std::string>(call.callee.data() + 1, call.callee.size() - 1));
            rc.kind = ResolutionKind::object_type;
            return rc;
        }
    }
    if (const auto* b = aliases.lookup(head, call.line)) {
        auto fqn = resolve_dotted(call.callee, call.line, aliases);
        if (fqn) {
            rc.fqn = std::move(*fqn);
            switch (b->form) {
                case py::ImportForm::plain: rc.kind = ResolutionKind::direct; break;
                case py::ImportForm::import_as: rc.kind = ResolutionKind::alias; break;
                default: rc.kind = ResolutionKind::from_import; break;
            }
            return rc;
        }
    }
    return rc;
}

SourceFunction resolve_function(const py::ModuleIndex& mod, int function_index,
                                const std::string& file) {
    const py::FunctionDef& fn = mod.functions.at(function_index);
    SourceFunction out;
    out.file = file;
    out.qualified_name = fn.qualified_name;
    out.span_start = fn.start_line;
    out.span_end = fn.end_line;
    for (int l = fn.start_line; l <= fn.end_line && l <= static_cast<int>(mod.lines.size()); ++l)
        out.source_lines.push_back(mod.lines[l - 1]);

    AliasTable aliases = build_alias_table(mod, function_index);
    ObjectTypeTable objects = build_object_type_table(fn, aliases);
    for (const auto& call : fn.calls) out.calls.push_back(resolve_call(call, aliases, objects));
    return out;
}

std::vector<MatchedFunction> match_module(const py::ModuleIndex& mod, const std::string& file,
                                          const MappingSet& mappings) {
    std::vector<MatchedFunction> matches;
    for (std::size_t fi = 0; fi < mod.functions.size(); ++fi) {
        SourceFunction sf = resolve_function(mod, static_cast<int>(fi), file);
        for (const ResolvedCall& call : sf.calls) {
            if (!call.fqn) continue;
            std::optional<ApiMapping> m = mappings.find_by_deprecated(*call.fqn);
            MatchKind kind = MatchKind::outdated;
            if (!m) {
                m = mappings.find_by_replacement(*call.fqn);
                kind = MatchKind::up_to_dated;
            }
            if (!m) continue;

            MatchedFunction mf;
            mf.reference_call = call;
            mf.mapping = std::move(*m);
            mf.kind = kind;
            AliasTable aliases = build_alias_table(mod, static_cast<int>(fi));
            for (const auto& b : aliases.entries()) {
                if (std::find(mf.context_imports.begin(), mf.context_imports.end(),
                              b.statement) == mf.context_imports.end())
                    mf.context_imports.push_back(b.statement);
            }
            mf.function = std::move(sf);
            matches.push_back(std::move(mf));
            break;  // first matched call is the reference API
        }
    }
    return matches;
}

ScanResult match_corpus(const std::string& root, const MappingSet& mappings,
                        const std::string& extension) {
    ScanResult result;
    std::vector<std::string> files;
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
        if (ec) {
            result.warnings.push_back("cannot traverse " + root + ": " + ec.message());
            break;
        }
        if (it->is_regular_file() && it->path().extension() == extension)
            files.push_back(it->path().generic_string());
    }
    std::sort(files.begin(), files.end());

    for (const std::string& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            result.warnings.push_back("cannot read " + file);
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            py::ModuleIndex mod = py::parse_module(buf.str());
            for (const auto& w : mod.warnings) result.warnings.push_back(file + ": " + w);
            auto matches = match_module(mod, file, mappings);
            std::move(matches.begin(), matches.end(), std::back_inserter(result.matches));
        } catch (const py::ParseError& e) {
            result.warnings.push_back(file + ":" + std::to_string(e.line) +
                                      ": parse error: " + e.what());
        }
    }
    std::stable_sort(result.matches.begin(), result.matches.end(),
                     [](const MatchedFunction& a, const MatchedFunction& b) {
                         return std::pair(a.function.file, a.function.span_start) <
                                std::pair(b.function.file, b.function.span_start);
                     });
    return result;
}

}  // namespace depfix

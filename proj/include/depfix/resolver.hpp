// Alias / object-type resolution of call-site FQNs and corpus matching
// against a MappingSet.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depfix/fqn.hpp"
#include "depfix/mapping_store.hpp"
#include "depfix/pysrc.hpp"

namespace depfix {

enum class ResolutionKind { direct, alias, from_import, object_type, unresolved };

std::string to_string(ResolutionKind kind);

/// Ordered list of import bindings visible in one scope chain. Later
/// entries for the same local name shadow earlier ones; lookups are
/// line-sensitive so resolutions before a re-import keep the old binding.
class AliasTable {
public:
    void add(const py::ImportBinding& binding);

    /// Binding for `name` active at `line` (latest binding with line < `line`,
    /// or any line when `line` is 0).
    const py::ImportBinding* lookup(const std::string& name, int line = 0) const;

    const std::vector<py::ImportBinding>& entries() const { return entries_; }

private:
    std::vector<py::ImportBinding> entries_;  // ordered by line
};

/// Variable name -> constructing FQN, scoped to one function body.
class ObjectTypeTable {
public:
    struct Entry {
        std::string name;
        Fqn type;
        int line;  // assign statement line
    };

    void add(Entry entry);
    const Entry* lookup(const std::string& name, int line) const;
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

struct ResolvedCall {
    std::optional<Fqn> fqn;
    int line = 0;  // 1-based
    int col = 0;   // 0-based
    std::string callee_text;
    ResolutionKind kind = ResolutionKind::unresolved;
};

struct SourceFunction {
    std::string file;
    std::string qualified_name;
    int span_start = 0;  // def line, 1-based, inclusive
    int span_end = 0;
    std::vector<std::string> source_lines;  // span_start..span_end verbatim
    std::vector<ResolvedCall> calls;        // body order
};

enum class MatchKind { outdated, up_to_dated };

std::string to_string(MatchKind kind);

struct MatchedFunction {
    SourceFunction function;
    ResolvedCall reference_call;  // first call matching any mapped FQN
    ApiMapping mapping;
    MatchKind kind;
    std::vector<std::string> context_imports;  // verbatim import statements in scope
};

/// Builds the alias table for a function (module imports plus imports of
/// every enclosing function and the function itself). `function_index` of
/// -1 yields the module-level table.
AliasTable build_alias_table(const py::ModuleIndex& mod, int function_index = -1);

/// Object-type table from a function's constructor-style assigns.
ObjectTypeTable build_object_type_table(const py::FunctionDef& fn, const AliasTable& aliases);

/// Resolves one call site against the tables.
ResolvedCall resolve_call(const py::CallSite& call, const AliasTable& aliases,
                          const ObjectTypeTable& objects);

/// Resolves all calls of a function, in body order.
SourceFunction resolve_function(const py::ModuleIndex& mod, int function_index,
                                const std::string& file);

struct ScanResult {
    std::vector<MatchedFunction> matches;  // deterministic (path, start line) order
    std::vector<std::string> warnings;     // per-file parse/read failures
};

/// Matches a single parsed module against the mappings.
std::vector<MatchedFunction> match_module(const py::ModuleIndex& mod, const std::string& file,
                                          const MappingSet& mappings);

/// Walks `root` for files with `extension` (default ".py") and matches
/// every function. Unreadable or unparsable files produce warnings.
ScanResult match_corpus(const std::string& root, const MappingSet& mappings,
                        const std::string& extension = ".py");

}  // namespace depfix

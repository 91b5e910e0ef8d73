// Lightweight Python source indexing: logical lines, function definitions,
// import statements, assigns, and call sites. Intentionally not a full
// grammar; it recognizes exactly the constructs the resolver needs.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace depfix::py {

struct ParseError : std::runtime_error {
    ParseError(std::string message, int line, int column)
        : std::runtime_error(std::move(message)), line(line), column(column) {}
    int line;    // 1-based
    int column;  // 0-based
};

enum class ImportForm { plain, import_as, from_import, from_import_as };

/// One local-name binding produced by an import statement.
struct ImportBinding {
    std::string local;      // name bound in the scope
    std::string target;     // dotted target, e.g. "torch.linalg.lstsq"
    ImportForm form;
    int line;               // 1-based line of the import statement
    std::string statement;  // verbatim first physical line of the statement
};

/// `target = <dotted-callee>(...)` style assignment.
struct AssignStmt {
    std::string target;
    std::vector<std::string> rhs_callee;  // empty when RHS is not a call
    int line;
};

/// A call site `a.b.c(...)`. `chained` marks method calls on expression
/// receivers (`f().g()`), which stay unresolved.
struct CallSite {
    std::vector<std::string> callee;
    std::string callee_text;
    int line;  // 1-based line of the first callee token
    int col;   // 0-based byte offset within that line
    bool chained = false;
};

struct FunctionDef {
    std::string qualified_name;  // dotted by lexical nesting (Class.method, outer.inner)
    int start_line = 0;          // def line, 1-based
    int end_line = 0;            // last body line, inclusive
    int parent = -1;             // index of enclosing FunctionDef, -1 = module scope
    std::vector<ImportBinding> imports;
    std::vector<AssignStmt> assigns;
    std::vector<CallSite> calls;  // body order (line, col)
};

struct ModuleIndex {
    std::vector<std::string> lines;  // physical lines, newline stripped
    std::vector<ImportBinding> module_imports;
    std::vector<CallSite> module_calls;   // calls outside any function
    std::vector<AssignStmt> module_assigns;
    std::vector<FunctionDef> functions;   // ordered by start_line
    std::vector<std::string> warnings;    // e.g. star imports

    /// Index of the innermost function containing `line`, or -1.
    int enclosing_function(int line) const;
};

/// Parses Python-like source. In strict mode, bracket imbalance raises
/// ParseError; lenient mode tolerates truncated lines (used on LLM output).
ModuleIndex parse_module(std::string_view source, bool lenient = false);

/// Splits text into physical lines, stripping one trailing newline each.
std::vector<std::string> split_lines(std::string_view text);

}  // namespace depfix::py

#include "depfix/annotator.hpp"

#include <algorithm>

namespace depfix {

std::string to_string(VerdictLabel label) {
    switch (label) {
        case VerdictLabel::good: return "good";
        case VerdictLabel::bad: return "bad";
        case VerdictLabel::irrelevant: return "irrelevant";
    }
    return "irrelevant";
}

std::vector<ResolvedCall> resolve_completion_calls(const std::string& completion_line,
                                                   const PromptSample& sample,
                                                   bool* parse_failed) {
    if (parse_failed) *parse_failed = false;

    // context imports (+) prompt (+) completion, analyzed as one unit
    std::string source;
    for (const auto& line : sample.context_imports) source += line + "\n";
    int comp_line_no = static_cast<int>(sample.context_imports.size());
    for (const auto& line : sample.prompt_lines) source += line + "\n";
    comp_line_no += static_cast<int>(sample.prompt_lines.size()) + 1;
    source += completion_line;

    py::ModuleIndex mod;
    try {
        mod = py::parse_module(source, /*lenient=*/true);
    } catch (const std::exception&) {
        if (parse_failed) *parse_failed = true;
        return {};
    }

    // one-unit tables: every import and assign in the pseudo-module
    AliasTable aliases;
    for (const auto& b : mod.module_imports) aliases.add(b);
    for (const auto& fn : mod.functions)
        for (const auto& b : fn.imports) aliases.add(b);

    ObjectTypeTable objects;
    auto add_assigns = [&](const std::vector<py::AssignStmt>& assigns) {
        for (const auto& as : assigns) {
            if (as.rhs_callee.empty()) continue;
            py::CallSite pseudo{as.rhs_callee, "", as.line, 0, false};
            ResolvedCall rc = resolve_call(pseudo, aliases, objects);
            if (rc.fqn) objects.add({as.target, *rc.fqn, as.line});
        }
    };
    add_assigns(mod.module_assigns);
    for (const auto& fn : mod.functions) add_assigns(fn.assigns);

    std::vector<ResolvedCall> out;
    auto collect = [&](const std::vector<py::CallSite>& calls) {
        for (const auto& c : calls) {
            if (c.line != comp_line_no) continue;
            ResolvedCall rc = resolve_call(c, aliases, objects);
            rc.line = 1;  // single candidate line
            out.push_back(std::move(rc));
        }
    };
    collect(mod.module_calls);
    for (const auto& fn : mod.functions) collect(fn.calls);
    std::sort(out.begin(), out.end(),
              [](const ResolvedCall& a, const ResolvedCall& b) { return a.col < b.col; });
    return out;
}

Verdict annotate(const Completion& comp, const PromptSample& sample,
                 const MappingSet* all_mappings) {
    Verdict v;
    auto calls = resolve_completion_calls(comp.text, sample, &v.parse_failed);
    for (const ResolvedCall& call : calls) {
        if (!call.fqn) continue;
        if (v.label == VerdictLabel::irrelevant) {
            if (*call.fqn == sample.mapping.deprecated) {
                v.label = VerdictLabel::bad;
                v.matched_call = call;
            } else if (*call.fqn == sample.mapping.replacement) {
                v.label = VerdictLabel::good;
                v.matched_call = call;
            }
        }
        if (all_mappings && *call.fqn != sample.mapping.deprecated) {
            if (auto other = all_mappings->find_by_deprecated(*call.fqn))
                v.other_deprecated.push_back(call.fqn->dotted());
        }
    }
    return v;
}

bool contains(const std::string& completion_line, const Fqn& dep, const PromptSample& sample) {
    for (const ResolvedCall& call : resolve_completion_calls(completion_line, sample))
        if (call.fqn && *call.fqn == dep) return true;
    return false;
}

}  // namespace depfix

#include "depfix/fixer.hpp"

namespace depfix {

std::string to_string(FixStrategy strategy) {
    return strategy == FixStrategy::replace_api ? "replace-api" : "insert-prompt";
}

FixStrategy fix_strategy_from_string(const std::string& s) {
    if (s == "replace-api") return FixStrategy::replace_api;
    if (s == "insert-prompt") return FixStrategy::insert_prompt;
    throw FixError("unknown fix strategy: " + s + " (expected replace-api or insert-prompt)");
}

std::string to_string(FixStatus status) {
    switch (status) {
        case FixStatus::fixed: return "fixed";
        case FixStatus::not_fixed: return "not-fixed";
        case FixStatus::strategy_unsupported: return "strategy-unsupported";
        case FixStatus::backend_error: return "backend-error";
    }
    return "not-fixed";
}

namespace {

// All import bindings visible in the sample's context (imports + prompt).
std::vector<py::ImportBinding> sample_bindings(const PromptSample& sample) {
    std::string source;
    for (const auto& line : sample.context_imports) source += line + "\n";
    for (const auto& line : sample.prompt_lines) source += line + "\n";
    py::ModuleIndex mod = py::parse_module(source, /*lenient=*/true);
    std::vector<py::ImportBinding> bindings = mod.module_imports;
    for (const auto& fn : mod.functions)
        for (const auto& b : fn.imports) bindings.push_back(b);
    return bindings;
}

std::string dotted_prefix(const Fqn& fqn, std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out += '.';
        out += fqn.segments()[i];
    }
    return out;
}

}  // namespace

ReplacedPrefix render_replacement(const Fqn& rep, const PromptSample& sample) {
    auto bindings = sample_bindings(sample);
    // longest bound prefix wins; later bindings shadow earlier ones
    for (std::size_t k = rep.size(); k >= 1; --k) {
        std::string target = dotted_prefix(rep, k);
        const py::ImportBinding* match = nullptr;
        for (const auto& b : bindings)
            if (b.target == target) match = &b;
        if (!match) continue;
        std::string rendered = match->local;
        for (std::size_t i = k; i < rep.size(); ++i) rendered += "." + rep.segments()[i];
        return {rendered, false};
    }
    return {rep.dotted(), true};
}

ReplacedPrefix replace_dep(const std::string& comp, const Fqn& dep, const Fqn& rep,
                           const PromptSample& sample) {
    const ResolvedCall* dep_call = nullptr;
    auto calls = resolve_completion_calls(comp, sample);
    for (const auto& call : calls) {
        if (call.fqn && *call.fqn == dep) {
            dep_call = &call;
            break;
        }
    }
    if (!dep_call)
        throw FixError("cannot locate callee span of " + dep.dotted() + " in completion");

    ReplacedPrefix rendered = render_replacement(rep, sample);
    ReplacedPrefix out;
    out.needs_import = rendered.needs_import;
    out.prefix = comp.substr(0, static_cast<std::size_t>(dep_call->col)) + rendered.prefix;
    return out;
}

std::string create_rep_pmpt(const std::string& comp, const Fqn& dep, const Fqn& rep,
                            const std::string& pmpt) {
    // indentation of the last non-blank prompt line
    std::string indent;
    for (const std::string& line : py::split_lines(pmpt)) {
        std::size_t first = line.find_first_not_of(" \t");
        if (first != std::string::npos) indent = line.substr(0, first);
    }
    return indent + "# " + comp + "\n" + indent + "# " + dep.dotted() + " is deprecated, use " +
           rep.dotted() + " instead and revise the return value and arguments.";
}

void fix_replace_api(const std::string& pmpt, const std::string& comp, const Fqn& dep,
                     const Fqn& rep, Backend& backend, const DecodingParams& params,
                     const PromptSample& sample, FixOutcome& out) {
    ReplacedPrefix prefix = replace_dep(comp, dep, rep, sample);
    out.prefix = prefix.prefix;
    std::string suffix = continue_from(pmpt, prefix.prefix, backend, params);
    out.fixed_comp = prefix.prefix + suffix;
}

void fix_insert_prompt(const std::string& pmpt, const std::string& comp, const Fqn& dep,
                       const Fqn& rep, Backend& backend, const DecodingParams& params,
                       const PromptSample& sample, FixOutcome& out) {
    out.inserted_prompt = create_rep_pmpt(comp, dep, rep, pmpt);
    std::string augmented = pmpt + "\n" + out.inserted_prompt;
    Completion c = complete(augmented, backend, params, sample.id + "#insert");
    out.fixed_comp = c.text;
}

FixOutcome run_fix(const PromptSample& sample, const std::string& original_comp,
                   FixStrategy strategy, Backend& backend, const DecodingParams& params) {
    FixOutcome out;
    out.sample_id = sample.id;
    out.strategy = strategy;
    out.original_comp = original_comp;
    out.ground_truth_line = sample.ground_truth_line;

    const Fqn& dep = sample.mapping.deprecated;
    const Fqn& rep = sample.mapping.replacement;
    std::string pmpt = sample.prompt_text();
    try {
        if (strategy == FixStrategy::replace_api)
            fix_replace_api(pmpt, original_comp, dep, rep, backend, params, sample, out);
        else
            fix_insert_prompt(pmpt, original_comp, dep, rep, backend, params, sample, out);
    } catch (const StrategyUnsupported& e) {
        out.status = FixStatus::strategy_unsupported;
        out.error = e.what();
        return out;
    } catch (const GatewayError& e) {
        out.status = FixStatus::backend_error;
        out.error = e.what();
        return out;
    } catch (const FixError& e) {
        out.status = FixStatus::not_fixed;
        out.error = e.what();
        return out;
    }

    Completion fixed;
    fixed.text = out.fixed_comp;
    fixed.raw = out.fixed_comp;
    fixed.backend = backend.name();
    fixed.params = params;
    out.fixed_verdict = annotate(fixed, sample);
    out.status = out.fixed_verdict->label == VerdictLabel::good ? FixStatus::fixed
                                                                : FixStatus::not_fixed;
    return out;
}

DeprecationAwareResult deprecation_aware_complete(const PromptSample& sample,
                                                  const MappingSet& mappings, Backend& backend,
                                                  FixStrategy strategy,
                                                  const DecodingParams& params) {
    DeprecationAwareResult result;
    result.completion = complete(sample.prompt_text(), backend, params, sample.id);

    for (const ApiMapping& m : mappings.mappings()) {
        if (!contains(result.completion.text, m.deprecated, sample)) continue;
        FixOutcome out;
        out.sample_id = sample.id;
        out.strategy = strategy;
        out.original_comp = result.completion.text;
        out.ground_truth_line = sample.ground_truth_line;
        std::string pmpt = sample.prompt_text();
        try {
            if (strategy == FixStrategy::replace_api)
                fix_replace_api(pmpt, result.completion.text, m.deprecated, m.replacement,
                                backend, params, sample, out);
            else
                fix_insert_prompt(pmpt, result.completion.text, m.deprecated, m.replacement,
                                  backend, params, sample, out);
            result.completion.text = out.fixed_comp;
            result.completion.raw = out.fixed_comp;
            Completion fixed = result.completion;
            out.fixed_verdict = annotate(fixed, sample);
            out.status = out.fixed_verdict->label == VerdictLabel::good ? FixStatus::fixed
                                                                        : FixStatus::not_fixed;
        } catch (const StrategyUnsupported& e) {
            out.status = FixStatus::strategy_unsupported;
            out.error = e.what();
        } catch (const GatewayError& e) {
            out.status = FixStatus::backend_error;
            out.error = e.what();
        } catch (const FixError& e) {
            out.status = FixStatus::not_fixed;
            out.error = e.what();
        }
        result.outcome = std::move(out);
        ++result.fix_invocations;
        break;  // exactly one fix attempt per completion
    }
    return result;
}

std::vector<PromptSample> build_eval_set(const std::vector<PromptSample>& up_to_dated,
                                         const std::vector<Verdict>& verdicts) {
    std::vector<PromptSample> eval_set;
    for (std::size_t i = 0; i < up_to_dated.size() && i < verdicts.size(); ++i)
        if (verdicts[i].label == VerdictLabel::bad) eval_set.push_back(up_to_dated[i]);
    return eval_set;
}

}  // namespace depfix

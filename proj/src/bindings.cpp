// pybind11 bindings exposing the main depfix operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "depfix/annotator.hpp"
#include "depfix/fixer.hpp"
#include "depfix/jsonl.hpp"
#include "depfix/metrics.hpp"
#include "depfix/pipeline.hpp"

namespace pyb = pybind11;
using namespace depfix;

namespace {

PromptSample sample_from_dict(const pyb::dict& d) {
    PromptSample s;
    s.id = d.contains("id") ? d["id"].cast<std::string>() : "";
    s.prompt_lines = d["prompt_lines"].cast<std::vector<std::string>>();
    if (d.contains("context_imports"))
        s.context_imports = d["context_imports"].cast<std::vector<std::string>>();
    s.mapping.library = d.contains("library") ? d["library"].cast<std::string>() : "";
    s.mapping.deprecated = Fqn::parse(d["deprecated"].cast<std::string>());
    s.mapping.replacement = Fqn::parse(d["replacement"].cast<std::string>());
    s.origin = d.contains("origin") && d["origin"].cast<std::string>() == "O"
                   ? Origin::outdated
                   : Origin::up_to_dated;
    if (d.contains("ground_truth_line"))
        s.ground_truth_line = d["ground_truth_line"].cast<std::string>();
    return s;
}

}  // namespace

PYBIND11_MODULE(_depfix, m) {
    m.doc() = "Deprecated-API detection and repair for LLM line completions";

    pyb::class_<Fqn>(m, "Fqn")
        .def(pyb::init([](const std::string& dotted) { return Fqn::parse(dotted); }))
        .def_property_readonly("segments", &Fqn::segments)
        .def_property_readonly("dotted", &Fqn::dotted)
        .def("__str__", &Fqn::dotted)
        .def("__eq__", [](const Fqn& a, const Fqn& b) { return a == b; });

    pyb::class_<ApiMapping>(m, "ApiMapping")
        .def_readonly("library", &ApiMapping::library)
        .def_readonly("deprecated", &ApiMapping::deprecated)
        .def_readonly("replacement", &ApiMapping::replacement)
        .def_readonly("deprecated_in_version", &ApiMapping::deprecated_in_version);

    pyb::class_<MappingSet>(m, "MappingSet")
        .def("__len__", &MappingSet::size)
        .def_property_readonly("mappings", &MappingSet::mappings)
        .def("find_by_deprecated", &MappingSet::find_by_deprecated)
        .def("find_by_replacement", &MappingSet::find_by_replacement);

    m.def("load_mappings", &load_mappings, pyb::arg("path"));
    m.def("parse_mappings", &parse_mappings, pyb::arg("json_text"),
          pyb::arg("origin") = "<string>");

    m.def(
        "scan_corpus",
        [](const std::string& root, const std::string& mappings_path,
           const std::string& extension) {
            MappingSet mappings = load_mappings(mappings_path);
            ScanResult result = match_corpus(root, mappings, extension);
            pyb::list matches;
            for (const MatchedFunction& mf : result.matches) {
                auto obj = matched_function_to_json(mf);
                matches.append(pyb::module_::import("json").attr("loads")(obj.dump()));
            }
            return matches;
        },
        pyb::arg("root"), pyb::arg("mappings_path"), pyb::arg("extension") = ".py",
        "Match every corpus function against the mappings; returns dicts.");

    m.def(
        "annotate_completion",
        [](const std::string& completion, const pyb::dict& sample_dict) {
            PromptSample sample = sample_from_dict(sample_dict);
            Completion comp;
            comp.text = completion;
            comp.raw = completion;
            Verdict v = annotate(comp, sample);
            pyb::dict out;
            out["label"] = to_string(v.label);
            if (v.matched_call && v.matched_call->fqn)
                out["matched_fqn"] = v.matched_call->fqn->dotted();
            return out;
        },
        pyb::arg("completion"), pyb::arg("sample"),
        "Label a completion good/bad/irrelevant for a sample dict.");

    m.def(
        "contains_deprecated",
        [](const std::string& completion, const std::string& dep, const pyb::dict& sample_dict) {
            return contains(completion, Fqn::parse(dep), sample_from_dict(sample_dict));
        },
        pyb::arg("completion"), pyb::arg("dep"), pyb::arg("sample"));

    m.def(
        "replace_dep",
        [](const std::string& comp, const std::string& dep, const std::string& rep,
           const pyb::dict& sample_dict) {
            return replace_dep(comp, Fqn::parse(dep), Fqn::parse(rep),
                               sample_from_dict(sample_dict))
                .prefix;
        },
        pyb::arg("comp"), pyb::arg("dep"), pyb::arg("rep"), pyb::arg("sample"),
        "ReplaceAPI prefix: cut at the deprecated callee, splice in the replacement.");

    m.def(
        "create_rep_pmpt",
        [](const std::string& comp, const std::string& dep, const std::string& rep,
           const std::string& pmpt) {
            return create_rep_pmpt(comp, Fqn::parse(dep), Fqn::parse(rep), pmpt);
        },
        pyb::arg("comp"), pyb::arg("dep"), pyb::arg("rep"), pyb::arg("pmpt"),
        "InsertPrompt guidance comment lines.");

    m.def("edit_similarity", &edit_similarity, pyb::arg("a"), pyb::arg("b"));
    m.def("levenshtein", &levenshtein, pyb::arg("a"), pyb::arg("b"));
    m.def(
        "normalize_return_values",
        [](const std::string& line) { return normalize_return_values(line); },
        pyb::arg("line"));
    m.def("exact_match", &exact_match, pyb::arg("pred"), pyb::arg("truth"));
    m.def("instruct_template", &instruct_template, pyb::arg("pmpt"));
}

from _depfix import (
    ApiMapping,
    Fqn,
    MappingSet,
    annotate_completion,
    contains_deprecated,
    create_rep_pmpt,
    edit_similarity,
    exact_match,
    instruct_template,
    levenshtein,
    load_mappings,
    normalize_return_values,
    parse_mappings,
    replace_dep,
    scan_corpus,
)

__all__ = [
    "ApiMapping",
    "Fqn",
    "MappingSet",
    "annotate_completion",
    "contains_deprecated",
    "create_rep_pmpt",
    "edit_similarity",
    "exact_match",
    "instruct_template",
    "levenshtein",
    "load_mappings",
    "normalize_return_values",
    "parse_mappings",
    "replace_dep",
    "scan_corpus",
]

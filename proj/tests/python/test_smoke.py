import os

import _depfix as depfix

FIXTURES = os.environ.get("DEPFIX_FIXTURES", os.path.join(os.path.dirname(__file__), "..", "fixtures"))


def torch_sample():
    return {
        "id": "py-1",
        "prompt_lines": ["def fit(a, b):", "    a = normalize(a)"],
        "context_imports": ["import torch"],
        "library": "torch",
        "deprecated": "torch.lstsq",
        "replacement": "torch.linalg.lstsq",
        "origin": "U",
        "ground_truth_line": "    sol = torch.linalg.lstsq(a, b)",
    }


def test_fqn_roundtrip():
    fqn = depfix.Fqn("torch.linalg.lstsq")
    assert str(fqn) == "torch.linalg.lstsq"
    assert fqn.segments == ["torch", "linalg", "lstsq"]
    assert fqn == depfix.Fqn("torch.linalg.lstsq")


def test_load_mappings():
    mappings = depfix.load_mappings(os.path.join(FIXTURES, "mappings.json"))
    assert len(mappings) == 5
    hit = mappings.find_by_deprecated(depfix.Fqn("torch.lstsq"))
    assert hit is not None
    assert str(hit.replacement) == "torch.linalg.lstsq"
    assert mappings.find_by_deprecated(depfix.Fqn("torch.linalg.lstsq")) is None


def test_scan_corpus():
    matches = depfix.scan_corpus(os.path.join(FIXTURES, "corpus_small"),
                                 os.path.join(FIXTURES, "mappings.json"))
    assert len(matches) == 4
    kinds = {m["file"].rsplit("/", 1)[-1]: m["kind"] for m in matches}
    assert kinds["s1_outdated.py"] == "outdated"
    assert kinds["s2_uptodate.py"] == "up-to-dated"


def test_annotate_completion():
    sample = torch_sample()
    bad = depfix.annotate_completion("    sol = torch.lstsq(a, b)", sample)
    assert bad["label"] == "bad"
    assert bad["matched_fqn"] == "torch.lstsq"
    good = depfix.annotate_completion("    sol = torch.linalg.lstsq(a, b)", sample)
    assert good["label"] == "good"
    assert depfix.annotate_completion("    return 1", sample)["label"] == "irrelevant"


def test_contains_and_replace():
    sample = torch_sample()
    assert depfix.contains_deprecated("    x = torch.lstsq(a, b)", "torch.lstsq", sample)
    assert not depfix.contains_deprecated("    x = torch.linalg.lstsq(a, b)", "torch.lstsq", sample)
    prefix = depfix.replace_dep("x = torch.lstsq(a, b)", "torch.lstsq",
                                "torch.linalg.lstsq", sample)
    assert prefix == "x = torch.linalg.lstsq"


def test_create_rep_pmpt():
    out = depfix.create_rep_pmpt("x = torch.lstsq(A, B)", "torch.lstsq",
                                 "torch.linalg.lstsq", "def f():\n    y = 1")
    lines = out.split("\n")
    assert lines[0] == "    # x = torch.lstsq(A, B)"
    assert lines[1].endswith("instead and revise the return value and arguments.")


def test_metrics():
    assert depfix.levenshtein("kitten", "sitting") == 3
    assert depfix.edit_similarity("abc", "abc") == 1.0
    assert depfix.normalize_return_values("x, y = f(a)") == "_, _ = f(a)"
    assert depfix.exact_match("a = f(x)", "   b = f(x)")
    assert not depfix.exact_match("a = f(x)", "a = g(x)")


def test_instruct_template():
    assert depfix.instruct_template("def f():") == (
        "Complete and output the next line for the following Python function: def f():"
    )

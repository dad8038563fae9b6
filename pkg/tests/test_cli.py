import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from cmfourfold import __version__
from cmfourfold.cli import main

GOLDEN_DIR = Path(__file__).parent / "golden"
UPDATE = os.environ.get("CMFOURFOLD_UPDATE_GOLDEN") == "1"

# (golden file, argv, expected exit code)
GOLDEN_CASES = [
    ("shioda_report.json", ["shioda-report", "--json"], 0),
    ("mumford_report.json", ["mumford-report", "--json"], 0),
    ("analyze_elliptic_product.json", ["analyze", "--algebra", "3,4", "--cmtype", "0:1,1:1",
                                       "--json"], 0),
    ("analyze_elliptic_flip.json", ["analyze", "--algebra", "9,3", "--cmtype",
                                    "0:1,0:2,0:4,1:2", "--quad", "3", "--json"], 0),
    ("analyze_invalid.json", ["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:8,1:1",
                              "--json"], 2),
    ("analyze_parse_error.json", ["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:x,1:1",
                                  "--json"], 4),
]


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


@pytest.mark.parametrize("name,argv,code", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_golden_output(name, argv, code):
    got_code, text = run(argv)
    assert got_code == code
    path = GOLDEN_DIR / name
    if UPDATE:
        path.write_text(text)
    assert text == path.read_text(), f"{name} drifted; rerun with CMFOURFOLD_UPDATE_GOLDEN=1"


def test_output_is_deterministic():
    assert run(["mumford-report", "--json"]) == run(["mumford-report", "--json"])


def test_shioda_report_values():
    code, text = run(["shioda-report", "--json"])
    doc = json.loads(text)
    assert code == 0
    assert doc["command"] == "shioda-report"
    assert doc["precision"] == 128 and doc["version"] == __version__
    r = doc["results"]
    assert r["hodge_group_rank"] == 3
    assert [r[f"hodge_class_count_k{k}"] for k in range(1, 5)] == [4, 8, 4, 1]
    assert r["weil_invariant"] == [1, 3]
    assert r["is_cm_mumford"] is False
    assert [3, 0, 3] in r["sym2_six_dim_hodge_numbers"]
    assert r["sym2_totals"] == [10, 16, 10]
    assert r["riemann"]["result"] == "PASS"


def test_mumford_report_values():
    doc = json.loads(run(["mumford-report", "--json"])[1])
    r = doc["results"]
    assert r["cm_type"] == "[9,3]:{0:1,0:2,0:5,1:1}"
    assert r["hodge_group_rank"] == 3
    assert r["equivalent_to_twisted_form"] is True
    assert r["weil_invariant"] == [2, 2]
    assert r["sym2_k3_orbit"] == [1, 4, 1]
    assert r["riemann"]["result"] == "PASS"
    assert r["gram_twist"]["flipped"] == [3, 4]
    assert r["gram_twist"]["weil_invariant"] == [1, 3]
    assert r["threefold_twist"]["weil_invariant"] == [2, 2]
    pm = r["period_matrix"]
    assert len(pm) == 4 and len(pm[0]) == 8 and pm[0][0] == ["1.0", "0.0"]
    assert len(r["polarization_matrix"]["entries"]) == 8


def test_analyze_examples():
    r = json.loads(run(["analyze", "--algebra", "3,4", "--cmtype", "0:1,1:1", "--json"])[1])
    assert r["results"]["hodge_group_rank"] == 2
    r = json.loads(run(["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:2,0:4,1:2",
                        "--quad", "3", "--json"])[1])
    assert r["results"]["weil_invariant"] == [2, 2]
    code, text = run(["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:8,1:1", "--json"])
    assert code == 2
    assert "cardinality 3 != 4" in json.loads(text)["violations"]


def test_analyze_with_twist_unit():
    base = ["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:2,0:4,1:1", "--quad", "3",
            "--json"]
    by_signs = json.loads(run(base + ["--twist-unit", "0:++-"])[1])["results"]
    by_coeffs = json.loads(run(base + ["--twist-unit", "0:0,1,0"])[1])["results"]
    assert by_signs["cm_type"] == by_coeffs["cm_type"] == "[9,3]:{0:1,0:2,0:5,1:1}"
    assert by_signs["weil_invariant"] == [2, 2]
    code, _ = run(base + ["--twist-unit", "0:1,2"])
    assert code == 4
    code, _ = run(base + ["--twist-unit", "5:+"])
    assert code == 4


def test_parse_error_reports_position():
    code, text = run(["analyze", "--algebra", "9,a", "--cmtype", "0:1", "--json"])
    assert code == 4
    assert "position" in json.loads(text)["error"]


def test_quadratic_not_contained_is_a_validation_failure():
    code, _ = run(["analyze", "--algebra", "3,4", "--cmtype", "0:1,1:1", "--quad", "3"])
    assert code == 2


def test_human_output_matches_json():
    for argv in (["shioda-report"], ["mumford-report"],
                 ["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:2,0:4,1:2", "--quad", "3"]):
        doc = json.loads(run(argv + ["--json"])[1])
        _, text = run(argv)
        section = None
        parsed = {"input": {}, "results": {}}
        for line in text.splitlines():
            if line in ("[input]", "[results]"):
                section = line[1:-1]
                continue
            key, _, value = line.partition(": ")
            if section and key in doc[section]:
                parsed[section][key] = json.loads(value)
        assert parsed["results"] == doc["results"]
        assert parsed["input"] == doc["input"]
        assert f"precision: {doc['precision']}" in text


def test_precision_flag():
    doc = json.loads(run(["shioda-report", "--json", "--precision", "256"])[1])
    assert doc["precision"] == 256
    assert doc["results"]["riemann"]["precision"] == 256
    with pytest.raises(SystemExit):
        run(["shioda-report", "--precision", "16"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cmfourfold", "shioda-report", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["hodge_class_count_k2"] == 8


def _lookup(doc, dotted):
    for key in dotted.split("."):
        doc = doc[key]
    return doc


DOCUMENTED_EXAMPLES = [
    (["shioda-report"], "results.hodge_class_count_k2", 8),
    (["shioda-report"], "results.weil_invariant", [1, 3]),
    (["shioda-report"], "results.is_mumford_type", False),
    (["mumford-report"], "results.weil_invariant", [2, 2]),
    (["mumford-report"], "results.sym2_k3_orbit", [1, 4, 1]),
    (["mumford-report"], "results.gram_twist.flipped", [3, 4]),
    (["analyze", "--algebra", "3,4", "--cmtype", "0:1,1:1"], "results.hodge_group_rank", 2),
    (["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:2,0:4,1:2", "--quad", "3"],
     "results.weil_invariant", [2, 2]),
    (["analyze", "--algebra", "9,3", "--cmtype", "0:1,0:2,0:4,1:2", "--quad", "3"],
     "results.is_mumford_type", False),
]


@pytest.mark.parametrize("argv,path,expected", DOCUMENTED_EXAMPLES,
                         ids=[f"{a[0]}-{p}-{i}" for i, (a, p, _) in
                              enumerate(DOCUMENTED_EXAMPLES)])
def test_documented_examples(argv, path, expected):
    code, text = run(argv + ["--json"])
    assert code == 0
    assert _lookup(json.loads(text), path) == expected

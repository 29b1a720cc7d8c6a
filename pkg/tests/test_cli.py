import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relspace.cli import build_parser, main

from conftest import DATA


def run(argv, tmp_path, name="r.json"):
    out = tmp_path / name
    code = main(argv + ["--report", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report, out


def test_verify_formality_a3(tmp_path):
    code, rep, _ = run(["verify-formality", "--family", "A", "--rank", "3"], tmp_path)
    assert code == 0
    assert rep["passed"]
    assert all(not any(h) for h in rep["data"]["per_flat_homology"].values())
    assert rep["data"]["relation_space"]["two_formal"]


def test_verify_formality_nonformal_fixture(tmp_path):
    code, rep, _ = run(["verify-formality", "--input", str(DATA / "nonformal.json")], tmp_path)
    assert code == 1
    check = rep["checks"][0]
    assert not check["passed"]
    assert list(check["witness"].values()) == [[1, 0, 0]]
    assert rep["data"]["relation_space"] == {"local_relations": 0, "relations": 1, "two_formal": False}


def test_malformed_json_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 3, "normals": [[1, 0')
    code, rep, _ = run(["lattice", "--input", str(bad)], tmp_path)
    assert code == 2 and rep is None


def test_missing_file_exits_2(tmp_path):
    assert main(["lattice", "--input", str(tmp_path / "nope.json")]) == 2


def test_usage_errors(tmp_path):
    assert main(["lattice"]) == 2
    assert main(["lattice", "--family", "A"]) == 2
    assert main(["nosuch"]) == 2
    assert main(["suite", "nosuch"]) == 2
    assert main(["relation-algebra", "--tag", "A3", "--k", "9"]) == 2
    assert main(["relation-algebra", "--tag", "A3", "--nodes", "1,2"]) == 2
    assert main(["bruhat", "--n", "4", "--k", "1", "--nodes", "4,3,2,1"]) == 2


def test_family_shorthands(tmp_path):
    _, a, _ = run(["lattice", "--family", "Phi", "--n", "3", "--m", "1"], tmp_path, "a.json")
    _, b, _ = run(["lattice", "--tag", "Phi(3,1)"], tmp_path, "b.json")
    assert a["data"] == b["data"]
    assert a["data"]["flats_per_rank"] == [1, 7, 9, 1]


def test_reports_are_deterministic(tmp_path):
    argv = ["relation-algebra", "--tag", "A2", "--k", "1", "--seed", "5", "--max-deg", "2"]
    _, _, p1 = run(argv, tmp_path, "1.json")
    _, _, p2 = run(argv, tmp_path, "2.json")
    r1, r2 = json.loads(p1.read_text()), json.loads(p2.read_text())
    r1.pop("timing"), r2.pop("timing")
    assert r1 == r2
    text = p1.read_text()
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"


def test_relation_algebra_report(tmp_path):
    code, rep, _ = run(["relation-algebra", "--family", "A", "--rank", "3", "--k", "1", "--nodes", "1,2,3,4",
                        "--max-deg", "3"], tmp_path)
    assert code == 0
    d = rep["data"]
    assert d["hilbert"] == [1, 11, 54, 178]
    assert d["generation"] == [1, 5, 3, 0]
    assert d["numerator_prefix"] == [1, 5, 3, -1]
    assert d["flags"] == {"free_witness_negative": True}
    assert set(d["exactness"]) == {"0", "1", "2", "3"}
    assert "timing" in rep and "total_seconds" in rep["timing"]


def test_bruhat_report(tmp_path):
    code, rep, _ = run(["bruhat", "--n", "4", "--k", "1"], tmp_path)
    assert code == 0
    assert rep["data"]["n_vertices"] == 8
    assert all(isinstance(a, str) for a in rep["data"]["data"]["alpha"].values())


def test_zonotope_dump(tmp_path):
    dump = tmp_path / "faces.json"
    code, rep, _ = run(["zonotope", "--family", "A", "--rank", "2", "--oracle", "--dump", str(dump)], tmp_path)
    assert code == 0
    assert rep["data"]["f_vector"] == [6, 6, 1]
    assert json.loads(dump.read_text())["f_vector"] == [6, 6, 1]


@pytest.mark.parametrize("argv", [
    ["relation-complex", "--tag", "B3"],
    ["homotopy", "--tag", "D4"],
    ["homotopy", "--tag", "Phi(4,2)"],
    ["appendix-check", "--tag", "B3", "--variant", "equivariant", "--compare"],
    ["appendix-check", "--tag", "Phi(3,1)", "--compare"],
    ["os-algebra", "--tag", "A3", "--kind", "generalized"],
    ["os-algebra", "--tag", "A3", "--kind", "projected", "--k", "1", "--nodes", "1,2,3,4"],
])
def test_subcommands_pass(argv, tmp_path):
    code, rep, _ = run(argv, tmp_path)
    assert code == 0, rep["checks"]
    assert rep["tool"] == "relspace" and rep["command"] == argv[0]


def test_report_to_stdout(capsys):
    assert main(["lattice", "--tag", "A2"]) == 0
    assert json.loads(capsys.readouterr().out)["data"]["n_flats"] == 5


def test_help_documents_caps():
    text = build_parser().format_help()
    assert "RELSPACE_SLICE_CAP" in text and "RELSPACE_FACE_CAP" in text


def test_suite_bruhat(tmp_path):
    code, rep, _ = run(["suite", "bruhat"], tmp_path)
    assert code == 0
    assert [c["name"] for c in rep["checks"]] == ["criterion_10"]
    assert "criterion_10" in rep["timing"]


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-3, 3) | st.text(max_size=4) | st.floats(allow_nan=True),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.sampled_from(["dim", "normals", "name", "x"]),
                                                                inner, max_size=3),
    max_leaves=12)

fuzz_inputs = st.one_of(
    json_values.map(json.dumps),
    st.builds(lambda d, n: json.dumps({"dim": d, "normals": n}), st.integers(-1, 3),
              st.lists(st.lists(st.one_of(st.integers(-2, 2), st.sampled_from(["1/2", "x", "1/0", ""])),
                                max_size=3), max_size=4)),
    st.text(max_size=30),
)


@settings(max_examples=60)
@given(fuzz_inputs)
def test_fuzzed_inputs_never_crash(tmp_path_factory, text):
    d = tmp_path_factory.mktemp("fuzz")
    f = d / "in.json"
    f.write_text(text)
    for cmd in ["lattice", "verify-formality"]:
        code = main([cmd, "--input", str(f), "--report", str(d / "out.json")])
        assert code in (0, 1, 2)

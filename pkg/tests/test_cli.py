import json
import subprocess
import sys

import pytest

from eqtel.cli import main
from eqtel.io import InputError, load_input, parse_document


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--seed", "0", "--count", "100")
    assert code == 0
    assert "telescope: 100/100 passed" in out


def test_verify_with_injected_fault_fails(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--seed", "0", "--count", "5", "--inject-fault", "increment", "--out", str(tmp_path / "v"))
    assert code == 1
    assert "\"identity\": \"telescope differential squares to zero\"" in err
    report = json.loads((tmp_path / "v.json").read_text())
    assert report["suites"][0]["failures"]


def test_verify_with_zero_count(capsys):
    code, out, _ = run(capsys, "verify", "--count", "0")
    assert code == 0
    assert "telescope: 0/0 passed" in out


def test_negative_count_is_an_input_error(capsys):
    code, _, err = run(capsys, "verify", "--count", "-1")
    assert code == 2
    assert "--count" in err


def test_equivariant_writes_json_and_tsv(capsys, tmp_path):
    prefix = tmp_path / "circle"
    code, out, _ = run(capsys, "equivariant", "fixture:circle", "--group", "z2", "--max-degree", "2", "--out", str(prefix))
    assert code == 0
    assert out == ""
    report = json.loads(prefix.with_suffix(".json").read_text())
    assert [d["rank"] for d in report["degrees"]] == [1, 2, 2]
    tsv = prefix.with_suffix(".tsv").read_text().splitlines()
    assert len(tsv) == 4


def test_equivariant_to_stdout_with_kirwan(capsys):
    code, out, _ = run(capsys, "equivariant", "fixture:octahedron", "--max-degree", "2", "--kirwan")
    assert code == 0
    report = json.loads(out)
    assert [d["rank"] for d in report["degrees"]] == [1, 1, 1]
    assert report["kirwan"]["isomorphism_in_stable_range"]
    assert all(d["two_sided_inverse"] for d in report["kirwan"]["degrees"])


def test_unstable_is_reported_in_band(capsys):
    code, out, _ = run(capsys, "equivariant", "fixture:point", "--group", "z3", "--max-degree", "3", "--stages", "2")
    assert code == 0
    assert json.loads(out)["degrees"][3]["rank"] == "unstable at this K"


def test_kirwan_command(capsys):
    code, out, _ = run(capsys, "kirwan", "fixture:square_circle", "--max-degree", "1")
    assert code == 0
    report = json.loads(out)
    assert [d["K"] for d in report["degrees"]] == [["1"], ["1"]]
    assert [d["K_prime"] for d in report["degrees"]] == [["1"], ["1"]]


def test_kirwan_rejects_non_free_action(capsys):
    code, _, err = run(capsys, "kirwan", "fixture:point", "--group", "z2", "--max-degree", "1")
    assert code == 2
    assert "free" in err


def test_module_command(capsys):
    code, out, _ = run(capsys, "module", "fixture:point", "--group", "z2", "--max-degree", "3", "--action-degree", "1")
    assert code == 0
    report = json.loads(out)
    assert report["products_compatible"] is True
    t = report["generators"][1]
    assert [a["rank"] for a in t["actions"]] == [1, 1, 1]


def test_module_with_action_degree_zero_is_identity(capsys):
    code, out, _ = run(capsys, "module", "fixture:circle", "--group", "z2", "--max-degree", "2", "--action-degree", "0")
    assert code == 0
    (gen,) = json.loads(out)["generators"]
    assert [a["matrix"] for a in gen["actions"]] == [["1"], ["10", "01"], ["10", "01"]]


def test_malformed_facet_names_the_facet(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"vertices": ["a", "b"], "facets": [["a", "b"], ["a", "zz"]]}))
    code, _, err = run(capsys, "equivariant", str(path), "--group", "z2")
    assert code == 2
    assert "facets[1]" in err


def test_json_syntax_error_reports_position(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"vertices": ["a"],\n "facets": [["a"]]\n')
    code, _, err = run(capsys, "equivariant", str(path), "--group", "z2")
    assert code == 2
    assert "line 3, column 1" in err


def test_missing_file_and_unknown_fixture(capsys):
    assert run(capsys, "equivariant", "/nonexistent/input.json", "--group", "z2")[0] == 2
    code, _, err = run(capsys, "equivariant", "fixture:nope", "--group", "z2")
    assert code == 2
    assert "nope" in err


def test_bad_permutation_is_located():
    doc = {
        "vertices": ["a", "b"],
        "facets": [["a", "b"]],
        "group": {"elements": ["e", "g"], "table": [["e", "g"], ["g", "e"]], "perms": {"g": {"a": "a", "b": "a"}}},
    }
    with pytest.raises(InputError) as info:
        parse_document(json.dumps(doc))
    assert "perms" in str(info.value)


def test_group_table_from_input():
    doc = load_input("fixture:square_circle")
    assert doc.action.group.name == "z2"
    assert doc.action.is_free_on_vertices()


def test_reports_are_byte_deterministic(tmp_path):
    outs = []
    for i in range(2):
        prefix = tmp_path / f"r{i}"
        assert main(["equivariant", "fixture:point", "--group", "z2xz2", "--max-degree", "2", "--out", str(prefix)]) == 0
        outs.append((prefix.with_suffix(".json").read_bytes(), prefix.with_suffix(".tsv").read_bytes()))
    assert outs[0] == outs[1]


def test_morse_reduce_flag_keeps_ranks_and_matrices(capsys):
    base = ["module", "fixture:point", "--group", "z2", "--max-degree", "3", "--action-degree", "2"]
    _, plain, _ = run(capsys, *base)
    _, reduced, _ = run(capsys, *base, "--morse-reduce")
    a, b = json.loads(plain), json.loads(reduced)
    assert a["generators"] == b["generators"]
    assert b["morse_reduced"] is True


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "eqtel.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("eqtel")

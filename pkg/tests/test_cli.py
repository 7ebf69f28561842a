import json
from fractions import Fraction

import jsonschema
import pytest

import golden
from hopfnet.cli import EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, run
from hopfnet.schemas import load_schema


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    doc = json.loads(out) if out.strip() else None
    return code, doc, err


def validated(doc):
    jsonschema.validate(doc, load_schema(doc["command"]))
    return doc


def test_parse_envelope(capsys):
    code, doc, _ = invoke(capsys, "parse", "calcium", "--seed", "7", "--precision", "30")
    assert code == EXIT_OK
    validated(doc)
    assert doc["run"]["seed"] == 7 and doc["run"]["precision"] == 30
    assert doc["command"] == "parse"


def test_rays_calcium(capsys):
    code, doc, _ = invoke(capsys, "rays", "fixtures/calcium.crn")
    assert code == EXIT_OK
    validated(doc)
    cols = sorted(tuple(c) for c in doc["extremeMatrix"]["columns"])
    assert cols == sorted(golden.CALCIUM_E_COLUMNS)


@pytest.mark.parametrize("command", ["jacobian", "charpoly", "motifs"])
def test_structural_commands_validate(capsys, command):
    code, doc, _ = invoke(capsys, command, "calcium")
    assert code == EXIT_OK
    validated(doc)


def test_hurwitz_inconclusive_exit_code(capsys):
    code, doc, _ = invoke(capsys, "hurwitz", "calcium")
    assert code == EXIT_NEGATIVE
    validated(doc)


def test_hurwitz_g1r_not_precluded(capsys):
    code, doc, _ = invoke(capsys, "hurwitz", "g1r")
    assert code == EXIT_NEGATIVE
    validated(doc)


def test_reduce_with_identity(capsys):
    code, doc, _ = invoke(capsys, "reduce", "g1", "--motif", "k10", "--check-identity")
    assert code == EXIT_OK
    validated(doc)


def test_reduce_reports_failed_assumptions(capsys):
    # the reduction itself is still produced; only the structural checks are skipped
    code, doc, _ = invoke(capsys, "reduce", "calcium", "--motif", "k5")
    assert code == EXIT_OK
    validated(doc)
    assert doc["removed"] == "k5" and "structureHolds" not in doc


def test_witness_check_calcium(capsys):
    kappa = ",".join(str(v) for v in golden.CALCIUM_WITNESS_KAPPA)
    x = ",".join(str(v) for v in golden.CALCIUM_WITNESS_X)
    code, doc, _ = invoke(capsys, "witness", "check", "calcium_reduced", "--kappa", kappa, "--x", x)
    assert code == EXIT_OK
    validated(doc)
    assert doc["steadyState"]["exact"]
    assert doc["exactPureImaginary"] is not None


def test_phi_alias_matches_witness_phi(capsys):
    # the CLI takes l against the canonical rays printed by `rays`
    _, rays, _ = invoke(capsys, "rays", "processive")
    printed = {tuple(c): v for c, v in zip(golden.PROC_E_COLUMNS, golden.PROC_L)}
    l = [printed[tuple(c)] for c in rays["extremeMatrix"]["columns"]]
    args = ["--h", ",".join(map(str, golden.PROC_H)), "--l", ",".join(map(str, l))]
    code, a, _ = invoke(capsys, "phi", "processive", *args)
    code2, b, _ = invoke(capsys, "witness", "phi", "processive", *args)
    assert code == code2 == EXIT_OK
    validated(a)
    validated(b)
    assert a["phi"]["hPrime"] == b["phi"]["hPrime"]
    assert a["phi"]["charpolyEqual"]
    assert abs(a["phi"]["hPrime"][0]["approx"] - golden.PROC_H_PRIME[0]) < 5e-5
    assert all(Fraction(v) > 0 for v in a["phi"]["lPrime"])


def test_sample_calcium(capsys, tmp_path):
    out = tmp_path / "s.json"
    code, doc, _ = invoke(capsys, "sample", "calcium", "--trials", "50", "--seed", "3", "--out", str(out))
    assert code == EXIT_OK and doc is None
    doc = validated(json.loads(out.read_text()))
    assert doc["calciumImage"]["seed"] == 3


def test_sample_implication_small(capsys):
    code, doc, _ = invoke(capsys, "sample", "implication", "--trials", "20")
    assert code == EXIT_OK
    validated(doc)


def test_prove_single_subcase(capsys):
    code, doc, _ = invoke(capsys, "prove", "g1r", "--subcases", "1a", "--jobs", "1")
    assert code == EXIT_OK
    validated(doc)
    assert doc["run"]["mode"] == "fast"


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["rays"],
        ["rays", "no_such_network"],
        ["prove", "g1r", "--fast", "--full"],
        ["witness", "check", "calcium", "--kappa", "1,2", "--x", "1"],
        ["witness", "check", "calcium_reduced", "--kappa", "1,1,1,1,0", "--x", "1,1,1,1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, doc, err = invoke(capsys, *argv)
    assert code == EXIT_USAGE
    assert doc is None and err


def test_malformed_network_file(capsys, tmp_path):
    p = tmp_path / "bad.crn"
    p.write_text("A -> B -> C\n")
    code, _, err = invoke(capsys, "parse", str(p))
    assert code == EXIT_USAGE
    assert "line 1" in err or "arrow" in err

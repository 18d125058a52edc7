from __future__ import annotations

import io
import json
import shutil

import pytest

from frobmodel.algebra import truncated_polynomial, validate_algebra
from frobmodel.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from frobmodel.formats import (
    CATALOG_ENV,
    FormatError,
    algebra_to_doc,
    catalog_dir,
    catalog_names,
    load_algebra_file,
    load_morphism_file,
    parse_algebra,
    parse_morphism,
    resolve_algebra,
    resolve_module,
    same_presentation,
)


def run(*argv: str) -> tuple[int, str]:
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def records(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines()]


# ---------------------------------------------------------------------------
# formats

def test_algebra_round_trip():
    pres = truncated_polynomial(3, 3)
    back = parse_algebra(json.loads(json.dumps(algebra_to_doc(pres))))
    assert same_presentation(pres, back)


def test_catalog_contents_validate():
    names = catalog_names()
    assert {"f2_x2", "f3_x3", "f2_klein", "f5"} <= set(names)
    for n in names:
        validate_algebra(resolve_algebra(n))


def test_catalog_dir_from_environment(tmp_path, monkeypatch):
    shutil.copy(catalog_dir() / "f2_x2.json", tmp_path / "mine.json")
    monkeypatch.setenv(CATALOG_ENV, str(tmp_path))
    assert catalog_names() == ["mine"]
    assert resolve_algebra("mine").dim == 2
    with pytest.raises(FormatError, match="mine"):
        resolve_algebra("f3_x3")


def test_malformed_json_reports_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"p": 2,\n "dim": 2,\n oops}\n')
    with pytest.raises(FormatError, match=r"bad\.json:3:2"):
        load_algebra_file(bad)


def test_missing_and_wrong_fields_are_named(tmp_path):
    doc = algebra_to_doc(truncated_polynomial(2, 2))
    del doc["unit"]
    with pytest.raises(FormatError, match="unit"):
        parse_algebra(doc, "a.json")
    doc = algebra_to_doc(truncated_polynomial(2, 2))
    doc["structure_constants"][1] = [0, 7, 1, 1]
    with pytest.raises(FormatError, match=r"structure_constants\[1\]"):
        parse_algebra(doc, "a.json")
    doc = algebra_to_doc(truncated_polynomial(2, 2))
    doc["frobenius_functional"] = [0, 1, 0]
    with pytest.raises(FormatError, match="frobenius_functional"):
        parse_algebra(doc, "a.json")


def test_module_refs(B3):
    assert resolve_module("cyclic:2", B3).dim == 2
    assert resolve_module("omega:cyclic:1", B3).dim == 2
    assert resolve_module("sigma:simple", B3).dim == 2
    assert resolve_module("free:2", B3).dim == 6
    assert resolve_module("radical:1", B3).dim == 2
    assert resolve_module({"dim": 1, "action": [[[1]], [[0]], [[0]]]}, B3).dim == 1
    with pytest.raises(FormatError):
        resolve_module("nonsense", B3)
    with pytest.raises(FormatError, match="action"):
        resolve_module({"dim": 1, "action": [[[1]], [[1]], [[0]]]}, B3)


def test_morphism_must_intertwine(A2):
    doc = {"source": "regular", "target": "simple", "matrix": [[0, 1]]}
    with pytest.raises(FormatError, match="matrix"):
        parse_morphism(doc, A2)
    doc["matrix"] = [[1, 0]]
    assert parse_morphism(doc, A2).is_surjective()
    doc["matrix"] = [[1, 0, 0]]
    with pytest.raises(FormatError, match="matrix"):
        parse_morphism(doc, A2)


def test_morphism_algebra_field_is_checked(tmp_path, A2):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"algebra": "truncated_polynomial(3,3)", "source": "simple",
                                "target": "simple", "matrix": [[1]]}))
    with pytest.raises(FormatError, match="algebra"):
        load_morphism_file(path, A2)


# ---------------------------------------------------------------------------
# command line

def test_check_algebra_exit_codes(tmp_path):
    assert run("check-algebra", "truncated_polynomial(3,3)")[0] == EXIT_OK
    doc = algebra_to_doc(truncated_polynomial(2, 2))
    doc["frobenius_functional"] = [1, 0]
    degenerate = tmp_path / "degenerate.json"
    degenerate.write_text(json.dumps(doc))
    code, out = run("check-algebra", str(degenerate), "--format", "structured")
    assert code == EXIT_FAIL
    assert records(out)[-1]["failed_axiom"] == "frobenius form degenerate"
    broken = tmp_path / "malformed.json"
    broken.write_text("{\n  \"p\": 2,\n\n")
    assert run("check-algebra", str(broken))[0] == EXIT_USAGE
    assert run("check-algebra", "no_such_thing")[0] == EXIT_USAGE


def test_unknown_options_are_usage_errors():
    assert run("axioms")[0] == EXIT_USAGE
    assert run("axioms", "f2_x2", "--seed", "-1")[0] == EXIT_USAGE
    assert run("axioms", "f2_x2", "--checks", "M1,M9")[0] == EXIT_USAGE


def test_stable_hom_command():
    code, out = run("stable-hom", "f2_x2", "simple", "simple", "--format", "structured")
    assert code == EXIT_OK
    recs = records(out)
    assert recs[0]["record"] == "header"
    assert [r["dim"] for r in recs if r["record"] == "stable_hom"] == [1]
    code, out = run("stable-hom", "f2_x2", "regular", "simple", "--format", "structured")
    assert [r["dim"] for r in records(out) if r["record"] == "stable_hom"] == [0]


def test_omega_orbit_command():
    code, out = run("omega-orbit", "f3_x3", "cyclic:1", "--format", "structured")
    assert code == EXIT_OK
    dims = [r["dim"] for r in records(out) if r["record"] == "omega"]
    assert dims == [1, 2, 1, 2, 1]
    code, out = run("omega-orbit", "f3_x3", "regular", "--steps", "2", "--format", "structured")
    assert [r["iso_class"] for r in records(out) if r["record"] == "omega"][1:] == ["0", "0"]


def test_triangle_command(tmp_path):
    fib = tmp_path / "p.json"
    fib.write_text(json.dumps({"source": "regular", "target": "simple", "matrix": [[1, 0]]}))
    code, out = run("triangle", "f2_x2", str(fib), "--format", "structured")
    assert code == EXIT_OK
    assert records(out)[-1]["result"] == "isomorphic"
    inc = tmp_path / "i.json"
    inc.write_text(json.dumps({"source": "simple", "target": "regular", "matrix": [[0], [1]]}))
    code, out = run("triangle", "f2_x2", str(inc), "--which", "quillen", "--format", "structured")
    assert code == EXIT_FAIL and "not a fibration" in records(out)[-1]["message"]
    code, _ = run("triangle", "f2_x2", str(inc), "--which", "happel")
    assert code == EXIT_OK
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({"source": "regular", "target": "simple", "matrix": [[0, 1]]}))
    assert run("triangle", "f2_x2", str(bad))[0] == EXIT_USAGE


def test_export_round_trips(tmp_path):
    code, out = run("export-algebra", "group_algebra_elementary_abelian(2,2)")
    assert code == EXIT_OK
    path = tmp_path / "k.json"
    path.write_text(out)
    assert run("check-algebra", str(path))[0] == EXIT_OK
    assert same_presentation(load_algebra_file(path), resolve_algebra("f2_klein"))


def test_axioms_structured_output_is_byte_identical():
    argv = ("axioms", "f3_x3", "--samples", "15", "--seed", "4", "--format", "structured")
    c1, a = run(*argv)
    c2, b = run(*argv)
    assert c1 == c2 == EXIT_OK and a == b
    recs = records(a)
    assert recs[0]["record"] == "header" and recs[0]["seed"] == 4
    assert {r["axiom"] for r in recs if r["record"] == "axiom"} >= {"M0", "M1", "M2", "M3", "M4", "retract"}


def test_axioms_text_output_mentions_every_axiom():
    code, out = run("axioms", "f5", "--samples", "10")
    assert code == EXIT_OK
    for name in ("M0", "M1", "M2", "M3", "M4", "retract"):
        assert name in out

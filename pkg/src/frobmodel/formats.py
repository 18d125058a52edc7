"""JSON file formats for algebras, modules and morphisms.

Algebra file::

    {"p": 3, "dim": 3, "basis_names": ["1", "x", "x^2"],
     "structure_constants": [[0, 0, 0, 1], [0, 1, 1, 1], ...],
     "unit": [1, 0, 0], "frobenius_functional": [0, 0, 1]}

``structure_constants`` lists ``[i, j, k, v]`` meaning ``e_i e_j`` has
coefficient ``v`` on ``e_k``; zero entries are omitted.

Module file::

    {"algebra": "truncated_polynomial(3,3)", "dim": 2,
     "action": [[[1, 0], [0, 1]], [[0, 0], [1, 0]], [[0, 0], [0, 0]]]}

Morphism file::

    {"algebra": "...", "source": <module ref>, "target": <module ref>,
     "matrix": [[...], ...]}

A module ref is a path to a module file, an inline module object, or one of
the builtin names ``regular``, ``simple``, ``zero``, ``free:g``, ``cyclic:k``
(``A / rad^k``), ``radical:k`` (``rad^k A``), optionally wrapped as
``omega:<ref>`` or ``sigma:<ref>``.

An algebra ref is a path, a builtin expression such as
``truncated_polynomial(3,3)`` or ``field(5)``, or the name of a file in the
catalog directory (``$FROBMODEL_CATALOG``, else the packaged catalog).
"""

from __future__ import annotations

import json
import os
import re
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import (
    BUILTIN_FAMILIES,
    AlgebraPresentation,
    CheckedAlgebra,
    ModuleError,
    ModuleHom,
    ModuleRep,
    builtin_algebra,
    cosyzygy,
    radical_power_module,
    syzygy,
)
from .linalg import PrimeFieldMatrix

CATALOG_ENV = "FROBMODEL_CATALOG"
_BUILTIN_RE = re.compile(r"^\s*([a-z_]+)\s*\(\s*([0-9,\s]*)\)\s*$")


class FormatError(ValueError):
    """Malformed input; the message names the file and the line or field."""


def _where(source: str, field: str) -> str:
    return f"{source}: field '{field}'"


def _read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read file: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{where}: expected an integer, got {json.dumps(value)}")
    return value


def _int_list(value: Any, where: str, length: int | None = None) -> list[int]:
    if not isinstance(value, list):
        raise FormatError(f"{where}: expected a list, got {type(value).__name__}")
    if length is not None and len(value) != length:
        raise FormatError(f"{where}: expected {length} entries, got {len(value)}")
    return [_int(v, f"{where}[{k}]") for k, v in enumerate(value)]


def _matrix(value: Any, where: str, rows: int, cols: int) -> list[list[int]]:
    if not isinstance(value, list) or len(value) != rows:
        got = len(value) if isinstance(value, list) else type(value).__name__
        raise FormatError(f"{where}: expected {rows} rows, got {got}")
    return [_int_list(r, f"{where}[{k}]", cols) for k, r in enumerate(value)]


def _require(doc: Any, key: str, source: str) -> Any:
    if not isinstance(doc, dict):
        raise FormatError(f"{source}: expected a JSON object at top level")
    if key not in doc:
        raise FormatError(f"{_where(source, key)}: missing")
    return doc[key]


# ---------------------------------------------------------------------------
# algebras

def parse_algebra(doc: Any, source: str = "<algebra>") -> AlgebraPresentation:
    p = _int(_require(doc, "p", source), _where(source, "p"))
    if p < 2:
        raise FormatError(f"{_where(source, 'p')}: must be a prime, got {p}")
    d = _int(_require(doc, "dim", source), _where(source, "dim"))
    if d < 1:
        raise FormatError(f"{_where(source, 'dim')}: must be positive, got {d}")
    raw = _require(doc, "structure_constants", source)
    if not isinstance(raw, list):
        raise FormatError(f"{_where(source, 'structure_constants')}: expected a list of [i, j, k, v]")
    quads = []
    for n, q in enumerate(raw):
        w = _where(source, f"structure_constants[{n}]")
        i, j, k, v = _int_list(q, w, 4)
        if not all(0 <= t < d for t in (i, j, k)):
            raise FormatError(f"{w}: index out of range for dim {d}")
        quads.append((i, j, k, v % p))
    unit = _int_list(_require(doc, "unit", source), _where(source, "unit"), d)
    lam = _int_list(_require(doc, "frobenius_functional", source), _where(source, "frobenius_functional"), d)
    names = doc.get("basis_names")
    if names is not None:
        if not isinstance(names, list) or len(names) != d or not all(isinstance(s, str) for s in names):
            raise FormatError(f"{_where(source, 'basis_names')}: expected {d} strings")
        names = tuple(names)
    name = doc.get("name", Path(source).stem if source != "<algebra>" else "")
    if not isinstance(name, str):
        raise FormatError(f"{_where(source, 'name')}: expected a string")
    return AlgebraPresentation(p, d, tuple(quads), tuple(x % p for x in unit),
                               tuple(x % p for x in lam), names, name)


def algebra_to_doc(pres: AlgebraPresentation) -> dict:
    doc: dict[str, Any] = {"name": pres.name, "p": pres.p, "dim": pres.dim}
    if pres.basis_names:
        doc["basis_names"] = list(pres.basis_names)
    doc["structure_constants"] = [list(q) for q in sorted(pres.structure_constants) if q[3] % pres.p]
    doc["unit"] = list(pres.unit)
    doc["frobenius_functional"] = list(pres.frobenius_functional)
    return doc


def dump_algebra(pres: AlgebraPresentation) -> str:
    return json.dumps(algebra_to_doc(pres), indent=1) + "\n"


def load_algebra_file(path: str | Path) -> AlgebraPresentation:
    return parse_algebra(_read_json(path), str(path))


def catalog_dir() -> Path:
    env = os.environ.get(CATALOG_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("frobmodel") / "catalog"))


def catalog_names() -> list[str]:
    d = catalog_dir()
    return sorted(f.stem for f in d.glob("*.json")) if d.is_dir() else []


def parse_builtin(ref: str) -> AlgebraPresentation | None:
    m = _BUILTIN_RE.match(ref)
    if not m or m.group(1) not in BUILTIN_FAMILIES:
        return None
    args = [int(a) for a in m.group(2).replace(" ", "").split(",") if a]
    try:
        return builtin_algebra(m.group(1), *args)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"builtin algebra {ref!r}: {exc}") from None


def resolve_algebra(ref: str, base: Path | None = None) -> AlgebraPresentation:
    """Path, builtin expression, or catalog name, tried in that order."""
    path = Path(ref) if base is None or Path(ref).is_absolute() else base / ref
    if path.is_file():
        return load_algebra_file(path)
    pres = parse_builtin(ref)
    if pres is not None:
        return pres
    cat = catalog_dir() / f"{ref}.json"
    if cat.is_file():
        return load_algebra_file(cat)
    raise FormatError(f"algebra reference {ref!r}: no such file, builtin or catalog entry "
                      f"(catalog: {', '.join(catalog_names()) or 'empty'})")


def same_presentation(a: AlgebraPresentation, b: AlgebraPresentation) -> bool:
    return (a.p == b.p and a.dim == b.dim and a.unit == b.unit
            and a.frobenius_functional == b.frobenius_functional
            and np.array_equal(a.constants(), b.constants()))


# ---------------------------------------------------------------------------
# modules and morphisms

def builtin_module(algebra: CheckedAlgebra, ref: str) -> ModuleRep | None:
    if ref.startswith("omega:"):
        inner = builtin_module(algebra, ref[6:])
        return None if inner is None else syzygy(inner)
    if ref.startswith("sigma:"):
        inner = builtin_module(algebra, ref[6:])
        return None if inner is None else cosyzygy(inner)
    if ref == "regular":
        return algebra.regular_module()
    if ref == "simple":
        return algebra.simple_module()
    if ref == "zero":
        return algebra.zero_module()
    m = re.fullmatch(r"(free|cyclic|radical):(\d+)", ref)
    if not m:
        return None
    k = int(m.group(2))
    if m.group(1) == "free":
        return algebra.free_module(k)
    if m.group(1) == "cyclic":
        return algebra.cyclic_module(k)
    return radical_power_module(algebra, k)


def _check_algebra_field(doc: dict, algebra: CheckedAlgebra, source: str, base: Path | None) -> None:
    ref = doc.get("algebra")
    if ref is None:
        return
    if not isinstance(ref, str):
        raise FormatError(f"{_where(source, 'algebra')}: expected a string reference")
    if not same_presentation(resolve_algebra(ref, base), algebra.presentation):
        raise FormatError(f"{_where(source, 'algebra')}: {ref!r} differs from the algebra in use")


def parse_module(doc: Any, algebra: CheckedAlgebra, source: str = "<module>",
                 base: Path | None = None) -> ModuleRep:
    _check_algebra_field(doc if isinstance(doc, dict) else {}, algebra, source, base)
    n = _int(_require(doc, "dim", source), _where(source, "dim"))
    if n < 0:
        raise FormatError(f"{_where(source, 'dim')}: must be nonnegative")
    action = _require(doc, "action", source)
    if not isinstance(action, list) or len(action) != algebra.dim:
        raise FormatError(f"{_where(source, 'action')}: expected {algebra.dim} matrices")
    mats = [PrimeFieldMatrix(algebra.p, _matrix(m, _where(source, f"action[{i}]"), n, n), shape=(n, n))
            for i, m in enumerate(action)]
    try:
        return ModuleRep(algebra, mats, name=doc.get("name") or Path(source).stem)
    except ModuleError as exc:
        raise FormatError(f"{_where(source, 'action')}: {exc}") from None


def module_to_doc(x: ModuleRep, algebra_ref: str | None = None) -> dict:
    doc: dict[str, Any] = {}
    if algebra_ref:
        doc["algebra"] = algebra_ref
    doc["dim"] = x.dim
    doc["action"] = [m.tolist() for m in x.action]
    return doc


def resolve_module(ref: Any, algebra: CheckedAlgebra, base: Path | None = None,
                   where: str = "<module ref>") -> ModuleRep:
    if isinstance(ref, dict):
        return parse_module(ref, algebra, where, base)
    if not isinstance(ref, str):
        raise FormatError(f"{where}: expected a module reference string or object")
    mod = builtin_module(algebra, ref)
    if mod is not None:
        return mod
    path = Path(ref) if base is None or Path(ref).is_absolute() else base / ref
    if path.is_file():
        return parse_module(_read_json(path), algebra, str(path), path.parent)
    raise FormatError(f"{where}: {ref!r} is neither a module file nor a builtin module name")


def parse_morphism(doc: Any, algebra: CheckedAlgebra, source: str = "<morphism>",
                   base: Path | None = None) -> ModuleHom:
    _check_algebra_field(doc if isinstance(doc, dict) else {}, algebra, source, base)
    x = resolve_module(_require(doc, "source", source), algebra, base, _where(source, "source"))
    y = resolve_module(_require(doc, "target", source), algebra, base, _where(source, "target"))
    rows = _matrix(_require(doc, "matrix", source), _where(source, "matrix"), y.dim, x.dim)
    mat = PrimeFieldMatrix(algebra.p, rows, shape=(y.dim, x.dim))
    try:
        return ModuleHom(x, y, mat)
    except ModuleError as exc:
        raise FormatError(f"{_where(source, 'matrix')}: not a module homomorphism: {exc}") from None


def load_morphism_file(path: str | Path, algebra: CheckedAlgebra) -> ModuleHom:
    return parse_morphism(_read_json(path), algebra, str(path), Path(path).parent)


def matrix_doc(f: ModuleHom) -> dict:
    return {"source_dim": f.source.dim, "target_dim": f.target.dim, "matrix": f.matrix.tolist()}

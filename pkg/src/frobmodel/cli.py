"""Command-line front end.

Exit status: 0 on success, 1 on a mathematical failure (invalid algebra,
failed axiom, rejected construction), 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Callable

from .algebra import AlgebraError, CheckedAlgebra, ModuleError, syzygy, validate_algebra
from .axioms import ALL_CHECKS, CORE_AXIOMS, SamplerConfig, verify_axioms
from .formats import (
    CATALOG_ENV,
    FormatError,
    dump_algebra,
    load_morphism_file,
    matrix_doc,
    resolve_algebra,
    resolve_module,
)
from .frobcat import stable_hom_basis, stable_hom_dim
from .sampling import match_catalog, module_catalog
from .triangulated import (
    NotAFibrationError,
    TriangleData,
    happel_left_triangle,
    happel_triangle,
    quillen_left_triangle,
    triangles_isomorphic,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    seed: int
    samples: int
    dim_bound: int
    fmt: str

    def header(self, **extra: Any) -> dict[str, Any]:
        rec = {"record": "header", "command": self.command, "inputs": self.inputs,
               "seed": self.seed, "samples": self.samples, "dim_bound": self.dim_bound}
        rec.update(extra)
        return rec


class Emitter:
    """Collects records; prints JSON lines or indented text at the end."""

    def __init__(self, fmt: str, out=None):
        self.fmt = fmt
        self.out = out or sys.stdout
        self.records: list[dict[str, Any]] = []

    def add(self, rec: dict[str, Any]) -> None:
        self.records.append(rec)

    def flush(self) -> None:
        if self.fmt == "structured":
            for r in self.records:
                self.out.write(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n")
            return
        for r in self.records:
            kind = r.get("record", "")
            body = {k: v for k, v in r.items() if k != "record"}
            parts = []
            for k, v in body.items():
                if isinstance(v, dict) and "matrix" in v:
                    v = f"{v['target_dim']}x{v['source_dim']} {v['matrix']}"
                elif isinstance(v, (list, dict)):
                    v = json.dumps(v)
                parts.append(f"{k}={v}")
            self.out.write(f"{kind}: " + ", ".join(parts) + "\n")


def _load_algebra(ref: str) -> CheckedAlgebra:
    return validate_algebra(resolve_algebra(ref))


# ---------------------------------------------------------------------------
# commands

def cmd_check_algebra(args, cfg: RunConfig, em: Emitter) -> int:
    pres = resolve_algebra(args.algebra)
    em.add(cfg.header(algebra=pres.name, p=pres.p, algebra_dim=pres.dim))
    try:
        A = validate_algebra(pres)
    except AlgebraError as exc:
        em.add({"record": "validation", "valid": False, "failed_axiom": exc.kind, "message": str(exc)})
        return EXIT_FAIL
    em.add({"record": "validation", "valid": True, "checks": ["associativity", "unit", "frobenius_form"],
            "radical_dim": int(A.radical.shape[1]), "local": A.is_local})
    return EXIT_OK


def cmd_axioms(args, cfg: RunConfig, em: Emitter) -> int:
    A = _load_algebra(args.algebra)
    checks = tuple(args.checks.split(",")) if args.checks else CORE_AXIOMS
    try:
        config = SamplerConfig(seed=cfg.seed, samples=cfg.samples, dim_bound=cfg.dim_bound,
                               checks=checks, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = verify_axioms(A, config)
    if cfg.fmt == "structured":
        em.out.write(report.to_jsonl())
    else:
        em.out.write(report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_stable_hom(args, cfg: RunConfig, em: Emitter) -> int:
    A = _load_algebra(args.algebra)
    x = resolve_module(args.x, A, where="X")
    y = resolve_module(args.y, A, where="Y")
    em.add(cfg.header(algebra=A.name, x_dim=x.dim, y_dim=y.dim))
    basis = stable_hom_basis(x, y)
    dim = stable_hom_dim(x, y)
    em.add({"record": "stable_hom", "dim": dim})
    for k, b in enumerate(basis):
        em.add({"record": "stable_class", "index": k, "representative": matrix_doc(b)})
    return EXIT_OK


def cmd_omega_orbit(args, cfg: RunConfig, em: Emitter) -> int:
    A = _load_algebra(args.algebra)
    x = resolve_module(args.module, A, where="module")
    orbit = [x]
    for _ in range(args.steps):
        orbit.append(syzygy(orbit[-1]))
    bound = max([cfg.dim_bound] + [m.dim for m in orbit])
    catalog = module_catalog(A, bound)
    em.add(cfg.header(algebra=A.name, steps=args.steps))
    for k, m in enumerate(orbit):
        if m.dim == 0:
            match = "0"
        else:
            hit = match_catalog(m, catalog)
            match = hit.name if hit is not None else "unmatched"
        em.add({"record": "omega", "step": k, "dim": m.dim, "iso_class": match})
    return EXIT_OK


def _triangle_record(t: TriangleData) -> dict[str, Any]:
    return {"record": "triangle", "provenance": t.provenance, "shape": t.shape,
            "object_dims": [o.dim for o in t.objects],
            "maps": [matrix_doc(m) for m in t.maps],
            "composites_stably_zero": t.composites_stably_zero}


def cmd_triangle(args, cfg: RunConfig, em: Emitter) -> int:
    A = _load_algebra(args.algebra)
    f = load_morphism_file(args.morphism, A)
    em.add(cfg.header(algebra=A.name, which=args.which))
    if args.which == "happel":
        t = happel_triangle(f)
        em.add(_triangle_record(t))
        return EXIT_OK if t.composites_stably_zero else EXIT_FAIL
    tq = quillen_left_triangle(f)
    em.add(_triangle_record(tq))
    if args.which == "quillen":
        return EXIT_OK if tq.composites_stably_zero else EXIT_FAIL
    th = happel_left_triangle(f)
    em.add(_triangle_record(th))
    iso = triangles_isomorphic(tq, th)
    if iso is None:
        em.add({"record": "comparison", "result": "not isomorphic"})
        return EXIT_FAIL
    em.add({"record": "comparison", "result": "isomorphic", "candidates_tested": iso.candidates_tested,
            "exhaustive": iso.exhaustive, "certificate": [matrix_doc(m) for m in iso.maps]})
    return EXIT_OK


def cmd_export_algebra(args, cfg: RunConfig, em: Emitter) -> int:
    em.out.write(dump_algebra(resolve_algebra(args.algebra)))
    return EXIT_OK


# ---------------------------------------------------------------------------

def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_nonneg, default=0, help="base seed (default 0)")
    common.add_argument("--samples", type=_nonneg, default=200, help="instances per axiom (default 200)")
    common.add_argument("--dim-bound", type=_positive, default=6, help="largest sampled module dimension")
    common.add_argument("--format", choices=("text", "structured"), default="text",
                        help="text, or one JSON record per line")

    ap = argparse.ArgumentParser(
        prog="frobmodel",
        description="Exact checks of the model structure on modules over Frobenius algebras over F_p.",
        epilog=f"Algebra refs: a JSON file, a builtin like truncated_polynomial(3,3), or a catalog "
               f"name (directory from ${CATALOG_ENV}).",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-algebra", parents=[common], help="validate an algebra presentation")
    s.add_argument("algebra")
    s.set_defaults(func=cmd_check_algebra)

    s = sub.add_parser("axioms", parents=[common], help="sample and verify the model axioms")
    s.add_argument("algebra")
    s.add_argument("--checks", help=f"comma-separated subset of {','.join(ALL_CHECKS)}")
    s.add_argument("--workers", type=_positive, default=1, help="worker processes")
    s.set_defaults(func=cmd_axioms)

    s = sub.add_parser("stable-hom", parents=[common], help="stable Hom dimension and basis")
    s.add_argument("algebra")
    s.add_argument("x", help="module file or builtin module name")
    s.add_argument("y")
    s.set_defaults(func=cmd_stable_hom)

    s = sub.add_parser("omega-orbit", parents=[common], help="iterate the syzygy functor")
    s.add_argument("algebra")
    s.add_argument("module")
    s.add_argument("--steps", type=_nonneg, default=4)
    s.set_defaults(func=cmd_omega_orbit)

    s = sub.add_parser("triangle", parents=[common], help="triangles attached to a morphism")
    s.add_argument("algebra")
    s.add_argument("morphism", help="morphism JSON file")
    s.add_argument("--which", choices=("quillen", "happel", "compare"), default="compare")
    s.set_defaults(func=cmd_triangle)

    s = sub.add_parser("export-algebra", parents=[common], help="print an algebra as a JSON file")
    s.add_argument("algebra")
    s.set_defaults(func=cmd_export_algebra)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    inputs = [v for k, v in vars(args).items() if k in ("algebra", "x", "y", "module", "morphism")]
    cfg = RunConfig(args.command, inputs, args.seed, args.samples, args.dim_bound, args.format)
    em = Emitter(args.format, out)
    func: Callable[..., int] = args.func
    try:
        code = func(args, cfg, em)
    except (FormatError, UsageError) as exc:
        em.flush()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotAFibrationError, AlgebraError, ModuleError) as exc:
        em.add({"record": "error", "message": str(exc)})
        em.flush()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    em.flush()
    return code


def entry() -> None:
    sys.exit(main())


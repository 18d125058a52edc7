"""Acceptance run: one PASS/FAIL line per criterion.

Runs under pytest (lines are printed even without ``-s``) or directly as
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import io
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

import oracles  # noqa: E402
from frobmodel.algebra import (  # noqa: E402
    field_algebra,
    group_algebra_elementary_abelian,
    is_isomorphic,
    syzygy,
    truncated_polynomial,
    validate_algebra,
)
from frobmodel.axioms import SamplerConfig, verify_axioms  # noqa: E402
from frobmodel.cli import main  # noqa: E402
from frobmodel.frobcat import stable_equal, stable_hom_dim, stable_inverse  # noqa: E402
from frobmodel.model import classify, right_homotopy  # noqa: E402
from frobmodel.sampling import Sampler  # noqa: E402
from frobmodel.triangulated import (  # noqa: E402
    happel_left_triangle,
    quillen_left_triangle,
    triangles_isomorphic,
)

ALGEBRAS = {
    "truncated_polynomial(2,2)": lambda: truncated_polynomial(2, 2),
    "truncated_polynomial(3,3)": lambda: truncated_polynomial(3, 3),
    "group_algebra_elementary_abelian(2,2)": lambda: group_algebra_elementary_abelian(2, 2),
    "field(5)": lambda: field_algebra(5),
}
DIM_BOUND = 6


@functools.cache
def algebra(name: str):
    return validate_algebra(ALGEBRAS[name]())


@functools.cache
def axiom_suite():
    """Seed 0, 200 instances per axiom on every algebra, timed as one run."""
    start = time.perf_counter()
    reports = {n: verify_axioms(algebra(n), SamplerConfig(seed=0, samples=200)) for n in ALGEBRAS}
    return reports, time.perf_counter() - start


def report(n: int, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)
    return ok


# ---------------------------------------------------------------------------

def criterion_1() -> bool:
    reports, secs = axiom_suite()
    failed = [f"{n}/{r.axiom}" for n, rep in reports.items() for r in rep.results if not r.passed]
    counts = {r.tested for rep in reports.values() for r in rep.results}
    ok = not failed and counts == {200} and secs < 60
    return report(1, ok, f"axiom suite, 4 algebras x 200 instances, {secs:.1f}s"
                  + (f", failed: {failed}" if failed else ""))


def criterion_2() -> bool:
    bad, seen = [], {"trivcof": 0, "cof": 0, "trivfib": 0, "fib": 0}
    for name in ALGEBRAS:
        s = Sampler(algebra(name), DIM_BOUND)
        for k in range(200):
            rng = np.random.default_rng([2, 0, k])
            i = s.trivial_cofibration(rng) if k % 2 else s.cofibration(rng)
            flag = classify(i).is_trivial_cofibration
            seen["trivcof" if flag else "cof"] += 1
            if flag != (stable_inverse(i) is not None):
                bad.append(f"{name} inflation {k}")
            rng = np.random.default_rng([2, 1, k])
            p = s.trivial_fibration(rng) if k % 2 else s.fibration(rng)
            flag = classify(p).is_trivial_fibration
            seen["trivfib" if flag else "fib"] += 1
            if flag != (stable_inverse(p) is not None):
                bad.append(f"{name} deflation {k}")
    return report(2, not bad, f"trivial flags vs stable inverse on 200+200 per algebra {seen}"
                  + (f", mismatches: {bad[:5]}" if bad else ""))


def criterion_3() -> bool:
    bad, equal = [], 0
    for name in ALGEBRAS:
        s = Sampler(algebra(name), DIM_BOUND)
        for k in range(500):
            rng = np.random.default_rng([3, k])
            x, y = s.module(rng), s.module(rng)
            f = s.hom(rng, x, y)
            g = f + s.stably_zero(rng, x, y) if k % 2 else s.hom(rng, x, y)
            se = stable_equal(f, g)
            equal += se
            if (right_homotopy(f, g) is not None) != se:
                bad.append(f"{name} pair {k}")
    return report(3, not bad, f"right homotopy iff stable_equal on 4 x 500 pairs ({equal} stably equal)"
                  + (f", mismatches: {bad[:5]}" if bad else ""))


def criterion_4() -> bool:
    B3 = algebra("truncated_polynomial(3,3)")
    A2 = algebra("truncated_polynomial(2,2)")
    J = {k: B3.cyclic_module(k) for k in (1, 2, 3)}
    rows = []
    om1, om2, om3 = syzygy(J[1]), syzygy(J[2]), syzygy(J[3])
    rows.append(is_isomorphic(om1, J[2]) and om1.dim == oracles.syzygy_of_jordan_block(3, 3, 1)[0])
    rows.append(is_isomorphic(om2, J[1]) and om2.dim == oracles.syzygy_of_jordan_block(3, 3, 2)[0])
    rows.append(om3.dim == 0 == oracles.syzygy_of_jordan_block(3, 3, 3)[0])
    s1 = A2.simple_module()
    om = syzygy(s1)
    rows.append(is_isomorphic(om, s1) and om.dim == oracles.syzygy_of_jordan_block(2, 2, 1)[0])
    rows.append(stable_hom_dim(J[1], J[1]) == 1 == oracles.stable_hom_dim_jordan(3, 3, 1, 1))
    rows.append(stable_hom_dim(s1, s1) == 1 == oracles.stable_hom_dim_jordan(2, 2, 1, 1))
    return report(4, all(rows), f"syzygy table and stable Hom(J1,J1) against enumeration {rows}")


def criterion_5() -> bool:
    B3 = algebra("truncated_polynomial(3,3)")
    s = Sampler(B3, DIM_BOUND)
    failures = []
    for k in range(50):
        f = s.fibration(np.random.default_rng([0, k]))
        if triangles_isomorphic(quillen_left_triangle(f), happel_left_triangle(f)) is None:
            failures.append(k)
    return report(5, not failures, f"50 fibrations over F3[x]/x^3, {len(failures)} triangle mismatches"
                  + (f" at {failures}" if failures else ""))


def criterion_6() -> bool:
    reports, _ = axiom_suite()
    res = {n: rep.result("retract") for n, rep in reports.items()}
    ok = all(r.passed and r.tested == 200 for r in res.values())
    return report(6, ok, "retracts preserve every class, "
                  + ", ".join(f"{n}: {r.tested - r.failures}/{r.tested}" for n, r in res.items()))


def criterion_7() -> bool:
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        code = main(["axioms", "truncated_polynomial(3,3)", "--seed", "0", "--format", "structured"], out=buf)
        outs.append((code, buf.getvalue().encode()))
    ok = outs[0] == outs[1] and outs[0][0] == 0 and len(outs[0][1]) > 0
    return report(7, ok, f"two axioms runs with seed 0 give identical bytes ({len(outs[0][1])} bytes)")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


# ---------------------------------------------------------------------------
# pytest entry points

def _run(check, capsys) -> bool:
    with capsys.disabled():
        print()
        return check()


def test_criterion_1_axiom_suite(capsys):
    assert _run(criterion_1, capsys)


def test_criterion_2_trivial_flags_match_stable_inverse(capsys):
    assert _run(criterion_2, capsys)


def test_criterion_3_homotopy_iff_stable_equal(capsys):
    assert _run(criterion_3, capsys)


def test_criterion_4_syzygy_table(capsys):
    assert _run(criterion_4, capsys)


def test_criterion_5_triangles_agree(capsys):
    assert _run(criterion_5, capsys)


def test_criterion_6_retracts(capsys):
    assert _run(criterion_6, capsys)


def test_criterion_7_reproducible_reports(capsys):
    assert _run(criterion_7, capsys)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)

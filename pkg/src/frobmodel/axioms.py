"""Seeded verification of the model-category axioms on sampled instances.

Each instance draws from its own generator ``default_rng([seed, axiom, index])``,
so the instance list is fixed by the seed and results can be computed in any
order (or in worker processes) and merged deterministically.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .algebra import AlgebraPresentation, CheckedAlgebra, ModuleError, ModuleHom, pullback, pushout, validate_algebra
from .frobcat import stable_equal, stable_inverse
from .model import (
    Classifier,
    LiftError,
    classify,
    factor_cof_trivfib,
    factor_trivcof_fib,
    left_homotopy,
    lift,
    right_homotopy,
)
from .sampling import Sampler

# M0 is "isomorphisms lie in every class"; M1-M4 follow the usual labels.
CORE_AXIOMS = ("M0", "M1", "M2", "M3", "M4", "retract")
EXTRA_CHECKS = ("homotopy", "trivial_criterion")
ALL_CHECKS = CORE_AXIOMS + EXTRA_CHECKS
_AXIOM_IDS = {name: k for k, name in enumerate(ALL_CHECKS)}
_SQUARE_TRIES = 32

DESCRIPTIONS = {
    "M0": "isomorphisms are cofibrations, fibrations and weak equivalences",
    "M1": "lifting: cofibration vs trivial fibration, trivial cofibration vs fibration",
    "M2": "(trivial) (co)fibrations closed under composition, pullback and pushout",
    "M3": "both factorizations compose exactly with correctly classified legs",
    "M4": "two out of three for weak equivalences",
    "retract": "retracts of (co)fibrations and weak equivalences stay in the class",
    "homotopy": "right homotopy exists iff stably equal, and agrees with left homotopy",
    "trivial_criterion": "trivial (co)fibration flag agrees with a stable-inverse search",
}


@dataclass
class SamplerConfig:
    seed: int = 0
    samples: int = 200
    dim_bound: int = 6
    checks: tuple[str, ...] = CORE_AXIOMS
    workers: int = 1

    def __post_init__(self):
        if self.seed < 0 or self.samples < 0 or self.dim_bound < 1:
            raise ValueError("seed and samples must be nonnegative and dim_bound positive")
        unknown = [c for c in self.checks if c not in _AXIOM_IDS]
        if unknown:
            raise ValueError(f"unknown checks {unknown}; known: {list(ALL_CHECKS)}")


@dataclass
class InstanceResult:
    index: int
    ok: bool
    detail: str = ""
    witness: dict[str, Any] = field(default_factory=dict)


@dataclass
class AxiomResult:
    axiom: str
    tested: int
    failures: int
    counterexample: InstanceResult | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "record": "axiom", "axiom": self.axiom, "description": DESCRIPTIONS[self.axiom],
            "tested": self.tested, "failures": self.failures, "passed": self.passed,
        }
        if self.counterexample is not None:
            c = self.counterexample
            rec["counterexample"] = {"instance": c.index, "detail": c.detail, "witness": c.witness}
        return rec


@dataclass
class AxiomReport:
    algebra: str
    p: int
    algebra_dim: int
    config: SamplerConfig
    catalog_dims: list[int]
    results: list[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def records(self) -> list[dict[str, Any]]:
        cfg = self.config
        head = {
            "record": "header", "command": "axioms", "algebra": self.algebra, "p": self.p,
            "algebra_dim": self.algebra_dim, "seed": cfg.seed, "samples": cfg.samples,
            "dim_bound": cfg.dim_bound, "checks": list(cfg.checks), "catalog_dims": self.catalog_dims,
        }
        tail = {"record": "summary", "passed": self.passed,
                "failed_axioms": [r.axiom for r in self.results if not r.passed]}
        return [head, *(r.record() for r in self.results), tail]

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True, separators=(",", ":")) + "\n" for r in self.records())

    def to_text(self) -> str:
        cfg = self.config
        lines = [f"algebra {self.algebra} (p={self.p}, dim={self.algebra_dim})",
                 f"seed={cfg.seed} samples={cfg.samples} dim_bound={cfg.dim_bound} "
                 f"catalog_dims={self.catalog_dims}"]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(f"  {status} {r.axiom:<17} {r.tested:>5} tested, {r.failures} failed"
                         f"  ({DESCRIPTIONS[r.axiom]})")
            if r.counterexample is not None:
                c = r.counterexample
                lines.append(f"       first counterexample: instance {c.index}: {c.detail}")
                for name, w in c.witness.items():
                    lines.append(f"         {name} = {json.dumps(w, sort_keys=True)}")
        lines.append("all axioms pass" if self.passed else "AXIOM FAILURES")
        return "\n".join(lines) + "\n"


def _mat(f: ModuleHom) -> dict[str, Any]:
    return {"source_dim": f.source.dim, "target_dim": f.target.dim, "matrix": f.matrix.tolist()}


def _fail(index: int, detail: str, **maps: ModuleHom) -> InstanceResult:
    return InstanceResult(index, False, detail, {k: _mat(v) for k, v in sorted(maps.items())})


# ---------------------------------------------------------------------------
# per-axiom instance checks

def _check_m0(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    f = s.isomorphism(rng)
    c = cls(f)
    missing = [k for k, v in c.flags().items() if not v]
    if missing:
        return _fail(idx, f"isomorphism not classified as {', '.join(missing)}", f=f)
    return InstanceResult(idx, True)


def _check_m1(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    # alternate the two lifting situations; the sampled legs are only
    # accepted when the classifier puts them in the required classes
    trivial_right = idx % 2 == 0
    for _ in range(_SQUARE_TRIES):
        if trivial_right:
            i = s.cofibration(rng)
            p = s.trivial_fibration(rng) if rng.integers(4) else s.fibration(rng)
        else:
            i = s.trivial_cofibration(rng) if rng.integers(4) else s.cofibration(rng)
            p = s.fibration(rng)
        ci, cp = cls(i), cls(p)
        if (ci.is_cofibration and cp.is_trivial_fibration) or (ci.is_trivial_cofibration and cp.is_fibration):
            break
    else:
        return InstanceResult(idx, True, "no admissible square drawn")
    f, g = s.commuting_square(rng, i, p)
    try:
        w = lift(i, f, g, p, classifier=cls)
    except (LiftError, ModuleError) as exc:
        return _fail(idx, f"no lift: {exc}", i=i, p=p, f=f, g=g)
    if not (w.h @ i).equals(f) or not (p @ w.h).equals(g):
        return _fail(idx, "lift does not satisfy h i = f and p h = g", i=i, p=p, f=f, g=g, h=w.h)
    return InstanceResult(idx, True)


def _check_m2(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    kind = idx % 4
    if kind == 0:
        # composition of (trivial) cofibrations: second leg starts at the first's target
        f = factor_trivcof_fib(s.morphism(rng)).first if rng.integers(2) else s.cofibration(rng)
        g0 = s.hom(rng, f.target, s.module(rng))
        g = factor_trivcof_fib(g0).first if rng.integers(2) else factor_cof_trivfib(g0).first
        cf, cg, cgf = cls(f), cls(g), cls(g @ f)
        if cf.is_cofibration and cg.is_cofibration and not cgf.is_cofibration:
            return _fail(idx, "composite of cofibrations is not a cofibration", f=f, g=g)
        if cf.is_trivial_cofibration and cg.is_trivial_cofibration and not cgf.is_trivial_cofibration:
            return _fail(idx, "composite of trivial cofibrations is not trivial", f=f, g=g)
    elif kind == 1:
        g = factor_cof_trivfib(s.morphism(rng)).second if rng.integers(2) else s.fibration(rng)
        f0 = s.hom(rng, s.module(rng), g.source)
        f = factor_cof_trivfib(f0).second if rng.integers(2) else factor_trivcof_fib(f0).second
        cf, cg, cgf = cls(f), cls(g), cls(g @ f)
        if cf.is_fibration and cg.is_fibration and not cgf.is_fibration:
            return _fail(idx, "composite of fibrations is not a fibration", f=f, g=g)
        if cf.is_trivial_fibration and cg.is_trivial_fibration and not cgf.is_trivial_fibration:
            return _fail(idx, "composite of trivial fibrations is not trivial", f=f, g=g)
    elif kind == 2:
        p = s.trivial_fibration(rng) if rng.integers(2) else s.fibration(rng)
        g = s.hom(rng, s.module(rng), p.target)
        pb = pullback(p, g)
        q = pb.to_y
        cp, cq = cls(p), cls(q)
        if cp.is_fibration and not cq.is_fibration:
            return _fail(idx, "pullback of a fibration is not a fibration", p=p, g=g, q=q)
        if cp.is_trivial_fibration and not cq.is_trivial_fibration:
            return _fail(idx, "pullback of a trivial fibration is not trivial", p=p, g=g, q=q)
    else:
        i = s.trivial_cofibration(rng) if rng.integers(2) else s.cofibration(rng)
        f = s.hom(rng, i.source, s.module(rng))
        po = pushout(i, f)
        j = po.from_y
        ci, cj = cls(i), cls(j)
        if ci.is_cofibration and not cj.is_cofibration:
            return _fail(idx, "pushout of a cofibration is not a cofibration", i=i, f=f, j=j)
        if ci.is_trivial_cofibration and not cj.is_trivial_cofibration:
            return _fail(idx, "pushout of a trivial cofibration is not trivial", i=i, f=f, j=j)
    return InstanceResult(idx, True)


def _check_m3(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    f = s.morphism(rng)
    a = factor_trivcof_fib(f)
    if not (a.second @ a.first).equals(f):
        return _fail(idx, "trivial cofibration / fibration factorization does not compose to f",
                     f=f, first=a.first, second=a.second)
    ca, cb = cls(a.first), cls(a.second)
    if not (ca.is_trivial_cofibration and cb.is_fibration):
        return _fail(idx, "legs of f = p i are not a trivial cofibration and a fibration",
                     f=f, first=a.first, second=a.second)
    b = factor_cof_trivfib(f)
    if not (b.second @ b.first).equals(f):
        return _fail(idx, "cofibration / trivial fibration factorization does not compose to f",
                     f=f, first=b.first, second=b.second)
    ca, cb = cls(b.first), cls(b.second)
    if not (ca.is_cofibration and cb.is_trivial_fibration):
        return _fail(idx, "legs of f = q j are not a cofibration and a trivial fibration",
                     f=f, first=b.first, second=b.second)
    return InstanceResult(idx, True)


def _check_m4(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    f = s.weak_equivalence_like(rng)
    g = s.hom(rng, f.target, s.module(rng)) if rng.integers(3) == 0 else _we_from(s, rng, f.target)
    wf, wg, wgf = cls(f).is_weak_equivalence, cls(g).is_weak_equivalence, cls(g @ f).is_weak_equivalence
    if wf + wg + wgf == 2:
        return _fail(idx, f"two of three violated: we(f)={wf}, we(g)={wg}, we(gf)={wgf}", f=f, g=g)
    return InstanceResult(idx, True)


def _we_from(s: Sampler, rng, x) -> ModuleHom:
    kind = int(rng.integers(3))
    if kind == 0:
        return s.split_inclusion(rng, x, projective=True)
    if kind == 1:
        return s.automorphism(rng, x)
    return factor_trivcof_fib(s.hom(rng, x, s.module(rng))).first


def _check_retract(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    kind = int(rng.integers(4))
    f = (s.cofibration, s.fibration, s.weak_equivalence_like, s.morphism)[kind](rng)
    d = s.retract(rng, f)
    if not d.verify():
        return _fail(idx, "sampled retract diagram does not commute", f=f, g=d.g)
    cf, cg = cls(f).flags(), cls(d.g).flags()
    lost = [k for k in cf if cg[k] and not cf[k]]
    if lost:
        return _fail(idx, f"retract leaves the class: {', '.join(lost)}",
                     f=f, g=d.g, s_a=d.s_a, r_a=d.r_a, s_b=d.s_b, r_b=d.r_b)
    return InstanceResult(idx, True)


def _check_homotopy(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    x, y = s.module(rng), s.module(rng)
    f = s.hom(rng, x, y)
    g = f + s.stably_zero(rng, x, y) if idx % 2 == 0 else s.hom(rng, x, y)
    se = stable_equal(f, g)
    h = right_homotopy(f, g)
    if (h is not None) != se:
        return _fail(idx, f"right homotopy {'found' if h is not None else 'missing'} but stable_equal={se}",
                     f=f, g=g)
    k = left_homotopy(f, g)
    if (k is not None) != se:
        return _fail(idx, f"left homotopy {'found' if k is not None else 'missing'} but stable_equal={se}",
                     f=f, g=g)
    return InstanceResult(idx, True)


def _check_trivial_criterion(s: Sampler, rng, idx: int, cls: Classifier) -> InstanceResult:
    if idx % 2 == 0:
        i = s.trivial_cofibration(rng) if rng.integers(2) else s.cofibration(rng)
        flag = cls(i).is_trivial_cofibration
        inv = stable_inverse(i) is not None
        if flag != inv:
            return _fail(idx, f"trivial cofibration flag {flag} but stable inverse {'found' if inv else 'absent'}",
                         i=i)
    else:
        p = s.trivial_fibration(rng) if rng.integers(2) else s.fibration(rng)
        flag = cls(p).is_trivial_fibration
        inv = stable_inverse(p) is not None
        if flag != inv:
            return _fail(idx, f"trivial fibration flag {flag} but stable inverse {'found' if inv else 'absent'}",
                         p=p)
    return InstanceResult(idx, True)


CHECKS: dict[str, Callable[..., InstanceResult]] = {
    "M0": _check_m0,
    "M1": _check_m1,
    "M2": _check_m2,
    "M3": _check_m3,
    "M4": _check_m4,
    "retract": _check_retract,
    "homotopy": _check_homotopy,
    "trivial_criterion": _check_trivial_criterion,
}


def instance_rng(seed: int, axiom: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, _AXIOM_IDS[axiom], index])


def run_instances(sampler: Sampler, axiom: str, indices, seed: int,
                  classifier: Classifier = classify) -> list[InstanceResult]:
    check = CHECKS[axiom]
    out = []
    for idx in indices:
        try:
            out.append(check(sampler, instance_rng(seed, axiom, idx), idx, classifier))
        except (ModuleError, LiftError, ValueError) as exc:
            out.append(InstanceResult(idx, False, f"{type(exc).__name__}: {exc}"))
    return out


def merge(axiom: str, results: list[InstanceResult]) -> AxiomResult:
    """Order-independent merge: counts add up, the counterexample is the lowest index."""
    bad = sorted((r for r in results if not r.ok), key=lambda r: r.index)
    return AxiomResult(axiom, len(results), len(bad), bad[0] if bad else None)


def _worker(args) -> tuple[str, list[InstanceResult]]:
    pres, dim_bound, axiom, indices, seed, classifier = args
    sampler = Sampler(validate_algebra(pres), dim_bound)
    return axiom, run_instances(sampler, axiom, indices, seed, classifier)


def verify_axioms(algebra: CheckedAlgebra | AlgebraPresentation, config: SamplerConfig | None = None,
                  classifier: Classifier = classify) -> AxiomReport:
    """Run every configured check on ``config.samples`` seeded instances."""
    config = config or SamplerConfig()
    A = algebra if isinstance(algebra, CheckedAlgebra) else validate_algebra(algebra)
    sampler = Sampler(A, config.dim_bound)
    by_axiom: dict[str, list[InstanceResult]] = {a: [] for a in config.checks}
    if config.workers > 1 and config.samples > 1:
        chunks = max(1, config.samples // config.workers)
        jobs = [(A.presentation, config.dim_bound, a, range(lo, min(lo + chunks, config.samples)),
                 config.seed, classifier)
                for a in config.checks for lo in range(0, config.samples, chunks)]
        with ProcessPoolExecutor(max_workers=config.workers) as ex:
            for axiom, res in ex.map(_worker, jobs):
                by_axiom[axiom].extend(res)
    else:
        for a in config.checks:
            by_axiom[a] = run_instances(sampler, a, range(config.samples), config.seed, classifier)
    results = [merge(a, by_axiom[a]) for a in config.checks]
    return AxiomReport(A.name, A.p, A.dim, config, [m.dim for m in sampler.catalog], results)

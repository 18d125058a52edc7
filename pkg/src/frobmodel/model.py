"""The model structure on a Frobenius module category.

Cofibrations are the monomorphisms, fibrations the epimorphisms and weak
equivalences the stable equivalences. Trivial cofibrations are exactly the
monomorphisms with projective cokernel, trivial fibrations the epimorphisms
with projective kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (
    DirectSum,
    ModuleHom,
    ModuleRep,
    ModuleError,
    cokernel,
    column_hom,
    direct_sum,
    extend_along,
    factor_through,
    injective_hull,
    is_projective,
    kernel,
    projective_cover,
    pullback,
    pullback_induced,
    pushout,
    pushout_induced,
    row_hom,
    solve_hom,
    splitting,
    retraction,
)
from .frobcat import is_weak_equivalence
from .linalg import _mod_matmul

TRIVCOF_FIB = "trivcof_then_fib"
COF_TRIVFIB = "cof_then_trivfib"


class LiftError(ValueError):
    """A lifting problem was rejected or could not be solved."""

    def __init__(self, message: str, leg: str | None = None):
        super().__init__(message)
        self.leg = leg


@dataclass
class MorphismClass:
    is_cofibration: bool
    is_fibration: bool
    is_weak_equivalence: bool
    is_trivial_cofibration: bool
    is_trivial_fibration: bool
    cokernel: ModuleRep | None = None
    kernel: ModuleRep | None = None

    def flags(self) -> dict[str, bool]:
        return {
            "cofibration": self.is_cofibration,
            "fibration": self.is_fibration,
            "weak_equivalence": self.is_weak_equivalence,
            "trivial_cofibration": self.is_trivial_cofibration,
            "trivial_fibration": self.is_trivial_fibration,
        }


Classifier = Callable[[ModuleHom], MorphismClass]


def classify(f: ModuleHom) -> MorphismClass:
    cof = f.is_injective()
    fib = f.is_surjective()
    cok, _ = cokernel(f)
    ker, _ = kernel(f)
    return MorphismClass(
        is_cofibration=cof,
        is_fibration=fib,
        is_weak_equivalence=is_weak_equivalence(f),
        is_trivial_cofibration=cof and is_projective(cok),
        is_trivial_fibration=fib and is_projective(ker),
        cokernel=cok,
        kernel=ker,
    )


# ---------------------------------------------------------------------------
# factorizations

@dataclass
class FactorizationResult:
    """``original = second @ first`` through ``mid``."""

    mid: ModuleRep
    first: ModuleHom
    second: ModuleHom
    mode: str

    def verify(self, original: ModuleHom) -> None:
        if not (self.second @ self.first).equals(original):
            raise ModuleError("factorization does not compose to the original morphism")
        if not self.first.is_injective() or not self.second.is_surjective():
            raise ModuleError("factorization legs are not a cofibration and a fibration")
        if self.mode == TRIVCOF_FIB:
            ok = is_projective(cokernel(self.first)[0])
        else:
            ok = is_projective(kernel(self.second)[0])
        if not ok:
            raise ModuleError(f"{self.mode}: trivial leg has non-projective (co)kernel")


def _embed_first(f: ModuleHom) -> tuple[DirectSum, ModuleHom, ModuleHom]:
    """``X -(1,0)^T-> X + Y -(f, 1)-> Y``."""
    x, y = f.source, f.target
    ds = direct_sum(x, y)
    emb = column_hom(x, ds, [x.identity(), x.zero_to(y)])
    fold = row_hom(ds, y, [f, y.identity()])
    return ds, emb, fold


def factor_trivcof_fib(f: ModuleHom) -> FactorizationResult:
    """``f = p i`` with ``i`` a trivial cofibration and ``p`` a fibration.

    A monomorphism is handled by pulling back a projective cover of its
    cokernel; anything else first goes through ``X -> X + Y -> Y``.
    """
    x = f.source
    if f.is_injective():
        c, q = cokernel(f)
        cover = projective_cover(c).deflation
        pb = pullback(q, cover)
        i = pullback_induced(pb, f, x.zero_to(cover.source))
        res = FactorizationResult(pb.module, i, pb.to_x, TRIVCOF_FIB)
    else:
        _, emb, fold = _embed_first(f)
        inner = factor_trivcof_fib(emb)
        res = FactorizationResult(inner.mid, inner.first, fold @ inner.second, TRIVCOF_FIB)
    res.verify(f)
    return res


def factor_cof_trivfib(f: ModuleHom) -> FactorizationResult:
    """``f = q j`` with ``j`` a cofibration and ``q`` a trivial fibration.

    An epimorphism is handled by pushing out an injective hull of its kernel;
    anything else first goes through ``X -> X + Y -> Y``.
    """
    y = f.target
    if f.is_surjective():
        _, k_incl = kernel(f)
        hull = injective_hull(k_incl.source).inflation
        po = pushout(k_incl, hull)
        q = pushout_induced(po, f, hull.target.zero_to(y))
        res = FactorizationResult(po.module, po.from_x, q, COF_TRIVFIB)
    else:
        _, emb, fold = _embed_first(f)
        inner = factor_cof_trivfib(fold)
        res = FactorizationResult(inner.mid, inner.first @ emb, inner.second, COF_TRIVFIB)
    res.verify(f)
    return res


# ---------------------------------------------------------------------------
# lifting

@dataclass
class LiftWitness:
    """A diagonal ``h`` with ``h i = f`` and ``p h = g``, plus the maps used to build it."""

    h: ModuleHom
    case: str
    ingredients: dict[str, ModuleHom] = field(default_factory=dict)


def lift(i: ModuleHom, f: ModuleHom, g: ModuleHom, p: ModuleHom,
         classifier: Classifier = classify) -> LiftWitness:
    """Solve the square ``p f = g i`` for a diagonal ``h: B -> X``.

    Case ``cof/trivfib``: split ``p`` by ``lam`` (its kernel is injective),
    write ``f - lam g i = c v`` through the kernel inclusion ``c``, extend
    ``v = u i`` using injectivity of the kernel, and set ``h = lam g + c u``.
    Case ``trivcof/fib`` is the dual: retract ``i`` by ``r``, write
    ``g - p f r = z d`` through the cokernel ``d`` of ``i``, lift ``z = p w``
    using projectivity of the cokernel, and set ``h = f r + w d``.
    """
    a, b = i.source, i.target
    x, y = p.source, p.target
    if f.source is not a or f.target is not x or g.source is not b or g.target is not y:
        raise LiftError("square maps are not composable as A->X, B->Y over i: A->B, p: X->Y")
    if not (p @ f).equals(g @ i):
        raise LiftError("square does not commute: p f != g i")
    ci, cp = classifier(i), classifier(p)
    if ci.is_cofibration and cp.is_trivial_fibration:
        w = _lift_against_trivial_fibration(i, f, g, p)
    elif ci.is_trivial_cofibration and cp.is_fibration:
        w = _lift_trivial_cofibration(i, f, g, p)
    else:
        if not ci.is_cofibration:
            leg, msg = "i", "left leg is not a cofibration"
        elif not cp.is_fibration:
            leg, msg = "p", "right leg is not a fibration"
        elif not ci.is_trivial_cofibration:
            leg, msg = "p", "right leg is not a trivial fibration and left leg is not a trivial cofibration"
        else:
            leg, msg = "i", "left leg is not a trivial cofibration and right leg is not a trivial fibration"
        raise LiftError(msg, leg=leg)
    if not (w.h @ i).equals(f) or not (p @ w.h).equals(g):
        raise LiftError("constructed diagonal fails h i = f or p h = g")
    return w


def _lift_against_trivial_fibration(i, f, g, p) -> LiftWitness:
    lam = splitting(p)
    if lam is None:
        raise LiftError("right leg does not split: its kernel is not injective", leg="p")
    _, c = kernel(p)
    v = factor_through(f - lam @ g @ i, c)
    if v is None:
        raise LiftError("f - lam g i does not factor through ker p", leg="p")
    u = extend_along(v, i)
    if u is None:
        raise LiftError("map into ker p does not extend along i", leg="p")
    h = lam @ g + c @ u
    return LiftWitness(h, "cofibration/trivial_fibration", {"lam": lam, "c": c, "u": u, "v": v})


def _lift_trivial_cofibration(i, f, g, p) -> LiftWitness:
    r = retraction(i)
    if r is None:
        raise LiftError("left leg has no retraction: its cokernel is not projective", leg="i")
    _, d = cokernel(i)
    z = extend_along(g - p @ f @ r, d)
    if z is None:
        raise LiftError("g - p f r does not factor through cok i", leg="i")
    w = factor_through(z, p)
    if w is None:
        raise LiftError("map out of cok i does not lift along p", leg="i")
    h = f @ r + w @ d
    return LiftWitness(h, "trivial_cofibration/fibration", {"r": r, "d": d, "z": z, "w": w})


# ---------------------------------------------------------------------------
# path and cylinder objects

@dataclass
class PathObject:
    """``X -s-> X + P(X) -(p0, p1)-> X + X`` with ``p0 = (1, p_X)``, ``p1 = (1, 0)``."""

    source: ModuleRep
    object: ModuleRep
    s: ModuleHom
    p0: ModuleHom
    p1: ModuleHom
    pair: ModuleHom


def path_object(x: ModuleRep) -> PathObject:
    cached = x.cache.get("path")
    if cached is not None:
        return cached
    p_x = projective_cover(x).deflation
    ds = direct_sum(x, p_x.source)
    s = column_hom(x, ds, [x.identity(), x.zero_to(p_x.source)])
    p0 = row_hom(ds, x, [x.identity(), p_x])
    p1 = row_hom(ds, x, [x.identity(), p_x.source.zero_to(x)])
    xx = direct_sum(x, x)
    pair = column_hom(ds.module, xx, [p0, p1])
    ident = x.identity()
    if not (p0 @ s).equals(ident) or not (p1 @ s).equals(ident):
        raise ModuleError("path object: p0 s or p1 s is not the identity")
    if not s.is_injective() or not is_projective(cokernel(s)[0]):
        raise ModuleError("path object: s is not a trivial cofibration")
    if not pair.is_surjective():
        raise ModuleError("path object: (p0, p1) is not a fibration")
    po = PathObject(x, ds.module, s, p0, p1, pair)
    x.cache["path"] = po
    return po


@dataclass
class CylinderObject:
    """``X + X -(i0, i1)-> X + I(X) -sigma-> X`` with ``i0 = (1, iota)^T``, ``i1 = (1, 0)^T``."""

    source: ModuleRep
    object: ModuleRep
    i0: ModuleHom
    i1: ModuleHom
    sigma: ModuleHom
    pair: ModuleHom


def cylinder_object(x: ModuleRep) -> CylinderObject:
    cached = x.cache.get("cylinder")
    if cached is not None:
        return cached
    iota = injective_hull(x).inflation
    ds = direct_sum(x, iota.target)
    i0 = column_hom(x, ds, [x.identity(), iota])
    i1 = column_hom(x, ds, [x.identity(), x.zero_to(iota.target)])
    sigma = row_hom(ds, x, [x.identity(), iota.target.zero_to(x)])
    xx = direct_sum(x, x)
    pair = row_hom(xx, ds.module, [i0, i1])
    ident = x.identity()
    if not (sigma @ i0).equals(ident) or not (sigma @ i1).equals(ident):
        raise ModuleError("cylinder: sigma i0 or sigma i1 is not the identity")
    if not pair.is_injective():
        raise ModuleError("cylinder: (i0, i1) is not a cofibration")
    if not sigma.is_surjective() or not is_projective(kernel(sigma)[0]):
        raise ModuleError("cylinder: sigma is not a trivial fibration")
    cyl = CylinderObject(x, ds.module, i0, i1, sigma, pair)
    x.cache["cylinder"] = cyl
    return cyl


def _check_parallel(f: ModuleHom, g: ModuleHom) -> None:
    if f.source is not g.source or f.target is not g.target:
        raise ModuleError("homotopies need morphisms with the same source and target")


def right_homotopy(f: ModuleHom, g: ModuleHom) -> ModuleHom | None:
    """``H: A -> B^I`` into the path object of the target with ``p0 H = f``, ``p1 H = g``."""
    _check_parallel(f, g)
    path = path_object(f.target)
    p = f.p
    rhs = np.vstack([f.a, g.a])
    return solve_hom(f.source, path.object, lambda b: _mod_matmul(path.pair.a, b, p), rhs)


def left_homotopy(f: ModuleHom, g: ModuleHom) -> ModuleHom | None:
    """``K: Cyl(A) -> B`` out of the cylinder of the source with ``K i0 = f``, ``K i1 = g``."""
    _check_parallel(f, g)
    cyl = cylinder_object(f.source)
    p = f.p
    rhs = np.hstack([f.a, g.a])
    return solve_hom(cyl.object, f.target, lambda b: _mod_matmul(b, cyl.pair.a, p), rhs)


# ---------------------------------------------------------------------------
# axiom verification

def verify_axioms(algebra, config=None, classifier: Classifier = classify):
    """Sample and check the axioms; see :func:`frobmodel.axioms.verify_axioms`."""
    from .axioms import verify_axioms as run

    return run(algebra, config, classifier)

"""Stable equivalence, stable Hom dimensions and weak equivalences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    ModuleHom,
    ModuleRep,
    ModuleError,
    column_hom,
    direct_sum,
    factor_through,
    hom_space_array,
    is_projective,
    kernel,
    projective_cover,
    row_hom,
)
from .linalg import _mod_matmul, rank_array, solve_array


@dataclass
class StableWitness:
    """``right @ left`` equals the tested morphism and ``through`` is projective."""

    through: ModuleRep
    left: ModuleHom
    right: ModuleHom


def factors_through_projective(f: ModuleHom) -> StableWitness | None:
    """Witness that ``f`` factors through a projective module, or None.

    A map factors through some projective iff it lifts along the cover
    deflation ``P(Y) ->> Y`` of its target, so one linear solve decides it.
    """
    if f.is_zero():
        z = f.source.algebra.zero_module()
        return StableWitness(z, f.source.zero_to(z), z.zero_to(f.target))
    p_y = projective_cover(f.target).deflation
    u = factor_through(f, p_y)
    if u is None:
        return None
    return StableWitness(p_y.source, u, p_y)


def is_stably_zero(f: ModuleHom) -> bool:
    return factors_through_projective(f) is not None


def stable_equal(f: ModuleHom, g: ModuleHom) -> bool:
    if f.source is not g.source or f.target is not g.target:
        raise ModuleError("stable_equal needs morphisms with the same source and target")
    return factors_through_projective(f - g) is not None


def _vecs(mats: np.ndarray) -> np.ndarray:
    return mats.reshape(mats.shape[0], -1).T


def stably_zero_span(x: ModuleRep, y: ModuleRep) -> np.ndarray:
    """Columns spanning the maps ``x -> y`` that factor through ``P(y)`` (flattened)."""
    p = x.p
    p_y = projective_cover(y).deflation
    basis = hom_space_array(x, p_y.source)
    if basis.shape[0] == 0:
        return np.zeros((y.dim * x.dim, 0), dtype=np.int64)
    comp = np.stack([_mod_matmul(p_y.a, b, p) for b in basis])
    return _vecs(comp)


def stable_hom_dim(x: ModuleRep, y: ModuleRep) -> int:
    """``dim Hom(x, y)`` minus the dimension of the maps factoring through ``P(y)``."""
    total = hom_space_array(x, y).shape[0]
    z = stably_zero_span(x, y)
    return total - (rank_array(z, x.p) if z.shape[1] else 0)


def stable_hom_basis(x: ModuleRep, y: ModuleRep) -> list[ModuleHom]:
    """Representatives of a basis of the stable Hom space ``x -> y``."""
    p = x.p
    basis = hom_space_array(x, y)
    z = stably_zero_span(x, y)
    zr = rank_array(z, p) if z.shape[1] else 0
    reps: list[ModuleHom] = []
    cur = z
    for b in basis:
        cand = np.hstack([cur, b.reshape(-1, 1)])
        if rank_array(cand, p) > zr + len(reps):
            reps.append(ModuleHom(x, y, b, check=False))
            cur = cand
    return reps


@dataclass
class WeakEquivalenceDiagnostic:
    """How ``is_weak_equivalence`` reached its verdict: ``f = fibration @ trivial_cofibration``."""

    trivial_cofibration: ModuleHom
    fibration: ModuleHom
    fibration_kernel: ModuleRep
    kernel_projective: bool


def weak_equivalence_diagnostic(f: ModuleHom) -> WeakEquivalenceDiagnostic:
    """Factor ``f`` as ``X -(1,0)^T-> X + P(Y) -(f, p_Y)-> Y``.

    The first leg is a trivial cofibration (its cokernel ``P(Y)`` is
    projective) and the second a fibration, since ``p_Y`` is onto.
    """
    x, y = f.source, f.target
    p_y = projective_cover(y).deflation
    ds = direct_sum(x, p_y.source)
    i = column_hom(x, ds, [x.identity(), x.zero_to(p_y.source)])
    q = row_hom(ds, y, [f, p_y])
    k, _ = kernel(q)
    return WeakEquivalenceDiagnostic(i, q, k, is_projective(k))


def is_weak_equivalence(f: ModuleHom) -> bool:
    """Decide whether ``f`` becomes an isomorphism in the stable category.

    Factor ``f = q i`` with ``i`` a trivial cofibration and ``q`` a fibration;
    by two-out-of-three ``f`` is a weak equivalence iff ``q`` is, iff ``ker q``
    is projective.
    """
    return weak_equivalence_diagnostic(f).kernel_projective


def stable_inverse(f: ModuleHom) -> ModuleHom | None:
    """``g`` with ``g f ~ id`` and ``f g ~ id``, found by one joint linear solve.

    Unknowns are ``g`` in Hom(Y, X) together with ``u`` in Hom(X, P(X)) and
    ``v`` in Hom(Y, P(Y)) subject to ``g f - p_X u = id_X`` and
    ``f g - p_Y v = id_Y``.
    """
    x, y, p = f.source, f.target, f.p
    if x.dim == 0 and y.dim == 0:
        return y.zero_to(x)
    gb = hom_space_array(y, x)
    px = projective_cover(x).deflation
    py = projective_cover(y).deflation
    ub = hom_space_array(x, px.source)
    vb = hom_space_array(y, py.source)
    nx, ny = x.dim * x.dim, y.dim * y.dim
    cols = []
    for g in gb:
        cols.append(np.concatenate([_mod_matmul(g, f.a, p).ravel(), _mod_matmul(f.a, g, p).ravel()]))
    for u in ub:
        cols.append(np.concatenate([(-_mod_matmul(px.a, u, p)).ravel() % p, np.zeros(ny, dtype=np.int64)]))
    for v in vb:
        cols.append(np.concatenate([np.zeros(nx, dtype=np.int64), (-_mod_matmul(py.a, v, p)).ravel() % p]))
    rhs = np.concatenate([np.eye(x.dim, dtype=np.int64).ravel(), np.eye(y.dim, dtype=np.int64).ravel()])
    if not cols:
        return None
    sol = solve_array(np.stack(cols, axis=1), rhs.reshape(-1, 1), p)
    if sol is None:
        return None
    coeffs = sol.ravel()[: gb.shape[0]]
    if gb.shape[0] == 0:
        return y.zero_to(x)
    mat = np.tensordot(coeffs, gb, axes=1) % p
    return ModuleHom(y, x, mat, check=False)

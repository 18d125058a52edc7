"""Loop functor, left triangles from fibrations, cone triangles, and triangle comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

import itertools

from .algebra import (
    ISO_SEARCH_EXHAUSTIVE_LIMIT,
    ISO_SEARCH_SEED,
    ModuleHom,
    ModuleRep,
    ModuleError,
    column_hom,
    direct_sum,
    extend_along,
    factor_through,
    hom_space_array,
    injective_hull,
    kernel,
    projective_cover,
    pushout,
    pushout_induced,
    row_hom,
)
from .frobcat import is_stably_zero, is_weak_equivalence, stable_equal, stable_hom_dim, stable_inverse
from .linalg import _mod_matmul, kernel_array, rank_array, solve_array

LEFT = "left"    # Omega(C) -> A -> B -> C
RIGHT = "right"  # A -> B -> C -> Sigma(A)


class NotAFibrationError(ValueError):
    pass


@dataclass
class LoopMorphism:
    """``kappa: Omega(X) -> Omega(Y)`` induced by a lift ``x_f: P(X) -> P(Y)`` of ``f``."""

    f: ModuleHom
    lift: ModuleHom
    kappa: ModuleHom


def loop_on_object(x: ModuleRep) -> ModuleRep:
    return projective_cover(x).left


def loop_on_morphism(f: ModuleHom) -> LoopMorphism:
    cx, cy = projective_cover(f.source), projective_cover(f.target)
    x_f = factor_through(f @ cx.deflation, cy.deflation)
    if x_f is None:
        raise ModuleError("cover of the source does not lift along the cover of the target")
    kappa = factor_through(x_f @ cx.inflation, cy.inflation)
    if kappa is None:
        raise ModuleError("lift does not restrict to the syzygies")
    _check_loop_diagram(f, x_f, kappa)
    return LoopMorphism(f, x_f, kappa)


def _check_loop_diagram(f: ModuleHom, x_f: ModuleHom, kappa: ModuleHom) -> None:
    # rows: Omega(X) -(0, iota)^T-> X + P(X) -[[1, p], [1, 0]]-> X + X
    x, y = f.source, f.target
    rows = []
    for m in (x, y):
        c = projective_cover(m)
        ds = direct_sum(m, c.middle)
        inc = column_hom(c.left, ds, [c.left.zero_to(m), c.inflation])
        xx = direct_sum(m, m)
        pair = column_hom(ds.module, xx, [row_hom(ds, m, [m.identity(), c.deflation]),
                                          row_hom(ds, m, [m.identity(), c.middle.zero_to(m)])])
        if not (pair @ inc).is_zero():
            raise ModuleError("loop diagram row is not a complex")
        rows.append((ds, inc, xx, pair))
    (dsx, incx, xxx, pairx), (dsy, incy, xxy, pairy) = rows
    mid = ModuleHom(dsx.module, dsy.module, np.block([
        [f.a, np.zeros((y.dim, x_f.source.dim), dtype=np.int64)],
        [np.zeros((x_f.target.dim, x.dim), dtype=np.int64), x_f.a]]) % f.p, check=False)
    right = ModuleHom(xxx.module, xxy.module, np.block([
        [f.a, np.zeros_like(f.a)], [np.zeros_like(f.a), f.a]]) % f.p, check=False)
    if not (mid @ incx).equals(incy @ kappa) or not (right @ pairx).equals(pairy @ mid):
        raise ModuleError("loop diagram does not commute")


def sigma_on_object(x: ModuleRep) -> ModuleRep:
    return injective_hull(x).right


def sigma_on_morphism(f: ModuleHom) -> ModuleHom:
    """``Sigma(f): Sigma(X) -> Sigma(Y)`` induced by extending ``f`` over the injective hulls."""
    hx, hy = injective_hull(f.source), injective_hull(f.target)
    y_f = extend_along(hy.inflation @ f, hx.inflation)
    if y_f is None:
        raise ModuleError("map does not extend over the injective hull")
    s = extend_along(hy.deflation @ y_f, hx.deflation)
    if s is None:
        raise ModuleError("extension does not descend to the cosyzygies")
    return s


def loop_sigma_unit(x: ModuleRep) -> ModuleHom:
    """The comparison ``X -> Omega(Sigma(X))`` of the conflations ``X >-> I(X) ->> Sigma X``
    and ``Omega(Sigma X) >-> P(Sigma X) ->> Sigma X``; a stable isomorphism."""
    hull = injective_hull(x)
    cover = projective_cover(hull.right)
    alpha = factor_through(hull.deflation, cover.deflation)
    eps = factor_through(alpha @ hull.inflation, cover.inflation)
    if alpha is None or eps is None:
        raise ModuleError("could not compare hull and cover conflations")
    return eps


# ---------------------------------------------------------------------------
# triangles

@dataclass
class TriangleData:
    objects: tuple[ModuleRep, ModuleRep, ModuleRep, ModuleRep]
    maps: tuple[ModuleHom, ModuleHom, ModuleHom]
    provenance: str
    shape: str = LEFT
    composites_stably_zero: bool = field(default=False)

    def __post_init__(self):
        o, m = self.objects, self.maps
        for k, h in enumerate(m):
            if h.source is not o[k] or h.target is not o[k + 1]:
                raise ModuleError(f"triangle map {k} does not connect objects {k} and {k + 1}")
        self.composites_stably_zero = is_stably_zero(m[1] @ m[0]) and is_stably_zero(m[2] @ m[1])


def quillen_left_triangle(f: ModuleHom) -> TriangleData:
    """``Omega(Y) -(-xi_f)-> ker f -> X -f-> Y`` for a fibration ``f``.

    ``delta_f: P(Y) -> X`` solves ``f delta_f = p_Y`` and ``xi_f`` is the
    induced map on kernels.
    """
    if not f.is_surjective():
        raise NotAFibrationError("not a fibration: the morphism is not surjective")
    cy = projective_cover(f.target)
    delta = factor_through(cy.deflation, f)
    _, iota_f = kernel(f)
    xi = factor_through(delta @ cy.inflation, iota_f)
    if delta is None or xi is None:
        raise ModuleError("could not compare the cover of Y with the kernel of f")
    return TriangleData((cy.left, iota_f.source, f.source, f.target), (-xi, iota_f, f), "quillen")


def happel_triangle(f: ModuleHom) -> TriangleData:
    """``X -f-> Y -> C_f -> Sigma(X)`` where ``C_f`` is the pushout of the hull along ``f``."""
    hull = injective_hull(f.source)
    po = pushout(hull.inflation, f)
    h = pushout_induced(po, hull.deflation, f.target.zero_to(hull.right))
    return TriangleData((f.source, f.target, po.module, hull.right), (f, po.from_y, h), "happel", RIGHT)


def happel_left_triangle(f: ModuleHom) -> TriangleData:
    """The cone triangle of ``ker f -> X`` transported into left form.

    From ``K -> X -g-> C -h-> Sigma K`` this builds
    ``Omega(C) -(eps^-1 Omega(h))-> K -> X -g-> C``: the loop functor is
    applied to the connecting map and ``eps: K -> Omega(Sigma K)`` is the
    unit of the equivalence. No rotation sign is inserted; with the sign the
    first map would be ``+xi_f`` instead of ``-xi_f``.
    """
    if not f.is_surjective():
        raise NotAFibrationError("not a fibration: the morphism is not surjective")
    _, iota_f = kernel(f)
    right = happel_triangle(iota_f)
    k, x, c, _ = right.objects
    _, g, h = right.maps
    omega_h = loop_on_morphism(h).kappa
    eps_inv = stable_inverse(loop_sigma_unit(k))
    if eps_inv is None:
        raise ModuleError("K -> Omega(Sigma K) has no stable inverse")
    return TriangleData((omega_h.source, k, x, c), (eps_inv @ omega_h, iota_f, g), "happel")


# ---------------------------------------------------------------------------
# comparison

@dataclass
class TriangleIsomorphism:
    """Stable isomorphisms on the last three objects (left) or first three (right)."""

    maps: tuple[ModuleHom, ModuleHom, ModuleHom]
    candidates_tested: int
    exhaustive: bool


def _coords(basis: np.ndarray, vecs: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of flattened maps ``vecs`` (columns) in a hom basis."""
    if vecs.shape[1] == 0:
        return np.zeros((basis.shape[0], 0), dtype=np.int64)
    sol = solve_array(basis.reshape(basis.shape[0], -1).T, vecs, p)
    if sol is None:
        raise ModuleError("vector outside the hom space")
    return sol


def _stably_zero_coords(x: ModuleRep, y: ModuleRep, basis: np.ndarray) -> np.ndarray:
    p = x.p
    p_y = projective_cover(y).deflation
    ub = hom_space_array(x, p_y.source)
    if ub.shape[0] == 0 or basis.shape[0] == 0:
        return np.zeros((basis.shape[0], 0), dtype=np.int64)
    vecs = np.stack([_mod_matmul(p_y.a, u, p).ravel() for u in ub], axis=1)
    return _coords(basis, vecs, p)


def _witness_block(src: ModuleRep, tgt: ModuleRep) -> np.ndarray:
    """Columns ``-vec(p_tgt u)`` for u over a basis of Hom(src, P(tgt))."""
    p = src.p
    p_t = projective_cover(tgt).deflation
    ub = hom_space_array(src, p_t.source)
    if ub.shape[0] == 0:
        return np.zeros((tgt.dim * src.dim, 0), dtype=np.int64)
    return np.stack([(-_mod_matmul(p_t.a, u, p)).ravel() % p for u in ub], axis=1)


def _flat(mats: list[np.ndarray], rows: int) -> np.ndarray:
    if not mats:
        return np.zeros((rows, 0), dtype=np.int64)
    return np.stack([m.ravel() for m in mats], axis=1)


def triangles_isomorphic(t1: TriangleData, t2: TriangleData) -> TriangleIsomorphism | None:
    """Search for stable isomorphisms making all three squares commute stably.

    Commutation up to stable equivalence is a linear condition, so the
    candidate triples form a subspace; it is searched modulo stably zero
    triples, exhaustively when at most 2^16 classes exist and otherwise on
    2^16 vectors drawn with seed ``ISO_SEARCH_SEED``. Every candidate must be
    a weak equivalence in each component.
    """
    if t1.shape != t2.shape:
        raise ValueError("cannot compare a left triangle with a right triangle")
    p = t1.objects[0].p
    if t1.shape == LEFT:
        objs1, objs2 = t1.objects[1:], t2.objects[1:]
        for t in (t1, t2):
            if t.objects[0] is not loop_on_object(t.objects[3]):
                raise ValueError("left triangle must start at the chosen syzygy of its last object")
    else:
        objs1, objs2 = t1.objects[:3], t2.objects[:3]
    for a, b in zip(objs1, objs2):
        if (stable_hom_dim(a, a) != stable_hom_dim(b, b)
                or stable_hom_dim(a, b) != stable_hom_dim(b, a)):
            return None

    bases = [hom_space_array(a, b) for a, b in zip(objs1, objs2)]
    sizes = [b.shape[0] for b in bases]
    offs = np.cumsum([0] + sizes)
    nphi = int(offs[-1])

    blocks_rows = []  # each: (phi_cols (rows x nphi), witness_cols)
    u1, v1, w1 = t1.maps
    u2, v2, w2 = t2.maps
    # squares between consecutive objects among the three compared ones
    if t1.shape == LEFT:
        sq = [(0, 1, v1, v2), (1, 2, w1, w2)]
    else:
        sq = [(0, 1, u1, u2), (1, 2, v1, v2)]
    for i, j, m1, m2 in sq:
        # phi_j m1 - m2 phi_i ~ 0
        rows = m2.target.dim * m1.source.dim
        phi = np.zeros((rows, nphi), dtype=np.int64)
        for k, b in enumerate(bases[j]):
            phi[:, offs[j] + k] = _mod_matmul(b, m1.a, p).ravel()
        for k, b in enumerate(bases[i]):
            phi[:, offs[i] + k] = (-_mod_matmul(m2.a, b, p)).ravel() % p
        blocks_rows.append((phi, _witness_block(m1.source, m2.target)))
    if t1.shape == LEFT:
        # phi_A u1 ~ u2 Omega(phi_C)
        rows = u2.target.dim * u1.source.dim
        phi = np.zeros((rows, nphi), dtype=np.int64)
        for k, b in enumerate(bases[0]):
            phi[:, offs[0] + k] = _mod_matmul(b, u1.a, p).ravel()
        c1, c2 = objs1[2], objs2[2]
        for k, b in enumerate(bases[2]):
            kappa = loop_on_morphism(ModuleHom(c1, c2, b, check=False)).kappa
            phi[:, offs[2] + k] = (-_mod_matmul(u2.a, kappa.a, p)).ravel() % p
        blocks_rows.append((phi, _witness_block(u1.source, u2.target)))
    else:
        # Sigma(phi_A) w1 ~ w2 phi_C
        rows = w2.target.dim * w1.source.dim
        phi = np.zeros((rows, nphi), dtype=np.int64)
        a1, a2 = objs1[0], objs2[0]
        for k, b in enumerate(bases[0]):
            s = sigma_on_morphism(ModuleHom(a1, a2, b, check=False))
            phi[:, offs[0] + k] = _mod_matmul(s.a, w1.a, p).ravel()
        for k, b in enumerate(bases[2]):
            phi[:, offs[2] + k] = (-_mod_matmul(w2.a, b, p)).ravel() % p
        blocks_rows.append((phi, _witness_block(w1.source, w2.target)))

    nwit = sum(wb.shape[1] for _, wb in blocks_rows)
    total_rows = sum(ph.shape[0] for ph, _ in blocks_rows)
    system = np.zeros((total_rows, nphi + nwit), dtype=np.int64)
    r = c = 0
    for ph, wb in blocks_rows:
        system[r:r + ph.shape[0], :nphi] = ph
        system[r:r + ph.shape[0], nphi + c:nphi + c + wb.shape[1]] = wb
        r += ph.shape[0]
        c += wb.shape[1]
    sol = kernel_array(system, p)[:nphi] if system.shape[0] else np.eye(nphi + nwit, dtype=np.int64)[:nphi]

    # quotient by stably zero triples
    zero_cols = []
    for idx, (a, b) in enumerate(zip(objs1, objs2)):
        zc = _stably_zero_coords(a, b, bases[idx])
        full = np.zeros((nphi, zc.shape[1]), dtype=np.int64)
        full[offs[idx]:offs[idx + 1]] = zc
        zero_cols.append(full)
    zero = np.hstack(zero_cols) if zero_cols else np.zeros((nphi, 0), dtype=np.int64)
    zr = rank_array(zero, p) if zero.shape[1] else 0
    reps = []
    cur = zero
    for col in sol.T:
        cand = np.hstack([cur, col.reshape(-1, 1)])
        if rank_array(cand, p) > zr + len(reps):
            reps.append(col)
            cur = cand
    k = len(reps)
    repm = np.stack(reps, axis=1) if reps else np.zeros((nphi, 0), dtype=np.int64)

    exhaustive = p**k <= ISO_SEARCH_EXHAUSTIVE_LIMIT
    if exhaustive:
        coeff_iter = itertools.product(range(p), repeat=k)
    else:
        rng = np.random.default_rng(ISO_SEARCH_SEED)
        coeff_iter = (tuple(rng.integers(0, p, size=k)) for _ in range(ISO_SEARCH_EXHAUSTIVE_LIMIT))
    tested = 0
    for coeffs in coeff_iter:
        tested += 1
        vec = (repm @ np.array(coeffs, dtype=np.int64)) % p if k else np.zeros(nphi, dtype=np.int64)
        maps = []
        for idx, (a, b) in enumerate(zip(objs1, objs2)):
            part = vec[offs[idx]:offs[idx + 1]]
            mat = (np.tensordot(part, bases[idx], axes=1) % p) if sizes[idx] else np.zeros((b.dim, a.dim), dtype=np.int64)
            maps.append(ModuleHom(a, b, mat, check=False))
        if all(is_weak_equivalence(m) for m in maps):
            iso = TriangleIsomorphism(tuple(maps), tested, exhaustive)
            _verify_triangle_iso(t1, t2, iso)
            return iso
    return None


def _verify_triangle_iso(t1: TriangleData, t2: TriangleData, iso: TriangleIsomorphism) -> None:
    a, b, c = iso.maps
    u1, v1, w1 = t1.maps
    u2, v2, w2 = t2.maps
    if t1.shape == LEFT:
        checks = [stable_equal(b @ v1, v2 @ a), stable_equal(c @ w1, w2 @ b),
                  stable_equal(a @ u1, u2 @ loop_on_morphism(c).kappa)]
    else:
        checks = [stable_equal(b @ u1, u2 @ a), stable_equal(c @ v1, v2 @ b),
                  stable_equal(sigma_on_morphism(a) @ w1, w2 @ c)]
    if not all(checks):
        raise ModuleError("triangle isomorphism certificate failed verification")


def compare_fibration_triangles(f: ModuleHom) -> TriangleIsomorphism | None:
    """Compare the left triangle of a fibration with the rotated cone triangle of its kernel."""
    return triangles_isomorphic(quillen_left_triangle(f), happel_left_triangle(f))

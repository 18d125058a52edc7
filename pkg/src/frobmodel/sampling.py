"""Seeded samplers for modules, morphisms and diagrams over a checked algebra."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .algebra import (
    CheckedAlgebra,
    ModuleHom,
    ModuleRep,
    cokernel,
    column_hom,
    combine,
    cosyzygy,
    direct_sum,
    hom_space_array,
    is_isomorphic,
    kernel,
    projective_cover,
    radical_power_module,
    row_hom,
    syzygy,
)
from .linalg import _mod_matmul, kernel_array

MAX_SUMMANDS = 3


def loewy_length(algebra: CheckedAlgebra) -> int:
    k = 0
    while k <= algebra.dim and radical_power_module(algebra, k).dim:
        k += 1
    return k


def module_catalog(algebra: CheckedAlgebra, dim_bound: int) -> list[ModuleRep]:
    """Pairwise non-isomorphic nonzero modules of dimension at most ``dim_bound``.

    Seeds are the simple module, the regular module, the quotients
    ``A / rad^k`` and the powers ``rad^k A``; the list is then closed under
    syzygy and cosyzygy within the bound.
    """
    seeds = []
    for k in range(1, loewy_length(algebra) + 1):
        seeds.append(("cyclic:%d" % k, algebra.cyclic_module(k)))
    for k in range(1, loewy_length(algebra)):
        seeds.append(("radical:%d" % k, radical_power_module(algebra, k)))
    seeds += [("simple", algebra.simple_module()), ("regular", algebra.regular_module())]
    found: list[ModuleRep] = []
    queue = list(seeds)
    while queue:
        ref, m = queue.pop(0)
        if m.dim == 0 or m.dim > dim_bound:
            continue
        if any(f.dim == m.dim and is_isomorphic(f, m) for f in found):
            continue
        m.name = ref
        found.append(m)
        queue.append((f"omega:{ref}", syzygy(m)))
        queue.append((f"sigma:{ref}", cosyzygy(m)))
    found.sort(key=lambda m: m.dim)
    return found


def match_catalog(x: ModuleRep, catalog: list[ModuleRep]) -> ModuleRep | None:
    """The catalog entry isomorphic to ``x``, if any."""
    for m in catalog:
        if m.dim == x.dim and is_isomorphic(m, x):
            return m
    return None


@dataclass
class RetractDiagram:
    """``f`` is a retract of ``g``: ``r_a s_a = 1``, ``r_b s_b = 1``, ``g s_a = s_b f``, ``f r_a = r_b g``."""

    f: ModuleHom
    g: ModuleHom
    s_a: ModuleHom
    r_a: ModuleHom
    s_b: ModuleHom
    r_b: ModuleHom

    def verify(self) -> bool:
        f, g = self.f, self.g
        return ((self.r_a @ self.s_a).equals(f.source.identity())
                and (self.r_b @ self.s_b).equals(f.target.identity())
                and (g @ self.s_a).equals(self.s_b @ f)
                and (f @ self.r_a).equals(self.r_b @ g))


class Sampler:
    """Draws objects and maps from direct sums of catalog modules.

    Every draw takes an explicit ``numpy.random.Generator`` so callers can
    derive independent per-instance streams from one seed.
    """

    def __init__(self, algebra: CheckedAlgebra, dim_bound: int):
        self.algebra = algebra
        self.p = algebra.p
        self.dim_bound = dim_bound
        self.catalog = module_catalog(algebra, dim_bound)
        dims = [m.dim for m in self.catalog]
        self.shapes: list[tuple[int, ...]] = [()]
        for r in range(1, MAX_SUMMANDS + 1):
            for combo in itertools.combinations_with_replacement(range(len(dims)), r):
                if sum(dims[i] for i in combo) <= dim_bound:
                    self.shapes.append(combo)
        self._sums: dict[tuple[int, ...], ModuleRep] = {}

    # -- objects ------------------------------------------------------------
    def module_for(self, shape: tuple[int, ...]) -> ModuleRep:
        m = self._sums.get(shape)
        if m is None:
            if not shape:
                m = self.algebra.zero_module()
            elif len(shape) == 1:
                m = self.catalog[shape[0]]
            else:
                m = direct_sum(*[self.catalog[i] for i in shape]).module
                m.name = "+".join(self.catalog[i].name for i in shape)
            self._sums[shape] = m
        return m

    def module(self, rng: np.random.Generator) -> ModuleRep:
        return self.module_for(self.shapes[int(rng.integers(len(self.shapes)))])

    def projective(self, rng: np.random.Generator) -> ModuleRep:
        return projective_cover(self.module(rng)).middle

    # -- morphisms ------------------------------------------------------------
    def hom(self, rng: np.random.Generator, x: ModuleRep, y: ModuleRep) -> ModuleHom:
        """Uniform element of ``Hom(x, y)``."""
        basis = hom_space_array(x, y)
        if basis.shape[0] == 0:
            return x.zero_to(y)
        return combine(x, y, basis, rng.integers(0, self.p, size=basis.shape[0]))

    def morphism(self, rng: np.random.Generator) -> ModuleHom:
        return self.hom(rng, self.module(rng), self.module(rng))

    def automorphism(self, rng: np.random.Generator, x: ModuleRep, tries: int = 64) -> ModuleHom:
        for _ in range(tries):
            f = self.hom(rng, x, x)
            if f.is_injective():
                return f
        return x.identity()

    def isomorphism(self, rng: np.random.Generator) -> ModuleHom:
        return self.automorphism(rng, self.module(rng))

    def cofibration(self, rng: np.random.Generator) -> ModuleHom:
        """An inflation drawn from several constructions (kernels, factor legs, split inclusions)."""
        from .model import factor_cof_trivfib, factor_trivcof_fib

        kind = int(rng.integers(5))
        if kind == 0:
            return kernel(self.morphism(rng))[1]
        if kind == 1:
            return factor_cof_trivfib(self.morphism(rng)).first
        if kind == 2:
            return factor_trivcof_fib(self.morphism(rng)).first
        if kind == 3:
            return self.split_inclusion(rng, self.module(rng))
        return self.isomorphism(rng)

    def fibration(self, rng: np.random.Generator) -> ModuleHom:
        from .model import factor_cof_trivfib, factor_trivcof_fib

        kind = int(rng.integers(5))
        if kind == 0:
            return cokernel(self.morphism(rng))[1]
        if kind == 1:
            return factor_trivcof_fib(self.morphism(rng)).second
        if kind == 2:
            return factor_cof_trivfib(self.morphism(rng)).second
        if kind == 3:
            return self.split_projection(rng, self.module(rng))
        return self.isomorphism(rng)

    def trivial_cofibration(self, rng: np.random.Generator) -> ModuleHom:
        from .model import factor_trivcof_fib

        if rng.integers(2):
            return factor_trivcof_fib(self.morphism(rng)).first
        return self.split_inclusion(rng, self.module(rng), projective=True)

    def trivial_fibration(self, rng: np.random.Generator) -> ModuleHom:
        from .model import factor_cof_trivfib

        if rng.integers(2):
            return factor_cof_trivfib(self.morphism(rng)).second
        return self.split_projection(rng, self.module(rng), projective=True)

    def weak_equivalence_like(self, rng: np.random.Generator) -> ModuleHom:
        """A morphism biased toward weak equivalences; still classified by the caller."""
        kind = int(rng.integers(4))
        if kind == 0:
            return self.trivial_cofibration(rng)
        if kind == 1:
            return self.trivial_fibration(rng)
        if kind == 2:
            return self.isomorphism(rng)
        return self.morphism(rng)

    def split_inclusion(self, rng: np.random.Generator, x: ModuleRep, projective: bool = False) -> ModuleHom:
        """``x -> x + q`` as ``(1, t)^T`` for random ``t``; ``q`` projective when asked."""
        q = self.projective(rng) if projective else self.module(rng)
        ds = direct_sum(x, q)
        return column_hom(x, ds, [x.identity(), self.hom(rng, x, q)])

    def split_projection(self, rng: np.random.Generator, y: ModuleRep, projective: bool = False) -> ModuleHom:
        q = self.projective(rng) if projective else self.module(rng)
        ds = direct_sum(y, q)
        return row_hom(ds, y, [y.identity(), self.hom(rng, q, y)])

    def stably_zero(self, rng: np.random.Generator, x: ModuleRep, y: ModuleRep) -> ModuleHom:
        """A uniform map ``x -> y`` among those factoring through ``P(y)``."""
        p_y = projective_cover(y).deflation
        return p_y @ self.hom(rng, x, p_y.source)

    # -- diagrams -------------------------------------------------------------
    def commuting_square(self, rng: np.random.Generator, i: ModuleHom, p: ModuleHom
                         ) -> tuple[ModuleHom, ModuleHom]:
        """Uniform ``(f, g)`` with ``p f = g i`` for ``i: A -> B`` and ``p: X -> Y``."""
        a, b, x, y = i.source, i.target, p.source, p.target
        fb = hom_space_array(a, x)
        gb = hom_space_array(b, y)
        P = self.p
        cols = [(_mod_matmul(p.a, m, P)).ravel() for m in fb]
        cols += [(-_mod_matmul(m, i.a, P)).ravel() % P for m in gb]
        if not cols:
            return a.zero_to(x), b.zero_to(y)
        sol = kernel_array(np.stack(cols, axis=1), P)
        if sol.shape[1] == 0:
            return a.zero_to(x), b.zero_to(y)
        coeffs = _mod_matmul(sol, rng.integers(0, P, size=(sol.shape[1], 1)), P).ravel()
        f = combine(a, x, fb, coeffs[: fb.shape[0]]) if fb.shape[0] else a.zero_to(x)
        g = combine(b, y, gb, coeffs[fb.shape[0]:]) if gb.shape[0] else b.zero_to(y)
        return f, g

    def retract(self, rng: np.random.Generator, f: ModuleHom) -> RetractDiagram:
        """Exhibit ``f`` as a retract of a conjugated ``f + e``.

        ``g = phi (f + e) psi^-1`` with random automorphisms ``psi`` of
        ``A + A'`` and ``phi`` of ``B + B'``, and the section/retraction pairs
        transported along them.
        """
        e = self.morphism(rng)
        sa, sb = direct_sum(f.source, e.source), direct_sum(f.target, e.target)
        fe = ModuleHom(sa.module, sb.module,
                       (sb.injections[0].a @ f.a @ sa.projections[0].a
                       + sb.injections[1].a @ e.a @ sa.projections[1].a) % f.p, check=False)
        psi = self.automorphism(rng, sa.module)
        phi = self.automorphism(rng, sb.module)
        psi_inv = _inverse_hom(psi)
        phi_inv = _inverse_hom(phi)
        g = phi @ fe @ psi_inv
        return RetractDiagram(
            f=f, g=g,
            s_a=psi @ sa.injections[0], r_a=sa.projections[0] @ psi_inv,
            s_b=phi @ sb.injections[0], r_b=sb.projections[0] @ phi_inv,
        )


def _inverse_hom(f: ModuleHom) -> ModuleHom:
    from .linalg import inverse

    inv = inverse(f.matrix)
    if inv is None:
        raise ValueError("automorphism is not invertible")
    return ModuleHom(f.target, f.source, inv, check=False)

"""Brute-force reference computations, written without the package.

Everything here enumerates vectors or matrices over F_p outright, so it is
only usable on tiny inputs; it exists to check the elimination-based code.
"""

from __future__ import annotations

import itertools


def vectors(p: int, n: int):
    return itertools.product(range(p), repeat=n)


def matvec(m, v, p):
    return tuple(sum(a * b for a, b in zip(row, v)) % p for row in m)


def matmul(a, b, p):
    cols = list(zip(*b)) if b and b[0] else []
    return [[sum(x * y for x, y in zip(row, col)) % p for col in cols] for row in a]


def jordan_x(n: int):
    """Action of x on J_n = F_p[x]/(x^n) in the basis 1, x, ..., x^(n-1)."""
    return [[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)]


def span_size(vecs, p, n):
    """Size of the F_p-span of ``vecs`` by closure under addition and scaling."""
    span = {tuple([0] * n)}
    for v in vecs:
        new = set()
        for s in span:
            for c in range(p):
                new.add(tuple((a + c * b) % p for a, b in zip(s, v)))
        span = new
    return len(span)


def log_p(size: int, p: int) -> int:
    k = 0
    while p**k < size:
        k += 1
    assert p**k == size
    return k


def syzygy_of_jordan_block(p: int, n: int, i: int) -> tuple[int, list[int]]:
    """Cover ``J_n ->> J_i`` sends 1 to 1; returns (dim of kernel, dims of x^j K for j >= 0).

    The kernel is found by testing every vector of J_n.
    """
    cover = [[1 if r == c else 0 for c in range(n)] for r in range(i)]  # truncation
    kernel = [v for v in vectors(p, n) if not any(matvec(cover, v, p))]
    x = jordan_x(n)
    dims = []
    layer = set(kernel)
    while len(layer) > 1:
        dims.append(log_p(len(layer), p))
        layer = {matvec(x, v, p) for v in layer}
    return log_p(len(kernel), p), dims


def homs_between_jordan(p: int, m: int, n: int):
    """All matrices ``J_m -> J_n`` commuting with x, by enumeration."""
    xm, xn = jordan_x(m), jordan_x(n)
    out = []
    for entries in vectors(p, m * n):
        f = [list(entries[r * m:(r + 1) * m]) for r in range(n)]
        if matmul(f, xm, p) == matmul(xn, f, p):
            out.append(f)
    return out


def stable_hom_dim_jordan(p: int, n: int, a: int, b: int) -> int:
    """dim Hom(J_a, J_b) minus the maps through a free module, all enumerated.

    Maps through a projective are sums of maps through the regular module
    J_n, so the span of all composites ``J_a -> J_n -> J_b`` is taken.
    """
    hab = homs_between_jordan(p, a, b)
    into = homs_between_jordan(p, a, n)
    out = homs_between_jordan(p, n, b)
    comps = {tuple(itertools.chain.from_iterable(matmul(g, f, p))) for f in into for g in out}
    return log_p(len(hab), p) - log_p(span_size(comps, p, a * b), p)


def radical_by_units(p: int, d: int, c) -> set[tuple[int, ...]]:
    """Jacobson radical of a small algebra: ``a`` with ``1 - b a`` a unit for every ``b``.

    ``c[i][j][k]`` are structure constants; unit is e_0 is NOT assumed, so
    the unit vector is found by search.
    """
    def mul(u, v):
        return tuple(sum(u[i] * v[j] * c[i][j][k] for i in range(d) for j in range(d)) % p for k in range(d))

    elems = list(vectors(p, d))
    one = next(e for e in elems if all(mul(e, v) == v and mul(v, e) == v for v in elems))
    units = {u for u in elems if any(mul(u, v) == one for v in elems)}
    rad = set()
    for a in elems:
        if all(tuple((o - w) % p for o, w in zip(one, mul(b, a))) in units for b in elems):
            rad.add(a)
    return rad

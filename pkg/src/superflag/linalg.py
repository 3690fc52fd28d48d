"""Exact sparse linear algebra over Q.

Vectors and matrix rows are ``dict`` index -> nonzero rational.  Elimination
is done per connected block of the row/column incidence graph, which keeps
the weight-graded solver systems small.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from . import kernels as K


def _blocks(rows: Sequence[dict], ncols: int):
    parent = list(range(ncols))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for row in rows:
        it = iter(row)
        first = next(it, None)
        if first is None:
            continue
        ra = find(first)
        for j in it:
            rb = find(j)
            if rb != ra:
                parent[rb] = ra
    groups: dict[int, list[int]] = {}
    for j in range(ncols):
        groups.setdefault(find(j), []).append(j)
    row_groups: dict[int, list[dict]] = {}
    for row in rows:
        if row:
            row_groups.setdefault(find(next(iter(row))), []).append(row)
    return [(cols, row_groups.get(root, [])) for root, cols in groups.items()]


def row_reduce(rows: Iterable[dict]) -> dict[int, dict]:
    """Reduced row echelon form as ``{pivot column: row}``."""
    return K.eliminate(rows)


def rank(rows: Sequence[dict], ncols: int) -> int:
    return sum(len(K.eliminate(r)) for _, r in _blocks(rows, ncols))


def nullspace(rows: Sequence[dict], ncols: int) -> list[dict]:
    """Kernel basis of the matrix with the given sparse rows.

    The basis is returned in reduced row echelon form (sorted by pivot), so
    the result is deterministic.
    """
    kernel = []
    for cols, brows in _blocks(rows, ncols):
        piv = K.eliminate(brows)
        free = [j for j in cols if j not in piv]
        vecs = []
        for fcol in free:
            v = {fcol: 1}
            for p, prow in piv.items():
                c = prow.get(fcol)
                if c:
                    v[p] = -c
            vecs.append(v)
        kernel.extend(K.eliminate(vecs).values())
    kernel.sort(key=min)
    return kernel


class Span:
    """Subspace given by an echelon basis; supports membership and coordinates."""

    def __init__(self, vectors: Iterable[dict]):
        self.pivots = K.eliminate(vectors)
        self.order = sorted(self.pivots)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def basis(self) -> list[dict]:
        return [self.pivots[p] for p in self.order]

    def residual(self, v: dict) -> dict:
        r = dict(v)
        for p in self.order:
            c = r.get(p)
            if c:
                K.poly_add_scaled(r, self.pivots[p], -c)
        return r

    def __contains__(self, v: dict) -> bool:
        return not self.residual(v)

    def coordinates(self, v: dict) -> list | None:
        """Coefficients w.r.t. :meth:`basis`, or None if ``v`` is outside the span."""
        if self.residual(v):
            return None
        return [v.get(p, 0) for p in self.order]


def combine(vectors: Sequence[dict], coeffs: Sequence) -> dict:
    out: dict = {}
    for v, c in zip(vectors, coeffs):
        if c:
            K.poly_add_scaled(out, v, c)
    return out

"""Weight combinatorics for gl_n used in the H^0 arguments.

Weights are integer vectors in the orthonormal basis ``mu_1..mu_n`` with
positive roots ``mu_i - mu_j`` (``i < j``), so a weight is dominant exactly
when it is weakly decreasing.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

Weight = tuple[int, ...]


class NeedsDecomposition(Exception):
    """A dominant weight occurs in a reducible module; H^0 needs a character split."""


def is_dominant(lam) -> bool:
    return all(a >= b for a, b in zip(lam, lam[1:]))


def _check_grid(n: int, k: int):
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")


def wedge_weights(n: int, k: int, p: int) -> Counter:
    """Weights of the p-th exterior power of ``rho_1^* (x) rho_2``.

    The basis vectors are indexed by ``(i, j)`` with ``1 <= i <= n-k`` and
    ``n-k+1 <= j <= n``; each carries weight ``-mu_i + mu_j``.
    """
    _check_grid(n, k)
    cells = [(i, j) for i in range(n - k) for j in range(n - k, n)]
    if not 0 <= p <= len(cells):
        raise ValueError(f"need 0 <= p <= {len(cells)}, got {p}")
    out: Counter = Counter()
    for subset in itertools.combinations(cells, p):
        lam = [0] * n
        for i, j in subset:
            lam[i] -= 1
            lam[j] += 1
        out[tuple(lam)] += 1
    return out


def weyl_dim(lam) -> int:
    """Dimension of the irreducible gl_n-module of dominant highest weight ``lam``."""
    if not is_dominant(lam):
        raise ValueError(f"{tuple(lam)} is not dominant")
    n = len(lam)
    d = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            d *= Fraction(lam[i] - lam[j] + j - i, j - i)
    assert d.denominator == 1
    return int(d)


def h0_wedge_dimension(n: int, k: int, p: int) -> int:
    """Dimension of the invariant sections coming from ``wedge_weights(n, k, p)``.

    Zero when no weight is dominant, ``1`` for ``p = 0``.  Raises
    NeedsDecomposition otherwise.
    """
    weights = wedge_weights(n, k, p)
    if p == 0:
        return weyl_dim((0,) * n)
    if not any(is_dominant(w) for w in weights):
        return 0
    raise NeedsDecomposition(f"dominant weight among wedge weights for n={n}, k={k}, p={p}")


def _adjoint_highest(n: int, k1: int) -> Weight | None:
    """Highest weight of the adjoint module of gl_{k1} in positions n-k1+1..n.

    The module is the irreducible adjoint action on traceless matrices, which
    is zero for ``k1 = 1``; None is returned then.
    """
    if k1 == 1:
        return None
    lam = [0] * n
    lam[n - k1] += 1
    lam[n - 1] -= 1
    return tuple(lam)


@dataclass(frozen=True)
class PsiWeights:
    """Highest weights of the fiber representation, per parity."""

    even: Counter
    odd: Counter

    def total(self) -> Counter:
        return self.even + self.odd


def psi_weights(n: int, k1: int, exceptional: bool) -> PsiWeights:
    """Isotropy representation on the fiber algebra split by parity.

    Generic fiber: ``Ad`` on the even part, ``Ad + 1`` on the odd part.
    Exceptional fiber: ``Ad + 1`` on both.
    """
    if not 1 <= k1 < n:
        raise ValueError(f"need 1 <= k1 < n, got n={n}, k1={k1}")
    ad = _adjoint_highest(n, k1)
    zero = (0,) * n
    even: Counter = Counter()
    odd: Counter = Counter()
    if ad is not None:
        even[ad] += 1
        odd[ad] += 1
    odd[zero] += 1
    if exceptional:
        even[zero] += 1
    return PsiWeights(even, odd)


def psi_highest_weights(n: int, k1: int, exceptional: bool) -> Counter:
    return psi_weights(n, k1, exceptional).total()


def w0_sections(n: int, k1: int, exceptional: bool) -> tuple[int, int]:
    """Graded dimension of the global sections of the degree-zero fiber bundle."""
    pw = psi_weights(n, k1, exceptional)

    def count(ws: Counter) -> int:
        return sum(m * weyl_dim(w) for w, m in ws.items() if is_dominant(w))

    return count(pw.even), count(pw.odd)


def dominance_scan(n: int, k: int, p: int) -> dict:
    weights = wedge_weights(n, k, p)
    return {
        "n": n,
        "k": k,
        "p": p,
        "total_weights": sum(weights.values()),
        "dominant_count": sum(m for w, m in weights.items() if is_dominant(w)),
    }


def full_scan(max_n: int = 6) -> list[dict]:
    """Scans for all ``n <= max_n``, ``0 < k < n``, ``0 < p <= (n-k)k``."""
    out = []
    for n in range(2, max_n + 1):
        for k in range(1, n):
            for p in range(1, (n - k) * k + 1):
                out.append(dominance_scan(n, k, p))
    return out


def expected_count(n: int, k: int, p: int) -> int:
    return comb((n - k) * k, p)

"""Pure-Python hot kernels.

Polynomial data is a plain ``dict`` mapping ``(even_key, odd_mask)`` to a
coefficient (``int`` or ``Fraction``).  ``even_key`` is a packed integer whose
ordering is graded lexicographic (see :class:`superflag.grassmann.VarTable`),
``odd_mask`` has bit ``i`` set when the ``i``-th odd generator is present.

The compiled module ``_ckernels`` exposes exactly the same functions.
"""

from fractions import Fraction
from math import gcd
from heapq import heapify, heappop, heappush

_sign_cache = {}


def koszul_sign(m1, m2):
    """Sign of ``xi^m1 * xi^m2`` rewritten in increasing order, 0 if they overlap."""
    key = (m1, m2)
    s = _sign_cache.get(key)
    if s is not None:
        return s
    if m1 & m2:
        s = 0
    else:
        count = 0
        rest = m2
        while rest:
            low = rest & -rest
            count += (m1 & ~((low << 1) - 1)).bit_count()
            rest ^= low
        s = -1 if count & 1 else 1
    _sign_cache[key] = s
    return s


def qdiv(c, d):
    """Exact rational quotient, kept as ``int`` when possible."""
    if d == 1:
        return c
    if d == -1:
        return -c
    q = Fraction(c) / d
    if q.denominator == 1:
        return q.numerator
    return q


def poly_mul(a, b):
    out = {}
    bitems = list(b.items())
    for (ka, ma), ca in a.items():
        for (kb, mb), cb in bitems:
            if ma & mb:
                continue
            key = (ka + kb, ma | mb)
            if ma and mb and koszul_sign(ma, mb) < 0:
                v = out.get(key, 0) - ca * cb
            else:
                v = out.get(key, 0) + ca * cb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def poly_add_scaled(acc, a, scale):
    """In place: ``acc += scale * a``."""
    for k, c in a.items():
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


def _divisible(k, lk, guard):
    return ((k | guard) - lk) & guard == guard


def poly_divmod(f, g, guard):
    """Divide ``f`` by the purely even polynomial ``g``.

    Returns ``(q, r)`` with ``f = g*q + r`` and no term of ``r`` divisible by
    the graded-lex leading term of ``g``.  The division runs independently on
    each odd-mask component of ``f``.
    """
    gl = [(k, c) for (k, _), c in g.items()]
    lk, lc = max(gl)
    tail = [(k, c) for k, c in gl if k != lk]
    groups = {}
    for (k, m), c in f.items():
        groups.setdefault(m, {})[k] = c
    q = {}
    r = {}
    for m, p in groups.items():
        heap = [-k for k in p]
        heapify(heap)
        while heap:
            k = -heappop(heap)
            c = p.pop(k, 0)
            if not c:
                continue
            if not _divisible(k, lk, guard):
                r[(k, m)] = c
                continue
            t = k - lk
            cq = qdiv(c, lc)
            q[(t, m)] = cq
            for gk, gc in tail:
                nk = t + gk
                old = p.get(nk)
                v = (old or 0) - cq * gc
                if v:
                    if old is None:
                        heappush(heap, -nk)
                    p[nk] = v
                elif old is not None:
                    del p[nk]
    return q, r


def poly_nf(f, g, guard):
    """Remainder of ``f`` modulo the principal ideal generated by even ``g``."""
    return poly_divmod(f, g, guard)[1]


def _primitive(row):
    """Integer row scaled to content 1 with a positive leading (minimal) entry."""
    den = 0
    for v in row.values():
        if type(v) is not int:
            d = v.denominator
            den = d if not den else den * d // gcd(den, d)
    if den:
        row = {j: int(v * den) for j, v in row.items()}
    g = gcd(*row.values())
    if row[min(row)] < 0:
        g = -g
    if g != 1:
        row = {j: v // g for j, v in row.items()}
    return row


def _combine(a, ca, b, cb):
    """``ca*a - cb*b`` for integer rows, made primitive."""
    out = {j: ca * v for j, v in a.items()} if ca != 1 else dict(a)
    for j, v in b.items():
        nv = out.get(j, 0) - cb * v
        if nv:
            out[j] = nv
        else:
            out.pop(j, None)
    return _primitive(out) if out else out


def eliminate(rows):
    """Reduce sparse rational rows to reduced row echelon form.

    ``rows`` is an iterable of ``dict`` column -> nonzero coefficient.  Returns a
    ``dict`` pivot column -> normalized row (pivot entry 1, zero in every other
    pivot column).  The elimination itself is fraction free: rows are kept as
    primitive integer vectors and only the final rows are divided by their
    pivots.
    """
    pivots = {}
    for src in rows:
        if not src:
            continue
        row = _primitive(dict(src))
        for col in [j for j in row if j in pivots]:
            c = row.get(col)
            if not c:
                continue
            prow = pivots[col]
            p = prow[col]
            g = gcd(p, c)
            row = _combine(row, p // g, prow, c // g)
            if not row:
                break
        if not row:
            continue
        col = min(row)
        piv = row[col]
        # keep every earlier pivot row free of the new pivot column
        for pc, prow in pivots.items():
            c = prow.get(col)
            if c:
                g = gcd(piv, c)
                pivots[pc] = _combine(prow, piv // g, row, c // g)
        pivots[col] = row
    out = {}
    for col, row in pivots.items():
        p = row[col]
        out[col] = {j: qdiv(v, p) for j, v in row.items()}
    return out

# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the kernels in ``_pykernels`` (same API and results)."""

from fractions import Fraction
from math import gcd
from heapq import heapify, heappop, heappush

cdef dict _sign_cache = {}


cdef inline int _popcount(object x):
    return (<object>x).bit_count()


cpdef int koszul_sign(object m1, object m2):
    key = (m1, m2)
    s = _sign_cache.get(key)
    if s is not None:
        return s
    cdef int count = 0
    cdef int out
    if m1 & m2:
        out = 0
    else:
        rest = m2
        while rest:
            low = rest & -rest
            count += _popcount(m1 & ~((low << 1) - 1))
            rest ^= low
        out = -1 if count & 1 else 1
    _sign_cache[key] = out
    return out


cpdef object qdiv(object c, object d):
    if d == 1:
        return c
    if d == -1:
        return -c
    q = Fraction(c) / d
    if q.denominator == 1:
        return q.numerator
    return q


cpdef dict poly_mul(dict a, dict b):
    cdef dict out = {}
    cdef list bitems = list(b.items())
    cdef object ka, ma, ca, kb, mb, cb, key, v
    cdef tuple ta, tb
    for ta, ca in a.items():
        ka, ma = ta
        for tb, cb in bitems:
            kb, mb = tb
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


cpdef dict poly_add_scaled(dict acc, dict a, object scale):
    cdef object k, c, v
    for k, c in a.items():
        v = acc.get(k, 0) + scale * c
        if v:
            acc[k] = v
        else:
            acc.pop(k, None)
    return acc


cpdef tuple poly_divmod(dict f, dict g, object guard):
    cdef list gl = [(t[0], c) for t, c in g.items()]
    lk, lc = max(gl)
    cdef list tail = [(k, c) for k, c in gl if k != lk]
    cdef dict groups = {}
    cdef dict q = {}
    cdef dict r = {}
    cdef dict p
    cdef list heap
    for t, c in f.items():
        groups.setdefault(t[1], {})[t[0]] = c
    for m, p in groups.items():
        heap = [-k for k in p]
        heapify(heap)
        while heap:
            k = -heappop(heap)
            c = p.pop(k, 0)
            if not c:
                continue
            if ((k | guard) - lk) & guard != guard:
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


cpdef dict poly_nf(dict f, dict g, object guard):
    return poly_divmod(f, g, guard)[1]


cdef dict _primitive(dict row):
    cdef object den = 0
    cdef object v, d, g
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


cdef dict _combine(dict a, object ca, dict b, object cb):
    cdef dict out
    cdef object j, v, nv
    out = {j: ca * v for j, v in a.items()} if ca != 1 else dict(a)
    for j, v in b.items():
        nv = out.get(j, 0) - cb * v
        if nv:
            out[j] = nv
        else:
            out.pop(j, None)
    return _primitive(out) if out else out


cpdef dict eliminate(object rows):
    cdef dict pivots = {}
    cdef dict out = {}
    cdef dict row, prow
    cdef object col, c, p, g, piv, pc
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
        for pc in list(pivots):
            prow = pivots[pc]
            c = prow.get(col)
            if c:
                g = gcd(piv, c)
                pivots[pc] = _combine(prow, piv // g, row, c // g)
        pivots[col] = row
    for col, row in pivots.items():
        p = row[col]
        out[col] = {j: qdiv(v, p) for j, v in row.items()}
    return out

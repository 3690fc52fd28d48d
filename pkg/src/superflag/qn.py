"""The queer Lie superalgebra q_n and its fundamental vector fields.

An element ``(A, B)`` stands for the block matrix ``[[A, B], [B, A]]``.

The infinitesimal generator of a homogeneous ``X`` is the first-order change
of chart coordinates under ``L = E + tX``, with ``t`` a nilpotent parameter
(``t = tau_1 tau_2`` for even ``X``, one odd ``tau`` for odd ``X``, stripped
from the left).  The generator map is an anti-homomorphism on pairs involving
an even element but a homomorphism on odd-odd pairs, so no rescaling over Q
turns it into a homomorphism (the odd part would need a square root of -1).
The blockwise transpose ``(A, B) -> (A^T, B^T)`` has exactly the compensating
behaviour, and ``mu(X) = generator(X^T)`` is a homomorphism for the
super-commutator on both sides.  In particular ``mu(E_{n-k1+1, 1})`` is the
translation along the first coordinate of the standard chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .atlas import Chart, FlagType, _distinguished, build_chart, enumerate_charts
from .fields import ChartVectorField
from .grassmann import SuperPolynomial, SuperRational, VarTable
from .linalg import nullspace
from .supermatrix import SuperMatrix, extract_rows, inverse, matmul

Matrix = tuple[tuple[Fraction, ...], ...]


def _zero(n) -> Matrix:
    return tuple(tuple(0 for _ in range(n)) for _ in range(n))


def _unit(n, i, j) -> Matrix:
    return tuple(tuple(1 if (a, b) == (i, j) else 0 for b in range(n)) for a in range(n))


def _mm(X, Y):
    n = len(X)
    return tuple(tuple(sum(X[i][k] * Y[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def _lin(a, X, b, Y):
    return tuple(tuple(a * x + b * y for x, y in zip(r1, r2)) for r1, r2 in zip(X, Y))


def _is_zero(X) -> bool:
    return all(v == 0 for row in X for v in row)


@dataclass(frozen=True)
class QnElement:
    A: Matrix
    B: Matrix

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(tuple(r) for r in self.A))
        object.__setattr__(self, "B", tuple(tuple(r) for r in self.B))

    @classmethod
    def even(cls, A) -> "QnElement":
        A = tuple(tuple(row) for row in A)
        return cls(A, _zero(len(A)))

    @classmethod
    def odd(cls, B) -> "QnElement":
        B = tuple(tuple(row) for row in B)
        return cls(_zero(len(B)), B)

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def parity(self) -> int | None:
        if _is_zero(self.B):
            return 0
        if _is_zero(self.A):
            return 1
        return None

    def matrix(self) -> list[list]:
        """The 2n x 2n representative ``[[A, B], [B, A]]``."""
        top = [list(a) + list(b) for a, b in zip(self.A, self.B)]
        bottom = [list(b) + list(a) for a, b in zip(self.A, self.B)]
        return top + bottom

    def __add__(self, other):
        return QnElement(_lin(1, self.A, 1, other.A), _lin(1, self.B, 1, other.B))

    def __sub__(self, other):
        return QnElement(_lin(1, self.A, -1, other.A), _lin(1, self.B, -1, other.B))

    def __mul__(self, c):
        return QnElement(_lin(c, self.A, 0, self.A), _lin(c, self.B, 0, self.B))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return _is_zero(self.A) and _is_zero(self.B)

    def __str__(self):
        def fmt(X):
            return "[" + ", ".join("[" + ", ".join(str(v) for v in r) + "]" for r in X) + "]"

        return f"QnElement(A={fmt(self.A)}, B={fmt(self.B)})"


def qn_basis(n: int) -> list[QnElement]:
    """Even ``E_ij`` (row-major) followed by odd ``E_ij``."""
    if n < 1:
        raise ValueError("n must be positive")
    even = [QnElement.even(_unit(n, i, j)) for i in range(n) for j in range(n)]
    odd = [QnElement.odd(_unit(n, i, j)) for i in range(n) for j in range(n)]
    return even + odd


def identity_element(n: int) -> QnElement:
    return QnElement.even(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def qn_bracket(X: QnElement, Y: QnElement) -> QnElement:
    """Super-commutator ``XY - (-1)^{p(X)p(Y)} YX``; extended bilinearly."""
    px, py = X.parity, Y.parity
    if px is None or py is None:
        total = QnElement(_zero(X.n), _zero(X.n))
        for hx in _parts(X):
            for hy in _parts(Y):
                total = total + qn_bracket(hx, hy)
        return total
    sign = -1 if px & py else 1
    # block product of [[A,B],[B,A]] [[C,D],[D,C]] = [[AC+BD, AD+BC], ...]
    A, B, C, D = X.A, X.B, Y.A, Y.B
    xy_a = _lin(1, _mm(A, C), 1, _mm(B, D))
    xy_b = _lin(1, _mm(A, D), 1, _mm(B, C))
    yx_a = _lin(1, _mm(C, A), 1, _mm(D, B))
    yx_b = _lin(1, _mm(C, B), 1, _mm(D, A))
    return QnElement(_lin(1, xy_a, -sign, yx_a), _lin(1, xy_b, -sign, yx_b))


def _parts(X: QnElement):
    z = _zero(X.n)
    return [QnElement(X.A, z), QnElement(z, X.B)]


# fundamental fields ---------------------------------------------------------
def _lift_poly(p: SuperPolynomial, vt: VarTable, shift: int) -> SuperPolynomial:
    return SuperPolynomial(vt, {(k, m << shift): c for (k, m), c in p.terms.items()})


def _drop_poly(p: SuperPolynomial, vt: VarTable, shift: int) -> SuperPolynomial:
    low = (1 << shift) - 1
    out = {}
    for (k, m), c in p.terms.items():
        if m & low:
            raise AssertionError("parameter survived in a first-order coefficient")
        out[(k, m >> shift)] = c
    return SuperPolynomial(vt, out)


def _lift_matrix(M: SuperMatrix, vt: VarTable, shift: int) -> SuperMatrix:
    ent = [
        [SuperRational(_lift_poly(e.num, vt, shift), _lift_poly(e.den, vt, shift), _monic_ok=True)
         for e in row]
        for row in M.entries
    ]
    return SuperMatrix(vt, ent, cols=M.cols)


def _generator(X: QnElement, chart: Chart) -> dict[str, SuperPolynomial]:
    """Coefficients of the first-order change of coordinates under ``E + tX``."""
    f = chart.flag
    if not f.pi:
        raise ValueError("fundamental fields are defined on Pi-symmetric flags")
    if X.n != f.n:
        raise ValueError("element size does not match the flag")
    p = X.parity
    if p is None:
        raise ValueError("homogeneous element required")
    vt = chart.vars
    shift = 2 if p == 0 else 1
    params = ("_tau1", "_tau2") if p == 0 else ("_tau",)
    ext = vt.extended(odd=params)
    t = SuperRational(SuperPolynomial(ext, {(0, 0b11 if p == 0 else 0b1): 1}))
    Xm = X.matrix()
    n2 = 2 * f.n
    L = SuperMatrix(
        ext,
        [[(t * Xm[i][j] if Xm[i][j] else 0) + int(i == j) for j in range(n2)] for i in range(n2)],
        cols=n2,
    )
    Zs = [_lift_matrix(Z, ext, shift) for Z in chart.Z]
    prev = None
    coeffs = {}
    for s in range(1, f.r + 1):
        P = matmul(L, Zs[0]) if s == 1 else matmul(prev, Zs[s - 1])
        C = extract_rows(P, _distinguished(f, s, chart.index[s - 1]))
        Znew = matmul(P, inverse(C))
        prev = C
        for w in chart.step_vars(s):
            _, r, c = chart.positions[w]
            entry = Znew.entries[r][c].as_polynomial()
            first = entry.derivative(params[0])
            if p == 0:
                first = first.derivative(params[1])
            coeffs[w] = _drop_poly(first, vt, shift)
    return coeffs


def transpose(X: QnElement) -> QnElement:
    """Blockwise transpose ``(A, B) -> (A^T, B^T)``."""
    return QnElement(tuple(zip(*X.A)), tuple(zip(*X.B)))


@lru_cache(maxsize=None)
def _generator_field(X: QnElement, flag: FlagType, idx) -> ChartVectorField:
    chart = build_chart(flag, idx)
    return ChartVectorField(chart, _generator(X, chart))


def infinitesimal_generator(X: QnElement, chart: Chart) -> ChartVectorField:
    """First-order coordinate change of the flow of ``E + tX`` (homogeneous ``X``)."""
    return _generator_field(X, chart.flag, chart.index)


def fundamental_field(X: QnElement, chart: Chart) -> ChartVectorField:
    """``mu(X)`` on a chart; mixed elements are split into homogeneous parts."""
    if X.parity is None:
        a, b = _parts(X)
        return fundamental_field(a, chart) + fundamental_field(b, chart)
    return infinitesimal_generator(transpose(X), chart)


def _field_vector(v: ChartVectorField, tag) -> dict:
    out = {}
    for w, c in v.coeffs.items():
        p = c.as_polynomial()
        if p is None:
            raise AssertionError(f"fundamental field not polynomial in {w}")
        for key, val in p.terms.items():
            out[(tag, w, key)] = val
    return out


def mu_kernel(f: FlagType) -> list[QnElement]:
    """Basis of ``{X : mu(X) = 0 on every chart}``."""
    basis = qn_basis(f.n)
    charts = [build_chart(f, i) for i in enumerate_charts(f)]
    columns = []
    for X in basis:
        col = {}
        for ch in charts:
            col.update(_field_vector(fundamental_field(X, ch), ch.index))
        columns.append(col)
    keys = sorted({k for col in columns for k in col}, key=repr)
    rows = [{j: col[k] for j, col in enumerate(columns) if k in col} for k in keys]
    kernel = nullspace(rows, len(basis))
    out = []
    for vec in kernel:
        X = QnElement(_zero(f.n), _zero(f.n))
        for j, c in vec.items():
            X = X + basis[j] * c
        out.append(X)
    return out

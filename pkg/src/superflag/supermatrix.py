"""Dense matrices over SuperRational."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .grassmann import NotInvertible, SuperPolynomial, SuperRational, VarTable, invert


class SuperMatrix:
    """A rows x cols grid of SuperRational entries.

    ``blocks`` optionally records the parity format ``((p, q), (r, s))``:
    rows split ``p|q``, columns ``r|s``.  It is only consulted by
    :meth:`is_standard_format`.
    """

    __slots__ = ("vt", "rows", "cols", "entries", "blocks")

    def __init__(self, vt: VarTable, entries: Sequence[Sequence], cols: int | None = None, blocks=None):
        self.vt = vt
        grid = []
        for row in entries:
            grid.append([_lift(vt, e) for e in row])
        self.rows = len(grid)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        for row in grid:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        self.cols = cols
        self.entries = grid
        self.blocks = blocks

    @classmethod
    def identity(cls, vt, n) -> "SuperMatrix":
        return cls(vt, [[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, vt, rows, cols) -> "SuperMatrix":
        return cls(vt, [[0] * cols for _ in range(rows)], cols=cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "SuperMatrix") -> "SuperMatrix":
        return matmul(self, other)

    def __add__(self, other: "SuperMatrix") -> "SuperMatrix":
        _same_shape(self, other)
        return SuperMatrix(
            self.vt,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            cols=self.cols,
        )

    def __sub__(self, other: "SuperMatrix") -> "SuperMatrix":
        _same_shape(self, other)
        return SuperMatrix(
            self.vt,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            cols=self.cols,
        )

    def __neg__(self):
        return SuperMatrix(self.vt, [[-a for a in r] for r in self.entries], cols=self.cols)

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(a == b for r1, r2 in zip(self.entries, other.entries) for a, b in zip(r1, r2))

    def is_zero(self) -> bool:
        return not any(e for row in self.entries for e in row)

    def map(self, fn) -> "SuperMatrix":
        return SuperMatrix(self.vt, [[fn(e) for e in r] for r in self.entries], cols=self.cols)

    def body(self) -> "SuperMatrix":
        return self.map(lambda e: e.body())

    def reduced(self) -> "SuperMatrix":
        return self.map(lambda e: e.reduced())

    def is_standard_format(self) -> bool:
        """Even diagonal blocks and odd off-diagonal blocks per ``blocks``."""
        if self.blocks is None:
            raise ValueError("matrix carries no block annotation")
        (p, _), (r, _) = self.blocks
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                want = 0 if (i < p) == (j < r) else 1
                par = e.parity()
                if e and par != want:
                    return False
        return True

    def render(self) -> list[list[str]]:
        return [[e.render() for e in row] for row in self.entries]

    def __repr__(self):
        return f"SuperMatrix({self.render()})"


def _lift(vt, e) -> SuperRational:
    if isinstance(e, SuperRational):
        return e
    if isinstance(e, SuperPolynomial):
        return SuperRational(e)
    if isinstance(e, (int, Fraction)):
        return SuperRational.constant(vt, e)
    raise TypeError(f"cannot use {type(e).__name__} as a matrix entry")


def _same_shape(a, b):
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError(f"shape mismatch {a.rows}x{a.cols} vs {b.rows}x{b.cols}")


def matmul(A: SuperMatrix, B: SuperMatrix) -> SuperMatrix:
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    out = []
    Bcols = [[B.entries[k][j] for k in range(B.rows)] for j in range(B.cols)]
    for row in A.entries:
        new = []
        for col in Bcols:
            acc = SuperRational.constant(A.vt, 0)
            for a, b in zip(row, col):
                if a and b:
                    acc = acc + a * b
            new.append(acc)
        out.append(new)
    return SuperMatrix(A.vt, out, cols=B.cols)


def extract_rows(M: SuperMatrix, rows: Sequence[int]) -> SuperMatrix:
    """Submatrix of the given (0-based, distinct) rows in the given order."""
    if len(set(rows)) != len(rows):
        raise ValueError("row indices must be distinct")
    for i in rows:
        if not 0 <= i < M.rows:
            raise IndexError(f"row {i} out of range for {M.rows} rows")
    return SuperMatrix(M.vt, [M.entries[i] for i in rows], cols=M.cols)


def _invert_even(M: SuperMatrix) -> SuperMatrix:
    """Gauss-Jordan over the field of even rational functions."""
    n = M.rows
    vt = M.vt
    a = [list(row) + [SuperRational.constant(vt, int(i == j)) for j in range(n)]
         for i, row in enumerate(M.entries)]
    for c in range(n):
        piv = None
        for r in range(c, n):
            if a[r][c]:
                piv = r
                break
        if piv is None:
            raise NotInvertible("body of the matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = invert(a[c][c])
        a[c] = [(e * inv).reduced() if e else e for e in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [(x - f * y).reduced() if y else x for x, y in zip(a[r], a[c])]
    return SuperMatrix(vt, [row[n:] for row in a], cols=n)


def inverse(M: SuperMatrix) -> SuperMatrix:
    """Exact inverse: body inverse followed by the finite Neumann series."""
    if M.rows != M.cols:
        raise ValueError("only square matrices can be inverted")
    B = M.body()
    Binv = _invert_even(B)
    N = M - B
    if N.is_zero():
        return Binv
    # M^-1 = sum_j (-B^-1 N)^j B^-1; B^-1 N is nilpotent
    step = -(Binv @ N)
    term = Binv
    total = Binv
    while True:
        term = (step @ term).reduced()
        if term.is_zero():
            break
        total = total + term
    return total.reduced()

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superflag.grassmann import NotInvertible, SuperPolynomial, SuperRational, VarTable
from superflag.supermatrix import SuperMatrix, extract_rows, inverse, matmul

from strategies import VT, even_dens, polys

vt = VarTable(("x",), ("xi",))
x = SuperPolynomial.var(vt, "x")
xi = SuperPolynomial.var(vt, "xi")


def M(rows):
    return SuperMatrix(vt, rows)


def test_identity_is_neutral():
    A = M([[x, xi], [xi, 1]])
    assert SuperMatrix.identity(vt, 2) @ A == A


def test_odd_matrix_squares_to_zero():
    assert (M([[0, xi], [xi, 0]]) @ M([[0, xi], [xi, 0]])).is_zero()


def test_row_times_inverse_block():
    inv = M([[SuperRational(SuperPolynomial.constant(vt, 1), x), SuperRational(-xi, x * x)],
             [SuperRational(-xi, x * x), SuperRational(SuperPolynomial.constant(vt, 1), x)]])
    assert M([[x, xi]]) @ inv == M([[1, 0]])


def test_matmul_shape_mismatch():
    with pytest.raises(ValueError):
        matmul(M([[1, 2]]), M([[1, 2]]))


def test_inverse_unipotent():
    assert inverse(M([[1, xi], [xi, 1]])) == M([[1, -xi], [-xi, 1]])


def test_inverse_of_pi_block():
    A = M([[x, xi], [xi, x]])
    want = M([[SuperRational(SuperPolynomial.constant(vt, 1), x), SuperRational(-xi, x * x)],
              [SuperRational(-xi, x * x), SuperRational(SuperPolynomial.constant(vt, 1), x)]])
    assert inverse(A) == want
    assert A @ inverse(A) == SuperMatrix.identity(vt, 2)


def test_inverse_identity():
    assert inverse(SuperMatrix.identity(vt, 3)) == SuperMatrix.identity(vt, 3)


def test_inverse_singular_body():
    with pytest.raises(NotInvertible):
        inverse(M([[xi, 1], [0, xi]]) @ M([[1, 0], [0, 0]]) + M([[0, 0], [0, xi]]))


def test_extract_rows():
    Z = M([[x, xi], [1, 0], [xi, x], [0, 1]])
    assert extract_rows(Z, [1, 3]) == SuperMatrix.identity(vt, 2)
    assert extract_rows(Z, [0, 2]) == M([[x, xi], [xi, x]])
    empty = extract_rows(Z, [])
    assert (empty.rows, empty.cols) == (0, 2)
    with pytest.raises(IndexError):
        extract_rows(Z, [4])
    with pytest.raises(ValueError):
        extract_rows(Z, [1, 1])


def test_standard_format():
    Z = SuperMatrix(vt, [[x, xi], [xi, x]], blocks=((1, 1), (1, 1)))
    assert Z.is_standard_format()
    bad = SuperMatrix(vt, [[xi, xi], [xi, x]], blocks=((1, 1), (1, 1)))
    assert not bad.is_standard_format()


@st.composite
def invertible(draw):
    """Even-format super matrices with an invertible (triangular) body."""
    n = draw(st.integers(1, 3))
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                e = SuperRational(draw(even_dens()) + draw(polys(0)).soul(), draw(even_dens()))
            elif j > i:
                e = SuperRational(draw(polys()), draw(even_dens()))
            else:
                e = SuperRational(draw(polys()).soul())
            row.append(e)
        rows.append(row)
    # scramble rows and columns by a permutation so the body is not triangular
    perm = draw(st.permutations(range(n)))
    return SuperMatrix(VT, [rows[p] for p in perm])


@settings(max_examples=200)
@given(invertible())
def test_inverse_both_sides(A):
    E = SuperMatrix.identity(VT, A.rows)
    B = inverse(A)
    assert A @ B == E
    assert B @ A == E


@settings(max_examples=60)
@given(invertible())
def test_double_inverse(A):
    assert inverse(inverse(A)) == A


@settings(max_examples=100)
@given(st.data())
def test_matmul_associative(data):
    def rnd(r, c):
        return SuperMatrix(VT, [[SuperRational(data.draw(polys(max_terms=2))) for _ in range(c)] for _ in range(r)])

    a, b, c, d = (data.draw(st.integers(1, 3)) for _ in range(4))
    A, B, C = rnd(a, b), rnd(b, c), rnd(c, d)
    assert (A @ B) @ C == A @ (B @ C)

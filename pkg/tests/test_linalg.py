from fractions import Fraction

from superflag.linalg import Span, combine, nullspace, rank, row_reduce


def test_nullspace_rank_one():
    assert nullspace([{0: 1, 1: 1}, {0: 2, 1: 2}], 2) == [{0: 1, 1: -1}]


def test_nullspace_identity_is_trivial():
    assert nullspace([{0: 1}, {1: 1}, {2: 1}], 3) == []


def test_nullspace_zero_matrix():
    assert nullspace([{}, {}], 3) == [{0: 1}, {1: 1}, {2: 1}]


def test_nullspace_vectors_are_in_kernel():
    rows = [{0: 1, 2: Fraction(1, 2), 3: -1}, {1: 3, 3: 2}, {0: 2, 1: 3, 2: 1}]
    ker = nullspace(rows, 4)
    assert len(ker) == 4 - rank(rows, 4)
    for v in ker:
        for r in rows:
            assert sum(c * v.get(j, 0) for j, c in r.items()) == 0


def test_nullspace_is_deterministic_under_row_order():
    rows = [{0: 1, 1: 2}, {2: 1, 3: 1}, {0: 2, 1: 4}]
    assert nullspace(rows, 5) == nullspace(rows[::-1], 5)


def test_row_reduce_is_reduced():
    piv = row_reduce([{0: 2, 1: 4}, {0: 1, 1: 3}])
    assert piv == {0: {0: 1}, 1: {1: 1}}


def test_span_membership_and_coordinates():
    s = Span([{0: 1, 1: 1}, {1: 1, 2: 1}])
    assert s.dim == 2
    v = {0: 2, 1: 5, 2: 3}
    assert v in s
    assert {0: 1} not in s
    coords = s.coordinates(v)
    assert combine(s.basis(), coords) == v
    assert s.coordinates({2: 1, 0: 5}) is None

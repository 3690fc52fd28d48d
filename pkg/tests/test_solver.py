import warnings

import pytest

from superflag.atlas import FlagType, build_chart, enumerate_charts, standard_index
from superflag.fields import ChartVectorField, field_bracket, project
from superflag.grassmann import SuperPolynomial
from superflag.solver import (
    Ansatz,
    DegreeBoundTooLow,
    compare_with_qn,
    default_degree,
    expected_dims,
    global_fields,
    global_functions,
    monomial_pool,
    vertical_fields,
)

GR21 = FlagType.pi_grassmannian(2, 1)
GR31 = FlagType.pi_grassmannian(3, 1)
GR32 = FlagType.pi_grassmannian(3, 2)
FLAG = FlagType.pi_symmetric(3, (2, 1))


def test_monomial_pool_counts():
    ch = build_chart(GR31, standard_index(GR31))
    # even degree <= 2 in two variables: 6 monomials, times 4 odd subsets
    assert len(monomial_pool(ch.vars, 2)) == 6 * 4
    assert len(Ansatz.for_fields(ch, 2)) == 4 * 24
    assert len(Ansatz.for_functions(ch, 2)) == 24


def test_default_degree():
    assert default_degree(GR21) == 2 and default_degree(FLAG) == 3


def test_expected_dims():
    assert expected_dims(GR21) == ((4, 4), True)
    assert expected_dims(GR31) == ((8, 9), False)
    assert expected_dims(FlagType.pi_grassmannian(4, 2)) == ((15, 16), False)
    assert expected_dims(FLAG) == ((8, 9), False)


@pytest.mark.parametrize("f", [GR21, GR31, GR32], ids=str)
def test_function_space_is_constants(f):
    fs = global_functions(f, 4)
    assert fs.dim == 1 and fs.stable
    assert fs.basis[0].is_constant


@pytest.mark.parametrize("f,dims", [(GR21, (4, 4)), (GR31, (8, 9)), (GR32, (8, 9))], ids=str)
def test_grassmannian_dims(f, dims):
    b = global_fields(f, 2)
    assert b.dims == dims
    assert b.stable
    assert b.is_closed()


def test_gr21_basis_members():
    b = global_fields(GR21, 2)
    ch = b.anchor
    x = SuperPolynomial.var(ch.vars, "x1_11")
    xi = SuperPolynomial.var(ch.vars, "xi1_11")
    dx = ChartVectorField.partial(ch, "x1_11")
    dxi = ChartVectorField.partial(ch, "xi1_11")
    assert dx in b and dxi * xi in b and dx * xi in b
    assert dx * x * x * x not in b
    assert dxi * (x * xi) not in b


def test_basis_fields_are_global():
    b = global_fields(GR21, 2)
    for i in range(sum(b.dims)):
        assert b.global_field(i).is_global()


def test_anchor_independence():
    for idx in enumerate_charts(GR31):
        assert global_fields(GR31, 2, anchor=idx).dims == (8, 9)


def test_low_degree_warns():
    with pytest.warns(DegreeBoundTooLow):
        b = global_fields(GR21, 1)
    assert not b.stable
    assert sum(b.dims) < 8


def test_stabilization_can_be_skipped():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        b = global_fields(GR21, 1, stabilize=False)
    assert b.stable is None or b.stable is False


def test_structure_constants_match_brackets():
    b = global_fields(GR21, 2)
    fs = b.fields
    sc = b.structure_constants()
    for (i, j), coords in sc.items():
        assert coords is not None
        direct = field_bracket(fs[i], fs[j])
        combo = ChartVectorField(b.anchor)
        for k, c in enumerate(coords):
            if c:
                combo = combo + fs[k] * c
        assert combo == direct


def test_compare_generic():
    rep = compare_with_qn(global_fields(GR31, 2), GR31)
    assert rep["isomorphic"] and rep["kernel_is_identity"]
    assert rep["codimension"] == 0 and rep["mu_image_rank"] == 17
    assert rep["matches_prediction"]


def test_compare_exceptional():
    rep = compare_with_qn(global_fields(GR21, 2), GR21)
    assert rep["exceptional"] and not rep["isomorphic"]
    assert rep["codimension"] == 1
    ex = rep["exceptional_structure"]
    assert ex["passed"] and ex["z_eigenvalues"] == [-1, 0, 1]
    assert ex["graded_dims"] == {"-1": 3, "0": 3, "1": 1}


def test_solver_rejects_general_flags():
    with pytest.raises(ValueError):
        global_fields(FlagType.general(2, 1, (1,), (1,)), 2)


@pytest.mark.slow
def test_flag_fields_and_vertical():
    b = global_fields(FLAG, 3)
    assert b.dims == (8, 9) and b.stable
    assert compare_with_qn(b, FLAG)["isomorphic"]
    assert vertical_fields(b) == []
    # every global field projects onto a nonzero base field
    assert project(b.global_field(0)) is not None


def test_flag_functions():
    fs = global_functions(FLAG, 4)
    assert fs.dim == 1 and fs.stable


def test_vertical_needs_two_steps():
    with pytest.raises(ValueError):
        vertical_fields(global_fields(GR21, 2))


def test_odd_scalar_direction_on_flag():
    # the odd identity acts on every step as a multiple of sum xi d/dx,
    # including a nonzero fiber component xi2 d/dx2
    from superflag.qn import QnElement, fundamental_field

    ch = build_chart(FLAG, standard_index(FLAG))
    J = QnElement.odd([[int(i == j) for j in range(3)] for i in range(3)])
    v = fundamental_field(J, ch)
    pc = v.polynomial_coeffs()
    assert set(pc) == {"x1_11", "x1_12", "x2_11"}
    for w, c in pc.items():
        odd = "xi" + w[1:]
        assert len(c.terms) == 1
        assert c.render().endswith(odd)
    assert v in global_fields(FLAG, 3)

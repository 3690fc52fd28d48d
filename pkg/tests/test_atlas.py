import json

import pytest

from superflag.atlas import (
    AtlasError,
    FlagType,
    build_chart,
    chart_count,
    check_atlas,
    dump_atlas,
    enumerate_charts,
    standard_index,
    transition,
    validate_type,
)
from superflag.grassmann import SuperPolynomial, SuperRational

GR21 = FlagType.pi_grassmannian(2, 1)
GR31 = FlagType.pi_grassmannian(3, 1)
GR42 = FlagType.pi_grassmannian(4, 2)
FLAG = FlagType.pi_symmetric(3, (2, 1))


@pytest.mark.parametrize(
    "f",
    [GR21, GR31, GR42, FLAG, FlagType.general(2, 1, (1,), (1,)), FlagType.general(2, 2, (1, 0), (1, 1))],
    ids=str,
)
def test_valid_types(f):
    assert validate_type(f) is None


@pytest.mark.parametrize(
    "f",
    [
        FlagType.pi_symmetric(3, (1, 2)),
        FlagType.pi_symmetric(3, (3,)),
        FlagType.pi_symmetric(3, (0,)),
        FlagType(3, 2, (1,), (1,), True),
        FlagType.general(2, 1, (3,), (0,)),
        FlagType.general(2, 1, (1, 1), (1, 1)),
        FlagType.general(1, 1, (1,), (1,)),
        FlagType.general(2, 1, (), ()),
    ],
    ids=str,
)
def test_invalid_types(f):
    assert isinstance(validate_type(f), str)
    with pytest.raises(ValueError):
        enumerate_charts(f)


@pytest.mark.parametrize("f,count", [(GR21, 2), (GR31, 3), (GR42, 6), (FLAG, 6), (FlagType.general(2, 2, (1,), (1,)), 4)])
def test_chart_counts(f, count):
    assert len(enumerate_charts(f)) == count == chart_count(f)


def test_charts_are_distinct_and_deterministic():
    charts = enumerate_charts(GR42)
    assert len(set(charts)) == len(charts)
    assert charts == enumerate_charts(GR42)


def test_gr21_chart_matrices():
    std = build_chart(GR21, standard_index(GR21))
    assert std.index == (((2,), (2,)),)
    assert std.Z[0].render() == [["x1_11", "xi1_11"], ["1", "0"], ["xi1_11", "x1_11"], ["0", "1"]]
    other = build_chart(GR21, (((1,), (1,)),))
    assert other.Z[0].render() == [["1", "0"], ["x1_21", "xi1_21"], ["0", "1"], ["xi1_21", "x1_21"]]


def test_chart_variable_counts():
    for f, dims in [(GR21, (1, 1)), (GR31, (2, 2)), (GR42, (4, 4)), (FLAG, (3, 3))]:
        ch = build_chart(f, standard_index(f))
        assert (len(ch.vars.even), len(ch.vars.odd)) == dims


def test_pi_block_form():
    for idx in enumerate_charts(GR42):
        assert build_chart(GR42, idx).Z[0].is_standard_format()


def test_gr21_transition_formula():
    a = build_chart(GR21, (((1,), (1,)),))
    b = build_chart(GR21, (((2,), (2,)),))
    vt = a.vars
    x, xi = SuperPolynomial.var(vt, "x1_21"), SuperPolynomial.var(vt, "xi1_21")
    t = transition(a, b)
    assert t.assignment["x1_11"] == SuperRational(SuperPolynomial.constant(vt, 1), x)
    assert t.assignment["xi1_11"] == SuperRational(-xi, x * x)


def test_self_transition_is_identity():
    for f in (GR21, GR31, FLAG):
        for idx in enumerate_charts(f):
            ch = build_chart(f, idx)
            assert transition(ch, ch).is_identity()


def test_round_trip_gr31():
    charts = [build_chart(GR31, i) for i in enumerate_charts(GR31)]
    for a in charts:
        for b in charts:
            assert transition(a, b).then(transition(b, a)).is_identity()


def test_cocycle_gr31():
    charts = [build_chart(GR31, i) for i in enumerate_charts(GR31)]
    for a in charts:
        for b in charts:
            for c in charts:
                assert transition(a, b).then(transition(b, c)) == transition(a, c)


def test_then_rejects_mismatched_maps():
    a, b = (build_chart(GR21, i) for i in enumerate_charts(GR21))
    with pytest.raises(ValueError):
        transition(a, b).then(transition(a, b))


def test_check_atlas_reports():
    for f in (GR21, GR31):
        rep = check_atlas(f)
        assert rep["passed"]
        assert rep["triples"] == rep["charts"] ** 3
        assert rep["block_form_errors"] == rep["round_trip_failures"] == rep["cocycle_failures"] == 0


def test_general_flag_charts_and_transitions():
    f = FlagType.general(2, 1, (1,), (1,))
    charts = [build_chart(f, i) for i in enumerate_charts(f)]
    assert len(charts) == 2
    ch = charts[0]
    assert (len(ch.vars.even), len(ch.vars.odd)) == (1, 1)
    assert check_atlas(f)["passed"]


def test_dump_atlas_is_deterministic_json():
    text = dump_atlas(GR21)
    assert text == dump_atlas(GR21)
    data = json.loads(text)
    assert len(data["charts"]) == 2 and len(data["transitions"]) == 2
    t = data["transitions"][0]
    assert t["assignments"] == {"x1_11": "1/x1_21", "xi1_11": "-xi1_21/x1_21^2"}


def test_atlas_error_is_assertion():
    assert issubclass(AtlasError, AssertionError)

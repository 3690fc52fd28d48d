"""Vector fields (super-derivations) on charts, global families, projection.

A chart field is ``sum_w coeff[w] * d/dw`` with coefficients written to the left
of the (left) partial derivatives.  Brackets are super-commutators of
derivations: ``[v, w] = v w - (-1)^{p(v)p(w)} w v``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .atlas import Chart, CoordinateMap, FlagType, build_chart, transition
from .grassmann import SuperPolynomial, SuperRational, substitute


class NotProjectable(ValueError):
    """Base-coordinate coefficients depend on fiber coordinates."""


class _Vertical:
    def __repr__(self):
        return "Vertical"


Vertical = _Vertical()


def _rat(vt, e) -> SuperRational:
    if isinstance(e, SuperRational):
        return e
    if isinstance(e, SuperPolynomial):
        return SuperRational(e)
    return SuperRational.constant(vt, e)


class ChartVectorField:
    __slots__ = ("chart", "coeffs")

    def __init__(self, chart: Chart, coeffs: Mapping[str, object] | None = None):
        self.chart = chart
        vt = chart.vars
        clean = {}
        for w, c in (coeffs or {}).items():
            if w not in vt:
                raise KeyError(f"unknown variable {w!r}")
            c = _rat(vt, c)
            if c:
                clean[w] = c
        self.coeffs = clean

    @classmethod
    def partial(cls, chart: Chart, var: str, coeff=1) -> "ChartVectorField":
        return cls(chart, {var: coeff})

    @property
    def vt(self):
        return self.chart.vars

    def coeff(self, w: str) -> SuperRational:
        return self.coeffs.get(w) or SuperRational.constant(self.vt, 0)

    def parity(self) -> int | None:
        """0 or 1 for homogeneous fields (zero counts as even), None if mixed."""
        ps = set()
        for w, c in self.coeffs.items():
            pc = c.parity()
            if pc is None:
                return None
            ps.add((pc + self.vt.kind(w)[0]) % 2)
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def homogeneous_part(self, p: int) -> "ChartVectorField":
        out = {}
        for w, c in self.coeffs.items():
            pw = self.vt.kind(w)[0]
            out[w] = c.homogeneous_part((p + pw) % 2)
        return ChartVectorField(self.chart, out)

    def parts(self):
        """Nonzero homogeneous parts as ``(parity, field)`` pairs."""
        p = self.parity()
        if p is not None:
            return [(p, self)] if self.coeffs else []
        return [(q, h) for q in (0, 1) if (h := self.homogeneous_part(q)).coeffs]

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out[w] + c if w in out else c
        return ChartVectorField(self.chart, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ChartVectorField(self.chart, {w: -c for w, c in self.coeffs.items()})

    def __mul__(self, c):
        """Left multiplication by a scalar or function."""
        if isinstance(c, (int, Fraction)):
            return ChartVectorField(self.chart, {w: e * c for w, e in self.coeffs.items()})
        c = _rat(self.vt, c)
        return ChartVectorField(self.chart, {w: c * e for w, e in self.coeffs.items()})

    __rmul__ = __mul__

    def _check(self, other):
        if not isinstance(other, ChartVectorField) or other.chart != self.chart:
            raise ValueError("fields live on different charts")

    def __eq__(self, other):
        if not isinstance(other, ChartVectorField):
            return NotImplemented
        if other.chart != self.chart:
            return False
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeff(w) == other.coeff(w) for w in keys)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def reduced(self) -> "ChartVectorField":
        return ChartVectorField(self.chart, {w: c.reduced() for w, c in self.coeffs.items()})

    def polynomial_coeffs(self) -> dict[str, SuperPolynomial] | None:
        out = {}
        for w, c in self.coeffs.items():
            p = c.as_polynomial()
            if p is None:
                return None
            out[w] = p
        return out

    def render(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for w in self.vt.names:
            c = self.coeffs.get(w)
            if c is None:
                continue
            text = c.reduced().render()
            if text == "1":
                parts.append(f"∂/∂{w}")
            elif text == "-1":
                parts.append(f"-∂/∂{w}")
            elif " " in text or "/" in text:
                parts.append(f"({text})*∂/∂{w}")
            else:
                parts.append(f"{text}*∂/∂{w}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"ChartVectorField({self.render()})"

    def render_pairs(self) -> list[list[str]]:
        return [[w, self.coeffs[w].render()] for w in self.vt.names if w in self.coeffs]


def apply(v: ChartVectorField, f) -> SuperRational:
    f = _rat(v.vt, f)
    total = SuperRational.constant(v.vt, 0)
    for w, c in v.coeffs.items():
        d = f.derivative(w)
        if d:
            total = total + c * d
    return total


def _bracket_homogeneous(v, pv, w, pw):
    sign = -1 if (pv & pw) else 1
    out = {}
    for u in v.vt.names:
        term = apply(v, w.coeff(u))
        other = apply(w, v.coeff(u))
        val = term - other if sign > 0 else term + other
        if val:
            out[u] = val.reduced()
    return ChartVectorField(v.chart, out)


def field_bracket(v: ChartVectorField, w: ChartVectorField) -> ChartVectorField:
    """Super-commutator, extended bilinearly to mixed-parity fields."""
    v._check(w)
    total = ChartVectorField(v.chart)
    for pv, hv in v.parts():
        for pw, hw in w.parts():
            total = total + _bracket_homogeneous(hv, pv, hw, pw)
    return total


def pushforward(v: ChartVectorField, sigma: CoordinateMap) -> ChartVectorField:
    """Rewrite ``v`` (on ``sigma.source``) on ``sigma.target`` via the chain rule."""
    if v.chart != sigma.source:
        raise ValueError("field does not live on the map's source chart")
    back = transition(sigma.target, sigma.source)
    out = {}
    for w, expr in sigma.assignment.items():
        val = apply(v, expr)
        if val:
            out[w] = substitute(val, back.assignment, sigma.target.vars).reduced()
    return ChartVectorField(sigma.target, out)


def is_holomorphic(v: ChartVectorField) -> bool:
    return v.polynomial_coeffs() is not None


class GlobalField:
    """A family of chart fields, one per chart of the atlas."""

    __slots__ = ("flag", "charts")

    def __init__(self, flag: FlagType, charts: Mapping):
        self.flag = flag
        self.charts = dict(charts)

    @classmethod
    def from_chart(cls, v: ChartVectorField) -> "GlobalField":
        """Extend an anchor representative to every chart by pushforward."""
        from .atlas import enumerate_charts

        f = v.chart.flag
        out = {}
        for idx in enumerate_charts(f):
            target = build_chart(f, idx)
            out[idx] = v if target == v.chart else pushforward(v, transition(v.chart, target))
        return cls(f, out)

    def __getitem__(self, idx) -> ChartVectorField:
        return self.charts[idx]

    def is_global(self) -> bool:
        """Every representative polynomial and all pairs pushforward-compatible."""
        reps = list(self.charts.values())
        if not all(is_holomorphic(v) for v in reps):
            return False
        for a in reps:
            for b in reps:
                if a.chart != b.chart and pushforward(a, transition(a.chart, b.chart)) != b:
                    return False
        return True

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.charts.values())

    def to_json(self) -> dict:
        return {
            "charts": [
                {"index": [[list(e), list(o)] for e, o in idx], "field": self.charts[idx].render()}
                for idx in sorted(self.charts)
            ]
        }


def _project_chart(v: ChartVectorField, base_flag: FlagType) -> ChartVectorField:
    chart = v.chart
    base_chart = build_chart(base_flag, chart.index[:1])
    base_vars = set(base_chart.vars.names)
    out = {}
    for w, c in v.coeffs.items():
        if w not in base_vars:
            continue
        used = c.num.variables() | c.den.variables()
        if not used <= base_vars:
            # dependence could cancel only in unreduced form
            c = c.reduced()
            used = c.num.variables() | c.den.variables()
            if not used <= base_vars:
                raise NotProjectable(f"coefficient of ∂/∂{w} depends on fiber coordinates")
        sigma = {u: SuperRational.var(base_chart.vars, u) for u in used}
        out[w] = substitute(c, sigma, base_chart.vars) if sigma else SuperRational.constant(
            base_chart.vars, c.num.terms.get((0, 0), 0)
        )
    return ChartVectorField(base_chart, out)


def project_chart(v: ChartVectorField) -> ChartVectorField:
    """Base part of a field on a product chart of ``PiF`` (``r > 1``)."""
    if v.chart.flag.r < 2:
        raise ValueError("projection needs a flag with at least two steps")
    return _project_chart(v, v.chart.flag.base())


def project(v: GlobalField):
    """Project a global field to the base ``PiGr_{n|n,k_1|k_1}``.

    Returns the base GlobalField, or ``Vertical`` when the projection is zero.
    Raises NotProjectable if some base coefficient depends on fiber variables.
    """
    if v.flag.r < 2:
        raise ValueError("projection needs a flag with at least two steps")
    base = v.flag.base()
    out = {}
    for idx, rep in v.charts.items():
        b = _project_chart(rep, base)
        key = idx[:1]
        if key in out:
            if out[key] != b:
                raise NotProjectable("charts over the same base chart disagree")
        else:
            out[key] = b
    if all(b.is_zero() for b in out.values()):
        return Vertical
    return GlobalField(base, out)

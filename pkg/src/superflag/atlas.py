"""Charts, coordinate matrices and transition maps of flag supermanifolds.

Indices in chart data (``ChartIndex``) are 1-based to match the usual way of
writing the distinguished rows; matrices themselves are 0-based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from .grassmann import SuperRational, VarTable, substitute
from .supermatrix import SuperMatrix, extract_rows, inverse, matmul


@dataclass(frozen=True)
class FlagType:
    """Type of a flag supermanifold ``F^{m|n}_{k|l}`` or ``PiF^{n|n}_{k|k}``."""

    m: int
    n: int
    k: tuple[int, ...]
    l: tuple[int, ...]
    pi: bool = False

    @classmethod
    def pi_symmetric(cls, n: int, k) -> "FlagType":
        k = tuple(k)
        return cls(n, n, k, k, True)

    @classmethod
    def pi_grassmannian(cls, n: int, k: int) -> "FlagType":
        return cls.pi_symmetric(n, (k,))

    @classmethod
    def general(cls, m: int, n: int, k, l) -> "FlagType":
        return cls(m, n, tuple(k), tuple(l), False)

    @property
    def r(self) -> int:
        return len(self.k)

    def even_chain(self) -> tuple[int, ...]:
        """``(k_0, k_1, ..., k_r)`` with ``k_0 = m``."""
        return (self.m,) + self.k

    def odd_chain(self) -> tuple[int, ...]:
        return (self.n,) + self.l

    @property
    def label(self) -> str:
        if self.pi:
            if self.r == 1:
                return f"PiGr_{{{self.n}|{self.n},{self.k[0]}|{self.k[0]}}}"
            return f"PiF^{{{self.n}|{self.n}}}_({','.join(map(str, self.k))})"
        ks = ",".join(map(str, self.k))
        ls = ",".join(map(str, self.l))
        return f"F^{{{self.m}|{self.n}}}_{{{ks}|{ls}}}"

    def base(self) -> "FlagType":
        """Base of the bundle projection ``(Z_1, Z_2, ...) -> Z_1``."""
        return FlagType(self.m, self.n, self.k[:1], self.l[:1], self.pi)

    def to_json(self) -> dict:
        if self.pi:
            return {"type": "pi", "n": self.n, "k": list(self.k)}
        return {"type": "general", "m": self.m, "n": self.n, "k": list(self.k), "l": list(self.l)}


def validate_type(f: FlagType) -> str | None:
    """None when the type is admissible, otherwise a description of the violation."""
    if f.r == 0:
        return "flag needs at least one step"
    if len(f.k) != len(f.l):
        return "k and l must have the same length"
    if any(x < 0 for x in f.k + f.l) or f.m < 0 or f.n < 0:
        return "dimensions must be non-negative"
    if f.pi:
        if f.k != f.l or f.m != f.n:
            return "Pi-symmetric type needs m = n and k = l"
        chain = (f.n,) + f.k + (0,)
        for a, b in zip(chain, chain[1:]):
            if not a > b:
                return f"need n > k_1 > ... > k_r > 0, got n={f.n}, k={f.k}"
        return None
    ks = f.even_chain()
    ls = f.odd_chain()
    for a, b in zip(ks, ks[1:]):
        if b > a:
            return f"need 0 <= k_r <= ... <= k_1 <= m, got m={f.m}, k={f.k}"
    for a, b in zip(ls, ls[1:]):
        if b > a:
            return f"need 0 <= l_r <= ... <= l_1 <= n, got n={f.n}, l={f.l}"
    sums = [f.m + f.n] + [a + b for a, b in zip(f.k, f.l)] + [0]
    for a, b in zip(sums, sums[1:]):
        if not a > b:
            return f"need 0 < k_r+l_r < ... < k_1+l_1 < m+n, got sums {sums[1:-1]}"
    return None


def _require_valid(f: FlagType):
    msg = validate_type(f)
    if msg is not None:
        raise ValueError(msg)


# one step: (even subset, odd subset), 1-based and increasing
ChartIndex = tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]


def enumerate_charts(f: FlagType) -> list[ChartIndex]:
    _require_valid(f)
    ks, ls = f.even_chain(), f.odd_chain()
    steps = []
    for s in range(1, f.r + 1):
        evens = list(itertools.combinations(range(1, ks[s - 1] + 1), ks[s]))
        if f.pi:
            steps.append([(e, e) for e in evens])
        else:
            odds = list(itertools.combinations(range(1, ls[s - 1] + 1), ls[s]))
            steps.append(list(itertools.product(evens, odds)))
    return [tuple(c) for c in itertools.product(*steps)]


def chart_count(f: FlagType) -> int:
    ks, ls = f.even_chain(), f.odd_chain()
    total = 1
    for s in range(1, f.r + 1):
        total *= comb(ks[s - 1], ks[s])
        if not f.pi:
            total *= comb(ls[s - 1], ls[s])
    return total


def standard_index(f: FlagType) -> ChartIndex:
    """Chart with identity blocks in the last rows of every step."""
    ks, ls = f.even_chain(), f.odd_chain()
    steps = []
    for s in range(1, f.r + 1):
        e = tuple(range(ks[s - 1] - ks[s] + 1, ks[s - 1] + 1))
        o = e if f.pi else tuple(range(ls[s - 1] - ls[s] + 1, ls[s - 1] + 1))
        steps.append((e, o))
    return tuple(steps)


def _name(prefix, s, i, j):
    if i < 10 and j < 10:
        return f"{prefix}{s}_{i}{j}"
    return f"{prefix}{s}_{i}_{j}"


@dataclass(frozen=True, eq=False)
class Chart:
    flag: FlagType
    index: ChartIndex
    vars: VarTable
    Z: tuple[SuperMatrix, ...]
    # variable name -> (step s (1-based), row, col) of one occurrence in Z_s
    positions: dict = field(repr=False)

    def __eq__(self, other):
        return isinstance(other, Chart) and self.flag == other.flag and self.index == other.index

    def __hash__(self):
        return hash((self.flag, self.index))

    def distinguished_rows(self, s: int) -> list[int]:
        """0-based rows of ``Z_s`` holding the identity block."""
        ev, od = self.index[s - 1]
        top = self.flag.even_chain()[s - 1]
        return [i - 1 for i in ev] + [top + i - 1 for i in od]

    def step_vars(self, s: int) -> list[str]:
        """Variables of ``Z_s`` in table order."""
        return [v for v in self.vars.names if self.positions[v][0] == s]

    def to_json(self) -> dict:
        return {
            "flag": self.flag.to_json(),
            "index": [[list(e), list(o)] for e, o in self.index],
            "vars": {"even": list(self.vars.even), "odd": list(self.vars.odd)},
            "matrices": [z.render() for z in self.Z],
        }


def _distinguished(f: FlagType, s: int, step) -> list[int]:
    ev, od = step
    top = f.even_chain()[s - 1]
    return [i - 1 for i in ev] + [top + i - 1 for i in od]


@lru_cache(maxsize=None)
def build_chart(f: FlagType, idx: ChartIndex) -> Chart:
    _require_valid(f)
    if len(idx) != f.r:
        raise ValueError("chart index has the wrong number of steps")
    ks, ls = f.even_chain(), f.odd_chain()
    even, odd = [], []
    layout = []  # per step: list of rows, each a list of (name | 0 | 1)
    positions = {}
    for s in range(1, f.r + 1):
        ev, od = idx[s - 1]
        if len(ev) != ks[s] or len(od) != ls[s] or (f.pi and ev != od):
            raise ValueError(f"invalid chart index at step {s}: {idx[s - 1]}")
        kp, lp, kc, lc = ks[s - 1], ls[s - 1], ks[s], ls[s]
        rows = []
        x_names, xi_names, eta_names, y_names = [], [], [], []
        for i in range(1, kp + 1):
            if i in ev:
                a = ev.index(i)
                rows.append([1 if j == a else 0 for j in range(kc + lc)])
                continue
            row = []
            for j in range(1, kc + 1):
                nm = _name("x", s, i, j)
                x_names.append(nm)
                row.append(nm)
            for j in range(1, lc + 1):
                nm = _name("xi", s, i, j)
                xi_names.append(nm)
                row.append(nm)
            rows.append(row)
        for i in range(1, lp + 1):
            if i in od:
                b = od.index(i)
                rows.append([1 if j == kc + b else 0 for j in range(kc + lc)])
                continue
            row = []
            for j in range(1, kc + 1):
                nm = _name("xi" if f.pi else "eta", s, i, j)
                if not f.pi:
                    eta_names.append(nm)
                row.append(nm)
            for j in range(1, lc + 1):
                nm = _name("x" if f.pi else "y", s, i, j)
                if not f.pi:
                    y_names.append(nm)
                row.append(nm)
            rows.append(row)
        even += x_names + y_names
        odd += xi_names + eta_names
        layout.append(rows)
        for r, row in enumerate(rows):
            for c, e in enumerate(row):
                if isinstance(e, str) and e not in positions:
                    positions[e] = (s, r, c)
    vt = VarTable(tuple(even), tuple(odd))
    Z = []
    for s, rows in enumerate(layout, start=1):
        kc, lc = ks[s], ls[s]
        ent = [[SuperRational.var(vt, e) if isinstance(e, str) else e for e in row] for row in rows]
        Z.append(SuperMatrix(vt, ent, cols=kc + lc, blocks=((ks[s - 1], ls[s - 1]), (kc, lc))))
    return Chart(f, idx, vt, tuple(Z), positions)


@dataclass(frozen=True, eq=False)
class CoordinateMap:
    """Target coordinates written as functions of source coordinates."""

    source: Chart
    target: Chart
    assignment: dict

    def pullback(self, g) -> SuperRational:
        """A function on the target chart rewritten in source coordinates."""
        return substitute(g, self.assignment, self.source.vars)

    def then(self, other: "CoordinateMap") -> "CoordinateMap":
        """Composite ``self`` followed by ``other``."""
        if other.source != self.target:
            raise ValueError("maps are not composable")
        assignment = {w: self.pullback(e).reduced() for w, e in other.assignment.items()}
        return CoordinateMap(self.source, other.target, assignment)

    def __eq__(self, other):
        if not isinstance(other, CoordinateMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.assignment.keys() == other.assignment.keys()
            and all(self.assignment[w] == other.assignment[w] for w in self.assignment)
        )

    __hash__ = None

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        vt = self.source.vars
        return all(e == SuperRational.var(vt, w) for w, e in self.assignment.items())

    def to_json(self) -> dict:
        return {
            "flag": self.source.flag.to_json(),
            "source": [[list(e), list(o)] for e, o in self.source.index],
            "target": [[list(e), list(o)] for e, o in self.target.index],
            "assignments": {w: self.assignment[w].render() for w in self.target.vars.names},
        }


class AtlasError(AssertionError):
    """A transition produced a coordinate matrix of the wrong shape."""


def push_matrices(source: Chart, target_index: ChartIndex, first: SuperMatrix | None = None):
    """Run the recursive transition formula from a chart to a target index.

    ``first`` replaces ``Z_1`` (used for ``L Z_1`` in the group action).
    Returns the list of new coordinate matrices, over the source variables.
    """
    f = source.flag
    out = []
    prev_C = None
    for s in range(1, f.r + 1):
        Zs = source.Z[s - 1]
        if s == 1:
            P = first if first is not None else Zs
        else:
            P = matmul(prev_C, Zs)
        C = extract_rows(P, _distinguished(f, s, target_index[s - 1]))
        Znew = matmul(P, inverse(C)).reduced()
        out.append(Znew)
        prev_C = C
    return out


def _read_off(f: FlagType, target: Chart, mats) -> dict:
    assignment = {}
    for s, M in enumerate(mats, start=1):
        want = build_chart(f, target.index).Z[s - 1]
        for r in range(M.rows):
            for c in range(M.cols):
                pattern = want.entries[r][c]
                got = M.entries[r][c]
                name = None
                if not pattern.num.is_constant:
                    (name,) = pattern.num.variables()
                if name is None:
                    if got != pattern.num.terms.get((0, 0), 0):
                        raise AtlasError(f"identity block violated at step {s}, entry ({r},{c})")
                elif name in assignment:
                    if assignment[name] != got:
                        raise AtlasError(f"Pi-symmetric block form violated for {name}")
                else:
                    assignment[name] = got
    return assignment


@lru_cache(maxsize=None)
def _transition(f: FlagType, src: ChartIndex, tgt: ChartIndex) -> CoordinateMap:
    source = build_chart(f, src)
    target = build_chart(f, tgt)
    mats = push_matrices(source, tgt)
    return CoordinateMap(source, target, _read_off(f, target, mats))


def transition(source: Chart, target: Chart) -> CoordinateMap:
    if source.flag != target.flag:
        raise ValueError("charts belong to different flag types")
    return _transition(source.flag, source.index, target.index)


def dump_atlas(f: FlagType) -> str:
    """All charts and transitions as deterministic JSON."""
    charts = [build_chart(f, i) for i in enumerate_charts(f)]
    data = {
        "flag": f.to_json(),
        "charts": [c.to_json() for c in charts],
        "transitions": [transition(a, b).to_json() for a in charts for b in charts if a != b],
    }
    return json.dumps(data, indent=1, sort_keys=True, ensure_ascii=False)


def check_atlas(f: FlagType) -> dict:
    """Cocycle identity on all ordered triples, round trips, Pi-block form.

    Block form is enforced while reading off transitions, so a transition
    that breaks it raises AtlasError and is counted here.
    """
    charts = [build_chart(f, i) for i in enumerate_charts(f)]
    out = {"charts": len(charts), "block_form_errors": 0, "round_trip_failures": 0, "cocycle_failures": 0}
    maps = {}
    for a in charts:
        for b in charts:
            try:
                maps[(a.index, b.index)] = transition(a, b)
            except AtlasError:
                out["block_form_errors"] += 1
    for a in charts:
        if not maps[(a.index, a.index)].is_identity():
            out["round_trip_failures"] += 1
        for b in charts:
            if a != b and not maps[(a.index, b.index)].then(maps[(b.index, a.index)]).is_identity():
                out["round_trip_failures"] += 1
    triples = 0
    for a in charts:
        for b in charts:
            for c in charts:
                triples += 1
                ab, bc, ac = maps[(a.index, b.index)], maps[(b.index, c.index)], maps[(a.index, c.index)]
                if ab.then(bc) != ac:
                    out["cocycle_failures"] += 1
    out["triples"] = triples
    out["passed"] = not (out["block_form_errors"] or out["round_trip_failures"] or out["cocycle_failures"])
    return out

"""Exact arithmetic in Q[x_1..x_N] (x) Lambda(xi_1..xi_M) and its localization
at purely even denominators.

Monomials are stored as ``(even_key, odd_mask)`` pairs.  The even key packs
the total degree and the exponents into one integer so that integer order is
graded lexicographic order over the :class:`VarTable` and monomial
multiplication is integer addition.  Odd generators within a monomial are
kept in increasing order; the reordering sign lives in the coefficient.
Odd derivatives are left derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from . import kernels as K

FIELD_BITS = 16


class NotInvertible(ArithmeticError):
    """Raised when an element (or matrix) has a non-invertible body."""


@dataclass(frozen=True)
class VarTable:
    """Ordered even and odd variable names of one chart."""

    even: tuple[str, ...]
    odd: tuple[str, ...]

    def __post_init__(self):
        names = self.even + self.odd
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")

    @cached_property
    def _index(self) -> dict[str, tuple[int, int]]:
        idx = {name: (0, i) for i, name in enumerate(self.even)}
        idx.update({name: (1, i) for i, name in enumerate(self.odd)})
        return idx

    @cached_property
    def _shifts(self) -> tuple[int, ...]:
        n = len(self.even)
        return tuple(FIELD_BITS * (n - 1 - i) for i in range(n))

    @cached_property
    def deg_shift(self) -> int:
        return FIELD_BITS * len(self.even)

    @cached_property
    def guard(self) -> int:
        """High bit of every packed field; used for monomial divisibility."""
        g = 0
        for j in range(len(self.even) + 1):
            g |= 1 << (FIELD_BITS * j + FIELD_BITS - 1)
        return g

    @property
    def names(self) -> tuple[str, ...]:
        return self.even + self.odd

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def kind(self, name: str) -> tuple[int, int]:
        """``(parity, position)`` of a variable."""
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None

    def pack(self, exps) -> int:
        key = 0
        for e, s in zip(exps, self._shifts):
            key |= e << s
        return key | (sum(exps) << self.deg_shift)

    def unpack(self, key: int) -> tuple[int, ...]:
        m = (1 << FIELD_BITS) - 1
        return tuple((key >> s) & m for s in self._shifts)

    def degree(self, key: int) -> int:
        return key >> self.deg_shift

    def var_key(self, i: int) -> int:
        return (1 << self._shifts[i]) | (1 << self.deg_shift)

    def extended(self, even=(), odd=()) -> "VarTable":
        """A larger table; new odd variables are placed first."""
        return VarTable(tuple(even) + self.even, tuple(odd) + self.odd)


def _check_same(a, b):
    if a is not b and a != b:
        raise ValueError("operands live over different variable tables")


def _coerce_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class SuperPolynomial:
    """A super-polynomial: ``dict`` from ``(even_key, odd_mask)`` to rationals."""

    __slots__ = ("vt", "terms")

    def __init__(self, vt: VarTable, terms: dict | None = None):
        self.vt = vt
        self.terms = terms if terms is not None else {}

    @classmethod
    def constant(cls, vt, c) -> "SuperPolynomial":
        c = _coerce_coeff(c)
        return cls(vt, {(0, 0): c} if c else {})

    @classmethod
    def var(cls, vt, name) -> "SuperPolynomial":
        par, i = vt.kind(name)
        if par == 0:
            return cls(vt, {(vt.var_key(i), 0): 1})
        return cls(vt, {(0, 1 << i): 1})

    @classmethod
    def monomial(cls, vt, exps, odd=(), coeff=1) -> "SuperPolynomial":
        """``coeff * x^exps * xi_{odd[0]} * xi_{odd[1]} * ...`` (odd in given order)."""
        p = cls(vt, {(vt.pack(exps), 0): _coerce_coeff(coeff)})
        for j in odd:
            p = p * cls(vt, {(0, 1 << j): 1})
        return p

    def _lift(self, other):
        if isinstance(other, SuperPolynomial):
            _check_same(self.vt, other.vt)
            return other
        if isinstance(other, (int, Fraction)):
            return SuperPolynomial.constant(self.vt, other)
        return NotImplemented

    # ring structure -----------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return SuperPolynomial(self.vt, K.poly_add_scaled(dict(self.terms), other.terms, 1))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return SuperPolynomial(self.vt, K.poly_add_scaled(dict(self.terms), other.terms, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SuperPolynomial(self.vt, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return SuperPolynomial(self.vt, K.poly_mul(self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        result = SuperPolynomial.constant(self.vt, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c) -> "SuperPolynomial":
        c = _coerce_coeff(c)
        if not c:
            return SuperPolynomial(self.vt)
        return SuperPolynomial(self.vt, {k: _coerce_coeff(v * c) for k, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SuperPolynomial.constant(self.vt, other)
        if isinstance(other, SuperRational):
            return other == self
        if not isinstance(other, SuperPolynomial):
            return NotImplemented
        return self.vt == other.vt and self.terms == other.terms

    def __hash__(self):
        return hash((self.vt, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # structure ------------------------------------------------------------
    @property
    def is_even_only(self) -> bool:
        """True when no monomial contains an odd generator."""
        return all(m == 0 for _, m in self.terms)

    @property
    def is_constant(self) -> bool:
        return all(k == 0 and m == 0 for k, m in self.terms)

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements (zero counts as even), None if mixed."""
        ps = {m.bit_count() & 1 for _, m in self.terms}
        if not ps:
            return 0
        if len(ps) == 1:
            return ps.pop()
        return None

    def homogeneous_part(self, p: int) -> "SuperPolynomial":
        return SuperPolynomial(
            self.vt, {k: c for k, c in self.terms.items() if (k[1].bit_count() & 1) == p}
        )

    def body(self) -> "SuperPolynomial":
        return SuperPolynomial(self.vt, {k: c for k, c in self.terms.items() if k[1] == 0})

    def soul(self) -> "SuperPolynomial":
        return SuperPolynomial(self.vt, {k: c for k, c in self.terms.items() if k[1] != 0})

    def components(self) -> dict[int, "SuperPolynomial"]:
        """Split by odd mask into purely even coefficient polynomials."""
        out: dict[int, dict] = {}
        for (k, m), c in self.terms.items():
            out.setdefault(m, {})[(k, 0)] = c
        return {m: SuperPolynomial(self.vt, t) for m, t in out.items()}

    def leading(self):
        """Graded-lex leading ``((even_key, mask), coeff)`` of the even part."""
        even = [k for k in self.terms if k[1] == 0]
        if not even:
            raise ValueError("no even terms")
        k = max(even)
        return k, self.terms[k]

    def degree(self) -> int:
        return max((self.vt.degree(k) for k, _ in self.terms), default=-1)

    def derivative(self, name: str) -> "SuperPolynomial":
        par, i = self.vt.kind(name)
        out = {}
        if par == 0:
            vk = self.vt.var_key(i)
            shift = self.vt._shifts[i]
            m = (1 << FIELD_BITS) - 1
            for (k, mask), c in self.terms.items():
                e = (k >> shift) & m
                if e:
                    out[(k - vk, mask)] = c * e
        else:
            bit = 1 << i
            below = bit - 1
            for (k, mask), c in self.terms.items():
                if mask & bit:
                    sign = -1 if (mask & below).bit_count() & 1 else 1
                    out[(k, mask ^ bit)] = c if sign > 0 else -c
        return SuperPolynomial(self.vt, out)

    def variables(self) -> set[str]:
        used = set()
        for k, mask in self.terms:
            for i, e in enumerate(self.vt.unpack(k)):
                if e:
                    used.add(self.vt.even[i])
            for j, name in enumerate(self.vt.odd):
                if mask >> j & 1:
                    used.add(name)
        return used

    def sorted_terms(self):
        """Terms in descending graded-lex order (even variables before odd)."""
        vt = self.vt
        no = len(vt.odd)

        def key(item):
            (k, m), _ = item
            odd_bits = tuple(m >> j & 1 for j in range(no))
            return (vt.degree(k) + m.bit_count(), vt.unpack(k), odd_bits)

        return sorted(self.terms.items(), key=key, reverse=True)

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (k, m), c in self.sorted_terms():
            factors = []
            for name, e in zip(self.vt.even, self.vt.unpack(k)):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            factors += [name for j, name in enumerate(self.vt.odd) if m >> j & 1]
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if factors:
                body = "*".join(factors)
                text = body if a == 1 else f"{a}*{body}"
            else:
                text = str(a)
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"SuperPolynomial({self.render()})"


def _even_ring(vt: VarTable):
    ring = getattr(vt, "_sympy_ring", None)
    if ring is None:
        from sympy.polys.domains import QQ
        from sympy.polys.rings import ring as make_ring

        ring = make_ring(",".join(vt.even), QQ)[0]
        object.__setattr__(vt, "_sympy_ring", ring)
    return ring


def even_gcd(a: SuperPolynomial, b: SuperPolynomial) -> SuperPolynomial:
    """Monic gcd of two purely even polynomials."""
    vt = a.vt
    if not a:
        return b
    if not b or a.is_constant or b.is_constant or not vt.even:
        return SuperPolynomial.constant(vt, 1)
    R = _even_ring(vt)
    pa = R.from_dict({vt.unpack(k): c for (k, _), c in a.terms.items()})
    pb = R.from_dict({vt.unpack(k): c for (k, _), c in b.terms.items()})
    g = pa.gcd(pb)
    terms = {
        (vt.pack(e), 0): _coerce_coeff(Fraction(int(c.numerator), int(c.denominator)))
        for e, c in g.items()
    }
    return _monic(SuperPolynomial(vt, terms))[0]


def even_factor(p: SuperPolynomial) -> list[tuple[SuperPolynomial, int]]:
    """Monic irreducible factors with multiplicities of a nonzero even polynomial.

    The leading constant is dropped.
    """
    vt = p.vt
    if not p or not p.is_even_only:
        raise ValueError("can only factor nonzero purely even polynomials")
    if p.is_constant:
        return []
    R = _even_ring(vt)
    _, facs = R.from_dict({vt.unpack(k): c for (k, _), c in p.terms.items()}).factor_list()
    out = []
    for g, e in facs:
        terms = {
            (vt.pack(x), 0): _coerce_coeff(Fraction(int(c.numerator), int(c.denominator)))
            for x, c in g.items()
        }
        out.append((_monic(SuperPolynomial(vt, terms))[0], e))
    out.sort(key=lambda fe: fe[0].sorted_terms())
    return out


def _monic(p: SuperPolynomial):
    _, lc = p.leading()
    if lc == 1:
        return p, 1
    return p.scale(Fraction(1) / lc), lc


def exact_divide(f: SuperPolynomial, g: SuperPolynomial) -> SuperPolynomial | None:
    """``q`` with ``f == g*q``, or ``None`` when ``g`` does not divide ``f``.

    ``g`` must be purely even and nonzero.
    """
    if not g or not g.is_even_only:
        raise ValueError("divisor must be a nonzero purely even polynomial")
    _check_same(f.vt, g.vt)
    if g.is_constant:
        return f.scale(Fraction(1) / g.terms[(0, 0)])
    q, r = K.poly_divmod(f.terms, g.terms, f.vt.guard)
    if r:
        return None
    return SuperPolynomial(f.vt, q)


def normal_form(f: SuperPolynomial, g: SuperPolynomial) -> SuperPolynomial:
    """Remainder of ``f`` modulo the ideal generated by the even polynomial ``g``."""
    return SuperPolynomial(f.vt, K.poly_nf(f.terms, g.terms, f.vt.guard))


class SuperRational:
    """``num / den`` with ``den`` purely even, nonzero and monic (graded lex)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _monic_ok=False):
        if isinstance(num, SuperRational):
            if den is not None:
                raise TypeError("cannot combine a SuperRational with a denominator")
            self.num, self.den = num.num, num.den
            return
        vt = num.vt
        if den is None:
            den = SuperPolynomial.constant(vt, 1)
            _monic_ok = True
        else:
            _check_same(vt, den.vt)
            if not den:
                raise ZeroDivisionError("zero denominator")
            if not den.is_even_only:
                raise ValueError("denominator must be purely even")
        if not _monic_ok:
            den, lc = _monic(den)
            if lc != 1:
                num = num.scale(Fraction(1) / lc)
        self.num = num
        self.den = den

    @property
    def vt(self) -> VarTable:
        return self.num.vt

    @classmethod
    def constant(cls, vt, c) -> "SuperRational":
        return cls(SuperPolynomial.constant(vt, c))

    @classmethod
    def var(cls, vt, name) -> "SuperRational":
        return cls(SuperPolynomial.var(vt, name))

    def _lift(self, other):
        if isinstance(other, SuperRational):
            _check_same(self.vt, other.vt)
            return other
        if isinstance(other, SuperPolynomial):
            _check_same(self.vt, other.vt)
            return SuperRational(other)
        if isinstance(other, (int, Fraction)):
            return SuperRational.constant(self.vt, other)
        return NotImplemented

    @property
    def is_polynomial_form(self) -> bool:
        """True when the stored denominator is 1 (no reduction attempted)."""
        return self.den.is_constant

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return _radd(self, other)

    __radd__ = __add__

    def __neg__(self):
        return SuperRational(-self.num, self.den, _monic_ok=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return _radd(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SuperRational(self.num.scale(other), self.den, _monic_ok=True)
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        num = self.num * other.num
        if not num:
            return SuperRational(num)
        if self.den.is_constant:
            den = other.den
        elif other.den.is_constant:
            den = self.den
        else:
            den = self.den * other.den
        return SuperRational(num, den, _monic_ok=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self * invert(other)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return invert(self) ** (-e)
        return SuperRational(self.num ** e, self.den ** e, _monic_ok=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, SuperPolynomial)):
            other = self._lift(other)
        if not isinstance(other, SuperRational):
            return NotImplemented
        if self.vt != other.vt:
            return False
        if self.den == other.den:
            return self.num == other.num
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        r = self.reduced()
        return hash((frozenset(r.num.terms.items()), frozenset(r.den.terms.items())))

    def __bool__(self):
        return bool(self.num)

    def parity(self) -> int | None:
        return self.num.parity()

    def homogeneous_part(self, p: int) -> "SuperRational":
        return SuperRational(self.num.homogeneous_part(p), self.den, _monic_ok=True)

    def body(self) -> "SuperRational":
        return SuperRational(self.num.body(), self.den, _monic_ok=True)

    def soul(self) -> "SuperRational":
        return SuperRational(self.num.soul(), self.den, _monic_ok=True)

    def as_polynomial(self) -> SuperPolynomial | None:
        """The polynomial equal to this element, or None if it is not one."""
        if self.den.is_constant:
            return self.num
        return exact_divide(self.num, self.den)

    def is_polynomial(self) -> bool:
        return self.as_polynomial() is not None

    def reduced(self) -> "SuperRational":
        """Cancel the gcd of numerator and denominator."""
        if self.den.is_constant:
            return self
        if not self.num:
            return SuperRational(self.num)
        q = exact_divide(self.num, self.den)
        if q is not None:
            return SuperRational(q)
        g = self.den
        for comp in self.num.components().values():
            g = even_gcd(g, comp)
            if g.is_constant:
                return self
        return SuperRational(exact_divide(self.num, g), exact_divide(self.den, g))

    def derivative(self, name: str) -> "SuperRational":
        par, _ = self.vt.kind(name)
        if par == 1 or self.den.is_constant:
            return SuperRational(self.num.derivative(name), self.den, _monic_ok=True)
        dd = self.den.derivative(name)
        if not dd:
            return SuperRational(self.num.derivative(name), self.den, _monic_ok=True)
        num = self.num.derivative(name) * self.den - self.num * dd
        return SuperRational(num, self.den * self.den, _monic_ok=True)

    def render(self) -> str:
        r = self.reduced()
        if r.den.is_constant:
            return r.num.render()
        num = r.num.render()
        if len(r.num.terms) > 1:
            num = f"({num})"
        den = r.den.render()
        if len(r.den.terms) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"SuperRational({self.render()})"


def _radd(a: SuperRational, b: SuperRational) -> SuperRational:
    if not a.num:
        return b
    if not b.num:
        return a
    da, db = a.den, b.den
    if da == db:
        return SuperRational(a.num + b.num, da, _monic_ok=True)
    if db.is_constant:
        return SuperRational(a.num + b.num * da, da, _monic_ok=True)
    if da.is_constant:
        return SuperRational(a.num * db + b.num, db, _monic_ok=True)
    q = exact_divide(da, db)
    if q is not None:
        return SuperRational(a.num + b.num * q, da, _monic_ok=True)
    q = exact_divide(db, da)
    if q is not None:
        return SuperRational(a.num * q + b.num, db, _monic_ok=True)
    g = even_gcd(da, db)
    ca = exact_divide(db, g)
    cb = exact_divide(da, g)
    return SuperRational(a.num * ca + b.num * cb, da * ca)


# module-level operations ---------------------------------------------------
def body_soul(f: SuperRational) -> tuple[SuperRational, SuperRational]:
    f = SuperRational(f) if isinstance(f, SuperPolynomial) else f
    return f.body(), f.soul()


def partial_derivative(f, name: str) -> SuperRational:
    f = SuperRational(f) if isinstance(f, SuperPolynomial) else f
    return f.derivative(name)


def invert(f) -> SuperRational:
    """Inverse via the body inverse and a terminating geometric series in the soul."""
    f = SuperRational(f) if isinstance(f, SuperPolynomial) else f
    b = f.num.body()
    if not b:
        raise NotInvertible(f"body of {f.render()} is zero")
    s = f.num.soul()
    if not s:
        return SuperRational(f.den, b)
    # 1/(b+s) = sum_j (-s)^j b^(M-j) / b^(M+1)
    powers = [SuperPolynomial.constant(f.vt, 1)]
    while True:
        nxt = powers[-1] * (-s)
        if not nxt:
            break
        powers.append(nxt)
    top = len(powers) - 1
    num = SuperPolynomial(f.vt)
    bpow = SuperPolynomial.constant(f.vt, 1)
    for j in range(top, -1, -1):
        num = num + powers[j] * bpow
        bpow = bpow * b
    return SuperRational(num * f.den, bpow).reduced()


def check_parity_map(vt: VarTable, sigma: Mapping[str, object]):
    for name in vt.names:
        if name not in sigma:
            continue
        par, _ = vt.kind(name)
        p = sigma[name].parity()
        if p is None or (p != par and bool(sigma[name])):
            raise ValueError(f"substitution for {name!r} does not preserve parity")


def _as_rational(x) -> SuperRational:
    return SuperRational(x) if isinstance(x, SuperPolynomial) else x


def substitute_polynomial(f: SuperPolynomial, sigma: Mapping[str, object], target: VarTable):
    """Image of a polynomial under a substitution; returns a SuperRational."""
    vt = f.vt
    images_even = []
    for name in vt.even:
        img = sigma.get(name)
        images_even.append(None if img is None else _as_rational(img))
    images_odd = []
    for name in vt.odd:
        img = sigma.get(name)
        images_odd.append(None if img is None else _as_rational(img))
    pow_cache: dict[tuple[int, int], SuperRational] = {}

    def even_power(i, e):
        key = (i, e)
        got = pow_cache.get(key)
        if got is None:
            img = images_even[i]
            if img is None:
                raise KeyError(f"substitution missing variable {vt.even[i]!r}")
            got = img if e == 1 else even_power(i, e - 1) * img
            pow_cache[key] = got
        return got

    # group by denominator to limit fraction additions
    groups: dict[frozenset, list] = {}
    for (k, m), c in f.terms.items():
        term = SuperRational.constant(target, c)
        for i, e in enumerate(vt.unpack(k)):
            if e:
                term = term * even_power(i, e)
        j = 0
        while m >> j:
            if m >> j & 1:
                img = images_odd[j]
                if img is None:
                    raise KeyError(f"substitution missing variable {vt.odd[j]!r}")
                term = term * img
            j += 1
        if not term:
            continue
        dkey = frozenset(term.den.terms.items())
        slot = groups.get(dkey)
        if slot is None:
            groups[dkey] = [term.num, term.den]
        else:
            slot[0] = slot[0] + term.num
    total = SuperRational.constant(target, 0)
    for num, den in groups.values():
        total = total + SuperRational(num, den, _monic_ok=True)
    return total


def substitute(f, sigma: Mapping[str, object], target: VarTable | None = None) -> SuperRational:
    """Ring homomorphism sending each variable ``v`` of ``f`` to ``sigma[v]``.

    ``sigma`` must be parity preserving; its values live over ``target``.
    """
    f = _as_rational(f)
    if target is None:
        for img in sigma.values():
            target = img.vt
            break
        else:
            target = f.vt
    check_parity_map(f.vt, sigma)
    num = substitute_polynomial(f.num, sigma, target)
    if f.den.is_constant:
        return num
    den = substitute_polynomial(f.den, sigma, target)
    if not den.num.body():
        raise NotInvertible("substituted denominator has zero body")
    return num * invert(den)

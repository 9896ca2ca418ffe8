"""Exact arithmetic over Q(q, t_e, z_...).

Rational numbers are ``fractions.Fraction``.  ``LaurentPoly`` is a small
dict-backed ring used for explicit term manipulation.  ``RatFun`` is the
workhorse field element: a reduced quotient of two integer polynomials
held by python-flint, with Laurent monomials folded into the denominator.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import inf
from typing import Iterable, Mapping, Sequence

from flint import fmpz, fmpz_mpoly, fmpz_mpoly_ctx

from .errors import DivergentLimit, IllFormedInput, ParseError, ResourceCap

Rational = Fraction

MAX_TERMS_ENV = "QUIVERSHUFFLE_MAX_SERIES_TERMS"
_DEFAULT_MAX_TERMS = 20000

_ORDER = "deglex"
_DIGITS = re.compile(r"(\d+)")


def var_key(name: str) -> tuple:
    """Natural sort key: ``z_2_10`` sorts after ``z_2_9``."""
    return tuple((1, int(p)) if p.isdigit() else (0, p) for p in _DIGITS.split(name))


def sort_vars(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=var_key))


@lru_cache(maxsize=None)
def _ctx(names: tuple[str, ...]) -> fmpz_mpoly_ctx:
    return fmpz_mpoly_ctx.get(names, _ORDER)


def max_series_terms() -> int:
    raw = os.environ.get(MAX_TERMS_ENV)
    if not raw:
        return _DEFAULT_MAX_TERMS
    try:
        value = int(raw)
    except ValueError as exc:
        raise IllFormedInput(f"{MAX_TERMS_ENV} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise IllFormedInput(f"{MAX_TERMS_ENV} must be positive")
    return value


def _coerce_fraction(x) -> Fraction:
    if isinstance(x, bool):
        raise IllFormedInput("booleans are not coefficients")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, fmpz):
        return Fraction(int(x))
    raise IllFormedInput(f"cannot use {type(x).__name__} as an exact coefficient")


# ---------------------------------------------------------------- Laurent polys


@dataclass(frozen=True)
class LaurentPoly:
    """Finite sum of Laurent monomials with rational coefficients.

    ``terms`` maps exponent tuples (aligned with ``variables``) to nonzero
    coefficients.
    """

    variables: tuple[str, ...]
    terms: Mapping[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.variables)
        clean = {}
        for exps, c in self.terms.items():
            if len(exps) != n:
                raise IllFormedInput("exponent tuple length does not match variables")
            c = _coerce_fraction(c)
            if c:
                clean[tuple(int(e) for e in exps)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def const(cls, c, variables: Sequence[str] = ()) -> "LaurentPoly":
        return cls(tuple(variables), {(0,) * len(variables): c})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], c=1) -> "LaurentPoly":
        names = sort_vars(exps)
        return cls(names, {tuple(exps[v] for v in names): c})

    def _aligned(self, other: "LaurentPoly"):
        if self.variables == other.variables:
            return self.variables, self.terms, other.terms
        names = sort_vars(self.variables + other.variables)
        return names, self._reindex(names), other._reindex(names)

    def _reindex(self, names: tuple[str, ...]) -> dict:
        pos = [names.index(v) for v in self.variables]
        out = {}
        for exps, c in self.terms.items():
            e = [0] * len(names)
            for p, k in zip(pos, exps):
                e[p] = k
            out[tuple(e)] = c
        return out

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.const(other, self.variables)
        names, a, b = self._aligned(other)
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(names, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentPoly) else -_coerce_fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = _coerce_fraction(other)
            return LaurentPoly(self.variables, {e: v * c for e, v in self.terms.items()})
        names, a, b = self._aligned(other)
        out: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return LaurentPoly(names, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise IllFormedInput("only monomials have Laurent inverses")
            (e, c), = self.terms.items()
            return LaurentPoly(self.variables, {tuple(-x * -k for x in e): Fraction(1) / c ** -k})
        out = LaurentPoly.const(1, self.variables)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            try:
                other = LaurentPoly.const(other, self.variables)
            except IllFormedInput:
                return NotImplemented
        names, a, b = self._aligned(other)
        return a == b

    def __hash__(self):
        used = sort_vars(v for e in self.terms for v, k in zip(self.variables, e) if k)
        return hash(frozenset(self._reindex_used(used).items()))

    def _reindex_used(self, used):
        idx = [self.variables.index(v) for v in used]
        return {tuple(e[i] for i in idx): c for e, c in self.terms.items()}

    def is_zero(self) -> bool:
        return not self.terms

    def to_ratfun(self) -> "RatFun":
        return ratfun_normalize(self, LaurentPoly.const(1))

    def __repr__(self):
        return f"LaurentPoly({self.to_ratfun()})"


# ---------------------------------------------------------------- rational functions


def _split_laurent(lp: LaurentPoly) -> tuple[fmpz_mpoly, fmpz_mpoly]:
    """Write a Laurent polynomial as (integer poly) / (integer * monomial)."""
    names = lp.variables
    ctx = _ctx(names)
    if not lp.terms:
        return ctx.from_dict({}), ctx.constant(1)
    lows = [min(e[i] for e in lp.terms) for i in range(len(names))]
    shift = [-m if m < 0 else 0 for m in lows]
    denom = 1
    for c in lp.terms.values():
        denom = denom * c.denominator // _gcd(denom, c.denominator)
    num = ctx.from_dict(
        {tuple(k + s for k, s in zip(e, shift)): int(c * denom) for e, c in lp.terms.items()}
    )
    den = ctx.from_dict({tuple(shift): denom})
    return num, den


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


class RatFun:
    """Element of Q(vars) in canonical form.

    Invariants: ``num`` and ``den`` share one flint context whose variables
    are exactly those that occur; gcd(num, den) = 1 (including integer
    content); the leading coefficient of ``den`` under graded-lex is positive.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: fmpz_mpoly, den: fmpz_mpoly):
        self.num = num
        self.den = den

    # construction

    @staticmethod
    def const(c) -> "RatFun":
        c = _coerce_fraction(c)
        ctx = _ctx(())
        return RatFun(ctx.constant(c.numerator), ctx.constant(c.denominator))

    @staticmethod
    def symbol(name: str) -> "RatFun":
        ctx = _ctx((name,))
        return RatFun(ctx.gens()[0], ctx.constant(1))

    @staticmethod
    def monomial(exps: Mapping[str, int], c=1) -> "RatFun":
        return LaurentPoly.monomial({k: v for k, v in exps.items() if v}, c).to_ratfun()

    @staticmethod
    def from_polys(num: fmpz_mpoly, den: fmpz_mpoly) -> "RatFun":
        return _normalize(num, den)

    @staticmethod
    def coerce(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, LaurentPoly):
            return x.to_ratfun()
        return RatFun.const(x)

    # inspection

    @property
    def variables(self) -> tuple[str, ...]:
        return self.num.context().names()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.context().nvars() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise IllFormedInput(f"{self} is not a constant")
        return Fraction(int(self.num.leading_coefficient()), int(self.den.leading_coefficient()))

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def free_of(self, names: Iterable[str]) -> bool:
        own = set(self.variables)
        return not any(n in own for n in names)

    def denominator_is_monomial_in(self, names: Iterable[str]) -> bool:
        """True if the denominator is (poly free of ``names``) times a monomial in ``names``."""
        names = set(names)
        ctx_names = self.variables
        idx = [i for i, v in enumerate(ctx_names) if v in names]
        if not idx:
            return True
        terms = self.den.to_dict()
        # every z-exponent vector must be the same
        shapes = {tuple(e[i] for i in idx) for e in terms}
        return len(shapes) == 1

    # arithmetic

    def __add__(self, other):
        other = RatFun.coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        an, ad, bn, bd = _unify(self, other)
        if ad == bd:
            return _normalize(an + bn, ad)
        g = ad.gcd(bd)
        ad_g = ad / g
        bd_g = bd / g
        return _normalize(an * bd_g + bn * ad_g, ad * bd_g)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFun.coerce(other))

    def __rsub__(self, other):
        return RatFun.coerce(other) + (-self)

    def __mul__(self, other):
        other = RatFun.coerce(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        an, ad, bn, bd = _unify(self, other)
        g1 = an.gcd(bd)
        g2 = bn.gcd(ad)
        num = (an / g1) * (bn / g2)
        den = (ad / g2) * (bd / g1)
        return _finish(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        num, den = self.den, self.num
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return RatFun(num, den)

    def __truediv__(self, other):
        return self * RatFun.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFun.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise IllFormedInput("exponents must be integers")
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return ONE
        return RatFun(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            try:
                other = RatFun.coerce(other)
            except IllFormedInput:
                return NotImplemented
        if self.num.context() is not other.num.context():
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.variables, tuple(self.num.to_dict().items()), tuple(self.den.to_dict().items())))

    def __bool__(self):
        return not self.is_zero()

    # substitution

    def subs(self, mapping: Mapping[str, object]) -> "RatFun":
        """Substitute variables by rational functions (or numbers)."""
        own = self.variables
        values = {k: RatFun.coerce(v) for k, v in mapping.items() if k in own}
        if not values:
            return self
        if all(v.den.is_constant() and v.den.leading_coefficient() == 1 for v in values.values()):
            return _normalize(*_compose_pair(self.num, self.den, values))
        num, den = self.num, self.den
        out_n, out_d = _as_ratfun(num), _as_ratfun(den)
        # substitute one variable at a time, homogenizing by its denominator
        for name, val in values.items():
            out_n = _subs_one(out_n, name, val)
            out_d = _subs_one(out_d, name, val)
        return out_n / out_d

    def rename(self, mapping: Mapping[str, str]) -> "RatFun":
        """Rename variables; the targets must not collide with untouched names."""
        own = self.variables
        if not any(v in mapping for v in own):
            return self
        new_names = tuple(mapping.get(v, v) for v in own)
        if len(set(new_names)) != len(new_names):
            raise IllFormedInput("renaming merges variables")
        target = sort_vars(new_names)
        ctx = _ctx(target)
        perm = [target.index(v) for v in new_names]

        def move(p: fmpz_mpoly) -> fmpz_mpoly:
            out = {}
            for e, c in p.to_dict().items():
                ne = [0] * len(target)
                for i, k in zip(perm, e):
                    ne[i] = k
                out[tuple(ne)] = c
            return ctx.from_dict(out)

        num, den = move(self.num), move(self.den)
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        return RatFun(num, den)

    def evaluate(self, mapping: Mapping[str, object]) -> "RatFun":
        return self.subs(mapping)

    # degrees in a single variable

    def degree_in(self, var: str) -> float:
        if self.is_zero():
            return -inf
        own = self.variables
        if var not in own:
            return 0
        i = own.index(var)
        return int(self.num.degrees()[i]) - int(self.den.degrees()[i])

    def valuation_in(self, var: str) -> float:
        if self.is_zero():
            return inf
        own = self.variables
        if var not in own:
            return 0
        i = own.index(var)
        return int(min(e[i] for e in self.num.monoms())) - int(min(e[i] for e in self.den.monoms()))

    # display

    def __str__(self):
        return format_ratfun(self)

    def __repr__(self):
        return f"RatFun({self})"


def _as_ratfun(p: fmpz_mpoly) -> RatFun:
    return _normalize(p, p.context().constant(1))


def _unify(a: RatFun, b: RatFun):
    ca = a.num.context()
    cb = b.num.context()
    if ca is cb:
        return a.num, a.den, b.num, b.den
    names = sort_vars(ca.names() + cb.names())
    ctx = _ctx(names)
    return (
        a.num.project_to_context(ctx),
        a.den.project_to_context(ctx),
        b.num.project_to_context(ctx),
        b.den.project_to_context(ctx),
    )


def _finish(num: fmpz_mpoly, den: fmpz_mpoly) -> RatFun:
    """Fix the sign and drop unused variables of an already reduced pair."""
    if num.is_zero():
        return ZERO
    if den.leading_coefficient() < 0:
        num, den = -num, -den
    ctx = num.context()
    names = ctx.names()
    if names:
        dn = num.degrees()
        dd = den.degrees()
        used = tuple(v for v, a, b in zip(names, dn, dd) if a > 0 or b > 0)
        if len(used) != len(names):
            small = _ctx(used)
            num = num.project_to_context(small)
            den = den.project_to_context(small)
    return RatFun(num, den)


def _normalize(num: fmpz_mpoly, den: fmpz_mpoly) -> RatFun:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return ZERO
    g = num.gcd(den)
    if not (g.is_constant() and g.leading_coefficient() == 1):
        num = num / g
        den = den / g
    return _finish(num, den)


def _common(terms: Sequence[RatFun]) -> tuple[fmpz_mpoly, fmpz_mpoly]:
    """Numerator and denominator of a sum over the lcm of the denominators, unreduced."""
    names = sort_vars(v for f in terms for v in f.variables)
    ctx = _ctx(names)
    nums = [f.num.project_to_context(ctx) for f in terms]
    dens = [f.den.project_to_context(ctx) for f in terms]
    den = ctx.constant(1)
    for d in dens:
        g = den.gcd(d)
        den = den * (d / g)
    num = ctx.from_dict({})
    for n, d in zip(nums, dens):
        num = num + n * (den / d)
    return num, den


def ratsum(terms: Iterable) -> RatFun:
    """Sum of many rational functions with a single reduction at the end."""
    terms = [t for t in (RatFun.coerce(x) for x in terms) if not t.is_zero()]
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return _normalize(*_common(terms))


def sum_is_zero(terms: Iterable) -> bool:
    """Exact zero test for a sum, without reducing the result."""
    terms = [t for t in (RatFun.coerce(x) for x in terms) if not t.is_zero()]
    if not terms:
        return True
    return _common(terms)[0].is_zero()


def _compose_pair(num: fmpz_mpoly, den: fmpz_mpoly, values: Mapping[str, RatFun]):
    """Substitute integer-polynomial values via flint compose."""
    own = num.context().names()
    keep = [v for v in own if v not in values]
    extra = [v for val in values.values() for v in val.variables]
    target = _ctx(sort_vars(keep + extra))
    gens = dict(zip(target.names(), target.gens()))
    args = [values[v].num.project_to_context(target) if v in values else gens[v] for v in own]
    return num.compose(*args, ctx=target), den.compose(*args, ctx=target)


def _subs_one(f: RatFun, name: str, val: RatFun) -> RatFun:
    if name not in f.variables:
        return f
    num_parts = coefficients_in(f.num, name)
    den_parts = coefficients_in(f.den, name)
    an, ad = val.num, val.den

    def horner(parts: dict) -> RatFun:
        top = max(parts)
        acc = ZERO
        a = _as_ratfun(an)
        b = _as_ratfun(ad)
        for k, poly in parts.items():
            acc = acc + _as_ratfun(poly) * a ** k * b ** (top - k)
        return acc / b ** top

    return horner(num_parts) / horner(den_parts)


def coefficients_in(p: fmpz_mpoly, var: str) -> dict[int, fmpz_mpoly]:
    """Group a polynomial by powers of ``var`` (coefficients stay in the same context)."""
    names = p.context().names()
    if var not in names:
        return {0: p}
    i = names.index(var)
    groups: dict[int, dict] = {}
    for e, c in p.to_dict().items():
        k = int(e[i])
        e2 = e[:i] + (0,) + e[i + 1:]
        groups.setdefault(k, {})[e2] = c
    ctx = p.context()
    return {k: ctx.from_dict(d) for k, d in sorted(groups.items())}


ZERO = RatFun(_ctx(()).from_dict({}), _ctx(()).constant(1))
ONE = RatFun(_ctx(()).constant(1), _ctx(()).constant(1))


def ratfun_normalize(num: LaurentPoly, den: LaurentPoly) -> RatFun:
    """Canonical reduced form of num/den."""
    if den.is_zero():
        raise IllFormedInput("zero denominator")
    if num.is_zero():
        return ZERO
    pn, mn = _split_laurent(num)
    pd, md = _split_laurent(den)
    a = RatFun.from_polys(pn, mn)
    b = RatFun.from_polys(pd, md)
    return a / b


def symbols(*names: str) -> list[RatFun]:
    return [RatFun.symbol(n) for n in names]


# ---------------------------------------------------------------- text form


def _poly_str(p: fmpz_mpoly) -> str:
    return str(p)


def format_ratfun(f: RatFun) -> str:
    if f.is_zero():
        return "0"
    if f.den.is_constant():
        d = int(f.den.leading_coefficient())
        if f.num.is_constant():
            n = int(f.num.leading_coefficient())
            return str(n) if d == 1 else f"{n}/{d}"
        if d == 1:
            return _poly_str(f.num)
        return f"({_poly_str(f.num)})/{d}"
    num = _poly_str(f.num)
    if not (f.num.is_constant() or len(f.num) == 1 and "-" not in num):
        num = f"({num})"
    return f"{num}/({_poly_str(f.den)})"


_TOKEN = re.compile(
    r"\s*(?:(?P<float>\d+\.\d*|\.\d+|\d+[eE][+-]?\d+)|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)

_COEFF_SYMBOL = re.compile(r"^(q|t[A-Za-z0-9_]*)$")


def parse_coefficient(text: str, allow_symbol=None) -> RatFun:
    """Parse a coefficient string into a ``RatFun``.

    Grammar: integers, symbols, ``+ - * / ^`` with integer exponents, and
    parentheses.  By default the admitted symbols are ``q`` and ``t<label>``;
    pass ``allow_symbol`` (a predicate) to widen this.  Floating-point
    literals are rejected.
    """
    if not isinstance(text, str):
        raise ParseError(f"coefficient must be a string, got {type(text).__name__}")
    if allow_symbol is None:
        allow_symbol = lambda s: bool(_COEFF_SYMBOL.match(s))
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "float":
            raise ParseError("floating-point literal not allowed", text, start)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    if not tokens:
        raise ParseError("empty coefficient string", text, 0)
    parser = _Parser(tokens, text, allow_symbol)
    value = parser.expr()
    if parser.i != len(tokens):
        raise ParseError("trailing input", text, tokens[parser.i][2])
    return value


class _Parser:
    def __init__(self, tokens, text, allow_symbol):
        self.tokens = tokens
        self.text = text
        self.allow = allow_symbol
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or 'token'}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self) -> RatFun:
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RatFun:
        acc = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", self.text, self.peek()[2])
                acc = acc / rhs
        return acc

    def unary(self) -> RatFun:
        tok = self.peek()
        if tok[1] == "-":
            self.take()
            return -self.unary()
        if tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFun:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            k = self.exponent()
            if k < 0 and base.is_zero():
                raise ParseError("zero to a negative power", self.text, self.peek()[2])
            base = base ** k
        return base

    def exponent(self) -> int:
        tok = self.peek()
        if tok[1] == "(":
            self.take()
            k = self.exponent()
            self.take(")")
            return k
        sign = 1
        while tok[1] in ("-", "+"):
            self.take()
            if tok[1] == "-":
                sign = -sign
            tok = self.peek()
        if tok[0] != "int":
            raise ParseError("exponent must be an integer", self.text, tok[2])
        self.take()
        return sign * int(tok[1])

    def atom(self) -> RatFun:
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            return RatFun.const(int(value))
        if kind == "name":
            if not self.allow(value):
                raise ParseError(f"unknown symbol {value!r}", self.text, pos)
            self.take()
            return RatFun.symbol(value)
        if value == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError("unexpected token", self.text, pos)


# ---------------------------------------------------------------- series


@dataclass(frozen=True)
class LaurentSeries:
    """Truncated expansion of a rational function in one variable.

    At ``point == 0`` the k-th coefficient multiplies ``var**(valuation + k)``.
    At ``point == inf`` it multiplies ``var**-(valuation + k)``, i.e. the
    expansion is in ``1/var``.  Terms with index ``valuation + k >= order``
    are not stored.
    """

    variable: str
    point: float
    valuation: float
    coefficients: tuple[RatFun, ...]
    order: int

    def terms(self) -> dict[int, RatFun]:
        if self.valuation == inf:
            return {}
        sign = 1 if self.point == 0 else -1
        return {
            sign * (self.valuation + k): c for k, c in enumerate(self.coefficients) if not c.is_zero()
        }

    def coefficient(self, exponent: int) -> RatFun:
        return self.terms().get(exponent, ZERO)


def _series_data(f: RatFun, var: str):
    """Numerator/denominator grouped by powers of ``var`` with lowest indices."""
    nparts = coefficients_in(f.num, var)
    dparts = coefficients_in(f.den, var)
    return nparts, dparts, min(nparts), min(dparts)


def _series_at_zero(f: RatFun, var: str, count: int):
    """Return (valuation, [T_j], D0) with s_j = T_j / D0**(j+1)."""
    nparts, dparts, nv, dv = _series_data(f, var)
    d0 = dparts[dv]
    cap = max_series_terms()
    if count > cap:
        raise ResourceCap(f"series expansion needs {count} terms, cap is {cap} ({MAX_TERMS_ENV})")
    t: list[fmpz_mpoly] = []
    d0_pows = [d0.context().constant(1)]
    for j in range(count):
        while len(d0_pows) <= j:
            d0_pows.append(d0_pows[-1] * d0)
        acc = nparts.get(nv + j)
        acc = acc * d0_pows[j] if acc is not None else d0.context().from_dict({})
        for l in range(1, j + 1):
            dl = dparts.get(dv + l)
            if dl is not None and not t[j - l].is_zero():
                acc = acc - dl * t[j - l] * d0_pows[l - 1]
        t.append(acc)
    return nv - dv, t, d0


def series_expand(f: RatFun, var: str, point=0, order: int = 0) -> LaurentSeries:
    """Expand ``f`` in ``var`` around 0 or infinity.

    For ``point == 0`` terms with exponent ``< order`` are kept.  For
    ``point == inf`` terms with exponent ``> -order`` are kept (the
    expansion variable is ``1/var``).
    """
    f = RatFun.coerce(f)
    if point not in (0, inf):
        raise IllFormedInput("expansion point must be 0 or inf")
    if f.is_zero():
        return LaurentSeries(var, point, inf, (), order)
    g = f if point == 0 else _invert_variable(f, var)
    nparts, dparts, nv, dv = _series_data(g, var)
    val = nv - dv
    count = max(0, order - val)
    val, t, d0 = _series_at_zero(g, var, count)
    coeffs = []
    d0r = _as_ratfun(d0)
    for j, tj in enumerate(t):
        coeffs.append(_as_ratfun(tj) / d0r ** (j + 1))
    return LaurentSeries(var, point, val, tuple(coeffs), order)


def _invert_variable(f: RatFun, var: str) -> RatFun:
    if var not in f.variables:
        return f
    x = RatFun.symbol(var)
    return f.subs({var: x.inverse()})


def constant_term_iterated(f: RatFun, variables: Sequence[str], region: str = "increasing") -> RatFun:
    """Iterated constant term over the region |v_1| << ... << |v_n| (``increasing``)
    or |v_1| >> ... >> |v_n| (``decreasing``).

    The smallest variable is expanded first, around 0, and its constant
    coefficient is kept; the result becomes the input for the next one.
    """
    if region not in ("increasing", "decreasing"):
        raise IllFormedInput("region must be 'increasing' or 'decreasing'")
    order = list(variables) if region == "increasing" else list(reversed(variables))
    cur = RatFun.coerce(f)
    for v in order:
        cur = constant_term(cur, v)
        if cur.is_zero():
            return ZERO
    return cur


def constant_term(f: RatFun, var: str) -> RatFun:
    """Coefficient of ``var**0`` in the expansion of ``f`` around ``var = 0``."""
    if f.is_zero() or var not in f.variables:
        return f
    nparts, dparts, nv, dv = _series_data(f, var)
    val = nv - dv
    if val > 0:
        return ZERO
    _, t, d0 = _series_at_zero(f, var, -val + 1)
    return _normalize(t[-val], d0 ** (-val + 1))


def xi_degree(f: RatFun, xi: str, at=inf) -> float:
    """Order of growth in ``xi`` at infinity (degree) or at zero (valuation)."""
    f = RatFun.coerce(f)
    if at == inf:
        return f.degree_in(xi)
    if at == 0:
        return f.valuation_in(xi)
    raise IllFormedInput("at must be 0 or inf")


def limit_leading(f: RatFun, xi: str, shift: int, at=inf) -> RatFun:
    """lim f / xi**shift as xi tends to ``at``.

    Raises ``DivergentLimit`` if the growth exceeds ``shift``; returns 0 if
    it is strictly smaller.
    """
    f = RatFun.coerce(f)
    if f.is_zero():
        return ZERO
    if xi not in f.variables:
        if shift == 0:
            return f
        if (at == inf and shift > 0) or (at == 0 and shift < 0):
            return ZERO
        raise DivergentLimit(f"limit diverges: xi-free expression against xi^{shift}")
    nparts = coefficients_in(f.num, xi)
    dparts = coefficients_in(f.den, xi)
    if at == inf:
        kn, kd = max(nparts), max(dparts)
        growth = kn - kd
        if growth > shift:
            raise DivergentLimit(f"growth {growth} exceeds {shift} as {xi} -> inf")
        if growth < shift:
            return ZERO
    elif at == 0:
        kn, kd = min(nparts), min(dparts)
        growth = kn - kd
        if growth < shift:
            raise DivergentLimit(f"valuation {growth} below {shift} as {xi} -> 0")
        if growth > shift:
            return ZERO
    else:
        raise IllFormedInput("at must be 0 or inf")
    return RatFun.from_polys(nparts[kn], dparts[kd])


# ---------------------------------------------------------------- linear algebra


Matrix = list[list[RatFun]]


def rref(rows: Matrix, ncols: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over the rational function field.

    Pivots are chosen as the first nonzero entry scanning columns left to
    right, so the output only depends on the column order.
    """
    m = [[RatFun.coerce(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((k for k in range(r, len(m)) if not m[k][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv if not x.is_zero() else x for x in m[r]]
        for k in range(len(m)):
            if k != r and not m[k][c].is_zero():
                f = m[k][c]
                m[k] = [a - f * b if not b.is_zero() else a for a, b in zip(m[k], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Matrix, ncols: int) -> list[list[RatFun]]:
    """Basis of {v : rows * v = 0}, one vector per free column (set to 1)."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, p in zip(red, pivots):
            if not row[f].is_zero():
                v[p] = -row[f]
        basis.append(v)
    return basis


def rank(rows: Matrix, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def solve(rows: Matrix, rhs: list[RatFun]) -> list[RatFun] | None:
    """One solution of rows * v = rhs (free variables set to 0), or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [RatFun.coerce(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    v = [ZERO] * ncols
    for row, p in zip(red, pivots):
        v[p] = row[ncols]
    return v


def inverse(mat: Matrix) -> Matrix:
    from .errors import SingularMatrix

    n = len(mat)
    aug = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(mat)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in red]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), ZERO) for j in range(len(b[0]))]
        for i in range(len(a))
    ]

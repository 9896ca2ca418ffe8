"""Alphabet calculus for localized K-theory classes of quiver varieties.

Classes are rational functions in Chern roots ``x_<node>_<a>`` and framing
weights ``w_<node>_<a>``.  Formal alphabet combinations are signed multisets
of colored monomials; power sums are additive on them and the kernels
zeta-tilde and wedge-star are multiplicative.

The intertwining check builds both sides of the infinite-slope identity
for e_i(z), for the Cartan currents and, optionally, for f_i(z), and
compares them as exact rational functions.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import IllFormedInput, ParseError
from .exactalg import ONE, ZERO, RatFun, ratsum, sum_is_zero
from .quiver import DimVector, Quiver, wvar, xvar

READINGS = ("distinguished", "formal")
# formal square root of q; appears only in optional Cartan prefactors
QHALF = "qhalf_"


def q_half_power(e: int) -> RatFun:
    """q^(e/2) with odd powers carried by the formal symbol ``qhalf_``."""
    q = RatFun.symbol("q")
    out = q ** (e // 2)
    if e % 2:
        out = out * RatFun.symbol(QHALF)
    return out


# ---------------------------------------------------------------- alphabets


@dataclass(frozen=True)
class Formal:
    """Signed multiset of colored monomials: sum of sign * value."""

    entries: tuple[tuple[str, RatFun, int], ...] = ()

    @classmethod
    def of(cls, items: Iterable[tuple[str, RatFun]], sign: int = 1) -> "Formal":
        return cls(tuple((c, RatFun.coerce(v), sign) for c, v in items))

    @classmethod
    def single(cls, color: str, value) -> "Formal":
        return cls(((color, RatFun.coerce(value), 1),))

    def __add__(self, other: "Formal") -> "Formal":
        return Formal(self.entries + other.entries)

    def __neg__(self) -> "Formal":
        return Formal(tuple((c, v, -s) for c, v, s in self.entries))

    def __sub__(self, other: "Formal") -> "Formal":
        return self + (-other)

    def scaled(self, factor) -> "Formal":
        factor = RatFun.coerce(factor)
        return Formal(tuple((c, v * factor, s) for c, v, s in self.entries))

    def color(self, node: str) -> "Formal":
        return Formal(tuple(e for e in self.entries if e[0] == node))

    def cancel(self) -> "Formal":
        """Remove pairs +m, -m of the same color."""
        pos: list[tuple[str, RatFun, int]] = []
        neg: list[tuple[str, RatFun, int]] = []
        for e in self.entries:
            other = neg if e[2] > 0 else pos
            for k, f in enumerate(other):
                if f[0] == e[0] and f[1] == e[1]:
                    del other[k]
                    break
            else:
                (pos if e[2] > 0 else neg).append(e)
        return Formal(tuple(pos + neg))


@dataclass(frozen=True)
class Alphabet:
    """Chern roots x_{i,1..v_i} and framing weights w_{i,1..w_i}."""

    quiver: Quiver
    v: DimVector
    w: DimVector
    prefix: str = "x"
    wprefix: str = "w"

    def roots(self, node: str | None = None) -> list[tuple[str, RatFun]]:
        out = []
        for i, k in zip(self.quiver.nodes, self.v):
            if node is None or node == i:
                out.extend((i, RatFun.symbol(_root(self.prefix, i, a))) for a in range(1, k + 1))
        return out

    def framing(self, node: str) -> list[RatFun]:
        k = self.w[self.quiver.index(node)]
        return [RatFun.symbol(_root(self.wprefix, node, a)) for a in range(1, k + 1)]

    @property
    def X(self) -> Formal:
        return Formal.of(self.roots())

    def W(self, node: str) -> Formal:
        return Formal.of((node, w) for w in self.framing(node))

    def Wall(self) -> Formal:
        return sum((self.W(i) for i in self.quiver.nodes), Formal())


def _root(prefix: str, node: str, a: int) -> str:
    if prefix == "x":
        return xvar(node, a)
    if prefix == "w":
        return wvar(node, a)
    return f"{prefix}_{node}_{a}"


def alphabet(quiver: Quiver, v, w, prefix: str = "x", wprefix: str = "w") -> Alphabet:
    return Alphabet(quiver, quiver.dim(v), quiver.dim(w), prefix, wprefix)


# ---------------------------------------------------------------- power sums


@dataclass(frozen=True)
class PowerSumWord:
    """Product of power sums p_d(X_node); the empty word is 1."""

    factors: tuple[tuple[int, str], ...] = ()

    def degree(self) -> int:
        return sum(abs(d) for d, _ in self.factors)

    def __str__(self):
        if not self.factors:
            return "1"
        return "*".join(f"p{d}[{node}]" for d, node in self.factors)


_PS_TOKEN = re.compile(r"^p(-?\d+)\[([A-Za-z0-9]+)\]$")


def parse_power_sum_word(text: str, quiver: Quiver | None = None) -> PowerSumWord:
    """Parse words like ``p1[1]*p2[1]``; ``1`` is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return PowerSumWord()
    factors = []
    pos = 0
    for part in text.split("*"):
        m = _PS_TOKEN.match(part.strip())
        if not m:
            raise ParseError(f"bad power-sum factor {part.strip()!r} at offset {pos}")
        d, node = int(m.group(1)), m.group(2)
        if d == 0:
            raise ParseError(f"power sum of degree 0 at offset {pos}")
        if quiver is not None and node not in quiver.nodes:
            raise ParseError(f"unknown node {node!r} at offset {pos}")
        factors.append((d, node))
        pos += len(part) + 1
    return PowerSumWord(tuple(sorted(factors, key=lambda f: (f[1], f[0]))))


def power_sum(d: int, arg: Formal, node: str) -> RatFun:
    """p_d of the color-``node`` part of a formal combination (additive in the argument)."""
    acc = ZERO
    for c, v, s in arg.entries:
        if c == node:
            term = v ** d
            acc = acc + (term if s > 0 else -term)
    return acc


def plethystic_eval(word: PowerSumWord, arg: Formal, declared: Iterable[str] | None = None) -> RatFun:
    """Evaluate a power-sum word on a formal alphabet combination."""
    if declared is not None:
        allowed = set(declared) | {"q"}
        for _, v, _ in arg.entries:
            extra = set(v.variables) - allowed
            if extra:
                raise IllFormedInput(f"undeclared symbols {sorted(extra)}")
    out = ONE
    for d, node in word.factors:
        out = out * power_sum(d, arg, node)
    return out


# ---------------------------------------------------------------- multiplicative kernels


def wedge_star(arg: Formal) -> RatFun:
    """wedge^*(sum m - sum m') = prod (1 - m) / prod (1 - m')."""
    num = ONE
    den = ONE
    for _, v, s in arg.cancel().entries:
        if s > 0:
            num = num * (1 - v)
        else:
            den = den * (1 - v)
    return num / den


def wedge_ratio(A: Formal, B: Formal, factor=ONE) -> RatFun:
    """wedge^*(factor * A / B) over all pairs (a, b), sign = sign(a) * sign(b)."""
    factor = RatFun.coerce(factor)
    num = ONE
    den = ONE
    for _, a, sa in A.entries:
        for _, b, sb in B.entries:
            val = 1 - factor * a / b
            if sa * sb > 0:
                num = num * val
            else:
                den = den * val
    return num / den


def zeta_tilde_ratio(quiver: Quiver, A: Formal, B: Formal, exclude_self: bool = True) -> RatFun:
    """zeta-tilde(A / B) = prod over pairs of zeta-tilde_{c(a) c(b)}(a / b), with signs.

    Pairs of identical colored entries are skipped when ``exclude_self``.
    """
    num = ONE
    den = ONE
    for ca, a, sa in A.entries:
        for cb, b, sb in B.entries:
            if exclude_self and ca == cb and a == b:
                continue
            val = quiver.zeta_tilde(ca, cb, a / b)
            if sa * sb > 0:
                num = num * val
            else:
                den = den * val
    return num / den


def framing_wedge(al: Alphabet, Z: Formal, factor=ONE) -> RatFun:
    """prod over colors i of wedge^*(factor * Z_i / W_i)."""
    out = ONE
    for node in al.quiver.nodes:
        out = out * wedge_ratio(Z.color(node), al.W(node), factor)
    return out


# ---------------------------------------------------------------- stable envelope


def _framing_pair(quiver: Quiver, w1: DimVector, w2: DimVector) -> tuple[Alphabet, Alphabet]:
    """Framing alphabets of the two tensor factors use disjoint symbols."""
    return (Alphabet(quiver, tuple(0 for _ in w1), w1, "x", "wa"), Alphabet(quiver, tuple(0 for _ in w2), w2, "x", "wb"))


def stab_restriction(
    quiver: Quiver, V1: Formal, V2: Formal, W1: Alphabet, W2: Alphabet, cartan: bool = False, v1=None, v2=None
) -> RatFun:
    """Stab_inf restricted to the fixed component with roots V1 (first factor) and V2.

    zeta-tilde(V1/V2) * prod_i wedge^*(q V1_i / W2_i) wedge^*(V2_i / W1_i); with
    ``cartan`` the prefactor q^((w2.v1 - <v2, v1>)/2) is included.
    """
    q = RatFun.symbol("q")
    out = zeta_tilde_ratio(quiver, V1, V2)
    for node in quiver.nodes:
        out = out * wedge_ratio(V1.color(node), W2.W(node), q) * wedge_ratio(V2.color(node), W1.W(node))
    if cartan:
        if v1 is None or v2 is None:
            raise IllFormedInput("the Cartan prefactor needs the dimension vectors")
        out = out * q_half_power(quiver.dot(W2.w, v1) - quiver.inner(v2, v1))
    return out


def stab_infty_class(quiver: Quiver, v1, w1, v2, w2, cartan: bool = False) -> RatFun:
    """Restriction of Stab_inf to M(v1, w1) x M(v2, w2) on the symbols x1_*, x2_*, wa_*, wb_*."""
    v1, v2, w1, w2 = (quiver.dim(a) for a in (v1, v2, w1, w2))
    A1 = Alphabet(quiver, v1, w1, "x1", "wa")
    A2 = Alphabet(quiver, v2, w2, "x2", "wb")
    return stab_restriction(quiver, A1.X, A2.X, A1, A2, cartan, v1, v2)


def splittings(roots: Sequence[tuple[str, RatFun]], sizes: dict[str, int], quiver: Quiver):
    """All ways to split colored roots into (first, second) with |first_i| = sizes[i]."""
    per_color = []
    for node in quiver.nodes:
        rs = [r for r in roots if r[0] == node]
        k = sizes.get(node, 0)
        if k < 0 or k > len(rs):
            return
        per_color.append([(list(c), [r for j, r in enumerate(rs) if j not in c_idx]) for c_idx in itertools.combinations(range(len(rs)), k) for c in [[rs[j] for j in c_idx]]])
    for combo in itertools.product(*per_color):
        first = [r for a, _ in combo for r in a]
        second = [r for _, b in combo for r in b]
        yield Formal.of(first), Formal.of(second)


def stab_apply(
    quiver: Quiver,
    roots: Sequence[tuple[str, RatFun]],
    v1: DimVector,
    W1: Alphabet,
    W2: Alphabet,
    cls,
) -> RatFun:
    """Stab_inf(c) as a sum over splittings of ``roots`` (the Sym over old roots).

    ``cls(V1, V2)`` returns the class on the fixed component.
    """
    return ratsum(stab_terms(quiver, roots, v1, W1, W2, cls))


def stab_terms(quiver: Quiver, roots, v1: DimVector, W1: Alphabet, W2: Alphabet, cls) -> list[RatFun]:
    """The summands of ``stab_apply``, one per splitting."""
    sizes = dict(zip(quiver.nodes, v1))
    return [stab_restriction(quiver, A, B, W1, W2) * cls(A, B) for A, B in splittings(roots, sizes, quiver)]


# ---------------------------------------------------------------- actions


def act_e(quiver: Quiver, i: str, z, X: Formal, W: Formal, c: PowerSumWord, reading: str = "distinguished") -> RatFun:
    """e_i(z) acting on c(X): zeta-tilde(z / X_{v+e_i}) wedge^*(zq/W) c(X_{v+e_i} - z).

    ``distinguished``: X_{v+e_i} = X + z and the self-pair of z is skipped, so
    the result is zeta-tilde(z/X) wedge^*(zq/W) c(X).  ``formal``: ``X`` is
    already the enlarged alphabet and z is an independent symbol.
    """
    z = RatFun.coerce(z)
    Z = Formal.single(i, z)
    q = RatFun.symbol("q")
    if reading == "distinguished":
        big = X + Z
    elif reading == "formal":
        big = X
    else:
        raise IllFormedInput(f"reading must be one of {READINGS}")
    return zeta_tilde_ratio(quiver, Z, big) * wedge_ratio(Z, W.color(i), q) * plethystic_eval(c, big - Z)


def act_h(quiver: Quiver, i: str, z, X: Formal, W: Formal, c: RatFun = ONE) -> RatFun:
    """h_i^{+-}(z) acting on c: multiplication by the Cartan kernel ratio."""
    z = RatFun.coerce(z)
    Z = Formal.single(i, z)
    q = RatFun.symbol("q")
    Wi = W.color(i)
    return (
        zeta_tilde_ratio(quiver, Z, X)
        / zeta_tilde_ratio(quiver, X, Z)
        * wedge_ratio(Z, Wi, q)
        / wedge_ratio(Z, Wi)
        * RatFun.coerce(c)
    )


def act_f(
    quiver: Quiver, i: str, z, Y: Formal, W: Formal, c: PowerSumWord, wedge_exponent: int = -1
) -> RatFun:
    """f_i(z) acting on c(X) with X = Y + z (z a root that is removed).

    zeta-tilde(Y / z)^{-1} wedge^*(z / W)^{wedge_exponent} c(Y + z).
    """
    if wedge_exponent not in (1, -1):
        raise IllFormedInput("wedge_exponent must be +1 or -1")
    z = RatFun.coerce(z)
    Z = Formal.single(i, z)
    wedge = wedge_ratio(Z, W.color(i))
    if wedge_exponent < 0:
        wedge = 1 / wedge
    return wedge / zeta_tilde_ratio(quiver, Y, Z) * plethystic_eval(c, Y + Z)


def cartan_action_series(quiver: Quiver, i: str, sign: int, v, w, order: int) -> list[RatFun]:
    """Expansion of the Cartan action kernel divided by its leading coefficient.

    Positive sign expands around z = infinity in powers of 1/z, negative
    sign around z = 0 in powers of z; entry k is the coefficient of z^{-sign k}.
    """
    from .exactalg import series_expand

    al = alphabet(quiver, v, w)
    f = act_h(quiver, i, RatFun.symbol("zh_"), al.X, al.Wall())
    if "zh_" not in f.variables:
        return [ONE] + [ZERO] * order
    if sign > 0:
        val = -int(f.degree_in("zh_"))
        terms = series_expand(f, "zh_", float("inf"), val + order + 1).terms()
        return [terms.get(-(val + k), ZERO) / terms[-val] for k in range(order + 1)]
    val = int(f.valuation_in("zh_"))
    terms = series_expand(f, "zh_", 0, val + order + 1).terms()
    return [terms.get(val + k, ZERO) / terms[val] for k in range(order + 1)]


def cartan_action_leading(quiver: Quiver, i: str, sign: int, v, w) -> RatFun:
    """Leading coefficient of the Cartan action kernel at z = infinity (sign +) or 0 (sign -)."""
    al = alphabet(quiver, v, w)
    f = act_h(quiver, i, RatFun.symbol("zh_"), al.X, al.Wall())
    from .exactalg import limit_leading

    if "zh_" not in f.variables:
        return f
    if sign > 0:
        return limit_leading(f, "zh_", int(f.degree_in("zh_")), float("inf"))
    return limit_leading(f, "zh_", int(f.valuation_in("zh_")), 0)


# ---------------------------------------------------------------- intertwining


@dataclass
class IntertwineResult:
    """Both sides of one identity, kept as term lists; sums are formed on demand."""

    label: str
    lhs_terms: list
    rhs_terms: list
    details: dict = field(default_factory=dict)

    @cached_property
    def ok(self) -> bool:
        return sum_is_zero(self.lhs_terms + [-t for t in self.rhs_terms])

    @cached_property
    def lhs(self) -> RatFun:
        return ratsum(self.lhs_terms)

    @cached_property
    def rhs(self) -> RatFun:
        return ratsum(self.rhs_terms)

    @cached_property
    def difference(self) -> RatFun:
        return ratsum(self.lhs_terms + [-t for t in self.rhs_terms])


def _setup(quiver: Quiver, v1, v2, w1, w2):
    v1, v2, w1, w2 = (quiver.dim(a) for a in (v1, v2, w1, w2))
    W1 = Alphabet(quiver, tuple(0 for _ in v1), w1, "x", "wa")
    W2 = Alphabet(quiver, tuple(0 for _ in v1), w2, "x", "wb")
    return v1, v2, w1, w2, W1, W2


def _unit_vec(quiver: Quiver, i: str) -> DimVector:
    return quiver.unit(i)


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def intertwine_e(
    quiver: Quiver, i: str, v1, v2, w1, w2, p1: PowerSumWord, p2: PowerSumWord, reading: str = "distinguished"
) -> IntertwineResult:
    """e_i(z) Stab(p1 (x) p2) against Stab(Delta(e_i(z)) (p1 (x) p2)), both as displayed."""
    v1, v2, w1, w2, W1, W2 = _setup(quiver, v1, v2, w1, w2)
    q = RatFun.symbol("q")
    z = RatFun.symbol("z_")
    Z = Formal.single(i, z)
    ei = _unit_vec(quiver, i)
    if reading == "distinguished":
        sym_roots = Alphabet(quiver, _add(v1, v2), _add(w1, w2)).roots()
        big = Formal.of(sym_roots) + Z
    elif reading == "formal":
        sym_roots = Alphabet(quiver, _add(_add(v1, v2), ei), _add(w1, w2)).roots()
        big = Formal.of(sym_roots)
    else:
        raise IllFormedInput(f"reading must be one of {READINGS}")

    pref = zeta_tilde_ratio(quiver, Z, big) * wedge_ratio(Z, W1.W(i), q) * wedge_ratio(Z, W2.W(i), q)

    # left side: sum over the two placements of the new root
    def lhs_first(V1, V2):
        V2m = (V2 - Z).cancel()
        return (
            zeta_tilde_ratio(quiver, V1, V2m)
            * _w(quiver, V1, W2, q)
            * _w(quiver, V2m, W1)
            * plethystic_eval(p1, V1)
            * plethystic_eval(p2, V2m)
        )

    def lhs_second(V1, V2):
        V1m = (V1 - Z).cancel()
        return (
            zeta_tilde_ratio(quiver, V1m, V2)
            * _w(quiver, V1m, W2, q)
            * _w(quiver, V2, W1)
            * plethystic_eval(p1, V1m)
            * plethystic_eval(p2, V2)
        )

    lhs = [pref * lhs_first(V1, V2) for V1, V2 in _placements(quiver, sym_roots, v1, i, reading, new_in_first=False)]
    lhs += [pref * lhs_second(V1, V2) for V1, V2 in _placements(quiver, sym_roots, v1, i, reading, new_in_first=True)]

    # right side: Stab of e(z) p1 (x) p2 and of h^+(z) p1 (x) e(z) p2
    def rhs_first(V1, V2):
        return act_e(quiver, i, z, _drop(V1, Z, reading), W1.Wall(), p1, reading) * plethystic_eval(p2, V2)

    def rhs_second(V1, V2):
        base1 = act_h(quiver, i, z, V1, W1.Wall(), plethystic_eval(p1, V1))
        return base1 * act_e(quiver, i, z, _drop(V2, Z, reading), W2.Wall(), p2, reading)

    rhs = [
        stab_restriction(quiver, V1, V2, W1, W2) * rhs_first(V1, V2)
        for V1, V2 in _placements(quiver, sym_roots, v1, i, reading, new_in_first=True)
    ]
    rhs += [
        stab_restriction(quiver, V1, V2, W1, W2) * rhs_second(V1, V2)
        for V1, V2 in _placements(quiver, sym_roots, v1, i, reading, new_in_first=False)
    ]
    return IntertwineResult(f"e[{i}] {reading}", lhs, rhs)


def _w(quiver: Quiver, V: Formal, W: Alphabet, factor=ONE) -> RatFun:
    out = ONE
    for node in quiver.nodes:
        out = out * wedge_ratio(V.color(node), W.W(node), factor)
    return out


def _drop(V: Formal, Z: Formal, reading: str) -> Formal:
    """Alphabet handed to act_e: without the new root (distinguished) or as is (formal)."""
    return (V - Z).cancel() if reading == "distinguished" else V


def _placements(quiver: Quiver, roots, v1: DimVector, i: str, reading: str, new_in_first: bool):
    """(V1, V2) for every splitting, with the new color-i root in the chosen factor.

    ``distinguished``: the old roots are split with |V1 old| = v1 and the
    new root z_ is added to one factor.  ``formal``: the enlarged alphabet
    is split with the extra color-i root counted in the chosen factor.
    """
    Z = Formal.single(i, RatFun.symbol("z_"))
    if reading == "distinguished":
        for A, B in splittings(roots, dict(zip(quiver.nodes, v1)), quiver):
            yield (A + Z, B) if new_in_first else (A, B + Z)
        return
    size1 = _add(v1, quiver.unit(i)) if new_in_first else v1
    yield from splittings(roots, dict(zip(quiver.nodes, size1)), quiver)


def intertwine_h(quiver: Quiver, i: str, v1, v2, w1, w2, p1: PowerSumWord, p2: PowerSumWord) -> IntertwineResult:
    """h_i(z) Stab(p1 (x) p2) against Stab(h_i(z) p1 (x) h_i(z) p2)."""
    v1, v2, w1, w2, W1, W2 = _setup(quiver, v1, v2, w1, w2)
    z = RatFun.symbol("z_")
    roots = Alphabet(quiver, _add(v1, v2), _add(w1, w2)).roots()
    X = Formal.of(roots)
    Wall = W1.Wall() + W2.Wall()

    stab = stab_terms(quiver, roots, v1, W1, W2, lambda A, B: plethystic_eval(p1, A) * plethystic_eval(p2, B))
    kernel = act_h(quiver, i, z, X, Wall)
    lhs = [kernel * t for t in stab]
    rhs = stab_terms(
        quiver,
        roots,
        v1,
        W1,
        W2,
        lambda A, B: act_h(quiver, i, z, A, W1.Wall(), plethystic_eval(p1, A))
        * act_h(quiver, i, z, B, W2.Wall(), plethystic_eval(p2, B)),
    )
    return IntertwineResult(f"h[{i}]", lhs, rhs)


def intertwine_f(
    quiver: Quiver, i: str, v1, v2, w1, w2, p1: PowerSumWord, p2: PowerSumWord, wedge_exponent: int = -1
) -> IntertwineResult:
    """f_i(z) Stab(p1 (x) p2) against Stab(f p1 (x) h^-(z) p2 + p1 (x) f p2).

    The classes live on v = v1 + v2 with z one of the color-i roots.
    """
    v1, v2, w1, w2, W1, W2 = _setup(quiver, v1, v2, w1, w2)
    ei = _unit_vec(quiver, i)
    v = _add(v1, v2)
    if v[quiver.index(i)] < 1:
        raise IllFormedInput("f_i needs at least one root of color i")
    z = RatFun.symbol("z_")
    Z = Formal.single(i, z)
    rest = tuple(a - b for a, b in zip(v, ei))
    Yroots = Alphabet(quiver, rest, _add(w1, w2)).roots()
    Y = Formal.of(Yroots)
    Wall = W1.Wall() + W2.Wall()

    def stab_class(A, B):
        return plethystic_eval(p1, A) * plethystic_eval(p2, B)

    full_roots = Yroots + [(i, z)]
    stab_full = stab_terms(quiver, full_roots, v1, W1, W2, stab_class)
    wedge = wedge_ratio(Z, Wall.color(i))
    if wedge_exponent < 0:
        wedge = 1 / wedge
    factor = wedge / zeta_tilde_ratio(quiver, Y, Z)
    lhs = [factor * t for t in stab_full]

    rhs = []
    if v1[quiver.index(i)] >= 1:
        v1m = tuple(a - b for a, b in zip(v1, ei))

        def first(A, B):
            return act_f(quiver, i, z, A, W1.Wall(), p1, wedge_exponent) * _act_h_minus(quiver, i, z, B, W2, p2)

        rhs += stab_terms(quiver, Yroots, v1m, W1, W2, first)
    if v2[quiver.index(i)] >= 1:

        def second(A, B):
            return plethystic_eval(p1, A) * act_f(quiver, i, z, B, W2.Wall(), p2, wedge_exponent)

        rhs += stab_terms(quiver, Yroots, v1, W1, W2, second)
    return IntertwineResult(f"f[{i}] wedge^{wedge_exponent}", lhs, rhs)


def _act_h_minus(quiver: Quiver, i: str, z, B: Formal, W: Alphabet, p: PowerSumWord) -> RatFun:
    return act_h(quiver, i, z, B, W.Wall(), plethystic_eval(p, B))


def intertwine_check(
    quiver: Quiver,
    i: str,
    v1,
    v2,
    w1,
    w2,
    p1: PowerSumWord | str = PowerSumWord(),
    p2: PowerSumWord | str = PowerSumWord(),
    reading: str = "distinguished",
    include_h: bool = True,
    include_f: bool = False,
) -> list[IntertwineResult]:
    """Run the e-variant (and the h- and optional f-variants) for one configuration."""
    if isinstance(p1, str):
        p1 = parse_power_sum_word(p1, quiver)
    if isinstance(p2, str):
        p2 = parse_power_sum_word(p2, quiver)
    out = [intertwine_e(quiver, i, v1, v2, w1, w2, p1, p2, reading)]
    if include_h:
        out.append(intertwine_h(quiver, i, v1, v2, w1, w2, p1, p2))
    if include_f and (quiver.dim(v1)[quiver.index(i)] + quiver.dim(v2)[quiver.index(i)]) >= 1:
        out.append(intertwine_f(quiver, i, v1, v2, w1, w2, p1, p2))
    return out


def power_sum_words(quiver: Quiver, max_degree: int) -> list[PowerSumWord]:
    """All power-sum monomials of total degree <= max_degree (positive degrees)."""
    out = [PowerSumWord()]
    atoms = [(d, node) for node in quiver.nodes for d in range(1, max_degree + 1)]
    frontier = [PowerSumWord()]
    for _ in range(max_degree):
        nxt = []
        for wd in frontier:
            for a in atoms:
                if wd.factors and (a[1], a[0]) < (wd.factors[-1][1], wd.factors[-1][0]):
                    continue
                cand = PowerSumWord(wd.factors + (a,))
                if cand.degree() <= max_degree and cand not in out:
                    out.append(cand)
                    nxt.append(cand)
        frontier = nxt
    return out

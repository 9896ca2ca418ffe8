"""Shuffle algebra of a quiver: elements, product, wheel and slope conditions.

Elements are symmetric Laurent polynomials in variables ``z_<node>_<a>``
(``1 <= a <= n_node``) with coefficients in Q(q, t_e).  Positive and
negative halves share this storage; the negative half carries the
opposite product.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, inf
from typing import Iterable, Iterator, Mapping, Sequence

from flint import fmpz_mpoly

from .errors import IllFormedInput, NotInShuffleAlgebra, SlopeError
from .exactalg import (
    ONE,
    ZERO,
    LaurentPoly,
    RatFun,
    _ctx,
    _normalize,
    nullspace,
    sort_vars,
    xi_degree,
)
from .quiver import DimVector, Quiver, Slope, dims_upto

SIDES = ("positive", "negative")
XI = "xi_"


def zvar(node: str, a: int) -> str:
    return f"z_{node}_{a}"


def zvars(quiver: Quiver, n: DimVector) -> list[tuple[str, str]]:
    """(node, name) for every variable of degree ``n``, node-major."""
    return [(v, zvar(v, a)) for v, k in zip(quiver.nodes, n) for a in range(1, k + 1)]


def zgroups(quiver: Quiver, n: DimVector) -> list[list[str]]:
    return [[zvar(v, a) for a in range(1, k + 1)] for v, k in zip(quiver.nodes, n)]


def _check_side(side: str) -> str:
    if side not in SIDES:
        raise IllFormedInput(f"side must be one of {SIDES}, got {side!r}")
    return side


def laurent_terms(f: RatFun, names: Sequence[str]) -> dict[tuple[int, ...], RatFun]:
    """Split ``f`` as a Laurent polynomial in ``names`` with coefficients in the other variables.

    Requires the denominator to be (free of ``names``) times a monomial in ``names``.
    """
    if f.is_zero():
        return {}
    own = f.variables
    pos = [own.index(v) if v in own else None for v in names]
    idx = [p for p in pos if p is not None]
    den_groups: dict[tuple, dict] = {}
    for e, c in f.den.to_dict().items():
        key = tuple(int(e[i]) for i in idx)
        rest = tuple(0 if i in idx else k for i, k in enumerate(e))
        den_groups.setdefault(key, {})[rest] = c
    if len(den_groups) != 1:
        raise NotInShuffleAlgebra("denominator is not a monomial in the shuffle variables")
    (dshape, dcoef), = den_groups.items()
    ctx = f.num.context()
    dpoly = ctx.from_dict(dcoef)
    groups: dict[tuple, dict] = {}
    for e, c in f.num.to_dict().items():
        key = tuple(int(e[i]) for i in idx)
        rest = tuple(0 if i in idx else k for i, k in enumerate(e))
        groups.setdefault(key, {})[rest] = c
    out = {}
    for key, d in groups.items():
        full = []
        it = iter(k - s for k, s in zip(key, dshape))
        for p in pos:
            full.append(next(it) if p is not None else 0)
        out[tuple(full)] = _normalize(ctx.from_dict(d), dpoly)
    return out


@dataclass(frozen=True, eq=False)
class ShuffleElement:
    """Symmetric Laurent polynomial of horizontal degree ``hdeg``.

    For ``side == "negative"`` the element lives in the opposite algebra; its
    grading degree is ``-hdeg`` but storage is identical.
    """

    quiver: Quiver
    hdeg: DimVector
    poly: RatFun
    side: str = "positive"

    def __post_init__(self):
        _check_side(self.side)
        hdeg = self.quiver.dim(self.hdeg)
        if any(k < 0 for k in hdeg):
            raise IllFormedInput("horizontal degree must be nonnegative (the side flag carries the sign)")
        object.__setattr__(self, "hdeg", hdeg)
        object.__setattr__(self, "poly", RatFun.coerce(self.poly))
        allowed = {name for _, name in zvars(self.quiver, hdeg)} | {"q"} | set(self.quiver.params())
        extra = set(self.poly.variables) - allowed
        if extra:
            raise IllFormedInput(f"unexpected variables {sorted(extra)} for degree {hdeg}")
        if not self.poly.denominator_is_monomial_in(self.names):
            raise NotInShuffleAlgebra("element has non-monomial poles in the z variables")

    # ---- structure

    @property
    def names(self) -> list[str]:
        return [name for _, name in zvars(self.quiver, self.hdeg)]

    @property
    def colored(self) -> list[tuple[str, str]]:
        return zvars(self.quiver, self.hdeg)

    def terms(self) -> dict[tuple[int, ...], RatFun]:
        return laurent_terms(self.poly, self.names)

    def vdegs(self) -> set[int]:
        return {sum(e) for e in self.terms()}

    def vdeg(self) -> float:
        """Total z-degree; -inf for zero, error if inhomogeneous."""
        degs = self.vdegs()
        if not degs:
            return -inf
        if len(degs) > 1:
            raise IllFormedInput(f"element is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def grading(self) -> tuple[DimVector, float]:
        sign = 1 if self.side == "positive" else -1
        return tuple(sign * k for k in self.hdeg), self.vdeg()

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_symmetric(self) -> bool:
        for group in zgroups(self.quiver, self.hdeg):
            for a, b in zip(group, group[1:]):
                if self.poly.rename({a: b, b: a}) != self.poly:
                    return False
        return True

    # ---- linear structure

    def _like(self, poly: RatFun) -> "ShuffleElement":
        return ShuffleElement(self.quiver, self.hdeg, poly, self.side)

    def _compatible(self, other: "ShuffleElement"):
        if not isinstance(other, ShuffleElement):
            raise IllFormedInput("expected a ShuffleElement")
        if other.quiver != self.quiver:
            raise IllFormedInput("elements belong to different quivers")
        if other.side != self.side:
            raise IllFormedInput("elements belong to different halves")

    def __add__(self, other):
        self._compatible(other)
        if other.hdeg != self.hdeg:
            raise IllFormedInput("cannot add elements of different horizontal degree")
        return self._like(self.poly + other.poly)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._like(-self.poly)

    def scale(self, c) -> "ShuffleElement":
        c = RatFun.coerce(c)
        if not c.free_of(self.names):
            raise IllFormedInput("scalars must be free of the shuffle variables")
        return self._like(self.poly * c)

    def __mul__(self, other):
        if isinstance(other, ShuffleElement):
            return shuffle_product(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, ShuffleElement):
            return NotImplemented
        return (
            self.quiver == other.quiver
            and self.side == other.side
            and self.hdeg == other.hdeg
            and self.poly == other.poly
        )

    def __hash__(self):
        return hash((self.quiver.hash, self.side, self.hdeg, hash(self.poly)))

    def __repr__(self):
        return f"ShuffleElement({self.side}, hdeg={self.hdeg}, {self.poly})"


# ---------------------------------------------------------------- constructors


def unit(quiver: Quiver, side: str = "positive") -> ShuffleElement:
    return ShuffleElement(quiver, (0,) * len(quiver.nodes), ONE, side)


def generator(quiver: Quiver, node: str, d: int, side: str = "positive") -> ShuffleElement:
    """The element z^d in degree e_node (e_{node,d} or f_{node,d})."""
    return ShuffleElement(quiver, quiver.unit(node), RatFun.monomial({zvar(node, 1): d}), side)


def word(quiver: Quiver, letters: Sequence[tuple[str, int]], side: str = "positive") -> ShuffleElement:
    """Ordered product of generators in the given half."""
    out = unit(quiver, side)
    for node, d in letters:
        out = shuffle_product(out, generator(quiver, node, d, side))
    return out


def from_terms(
    quiver: Quiver,
    hdeg: DimVector,
    terms: Mapping[tuple[int, ...], object],
    side: str = "positive",
) -> ShuffleElement:
    """Element from exponent tuples aligned with ``zvars(quiver, hdeg)``."""
    hdeg = quiver.dim(hdeg)
    names = [n for _, n in zvars(quiver, hdeg)]
    acc = ZERO
    for exps, c in terms.items():
        mono = RatFun.monomial(dict(zip(names, exps)))
        acc = acc + mono * RatFun.coerce(c)
    return ShuffleElement(quiver, hdeg, acc, side)


def monomial_symmetric(quiver: Quiver, orbit: Sequence[Sequence[int]]) -> RatFun:
    """Sum of the distinct monomials whose exponents per node form the given multisets."""
    per_node = []
    for v, lam in zip(quiver.nodes, orbit):
        names = [zvar(v, a) for a in range(1, len(lam) + 1)]
        per_node.append([(names, p) for p in sorted(set(itertools.permutations(lam)))])
    names_all = [n for v, lam in zip(quiver.nodes, orbit) for n in (zvar(v, a) for a in range(1, len(lam) + 1))]
    terms = {}
    for combo in itertools.product(*per_node):
        exps = tuple(k for _, p in combo for k in p)
        terms[exps] = 1
    return LaurentPoly(tuple(names_all), terms).to_ratfun() if names_all else ONE


# ---------------------------------------------------------------- symmetrization


def _group_perms(groups: list[list[str]]) -> Iterator[tuple[dict[str, str], int]]:
    per = []
    for g in groups:
        per.append([(p, _perm_sign(p)) for p in itertools.permutations(range(len(g)))])
    for combo in itertools.product(*per):
        mapping = {}
        sign = 1
        for g, (p, s) in zip(groups, combo):
            sign *= s
            for a, b in enumerate(p):
                mapping[g[a]] = g[b]
        yield mapping, sign


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def vandermonde(groups: list[list[str]]) -> RatFun:
    out = ONE
    for g in groups:
        for a, b in itertools.combinations(g, 2):
            out = out * (RatFun.symbol(a) - RatFun.symbol(b))
    return out


def symmetrize(quiver: Quiver, hdeg: DimVector, poly: RatFun, method: str = "antisym") -> RatFun:
    """Sum of ``poly`` over all color-preserving permutations of the variables.

    ``antisym`` multiplies by the per-node Vandermonde product, antisymmetrizes
    the resulting Laurent polynomial and divides exactly; ``naive`` adds the
    permuted rational functions.  Both raise ``NotInShuffleAlgebra`` if the
    sum keeps a non-monomial pole in the z variables.
    """
    return symmetrize_groups(zgroups(quiver, quiver.dim(hdeg)), poly, method)


def symmetrize_groups(groups: list[list[str]], poly: RatFun, method: str = "antisym") -> RatFun:
    """Sum of ``poly`` over all permutations preserving each group of variable names."""
    names = [n for g in groups for n in g]
    if poly.is_zero():
        return ZERO
    if method == "naive":
        acc = ZERO
        for mapping, _ in _group_perms(groups):
            acc = acc + poly.rename(mapping)
        if not acc.denominator_is_monomial_in(names):
            raise NotInShuffleAlgebra("symmetrization left a pole in the z variables")
        return acc
    if method != "antisym":
        raise IllFormedInput(f"unknown symmetrization method {method!r}")
    V = vandermonde(groups)
    Y = poly * V
    if not Y.denominator_is_monomial_in(names):
        raise NotInShuffleAlgebra("integrand has poles that a Vandermonde product cannot clear")
    ctx = _ctx(sort_vars(Y.variables + tuple(names)))
    num = Y.num.project_to_context(ctx)
    den = Y.den.project_to_context(ctx)
    cnames = ctx.names()
    zpos = {n: cnames.index(n) for n in names}
    # make the z-part of the denominator symmetric within each node
    dexp = next(iter(den.to_dict()))
    bump = [0] * len(cnames)
    for g in groups:
        if not g:
            continue
        top = max(int(dexp[zpos[n]]) for n in g)
        for n in g:
            bump[zpos[n]] = top - int(dexp[zpos[n]])
    mono = ctx.from_dict({tuple(bump): 1})
    num = num * mono
    den = den * mono
    terms = num.to_dict()
    acc: dict[tuple, int] = {}
    for mapping, sign in _group_perms(groups):
        perm = list(range(len(cnames)))
        for a, b in mapping.items():
            perm[zpos[a]] = zpos[b]
        for e, c in terms.items():
            ne = [0] * len(cnames)
            for i, k in enumerate(e):
                ne[perm[i]] = k
            key = tuple(ne)
            acc[key] = acc.get(key, 0) + sign * c
    A = ctx.from_dict({e: c for e, c in acc.items() if c != 0})
    if A.is_zero():
        return ZERO
    Vp = V.num.project_to_context(ctx)
    B = A / Vp
    return _normalize(B, den)


# ---------------------------------------------------------------- product


def cross_zeta(quiver: Quiver, first: Sequence[tuple[str, str]], second: Sequence[tuple[str, str]]) -> RatFun:
    """Product of zeta_ij(z_a / z_b) over a in ``first`` (node i) and b in ``second`` (node j)."""
    names = sort_vars([n for _, n in first] + [n for _, n in second] + ["q"] + list(quiver.params()))
    ctx = _ctx(names)
    g = dict(zip(ctx.names(), ctx.gens()))
    q = g["q"]
    num = ctx.constant(1)
    den = ctx.constant(1)
    for i, a in first:
        za = g[a]
        for j, b in second:
            zb = g[b]
            if i == j:
                num *= q * zb - za
                den *= q * (zb - za)
            for e in quiver.edges_between(i, j):
                t = g[e.param]
                num *= zb - t * za
                den *= zb
            for e in quiver.edges_between(j, i):
                t = g[e.param]
                if quiver.dual_factor == "q_over_t":
                    num *= t * za - q * zb
                    den *= t * za
                else:
                    num *= q * za - t * zb
                    den *= q * za
    return _normalize(num, den)


def shifted(quiver: Quiver, F: ShuffleElement, offset: DimVector) -> RatFun:
    """F with z_{i,a} renamed to z_{i,a+offset_i}."""
    mapping = {}
    for v, k, off in zip(quiver.nodes, F.hdeg, offset):
        for a in range(1, k + 1):
            mapping[zvar(v, a)] = zvar(v, a + off)
    return F.poly.rename(mapping) if mapping else F.poly


def shuffle_product(F: ShuffleElement, G: ShuffleElement, method: str = "antisym") -> ShuffleElement:
    """Shuffle product; on the negative side the opposite order is used."""
    F._compatible(G)
    quiver = F.quiver
    side = F.side
    if side == "negative":
        F, G = G, F
    n, m = F.hdeg, G.hdeg
    total = tuple(a + b for a, b in zip(n, m))
    if F.is_zero() or G.is_zero():
        return ShuffleElement(quiver, total, ZERO, side)
    first = zvars(quiver, n)
    second = [(v, zvar(v, a + off)) for v, k, off in zip(quiver.nodes, m, n) for a in range(1, k + 1)]
    integrand = F.poly * shifted(quiver, G, n) * cross_zeta(quiver, first, second)
    norm = 1
    for a in n + m:
        norm *= factorial(a)
    poly = symmetrize(quiver, total, integrand, method) / norm
    return ShuffleElement(quiver, total, poly, side)


# ---------------------------------------------------------------- wheel conditions


@dataclass(frozen=True)
class WheelSpec:
    """One specialization of the variables that must annihilate the element."""

    kind: str
    edge: tuple[str, str, str]
    substitution: tuple[tuple[str, RatFun], ...]

    def describe(self) -> str:
        subs = ", ".join(f"{k} = {v}" for k, v in self.substitution)
        return f"{self.kind} wheel on edge {self.edge[0]}->{self.edge[1]} ({self.edge[2]}): {subs}"


def wheel_specializations(
    quiver: Quiver, n: DimVector, chained: bool = True, companion: bool = True
) -> list[WheelSpec]:
    """Representative specializations for each edge e = i -> j (one per symmetry class).

    ``chained``: z_{j,a} = t_e z_{i,b} = q z_{j,c}.  ``companion``: the first
    specialization z_{i,a} = q z_{j,b} / t_e read with the shared quantifier
    a != c, that is z_{i,a} = q z_{j,b} / t_e = q z_{i,c}.  For a loop b is
    distinct from a and c.
    """
    q = RatFun.symbol("q")
    n = quiver.dim(n)
    out = []
    for e in quiver.edges:
        i, j = e.src, e.dst
        ni, nj = n[quiver.index(i)], n[quiver.index(j)]
        t = RatFun.symbol(e.param)
        loop = i == j
        if chained and (ni >= 3 if loop else ni >= 1 and nj >= 2):
            zb = RatFun.symbol(zvar(i, 3 if loop else 1))
            subs = ((zvar(j, 1), t * zb), (zvar(j, 2), t * zb / q))
            out.append(WheelSpec("chained", (i, j, e.param), subs))
        if companion and (ni >= 3 if loop else nj >= 1 and ni >= 2):
            zb = RatFun.symbol(zvar(j, 3 if loop else 1))
            subs = ((zvar(i, 1), q * zb / t), (zvar(i, 2), zb / t))
            out.append(WheelSpec("companion", (i, j, e.param), subs))
    return out


def wheel_violations(F: ShuffleElement, chained: bool = True, companion: bool = True) -> list[str]:
    bad = []
    for spec in wheel_specializations(F.quiver, F.hdeg, chained, companion):
        if not F.poly.subs(dict(spec.substitution)).is_zero():
            bad.append(spec.describe())
    return bad


def wheel_check(F: ShuffleElement, chained: bool = True, companion: bool = True) -> bool:
    """True iff F vanishes on every enabled wheel specialization."""
    return not wheel_violations(F, chained, companion)


# ---------------------------------------------------------------- shift and slopes


def shift(F: ShuffleElement, k: DimVector) -> ShuffleElement:
    """Multiply every z_{i,a} by z_{i,a}^{k_i} (inverse power on the negative side)."""
    k = F.quiver.dim(k)
    sign = 1 if F.side == "positive" else -1
    exps = {}
    for v, kk, n in zip(F.quiver.nodes, k, F.hdeg):
        for a in range(1, n + 1):
            exps[zvar(v, a)] = sign * kk
    return F._like(F.poly * RatFun.monomial(exps))


def _scaled(F: ShuffleElement, k: DimVector) -> RatFun:
    xi = RatFun.symbol(XI)
    values = {}
    for v, kk in zip(F.quiver.nodes, k):
        for a in range(1, kk + 1):
            values[zvar(v, a)] = xi * RatFun.symbol(zvar(v, a))
    return F.poly.subs(values)


def slope_bound(quiver: Quiver, m: Slope, n: DimVector, k: DimVector, side: str) -> Fraction:
    """Allowed growth exponent when the first k_i variables are scaled."""
    rest = tuple(a - b for a, b in zip(n, k))
    if side == "positive":
        return quiver.dot(m, k) + quiver.inner(k, rest)
    return -quiver.dot(m, k) - quiver.inner(rest, k)


def slope_violations(F: ShuffleElement, m) -> list[tuple[DimVector, float, Fraction]]:
    m = F.quiver.slope(m)
    bad = []
    for k in dims_upto(F.hdeg):
        bound = slope_bound(F.quiver, m, F.hdeg, k, F.side)
        g = _scaled(F, k)
        if F.side == "positive":
            d = xi_degree(g, XI, inf)
            if d > bound:
                bad.append((k, d, bound))
        else:
            d = xi_degree(g, XI, 0)
            if d < bound:
                bad.append((k, d, bound))
    return bad


def slope_leq(F: ShuffleElement, m) -> bool:
    """Slope bound: the scaling limits exist for every 0 <= k <= n.

    Positive side: xi -> inf growth at most m.k + <k, n-k>.  Negative side
    (the mirrored condition): xi -> 0 order at least -m.k - <n-k, k>.
    """
    return not slope_violations(F, m)


def slope_geq(G: ShuffleElement, m) -> bool:
    """Negative-half slope condition; see ``slope_leq``."""
    if G.side != "negative":
        raise IllFormedInput("slope_geq applies to negative-side elements")
    return slope_leq(G, m)


def naive_slope_eq(F: ShuffleElement, m) -> bool:
    m = F.quiver.slope(m)
    target = F.quiver.dot(m, F.hdeg)
    if F.side == "negative":
        target = -target
    if F.is_zero():
        return True
    try:
        return F.vdeg() == target
    except IllFormedInput:
        return False


def in_slope_subalgebra(F: ShuffleElement, m, chained: bool = True, companion: bool = True) -> bool:
    return slope_leq(F, m) and naive_slope_eq(F, m) and wheel_check(F, chained, companion)


# ---------------------------------------------------------------- slope subalgebra basis


@dataclass
class GradedPiece:
    quiver: Quiver
    m: Slope
    n: DimVector
    side: str
    orbits: list[tuple[tuple[int, ...], ...]]
    basis: list[ShuffleElement]
    coordinates: list[list[RatFun]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


def _exponent_window(quiver: Quiver, m: Slope, n: DimVector, side: str, pad: int) -> list[tuple[int, int]]:
    out = []
    for idx, v in enumerate(quiver.nodes):
        if n[idx] == 0:
            out.append((0, -1))
            continue
        e = quiver.unit(v)
        rest = tuple(a - b for a, b in zip(n, e))
        if side == "positive":
            lo = m[idx] - quiver.inner(rest, e)
            hi = m[idx] + quiver.inner(e, rest)
        else:
            lo = -m[idx] - quiver.inner(rest, e)
            hi = -m[idx] + quiver.inner(e, rest)
        out.append((_ceil(lo) - pad, _floor(hi) + pad))
    return out


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def candidate_orbits(quiver: Quiver, m, n: DimVector, side: str = "positive", pad: int = 0):
    """Exponent orbits (per-node descending tuples) of the right total degree in a box."""
    m = quiver.slope(m)
    n = quiver.dim(n)
    total = quiver.dot(m, n) * (1 if side == "positive" else -1)
    if Fraction(total).denominator != 1:
        return []
    total = int(total)
    window = _exponent_window(quiver, m, n, side, pad)
    per_node = []
    for (lo, hi), k in zip(window, n):
        if k == 0:
            per_node.append([()])
            continue
        per_node.append(
            [tuple(sorted(c, reverse=True)) for c in itertools.combinations_with_replacement(range(lo, hi + 1), k)]
        )
    orbits = [o for o in itertools.product(*per_node) if sum(map(sum, o)) == total]
    orbits.sort(key=lambda o: tuple(x for part in o for x in part), reverse=True)
    return orbits


def orbit_growth(orbit, k: DimVector, side: str) -> int:
    """Scaling exponent of the orbit sum when the first k_i variables of each node are scaled."""
    if side == "positive":
        return sum(sum(part[:kk]) for part, kk in zip(orbit, k))
    return sum(sum(sorted(part)[:kk]) for part, kk in zip(orbit, k))


def slope_basis(
    quiver: Quiver,
    m,
    n: DimVector,
    side: str = "positive",
    chained: bool = True,
    companion: bool = True,
    pad: int = 0,
) -> GradedPiece:
    """Echelon basis of the slope-m piece in degree n.

    The unknowns are coefficients of orbit sums in a finite exponent box.
    Slope inequalities and wheel specializations are imposed as linear
    equations; the nullspace is returned in reduced echelon form with the
    orbit order fixed by ``candidate_orbits``.
    """
    _check_side(side)
    m = quiver.slope(m)
    n = quiver.dim(n)
    orbits = candidate_orbits(quiver, m, n, side, pad)
    if not any(n):
        return GradedPiece(quiver, m, n, side, [((),) * len(n)], [unit(quiver, side)], [[ONE]])
    if not orbits:
        return GradedPiece(quiver, m, n, side, [], [], [])
    ncols = len(orbits)
    rows: list[list[RatFun]] = []
    # slope inequalities: an orbit whose scaling exponent exceeds the bound must vanish
    for k in dims_upto(n):
        bound = slope_bound(quiver, m, n, k, side)
        for c, orb in enumerate(orbits):
            g = orbit_growth(orb, k, side)
            if (side == "positive" and g > bound) or (side == "negative" and g < bound):
                row = [ZERO] * ncols
                row[c] = ONE
                rows.append(row)
    sym = [monomial_symmetric(quiver, o) for o in orbits]
    specs = wheel_specializations(quiver, n, chained, companion)
    for spec in specs:
        subs = dict(spec.substitution)
        remaining = [name for name in (nm for _, nm in zvars(quiver, n)) if name not in subs]
        images = [laurent_terms(f.subs(subs), remaining) for f in sym]
        monos = sorted({e for img in images for e in img})
        for mono in monos:
            rows.append([img.get(mono, ZERO) for img in images])
    vectors = nullspace(rows, ncols) if rows else [[ONE if i == j else ZERO for j in range(ncols)] for i in range(ncols)]
    basis = []
    for v in vectors:
        poly = ZERO
        for c, f in zip(v, sym):
            if not c.is_zero():
                poly = poly + c * f
        basis.append(ShuffleElement(quiver, n, poly, side))
    return GradedPiece(quiver, m, n, side, orbits, basis, vectors)


def coordinates_in(piece: GradedPiece, F: ShuffleElement) -> list[RatFun] | None:
    """Coefficients of F in the basis of ``piece`` (None if F is outside the span)."""
    from .exactalg import solve

    if not piece.basis:
        return [] if F.is_zero() else None
    names = F.names
    cols = [laurent_terms(b.poly, names) for b in piece.basis]
    target = laurent_terms(F.poly, names)
    monos = sorted(set(target) | {e for c in cols for e in c})
    rows = [[c.get(e, ZERO) for c in cols] for e in monos]
    rhs = [target.get(e, ZERO) for e in monos]
    return solve(rows, rhs)


# ---------------------------------------------------------------- quadratic relation


def quadratic_relation_sides(quiver: Quiver, i: str, j: str, a: int, b: int):
    """Both sides of the cleared quadratic relation at the coefficient of z^-a w^-b.

    e_i(z) e_j(w) zeta_ji(w/z) = e_j(w) e_i(z) zeta_ij(z/w) is multiplied by
    the product of both denominators; each side becomes a finite combination
    of products of two generators.
    """
    z, w = RatFun.symbol("zz_"), RatFun.symbol("ww_")
    lhs_fac = quiver.zeta(j, i, w / z)
    rhs_fac = quiver.zeta(i, j, z / w)
    one = lambda f: RatFun.from_polys(f.den, f.den.context().constant(1))
    clear = one(lhs_fac) * one(rhs_fac)
    names = ["zz_", "ww_"]
    total = tuple(x + y for x, y in zip(quiver.unit(i), quiver.unit(j)))
    lhs = ShuffleElement(quiver, total, ZERO)
    rhs = ShuffleElement(quiver, total, ZERO)
    for (alpha, beta), c in laurent_terms(lhs_fac * clear, names).items():
        lhs = lhs + shuffle_product(generator(quiver, i, a + alpha), generator(quiver, j, b + beta)).scale(c)
    for (alpha, beta), c in laurent_terms(rhs_fac * clear, names).items():
        rhs = rhs + shuffle_product(generator(quiver, j, b + beta), generator(quiver, i, a + alpha)).scale(c)
    return lhs, rhs


def quadratic_relation_check(quiver: Quiver, i: str, j: str, a: int, b: int, window: int = 0) -> bool:
    """Check the cleared quadratic relation for all coefficients within ``window`` of (a, b)."""
    for da in range(-window, window + 1):
        for db in range(-window, window + 1):
            lhs, rhs = quadratic_relation_sides(quiver, i, j, a + da, b + db)
            if lhs != rhs:
                return False
    return True

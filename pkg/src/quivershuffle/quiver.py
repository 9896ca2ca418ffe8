"""Quivers, dimension vectors, Euler-type pairings and the zeta kernels."""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import IllFormedInput
from .exactalg import ONE, RatFun

DimVector = tuple[int, ...]
Slope = tuple[Fraction, ...]

_PARAM = re.compile(r"^t[A-Za-z0-9_]*$")
_NODE = re.compile(r"^[A-Za-z0-9]+$")

# How an edge j -> i enters zeta_ij: "q_over_t" gives (1 - q/(t_e x)) and
# "t_over_q" gives (1 - t_e/(q x)).  The default is "t_over_q"; only with it
# do products of generators satisfy the wheel conditions.
DUAL_FACTORS = ("q_over_t", "t_over_q")


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    param: str


@dataclass(frozen=True)
class Quiver:
    """Finite quiver; every edge carries its own equivariant parameter ``t_e``."""

    nodes: tuple[str, ...]
    edges: tuple[Edge, ...] = ()
    dual_factor: str = "t_over_q"

    def __post_init__(self):
        if self.dual_factor not in DUAL_FACTORS:
            raise IllFormedInput(f"dual_factor must be one of {DUAL_FACTORS}")
        if not self.nodes:
            raise IllFormedInput("a quiver needs at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise IllFormedInput("duplicate node labels")
        for v in self.nodes:
            if not isinstance(v, str) or not _NODE.match(v):
                raise IllFormedInput(f"node labels must be alphanumeric strings, got {v!r}")
        for e in self.edges:
            if e.src not in self.nodes or e.dst not in self.nodes:
                raise IllFormedInput(f"edge {e} refers to an unknown node")
            if not _PARAM.match(e.param) or e.param == "q":
                raise IllFormedInput(f"edge parameter must look like t<label>, got {e.param!r}")

    # ---- construction and serialization

    @classmethod
    def from_json(cls, data) -> "Quiver":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            nodes = tuple(str(v) for v in data["nodes"])
            edges = tuple(Edge(str(e["src"]), str(e["dst"]), str(e["param"])) for e in data.get("edges", []))
            dual = str(data.get("dual_factor", "t_over_q"))
        except (KeyError, TypeError, AttributeError) as exc:
            raise IllFormedInput(f"malformed quiver JSON: {exc}") from exc
        return cls(nodes, edges, dual)

    def to_json(self) -> dict:
        out = {
            "nodes": list(self.nodes),
            "edges": [{"src": e.src, "dst": e.dst, "param": e.param} for e in self.edges],
        }
        if self.dual_factor != "t_over_q":
            out["dual_factor"] = self.dual_factor
        return out

    def with_dual_factor(self, dual_factor: str) -> "Quiver":
        return Quiver(self.nodes, self.edges, dual_factor)

    @cached_property
    def hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    # ---- combinatorics

    def index(self, node: str) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise IllFormedInput(f"unknown node {node!r}") from None

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        n = len(self.nodes)
        mat = [[0] * n for _ in range(n)]
        for e in self.edges:
            mat[self.index(e.src)][self.index(e.dst)] += 1
        return tuple(tuple(r) for r in mat)

    def edges_between(self, i: str, j: str) -> list[Edge]:
        """Edges with source ``i`` and target ``j``."""
        return [e for e in self.edges if e.src == i and e.dst == j]

    def params(self) -> tuple[str, ...]:
        return tuple(sorted({e.param for e in self.edges}))

    def dim(self, d: Mapping[str, int] | Sequence[int] | None = None, **kw) -> DimVector:
        """Dimension vector aligned with ``nodes`` from a mapping or sequence."""
        if d is None:
            d = kw
        if isinstance(d, Mapping):
            unknown = set(d) - set(self.nodes)
            if unknown:
                raise IllFormedInput(f"unknown nodes {sorted(unknown)}")
            return tuple(int(d.get(v, 0)) for v in self.nodes)
        d = tuple(int(x) for x in d)
        if len(d) != len(self.nodes):
            raise IllFormedInput("dimension vector has the wrong length")
        return d

    def unit(self, node: str) -> DimVector:
        v = [0] * len(self.nodes)
        v[self.index(node)] = 1
        return tuple(v)

    def slope(self, m) -> Slope:
        if isinstance(m, (int, Fraction)):
            return tuple(Fraction(m) for _ in self.nodes)
        if isinstance(m, Mapping):
            return tuple(Fraction(m.get(v, 0)) for v in self.nodes)
        m = tuple(Fraction(x) for x in m)
        if len(m) != len(self.nodes):
            raise IllFormedInput("slope has the wrong length")
        return m

    def inner(self, a: Sequence[int], b: Sequence[int]) -> int:
        """Sum over edges i -> j of a_i * b_j."""
        adj = self.adjacency
        n = len(self.nodes)
        return sum(a[i] * b[j] * adj[i][j] for i in range(n) for j in range(n))

    @staticmethod
    def dot(a: Sequence, b: Sequence):
        return sum(x * y for x, y in zip(a, b))

    # ---- kernels

    def _symbols(self, names: Iterable[str]) -> dict[str, RatFun]:
        return {p: RatFun.symbol(p) for p in names}

    def zeta(self, i: str, j: str, x: RatFun | None = None) -> RatFun:
        """zeta_ij evaluated at ``x`` (the symbol ``x`` when omitted)."""
        x = RatFun.symbol("x") if x is None else RatFun.coerce(x)
        q = RatFun.symbol("q")
        out = ONE
        if i == j:
            out = (1 - x / q) / (1 - x)
        for e in self.edges_between(i, j):
            out = out * (1 - RatFun.symbol(e.param) * x)
        for e in self.edges_between(j, i):
            t = RatFun.symbol(e.param)
            out = out * (1 - q / (t * x) if self.dual_factor == "q_over_t" else 1 - t / (q * x))
        return out

    def zeta_tilde(self, i: str, j: str, x: RatFun | None = None) -> RatFun:
        """zeta_ij divided, on the diagonal, by (1 - x/q)(1 - 1/(q x))."""
        x = RatFun.symbol("x") if x is None else RatFun.coerce(x)
        out = self.zeta(i, j, x)
        if i == j:
            q = RatFun.symbol("q")
            out = out / ((1 - x / q) * (1 - 1 / (q * x)))
        return out

    def gamma(self, i: str) -> RatFun:
        q = RatFun.symbol("q")
        out = 1 / (1 - 1 / q)
        for e in self.edges_between(i, i):
            t = RatFun.symbol(e.param)
            out = out * (1 - t) * (1 - q / t)
        return out

    def zeta_alphabet(
        self,
        Z: Sequence[tuple[str, RatFun]],
        X: Sequence[tuple[str, RatFun]] | None = None,
        kernel: str = "zeta",
    ) -> RatFun:
        """Product of kernels over pairs of colored variables.

        ``Z`` and ``X`` are sequences of (node, value).  With ``X`` omitted the
        product runs over ordered pairs of distinct entries of ``Z``.  Kernels:
        ``zeta``, ``tilde`` and ``tilde_diag`` (zeta with only the factor
        (1 - x/q) removed on the diagonal).
        """
        same = X is None
        X = Z if same else X
        q = RatFun.symbol("q")
        out = ONE
        for a, (i, za) in enumerate(Z):
            for b, (j, xb) in enumerate(X):
                if same and a == b:
                    continue
                x = RatFun.coerce(za) / RatFun.coerce(xb)
                if kernel == "zeta":
                    out = out * self.zeta(i, j, x)
                elif kernel == "tilde":
                    out = out * self.zeta_tilde(i, j, x)
                elif kernel == "tilde_diag":
                    val = self.zeta(i, j, x)
                    if i == j:
                        val = val / (1 - x / q)
                    out = out * val
                else:
                    raise IllFormedInput(f"unknown kernel {kernel!r}")
        return out


def A1() -> Quiver:
    return Quiver(("1",))


def jordan(param: str = "t", dual_factor: str = "t_over_q") -> Quiver:
    return Quiver(("1",), (Edge("1", "1", param),), dual_factor)


def a2(dual_factor: str = "t_over_q") -> Quiver:
    return Quiver(("1", "2"), (Edge("1", "2", "t1"),), dual_factor)


def kronecker(dual_factor: str = "t_over_q") -> Quiver:
    return Quiver(("1", "2"), (Edge("1", "2", "t1"), Edge("1", "2", "t2")), dual_factor)


def cyclic(n: int, dual_factor: str = "t_over_q") -> Quiver:
    nodes = tuple(str(k) for k in range(1, n + 1))
    edges = tuple(Edge(nodes[k], nodes[(k + 1) % n], f"t{k + 1}") for k in range(n))
    return Quiver(nodes, edges, dual_factor)


NAMED = {"A1": A1, "jordan": jordan, "A2": a2, "kronecker": kronecker}


def named(name: str) -> Quiver:
    if name in NAMED:
        return NAMED[name]()
    m = re.match(r"^cyclic(\d+)$", name)
    if m:
        return cyclic(int(m.group(1)))
    raise IllFormedInput(f"unknown quiver name {name!r}")


def dims_upto(n: DimVector, include_zero: bool = False) -> list[DimVector]:
    """All dimension vectors 0 <= k <= n in lexicographic order."""
    out: list[DimVector] = [()]
    for top in n:
        out = [k + (x,) for k in out for x in range(top + 1)]
    if not include_zero:
        out = [k for k in out if any(k)]
    return out


def xvar(node: str, a: int) -> str:
    """Chern root symbol x_{node,a} of the tautological alphabet."""
    return f"x_{node}_{a}"


def wvar(node: str, a: int) -> str:
    """Framing symbol w_{node,a}."""
    return f"w_{node}_{a}"

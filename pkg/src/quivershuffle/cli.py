"""Command-line front end: element files, tensor files and verification suites.

Every verb writes JSON (to ``--output`` or stdout) and a short human-readable
report (to stdout, and to ``--report`` when given).  Rationals are written as
strings, slopes as comma-separated exact rationals in node order.
"""
from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from . import geom, hopf
from .errors import IllFormedInput, NotInShuffleAlgebra, ParseError, QuiverShuffleError
from .exactalg import MAX_TERMS_ENV, ONE, ZERO, RatFun, format_ratfun, parse_coefficient, var_key
from .quiver import DimVector, Quiver, dims_upto, named
from .shuffle import (
    ShuffleElement,
    generator,
    in_slope_subalgebra,
    laurent_terms,
    monomial_symmetric,
    naive_slope_eq,
    shift,
    slope_basis,
    slope_leq,
    wheel_violations,
    zvar,
)

# ---------------------------------------------------------------- parsing helpers


def parse_slope(text: str, quiver: Quiver) -> tuple[Fraction, ...]:
    """Comma-separated exact rationals; a single entry is used for every node."""
    parts = [p.strip() for p in str(text).split(",")]
    out = []
    pos = 0
    for p in parts:
        if not p or any(c in p for c in ".eE"):
            raise ParseError("slope entries must be integers or p/q", text, pos)
        try:
            out.append(Fraction(p))
        except (ValueError, ZeroDivisionError):
            raise ParseError("bad rational", text, pos) from None
        pos += len(p) + 1
    if len(out) == 1:
        out = out * len(quiver.nodes)
    return quiver.slope(out)


def parse_dim(text: str, quiver: Quiver) -> DimVector:
    parts = [p.strip() for p in str(text).split(",")]
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise ParseError("dimension vectors are comma-separated integers", str(text), 0) from None
    if len(vals) == 1 and len(quiver.nodes) > 1:
        vals = vals * len(quiver.nodes)
    return quiver.dim(vals)


def fmt_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_slope(m: Sequence[Fraction]) -> str:
    return ",".join(fmt_fraction(x) for x in m)


def load_quiver(source) -> Quiver:
    """A quiver from a JSON object, a path to a JSON file, or a built-in name."""
    if isinstance(source, Quiver):
        return source
    if isinstance(source, dict):
        return Quiver.from_json(source)
    if isinstance(source, str):
        path = Path(source)
        if path.exists():
            return Quiver.from_json(_read_json(path))
        return named(source)
    raise IllFormedInput(f"cannot interpret quiver {source!r}")


def _read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- elements


def _poly_to_json(poly: RatFun, names: Sequence[str]) -> list[dict]:
    terms = laurent_terms(poly, names)
    out = []
    for exps in sorted(terms, reverse=True):
        mono = {n: e for n, e in zip(names, exps) if e}
        out.append({"coeff": format_ratfun(terms[exps]), "exps": dict(sorted(mono.items(), key=lambda kv: var_key(kv[0])))})
    return out


def _poly_from_json(data, allowed: set[str], where: str) -> RatFun:
    if not isinstance(data, list):
        raise IllFormedInput(f"{where}: 'poly' must be a list of terms")
    acc = ZERO
    for idx, term in enumerate(data):
        try:
            coeff = parse_coefficient(str(term["coeff"]))
            exps = term.get("exps", {})
        except (KeyError, TypeError) as exc:
            raise IllFormedInput(f"{where}: term {idx} is malformed ({exc})") from None
        except ParseError as exc:
            raise ParseError(f"{where}: term {idx}: {exc}") from None
        for name, e in exps.items():
            if name not in allowed:
                raise IllFormedInput(f"{where}: term {idx} uses unknown variable {name!r}")
            if not isinstance(e, int):
                raise IllFormedInput(f"{where}: term {idx} exponent of {name} must be an integer")
        acc = acc + coeff * RatFun.monomial(exps)
    return acc


def element_to_json(F: ShuffleElement) -> dict:
    return {
        "quiver": F.quiver.to_json(),
        "side": F.side,
        "hdeg": dict(zip(F.quiver.nodes, F.hdeg)),
        "poly": _poly_to_json(F.poly, F.names),
    }


def element_from_json(data, quiver: Quiver | None = None, where: str = "element") -> ShuffleElement:
    if not isinstance(data, dict):
        raise IllFormedInput(f"{where}: expected a JSON object")
    try:
        Q = load_quiver(data["quiver"]) if "quiver" in data else quiver
        if Q is None:
            raise IllFormedInput(f"{where}: no quiver given")
        hdeg = Q.dim(data["hdeg"])
        side = data.get("side", "positive")
        names = [zvar(v, a) for v, k in zip(Q.nodes, hdeg) for a in range(1, k + 1)]
        poly = _poly_from_json(data["poly"], set(names), where)
    except KeyError as exc:
        raise IllFormedInput(f"{where}: missing field {exc}") from None
    F = ShuffleElement(Q, hdeg, poly, side)
    if not F.is_symmetric():
        raise NotInShuffleAlgebra(f"{where}: polynomial is not symmetric within colors")
    return F


def load_element(path, quiver: Quiver | None = None) -> ShuffleElement:
    return element_from_json(_read_json(path), quiver, str(path))


# ---------------------------------------------------------------- tensors


def _leg_to_json(word: hopf.CartanWord, n: DimVector, quiver: Quiver) -> dict:
    return {"hdeg": dict(zip(quiver.nodes, n)), "cartan": word.to_json()}


def _leg_from_json(d, quiver: Quiver) -> tuple[hopf.CartanWord, DimVector]:
    return hopf.CartanWord.from_json(d.get("cartan", [])), quiver.dim(d["hdeg"])


def tensor_to_json(T: hopf.TensorElement) -> dict:
    out = {"quiver": T.quiver.to_json(), "sides": list(T.sides), "order": T.order}
    if T.prefactor:
        out["prefactor"] = T.prefactor
    terms = []
    for key, poly in T.terms.items():
        names = [n for leg in range(T.legs) for n in T.leg_names(key, leg)]
        legs = [_leg_to_json(c, n, T.quiver) for c, n in key]
        entry = {"left": legs[0], "right": legs[1]} if T.legs == 2 else {"legs": legs}
        entry["poly"] = _poly_to_json(poly, names)
        terms.append(entry)
    out["terms"] = terms
    return out


def tensor_from_json(data, where: str = "tensor") -> hopf.TensorElement:
    try:
        Q = load_quiver(data["quiver"])
        sides = tuple(data["sides"])
        terms = {}
        for idx, entry in enumerate(data["terms"]):
            legs = [entry["left"], entry["right"]] if "left" in entry else entry["legs"]
            key = tuple(_leg_from_json(d, Q) for d in legs)
            names = {n for leg, (_, n) in enumerate(key) for g in hopf.leg_groups(Q, leg, n) for n in g}
            poly = _poly_from_json(entry["poly"], names, f"{where} term {idx}")
            terms[key] = terms.get(key, ZERO) + poly
        return hopf.TensorElement(Q, sides, terms, data.get("order"), data.get("prefactor"))
    except (KeyError, TypeError) as exc:
        raise IllFormedInput(f"{where}: malformed tensor ({exc})") from None


# ---------------------------------------------------------------- reports


def meta(quiver: Quiver, seed: int | None) -> dict:
    return {"version": __version__, "quiver_hash": quiver.hash, "seed": seed}


@dataclass
class Outcome:
    """What a verb produced: a JSON payload, report lines and an exit status."""

    payload: dict
    lines: list[str] = field(default_factory=list)
    status: int = 0


# ---------------------------------------------------------------- random elements


def random_coefficient(rng: random.Random, quiver: Quiver) -> RatFun:
    pool = [RatFun.symbol("q")] + [RatFun.symbol(p) for p in quiver.params()]
    c = RatFun.coerce(rng.choice([-2, -1, 1, 2, 3]))
    if rng.random() < 0.3:
        c = c * rng.choice(pool)
    return c


def random_element(
    rng: random.Random, quiver: Quiver, hdeg: DimVector, lo: int = -2, hi: int = 2, side: str = "positive"
) -> ShuffleElement:
    """Random symmetric Laurent polynomial with exponents in [lo, hi] (1 to 3 orbit sums)."""
    poly = ZERO
    while poly.is_zero():
        for _ in range(rng.randint(1, 3)):
            orbit = tuple(tuple(sorted((rng.randint(lo, hi) for _ in range(k)), reverse=True)) for k in hdeg)
            poly = poly + random_coefficient(rng, quiver) * monomial_symmetric(quiver, orbit)
    return ShuffleElement(quiver, hdeg, poly, side)


def _random_hdegs(rng: random.Random, quiver: Quiver, count: int, total: int) -> list[DimVector]:
    """``count`` nonzero dimension vectors with entry sum ``total`` overall."""
    sizes = [1] * count
    for _ in range(total - count):
        sizes[rng.randrange(count)] += 1
    out = []
    for s in sizes:
        v = [0] * len(quiver.nodes)
        for _ in range(s):
            v[rng.randrange(len(v))] += 1
        out.append(tuple(v))
    return out


# ---------------------------------------------------------------- verification suites


@dataclass
class SuiteResult:
    name: str
    ok: bool
    cases: int
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    lines: list[str] = field(default_factory=list)


def _failure(label: str, elements: dict[str, ShuffleElement], **extra) -> dict:
    return {"label": label, "elements": {k: element_to_json(v) for k, v in elements.items()}, **extra}


def suite_associativity(quiver: Quiver, seed: int, cases: int = 100, total: int = 3) -> SuiteResult:
    rng = random.Random(seed)
    failures = []
    poles = 0
    for c in range(cases):
        hs = _random_hdegs(rng, quiver, 3, total)
        A, B, C = (random_element(rng, quiver, h) for h in hs)
        AB, BC = A * B, B * C
        for P in (AB, BC):
            if not P.poly.denominator_is_monomial_in(P.names):
                poles += 1
        if AB * C != A * BC:
            failures.append(_failure(f"case {c}", {"A": A, "B": B, "C": C}))
    ok = not failures and poles == 0
    lines = [f"associativity: {cases} random triples, total hdeg {total}, {len(failures)} failures, {poles} pole leaks"]
    return SuiteResult("associativity", ok, cases, failures, {"pole_leaks": poles}, lines)


def generator_products(quiver: Quiver, max_len: int = 3, max_exp: int = 2, side: str = "positive"):
    letters = [(v, d) for v in quiver.nodes for d in range(-max_exp, max_exp + 1)]
    for length in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=length):
            yield w, hopf._word_cached(quiver, tuple(w), side)


def suite_wheel_closure(quiver: Quiver, seed: int, max_len: int = 3, max_exp: int = 2) -> SuiteResult:
    failures = []
    n = 0
    for w, F in generator_products(quiver, max_len, max_exp):
        n += 1
        bad = wheel_violations(F)
        if bad:
            failures.append(_failure(" * ".join(f"e[{v},{d}]" for v, d in w), {"F": F}, violations=bad))
    lines = [f"wheel-closure: {n} products of <= {max_len} generators, {len(failures)} failures"]
    return SuiteResult("wheel-closure", not failures, n, failures, {}, lines)


def suite_slope_closure(quiver: Quiver, seed: int, m=0, cutoff: DimVector | None = None) -> SuiteResult:
    m = quiver.slope(m)
    cutoff = cutoff or tuple(2 for _ in quiver.nodes)
    failures = []
    dims = {}
    n_cases = 0
    for n in dims_upto(cutoff):
        for side in ("positive", "negative"):
            piece = slope_basis(quiver, m, n, side)
            again = slope_basis(quiver, m, n, side)
            dims[f"{side} {','.join(map(str, n))}"] = piece.dim
            if again.dim != piece.dim or any(a != b for a, b in zip(again.basis, piece.basis)):
                failures.append({"label": f"re-enumeration of {side} {n} differs"})
            for idx, F in enumerate(piece.basis):
                n_cases += 1
                checks = {
                    "slope": slope_leq(F, m) if side == "positive" else in_slope_subalgebra(F, m),
                    "naive": naive_slope_eq(F, m),
                    "wheel": not wheel_violations(F),
                }
                if not all(checks.values()):
                    failures.append(_failure(f"{side} {n} member {idx}", {"F": F}, checks=checks))
    report: dict = {}
    gen = hopf.primitives_generate(quiver, m, cutoff, "positive", report)
    if not gen:
        failures.append({"label": "primitives do not generate", "details": report})
    lines = [f"slope-closure: m = {fmt_slope(m)}, {n_cases} basis members, {len(failures)} failures"]
    lines += [f"  dim {k}: {v}" for k, v in dims.items()]
    lines.append(f"  primitives generate: {gen}")
    return SuiteResult("slope-closure", not failures, n_cases, failures, {"dims": dims, "primitives": report}, lines)


def suite_pairing(quiver: Quiver, seed: int, bound: int = 3) -> SuiteResult:
    failures = []
    n = 0
    for i in quiver.nodes:
        for j in quiver.nodes:
            for d in range(-bound, bound + 1):
                for k in range(-bound, bound + 1):
                    n += 1
                    E = generator(quiver, i, d)
                    F = generator(quiver, j, k, "negative")
                    expected = quiver.gamma(i) if (i == j and d + k == 0) else ZERO
                    got_f, got_e = hopf.pair_both_routes(E, F)
                    if got_f != expected or got_e != expected:
                        failures.append(
                            _failure(
                                f"<e[{i},{d}], f[{j},{k}]>",
                                {"E": E, "F": F},
                                expected=format_ratfun(expected),
                                f_route=format_ratfun(got_f),
                                e_route=format_ratfun(got_e),
                            )
                        )
    lines = [f"pairing: {n} generator pairs, {len(failures)} failures"]
    for i in quiver.nodes:
        val = hopf.pair(generator(quiver, i, 0), generator(quiver, i, 0, "negative"))
        lines.append(f"  <e[{i},0], f[{i},0]> = {format_ratfun(val)}  (gamma = {format_ratfun(quiver.gamma(i))})")
    return SuiteResult("pairing", not failures, n, failures, {}, lines)


def bialgebra_triples(rng: random.Random, quiver: Quiver, count: int, max_exp: int = 1):
    """Grading-compatible triples (F, G, H): F, G generators, H a random combination of f-words."""
    out = []
    nodes = quiver.nodes
    while len(out) < count:
        i, j = rng.choice(nodes), rng.choice(nodes)
        a, b = rng.randint(-max_exp, max_exp), rng.randint(-max_exp, max_exp)
        F, G = generator(quiver, i, a), generator(quiver, j, b)
        letters = [(i, None), (j, None)]
        H = None
        for _ in range(rng.randint(1, 2)):
            c = rng.randint(-max_exp, max_exp)
            order = letters if rng.random() < 0.5 else letters[::-1]
            w = ((order[0][0], c), (order[1][0], -(a + b) - c))
            term = hopf._word_cached(quiver, w, "negative").scale(random_coefficient(rng, quiver))
            H = term if H is None else H + term
        if H.is_zero():
            continue
        out.append((F, G, H))
    return out


def suite_hopf(quiver: Quiver, seed: int, cases: int = 50, m=0, cutoff: DimVector | None = None) -> SuiteResult:
    rng = random.Random(seed)
    m = quiver.slope(m)
    cutoff = cutoff or tuple(2 for _ in quiver.nodes)
    failures = []
    n = 0
    for idx, (F, G, H) in enumerate(bialgebra_triples(rng, quiver, cases)):
        n += 1
        if not hopf.bialgebra_check(F, G, H):
            failures.append(_failure(f"bialgebra triple {idx}", {"F": F, "G": G, "H": H}))
    slope_cases = 0
    for dims in dims_upto(cutoff):
        for side in ("positive", "negative"):
            for k, E in enumerate(slope_basis(quiver, m, dims, side).basis):
                slope_cases += 1
                D = hopf.coproduct_slope(E, m)
                checks = {"membership": hopf.membership_check(D, m), "coassoc": hopf.coassoc_check(E, m)}
                if side == "positive":
                    checks["right_leg_bound"] = hopf.right_leg_vdeg_bound(E, m, 2 + sum(dims))
                if not all(checks.values()):
                    failures.append(_failure(f"{side} {dims} member {k}", {"F": E}, checks=checks))
    qt: dict = {}
    qt_ok = hopf.quasi_triangularity_check(quiver, m, cutoff, report=qt)
    if not qt_ok:
        failures.append({"label": "quasi-triangularity", "details": qt})
    lines = [
        f"hopf: {n} bialgebra triples, {slope_cases} slope-basis coproducts, {len(failures)} failures",
        f"  quasi-triangularity at m = {fmt_slope(m)}, cutoff {cutoff}: {qt_ok}",
    ]
    return SuiteResult("hopf", not failures, n + slope_cases + 1, failures, {"quasi_triangularity": qt}, lines)


def intertwine_configurations(quiver: Quiver, max_v: int = 2, max_w: int = 2, max_word: int = 2):
    """Every (i, v1, v2, w1, w2, p1, p2) with |v1| + |v2| <= max_v, w's <= max_w, word degrees <= max_word."""
    vs = dims_upto(tuple(max_v for _ in quiver.nodes), include_zero=True)
    ws = dims_upto(tuple(max_w for _ in quiver.nodes), include_zero=True)
    words = geom.power_sum_words(quiver, max_word)
    for v1, v2 in itertools.product(vs, vs):
        if sum(v1) + sum(v2) > max_v:
            continue
        for w1, w2 in itertools.product(ws, ws):
            for p1, p2 in itertools.product(words, words):
                for i in quiver.nodes:
                    yield i, v1, v2, w1, w2, p1, p2


def suite_intertwine(
    quiver: Quiver, seed: int, max_v: int = 2, max_w: int = 2, max_word: int = 2, include_f: bool = False,
    reading: str = "distinguished",
) -> SuiteResult:
    failures = []
    n = 0
    for i, v1, v2, w1, w2, p1, p2 in intertwine_configurations(quiver, max_v, max_w, max_word):
        for r in geom.intertwine_check(quiver, i, v1, v2, w1, w2, p1, p2, reading, True, include_f):
            n += 1
            if not r.ok:
                failures.append(
                    {
                        "label": r.label,
                        "config": {"i": i, "v1": v1, "v2": v2, "w1": w1, "w2": w2, "p1": str(p1), "p2": str(p2)},
                        "difference": format_ratfun(r.difference),
                    }
                )
    lines = [f"intertwine: {n} identities ({reading} reading), {len(failures)} failures"]
    return SuiteResult("intertwine", not failures, n, failures, {"reading": reading}, lines)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "associativity": suite_associativity,
    "wheel-closure": suite_wheel_closure,
    "slope-closure": suite_slope_closure,
    "pairing": suite_pairing,
    "hopf": suite_hopf,
    "intertwine": suite_intertwine,
}


# ---------------------------------------------------------------- verbs


def _elements_quiver(args) -> Quiver | None:
    return load_quiver(args.quiver) if getattr(args, "quiver", None) else None


def cmd_product(args) -> Outcome:
    Q = _elements_quiver(args)
    A, B = load_element(args.a, Q), load_element(args.b, Q)
    C = A * B
    return Outcome(element_to_json(C), [f"product: hdeg {A.hdeg} + {B.hdeg} = {C.hdeg}, {len(C.terms())} monomials"])


def cmd_shift(args) -> Outcome:
    A = load_element(args.element, _elements_quiver(args))
    k = parse_dim(args.k, A.quiver)
    return Outcome(element_to_json(shift(A, k)), [f"shift by {k}"])


def cmd_wheel(args) -> Outcome:
    A = load_element(args.element, _elements_quiver(args))
    bad = wheel_violations(A, not args.no_chained, not args.no_companion)
    payload = {"meta": meta(A.quiver, None), "wheel": not bad, "violations": bad}
    lines = ["wheel: PASS" if not bad else "wheel: FAIL"] + [f"  {b}" for b in bad]
    return Outcome(payload, lines, 0 if not bad else 1)


def cmd_slope_test(args) -> Outcome:
    A = load_element(args.element, _elements_quiver(args))
    m = parse_slope(args.m, A.quiver)
    res = {
        "slope_leq": slope_leq(A, m),
        "naive_slope_eq": naive_slope_eq(A, m),
        "wheel": not wheel_violations(A),
        "in_slope_subalgebra": in_slope_subalgebra(A, m),
    }
    payload = {"meta": meta(A.quiver, None), "m": fmt_slope(m), **res}
    lines = [f"slope-test at m = {fmt_slope(m)}"] + [f"  {k}: {v}" for k, v in res.items()]
    return Outcome(payload, lines)


def cmd_basis(args) -> Outcome:
    Q = load_quiver(args.quiver)
    m = parse_slope(args.m, Q)
    n = parse_dim(args.n, Q)
    piece = slope_basis(Q, m, n, args.side)
    payload = {
        "meta": meta(Q, None),
        "m": fmt_slope(m),
        "n": dict(zip(Q.nodes, n)),
        "side": args.side,
        "dim": piece.dim,
        "orbits": [[list(part) for part in o] for o in piece.orbits],
        "coordinates": [[format_ratfun(c) for c in row] for row in piece.coordinates],
        "basis": [element_to_json(F) for F in piece.basis],
    }
    return Outcome(payload, [f"basis: m = {fmt_slope(m)}, n = {n}, side {args.side}, dim {piece.dim}"])


def cmd_coproduct(args) -> Outcome:
    A = load_element(args.element, _elements_quiver(args))
    if args.slope is not None:
        m = parse_slope(args.slope, A.quiver)
        T = hopf.coproduct_slope(A, m)
        label = f"slope coproduct at m = {fmt_slope(m)}"
    else:
        T = hopf.coproduct_full(A, args.order)
        label = f"full coproduct to order {args.order}"
    return Outcome(tensor_to_json(T), [f"coproduct: {label}, {len(T.terms)} summands"])


def cmd_pair(args) -> Outcome:
    Q = _elements_quiver(args)
    A, B = load_element(args.a, Q), load_element(args.b, Q)
    if A.side == "negative" and B.side == "positive":
        A, B = B, A
    val_f, val_e = hopf.pair_both_routes(A, B)
    payload = {"meta": meta(A.quiver, None), "value": format_ratfun(val_f), "e_route": format_ratfun(val_e),
               "routes_agree": val_f == val_e}
    status = 0 if val_f == val_e else 1
    return Outcome(payload, [f"pair: {format_ratfun(val_f)}", f"  routes agree: {val_f == val_e}"], status)


def cmd_gram(args) -> Outcome:
    Q = load_quiver(args.quiver)
    m = parse_slope(args.m, Q)
    n = parse_dim(args.n, Q)
    table = hopf.gram_and_dual(Q, m, n, args.route)
    payload = {
        "meta": meta(Q, None),
        "m": fmt_slope(m),
        "n": dict(zip(Q.nodes, n)),
        "gram": [[format_ratfun(x) for x in row] for row in table.gram],
        "positive": [element_to_json(F) for F in table.positive.basis],
        "negative": [element_to_json(F) for F in table.negative.basis],
        "dual": [element_to_json(F) for F in table.dual],
    }
    lines = [f"gram: m = {fmt_slope(m)}, n = {n}, dim {table.dim}"]
    lines += ["  [" + ", ".join(format_ratfun(x) for x in row) + "]" for row in table.gram]
    return Outcome(payload, lines)


def cmd_rmatrix(args) -> Outcome:
    Q = load_quiver(args.quiver)
    m = parse_slope(args.m, Q)
    cutoff = parse_dim(args.cutoff, Q)
    R = hopf.rmatrix(Q, m, cutoff)
    payload = tensor_to_json(R)
    payload["meta"] = meta(Q, None)
    return Outcome(payload, [f"rmatrix: m = {fmt_slope(m)}, cutoff {cutoff}, {len(R.terms)} summands", f"  prefactor {R.prefactor}"])


def cmd_intertwine(args) -> Outcome:
    Q = load_quiver(args.quiver)
    dims = {k: parse_dim(getattr(args, k), Q) for k in ("v1", "v2", "w1", "w2")}
    p1 = geom.parse_power_sum_word(args.p1, Q)
    p2 = geom.parse_power_sum_word(args.p2, Q)
    results = geom.intertwine_check(
        Q, args.i, dims["v1"], dims["v2"], dims["w1"], dims["w2"], p1, p2, args.reading, True, args.include_f
    )
    ok = all(r.ok for r in results)
    lines = ["PASS" if ok else "FAIL"]
    out = []
    for r in results:
        entry = {"label": r.label, "ok": r.ok}
        lines.append(f"  {r.label}: {'PASS' if r.ok else 'FAIL'}")
        if not r.ok:
            entry["difference"] = format_ratfun(r.difference)
            lines.append(f"    difference: {entry['difference']}")
        out.append(entry)
    payload = {
        "meta": meta(Q, None),
        "config": {"i": args.i, **{k: list(v) for k, v in dims.items()}, "p1": str(p1), "p2": str(p2)},
        "reading": args.reading,
        "ok": ok,
        "results": out,
    }
    return Outcome(payload, lines, 0 if ok else 1)


def cmd_verify(args) -> Outcome:
    Q = load_quiver(args.quiver)
    kwargs = {}
    if args.cases is not None and args.suite in ("associativity", "hopf"):
        kwargs["cases"] = args.cases
    if args.m is not None and args.suite in ("slope-closure", "hopf"):
        kwargs["m"] = parse_slope(args.m, Q)
    if args.cutoff is not None and args.suite in ("slope-closure", "hopf"):
        kwargs["cutoff"] = parse_dim(args.cutoff, Q)
    if args.suite == "intertwine":
        kwargs["include_f"] = args.include_f
    res = SUITES[args.suite](Q, args.seed, **kwargs)
    lines = [f"{res.name}: {'PASS' if res.ok else 'FAIL'} ({res.cases} cases)"] + res.lines
    dumped = []
    if res.failures and args.dump_dir:
        dump = Path(args.dump_dir)
        dump.mkdir(parents=True, exist_ok=True)
        for idx, fail in enumerate(res.failures):
            for role, data in fail.get("elements", {}).items():
                path = dump / f"{res.name}_{idx:03d}_{role}.json"
                path.write_text(dumps(data))
                dumped.append(str(path))
        lines.append(f"  counterexamples written to {dump}")
    payload = {
        "meta": meta(Q, args.seed),
        "suite": res.name,
        "ok": res.ok,
        "cases": res.cases,
        "details": res.details,
        "failures": res.failures,
        "dumped": dumped,
    }
    return Outcome(payload, lines, 0 if res.ok else 1)


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quivershuffle", description="Exact shuffle-algebra computations for quivers.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, quiver_required=False):
        sp.add_argument("--quiver", required=quiver_required, help="quiver JSON file or built-in name")
        sp.add_argument("-o", "--output", help="write the JSON result here (default: stdout)")
        sp.add_argument("--report", help="also write the human-readable report here")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--max-series-terms", type=int, help=f"cap for series expansions (sets {MAX_TERMS_ENV})")

    sp = sub.add_parser("product", help="shuffle product of two element files")
    sp.add_argument("a")
    sp.add_argument("b")
    common(sp)
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("shift", help="shift automorphism")
    sp.add_argument("element")
    sp.add_argument("--k", required=True, help="shift vector, comma-separated")
    common(sp)
    sp.set_defaults(func=cmd_shift)

    sp = sub.add_parser("wheel", help="wheel conditions of an element")
    sp.add_argument("element")
    sp.add_argument("--no-chained", action="store_true")
    sp.add_argument("--no-companion", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_wheel)

    sp = sub.add_parser("slope-test", help="slope, naive slope and subalgebra membership")
    sp.add_argument("element")
    sp.add_argument("--m", required=True)
    common(sp)
    sp.set_defaults(func=cmd_slope_test)

    sp = sub.add_parser("basis", help="echelon basis of a slope piece")
    sp.add_argument("--m", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--side", choices=("positive", "negative"), default="positive")
    common(sp, True)
    sp.set_defaults(func=cmd_basis)

    sp = sub.add_parser("coproduct", help="full (truncated) or slope coproduct")
    sp.add_argument("element")
    grp = sp.add_mutually_exclusive_group(required=True)
    grp.add_argument("--full", action="store_true")
    grp.add_argument("--slope", help="slope vector")
    sp.add_argument("--order", type=int, default=2)
    common(sp)
    sp.set_defaults(func=cmd_coproduct)

    sp = sub.add_parser("pair", help="Hopf pairing of a positive and a negative element")
    sp.add_argument("a")
    sp.add_argument("b")
    common(sp)
    sp.set_defaults(func=cmd_pair)

    sp = sub.add_parser("gram", help="Gram matrix and dual basis of a slope piece")
    sp.add_argument("--m", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--route", choices=("f", "e"), default="f")
    common(sp, True)
    sp.set_defaults(func=cmd_gram)

    sp = sub.add_parser("rmatrix", help="truncated R-matrix")
    sp.add_argument("--m", required=True)
    sp.add_argument("--cutoff", required=True)
    common(sp, True)
    sp.set_defaults(func=cmd_rmatrix)

    sp = sub.add_parser("intertwine", help="intertwining identity for one configuration")
    sp.add_argument("--i", required=True)
    for k in ("v1", "v2", "w1", "w2"):
        sp.add_argument(f"--{k}", required=True)
    sp.add_argument("--p1", default="1")
    sp.add_argument("--p2", default="1")
    sp.add_argument("--reading", choices=geom.READINGS, default="distinguished")
    sp.add_argument("--include-f", action="store_true")
    common(sp, True)
    sp.set_defaults(func=cmd_intertwine)

    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--suite", required=True, choices=sorted(SUITES))
    sp.add_argument("--cases", type=int)
    sp.add_argument("--m")
    sp.add_argument("--cutoff")
    sp.add_argument("--include-f", action="store_true")
    sp.add_argument("--dump-dir", default="counterexamples")
    common(sp, True)
    sp.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_series_terms is not None:
        os.environ[MAX_TERMS_ENV] = str(args.max_series_terms)
    try:
        out = args.func(args)
    except (QuiverShuffleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps(out.payload)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    report = "\n".join(out.lines) + "\n"
    if args.report:
        Path(args.report).write_text(report)
    (sys.stderr if not args.output else sys.stdout).write(report)
    return out.status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

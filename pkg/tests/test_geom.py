import itertools

import pytest

from quivershuffle import geom as G
from quivershuffle.errors import IllFormedInput, ParseError
from quivershuffle.exactalg import ONE, ZERO, RatFun, symbols
from quivershuffle.quiver import A1, a2, jordan

q, z, w1, w2 = symbols("q", "z", "w_1_1", "w_1_2")
x1, x2 = symbols("x_1_1", "x_1_2")
P = G.parse_power_sum_word


def swap_roots(f: RatFun, a: str, b: str) -> RatFun:
    return f.rename({a: b, b: a})


def test_power_sum_parsing():
    assert str(P("p2[1]*p1[1]")) == "p1[1]*p2[1]"
    assert P("1") == G.PowerSumWord()
    for bad in ("p0[1]", "p1[", "q1[1]", "p1[1]**p2[1]"):
        with pytest.raises(ParseError):
            P(bad)
    with pytest.raises(ParseError):
        P("p1[7]", A1())


def test_plethystic_examples():
    X = G.alphabet(A1(), (2,), (0,)).X
    Z = G.Formal.single("1", z)
    assert G.plethystic_eval(P("p1[1]"), X - Z) == x1 + x2 - z
    assert G.plethystic_eval(P("p3[1]"), G.Formal()) == ZERO
    assert G.plethystic_eval(P("p2[1]"), X + Z) - G.plethystic_eval(P("p2[1]"), X) == z**2
    with pytest.raises(IllFormedInput):
        G.plethystic_eval(P("p1[1]"), X + Z, declared=["x_1_1", "x_1_2"])


def test_wedge_examples():
    W = G.alphabet(A1(), (0,), (2,)).W("1")
    Z = G.Formal.single("1", z)
    assert G.wedge_ratio(Z, W, q) == (1 - z * q / w1) * (1 - z * q / w2)
    assert G.wedge_star(G.Formal()) == ONE
    a = G.Formal.single("1", z * q)
    assert G.wedge_star(a - a) == ONE
    assert G.wedge_star(a) == 1 - z * q


def test_stab_examples():
    Q = A1()
    assert G.stab_infty_class(Q, (0,), (0,), (0,), (0,)) == ONE
    # v' = 0: only the wedge over the second roots and the first framing survives
    got = G.stab_infty_class(Q, (0,), (2,), (1,), (1,))
    x, wa1, wa2 = symbols("x2_1_1", "wa_1_1", "wa_1_2")
    assert got == (1 - x / wa1) * (1 - x / wa2)


def test_stab_minimal_golden():
    Q = A1()
    got = G.stab_infty_class(Q, (1,), (1,), (1,), (1,))
    a, b, wa, wb = symbols("x1_1_1", "x2_1_1", "wa_1_1", "wb_1_1")
    expect = Q.zeta_tilde("1", "1", a / b) * (1 - q * a / wb) * (1 - b / wa)
    assert got == expect


@pytest.mark.parametrize("Q", [A1(), jordan(), a2()])
def test_stab_cartan_toggle(Q):
    n = len(Q.nodes)
    for v1, v2, wa, wb in [((1,) * n, (1,) * n, (1,) * n, (2,) * n), (Q.unit(Q.nodes[0]), (1,) * n, (0,) * n, (1,) * n)]:
        off = G.stab_infty_class(Q, v1, wa, v2, wb)
        on = G.stab_infty_class(Q, v1, wa, v2, wb, cartan=True)
        assert on == off * G.q_half_power(Q.dot(wb, v1) - Q.inner(v2, v1))


def test_act_e_examples():
    Q = A1()
    al = G.alphabet(Q, (0,), (2,))
    out = G.act_e(Q, "1", z, al.X, al.Wall(), G.PowerSumWord())
    assert out == (1 - z * q / w1) * (1 - z * q / w2)
    al1 = G.alphabet(Q, (1,), (1,))
    out = G.act_e(Q, "1", z, al1.X, al1.Wall(), P("p1[1]"))
    expect = Q.zeta_tilde("1", "1", z / x1) * (1 - z * q / w1) * x1
    assert out == expect


def test_act_h_examples():
    Q = jordan()
    al = G.alphabet(Q, (0,), (1,))
    c = RatFun.symbol("c")
    assert G.act_h(Q, "1", z, al.X, al.Wall(), c) == (1 - z * q / w1) / (1 - z / w1) * c
    empty = G.alphabet(Q, (0,), (0,))
    assert G.act_h(Q, "1", z, empty.X, empty.Wall(), c) == c
    al2 = G.alphabet(Q, (2,), (1,))
    once = G.act_h(Q, "1", z, al2.X, al2.Wall())
    assert G.act_h(Q, "1", z, al2.X, al2.Wall(), once) == once * once


@pytest.mark.parametrize("Q", [A1(), jordan()])
def test_actions_symmetric_in_old_roots(Q):
    al = G.alphabet(Q, (2,), (1,))
    word = P("p1[1]*p2[1]")
    out_e = G.act_e(Q, "1", z, al.X, al.Wall(), word)
    out_h = G.act_h(Q, "1", z, al.X, al.Wall(), G.plethystic_eval(word, al.X))
    for out in (out_e, out_h):
        assert swap_roots(out, "x_1_1", "x_1_2") == out


def test_intertwine_examples():
    Q = A1()
    assert all(r.ok for r in G.intertwine_check(Q, "1", (0,), (0,), (1,), (1,)))
    assert all(r.ok for r in G.intertwine_check(Q, "1", (1,), (0,), (1,), (1,), "p1[1]", "p1[1]"))
    assert all(r.ok for r in G.intertwine_check(jordan(), "1", (1,), (1,), (2,), (1,), "p2[1]", "p1[1]"))


@pytest.mark.parametrize("reading", G.READINGS)
def test_both_readings_hold(reading):
    for v1, v2 in [((1,), (0,)), ((0,), (1,)), ((1,), (1,))]:
        for r in G.intertwine_check(jordan(), "1", v1, v2, (1,), (1,), "p1[1]", "1", reading):
            assert r.ok, r.label


def test_intertwine_a2_reduced_sweep():
    Q = a2()
    words = [G.PowerSumWord(), P("p1[1]"), P("p1[2]")]
    configs = [((1, 0), (0, 0)), ((0, 1), (1, 0)), ((1, 1), (0, 0)), ((0, 0), (1, 1))]
    for (v1, v2), p1, p2, i in itertools.product(configs, words, words, Q.nodes):
        for r in G.intertwine_check(Q, i, v1, v2, (1, 0), (0, 1), p1, p2):
            assert r.ok, (r.label, v1, v2, str(p1), str(p2))


def test_f_variant_needs_inverse_wedge():
    Q = A1()
    good = G.intertwine_f(Q, "1", (1,), (1,), (1,), (1,), P("p1[1]"), G.PowerSumWord())
    bad = G.intertwine_f(Q, "1", (1,), (1,), (1,), (1,), P("p1[1]"), G.PowerSumWord(), wedge_exponent=1)
    assert good.ok and not bad.ok
    assert not bad.difference.is_zero()


def test_intertwine_result_sums():
    r = G.intertwine_e(jordan(), "1", (1,), (0,), (1,), (1,), P("p1[1]"), G.PowerSumWord())
    assert r.ok and r.lhs == r.rhs and r.difference.is_zero()


def test_bad_reading_rejected():
    with pytest.raises(IllFormedInput):
        G.intertwine_check(A1(), "1", (1,), (0,), (1,), (1,), reading="other")

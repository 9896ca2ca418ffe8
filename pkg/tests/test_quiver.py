import random

import pytest

from quivershuffle.errors import IllFormedInput
from quivershuffle.exactalg import ONE, RatFun, symbols
from quivershuffle.quiver import A1, Edge, Quiver, a2, cyclic, jordan, kronecker, named

q, t, x, z1, z2, x1 = symbols("q", "t", "x", "z1", "z2", "x1")


def test_inner_products():
    J = jordan()
    assert J.inner((1,), (1,)) == 1
    assert J.dot((1,), (1,)) == 1
    edgeless = Quiver(("1", "2"))
    assert edgeless.inner((2, 1), (3, 4)) == 0
    assert a2().inner((2, 0), (0, 3)) == 6


def test_zeta_golden_displayed_kernel():
    assert A1().zeta("1", "1") == (1 - x / q) / (1 - x)
    J = jordan(dual_factor="q_over_t")
    assert J.zeta("1", "1") == (1 - x / q) / (1 - x) * (1 - t * x) * (1 - q / (t * x))
    assert Quiver(("1", "2")).zeta("1", "2") == ONE


def test_zeta_default_kernel():
    J = jordan()
    assert J.dual_factor == "t_over_q"
    assert J.zeta("1", "1") == (1 - x / q) / (1 - x) * (1 - t * x) * (1 - t / (q * x))


def test_zeta_tilde_and_gamma():
    for Q in (A1(), jordan()):
        expect = Q.zeta("1", "1") / ((1 - x / q) * (1 - 1 / (q * x)))
        assert Q.zeta_tilde("1", "1") == expect
    assert A1().gamma("1") == 1 / (1 - 1 / q)
    assert jordan().gamma("1") == (1 - t) * (1 - q / t) / (1 - 1 / q)
    two = Quiver(("1",), (Edge("1", "1", "t1"), Edge("1", "1", "t2")))
    t1, t2 = symbols("t1", "t2")
    assert two.gamma("1") == (1 - t1) * (1 - q / t1) * (1 - t2) * (1 - q / t2) / (1 - 1 / q)


def test_zeta_tilde_loop_free_inverse_is_laurent():
    # the reciprocal of zeta-tilde_ii is a Laurent polynomial without loops
    inv = 1 / A1().zeta_tilde("1", "1")
    assert inv.denominator_is_monomial_in(["x"])


def test_zeta_pair_symmetry_random_quivers():
    rng = random.Random(5)
    for _ in range(10):
        nodes = ("1", "2", "3")
        edges = tuple(Edge(rng.choice(nodes), rng.choice(nodes), f"t{k}") for k in range(rng.randint(0, 4)))
        Q = Quiver(nodes, edges)
        for i in nodes:
            for j in nodes:
                lhs = Q.zeta(i, j, x) * Q.zeta(j, i, 1 / x)
                rhs = Q.zeta(j, i, 1 / x) * Q.zeta(i, j, x)
                swapped = Q.zeta(j, i, x).subs({"x": 1 / x}) * Q.zeta(i, j, x)
                assert lhs == rhs == swapped


def test_zeta_alphabet_examples():
    J = jordan()
    assert J.zeta_alphabet([("1", z1)], []) == ONE
    assert J.zeta_alphabet([("1", z1)], [("1", x1)]) == J.zeta("1", "1", z1 / x1)
    Z = [("1", z1), ("1", z2)]
    expect = J.zeta("1", "1", z1 / z2) * J.zeta("1", "1", z2 / z1) / ((1 - z1 / (q * z2)) * (1 - z2 / (q * z1)))
    assert J.zeta_alphabet(Z, kernel="tilde_diag") == expect


def test_zeta_alphabet_multiplicative():
    Q = a2()
    w = RatFun.symbol("w")
    A = [("1", z1)]
    B = [("2", z2)]
    X = [("1", x1), ("2", w)]
    assert Q.zeta_alphabet(A + B, X) == Q.zeta_alphabet(A, X) * Q.zeta_alphabet(B, X)
    assert Q.zeta_alphabet(A, X) == Q.zeta_alphabet(A, X[:1]) * Q.zeta_alphabet(A, X[1:])


def test_json_round_trip_and_hash():
    for Q in (A1(), jordan(), a2(), kronecker(), cyclic(3), jordan(dual_factor="q_over_t")):
        assert Quiver.from_json(Q.to_json()) == Q
        assert Quiver.from_json(Q.to_json()).hash == Q.hash
    assert A1().hash != jordan().hash
    assert named("cyclic2") == cyclic(2)


@pytest.mark.parametrize(
    "bad",
    [
        {"nodes": []},
        {"nodes": ["1", "1"]},
        {"nodes": ["1"], "edges": [{"src": "1", "dst": "2", "param": "t"}]},
        {"nodes": ["1"], "edges": [{"src": "1", "dst": "1", "param": "q"}]},
        {"edges": []},
    ],
)
def test_bad_quivers(bad):
    with pytest.raises(IllFormedInput):
        Quiver.from_json(bad)


def test_slopes_are_exact():
    from fractions import Fraction

    Q = a2()
    assert Q.slope(0) == (Fraction(0), Fraction(0))
    assert Q.slope((Fraction(1, 2), 1)) == (Fraction(1, 2), Fraction(1))
    with pytest.raises(IllFormedInput):
        Q.slope((1,))

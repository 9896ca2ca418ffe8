import json

import pytest

from quivershuffle import cli
from quivershuffle import hopf as H
from quivershuffle.errors import IllFormedInput, NotInShuffleAlgebra, ParseError
from quivershuffle.exactalg import symbols
from quivershuffle.quiver import A1, a2, jordan
from quivershuffle.shuffle import generator, slope_basis

q, t = symbols("q", "t")


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    J = jordan()
    a = generator(J, "1", 1) * generator(J, "1", 0)
    b = generator(J, "1", -1).scale(q / t)
    f = generator(J, "1", 0, "negative") * generator(J, "1", -1, "negative")
    return {
        "quiver": write(tmp_path / "jordan.json", J.to_json()),
        "a": write(tmp_path / "a.json", cli.element_to_json(a)),
        "b": write(tmp_path / "b.json", cli.element_to_json(b)),
        "e0": write(tmp_path / "e0.json", cli.element_to_json(generator(J, "1", 0))),
        "f0": write(tmp_path / "f0.json", cli.element_to_json(generator(J, "1", 0, "negative"))),
        "f": write(tmp_path / "f.json", cli.element_to_json(f)),
        "dir": tmp_path,
    }


def test_element_round_trip():
    for Q in (jordan(), a2()):
        for F in slope_basis(Q, 0, (2,) * len(Q.nodes)).basis + [generator(Q, Q.nodes[0], -2, "negative")]:
            data = cli.element_to_json(F)
            assert cli.element_from_json(json.loads(json.dumps(data))) == F
            assert cli.element_to_json(cli.element_from_json(data)) == data


def test_tensor_round_trip():
    Q = jordan()
    F = generator(Q, "1", 1) * generator(Q, "1", 0)
    for T in (H.coproduct_full(F, 2), H.coproduct_slope(generator(Q, "1", 0), 0), H.rmatrix(Q, 0, (2,))):
        data = json.loads(json.dumps(cli.tensor_to_json(T)))
        back = cli.tensor_from_json(data)
        assert back == T and back.order == T.order and back.prefactor == T.prefactor
        assert cli.tensor_to_json(back) == cli.tensor_to_json(T)


def test_malformed_inputs_report_location(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"quiver": "jordan", "hdeg": {"1": 1}, "poly": [{"coeff": "q + 0.5", "exps": {"z_1_1": 1}}]}')
    with pytest.raises(ParseError) as err:
        cli.load_element(bad)
    assert "position" in str(err.value)
    broken = tmp_path / "broken.json"
    broken.write_text('{"quiver": ')
    with pytest.raises(ParseError) as err:
        cli.load_element(broken)
    assert "line 1" in str(err.value)
    asym = {"quiver": "A1", "hdeg": {"1": 2}, "poly": [{"coeff": "1", "exps": {"z_1_1": 1}}]}
    with pytest.raises(NotInShuffleAlgebra):
        cli.element_from_json(asym)
    with pytest.raises(IllFormedInput):
        cli.element_from_json({"quiver": "A1", "hdeg": {"1": 1}, "poly": [{"coeff": "1", "exps": {"z_1_2": 1}}]})


def test_slope_and_dim_parsing():
    from fractions import Fraction

    Q = a2()
    assert cli.parse_slope("1/2,-1", Q) == (Fraction(1, 2), Fraction(-1))
    assert cli.parse_slope("0", Q) == (0, 0)
    assert cli.fmt_slope(cli.parse_slope("3/6,2", Q)) == "1/2,2"
    with pytest.raises(ParseError):
        cli.parse_slope("0.5", Q)
    assert cli.parse_dim("1,2", Q) == (1, 2)


def test_product_verb(files, capsys):
    out = files["dir"] / "c.json"
    assert cli.run(["product", files["a"], files["b"], "-o", str(out)]) == 0
    C = cli.load_element(out)
    assert C.hdeg == (3,)
    assert C == cli.load_element(files["a"]) * cli.load_element(files["b"])


def test_report_verbs(files, capsys):
    d = files["dir"]
    Q = files["quiver"]
    assert cli.run(["shift", files["a"], "--k", "1", "-o", str(d / "s.json")]) == 0
    assert cli.run(["wheel", files["a"], "-o", str(d / "w.json")]) == 0
    assert json.loads((d / "w.json").read_text())["wheel"] is True
    assert cli.run(["slope-test", files["e0"], "--m", "0", "-o", str(d / "st.json")]) == 0
    res = json.loads((d / "st.json").read_text())
    assert res["slope_leq"] and res["naive_slope_eq"] and res["meta"]["quiver_hash"] == jordan().hash
    assert cli.run(["coproduct", files["a"], "--full", "--order", "2", "-o", str(d / "cf.json")]) == 0
    assert cli.run(["coproduct", files["e0"], "--slope", "0", "-o", str(d / "cs.json")]) == 0
    assert cli.run(["pair", files["a"], files["f"], "-o", str(d / "p.json")]) == 0
    assert json.loads((d / "p.json").read_text())["routes_agree"]
    assert cli.run(["pair", files["e0"], files["f0"], "-o", str(d / "p0.json")]) == 0
    from quivershuffle.exactalg import parse_coefficient

    assert parse_coefficient(json.loads((d / "p0.json").read_text())["value"]) == jordan().gamma("1")
    assert cli.run(["gram", "--quiver", Q, "--m", "0", "--n", "2", "-o", str(d / "g.json")]) == 0
    assert cli.run(["rmatrix", "--quiver", Q, "--m", "0", "--cutoff", "2", "-o", str(d / "r.json")]) == 0
    args = ["intertwine", "--quiver", Q, "--i", "1", "--v1", "1", "--v2", "0", "--w1", "1", "--w2", "1"]
    assert cli.run(args + ["--p1", "p1[1]", "--include-f", "-o", str(d / "i.json")]) == 0
    assert json.loads((d / "i.json").read_text())["ok"]


def test_basis_verb_deterministic(files):
    d = files["dir"]
    a, b = d / "b1.json", d / "b2.json"
    rep = d / "b1.txt"
    assert cli.run(["basis", "--quiver", "A1", "--m", "0", "--n", "2", "-o", str(a), "--report", str(rep)]) == 0
    assert cli.run(["basis", "--quiver", "A1", "--m", "0", "--n", "2", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    data = json.loads(a.read_text())
    assert data["dim"] == 1 and data["meta"]["version"]
    assert cli.element_from_json(data["basis"][0]).hdeg == (2,)


def test_verify_pairing_prints_gamma(files, capsys):
    assert cli.run(["verify", "--suite", "pairing", "--quiver", files["quiver"], "-o", str(files["dir"] / "v.json")]) == 0
    out = capsys.readouterr().out
    assert "pairing: PASS" in out and "<e[1,0], f[1,0]>" in out


def test_verify_failure_dumps_counterexamples(files, monkeypatch):
    J = jordan()
    bad = generator(J, "1", 3)

    def failing(quiver, seed, **kw):
        return cli.SuiteResult("pairing", False, 1, [cli._failure("forced", {"F": bad})])

    monkeypatch.setitem(cli.SUITES, "pairing", failing)
    dump = files["dir"] / "dump"
    status = cli.run(
        ["verify", "--suite", "pairing", "--quiver", files["quiver"], "--dump-dir", str(dump), "-o", str(files["dir"] / "v.json")]
    )
    assert status == 1
    dumped = sorted(dump.iterdir())
    assert len(dumped) == 1 and cli.load_element(dumped[0]) == bad


def test_parse_error_exit_status(files, capsys):
    assert cli.run(["slope-test", files["e0"], "--m", "0.5"]) == 2
    assert "error" in capsys.readouterr().err


def test_env_cap_is_honored(files, monkeypatch):
    # registered so the value written by run() is undone afterwards
    monkeypatch.setenv("QUIVERSHUFFLE_MAX_SERIES_TERMS", "20000")
    status = cli.run(["coproduct", files["a"], "--full", "--order", "30", "--max-series-terms", "3", "-o", str(files["dir"] / "x.json")])
    assert status == 2


def test_random_elements_seeded():
    import random

    Q = jordan()
    a = cli.random_element(random.Random(4), Q, (2,))
    b = cli.random_element(random.Random(4), Q, (2,))
    assert a == b and a.is_symmetric()

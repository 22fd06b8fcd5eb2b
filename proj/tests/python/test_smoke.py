import os
from fractions import Fraction
from pathlib import Path

import pytest

import lagskel

DATA = Path(os.environ.get("LAGSKEL_TEST_DATA", Path(__file__).resolve().parents[1] / "data"))


@pytest.fixture
def toy():
    return lagskel.Problem.load(DATA / "toy.json")


def test_problem_accessors(toy):
    assert toy.num_variables == 2
    assert toy.num_constraints == 2
    assert toy.target == [1, 2]
    assert toy.box == [(-2, 2), (-2, 2)]
    assert toy.energy([1, 0]) == 1
    assert toy.constraints([0, 1]) == [-1, 2]
    again = lagskel.Problem.from_json(toy.to_json())
    assert again.to_json() == toy.to_json()


def test_dual_search_on_toy(toy):
    result = lagskel.dual_search(toy.with_target([0, 0]), backend="brute")
    signatures = {(e["f"], tuple(e["H"])) for e in result["entries"]}
    assert signatures == {(0, (0, 0)), (1, (1, 2)), (1, (-1, 2))}
    report = result["report"]
    assert report["oracle_calls"] == report["num_vertices"] + report["cut_planes"]
    assert all(isinstance(v, Fraction) for e in result["entries"] for v in e["lambda"])


def test_dual_max_and_adapt(toy):
    r = lagskel.dual_max(toy, backend="brute")
    assert r["dual_value"] == 1
    assert r["labeling"] == [1, 0]
    s = lagskel.slack_dual_max(toy, [0, 0], [1, 1], backend="brute")
    assert len(s["b_star"]) == 2
    a = lagskel.adapt_search(toy, [1, 2], [0, 0], [0, 0], [1, 1], [1, 1], backend="brute")
    assert a["objective"] == 1


def test_minimize_backends_agree():
    unary = [("1", "0"), (0, "1/2"), (Fraction(1, 3), 0)]
    edges = [(0, 1, 0, 2, 2, 0), (1, 2, 0, 1, "3/2", 0)]
    assert lagskel.minimize(unary, edges) == lagskel.minimize(unary, edges, backend="brute")


def test_errors(toy):
    with pytest.raises(lagskel.LagskelError):
        lagskel.dual_search(toy)
    with pytest.raises(lagskel.BudgetExceeded):
        lagskel.dual_search(toy, backend="brute", max_calls=2)
    with pytest.raises(TypeError):
        lagskel.minimize([(0.5, 0)])
    with pytest.raises(ValueError):
        lagskel.Problem.from_json("{")

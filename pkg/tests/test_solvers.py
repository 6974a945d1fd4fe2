import random
from fractions import Fraction as F

import pytest

from ranksched import ContractError, is_ne, make_game
from ranksched.oracle import ne_exists
from ranksched.solvers import (auto_method, decide_global_q2, decide_global_unit, gamma_frontier,
                               make_inversed_policies, solve, solve_inversed, solve_p2_unit,
                               solve_q2_unit)


def ids(n):
    return [str(i) for i in range(1, n + 1)]


def shuffled(rng, n):
    p = ids(n)
    rng.shuffle(p)
    return p


def test_inversed_policies_pair():
    assert make_inversed_policies("abc") == (("a", "b", "c"), ("c", "b", "a"))
    with pytest.raises(ContractError):
        make_inversed_policies("aba")


def test_solve_inversed_witness_is_ne():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 7)
        p, q = make_inversed_policies(shuffled(rng, n))
        g = make_game([rng.randint(1, 10) for _ in range(n)], 2, lists=[p, q])
        res = solve_inversed(g)
        assert res.exists and is_ne(g, res.witness)
    with pytest.raises(ContractError):
        solve_inversed(make_game([1, 1], 2, lists=[["1", "2"], ["1", "2"]]))


def test_global_unit_trivial_and_two_machine_cases():
    assert decide_global_unit(make_game([1] * 5, 2)).exists
    assert not decide_global_unit(make_game([1] * 4, 2)).exists
    assert not decide_global_unit(make_game([1] * 5, 3)).exists
    assert decide_global_unit(make_game([1], 3)).exists
    assert decide_global_unit(make_game([1] * 4, 1)).exists


@pytest.mark.parametrize("n", range(1, 8))
def test_global_unit_witness(n):
    g = make_game([1] * n, 2)
    res = decide_global_unit(g)
    assert res.exists == ne_exists(g)
    if res.exists:
        assert is_ne(g, res.witness)


@pytest.mark.parametrize("r", [F(1), F(1, 2), F(2, 3), F(3, 4), F(1, 3), F(2, 5)])
def test_q2_unit_matches_oracle(r):
    rng = random.Random(str(r))
    for n in range(1, 7):
        for _ in range(12):
            g = make_game([1] * n, [1, r], lists=[shuffled(rng, n), shuffled(rng, n)])
            res = solve_q2_unit(g)
            assert res.exists == ne_exists(g)
            if res.exists:
                assert is_ne(g, res.witness)


@pytest.mark.parametrize("r", [F(1, 2), F(2, 3), F(3, 4), F(1, 3)])
def test_global_q2_matches_oracle(r):
    for n in range(1, 9):
        g = make_game([1] * n, [1, r])
        assert decide_global_q2(g).exists == ne_exists(g)


def test_slow_machine_listed_first():
    rng = random.Random(3)
    for n in range(1, 7):
        for _ in range(6):
            g = make_game([1] * n, [F(1, 2), 1], lists=[shuffled(rng, n), shuffled(rng, n)])
            assert solve_q2_unit(g).exists == ne_exists(g)


def test_p2_unit_matches_oracle():
    rng = random.Random(11)
    for n in range(1, 7):
        for _ in range(15):
            g = make_game([1] * n, 2, lists=[shuffled(rng, n), shuffled(rng, n)])
            res = solve_p2_unit(g)
            assert res.exists == ne_exists(g)


def test_gamma_frontier_has_at_most_two_members():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(2, 9)
        g = make_game([1] * n, [1, F(1, 2)], lists=[shuffled(rng, n), shuffled(rng, n)])
        for k in range(n // 3 + 1):
            fr = gamma_frontier(g, k)
            assert 1 <= len(fr.members) <= 2
            assert all(len(mem.assigned) == 3 * k for mem in fr.members)
            if len(fr.members) == 2:
                a, b = (mem.assigned for mem in fr.members)
                assert len(a ^ b) == 2
    with pytest.raises(ContractError):
        gamma_frontier(make_game([1] * 4, [1, F(1, 2)]), 5)


def test_dispatch():
    assert auto_method(make_game([1] * 3, 2)) == "global-unit"
    assert auto_method(make_game([1, 2, 3], 2, lists=[["1", "2", "3"], ["3", "2", "1"]])) == "inversed"
    assert auto_method(make_game([1] * 3, 2, lists=[["1", "2", "3"], ["2", "1", "3"]])) == "p2-unit"
    assert auto_method(make_game([1] * 3, [1, F(1, 2)])) == "global-q2"
    assert auto_method(make_game([1] * 3, [1, F(1, 2)], lists=[["1", "2", "3"], ["2", "1", "3"]])) == "q2-unit"
    assert auto_method(make_game([1, 2], 3)) == "oracle"
    res = solve(make_game([1, 2], 3))
    assert res.exists and res.method == "oracle"
    with pytest.raises(ContractError):
        solve(make_game([1, 2], 3), "p2-unit")
    with pytest.raises(ContractError):
        solve(make_game([1], 2), "magic")

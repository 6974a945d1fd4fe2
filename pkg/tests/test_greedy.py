import itertools
import random
from fractions import Fraction as F

import pytest

from ranksched import ContractError, is_ne, make_game
from ranksched.greedy import (TieBreak, algorithm1, algorithm2, check_identical_unit_stability,
                              check_q2_unit_stability, rank_decreasing_witness, unit_partition)


def ids(n):
    return [str(i) for i in range(1, n + 1)]


def test_algorithm1_least_loaded_takes_own_list_head():
    g = make_game({"a": 3, "b": 1, "c": 1, "d": 2}, 2,
                  lists=[["a", "b", "c", "d"], ["d", "c", "b", "a"]])
    # tie at 0: M1 takes a; M2 (0) takes d; M2 (2) takes c; M2 (3) ties M1 (3) -> M1 takes b
    assert algorithm1(g) == (0, 0, 1, 1)


def test_tie_break_sequence_is_consumed_exactly():
    g = make_game([1, 1], 2)
    assert algorithm1(g, TieBreak.sequence([1])) == (1, 0)
    with pytest.raises(ContractError):
        algorithm1(g, TieBreak.sequence([1, 0]))
    with pytest.raises(ContractError):
        algorithm1(g, TieBreak.sequence([]))
    with pytest.raises(ContractError):
        algorithm1(g, TieBreak.sequence([5]))


def test_algorithm1_needs_identical_rates():
    with pytest.raises(ContractError):
        algorithm1(make_game([1, 1], [1, F(1, 2)]))


def test_algorithm2_earliest_finish():
    g = make_game([1] * 3, [1, F(1, 2)])
    # finish times: fast 1, 2, 3 ...; slow 2, 4 ...
    assert algorithm2(g) == (0, 0, 1)
    with pytest.raises(ContractError):
        algorithm2(make_game([1, 2], [1, F(1, 2)]))


def test_unit_partition():
    g = make_game([1] * 5, 2)
    part = unit_partition(g, (0, 1, 0, 1, 0))
    assert (part.ell, part.c) == (2, 1)
    assert part.P == ("5",)
    assert part.P1 == ("4",)
    assert part.P2 == ("3",)
    with pytest.raises(ContractError):
        unit_partition(g, (0, 0, 0, 0, 1))


@pytest.mark.parametrize("n,m", [(n, m) for m in (2, 3) for n in range(1, 7)])
def test_identical_check_matches_is_ne_on_every_tie_break(n, m):
    rng = random.Random(n * 10 + m)
    for _ in range(6):
        lists = []
        for _ in range(m):
            p = ids(n)
            rng.shuffle(p)
            lists.append(p)
        g = make_game([1] * n, m, lists=lists)
        s = algorithm1(g)
        assert check_identical_unit_stability(g, s) == is_ne(g, s)
        assert (rank_decreasing_witness(g, s) is None) == is_ne(g, s)


@pytest.mark.parametrize("r", [F(1, 2), F(2, 3), F(1, 3), F(3, 4), F(1)])
def test_q2_check_matches_is_ne(r):
    rng = random.Random(str(r))
    for n in range(1, 8):
        for _ in range(8):
            p, q = ids(n), ids(n)
            rng.shuffle(p)
            rng.shuffle(q)
            g = make_game([1] * n, [1, r], lists=[p, q])
            s = algorithm2(g)
            assert check_q2_unit_stability(g, s) == is_ne(g, s)


def test_every_algorithm1_run_on_small_instances():
    # replay all tie resolutions of a small instance
    g = make_game([1] * 4, 2, lists=[ids(4), ["4", "3", "2", "1"]])
    for seq in itertools.product((0, 1), repeat=2):
        try:
            s = algorithm1(g, TieBreak.sequence(seq))
        except ContractError:
            continue
        assert check_identical_unit_stability(g, s) == is_ne(g, s)

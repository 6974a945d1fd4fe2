from fractions import Fraction as F

import pytest

from ranksched import ContractError, ValidationError, beneficial_deviation, best_responses, is_ne
from ranksched.core import build_schedule
from ranksched.instances import (FamilySpec, ThreeDMInstance, generate, identical_pos_moved_last,
                                 matching_profile, normalize, reduce_3dm, solve_3dm_bruteforce)
from ranksched.oracle import analyze, poa_pos

MATCHABLE = ThreeDMInstance(3, [(1, 1, 1), (1, 2, 3), (2, 2, 2), (2, 1, 2), (2, 3, 1), (3, 3, 3), (3, 1, 1)])
UNMATCHABLE = ThreeDMInstance(3, [(1, 1, 1), (1, 2, 3), (2, 2, 1), (2, 1, 2), (2, 3, 1), (3, 3, 3), (3, 1, 1)])

# every element occurs two or three times and there is no perfect matching
NO_MATCH = ThreeDMInstance(3, [(1, 1, 3), (1, 2, 1), (2, 2, 2), (2, 3, 2), (3, 1, 1), (3, 2, 3), (3, 3, 2)])


def layout_profile(game, layout):
    where = {j: mc for mc, jobs in layout.items() for j in jobs}
    return tuple(game.machine_index(where[j]) for j in game.job_ids)


def test_family_validation():
    with pytest.raises(ValidationError):
        FamilySpec("nope")
    with pytest.raises(ValidationError):
        generate(FamilySpec("q2-small-r", r=F(3, 4)))
    with pytest.raises(ValidationError):
        generate(FamilySpec("q2-large-r", r=F(1, 2)))


def test_invpol_poa_shape():
    g = generate(FamilySpec("invpol-poa", k=2))
    assert g.lists[0] == ("1", "2", "j*", "3", "4")
    assert g.lists[1] == tuple(reversed(g.lists[0]))
    assert g.total_work == 8


def test_identical_pos_m2_both_variants():
    assert poa_pos(generate(FamilySpec("identical-pos", m=2))) == (F(3, 2), F(3, 2))
    assert poa_pos(identical_pos_moved_last(2))[1] == F(3, 2)


def test_identical_pos_literal_lists_have_no_ne_at_m3():
    assert not analyze(identical_pos_moved_last(3)).has_ne


def test_matchable_reduction():
    g = reduce_3dm(MATCHABLE)
    assert (g.n, g.m, g.total_work) == (24, 7, 28)
    assert solve_3dm_bruteforce(MATCHABLE) == (1, 3, 6)
    s = matching_profile(MATCHABLE, [1, 3, 6], g)
    assert is_ne(g, s)
    view = build_schedule(g, s)
    assert all(load == 4 for load in view.loads)
    with pytest.raises(ValidationError):
        matching_profile(MATCHABLE, [1, 2, 6], g)


def test_unmatchable_profile_has_v4_deviation():
    assert solve_3dm_bruteforce(UNMATCHABLE) is None
    g = reduce_3dm(UNMATCHABLE, strict=False)
    layout = {"M1": ["d1", "u1", "v1"], "M2": ["y2", "z3", "u2", "v2"], "M3": ["d2a", "u3", "v3"],
              "M5": ["d2b", "u5", "v5"], "M4": ["y1", "z2", "u4", "z1"],
              "M6": ["y3", "u6", "v6", "v4"], "M7": ["d3", "u7", "v7"]}
    s = layout_profile(g, layout)
    assert not is_ne(g, s)
    assert best_responses(g, s, "v4") == {g.machine_index("M4")}
    assert beneficial_deviation(g, s) is not None


def test_strict_reduction_rejects_single_occurrences():
    with pytest.raises(ValidationError):
        reduce_3dm(UNMATCHABLE)


def test_normalize():
    norm = normalize(UNMATCHABLE)
    assert not norm.feasible
    assert norm.forced == (4,)
    norm = normalize(ThreeDMInstance(2, [(1, 1, 1), (2, 2, 2), (1, 2, 2)]))
    assert norm.feasible and norm.forced[0] == 1
    with pytest.raises(ValidationError):
        ThreeDMInstance(2, [(1, 1, 3)])


def test_bruteforce_limit():
    with pytest.raises(ContractError):
        solve_3dm_bruteforce(ThreeDMInstance(1, [(1, 1, 1)] * 21))


def test_reduction_converse_counterexample():
    # a NE of the constructed game although the instance has no perfect matching:
    # y2 and z1 finish third behind length-2 dummies on every machine of their triples
    assert all(c in (2, 3) for c in NO_MATCH.occurrences().values())
    assert solve_3dm_bruteforce(NO_MATCH) is None
    g = reduce_3dm(NO_MATCH)
    layout = {"M1": ["y1", "z3", "u3", "v1"], "M2": ["d1", "y2", "v2"], "M3": ["d2", "u5", "v3"],
              "M4": ["z2", "u1", "u6", "v4"], "M5": ["d3a", "z1", "v5"], "M6": ["d3b", "u4", "v6"],
              "M7": ["y3", "u2", "u7", "v7"]}
    assert is_ne(g, layout_profile(g, layout))

"""Greedy schedule constructors and the closed-form stability checks for them.

``algorithm1`` serves identical machines with arbitrary lengths: the least
loaded machine takes the first unassigned job of its own list.
``algorithm2`` serves related machines with unit jobs: the machine that would
finish the next job earliest, (L_i + 1) / r_i, takes its first unassigned job.
Every argmin is collected in full and handed to a :class:`TieBreak`, so any
run the nondeterministic description allows can be replayed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .core import (Game, _completion, _first_deviation, _rank2_all, as_profile,
                   cost_reducing_deviation)
from .errors import ContractError


@dataclass(frozen=True)
class TieBreak:
    """How to resolve a tied argmin.

    With ``decisions=None`` the lowest machine index wins.  Otherwise each tie
    consumes the next decision, which must be one of the tied machines, and a
    run must consume the sequence exactly.
    """

    decisions: Optional[tuple] = None

    @classmethod
    def lowest(cls) -> "TieBreak":
        return cls(None)

    @classmethod
    def sequence(cls, decisions: Sequence[int]) -> "TieBreak":
        return cls(tuple(decisions))

    def chooser(self) -> "_SequenceChooser":
        return _SequenceChooser(self.decisions)


class _SequenceChooser:
    def __init__(self, decisions):
        self.decisions = decisions
        self.used = 0

    def __call__(self, step, candidates, loads):
        if self.decisions is None:
            return candidates[0]
        if self.used >= len(self.decisions):
            raise ContractError(
                f"tie at step {step} among machines {candidates} but the tie-break sequence is exhausted")
        choice = self.decisions[self.used]
        self.used += 1
        if choice not in candidates:
            raise ContractError(
                f"tie-break decision {choice} at step {step} is not among tied machines {candidates}")
        return choice

    def finish(self):
        if self.decisions is not None and self.used != len(self.decisions):
            raise ContractError(
                f"tie-break sequence has {len(self.decisions) - self.used} unused decisions")


def greedy_run(game: Game, key: Callable, choose: Callable) -> tuple:
    """Shared loop of both algorithms.

    ``key(i, loads)`` scores machine i; ``choose(step, tied, loads)`` picks
    among tied minimisers (called only when there are two or more).  Loads
    are kept in the game's integer work scale.
    """
    g = game
    n, m = g.n, g.m
    loads = [0] * m
    cursor = [0] * m
    out = [None] * n
    for step in range(1, n + 1):
        scores = [key(i, loads) for i in range(m)]
        low = min(scores)
        tied = [i for i in range(m) if scores[i] == low]
        i = tied[0] if len(tied) == 1 else choose(step, tied, tuple(loads))
        order = g._order[i]
        c = cursor[i]
        while out[order[c]] is not None:
            c += 1
        cursor[i] = c + 1
        j = order[c]
        out[j] = i
        loads[i] += g._w[j]
    return tuple(out)


def algorithm1(game: Game, tiebreak: Optional[TieBreak] = None) -> tuple:
    """Least-loaded-first list scheduling on identical machines."""
    game._need_job_lists()
    if not game.is_identical:
        raise ContractError("algorithm1 needs identical machine rates")
    chooser = (tiebreak or TieBreak()).chooser()
    out = greedy_run(game, lambda i, loads: loads[i], chooser)
    chooser.finish()
    return out


def algorithm2(game: Game, tiebreak: Optional[TieBreak] = None) -> tuple:
    """Earliest-finish-first scheduling of unit jobs on related machines."""
    game._need_job_lists()
    if not game.is_unit:
        raise ContractError("algorithm2 needs unit-length jobs")
    chooser = (tiebreak or TieBreak()).chooser()
    unit = game._w[0]
    f = game._f
    out = greedy_run(game, lambda i, loads: (loads[i] + unit) * f[i], chooser)
    chooser.finish()
    return out


def _require_cost_stable(game, s, what):
    bad = cost_reducing_deviation(game, s)
    if bad is not None:
        raise ContractError(
            f"{what}: profile is not stable against cost-reducing moves ({bad[0]!r} -> machine {bad[1]})")


def rank_decreasing_witness(game: Game, profile, debug: bool = True):
    """For a unit-job profile with no cost-reducing move: a job that is last on
    its machine and can slip in before an equal-time job elsewhere, or None.

    None holds exactly when the profile is a NE.  With ``debug`` the
    cost-stability precondition is verified first.
    """
    game._need_job_lists()
    if not game.is_unit:
        raise ContractError("rank_decreasing_witness needs unit-length jobs")
    s = as_profile(game, profile)
    if debug:
        _require_cost_stable(game, s, "rank_decreasing_witness")
    C = _completion(game, s)
    last = {}
    for i, order in enumerate(game._order):
        for k in order:
            if s[k] == i:
                last[i] = k
    for j in range(game.n):
        if last.get(s[j]) != j:
            continue
        for z in range(game.m):
            if z == s[j]:
                continue
            pos = game._pos[z]
            for k in range(game.n):
                if s[k] == z and C[k] == C[j] and pos[j] < pos[k]:
                    return game.jobs[j].id, z
    return None


@dataclass(frozen=True)
class UnitStabilityPartition:
    """Jobs of a balanced unit schedule split by completion time.

    ``P`` finish at ell + 1, ``P1`` finish at ell and are last on their machine,
    ``P2`` finish at ell and have a job after them.
    """

    ell: int
    c: int
    P: tuple
    P1: tuple
    P2: tuple


def unit_partition(game: Game, profile) -> UnitStabilityPartition:
    game._need_job_lists()
    s = as_profile(game, profile)
    n, m = game.n, game.m
    ell, c = divmod(n, m)
    counts = [s.count(i) for i in range(m)]
    if sorted(counts) != [ell] * (m - c) + [ell + 1] * c:
        raise ContractError(f"machine loads {counts} are not balanced for n={n}, m={m}")
    P, P1, P2 = [], [], []
    for i in range(m):
        seq = [k for k in game._order[i] if s[k] == i]
        if len(seq) == ell + 1:
            P.append(seq[-1])
            if ell:
                P2.append(seq[-2])
        elif ell:
            P1.append(seq[-1])
    ids = lambda ks: tuple(game.jobs[k].id for k in ks)
    return UnitStabilityPartition(ell, c, ids(P), ids(P1), ids(P2))


def check_identical_unit_stability(game: Game, profile, debug: bool = True) -> bool:
    """Closed-form NE test for an algorithm1 output with unit jobs.

    A job of P must be the top of P on its own machine's list, a job of P1
    the top of P1 on its list, and a job of P2 must beat all of P1 on its
    list.  Phrased as moves: no last job (P or P1) can slip in front of an
    equal-time job on another machine.
    """
    game._need_job_lists()
    if not (game.is_unit and game.is_identical):
        raise ContractError("check_identical_unit_stability needs unit jobs on identical machines")
    s = as_profile(game, profile)
    part = unit_partition(game, s)
    if debug:
        _require_cost_stable(game, s, "check_identical_unit_stability")
    P = [game.index(j) for j in part.P]
    P1 = [game.index(j) for j in part.P1]
    P2 = [game.index(j) for j in part.P2]
    return _no_overtake(game, s, P, P) and _no_overtake(game, s, P1, P1 + P2)


def _no_overtake(game, s, movers, targets):
    pos = game._pos
    for j in movers:
        for k in targets:
            if s[k] != s[j] and pos[s[k]][j] < pos[s[k]][k]:
                return False
    return True


def _q2_shape(game: Game):
    if game.m != 2 or not game.is_unit:
        raise ContractError("needs unit jobs on exactly two machines")
    r0, r1 = game.rates
    fast, slow = (0, 1) if r0 >= r1 else (1, 0)
    return fast, slow, game.rates[slow] / game.rates[fast]


def check_q2_unit_stability(game: Game, profile, debug: bool = True) -> bool:
    """Closed-form NE test for an algorithm2 output on two related machines.

    With j1, j2 the last jobs on the fast and slow machine and L1, L2 the
    loads: stable iff L1 < L2/r, or L1 = L2/r with j1, j2 each ahead of the
    other on the other's list, or L1 > L2/r and any fast-machine job j'
    finishing together with j2 precedes j2 on the fast list.  With r = 1 the
    first case is not sufficient, so equal rates use the identical-machine test.
    """
    game._need_job_lists()
    fast, slow, r = _q2_shape(game)
    if r == 1:
        return check_identical_unit_stability(game, profile, debug)
    s = as_profile(game, profile)
    if debug:
        _require_cost_stable(game, s, "check_q2_unit_stability")
    C = _completion(game, s)
    on_fast = [k for k in game._order[fast] if s[k] == fast]
    on_slow = [k for k in game._order[slow] if s[k] == slow]
    if not on_fast or not on_slow:
        if not on_slow:
            return True
        # everything on the slow machine is never cost-stable with n >= 1
        return _first_deviation(game, s, C, _rank2_all(game, C)) is None
    j1, j2 = on_fast[-1], on_slow[-1]
    t1, t2 = C[j1], C[j2]
    if t1 < t2:
        return True
    pos = game._pos
    if t1 == t2:
        return pos[fast][j1] < pos[fast][j2] and pos[slow][j2] < pos[slow][j1]
    for k in on_fast:
        if C[k] == t2 and not pos[fast][k] < pos[fast][j2]:
            return False
    return True

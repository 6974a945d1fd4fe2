"""Competition sets and the seniority model.

In the seniority model each machine orders competition sets, not jobs.
Within a set the residents are served by seniority: a job that migrates
joins the back of its set's queue on the new machine.  The order on a
machine is therefore history dependent, which is why it has its own state
type instead of a plain profile.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import (CompetitionStructure, Game, _rank2_all, as_profile, ranks)
from .dynamics import BrStep, BrTrace
from .errors import ContractError, ValidationError

__all__ = [
    "CompetitionStructure", "set_ranks", "SeniorityState", "initial_state",
    "seniority_completion", "seniority_ranks", "seniority_deviate", "seniority_prefers",
    "seniority_best_responses", "seniority_suboptimal", "is_seniority_stable",
    "seniority_brd", "default_budget",
]


def set_ranks(game: Game, profile) -> dict:
    """Ranks computed inside each competition set independently."""
    return ranks(game, profile)


@dataclass(frozen=True)
class SeniorityState:
    """``queues[i][l]`` lists the jobs of set l on machine i, oldest first."""

    queues: tuple

    def machine_of(self, job: str) -> int:
        for i, per_set in enumerate(self.queues):
            for q in per_set:
                if job in q:
                    return i
        raise ValidationError(f"job {job!r} is not in the state")

    def profile(self, game: Game) -> tuple:
        return tuple(self.machine_of(j) for j in game.job_ids)


def _need_set_level(game: Game):
    if not game.is_set_level:
        raise ContractError("the seniority model needs set-level priority lists")


def initial_state(game: Game, profile) -> SeniorityState:
    """Queues built from a profile; residents start in job input order."""
    _need_set_level(game)
    s = as_profile(game, profile)
    groups = game.groups
    queues = []
    for i in range(game.m):
        queues.append(tuple(tuple(j for j in grp if s[game.index(j)] == i) for grp in groups))
    return SeniorityState(tuple(queues))


def _check_state(game: Game, state: SeniorityState):
    if len(state.queues) != game.m or any(len(q) != len(game.groups) for q in state.queues):
        raise ValidationError("state shape does not match the game")
    placed = sorted(j for per_set in state.queues for q in per_set for j in q)
    if placed != sorted(game.job_ids):
        raise ValidationError("state must hold every job exactly once")
    for per_set in state.queues:
        for l, q in enumerate(per_set):
            for j in q:
                if game._group[game.index(j)] != l:
                    raise ValidationError(f"job {j!r} sits in the queue of another set")


def _scaled_completion(game: Game, state: SeniorityState) -> list:
    C = [0] * game.n
    w, f = game._w, game._f
    for i, per_set in enumerate(state.queues):
        acc = 0
        for l in game.set_lists[i]:
            for j in per_set[l]:
                k = game._idx[j]
                acc += w[k]
                C[k] = acc * f[i]
    return C


def seniority_completion(game: Game, state: SeniorityState) -> dict:
    _need_set_level(game)
    C = _scaled_completion(game, state)
    return {j.id: Fraction(c, game._scale) for j, c in zip(game.jobs, C)}


def seniority_ranks(game: Game, state: SeniorityState) -> dict:
    _need_set_level(game)
    r2 = _rank2_all(game, _scaled_completion(game, state))
    return {j.id: Fraction(r, 2) for j, r in zip(game.jobs, r2)}


def seniority_deviate(game: Game, state: SeniorityState, job, target) -> SeniorityState:
    """Move ``job`` to the back of its set's queue on ``target``."""
    _need_set_level(game)
    job = str(job)
    z = game.machine_index(target)
    i = state.machine_of(job)
    if i == z:
        raise ContractError(f"job {job!r} already runs on machine {z}")
    l = game._group[game.index(job)]
    queues = [list(per_set) for per_set in state.queues]
    queues[i][l] = tuple(j for j in queues[i][l] if j != job)
    queues[z][l] = queues[z][l] + (job,)
    return SeniorityState(tuple(tuple(q) for q in queues))


def _value(game, state, k):
    C = _scaled_completion(game, state)
    return _rank2_all(game, C)[k], C[k]


def seniority_prefers(game: Game, job, state: SeniorityState, alt: SeniorityState) -> bool:
    _need_set_level(game)
    k = game.index(job)
    return _value(game, alt, k) < _value(game, state, k)


def _options(game, state, k):
    """(value, machine) for staying and for every migration."""
    job = game.jobs[k].id
    here = state.machine_of(job)
    out = [(_value(game, state, k), here)]
    for z in range(game.m):
        if z != here:
            out.append((_value(game, seniority_deviate(game, state, job, z), k), z))
    return out


def seniority_best_responses(game: Game, state: SeniorityState, job) -> set:
    _need_set_level(game)
    opts = _options(game, state, game.index(job))
    best = min(v for v, _ in opts)
    return {z for v, z in opts if v == best}


def seniority_suboptimal(game: Game, state: SeniorityState) -> list:
    _need_set_level(game)
    out = []
    for k in range(game.n):
        opts = _options(game, state, k)
        if min(v for v, _ in opts) < opts[0][0]:
            out.append(game.jobs[k].id)
    return out


def is_seniority_stable(game: Game, state: SeniorityState) -> bool:
    return not seniority_suboptimal(game, state)


def default_budget(game: Game) -> int:
    """(sum of lengths)^2 in the game's integer work scale."""
    total = sum(game._w)
    return max(total * total, 1)


def seniority_brd(game: Game, initial, max_steps=None, rule: str = "lowest-id",
                  seed=None) -> BrTrace:
    """Best-response dynamics in the seniority model.

    ``initial`` is a state or a profile.  The deviator is the first
    suboptimal job in input order (``rule="lowest-id"``) or a uniformly
    random one (``rule="random"``); it moves to its lowest-index best
    response, or a random one under the random rule.
    """
    _need_set_level(game)
    if rule not in ("lowest-id", "random"):
        raise ContractError(f"unknown seniority deviator rule {rule!r}")
    state = initial if isinstance(initial, SeniorityState) else initial_state(game, initial)
    _check_state(game, state)
    budget = default_budget(game) if max_steps is None else max_steps
    rng = random.Random(seed)
    steps = []
    seen = {state}
    while True:
        sub = seniority_suboptimal(game, state)
        if not sub:
            return BrTrace(steps, "reached-NE", state)
        if len(steps) >= budget:
            return BrTrace(steps, "step-budget-exhausted", state)
        job = sub[0] if rule == "lowest-id" else rng.choice(sub)
        targets = sorted(seniority_best_responses(game, state, job))
        z = targets[0] if rule == "lowest-id" else rng.choice(targets)
        steps.append(BrStep(state, job, z))
        state = seniority_deviate(game, state, job, z)
        # a deterministic rule that revisits a state loops forever
        if rule == "lowest-id":
            if state in seen:
                return BrTrace(steps, "entered-cycle", state)
            seen.add(state)

"""Best-response dynamics, deviator rules, profile graphs and sink equilibria."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import ceil
from typing import Optional

from .core import (Game, _best_targets, _completion, _rank2_all, _suboptimal, as_profile,
                   format_rational)
from .errors import ContractError
from .markov import stationary_distribution, strongly_connected_components
from .oracle import _digits, check_cap, iter_profiles, opt_makespan


class DeviatorRule(str, Enum):
    PRIORITY = "priority"
    LOWEST_ID = "lowest-id"
    HIGHEST_RANK = "highest-rank"
    RANDOM = "random"


def _rule(rule) -> DeviatorRule:
    try:
        return DeviatorRule(rule)
    except ValueError:
        raise ContractError(f"unknown deviator rule {rule!r}") from None


def lag_defined(game: Game) -> bool:
    return game.is_unit and game.is_identical and game.is_global and len(game.groups) == 1


def _lag(g: Game, s, r2) -> list:
    # position in the global list, 1-based; rank > m*ceil(j/m) - (m-1)/2 doubled
    m = g.m
    out = []
    for p, j in enumerate(g._order[0], start=1):
        if r2[j] > 2 * m * ceil(p / m) - (m - 1):
            out.append(j)
    return out


def sub_and_lag(game: Game, profile) -> tuple:
    """(Sub, Lag) as job-id lists; Sub in input order, Lag in list order."""
    game._need_job_lists()
    if not lag_defined(game):
        raise ContractError("Lag needs unit jobs, identical machines and a global list")
    s = as_profile(game, profile)
    C = _completion(game, s)
    r2 = _rank2_all(game, C)
    sub = _suboptimal(game, s, C, r2)
    ids = [j.id for j in game.jobs]
    return [ids[j] for j in sub], [ids[j] for j in _lag(game, s, r2)]


def _pick(g: Game, s, C, r2, sub, rule, rng):
    if rule is DeviatorRule.PRIORITY:
        order = g._order[0] if g.is_global else range(g.n)
        rank_in = {j: p for p, j in enumerate(order)}
        lag = _lag(g, s, r2) if lag_defined(g) else []
        if lag:
            return lag[0]
        return max(sub, key=rank_in.__getitem__)
    if rule is DeviatorRule.LOWEST_ID:
        return sub[0]
    if rule is DeviatorRule.HIGHEST_RANK:
        return max(sub, key=lambda j: (r2[j], -j))
    return rng.choice(sub)


def pick_deviator(game: Game, profile, rule=DeviatorRule.PRIORITY, seed=None) -> str:
    """The job the rule moves next.  The priority rule takes the top of Lag
    when Lag is nonempty and otherwise the lowest-priority suboptimal job;
    priority means the global list, or input order when lists differ."""
    game._need_job_lists()
    rule = _rule(rule)
    s = as_profile(game, profile)
    C = _completion(game, s)
    r2 = _rank2_all(game, C)
    sub = _suboptimal(game, s, C, r2)
    if not sub:
        raise ContractError("profile is a NE; there is no deviator")
    return game.jobs[_pick(game, s, C, r2, sub, rule, random.Random(seed))].id


@dataclass(frozen=True)
class BrStep:
    state: object  # profile (or seniority state) before the move
    deviator: str
    target: int


@dataclass
class BrTrace:
    steps: list
    status: str  # reached-NE | entered-cycle | step-budget-exhausted
    final: object

    def __len__(self):
        return len(self.steps)


def brd_run(game: Game, start, rule=DeviatorRule.PRIORITY, max_steps: int = 10 ** 5,
            seed=None, stop_on_cycle: bool = True) -> BrTrace:
    """Best-response dynamics from ``start``.

    The rule picks the deviator, which moves to one of its best responses
    chosen uniformly by the seeded generator.  Stops at a NE, at the first
    revisited profile, or after ``max_steps`` moves.
    """
    game._need_job_lists()
    if max_steps < 0:
        raise ContractError("max_steps must be non-negative")
    rule = _rule(rule)
    rng = random.Random(seed)
    s = as_profile(game, start)
    seen = {s}
    steps = []
    while True:
        C = _completion(game, s)
        r2 = _rank2_all(game, C)
        sub = _suboptimal(game, s, C, r2)
        if not sub:
            return BrTrace(steps, "reached-NE", s)
        if len(steps) >= max_steps:
            return BrTrace(steps, "step-budget-exhausted", s)
        j = _pick(game, s, C, r2, sub, rule, rng)
        targets, _ = _best_targets(game, s, C, r2, j)
        z = targets[0] if len(targets) == 1 else rng.choice(targets)
        steps.append(BrStep(s, game.jobs[j].id, z))
        nxt = list(s)
        nxt[j] = z
        s = tuple(nxt)
        if s in seen and stop_on_cycle:
            return BrTrace(steps, "entered-cycle", s)
        seen.add(s)


def _moves(game: Game, s, mode, rule):
    """Outgoing transitions of ``s``: {profile: probability}."""
    C = _completion(game, s)
    r2 = _rank2_all(game, C)
    sub = _suboptimal(game, s, C, r2)
    out = {}
    if not sub:
        return out
    if mode == "all" or rule is DeviatorRule.RANDOM:
        movers = sub
    else:
        movers = [_pick(game, s, C, r2, sub, rule, None)]
    moves = []
    for j in movers:
        targets, _ = _best_targets(game, s, C, r2, j)
        for z in targets:
            moves.append((j, z, Fraction(1, len(movers) * len(targets))))
    if mode == "all":
        moves = [(j, z, Fraction(1, len(moves))) for j, z, _ in moves]
    for j, z, p in moves:
        nxt = list(s)
        nxt[j] = z
        t = tuple(nxt)
        out[t] = out.get(t, 0) + p
    return out


@dataclass
class ProfileGraph:
    game: Game
    mode: str
    rule: Optional[DeviatorRule]
    vertices: list
    edges: dict  # profile -> {profile: Fraction}

    def successors(self, s):
        return self.edges[s].keys()

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "rule": None if self.rule is None else self.rule.value,
            "machines": list(self.game.machine_ids),
            "jobs": list(self.game.job_ids),
            "vertices": [_digits(v) for v in self.vertices],
            "edges": {_digits(v): {_digits(t): format_rational(p) for t, p in self.edges[v].items()}
                      for v in self.vertices},
        }

    def to_dot(self) -> str:
        lines = ["digraph profiles {"]
        for v in self.vertices:
            lines.append(f'  "{_digits(v)}";')
        for v in self.vertices:
            for t, p in self.edges[v].items():
                lines.append(f'  "{_digits(v)}" -> "{_digits(t)}" [label="{format_rational(p)}"];')
        lines.append("}")
        return "\n".join(lines)


def build_profile_graph(game: Game, mode: str = "rule", rule=DeviatorRule.PRIORITY,
                        starts=None, cap=None, force=False) -> ProfileGraph:
    """Best-response graph over all profiles, or over those reachable from
    ``starts``.  ``mode="all"`` keeps every beneficial best-response move;
    ``mode="rule"`` keeps only the moves of the deviator the rule picks,
    with all of a random rule's candidates weighted uniformly."""
    game._need_job_lists()
    if mode not in ("all", "rule"):
        raise ContractError(f"unknown graph mode {mode!r}")
    rule = _rule(rule) if mode == "rule" else None
    edges = {}
    if starts is None:
        check_cap(game, cap, force)
        vertices = list(iter_profiles(game))
        for s in vertices:
            edges[s] = _moves(game, s, mode, rule)
    else:
        vertices = []
        frontier = [as_profile(game, s) for s in starts]
        while frontier:
            s = frontier.pop()
            if s in edges:
                continue
            vertices.append(s)
            edges[s] = _moves(game, s, mode, rule)
            frontier.extend(t for t in edges[s] if t not in edges)
        vertices.sort()
    return ProfileGraph(game, mode, rule, vertices, edges)


@dataclass(frozen=True)
class SinkComponent:
    members: tuple
    distribution: dict  # profile -> Fraction
    cost: Fraction
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "members": [_digits(s) for s in self.members],
            "distribution": {_digits(s): format_rational(p) for s, p in self.distribution.items()},
            "cost": format_rational(self.cost),
            "exact": self.exact,
        }


def sink_analysis(game: Game, rule=DeviatorRule.PRIORITY, starts=None, cap=None,
                  force=False) -> list:
    """Terminal components of the rule graph with their stationary
    distributions and expected makespans, sorted by smallest member."""
    graph = build_profile_graph(game, "rule", rule, starts, cap, force)
    comps = strongly_connected_components(graph.vertices, graph.successors)
    sinks = []
    scale = game._scale
    for comp in comps:
        members = set(comp)
        if any(t not in members for s in comp for t in graph.edges[s]):
            continue
        states = sorted(comp)
        P = {s: graph.edges[s] for s in states}
        if len(states) == 1:
            dist, exact = {states[0]: Fraction(1)}, True
        else:
            dist, exact = stationary_distribution(states, P)
        cost = sum((p * Fraction(max(_completion(game, s)), scale) for s, p in dist.items()),
                   Fraction(0))
        sinks.append(SinkComponent(tuple(states), dist, cost, exact))
    sinks.sort(key=lambda c: c.members[0])
    return sinks


def posink(game: Game, rule=DeviatorRule.PRIORITY, cap=None, force=False) -> Fraction:
    sinks = sink_analysis(game, rule, None, cap, force)
    opt, _ = opt_makespan(game, cap, force)
    return max(c.cost for c in sinks) / opt


def graph_json_text(graph: ProfileGraph) -> str:
    return json.dumps(graph.to_json(), indent=2)

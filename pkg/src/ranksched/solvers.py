"""Polynomial NE deciders and constructors for the tractable classes.

Two-machine unit-job games are handled by simulating the greedy algorithm
block by block.  With rates in ratio a/b (reduced) the fast machine
completes b jobs and the slow one a jobs per block, and the only possible
tie of a run sits at the end of a block.  A run therefore branches at most
once per block; the set of job sets reachable after k blocks is the
frontier, and it never has more than two members.  For identical machines
a block is a layer of two jobs (a = b = 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Optional

from .core import Game, as_profile, beneficial_deviation
from .errors import ContractError, InvariantError
from .greedy import algorithm1


@dataclass(frozen=True)
class SolveResult:
    exists: bool
    witness: Optional[tuple] = None
    method: str = ""
    steps: int = 0

    @property
    def verdict(self) -> str:
        return "NE-exists" if self.exists else "no-NE"


def _verified(game: Game, result: SolveResult) -> SolveResult:
    if result.exists:
        hit = beneficial_deviation(game, result.witness)
        if hit is not None:
            raise InvariantError(
                f"{result.method} produced a witness that is not a NE: {hit[0]!r} -> machine {hit[1]}")
    return result


# ---- Inversed-Policies ---------------------------------------------------------

def make_inversed_policies(order) -> tuple:
    order = tuple(order)
    if len(set(order)) != len(order):
        raise ContractError("priority list repeats a job")
    return order, tuple(reversed(order))


def solve_inversed(game: Game) -> SolveResult:
    """Two identical machines whose lists are each other's reverse always have
    a NE, and the greedy schedule is one, for any lengths and any
    competition structure."""
    game._need_job_lists()
    if game.m != 2 or not game.is_identical:
        raise ContractError("Inversed-Policies needs exactly two identical machines")
    if game.lists[1] != tuple(reversed(game.lists[0])):
        raise ContractError("priority lists are not mutually reversed")
    s = algorithm1(game)
    return _verified(game, SolveResult(True, s, "inversed", game.n))


# ---- two-machine block simulation -------------------------------------------

@dataclass(frozen=True)
class _Run:
    partial: tuple  # machine index per job, -1 while unassigned
    loads: tuple  # unit jobs per machine
    cursors: tuple


@dataclass(frozen=True)
class _Shape:
    fast: int
    slow: int
    a: int  # slow machine jobs per block
    b: int  # fast machine jobs per block

    @property
    def block(self) -> int:
        return self.a + self.b

    def target(self, k: int) -> tuple:
        t = [0, 0]
        t[self.fast] = k * self.b
        t[self.slow] = k * self.a
        return tuple(t)


def _shape(game: Game, need_global=False) -> _Shape:
    game._need_job_lists()
    if game.m != 2:
        raise ContractError("needs exactly two machines")
    if not game.is_unit:
        raise ContractError("needs unit-length jobs")
    if game.competition.mode != "single" and len(game.groups) != 1:
        raise ContractError("needs the single competition set")
    if need_global and not game.is_global:
        raise ContractError("needs a global priority list")
    r0, r1 = game.rates
    fast, slow = (0, 1) if r0 >= r1 else (1, 0)
    r = game.rates[slow] / game.rates[fast]
    return _Shape(fast, slow, r.numerator, r.denominator)


def _initial(game: Game) -> _Run:
    return _Run(tuple([-1] * game.n), (0, 0), (0, 0))


def _scores(game, run):
    f = game._f
    return [(run.loads[i] + 1) * f[i] for i in (0, 1)]


def _assign(game, run, i) -> _Run:
    order = game._order[i]
    c = run.cursors[i]
    while run.partial[order[c]] != -1:
        c += 1
    j = order[c]
    partial = list(run.partial)
    partial[j] = i
    loads = list(run.loads)
    loads[i] += 1
    cursors = list(run.cursors)
    cursors[i] = c + 1
    return _Run(tuple(partial), tuple(loads), tuple(cursors))


def _successors(game, run) -> list:
    sc = _scores(game, run)
    if sc[0] == sc[1]:
        return [_assign(game, run, 0), _assign(game, run, 1)]
    return [_assign(game, run, 0 if sc[0] < sc[1] else 1)]


def _advance(game, run, target) -> tuple:
    """All runs continuing ``run`` until the loads reach ``target``."""
    out, steps = [], 0
    stack = [run]
    while stack:
        cur = stack.pop()
        if cur.loads == target:
            out.append(cur)
            continue
        nxt = _successors(game, cur)
        steps += len(nxt)
        # keep machine-0-first order in the result
        stack.extend(reversed(nxt))
    return out, steps


def _dedup(runs) -> list:
    seen, out = set(), []
    for r in runs:
        key = frozenset(k for k, v in enumerate(r.partial) if v != -1)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def _assigned(run) -> frozenset:
    return frozenset(k for k, v in enumerate(run.partial) if v != -1)


def _check_frontier(game, runs, k):
    if len(runs) > 2:
        raise InvariantError(f"frontier after {k} blocks has {len(runs)} members")
    if len(runs) == 2:
        diff = _assigned(runs[0]) ^ _assigned(runs[1])
        if len(diff) != 2:
            raise InvariantError(
                f"frontier after {k} blocks: members differ in {len(diff)} jobs, expected 2")


def _frontier_runs(game, shape, k) -> tuple:
    runs = [_initial(game)]
    steps = 0
    for block in range(1, k + 1):
        nxt = []
        for run in runs:
            more, st = _advance(game, run, shape.target(block))
            nxt.extend(more)
            steps += st
        runs = _dedup(nxt)
        _check_frontier(game, runs, block)
    return runs, steps


@dataclass(frozen=True)
class FrontierMember:
    assigned: frozenset  # job ids placed in the first k blocks
    assignment: dict  # job id -> machine index, for the placed jobs
    remaining: tuple  # per machine, unassigned job ids in list order


@dataclass(frozen=True)
class GammaFrontier:
    k: int
    members: tuple


def gamma_frontier(game: Game, k: int) -> GammaFrontier:
    """Distinct job sets some greedy run can place in the first k blocks."""
    shape = _shape(game)
    full = game.n // shape.block
    if not 0 <= k <= full:
        raise ContractError(f"block index {k} outside 0..{full}")
    runs, _ = _frontier_runs(game, shape, k)
    members = []
    for run in runs:
        placed = {game.jobs[j].id: i for j, i in enumerate(run.partial) if i != -1}
        remaining = tuple(
            tuple(game.jobs[j].id for j in game._order[i] if run.partial[j] == -1) for i in (0, 1))
        members.append(FrontierMember(frozenset(placed), placed, remaining))
    return GammaFrontier(k, tuple(members))


def _last_on(game, profile, i):
    last = None
    for j in game._order[i]:
        if profile[j] == i:
            last = j
    return last


def _finish(game, run) -> tuple:
    assert all(v != -1 for v in run.partial)
    return run.partial


def _even_search(game, shape, ell, method) -> SolveResult:
    """Complete the last full block from every frontier member and keep a run
    whose two last jobs are mutually prioritised."""
    runs, steps = _frontier_runs(game, shape, ell - 1)
    fast, slow = shape.fast, shape.slow
    pos = game._pos
    for run in runs:
        ends, st = _advance(game, run, shape.target(ell))
        steps += st
        for end in ends:
            s = _finish(game, end)
            j1, j2 = _last_on(game, s, fast), _last_on(game, s, slow)
            if pos[fast][j1] < pos[fast][j2] and pos[slow][j2] < pos[slow][j1]:
                return _verified(game, SolveResult(True, s, method, steps))
    return SolveResult(False, None, method, steps)


def _run_forced(game, shape, force) -> tuple:
    """One greedy run; ``force`` maps a tie's load vector to the machine taking
    it, otherwise the fast machine wins ties."""
    run = _initial(game)
    steps = 0
    while any(v == -1 for v in run.partial):
        sc = _scores(game, run)
        if sc[0] == sc[1]:
            i = force.get(run.loads, shape.fast)
        else:
            i = 0 if sc[0] < sc[1] else 1
        run = _assign(game, run, i)
        steps += 1
    return run.partial, steps


# ---- identical machines --------------------------------------------------------

def _p2_odd(game) -> SolveResult:
    """First n-1 jobs greedily, then the last job joins the slot-ell job with
    the higher priority on the first list."""
    n = game.n
    run = _initial(game)
    for _ in range(n - 1):
        sc = _scores(game, run)
        run = _assign(game, run, 0 if sc[0] <= sc[1] else 1)
    if n == 1:
        target = 0
    else:
        j1 = _last_on(game, run.partial, 0)
        j2 = _last_on(game, run.partial, 1)
        target = 0 if game._pos[0][j1] < game._pos[0][j2] else 1
    run = _assign(game, run, target)
    return run.partial, n


def solve_p2_unit(game: Game) -> SolveResult:
    """NE existence for unit jobs on two identical machines, any lists."""
    shape = _shape(game)
    if shape.a != shape.b:
        raise ContractError("solve_p2_unit needs identical machines")
    n = game.n
    if n % 2:
        s, steps = _p2_odd(game)
        return _verified(game, SolveResult(True, s, "p2-unit", steps))
    return _even_search(game, shape, n // 2, "p2-unit")


def decide_global_unit(game: Game) -> SolveResult:
    """Unit jobs, identical machines, one global list.

    A NE exists iff m = 2 and n is odd, apart from the degenerate games with
    a single machine or a single job, where every profile is stable.
    """
    game._need_job_lists()
    if not (game.is_unit and game.is_identical and game.is_global):
        raise ContractError("decide_global_unit needs unit jobs, identical machines and a global list")
    if len(game.groups) != 1:
        raise ContractError("decide_global_unit needs the single competition set")
    n, m = game.n, game.m
    if m == 1 or n == 1:
        return _verified(game, SolveResult(True, tuple([0] * n), "global-unit", 0))
    if m == 2 and n % 2:
        s, steps = _p2_odd(game)
        return _verified(game, SolveResult(True, s, "global-unit", steps))
    return SolveResult(False, None, "global-unit", 0)


# ---- related machines ------------------------------------------------------------

def _q2_constructive(game, shape, method) -> SolveResult:
    """The c != 0 construction.  Ties go to the fast machine except:
    for 0 < c < ceil(b/a) the tie closing block ell must go fast (it already
    does), and for c = a + b - 1 with a = 1 the final tie must go slow."""
    a, b = shape.a, shape.b
    ell, c = divmod(game.n, a + b)
    force = {}
    if 0 < c < ceil(b / a) and ell >= 1:
        t = list(shape.target(ell))
        t[shape.fast] -= 1
        t[shape.slow] -= 1
        force[tuple(t)] = shape.fast
    if c == a + b - 1:
        t = list(shape.target(ell + 1))
        t[shape.fast] -= 1
        t[shape.slow] -= 1
        force[tuple(t)] = shape.slow
    s, steps = _run_forced(game, shape, force)
    return _verified(game, SolveResult(True, s, method, steps))


def solve_q2_unit(game: Game) -> SolveResult:
    """NE existence for unit jobs on two machines with rational rate ratio."""
    shape = _shape(game)
    if shape.a == shape.b:
        res = solve_p2_unit(game)
        return SolveResult(res.exists, res.witness, "q2-unit", res.steps)
    ell, c = divmod(game.n, shape.block)
    if c:
        return _q2_constructive(game, shape, "q2-unit")
    return _even_search(game, shape, ell, "q2-unit")


def decide_global_q2(game: Game) -> SolveResult:
    """Global list on two related machines: a NE exists iff c != 0."""
    shape = _shape(game, need_global=True)
    if shape.a == shape.b:
        res = decide_global_unit(game)
        return SolveResult(res.exists, res.witness, "global-q2", res.steps)
    c = game.n % shape.block
    if c == 0:
        return SolveResult(False, None, "global-q2", 0)
    res = _q2_constructive(game, shape, "global-q2")
    return res


METHODS = ("inversed", "global-unit", "p2-unit", "q2-unit", "global-q2")


def auto_method(game: Game) -> str:
    """Most specific decider whose precondition holds, else "oracle"."""
    if game.is_set_level:
        return "oracle"
    two = game.m == 2
    if two and game.is_identical and game.lists[1] == tuple(reversed(game.lists[0])):
        return "inversed"
    single = len(game.groups) == 1
    if game.is_unit and single:
        if game.is_identical and game.is_global:
            return "global-unit"
        if two and game.is_identical:
            return "p2-unit"
        if two and game.is_global:
            return "global-q2"
        if two:
            return "q2-unit"
    return "oracle"


def solve(game: Game, method: str = "auto", cap=None, force=False) -> SolveResult:
    if method == "auto":
        method = auto_method(game)
    table = {
        "inversed": solve_inversed,
        "global-unit": decide_global_unit,
        "p2-unit": solve_p2_unit,
        "q2-unit": solve_q2_unit,
        "global-q2": decide_global_q2,
    }
    if method == "oracle":
        from .oracle import first_ne
        s = first_ne(game, cap, force)
        return SolveResult(s is not None, s, "oracle", 0)
    if method not in table:
        raise ContractError(f"unknown method {method!r}")
    return table[method](game)

"""Exact game model: schedules, ranks, preferences and equilibrium checks.

Every quantity is an exact rational.  Internally completion times are kept as
integers on a common scale (lengths times the lcm of their denominators, rates
inverted over the lcm of their numerators), so comparisons are plain integer
comparisons and ties are never lost.  Ranks are kept doubled for the same
reason: ``rank2 = 2 * rank`` is always an integer.
"""
from __future__ import annotations

import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import ContractError, ValidationError

Number = Union[int, str, Fraction]
Profile = tuple  # tuple[int, ...], machine index per job in input order

_RATIONAL = re.compile(r"^-?\d+(?:/\d+)?$")


def as_rational(value) -> Fraction:
    """Convert an int, a Fraction or a "p"/"p/q" string. Floats are refused."""
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL.match(text):
            raise ValidationError(f"not a rational string: {value!r}")
        if text.endswith("/0"):
            raise ValidationError(f"zero denominator: {value!r}")
        return Fraction(text)
    raise ValidationError(f"not an exact rational: {value!r} ({type(value).__name__})")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Job:
    id: str
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "length", as_rational(self.length))
        if self.length <= 0:
            raise ValidationError(f"job {self.id!r}: length must be positive, got {self.length}")


@dataclass(frozen=True)
class Machine:
    id: str
    rate: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "rate", as_rational(self.rate))
        if self.rate <= 0:
            raise ValidationError(f"machine {self.id!r}: rate must be positive, got {self.rate}")


@dataclass(frozen=True)
class CompetitionStructure:
    """Partition of the jobs into competition sets.

    ``single`` puts every job in one set (the default model), ``singletons``
    gives every job its own set, which turns rank into a constant and leaves
    completion time as the only objective.
    """

    mode: str = "single"
    sets: tuple = ()

    def __post_init__(self):
        if self.mode not in ("single", "singletons", "sets"):
            raise ValidationError(f"unknown competition mode {self.mode!r}")
        sets = tuple(tuple(str(j) for j in s) for s in self.sets)
        if self.mode != "sets" and sets:
            raise ValidationError(f"competition mode {self.mode!r} takes no sets")
        object.__setattr__(self, "sets", sets)

    @classmethod
    def single(cls):
        return cls("single")

    @classmethod
    def singletons(cls):
        return cls("singletons")

    @classmethod
    def partition(cls, sets):
        return cls("sets", tuple(tuple(s) for s in sets))

    def groups(self, job_ids: Sequence[str]) -> tuple:
        """Resolve to an explicit partition, validated against ``job_ids``."""
        if self.mode == "single":
            return (tuple(job_ids),)
        if self.mode == "singletons":
            return tuple((j,) for j in job_ids)
        known = set(job_ids)
        seen = set()
        for k, s in enumerate(self.sets):
            if not s:
                raise ValidationError(f"competition.sets[{k}] is empty")
            for j in s:
                if j not in known:
                    raise ValidationError(f"competition.sets[{k}]: unknown job {j!r}")
                if j in seen:
                    raise ValidationError(f"competition.sets[{k}]: job {j!r} appears in two sets")
                seen.add(j)
        missing = [j for j in job_ids if j not in seen]
        if missing:
            raise ValidationError(f"competition.sets: job {missing[0]!r} is not covered")
        return self.sets


def _check_permutation(order, job_ids, where):
    known = set(job_ids)
    seen = set()
    for j in order:
        if j not in known:
            raise ValidationError(f"{where}: unknown job {j!r}")
        if j in seen:
            raise ValidationError(f"{where}: job {j!r} repeated")
        seen.add(j)
    for j in job_ids:
        if j not in seen:
            raise ValidationError(f"{where}: job {j!r} missing")


@dataclass(frozen=True)
class Game:
    """Jobs, machines, priority lists and a competition structure.

    ``lists`` holds one job ordering per machine.  ``declared_global`` only
    records how the game was written down; use :attr:`is_global` for the
    semantic test (all lists equal).  Games whose lists order competition sets
    rather than jobs (the seniority model) carry ``set_lists`` instead and are
    handled by :mod:`ranksched.competition` only.
    """

    jobs: tuple
    machines: tuple
    lists: tuple = ()
    declared_global: bool = False
    competition: CompetitionStructure = field(default_factory=CompetitionStructure)
    set_lists: Optional[tuple] = None

    def __post_init__(self):
        jobs = tuple(self.jobs)
        machines = tuple(self.machines)
        if not jobs:
            raise ValidationError("jobs: at least one job is required")
        if not machines:
            raise ValidationError("machines: at least one machine is required")
        ids = [j.id for j in jobs]
        if len(set(ids)) != len(ids):
            dup = next(j for j in ids if ids.count(j) > 1)
            raise ValidationError(f"jobs: duplicate id {dup!r}")
        mids = [mc.id for mc in machines]
        if len(set(mids)) != len(mids):
            dup = next(i for i in mids if mids.count(i) > 1)
            raise ValidationError(f"machines: duplicate id {dup!r}")
        object.__setattr__(self, "jobs", jobs)
        object.__setattr__(self, "machines", machines)
        groups = self.competition.groups(ids)
        m, n = len(machines), len(jobs)

        if self.set_lists is not None:
            if self.lists:
                raise ValidationError("priorities: give either job lists or set-level lists")
            set_lists = tuple(tuple(int(x) for x in lst) for lst in self.set_lists)
            if len(set_lists) != m:
                raise ValidationError(
                    f"priorities.lists: expected {m} set-level lists, got {len(set_lists)}")
            for i, lst in enumerate(set_lists):
                if sorted(lst) != list(range(len(groups))):
                    raise ValidationError(
                        f"priorities.lists[{i}]: not a permutation of the {len(groups)} competition sets")
            object.__setattr__(self, "set_lists", set_lists)
            lists = ()
        else:
            lists = tuple(tuple(str(j) for j in lst) for lst in self.lists)
            if self.declared_global and len(lists) == 1 and m > 1:
                lists = lists * m
            if len(lists) != m:
                raise ValidationError(f"priorities.lists: expected {m} lists, got {len(lists)}")
            for i, lst in enumerate(lists):
                _check_permutation(lst, ids, f"priorities.lists[{i}]")
            if self.declared_global and any(lst != lists[0] for lst in lists):
                raise ValidationError("priorities: declared global but lists differ")
        object.__setattr__(self, "lists", lists)

        idx = {j: k for k, j in enumerate(ids)}
        den = lcm(*(j.length.denominator for j in jobs))
        num = lcm(*(mc.rate.numerator for mc in machines))
        w = tuple(int(j.length * den) for j in jobs)
        # 1/r_i scaled by num is an integer
        f = tuple(int(num / mc.rate) for mc in machines)
        group_of = [0] * n
        members = []
        for g, s in enumerate(groups):
            members.append(tuple(idx[j] for j in s))
            for j in s:
                group_of[idx[j]] = g
        cache = {
            "_idx": idx,
            "_w": w,
            "_f": f,
            "_scale": den * num,
            "_group": tuple(group_of),
            "_members": tuple(members),
            "_groups": tuple(tuple(s) for s in groups),
        }
        if lists:
            order = tuple(tuple(idx[j] for j in lst) for lst in lists)
            pos = []
            for o in order:
                p = [0] * n
                for k, j in enumerate(o):
                    p[j] = k
                pos.append(tuple(p))
            cache["_order"] = order
            cache["_pos"] = tuple(pos)
        else:
            cache["_order"] = None
            cache["_pos"] = None
        for key, value in cache.items():
            object.__setattr__(self, key, value)

    # ---- convenience views -------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def m(self) -> int:
        return len(self.machines)

    @property
    def job_ids(self) -> tuple:
        return tuple(j.id for j in self.jobs)

    @property
    def machine_ids(self) -> tuple:
        return tuple(mc.id for mc in self.machines)

    @property
    def lengths(self) -> tuple:
        return tuple(j.length for j in self.jobs)

    @property
    def rates(self) -> tuple:
        return tuple(mc.rate for mc in self.machines)

    @property
    def is_unit(self) -> bool:
        return all(j.length == 1 for j in self.jobs)

    @property
    def is_identical(self) -> bool:
        return all(mc.rate == self.machines[0].rate for mc in self.machines)

    @property
    def is_global(self) -> bool:
        return bool(self.lists) and all(lst == self.lists[0] for lst in self.lists)

    @property
    def is_set_level(self) -> bool:
        return self.set_lists is not None

    @property
    def total_work(self) -> Fraction:
        return sum(self.lengths, Fraction(0))

    @property
    def groups(self) -> tuple:
        return self._groups

    def index(self, job_id) -> int:
        try:
            return self._idx[str(job_id)]
        except KeyError:
            raise ValidationError(f"unknown job id {job_id!r}") from None

    def machine_index(self, machine) -> int:
        if isinstance(machine, int) and not isinstance(machine, bool):
            if 0 <= machine < self.m:
                return machine
            raise ValidationError(f"machine index {machine} out of range 0..{self.m - 1}")
        mids = self.machine_ids
        if machine in mids:
            return mids.index(machine)
        raise ValidationError(f"unknown machine id {machine!r}")

    def precedes(self, machine: int, a, b) -> bool:
        """True iff job ``a`` has higher priority than ``b`` on ``machine``."""
        self._need_job_lists()
        pos = self._pos[machine]
        return pos[self.index(a)] < pos[self.index(b)]

    def with_competition(self, competition) -> "Game":
        return Game(self.jobs, self.machines, self.lists, self.declared_global,
                    _as_competition(competition), self.set_lists)

    def _need_job_lists(self):
        if self._order is None:
            raise ContractError("operation needs job-level priority lists; this game has set-level lists")


def _as_competition(competition) -> CompetitionStructure:
    if competition is None:
        return CompetitionStructure()
    if isinstance(competition, CompetitionStructure):
        return competition
    if isinstance(competition, str):
        return CompetitionStructure(competition)
    return CompetitionStructure.partition(competition)


def make_game(lengths, rates=2, *, priority=None, lists=None, set_lists=None,
              competition=None) -> Game:
    """Build a :class:`Game` from loose Python values.

    ``lengths`` is a mapping id -> length or a sequence of lengths (ids become
    "1".."n").  ``rates`` is a mapping, a sequence (ids "M1".."Mm") or an int
    m for m unit-rate machines.  Give at most one of ``priority`` (a global
    list), ``lists`` (one per machine) and ``set_lists``; by default the global
    list follows job input order.
    """
    if isinstance(lengths, Mapping):
        jobs = tuple(Job(str(k), v) for k, v in lengths.items())
    else:
        jobs = tuple(Job(str(k + 1), v) for k, v in enumerate(lengths))
    if isinstance(rates, int) and not isinstance(rates, bool):
        machines = tuple(Machine(f"M{i + 1}", 1) for i in range(rates))
    elif isinstance(rates, Mapping):
        machines = tuple(Machine(str(k), v) for k, v in rates.items())
    else:
        machines = tuple(Machine(f"M{i + 1}", v) for i, v in enumerate(rates))
    given = sum(x is not None for x in (priority, lists, set_lists))
    if given > 1:
        raise ValidationError("give only one of priority, lists, set_lists")
    comp = _as_competition(competition)
    if set_lists is not None:
        return Game(jobs, machines, (), False, comp, tuple(tuple(s) for s in set_lists))
    if lists is not None:
        return Game(jobs, machines, tuple(tuple(str(j) for j in lst) for lst in lists), False, comp)
    if priority is None:
        priority = [j.id for j in jobs]
    return Game(jobs, machines, (tuple(str(j) for j in priority),), True, comp)


# ---- profiles -----------------------------------------------------------------

def as_profile(game: Game, profile) -> Profile:
    """Normalise a profile: a sequence of machine indices, or a mapping from
    job id to machine id or index."""
    m = game.m
    if isinstance(profile, Mapping):
        out = [None] * game.n
        for j, mach in profile.items():
            out[game.index(j)] = game.machine_index(mach)
        missing = [game.jobs[k].id for k, v in enumerate(out) if v is None]
        if missing:
            raise ValidationError(f"profile: job {missing[0]!r} is not assigned")
        return tuple(out)
    out = tuple(profile)
    if len(out) != game.n:
        raise ValidationError(f"profile has {len(out)} entries for {game.n} jobs")
    for k, v in enumerate(out):
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < m:
            raise ValidationError(f"profile[{k}] = {v!r} is not a machine index in 0..{m - 1}")
    return out


def profile_to_mapping(game: Game, profile: Profile) -> dict:
    return {j.id: game.machines[i].id for j, i in zip(game.jobs, profile)}


# ---- integer kernels (shared with the other modules) --------------------------

def _completion(g: Game, s) -> list:
    """Scaled completion times, indexed by job."""
    C = [0] * len(s)
    w, f = g._w, g._f
    for i, order in enumerate(g._order):
        acc = 0
        fi = f[i]
        for j in order:
            if s[j] == i:
                acc += w[j]
                C[j] = acc * fi
    return C


def _rank2_all(g: Game, C) -> list:
    """Doubled ranks within each competition set."""
    r2 = [0] * len(C)
    for members in g._members:
        vals = sorted(C[k] for k in members)
        for k in members:
            c = C[k]
            r2[k] = bisect_left(vals, c) + bisect_right(vals, c) + 1
    return r2


def _deviation(g: Game, s, C, j: int, z: int):
    """(rank2, scaled completion) of job j after moving to machine z."""
    i = s[j]
    w = g._w
    wj = w[j]
    fz = g._f[z]
    before = 0
    for k in g._order[z]:
        if k == j:
            break
        if s[k] == z:
            before += w[k]
    cj = (before + wj) * fz
    pos_i, pos_z = g._pos[i], g._pos[z]
    pi, pz = pos_i[j], pos_z[j]
    shift_i = wj * g._f[i]
    shift_z = wj * fz
    less = eq = 0
    for k in g._members[g._group[j]]:
        if k == j:
            continue
        ck = C[k]
        sk = s[k]
        if sk == i:
            if pos_i[k] > pi:
                ck -= shift_i
        elif sk == z:
            if pos_z[k] > pz:
                ck += shift_z
        if ck < cj:
            less += 1
        elif ck == cj:
            eq += 1
    return 2 * less + eq + 2, cj


def _first_deviation(g: Game, s, C=None, r2=None):
    """First beneficial (job index, machine) in input order, or None."""
    if C is None:
        C = _completion(g, s)
    if r2 is None:
        r2 = _rank2_all(g, C)
    m = len(g._f)
    for j in range(len(s)):
        cur = (r2[j], C[j])
        sj = s[j]
        for z in range(m):
            if z != sj and _deviation(g, s, C, j, z) < cur:
                return j, z
    return None


def _best_targets(g: Game, s, C, r2, j: int):
    cur = (r2[j], C[j])
    best = cur
    targets = [s[j]]
    for z in range(len(g._f)):
        if z == s[j]:
            continue
        val = _deviation(g, s, C, j, z)
        if val < best:
            best = val
            targets = [z]
        elif val == best:
            targets.append(z)
    return sorted(targets), best < cur


def _suboptimal(g: Game, s, C=None, r2=None) -> list:
    if C is None:
        C = _completion(g, s)
    if r2 is None:
        r2 = _rank2_all(g, C)
    m = len(g._f)
    out = []
    for j in range(len(s)):
        cur = (r2[j], C[j])
        sj = s[j]
        for z in range(m):
            if z != sj and _deviation(g, s, C, j, z) < cur:
                out.append(j)
                break
    return out


# ---- public operations --------------------------------------------------------

@dataclass(frozen=True)
class ScheduleView:
    """The schedule a profile induces."""

    machine_jobs: tuple  # per machine, job ids in processing order
    completion: dict  # job id -> Fraction
    prefix_work: dict  # job id -> Fraction
    delay_sets: dict  # job id -> tuple of job ids processed no later, itself included
    loads: tuple  # per machine, total length assigned

    def makespan(self) -> Fraction:
        return max(self.completion.values())


def build_schedule(game: Game, profile) -> ScheduleView:
    game._need_job_lists()
    s = as_profile(game, profile)
    machine_jobs, completion, prefix, delay = [], {}, {}, {}
    loads = []
    for i, order in enumerate(game._order):
        rate = game.machines[i].rate
        acc = Fraction(0)
        seq = []
        for k in order:
            if s[k] == i:
                job = game.jobs[k]
                acc += job.length
                seq.append(job.id)
                prefix[job.id] = acc
                completion[job.id] = acc / rate
                delay[job.id] = tuple(seq)
        machine_jobs.append(tuple(seq))
        loads.append(acc)
    return ScheduleView(tuple(machine_jobs), completion, prefix, delay, tuple(loads))


def completion_times(game: Game, profile) -> dict:
    game._need_job_lists()
    s = as_profile(game, profile)
    C = _completion(game, s)
    return {job.id: Fraction(c, game._scale) for job, c in zip(game.jobs, C)}


def ranks(game: Game, profile) -> dict:
    """Rank of every job within its competition set, ties averaged."""
    game._need_job_lists()
    s = as_profile(game, profile)
    r2 = _rank2_all(game, _completion(game, s))
    return {job.id: Fraction(r, 2) for job, r in zip(game.jobs, r2)}


def makespan(game: Game, profile) -> Fraction:
    game._need_job_lists()
    s = as_profile(game, profile)
    return Fraction(max(_completion(game, s)), game._scale)


def prefers(game: Game, job, s, s_alt) -> bool:
    """Whether ``job`` strictly prefers ``s_alt`` to ``s``: lower rank, or the
    same rank and an earlier completion."""
    game._need_job_lists()
    j = game.index(job)
    a, b = as_profile(game, s), as_profile(game, s_alt)
    for k in range(game.n):
        if k != j and a[k] != b[k]:
            raise ContractError(
                f"profiles differ in the strategy of {game.jobs[k].id!r}, not only {job!r}")
    Ca, Cb = _completion(game, a), _completion(game, b)
    ra, rb = _rank2_all(game, Ca), _rank2_all(game, Cb)
    return (rb[j], Cb[j]) < (ra[j], Ca[j])


def best_responses(game: Game, profile, job) -> set:
    """Machines minimising (rank, completion) for ``job``, others fixed."""
    game._need_job_lists()
    s = as_profile(game, profile)
    C = _completion(game, s)
    targets, _ = _best_targets(game, s, C, _rank2_all(game, C), game.index(job))
    return set(targets)


def suboptimal_jobs(game: Game, profile) -> list:
    """Jobs with a beneficial deviation, in input order."""
    game._need_job_lists()
    s = as_profile(game, profile)
    return [game.jobs[j].id for j in _suboptimal(game, s)]


def beneficial_deviation(game: Game, profile):
    """A witness ``(job id, machine index)`` against stability, or None.

    The job is the first suboptimal one in input order and the machine is the
    lowest-index beneficial target for it.
    """
    game._need_job_lists()
    s = as_profile(game, profile)
    hit = _first_deviation(game, s)
    if hit is None:
        return None
    return game.jobs[hit[0]].id, hit[1]


def is_ne(game: Game, profile) -> bool:
    return beneficial_deviation(game, profile) is None


def cost_reducing_deviation(game: Game, profile):
    """A move that strictly lowers some job's completion time, or None."""
    game._need_job_lists()
    s = as_profile(game, profile)
    C = _completion(game, s)
    for j in range(game.n):
        for z in range(game.m):
            if z != s[j] and _deviation(game, s, C, j, z)[1] < C[j]:
                return game.jobs[j].id, z
    return None


def is_cost_stable(game: Game, profile) -> bool:
    return cost_reducing_deviation(game, profile) is None


def has_distinct_completions(game: Game, profile) -> bool:
    """No two jobs share a completion time.

    Together with :func:`is_cost_stable` this is a sufficient condition for a
    NE: without ties no move can lower a rank without lowering the completion
    time too.
    """
    game._need_job_lists()
    C = _completion(game, as_profile(game, profile))
    return len(set(C)) == len(C)


def jobs_on(game: Game, profile, machine: int) -> list:
    """Job indices on ``machine`` in processing order."""
    return [k for k in game._order[machine] if profile[k] == machine]


def iter_job_ids(game: Game, indices: Iterable[int]) -> list:
    return [game.jobs[k].id for k in indices]

"""Brute-force ground truth: every NE, the optimum, PoA and PoS.

Profiles are enumerated by counting in base m over the jobs in input order,
the first job being the most significant digit.  A scan over an index range
is self-contained, so ranges can be handed to worker processes and merged.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

from .core import (CompetitionStructure, Game, _completion, _first_deviation, _rank2_all,
                   format_rational)
from .errors import CapExceededError, UndefinedResultError

DEFAULT_CAP = 2 ** 24


def profile_cap(cap: Optional[int] = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("RANKSCHED_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_CAP


def check_cap(game: Game, cap=None, force=False) -> int:
    count = game.m ** game.n
    limit = profile_cap(cap)
    if count > limit and not force:
        raise CapExceededError(count, limit)
    return count


def profile_at(index: int, n: int, m: int) -> tuple:
    digits = [0] * n
    for k in range(n - 1, -1, -1):
        index, digits[k] = divmod(index, m)
    return tuple(digits)


def iter_profiles(game: Game, start: int = 0, stop: Optional[int] = None):
    n, m = game.n, game.m
    total = m ** n
    stop = total if stop is None else stop
    if start == 0 and stop == total:
        yield from product(range(m), repeat=n)
        return
    s = list(profile_at(start, n, m))
    for _ in range(start, stop):
        yield tuple(s)
        k = n - 1
        while k >= 0:
            s[k] += 1
            if s[k] < m:
                break
            s[k] = 0
            k -= 1


@dataclass
class _Partial:
    ne: list = field(default_factory=list)
    opt: Optional[int] = None
    opt_profile: Optional[tuple] = None
    ne_min: Optional[int] = None
    ne_max: Optional[int] = None
    count: int = 0

    def merge(self, other: "_Partial") -> "_Partial":
        # ranges arrive in ascending order, so first-wins ties stay first
        self.ne.extend(other.ne)
        if other.opt is not None and (self.opt is None or other.opt < self.opt):
            self.opt, self.opt_profile = other.opt, other.opt_profile
        for attr, better in (("ne_min", min), ("ne_max", max)):
            a, b = getattr(self, attr), getattr(other, attr)
            setattr(self, attr, b if a is None else a if b is None else better(a, b))
        self.count += other.count
        return self


def _scan(game: Game, start: int, stop: int) -> _Partial:
    acc = _Partial()
    for s in iter_profiles(game, start, stop):
        C = _completion(game, s)
        mk = max(C)
        acc.count += 1
        if acc.opt is None or mk < acc.opt:
            acc.opt, acc.opt_profile = mk, s
        if _first_deviation(game, s, C, _rank2_all(game, C)) is None:
            acc.ne.append(s)
            acc.ne_min = mk if acc.ne_min is None else min(acc.ne_min, mk)
            acc.ne_max = mk if acc.ne_max is None else max(acc.ne_max, mk)
    return acc


def _scan_job(args):
    return _scan(*args)


def scan(game: Game, cap=None, force=False, threads: int = 1) -> _Partial:
    game._need_job_lists()
    total = check_cap(game, cap, force)
    if threads <= 1 or total < 4096:
        return _scan(game, 0, total)
    chunks = max(threads * 4, 1)
    bounds = [total * k // chunks for k in range(chunks + 1)]
    jobs = [(game, bounds[k], bounds[k + 1]) for k in range(chunks) if bounds[k] < bounds[k + 1]]
    acc = _Partial()
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(_scan_job, jobs):
            acc.merge(part)
    return acc


def enumerate_ne(game: Game, cap=None, force=False, threads: int = 1) -> list:
    return scan(game, cap, force, threads).ne


def first_ne(game: Game, cap=None, force=False) -> Optional[tuple]:
    game._need_job_lists()
    check_cap(game, cap, force)
    for s in iter_profiles(game):
        if _first_deviation(game, s) is None:
            return s
    return None


def ne_exists(game: Game, cap=None, force=False) -> bool:
    return first_ne(game, cap, force) is not None


def opt_makespan(game: Game, cap=None, force=False) -> tuple:
    """(OPT, first optimal profile in enumeration order)."""
    game._need_job_lists()
    check_cap(game, cap, force)
    best, arg = None, None
    for s in iter_profiles(game):
        mk = max(_completion(game, s))
        if best is None or mk < best:
            best, arg = mk, s
    return Fraction(best, game._scale), arg


@dataclass(frozen=True)
class OracleReport:
    ne_profiles: tuple
    opt_makespan: Fraction
    opt_profile: tuple
    poa: Optional[Fraction]
    pos: Optional[Fraction]
    profile_count: int
    W: Fraction
    game: Optional[Game] = field(default=None, repr=False, compare=False)

    @property
    def has_ne(self) -> bool:
        return bool(self.ne_profiles)

    def to_json(self, decimal: bool = False) -> dict:
        def q(x):
            return None if x is None else format_rational(x)

        out = {
            "ne_count": len(self.ne_profiles),
            "ne_profiles": [_digits(s) for s in self.ne_profiles],
            "opt_makespan": q(self.opt_makespan),
            "opt_profile": _digits(self.opt_profile),
            "poa": q(self.poa),
            "pos": q(self.pos),
            "profile_count": self.profile_count,
            "W": q(self.W),
        }
        if decimal:
            out["decimal"] = {k: _dec(v) for k, v in
                              (("opt_makespan", self.opt_makespan), ("poa", self.poa),
                               ("pos", self.pos), ("W", self.W))}
        return out

    def to_text(self, decimal: bool = False) -> str:
        rows = [
            ("profiles", str(self.profile_count), ""),
            ("NE count", str(len(self.ne_profiles)), ""),
            ("W", format_rational(self.W), _dec(self.W)),
            ("OPT", format_rational(self.opt_makespan), _dec(self.opt_makespan)),
            ("OPT profile", _digits(self.opt_profile), ""),
            ("PoA", "undefined" if self.poa is None else format_rational(self.poa), _dec(self.poa)),
            ("PoS", "undefined" if self.pos is None else format_rational(self.pos), _dec(self.pos)),
        ]
        return format_table(rows, decimal)


def format_table(rows, decimal=False) -> str:
    width0 = max(len(r[0]) for r in rows)
    width1 = max(len(r[1]) for r in rows)
    lines = []
    for name, value, dec in rows:
        line = f"{name:<{width0}}  {value:<{width1}}"
        if decimal and dec:
            line += f"  {dec}"
        lines.append(line.rstrip())
    return "\n".join(lines)


def _digits(s) -> str:
    if s is None:
        return ""
    return "".join(_digit(x) for x in s)


def _digit(x: int) -> str:
    return "0123456789abcdefghijklmnopqrstuvwxyz"[x] if x < 36 else f"[{x}]"


def _dec(x) -> str:
    return "" if x is None else f"{float(x):.6g}"


def analyze(game: Game, cap=None, force=False, threads: int = 1) -> OracleReport:
    acc = scan(game, cap, force, threads)
    scale = game._scale
    opt = Fraction(acc.opt, scale)
    poa = pos = None
    if acc.ne:
        poa = Fraction(acc.ne_max, scale) / opt
        pos = Fraction(acc.ne_min, scale) / opt
    return OracleReport(tuple(acc.ne), opt, acc.opt_profile, poa, pos, acc.count,
                        game.total_work, game)


def poa_pos(game: Game, cap=None, force=False, threads: int = 1) -> tuple:
    rep = analyze(game, cap, force, threads)
    if not rep.has_ne:
        raise UndefinedResultError("the game has no NE, so PoA and PoS are undefined")
    return rep.poa, rep.pos


def cost_only_poa_pos(game: Game, cap=None, force=False, threads: int = 1) -> tuple:
    """PoA and PoS of the same instance with every job in its own competition
    set, i.e. with plain completion-time utilities."""
    return poa_pos(game.with_competition(CompetitionStructure.singletons()), cap, force, threads)

"""Named instance families and the 3DM-3 hardness construction."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from string import ascii_lowercase
from typing import Optional

from .core import Game, Job, Machine, as_rational, make_game
from .errors import ContractError, ValidationError

FAMILIES = ("invpol-poa", "identical-pos", "q2-small-r", "q2-large-r",
            "g1", "g2", "g3", "g4", "g5", "sink-gprime")

_DEFAULTS = {
    "invpol-poa": {"k": 2},
    "identical-pos": {"m": 3},
    "q2-small-r": {"r": Fraction(1, 2)},
    "q2-large-r": {"r": Fraction(3, 4)},
    "g1": {"m": 3},
    "g2": {"m": 3},
    "g3": {"r": Fraction(1, 2)},
    "g4": {"r": Fraction(3, 4)},
    "g5": {"r": Fraction(1, 2)},
    "sink-gprime": {"r": Fraction(1, 2)},
}


@dataclass(frozen=True)
class FamilySpec:
    name: str
    m: Optional[int] = None
    k: Optional[int] = None
    r: Optional[Fraction] = None
    eps: Fraction = Fraction(1, 1000)

    def __post_init__(self):
        if self.name not in FAMILIES:
            raise ValidationError(f"unknown family {self.name!r}; choose from {', '.join(FAMILIES)}")
        for key, value in _DEFAULTS[self.name].items():
            if getattr(self, key) is None:
                object.__setattr__(self, key, value)
        if self.r is not None:
            object.__setattr__(self, "r", as_rational(self.r))
        object.__setattr__(self, "eps", as_rational(self.eps))


def _need(cond, message):
    if not cond:
        raise ValidationError(message)


def _rate(r):
    _need(0 < r <= 1, f"r must satisfy 0 < r <= 1, got {r}")


def _golden_low(r):
    # r <= (sqrt 5 - 1)/2  <=>  r^2 + r <= 1 for r > 0
    _need(r * r + r <= 1, f"r = {r} violates r^2 + r <= 1")


def _golden_high(r):
    _need(r * r + r > 1, f"r = {r} violates r^2 + r > 1")


def generate(spec: FamilySpec) -> Game:
    return _BUILDERS[spec.name](spec)


def _invpol_poa(spec):
    k = spec.k
    _need(isinstance(k, int) and k >= 1, f"k must be a positive integer, got {k}")
    units = [str(i) for i in range(1, 2 * k + 1)]
    lengths = {u: 1 for u in units}
    lengths["j*"] = 2 * k
    first = units[:k] + ["j*"] + units[k:]
    return make_game(lengths, 2, lists=[first, list(reversed(first))])


def _identical_pos(spec):
    """m(m-1) unit jobs and one job of length m.  Each list runs the unit
    jobs by index, except that machine i's own job of the last group of m
    leads that group; the long job comes last everywhere."""
    m = spec.m
    _need(isinstance(m, int) and m >= 2, f"m must be an integer >= 2, got {m}")
    units, lengths = _pos_units(m)
    head, tail = units[:m * (m - 2)], units[m * (m - 2):]
    lists = [head + [own] + [u for u in tail if u != own] + ["j*"] for own in tail]
    return make_game(lengths, m, lists=lists)


def identical_pos_moved_last(m: int) -> Game:
    """Variant whose machine i moves its own last-group job behind all other
    unit jobs.  For m >= 3 it has no NE at all, so it cannot witness the
    PoS bound; kept for comparison with :func:`generate`."""
    units, lengths = _pos_units(m)
    lists = []
    for i in range(1, m + 1):
        moved = units[m * (m - 2) + i - 1]
        lists.append([u for u in units if u != moved] + [moved, "j*"])
    return make_game(lengths, m, lists=lists)


def _pos_units(m):
    units = [str(i) for i in range(1, m * (m - 1) + 1)]
    lengths = {u: 1 for u in units}
    lengths["j*"] = m
    return units, lengths


def _q2_small_r(spec):
    r = spec.r
    _rate(r)
    _golden_low(r)
    return make_game({"a": 1, "b": 1 / r}, [1, r], lists=[["a", "b"], ["a", "b"]])


def _q2_large_r(spec):
    r = spec.r
    _rate(r)
    _golden_high(r)
    return make_game({"x": 1, "y": r * r + r - 1, "z": r + 1}, [1, r],
                     lists=[["x", "y", "z"], ["y", "x", "z"]])


def _g1(spec):
    m, eps = spec.m, spec.eps
    _need(isinstance(m, int) and m >= 2, f"m must be an integer >= 2, got {m}")
    _need(0 < eps < 1, f"eps must satisfy 0 < eps < 1, got {eps}")
    X = [f"x{i}" for i in range(3, m + 1)]
    Y = [f"y{i}" for i in range(3, m + 1)]
    lengths = {"a": m - 1, "b": 1 - eps, "c": eps, "d": m}
    lengths.update({x: m - 1 for x in X})
    lengths.update({y: 1 for y in Y})
    lists = [["b", "a", "c", *Y, "d", *X], ["a", "d", "c", *Y, "b", *X]]
    for i in range(3, m + 1):
        xi, yi = f"x{i}", f"y{i}"
        lists.append([xi, *[x for x in X if x != xi], yi, *[y for y in Y if y != yi],
                      "c", "d", "a", "b"])
    return make_game(lengths, m, lists=lists)


def _g2(spec):
    m, eps = spec.m, spec.eps
    _need(isinstance(m, int) and m >= 2, f"m must be an integer >= 2, got {m}")
    _need(0 < eps < Fraction(m - 1, m), f"eps must satisfy 0 < eps < (m-1)/m, got {eps}")
    X = []
    lengths = {"a": m - 1 - m * eps, "d": 1, "e": m}
    for i in range(3, m + 1):
        X += [f"x{i}a", f"x{i}b"]
        lengths[f"x{i}a"] = m - i + 1 + eps
        lengths[f"x{i}b"] = i - 2
    Y = [f"y{i}" for i in range(3, m + 1)]
    C = [f"c{i}" for i in range(1, m + 1)]
    lengths.update({y: 1 for y in Y})
    lengths.update({c: eps for c in C})
    lists = [[C[0], "a", *C[1:], "e", "d", *X, *Y],
             ["a", "d", *reversed(Y), "e", *C, *X]]
    for i in range(3, m + 1):
        xa, xb, yi = f"x{i}a", f"x{i}b", f"y{i}"
        lists.append([xa, yi, xb, "a", "d", "e", *C,
                      *[x for x in X if x not in (xa, xb)], *[y for y in Y if y != yi]])
    return make_game(lengths, m, lists=lists)


def _g3(spec):
    r, eps = spec.r, spec.eps
    _rate(r)
    _golden_low(r)
    _need(0 < eps < 1, f"eps must satisfy 0 < eps < 1, got {eps}")
    return make_game({"a": 1 - eps, "b": eps, "c": 1 / r}, [1, r],
                     lists=[["a", "c", "b"], ["a", "b", "c"]])


def _g4(spec):
    r = spec.r
    _rate(r)
    _golden_high(r)
    return make_game({"x": 1, "y": r * r + r - 1, "z": r + 1}, [1, r],
                     lists=[["x", "z", "y"], ["x", "y", "z"]])


def _g5(spec):
    r, eps = spec.r, spec.eps
    _rate(r)
    _need(0 < eps < r * r + r, f"eps must satisfy 0 < eps < r^2 + r, got {eps}")
    return make_game({"a": r * r, "b": r + 1 - r * r, "c": eps, "d": r * r + r - eps}, [1, r],
                     lists=[["a", "b", "c", "d"], ["a", "c", "d", "b"]])


def _sink_gprime(spec):
    r = spec.r
    _rate(r)
    return make_game({"a": 1, "b": r}, [1, r], lists=[["a", "b"], ["a", "b"]])


_BUILDERS = {
    "invpol-poa": _invpol_poa,
    "identical-pos": _identical_pos,
    "q2-small-r": _q2_small_r,
    "q2-large-r": _q2_large_r,
    "g1": _g1,
    "g2": _g2,
    "g3": _g3,
    "g4": _g4,
    "g5": _g5,
    "sink-gprime": _sink_gprime,
}


# ---- 3DM-3 -------------------------------------------------------------------------

@dataclass(frozen=True)
class ThreeDMInstance:
    """Triples over X, Y, Z = {1..n}; triple numbers are 1-based as well."""

    n: int
    triples: tuple

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        triples = []
        for t, tri in enumerate(self.triples, start=1):
            tri = tuple(tri)
            if len(tri) != 3:
                raise ValidationError(f"triples[{t - 1}]: expected 3 indices")
            for v in tri:
                if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= self.n:
                    raise ValidationError(f"triples[{t - 1}]: index {v!r} outside 1..{self.n}")
            triples.append(tri)
        object.__setattr__(self, "triples", tuple(triples))

    def occurrences(self) -> dict:
        """Element name ("x1", "y2", ...) -> number of triples containing it."""
        counts = {f"{axis}{i}": 0 for axis in "xyz" for i in range(1, self.n + 1)}
        for tri in self.triples:
            for axis, v in zip("xyz", tri):
                counts[f"{axis}{v}"] += 1
        return counts


@dataclass(frozen=True)
class Normalization:
    """Outcome of forcing single-occurrence triples.

    ``forced`` and ``kept`` are 1-based triple numbers of the input; the
    reduced instance re-indexes the still uncovered elements in ascending
    order.  ``feasible`` is False once an element has no triple left.
    """

    forced: tuple
    kept: tuple
    feasible: bool
    reduced: Optional[ThreeDMInstance]
    reason: str = ""


def normalize(T: ThreeDMInstance) -> Normalization:
    """Repeatedly force the lowest-numbered triple holding an element that
    occurs once, dropping every triple that clashes with it."""
    active = list(range(len(T.triples)))
    covered = set()
    forced = []

    def elems(t):
        return [f"{axis}{v}" for axis, v in zip("xyz", T.triples[t])]

    all_elems = [f"{axis}{i}" for axis in "xyz" for i in range(1, T.n + 1)]
    while True:
        counts = {e: 0 for e in all_elems if e not in covered}
        for t in active:
            for e in elems(t):
                if e in counts:
                    counts[e] += 1
        empty = [e for e, c in counts.items() if c == 0]
        if empty:
            return Normalization(tuple(t + 1 for t in forced), tuple(t + 1 for t in active),
                                 False, None, f"element {empty[0]} occurs in no remaining triple")
        pick = None
        for t in active:
            if any(counts[e] == 1 for e in elems(t)):
                pick = t
                break
        if pick is None:
            break
        forced.append(pick)
        covered.update(elems(pick))
        active = [t for t in active if t != pick and not covered.intersection(elems(t))]
    if not counts:
        return Normalization(tuple(t + 1 for t in forced), (), True, None)
    remap = {}
    for axis in "xyz":
        left = sorted(int(e[1:]) for e in counts if e[0] == axis)
        for new, old in enumerate(left, start=1):
            remap[f"{axis}{old}"] = new
    n2 = len(counts) // 3
    triples = tuple(tuple(remap[e] for e in elems(t)) for t in active)
    return Normalization(tuple(t + 1 for t in forced), tuple(t + 1 for t in active), True,
                         ThreeDMInstance(n2, triples))


def _dummy_ids(i: int, count: int) -> list:
    if count == 1:
        return [f"d{i}"]
    return [f"d{i}{ascii_lowercase[k]}" for k in range(count)]


def _dummies(T: ThreeDMInstance) -> dict:
    tau = {i: 0 for i in range(1, T.n + 1)}
    for x, _, _ in T.triples:
        tau[x] += 1
    return {i: _dummy_ids(i, tau[i] - 1) if tau[i] > 1 else [] for i in tau}


def reduce_3dm(T: ThreeDMInstance, strict: bool = True) -> Game:
    """Scheduling game with a NE iff T has a perfect matching.

    With ``strict`` every element must occur two or three times, as the
    construction assumes; otherwise only a triple for every x is required.
    """
    occ = T.occurrences()
    for e, c in occ.items():
        if strict and c not in (2, 3):
            raise ValidationError(f"element {e} occurs {c} times; expected 2 or 3 (normalize first)")
        if e[0] == "x" and c == 0:
            raise ValidationError(f"element {e} occurs in no triple")
    n, size = T.n, len(T.triples)
    D = _dummies(T)
    all_d = [d for i in range(1, n + 1) for d in D[i]]
    Y = [f"y{j}" for j in range(1, n + 1)]
    Z = [f"z{k}" for k in range(1, n + 1)]
    U = [f"u{l}" for l in range(1, size + 1)]
    V = [f"v{l}" for l in range(1, size + 1)]
    jobs = [Job(j, 1) for j in Y + Z] + [Job(d, 2) for d in all_d] + [Job(j, 1) for j in U + V]
    machines = [Machine(f"M{l}", 1) for l in range(1, size + 1)]
    lists = []
    for l, (x, y, z) in enumerate(T.triples, start=1):
        yj, zk, vl = f"y{y}", f"z{z}", f"v{l}"
        lists.append(tuple(
            D[x] + [yj, zk] + U + [vl] + [v for v in V if v != vl]
            + [d for d in all_d if d not in D[x]]
            + [j for j in Y if j != yj] + [k for k in Z if k != zk]))
    return Game(tuple(jobs), tuple(machines), tuple(lists), False)


def _check_matching(T: ThreeDMInstance, matching) -> list:
    chosen = sorted(set(matching))
    if len(chosen) != T.n or len(chosen) != len(list(matching)):
        raise ValidationError(f"a perfect matching has exactly {T.n} distinct triples")
    for t in chosen:
        if not 1 <= t <= len(T.triples):
            raise ValidationError(f"triple number {t} outside 1..{len(T.triples)}")
    for axis in range(3):
        if sorted(T.triples[t - 1][axis] for t in chosen) != list(range(1, T.n + 1)):
            raise ValidationError(f"triples {chosen} do not cover axis {'xyz'[axis]} exactly once")
    return chosen


def matching_profile(T: ThreeDMInstance, matching, game: Optional[Game] = None) -> tuple:
    """The stable profile built from a perfect matching (1-based triple numbers).

    A matched machine runs its y and z jobs; the other machines of the same
    x type each take one dummy of that type; every machine then runs its own
    u job and its own v job, so every load is 4.
    """
    chosen = _check_matching(T, matching)
    game = game or reduce_3dm(T, strict=False)
    D = _dummies(T)
    place = {}
    for t in chosen:
        x, y, z = T.triples[t - 1]
        place[f"y{y}"] = t
        place[f"z{z}"] = t
        others = [l for l, tri in enumerate(T.triples, start=1) if tri[0] == x and l != t]
        for d, l in zip(D[x], others):
            place[d] = l
    for l in range(1, len(T.triples) + 1):
        place[f"u{l}"] = l
        place[f"v{l}"] = l
    return tuple(place[j] - 1 for j in game.job_ids)


def solve_3dm_bruteforce(T: ThreeDMInstance, limit: int = 20):
    """A perfect matching as sorted 1-based triple numbers, or None."""
    if len(T.triples) > limit:
        raise ContractError(f"{len(T.triples)} triples exceed the brute-force limit of {limit}")
    by_x = {i: [] for i in range(1, T.n + 1)}
    for t, (x, _, _) in enumerate(T.triples, start=1):
        by_x[x].append(t)
    used_y, used_z, chosen = set(), set(), []

    def search(x):
        if x > T.n:
            return True
        for t in by_x[x]:
            _, y, z = T.triples[t - 1]
            if y in used_y or z in used_z:
                continue
            used_y.add(y)
            used_z.add(z)
            chosen.append(t)
            if search(x + 1):
                return True
            chosen.pop()
            used_y.discard(y)
            used_z.discard(z)
        return False

    return tuple(sorted(chosen)) if search(1) else None

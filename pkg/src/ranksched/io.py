"""JSON formats for instances, profiles and 3DM inputs.

Rationals are written as "p" or "p/q" strings.  Parsing is strict: unknown
keys are rejected and every error names the offending field.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .core import (CompetitionStructure, Game, Job, Machine, as_profile, as_rational,
                   format_rational, profile_to_mapping)
from .errors import ValidationError
from .instances import ThreeDMInstance


def _load(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _obj(value, path, allowed, required=()):
    if not isinstance(value, dict):
        raise ValidationError(f"{path}: expected an object")
    for key in value:
        if key not in allowed:
            raise ValidationError(f"{path}: unknown field {key!r}")
    for key in required:
        if key not in value:
            raise ValidationError(f"{path}: missing field {key!r}")
    return value


def _list(value, path):
    if not isinstance(value, list):
        raise ValidationError(f"{path}: expected a list")
    return value


def _id(value, path):
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{path}: expected a non-empty string id")
    return value


def _rational(value, path) -> Fraction:
    if isinstance(value, float):
        raise ValidationError(f"{path}: floats are not exact; write \"p/q\"")
    try:
        return as_rational(value)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def instance_from_dict(data) -> Game:
    _obj(data, "instance", ("machines", "jobs", "priorities", "competition"), ("machines", "jobs"))
    machines = []
    for k, item in enumerate(_list(data["machines"], "machines")):
        path = f"machines[{k}]"
        _obj(item, path, ("id", "rate"), ("id", "rate"))
        rate = _rational(item["rate"], f"{path}.rate")
        if rate <= 0:
            raise ValidationError(f"{path}.rate: must be positive")
        machines.append(Machine(_id(item["id"], f"{path}.id"), rate))
    jobs = []
    for k, item in enumerate(_list(data["jobs"], "jobs")):
        path = f"jobs[{k}]"
        _obj(item, path, ("id", "length"), ("id", "length"))
        length = _rational(item["length"], f"{path}.length")
        if length <= 0:
            raise ValidationError(f"{path}.length: must be positive")
        jobs.append(Job(_id(item["id"], f"{path}.id"), length))

    comp_data = data.get("competition", {"mode": "single"})
    _obj(comp_data, "competition", ("mode", "sets"), ("mode",))
    mode = comp_data["mode"]
    if mode not in ("single", "singletons", "sets"):
        raise ValidationError(f"competition.mode: unknown mode {mode!r}")
    if mode == "sets":
        if "sets" not in comp_data:
            raise ValidationError("competition: missing field 'sets'")
        sets = [[_id(j, f"competition.sets[{k}][{i}]") for i, j in enumerate(_list(s, f"competition.sets[{k}]"))]
                for k, s in enumerate(_list(comp_data["sets"], "competition.sets"))]
        competition = CompetitionStructure.partition(sets)
    else:
        if "sets" in comp_data:
            raise ValidationError(f"competition: mode {mode!r} takes no 'sets'")
        competition = CompetitionStructure(mode)

    pri = data.get("priorities", {"mode": "global", "list": [j.id for j in jobs]})
    _obj(pri, "priorities", ("mode", "list", "lists"), ("mode",))
    pmode = pri["mode"]
    if pmode == "global":
        _obj(pri, "priorities", ("mode", "list"), ("mode", "list"))
        order = [_id(j, f"priorities.list[{i}]") for i, j in enumerate(_list(pri["list"], "priorities.list"))]
        return Game(tuple(jobs), tuple(machines), (tuple(order),), True, competition)
    if pmode == "per_machine":
        _obj(pri, "priorities", ("mode", "lists"), ("mode", "lists"))
        lists = []
        for k, lst in enumerate(_list(pri["lists"], "priorities.lists")):
            lists.append(tuple(_id(j, f"priorities.lists[{k}][{i}]")
                               for i, j in enumerate(_list(lst, f"priorities.lists[{k}]"))))
        return Game(tuple(jobs), tuple(machines), tuple(lists), False, competition)
    if pmode == "set_level":
        _obj(pri, "priorities", ("mode", "lists"), ("mode", "lists"))
        count = len(competition.groups([j.id for j in jobs]))
        names = {f"S{l + 1}": l for l in range(count)}
        lists = []
        for k, lst in enumerate(_list(pri["lists"], "priorities.lists")):
            row = []
            for i, name in enumerate(_list(lst, f"priorities.lists[{k}]")):
                if name not in names:
                    raise ValidationError(f"priorities.lists[{k}][{i}]: unknown set {name!r}")
                row.append(names[name])
            lists.append(tuple(row))
        return Game(tuple(jobs), tuple(machines), (), False, competition, tuple(lists))
    raise ValidationError(f"priorities.mode: unknown mode {pmode!r}")


def instance_to_dict(game: Game) -> dict:
    out = {
        "machines": [{"id": mc.id, "rate": format_rational(mc.rate)} for mc in game.machines],
        "jobs": [{"id": j.id, "length": format_rational(j.length)} for j in game.jobs],
    }
    if game.is_set_level:
        out["priorities"] = {"mode": "set_level",
                             "lists": [[f"S{l + 1}" for l in lst] for lst in game.set_lists]}
    elif game.declared_global:
        out["priorities"] = {"mode": "global", "list": list(game.lists[0])}
    else:
        out["priorities"] = {"mode": "per_machine", "lists": [list(lst) for lst in game.lists]}
    comp = game.competition
    out["competition"] = {"mode": comp.mode}
    if comp.mode == "sets":
        out["competition"]["sets"] = [list(s) for s in comp.sets]
    return out


def parse_instance(text: str) -> Game:
    return instance_from_dict(_load(text, "instance"))


def serialize_instance(game: Game) -> str:
    return json.dumps(instance_to_dict(game), indent=2) + "\n"


def parse_profile(text: str, game: Game) -> tuple:
    data = _load(text, "profile")
    _obj(data, "profile", ("assignment",), ("assignment",))
    assignment = _obj(data["assignment"], "profile.assignment", set(game.job_ids))
    try:
        return as_profile(game, assignment)
    except ValidationError as exc:
        raise ValidationError(f"profile.assignment: {exc}") from None


def serialize_profile(game: Game, profile) -> str:
    return json.dumps({"assignment": profile_to_mapping(game, profile)}, indent=2) + "\n"


def parse_3dm(text: str) -> ThreeDMInstance:
    data = _load(text, "3dm")
    _obj(data, "3dm", ("n", "triples"), ("n", "triples"))
    triples = []
    for k, tri in enumerate(_list(data["triples"], "3dm.triples")):
        tri = _list(tri, f"3dm.triples[{k}]")
        if len(tri) != 3 or not all(isinstance(v, int) and not isinstance(v, bool) for v in tri):
            raise ValidationError(f"3dm.triples[{k}]: expected three integers")
        triples.append(tuple(tri))
    return ThreeDMInstance(data["n"], tuple(triples))


def serialize_3dm(T: ThreeDMInstance) -> str:
    return json.dumps({"n": T.n, "triples": [list(t) for t in T.triples]}) + "\n"

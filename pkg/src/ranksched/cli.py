"""Command-line interface.

Exit codes: 0 success, 2 validation or usage error, 3 the profile count
exceeds the enumeration cap, 4 ``solve`` found that no NE exists.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import io
from .competition import initial_state, seniority_brd
from .core import Game, beneficial_deviation, format_rational, makespan
from .dynamics import DeviatorRule, build_profile_graph, sink_analysis
from .errors import (CapExceededError, ContractError, RankSchedError, UndefinedResultError,
                     ValidationError)
from .instances import FAMILIES, FamilySpec, generate, normalize, reduce_3dm, solve_3dm_bruteforce
from .oracle import _dec, _digits, analyze, format_table, opt_makespan
from .solvers import METHODS, solve

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_NO_NE = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read(path):
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None


def _game(args) -> Game:
    return io.parse_instance(_read(args.file))


def _emit(args, data: dict, rows):
    """JSON goes to stdout as is; text mode prints the table rows."""
    if args.format == "json":
        if args.decimal:
            data = dict(data, decimal={k: _dec(v) for k, v in data.get("_numbers", {}).items()})
        data.pop("_numbers", None)
        print(json.dumps(data, indent=2))
    else:
        print(format_table(rows, args.decimal))


def _cmd_check(args):
    game = _game(args)
    if args.profile is None:
        raise ValidationError("check needs --profile")
    s = io.parse_profile(_read(args.profile), game)
    hit = beneficial_deviation(game, s)
    mk = makespan(game, s)
    data = {"is_ne": hit is None, "makespan": format_rational(mk), "_numbers": {"makespan": mk}}
    if hit is not None:
        data["deviation"] = {"job": hit[0], "machine": game.machine_ids[hit[1]]}
    rows = [("NE", "yes" if hit is None else "no", ""),
            ("makespan", format_rational(mk), _dec(mk))]
    if hit is not None:
        rows.append(("deviation", f"{hit[0]} -> {game.machine_ids[hit[1]]}", ""))
    _emit(args, data, rows)
    return EXIT_OK


def _cmd_solve(args):
    game = _game(args)
    res = solve(game, args.method, args.cap, args.force)
    data = {"verdict": res.verdict, "method": res.method}
    rows = [("verdict", res.verdict, ""), ("method", res.method, "")]
    if res.exists:
        mk = makespan(game, res.witness)
        data["witness"] = {"assignment": dict(zip(game.job_ids,
                                                  (game.machine_ids[i] for i in res.witness)))}
        data["makespan"] = format_rational(mk)
        data["_numbers"] = {"makespan": mk}
        rows += [("witness", _digits(res.witness), ""), ("makespan", format_rational(mk), _dec(mk))]
    _emit(args, data, rows)
    return EXIT_OK if res.exists else EXIT_NO_NE


def _cmd_brd(args):
    game = _game(args)
    start = io.parse_profile(_read(args.start), game) if args.start else (0,) * game.n
    if game.is_set_level:
        rule = "random" if args.rule == "random" else "lowest-id"
        trace = seniority_brd(game, initial_state(game, start), args.max_steps, rule, args.seed)
        final = trace.final.profile(game)
    else:
        from .dynamics import brd_run
        trace = brd_run(game, start, args.rule, args.max_steps or 10 ** 5, args.seed)
        final = trace.final
    moves = [{"job": st.deviator, "machine": game.machine_ids[st.target]} for st in trace.steps]
    mk = makespan(game, final)
    data = {"status": trace.status, "steps": len(trace.steps), "moves": moves,
            "final": {"assignment": dict(zip(game.job_ids, (game.machine_ids[i] for i in final)))},
            "makespan": format_rational(mk), "_numbers": {"makespan": mk}}
    rows = [("status", trace.status, ""), ("steps", str(len(trace.steps)), ""),
            ("final", _digits(final), ""), ("makespan", format_rational(mk), _dec(mk))]
    _emit(args, data, rows)
    return EXIT_OK


def _cmd_sinks(args):
    game = _game(args)
    sinks = sink_analysis(game, args.rule, None, args.cap, args.force)
    opt, _ = opt_makespan(game, args.cap, args.force)
    worst = max(c.cost for c in sinks)
    data = {"sinks": [c.to_json() for c in sinks], "opt_makespan": format_rational(opt),
            "posink": format_rational(worst / opt),
            "_numbers": {"opt_makespan": opt, "posink": worst / opt}}
    rows = [("sinks", str(len(sinks)), "")]
    for k, c in enumerate(sinks, start=1):
        tag = "" if c.exact else " (approx)"
        rows.append((f"sink {k}", f"size {len(c.members)} SC {format_rational(c.cost)}{tag}",
                     _dec(c.cost)))
    rows += [("OPT", format_rational(opt), _dec(opt)),
             ("PoSINK", format_rational(worst / opt), _dec(worst / opt))]
    _emit(args, data, rows)
    return EXIT_OK


def _cmd_graph(args):
    game = _game(args)
    graph = build_profile_graph(game, args.mode, args.rule, None, args.cap, args.force)
    if args.output == "dot":
        print(graph.to_dot())
    else:
        print(json.dumps(graph.to_json(), indent=2))
    return EXIT_OK


def _cmd_poa(args):
    from .core import CompetitionStructure
    game = _game(args)
    if args.cost_only:
        game = game.with_competition(CompetitionStructure.singletons())
    rep = analyze(game, args.cap, args.force, args.threads)
    data = rep.to_json(False)
    data["_numbers"] = {"opt_makespan": rep.opt_makespan, "poa": rep.poa, "pos": rep.pos,
                        "W": rep.W}
    if args.format == "text":
        print(rep.to_text(args.decimal))
        return EXIT_OK
    _emit(args, data, [])
    return EXIT_OK


def _cmd_gen(args):
    spec = FamilySpec(args.family, args.m, args.k, args.r, args.eps if args.eps else "1/1000")
    sys.stdout.write(io.serialize_instance(generate(spec)))
    return EXIT_OK


def _cmd_reduce3dm(args):
    T = io.parse_3dm(_read(args.file))
    if args.normalize:
        norm = normalize(T)
        if not norm.feasible:
            raise ValidationError(f"no perfect matching: {norm.reason}")
        if norm.reduced is None:
            raise ValidationError("normalization covers every element; nothing left to reduce")
        T = norm.reduced
    game = reduce_3dm(T, strict=not args.lenient)
    sys.stdout.write(io.serialize_instance(game))
    return EXIT_OK


def _cmd_match3dm(args):
    T = io.parse_3dm(_read(args.file))
    matching = solve_3dm_bruteforce(T)
    data = {"matching": matching}
    rows = [("matching", "none" if matching is None else " ".join(map(str, matching)), "")]
    _emit(args, data, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--decimal", action="store_true",
                        help="add 6-digit decimal values next to the exact ones")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--force", action="store_true",
                        help="enumerate even when the profile count exceeds the cap")
    common.add_argument("--cap", type=int, default=None,
                        help="profile enumeration cap (default: $RANKSCHED_CAP or 2^24)")

    parser = _Parser(prog="ranksched", description="Scheduling games with rank-based utilities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    rules = [r.value for r in DeviatorRule]

    def add(name, func, help_text, with_file=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if with_file:
            p.add_argument("--file", help="input JSON (default: stdin)")
        p.set_defaults(func=func)
        return p

    p = add("check", _cmd_check, "test whether a profile is a NE")
    p.add_argument("--profile", required=True)
    p = add("solve", _cmd_solve, "decide NE existence and return a witness")
    p.add_argument("--method", choices=("auto",) + METHODS + ("oracle",), default="auto")
    p = add("brd", _cmd_brd, "run best-response dynamics")
    p.add_argument("--start", help="start profile file (default: every job on the first machine)")
    p.add_argument("--rule", choices=rules, default="priority")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p = add("sinks", _cmd_sinks, "sink equilibria and PoSINK")
    p.add_argument("--rule", choices=rules, default="priority")
    p = add("graph", _cmd_graph, "export the best-response graph")
    p.add_argument("--mode", choices=("rule", "all"), default="rule")
    p.add_argument("--rule", choices=rules, default="priority")
    p.add_argument("--output", choices=("dot", "json"), default="dot")
    p = add("poa", _cmd_poa, "PoA and PoS by enumeration")
    p.add_argument("--cost-only", action="store_true",
                   help="put every job in its own competition set")
    p = add("gen", _cmd_gen, "generate a named instance family", with_file=False)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--r", default=None)
    p.add_argument("--eps", default=None)
    p = add("reduce3dm", _cmd_reduce3dm, "build the scheduling game of a 3DM-3 instance")
    p.add_argument("--normalize", action="store_true",
                   help="force single-occurrence triples before reducing")
    p.add_argument("--lenient", action="store_true",
                   help="accept elements occurring once")
    add("match3dm", _cmd_match3dm, "brute-force perfect matching of a 3DM-3 instance")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, ContractError, UndefinedResultError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RankSchedError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def run_command(argv) -> int:
    """``main`` without the SystemExit that argparse raises on usage errors."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

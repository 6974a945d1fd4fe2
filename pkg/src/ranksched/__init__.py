"""Scheduling games where jobs compete on the rank of their completion time."""
from .core import (CompetitionStructure, Game, Job, Machine, as_profile, best_responses,
                   beneficial_deviation, build_schedule, completion_times, is_ne, make_game,
                   makespan, prefers, ranks, suboptimal_jobs)
from .errors import (CapExceededError, ContractError, InvariantError, RankSchedError,
                     UndefinedResultError, ValidationError)
from .io import parse_instance, parse_profile, serialize_instance, serialize_profile
from .oracle import analyze, enumerate_ne, ne_exists, opt_makespan, poa_pos
from .solvers import SolveResult, solve

__version__ = "0.1.0"

__all__ = [
    "CompetitionStructure", "Game", "Job", "Machine", "as_profile", "best_responses",
    "beneficial_deviation", "build_schedule", "completion_times", "is_ne", "make_game",
    "makespan", "prefers", "ranks", "suboptimal_jobs",
    "CapExceededError", "ContractError", "InvariantError", "RankSchedError",
    "UndefinedResultError", "ValidationError",
    "parse_instance", "parse_profile", "serialize_instance", "serialize_profile",
    "analyze", "enumerate_ne", "ne_exists", "opt_makespan", "poa_pos",
    "SolveResult", "solve",
]

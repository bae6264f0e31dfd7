"""Exact game-theoretic probability: prices of gambles, sequential games,
betting strategies and online learning, all in rational arithmetic."""

from .extreal import INF, NEG_INF, IndeterminateSum, format_ext, parse_ext, sub_pessimistic
from .gamblespace import Cone, Explicit, GambleSpace, Hull, cone_space, explicit_space, hull_space
from .pricing import (
    TheoremViolation,
    lower_expectation,
    measure_upper,
    price_chain,
    replication_certificate,
    upper_expectation,
)
from .ratlp import LinearProgram, solve_lp
from .sequential import SequentialSpace, gambler_value, world_value

__version__ = "0.1.0"

__all__ = [
    "INF",
    "NEG_INF",
    "IndeterminateSum",
    "format_ext",
    "parse_ext",
    "sub_pessimistic",
    "Cone",
    "Explicit",
    "GambleSpace",
    "Hull",
    "cone_space",
    "explicit_space",
    "hull_space",
    "TheoremViolation",
    "lower_expectation",
    "measure_upper",
    "price_chain",
    "replication_certificate",
    "upper_expectation",
    "LinearProgram",
    "solve_lp",
    "SequentialSpace",
    "gambler_value",
    "world_value",
]

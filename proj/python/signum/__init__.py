"""Signed-series toolkit: sign constructions, certificates, achievement sets.

Thin re-export of the compiled module. Results are plain dicts and lists;
exact rationals are canonical "p/q" strings.
"""

from _signum import (
    BudgetError,
    PreconditionError,
    SequenceSpec,
    SpecParseError,
    balance,
    block_converge,
    certify_steering,
    certify_uniform,
    explore,
    greedy,
    hit,
    lambda_count,
    lambda_membership,
    levy,
    load_spec,
    ls_probe,
    parse_spec,
    partition,
    render_spec,
    theta_class,
    ultrametric,
)

__all__ = [
    "BudgetError",
    "PreconditionError",
    "SequenceSpec",
    "SpecParseError",
    "balance",
    "block_converge",
    "certify_steering",
    "certify_uniform",
    "explore",
    "greedy",
    "hit",
    "lambda_count",
    "lambda_membership",
    "levy",
    "load_spec",
    "ls_probe",
    "parse_spec",
    "partition",
    "render_spec",
    "theta_class",
    "ultrametric",
]

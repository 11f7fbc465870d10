"""Deadline-aware coflow scheduling: schedulers, simulators and exact oracles."""

from ._core import (
    CSV_HEADER,
    ConfigError,
    Error,
    InputError,
    Instance,
    LookupError,
    ParseError,
    PreconditionError,
    SizeError,
    brute_force_sigma_wcar,
    build_sigma,
    dp_weighted_late,
    export_lp,
    gen_synthetic,
    generalized_example,
    moore_hodgson,
    motivating_example,
    run_offline,
    run_online_synthetic,
    schedulers,
)

CSV_COLUMNS = tuple(CSV_HEADER.split(","))

__all__ = [
    "CSV_COLUMNS",
    "CSV_HEADER",
    "ConfigError",
    "Error",
    "InputError",
    "Instance",
    "LookupError",
    "ParseError",
    "PreconditionError",
    "SizeError",
    "brute_force_sigma_wcar",
    "build_sigma",
    "dp_weighted_late",
    "export_lp",
    "gen_synthetic",
    "generalized_example",
    "moore_hodgson",
    "motivating_example",
    "run_offline",
    "run_online_synthetic",
    "schedulers",
]

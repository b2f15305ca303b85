"""Optimal multi-asset execution with cross impact."""

from ._mexec import (
    MarketSpec,
    MexecError,
    asymmetric_roundtrip,
    audit,
    blowup_demo,
    builtin_spec,
    builtin_spec_ids,
    conley_criterion,
    constant_market,
    example_ids,
    kappa_bounds,
    load_scenario,
    monte_carlo,
    optimal_cost,
    parse_scenario,
    solve,
    write_example,
)

__all__ = [
    "MarketSpec",
    "MexecError",
    "asymmetric_roundtrip",
    "audit",
    "blowup_demo",
    "builtin_spec",
    "builtin_spec_ids",
    "conley_criterion",
    "constant_market",
    "example_ids",
    "kappa_bounds",
    "load_scenario",
    "monte_carlo",
    "optimal_cost",
    "parse_scenario",
    "solve",
    "write_example",
]

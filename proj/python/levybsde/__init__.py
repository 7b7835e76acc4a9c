"""Compound-Poisson approximation of pure-jump processes and the backward
equations they drive.

The heavy lifting lives in the compiled extension ``_levybsde``; this package
re-exports its public surface.  Typical use::

    import levybsde as lb

    model = lb.Model.cgmy(1.0, 5.0, 5.0, 0.5)
    report = lb.process_rate(model, levels=[2, 4, 8, 16], paths=2000, seed=1)
    print(report.fit.slope, report.theory_slope)

All experiment functions are deterministic in (arguments, seed) and release
the GIL while running.
"""

from ._levybsde import (
    BoundaryReport,
    BoundaryRow,
    BsdeRateReport,
    ConfigError,
    DivergenceRecord,
    Generator,
    GridSolution,
    LowerBoundReport,
    LsmcSolution,
    MeanSE,
    Model,
    RateLevel,
    RateReport,
    SlopeFit,
    Terminal,
    absolute_moment,
    bg_index,
    boundary_brackets,
    bsde_rate,
    c_beta,
    compensator_mean,
    generator_gap_rate,
    optimality_divergence,
    partial_moment,
    process_rate,
    random_walk_gap,
    resolve_moment_order,
    solve_grid,
    solve_lsmc,
    tail_mass,
    terminal_value_mc,
    wasserstein_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryReport",
    "BoundaryRow",
    "BsdeRateReport",
    "ConfigError",
    "DivergenceRecord",
    "Generator",
    "GridSolution",
    "LowerBoundReport",
    "LsmcSolution",
    "MeanSE",
    "Model",
    "RateLevel",
    "RateReport",
    "SlopeFit",
    "Terminal",
    "absolute_moment",
    "bg_index",
    "boundary_brackets",
    "bsde_rate",
    "c_beta",
    "compensator_mean",
    "generator_gap_rate",
    "optimality_divergence",
    "partial_moment",
    "process_rate",
    "random_walk_gap",
    "resolve_moment_order",
    "solve_grid",
    "solve_lsmc",
    "tail_mass",
    "terminal_value_mc",
    "wasserstein_bounds",
]

"""Numerical laboratory for a boundary-layer model on the half strip.

Submodules:

- ``grid`` — half-strip grids, quadrature, and finite-volume operators
- ``fields`` — spectral fields, the induced vertical velocity, the
  magnetic correction, and the discrete dissipation identity
- ``norms`` — weighted energy norms, dissipation budgets, the smoothing
  ladder, and analyticity-radius fits
- ``solver2d`` — the nonlinear two-dimensional initial value problem
- ``heat1d`` — the half-line heat equation, good unknowns, and decay audits
- ``solver3d`` — the linearised three-dimensional problem around a shear flow
- ``combinatorics`` — Gevrey weight sequences and product-rule inequalities
- ``config`` / ``io`` / ``plots`` / ``cli`` — experiment orchestration
"""

from .combinatorics import gevrey_weight, hardy_check, inequality_scan, young_check
from .config import ConfigError, ScenarioConfig, parse_config
from .fields import SpectralField, compute_w, dissipation_residual, solve_magnetic
from .grid import GridError, HalfStripGrid, make_grid, mu_lambda, weight_values
from .heat1d import (
    HeatError,
    HeatState,
    decay_series,
    fit_decay,
    good_unknowns,
    lemma_audit,
    moment,
    self_similar_profile,
    solve_heat,
    weighted_seminorm,
)
from .io import (
    CheckpointError,
    load_checkpoint,
    read_series,
    save_checkpoint,
    write_series,
)
from .norms import (
    NormReport,
    dissipation_functional,
    h1_weighted_norm,
    monotonicity_audit,
    smoothing_ladder,
    tangential_radius_fit,
)
from .solver2d import (
    InitialDataSpec,
    Scenario2D,
    State2D,
    Stepper2D,
    make_initial_data,
    run_scenario2d,
)
from .solver3d import (
    Scenario3D,
    ShearPair,
    Stepper3D,
    analytic_norms,
    make_analytic_data,
    make_shear,
    rho_schedule,
    run_scenario3d,
)

__version__ = "0.1.0"

__all__ = [
    "CheckpointError",
    "ConfigError",
    "GridError",
    "HalfStripGrid",
    "HeatError",
    "HeatState",
    "InitialDataSpec",
    "NormReport",
    "Scenario2D",
    "Scenario3D",
    "ScenarioConfig",
    "ShearPair",
    "SpectralField",
    "State2D",
    "Stepper2D",
    "Stepper3D",
    "analytic_norms",
    "compute_w",
    "decay_series",
    "dissipation_functional",
    "dissipation_residual",
    "fit_decay",
    "gevrey_weight",
    "good_unknowns",
    "h1_weighted_norm",
    "hardy_check",
    "inequality_scan",
    "lemma_audit",
    "load_checkpoint",
    "make_analytic_data",
    "make_grid",
    "make_initial_data",
    "make_shear",
    "moment",
    "monotonicity_audit",
    "mu_lambda",
    "parse_config",
    "read_series",
    "rho_schedule",
    "run_scenario2d",
    "run_scenario3d",
    "save_checkpoint",
    "self_similar_profile",
    "smoothing_ladder",
    "solve_heat",
    "solve_magnetic",
    "tangential_radius_fit",
    "weight_values",
    "weighted_seminorm",
    "write_series",
    "young_check",
]

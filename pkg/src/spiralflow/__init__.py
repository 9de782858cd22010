"""Spiral crystal growth by forced mean curvature flow on holed domains."""

from .analysis import (GrowthSeries, ergodic_residual, growth_bounds, growth_rate,
                       height, sandwich_constant, tip_growth_rate, winding_index)
from .errors import (Blowup, DegenerateDomain, DegenerateLevelSet, HoleTooSmall,
                     HypothesisViolated, InsufficientData, NotOnBoundary, NotReady,
                     NumericalFailure, SingularPoint, SnapshotIOFailure,
                     SpiralFlowError, UnknownScenario)
from .extraction import (SpiralCurve, extract_spirals, hausdorff_distance,
                         phase_residual, resample_polyline)
from .forcing import Forcing
from .geometry import (Disk, DomainSpec, Grid, Hole, Rect, build_grid, compute_C0,
                       compute_K0, forcing_margin, outward_normal,
                       reference_spacing, signed_distance)
from .scenarios import (InitialCondition, Scenario, build_scenario, catalog,
                        evaluate_checks, rotating_exact, run_scenario)
from .solver import (Diagnostics, RunResult, SolverParams, SolverState,
                     apply_neumann_bc, neumann_residual, rhs, run, stable_dt, step)
from .theta import (SpiralCenter, ThetaField, circulation, grad_theta,
                    hessian_theta, principal_theta)

__version__ = "0.1.0"

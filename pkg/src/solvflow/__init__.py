"""Ricci flow of left-invariant diagonal metrics on the five closed
5-dimensional unimodular solvable contact Lie groups D1, D2, D3, D5, D11."""

from .asymptotics import (
    ClosedFormSolution,
    PowerLawFit,
    PreconditionViolation,
    eval_closed_form,
    fit_power_law,
    residual_check,
)
from .catalog import (
    InitialData,
    InvariantMonomial,
    ModelId,
    build_model,
    classify_case,
    constrained_params,
    describe,
    model_asymptotics,
    model_invariants,
)
from .curvature import (
    DiagonalityViolation,
    DiagonalMetric,
    NonpositiveMetricError,
    RicciForm,
    flow_rhs,
    ricci_quadratic,
    ricci_tensor,
    unit_frame_brackets,
)
from .flow import FlowProblem, Trajectory, integrate, integrate_brackets, resample_log
from .invariants import (
    RatioDiagnostic,
    detect_monomials,
    drift_report,
    ratio_diagnostics,
    special_drift,
)
from .liecore import (
    BasisChange,
    StructureConstants,
    bracket_apply,
    change_basis,
    jacobi_residual,
    unimodularity_defect,
)

__version__ = "0.1.0"

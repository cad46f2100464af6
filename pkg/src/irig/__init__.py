"""Iterative regularized incremental projected subgradient method (IR-IG)
for bilevel convex problems with a finite-sum lower level.

The upper level ``h`` is strongly convex; the lower level is
``f = f_1 + ... + f_m`` over an easy-to-project compact set ``X``.
"""

from irig.numerics import SparseVector, as_dense, axpy, dot, norms
from irig.geometry import Ball2, Box, FeasibleSet, contains, project, radius_bound
from irig.oracles import (
    AbsoluteAffine,
    AffineFunction,
    ComponentOracle,
    ConstraintPenalty,
    ElasticNet,
    HingeBatch,
    ProblemInstance,
    ShiftedQuadratic,
    UpperOracle,
    elastic_net_eval,
    estimate_constants,
    hinge_eval,
    penalty_eval,
)
from irig.schedules import (
    PowerSchedule,
    ValidationReport,
    closed_form_weights,
    rate_schedule,
    validate,
)
from irig.solver import (
    SolverState,
    Trace,
    TraceRow,
    inner_cycle,
    run_irig,
    solve_regularized_reference,
    update_average,
)
from irig._kernels import HAVE_COMPILED

__version__ = "0.1.0"

__all__ = [
    "AbsoluteAffine",
    "AffineFunction",
    "Ball2",
    "Box",
    "ComponentOracle",
    "ConstraintPenalty",
    "ElasticNet",
    "FeasibleSet",
    "HAVE_COMPILED",
    "HingeBatch",
    "PowerSchedule",
    "ProblemInstance",
    "ShiftedQuadratic",
    "SolverState",
    "SparseVector",
    "Trace",
    "TraceRow",
    "UpperOracle",
    "ValidationReport",
    "as_dense",
    "axpy",
    "closed_form_weights",
    "contains",
    "dot",
    "elastic_net_eval",
    "estimate_constants",
    "hinge_eval",
    "inner_cycle",
    "norms",
    "penalty_eval",
    "project",
    "radius_bound",
    "rate_schedule",
    "run_irig",
    "solve_regularized_reference",
    "update_average",
    "validate",
]

"""Exact toolkit for the n-cycle noncontextual and no-disturbance polytopes."""
from .model import (
    EdgeDistribution,
    MarginalModel,
    NegativeProbability,
    NoDisturbanceViolation,
    ProbabilityModel,
    is_valid,
    to_expectation,
    to_probability,
)
from .polytope import (
    CtxVertex,
    Inequality,
    NcVertex,
    contextual_vertices,
    evaluate,
    inequalities,
    membership_by_facets,
    membership_by_lp,
    noncontextual_vertices,
)

__version__ = "0.1.0"

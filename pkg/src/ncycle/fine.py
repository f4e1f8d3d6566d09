"""Global joint distributions reproducing a marginal model.

An assignment x in {-1, +1}^n is encoded as an n-bit integer with bit i set
iff x_i = -1.  Bitstrings in JSON list bit 0 first, so "0110" is
x = (+1, -1, -1, +1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .lp import EQ, LinearSystem, check_farkas, solve_feasibility
from .model import (
    OUTCOME_SIGNS,
    EdgeDistribution,
    MarginalModel,
    ModelError,
    ProbabilityModel,
    is_valid,
    scalar_to_json,
    to_expectation,
    to_probability,
)
from .polytope import membership_by_facets

MAX_N = 12


class InvalidModel(ModelError):
    pass


def assignment(k: int, n: int) -> tuple:
    return tuple(-1 if (k >> i) & 1 else 1 for i in range(n))


def assignment_index(x: Sequence[int]) -> int:
    return sum(1 << i for i, s in enumerate(x) if s == -1)


def bitstring(k: int, n: int) -> str:
    return "".join("1" if (k >> i) & 1 else "0" for i in range(n))


@dataclass(frozen=True)
class GlobalDistribution:
    n: int
    weights: tuple

    def __post_init__(self):
        w = tuple(Fraction(v) for v in self.weights)
        if len(w) != 2 ** self.n:
            raise ValueError(f"need {2 ** self.n} weights, got {len(w)}")
        if any(v < 0 for v in w) or sum(w) != 1:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    feasible = True

    @classmethod
    def point_mass(cls, x: Sequence[int]) -> "GlobalDistribution":
        n = len(x)
        w = [0] * 2 ** n
        w[assignment_index(x)] = 1
        return cls(n, tuple(w))

    @classmethod
    def uniform(cls, n: int) -> "GlobalDistribution":
        return cls(n, (Fraction(1, 2 ** n),) * 2 ** n)

    def support(self) -> dict:
        return {assignment(k, self.n): w for k, w in enumerate(self.weights) if w}

    def to_json(self) -> dict:
        return {"n": self.n,
                "weights": {bitstring(k, self.n): scalar_to_json(w)
                            for k, w in enumerate(self.weights) if w}}

    @classmethod
    def from_json(cls, data: dict) -> "GlobalDistribution":
        n = data["n"]
        w = [Fraction(0)] * 2 ** n
        for bits, val in data["weights"].items():
            if len(bits) != n or set(bits) - {"0", "1"}:
                raise ValueError(f"bad assignment key {bits!r}")
            w[int(bits[::-1], 2)] = Fraction(val)
        return cls(n, tuple(w))


@dataclass(frozen=True)
class InfeasibilityCertificate:
    """Farkas multipliers proving no global distribution exists."""

    system: LinearSystem
    multipliers: tuple

    feasible = False

    def verify(self) -> bool:
        return check_farkas(self.system, self.multipliers)


def fine_system(mm: MarginalModel) -> LinearSystem:
    """Sum of weights is 1 and each edge marginal matches, weights >= 0.

    Row 0 is normalization; row 1 + 4*i + k is outcome k on edge i.
    """
    n = mm.n
    exact = mm if mm.exact else MarginalModel.from_vector(
        [Fraction(v) for v in mm.vector])
    pm = to_probability(exact)
    size = 2 ** n
    xs = [assignment(k, n) for k in range(size)]
    A = [[1] * size]
    b = [1]
    for i in range(n):
        j = (i + 1) % n
        for k, (sa, sb) in enumerate(OUTCOME_SIGNS):
            A.append([1 if (x[i] == sa and x[j] == sb) else 0 for x in xs])
            b.append(pm.edges[i].probs[k])
    return LinearSystem(A, b, (EQ,) * len(A))


def extend_global(mm: MarginalModel, force: bool = False):
    """Return a GlobalDistribution for ``mm`` or an InfeasibilityCertificate."""
    if mm.n > MAX_N and not force:
        raise ValueError(f"global extension capped at n <= {MAX_N}")
    report = is_valid(mm)
    if not report.valid:
        raise InvalidModel(
            f"model is outside the no-disturbance polytope "
            f"({len(report.violated)} positivity conditions violated)")
    sys = fine_system(mm)
    cert = solve_feasibility(sys)
    if not cert.feasible:
        return InfeasibilityCertificate(sys, cert.witness)
    gd = GlobalDistribution(mm.n, cert.witness)
    if edge_distributions(gd) != to_probability(
            MarginalModel.from_vector([Fraction(v) for v in mm.vector])).edges:
        raise RuntimeError("global distribution does not reproduce the marginals")
    return gd


def edge_distributions(gd: GlobalDistribution) -> tuple:
    n = gd.n
    edges = []
    for i in range(n):
        j = (i + 1) % n
        probs = [Fraction(0)] * 4
        for k, w in enumerate(gd.weights):
            if w:
                x = assignment(k, n)
                probs[OUTCOME_SIGNS.index((x[i], x[j]))] += w
        edges.append(EdgeDistribution(i, tuple(probs)))
    return tuple(edges)


def marginals_of(gd: GlobalDistribution) -> MarginalModel:
    return to_expectation(ProbabilityModel(gd.n, edge_distributions(gd)))


def fine_equivalence_check(mm: MarginalModel) -> bool:
    """Global extension exists exactly when the facet test says noncontextual."""
    result = extend_global(mm)
    if not result.feasible and not result.verify():
        raise RuntimeError("infeasibility certificate failed re-check")
    return result.feasible == membership_by_facets(mm).member

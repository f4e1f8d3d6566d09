"""Marginal models of the n-cycle scenario.

A marginal model assigns a joint distribution of (X_i, X_{i+1 mod n}) to every
edge of the cycle.  It is stored either as probabilities, four per edge in the
order (++, +-, -+, --), or as the 2n expectation values

    (<X_0>, ..., <X_{n-1}>, <X_0 X_1>, ..., <X_{n-1} X_0>).

Entries are either ``Fraction`` (exact) or ``float`` (numeric).  Exact models
are what the polytope code works with; floats come from quantum realizations.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

Scalar = Union[Fraction, float]

OUTCOMES = ("++", "+-", "-+", "--")
# (sign of X_i, sign of X_{i+1}) for each outcome, same order as OUTCOMES
OUTCOME_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))

# Rows: (1, <X_i>, <X_{i+1}>, <X_i X_{i+1}>) = M @ (p++, p+-, p-+, p--).
# M @ M == 4 * I, so M / 4 inverts it.
TRANSFORM = (
    (1, 1, 1, 1),
    (1, 1, -1, -1),
    (1, -1, 1, -1),
    (1, -1, -1, 1),
)

FLOAT_TOL = 1e-12


class ModelError(ValueError):
    pass


class NoDisturbanceViolation(ModelError):
    """Two edges disagree on the marginal of a shared observable."""

    def __init__(self, vertex: int, left, right):
        self.vertex = vertex
        self.left = left
        self.right = right
        super().__init__(
            f"<X_{vertex}> is {left} from edge {vertex - 1} "
            f"but {right} from edge {vertex}")


class NegativeProbability(ModelError):
    def __init__(self, edge: int, outcome: str, value):
        self.edge = edge
        self.outcome = outcome
        self.value = value
        super().__init__(
            f"p({outcome}|X_{edge},X_{edge + 1}) would be {value} < 0")


def as_scalar(x) -> Scalar:
    """Coerce to Fraction unless ``x`` is a float.

    Strings such as ``"3/4"`` or ``"-1"`` parse exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def is_exact(values: Iterable[Scalar]) -> bool:
    return all(isinstance(v, Fraction) for v in values)


def _check_n(n: int) -> None:
    if n < 3:
        raise ModelError(f"the n-cycle scenario needs n >= 3, got n={n}")


@dataclass(frozen=True)
class EdgeDistribution:
    edge_index: int
    probs: tuple

    def __post_init__(self):
        if len(self.probs) != 4:
            raise ModelError("an edge distribution has exactly four entries")
        object.__setattr__(self, "probs",
                           tuple(as_scalar(p) for p in self.probs))

    @property
    def exact(self) -> bool:
        return is_exact(self.probs)

    def normalized(self, tol: float = FLOAT_TOL) -> bool:
        total = sum(self.probs)
        if self.exact:
            return total == 1
        return abs(total - 1) <= tol

    def nonnegative(self, tol: float = 0.0) -> bool:
        return all(p >= -tol for p in self.probs)

    def marginal_first(self):
        """p(X_i = +1)."""
        return self.probs[0] + self.probs[1]

    def marginal_second(self):
        """p(X_{i+1} = +1)."""
        return self.probs[0] + self.probs[2]

    def expectations(self) -> tuple:
        """(1, <X_i>, <X_{i+1}>, <X_i X_{i+1}>)."""
        return tuple(sum(m * p for m, p in zip(row, self.probs))
                     for row in TRANSFORM)


@dataclass(frozen=True)
class ProbabilityModel:
    n: int
    edges: tuple

    def __post_init__(self):
        _check_n(self.n)
        edges = tuple(e if isinstance(e, EdgeDistribution)
                      else EdgeDistribution(i, e)
                      for i, e in enumerate(self.edges))
        if len(edges) != self.n:
            raise ModelError(f"expected {self.n} edges, got {len(edges)}")
        for i, e in enumerate(edges):
            if e.edge_index != i:
                raise ModelError(f"edge {i} carries index {e.edge_index}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_lists(cls, probs: Sequence[Sequence]) -> "ProbabilityModel":
        return cls(len(probs), tuple(EdgeDistribution(i, tuple(p))
                                     for i, p in enumerate(probs)))

    @property
    def exact(self) -> bool:
        return all(e.exact for e in self.edges)

    def as_lists(self) -> list:
        return [list(e.probs) for e in self.edges]


@dataclass(frozen=True)
class MarginalModel:
    """A point (local part, full-correlation part) in R^{2n}."""

    n: int
    local: tuple
    correlations: tuple

    def __post_init__(self):
        _check_n(self.n)
        local = tuple(as_scalar(v) for v in self.local)
        corr = tuple(as_scalar(v) for v in self.correlations)
        if len(local) != self.n or len(corr) != self.n:
            raise ModelError(
                f"n={self.n} needs {self.n} local and {self.n} correlation "
                f"entries, got {len(local)} and {len(corr)}")
        object.__setattr__(self, "local", local)
        object.__setattr__(self, "correlations", corr)

    @classmethod
    def from_vector(cls, vec: Sequence) -> "MarginalModel":
        if len(vec) % 2:
            raise ModelError("a marginal model vector has even length 2n")
        n = len(vec) // 2
        return cls(n, tuple(vec[:n]), tuple(vec[n:]))

    @property
    def vector(self) -> tuple:
        return self.local + self.correlations

    @property
    def exact(self) -> bool:
        return is_exact(self.vector)

    def edge_expectations(self, i: int) -> tuple:
        j = (i + 1) % self.n
        return self.local[i], self.local[j], self.correlations[i]

    def to_float(self) -> "MarginalModel":
        return MarginalModel(self.n, tuple(float(v) for v in self.local),
                             tuple(float(v) for v in self.correlations))


def positivity_values(mm: MarginalModel, i: int) -> tuple:
    """The four expressions 4 p(ab|X_i X_{i+1}) of edge ``i``, in OUTCOMES order."""
    a, b, c = mm.edge_expectations(i)
    return tuple(1 + sa * a + sb * b + sa * sb * c for sa, sb in OUTCOME_SIGNS)


def to_expectation(pm: ProbabilityModel, tol: float = FLOAT_TOL) -> MarginalModel:
    """Map per-edge probabilities to the 2n expectation vector.

    Raises NoDisturbanceViolation if edges i-1 and i disagree on <X_i>.
    Exact inputs are compared exactly, float inputs to within ``tol``.
    """
    n = pm.n
    exact = pm.exact
    for e in pm.edges:
        if not e.normalized(tol):
            raise ModelError(f"edge {e.edge_index} is not normalized: "
                             f"sum = {sum(e.probs)}")
    per_edge = [e.expectations() for e in pm.edges]
    local = []
    for i in range(n):
        from_prev = per_edge[i - 1][2]
        from_here = per_edge[i][1]
        same = (from_prev == from_here if exact
                else abs(from_prev - from_here) <= tol)
        if not same:
            raise NoDisturbanceViolation(i, from_prev, from_here)
        local.append(from_here)
    corr = [per_edge[i][3] for i in range(n)]
    return MarginalModel(n, tuple(local), tuple(corr))


def to_probability(mm: MarginalModel, tol: float = 0.0) -> ProbabilityModel:
    """Inverse of :func:`to_expectation`.

    Raises NegativeProbability on the first edge/outcome whose probability
    falls below ``-tol``.
    """
    edges = []
    for i in range(mm.n):
        four_p = positivity_values(mm, i)
        probs = []
        for outcome, v in zip(OUTCOMES, four_p):
            p = v / 4
            if p < -tol:
                raise NegativeProbability(i, outcome, p)
            probs.append(p)
        edges.append(EdgeDistribution(i, tuple(probs)))
    return ProbabilityModel(mm.n, tuple(edges))


HOLDS, SATURATED, VIOLATED = "holds", "saturated", "violated"


@dataclass(frozen=True)
class Condition:
    edge: int
    outcome: str
    value: Scalar  # 4 p(outcome | edge)
    status: str


@dataclass(frozen=True)
class ValidityReport:
    n: int
    conditions: tuple
    out_of_range: tuple  # indices into the 2n-vector with |entry| > 1

    @property
    def valid(self) -> bool:
        return not self.out_of_range and all(
            c.status != VIOLATED for c in self.conditions)

    @property
    def saturated(self) -> list:
        return [c for c in self.conditions if c.status == SATURATED]

    @property
    def violated(self) -> list:
        return [c for c in self.conditions if c.status == VIOLATED]

    def __bool__(self):
        return self.valid


def is_valid(mm: MarginalModel, tol: float | None = None) -> ValidityReport:
    """Classify every one of the 4n positivity conditions at ``mm``.

    ``tol`` defaults to 0 for exact models and 1e-12 for float models; a
    condition within ``tol`` of zero counts as saturated.
    """
    if tol is None:
        tol = 0 if mm.exact else FLOAT_TOL
    conds = []
    for i in range(mm.n):
        for outcome, v in zip(OUTCOMES, positivity_values(mm, i)):
            if abs(v) <= tol:
                status = SATURATED
            elif v < 0:
                status = VIOLATED
            else:
                status = HOLDS
            conds.append(Condition(i, outcome, v, status))
    bad = tuple(k for k, v in enumerate(mm.vector) if abs(v) > 1 + tol)
    return ValidityReport(mm.n, tuple(conds), bad)


# --- JSON interchange -------------------------------------------------------

def scalar_to_json(x: Scalar):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return float(x)


def scalar_from_json(x) -> Scalar:
    if isinstance(x, bool):
        raise ModelError("booleans are not scalars")
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise ModelError(f"cannot parse scalar {x!r}") from exc
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise ModelError(f"cannot parse scalar {x!r}")


def model_to_json(model) -> dict:
    if isinstance(model, MarginalModel):
        return {
            "n": model.n,
            "representation": "expectation",
            "local": [scalar_to_json(v) for v in model.local],
            "correlations": [scalar_to_json(v) for v in model.correlations],
        }
    if isinstance(model, ProbabilityModel):
        return {
            "n": model.n,
            "representation": "probability",
            "edges": [[scalar_to_json(p) for p in e.probs]
                      for e in model.edges],
        }
    raise TypeError(f"not a model: {type(model).__name__}")


def model_from_json(data: dict):
    """Parse either representation; returns MarginalModel or ProbabilityModel."""
    if not isinstance(data, dict):
        raise ModelError("model JSON must be an object")
    rep = data.get("representation")
    if rep is None:
        rep = "probability" if "edges" in data else "expectation"
    try:
        if rep == "probability":
            edges = [[scalar_from_json(p) for p in e] for e in data["edges"]]
            pm = ProbabilityModel.from_lists(edges)
            if "n" in data and data["n"] != pm.n:
                raise ModelError(f"n={data['n']} but {pm.n} edges given")
            return pm
        if rep == "expectation":
            local = [scalar_from_json(v) for v in data["local"]]
            corr = [scalar_from_json(v) for v in data["correlations"]]
            n = data.get("n", len(local))
            return MarginalModel(n, tuple(local), tuple(corr))
    except (KeyError, TypeError) as exc:
        raise ModelError(f"malformed model JSON: {exc}") from exc
    raise ModelError(f"unknown representation {rep!r}")


def load_model(path) -> MarginalModel:
    """Read a model file and return it in expectation form."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: {exc}") from exc
    model = model_from_json(data)
    if isinstance(model, ProbabilityModel):
        model = to_expectation(model)
    return model

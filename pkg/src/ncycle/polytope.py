"""Vertices and facets of the n-cycle no-disturbance and noncontextual polytopes.

Everything here works on exact 2n-vectors.  Sign vectors are enumerated
lexicographically with +1 ordered before -1, so index 0 is always (+1, ..., +1)
among the families that admit it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .lp import (
    ConvexDecomposition,
    DimensionMismatch,
    affine_rank,
    convex_decompose,
    solve_square,
)
from .model import (
    FLOAT_TOL,
    OUTCOME_SIGNS,
    OUTCOMES,
    MarginalModel,
    ModelError,
    is_valid,
    positivity_values,
)

ORACLE_MAX_N = 6


class OutOfOracleRange(ValueError):
    pass


def _check_n(n: int) -> None:
    if n < 3:
        raise ModelError(f"the n-cycle scenario needs n >= 3, got n={n}")


def sign_vectors(n: int) -> Iterable[tuple]:
    return itertools.product((1, -1), repeat=n)


def negatives(v: Sequence[int]) -> int:
    return sum(1 for s in v if s == -1)


def _signs(v: Sequence[int]) -> tuple:
    v = tuple(int(s) for s in v)
    if any(s not in (1, -1) for s in v):
        raise ValueError(f"not a sign vector: {v}")
    return v


@dataclass(frozen=True)
class NcVertex:
    """Deterministic assignment <X_i> = signs[i]."""

    signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "signs", _signs(self.signs))

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def correlation_signs(self) -> tuple:
        s = self.signs
        return tuple(s[i] * s[(i + 1) % self.n] for i in range(self.n))

    @property
    def model(self) -> MarginalModel:
        return MarginalModel(self.n, self.signs, self.correlation_signs)


@dataclass(frozen=True)
class CtxVertex:
    """Contextual vertex: zero local part, odd number of -1 correlations."""

    corr_signs: tuple

    def __post_init__(self):
        beta = _signs(self.corr_signs)
        if negatives(beta) % 2 != 1:
            raise ValueError(
                f"contextual vertex needs an odd number of -1 entries: {beta}")
        object.__setattr__(self, "corr_signs", beta)

    @property
    def n(self) -> int:
        return len(self.corr_signs)

    @property
    def model(self) -> MarginalModel:
        return MarginalModel(self.n, (0,) * self.n, self.corr_signs)


@dataclass(frozen=True)
class Inequality:
    """sum_i gamma_i <X_i X_{i+1}>  <=  n - 2, for gamma with odd parity."""

    gamma: tuple

    def __post_init__(self):
        gamma = _signs(self.gamma)
        if negatives(gamma) % 2 != 1:
            raise ValueError(
                f"tight inequalities need an odd number of -1 entries: {gamma}")
        object.__setattr__(self, "gamma", gamma)

    @property
    def n(self) -> int:
        return len(self.gamma)

    @property
    def bound(self) -> int:
        return self.n - 2

    def __str__(self):
        terms = " ".join(f"{'+' if g > 0 else '-'} <X{i}X{(i + 1) % self.n}>"
                         for i, g in enumerate(self.gamma))
        return f"{terms.lstrip('+ ')} <= {self.bound}"


def noncontextual_vertices(n: int) -> list[NcVertex]:
    _check_n(n)
    return [NcVertex(s) for s in sign_vectors(n)]


def contextual_vertices(n: int) -> list[CtxVertex]:
    _check_n(n)
    return [CtxVertex(s) for s in sign_vectors(n) if negatives(s) % 2]


def inequalities(n: int) -> list[Inequality]:
    _check_n(n)
    return [Inequality(s) for s in sign_vectors(n) if negatives(s) % 2]


def evaluate(ineq: Inequality | Sequence[int], mm: MarginalModel):
    """Value of sum_i gamma_i <X_i X_{i+1}> at ``mm``."""
    gamma = ineq.gamma if isinstance(ineq, Inequality) else tuple(ineq)
    if len(gamma) != mm.n:
        raise DimensionMismatch(
            f"inequality for n={len(gamma)} applied to model with n={mm.n}")
    return sum(g * c for g, c in zip(gamma, mm.correlations))


def classical_bound_brute(ineq: Inequality | Sequence[int], n: int | None = None) -> int:
    """Maximum of sum_i gamma_i s_i s_{i+1} over all deterministic s.

    Accepts a raw sign vector too, so even-parity gammas can be probed.
    """
    gamma = ineq.gamma if isinstance(ineq, Inequality) else _signs(ineq)
    if n is not None and n != len(gamma):
        raise ValueError(f"gamma has length {len(gamma)}, expected {n}")
    m = len(gamma)
    best = None
    for s in sign_vectors(m):
        v = sum(gamma[i] * s[i] * s[(i + 1) % m] for i in range(m))
        if best is None or v > best:
            best = v
    return best


# --- membership ------------------------------------------------------------

@dataclass(frozen=True)
class Facet:
    """Either a positivity condition (edge, outcome) or a tight inequality."""

    kind: str
    edge: Optional[int] = None
    outcome: Optional[str] = None
    inequality: Optional[Inequality] = None

    def __str__(self):
        if self.kind == "positivity":
            return f"p({self.outcome}|X{self.edge},X{self.edge + 1}) >= 0"
        return str(self.inequality)


@dataclass(frozen=True)
class Violation:
    facet: Facet
    amount: object  # how far past the bound, > 0


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    no_disturbance: bool
    violations: tuple = ()
    # inequality with the largest value, and value - bound (<= 0 inside)
    max_inequality: Optional[Inequality] = None
    max_value: object = None
    margin: object = None
    method: str = "facets"
    decomposition: Optional[ConvexDecomposition] = field(default=None, repr=False)

    @property
    def violated_inequalities(self) -> list:
        return [v for v in self.violations if v.facet.kind == "inequality"]

    @property
    def violated_positivity(self) -> list:
        return [v for v in self.violations if v.facet.kind == "positivity"]


def membership_by_facets(mm: MarginalModel, tol: float | None = None
                         ) -> MembershipReport:
    """Test ``mm`` against all 4n positivity facets and 2^{n-1} inequalities."""
    if tol is None:
        tol = 0 if mm.exact else FLOAT_TOL
    violations = []
    validity = is_valid(mm, tol)
    for cond in validity.violated:
        violations.append(Violation(Facet("positivity", cond.edge, cond.outcome),
                                    -cond.value / 4))
    best, best_val = None, None
    for ineq in inequalities(mm.n):
        val = evaluate(ineq, mm)
        if best_val is None or val > best_val:
            best, best_val = ineq, val
        if val > ineq.bound + tol:
            violations.append(Violation(Facet("inequality", inequality=ineq),
                                        val - ineq.bound))
    return MembershipReport(
        member=not violations,
        no_disturbance=validity.valid,
        violations=tuple(violations),
        max_inequality=best,
        max_value=best_val,
        margin=best_val - best.bound,
    )


def membership_by_lp(mm: MarginalModel) -> MembershipReport:
    """Membership via an exact convex decomposition over the 2^n NC vertices."""
    point = [Fraction(v) for v in mm.vector]
    verts = [v.model.vector for v in noncontextual_vertices(mm.n)]
    dec = convex_decompose(point, verts)
    validity = is_valid(mm if mm.exact else MarginalModel.from_vector(point), 0)
    return MembershipReport(member=dec.feasible, no_disturbance=validity.valid,
                            method="lp", decomposition=dec)


# --- Lemma-style verifications ---------------------------------------------

@dataclass(frozen=True)
class FacetReport:
    facet: Facet
    saturating: tuple       # NcVertex instances where the facet is tight
    affine_rank: int
    max_value: object       # largest value of the facet's left side over NC vertices
    bound: object
    dimension: int          # 2n

    @property
    def valid(self) -> bool:
        return self.max_value <= self.bound

    @property
    def is_facet(self) -> bool:
        return self.valid and self.affine_rank == self.dimension - 1


def verify_facet(ineq: Inequality, n: int | None = None) -> FacetReport:
    """Check that ``ineq`` is valid on every NC vertex and tight on a facet."""
    n = ineq.n if n is None else n
    if n != ineq.n:
        raise ValueError(f"inequality has n={ineq.n}, expected {n}")
    sat, best = [], None
    for v in noncontextual_vertices(n):
        val = evaluate(ineq, v.model)
        best = val if best is None else max(best, val)
        if val == ineq.bound:
            sat.append(v)
    rank = affine_rank([v.model.vector for v in sat]) if sat else -1
    return FacetReport(Facet("inequality", inequality=ineq), tuple(sat), rank,
                       best, ineq.bound, 2 * n)


def verify_positivity_facet(n: int, edge: int, outcome: str) -> FacetReport:
    """Same check for one positivity condition, written as -4p <= 0."""
    k = OUTCOMES.index(outcome)
    sat, best = [], None
    for v in noncontextual_vertices(n):
        val = -positivity_values(v.model, edge)[k]
        best = val if best is None else max(best, val)
        if val == 0:
            sat.append(v)
    rank = affine_rank([v.model.vector for v in sat]) if sat else -1
    return FacetReport(Facet("positivity", edge, outcome), tuple(sat), rank,
                       best, 0, 2 * n)


@dataclass(frozen=True)
class EliminationReport:
    vertex: CtxVertex
    inequality: Inequality
    value_at_vertex: object
    violators: tuple  # every ND vertex model with value > bound
    max_other: object  # largest value over all other ND vertices

    @property
    def confirmed(self) -> bool:
        return (self.value_at_vertex == self.inequality.n
                and self.violators == (self.vertex.model,)
                and self.max_other <= self.inequality.bound)


def verify_elimination(ctx: CtxVertex, n: int | None = None) -> EliminationReport:
    """Check that gamma = ctx.corr_signs cuts off ``ctx`` and nothing else."""
    n = ctx.n if n is None else n
    if n != ctx.n:
        raise ValueError(f"vertex has n={ctx.n}, expected {n}")
    ineq = Inequality(ctx.corr_signs)
    at_ctx = evaluate(ineq, ctx.model)
    violators, other = [], None
    for m in all_vertex_models(n):
        val = evaluate(ineq, m)
        if val > ineq.bound:
            violators.append(m)
        if m != ctx.model:
            other = val if other is None else max(other, val)
    return EliminationReport(ctx, ineq, at_ctx, tuple(violators), other)


def all_vertex_models(n: int) -> list[MarginalModel]:
    return ([v.model for v in noncontextual_vertices(n)]
            + [c.model for c in contextual_vertices(n)])


# --- brute-force vertex enumeration ----------------------------------------

def positivity_system(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer (G, h) with the 4n conditions written as G z + h >= 0.

    Row 4*i + k is outcome OUTCOMES[k] on edge i; z is the 2n-vector.
    """
    G = np.zeros((4 * n, 2 * n), dtype=np.int64)
    h = np.ones(4 * n, dtype=np.int64)
    for i in range(n):
        j = (i + 1) % n
        for k, (sa, sb) in enumerate(OUTCOME_SIGNS):
            r = 4 * i + k
            G[r, i] += sa
            G[r, j] += sb
            G[r, n + i] += sa * sb
    return G, h


def enumerate_nd_vertices_oracle(n: int, force: bool = False, exact: bool = False,
                                 chunk: int = 50_000) -> list[MarginalModel]:
    """Vertices of {z : G z + h >= 0} by trying every 2n-subset of tight rows.

    With ``exact=True`` each subset is solved by Fraction elimination.  The
    default path solves subsets in numpy batches, then accepts a solution only
    after confirming it exactly in integer arithmetic: det(G_S) is an integer,
    so z = y / det with y integral, and both G_S y = -h_S det and feasibility
    are checked on int64 values.
    """
    _check_n(n)
    if n > ORACLE_MAX_N and not force:
        raise OutOfOracleRange(
            f"vertex enumeration oracle is limited to 3 <= n <= {ORACLE_MAX_N}; "
            f"pass force=True to run n={n}")
    G, h = positivity_system(n)
    d = 2 * n
    combos = itertools.combinations(range(4 * n), d)
    found: set = set()
    if exact:
        for S in combos:
            z = solve_square([G[r].tolist() for r in S], [-int(h[r]) for r in S])
            if z is None:
                continue
            if all(sum(int(G[r, c]) * z[c] for c in range(d)) + int(h[r]) >= 0
                   for r in range(4 * n)):
                found.add(z)
    else:
        Gf = G.astype(float)
        while True:
            idx = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64)
            if idx.size == 0:
                break
            found.update(_oracle_batch(G, h, Gf, idx))
    models = [MarginalModel.from_vector(z) for z in found]
    return sorted(models, key=_model_order)


def _oracle_batch(G, h, Gf, idx) -> set:
    out = set()
    M = Gf[idx]                      # (B, d, d)
    rhs = -h[idx].astype(float)      # (B, d)
    det = np.rint(np.linalg.det(M)).astype(np.int64)
    keep = det != 0
    if not keep.any():
        return out
    idx, M, rhs, det = idx[keep], M[keep], rhs[keep], det[keep]
    sol = np.linalg.solve(M, rhs[..., None])[..., 0]
    y = np.rint(sol * det[:, None]).astype(np.int64)
    Gi = G[idx]
    ok = np.all(np.einsum("bij,bj->bi", Gi, y) == -h[idx] * det[:, None], axis=1)
    for b in np.nonzero(~ok)[0]:
        # rounding did not reproduce the exact solution; solve this one exactly
        z = solve_square(Gi[b].tolist(), (-h[idx[b]]).tolist())
        if z is not None and _feasible_exact(G, h, z):
            out.add(z)
    y, det = y[ok], det[ok]
    slack = (y @ G.T + h[None, :] * det[:, None]) * np.sign(det)[:, None]
    feas = np.all(slack >= 0, axis=1)
    for yy, dd in zip(y[feas], det[feas]):
        out.add(tuple(Fraction(int(a), int(dd)) for a in yy))
    return out


def _feasible_exact(G, h, z) -> bool:
    return all(sum(int(G[r, c]) * z[c] for c in range(len(z))) + int(h[r]) >= 0
               for r in range(G.shape[0]))


def _model_order(mm: MarginalModel):
    return tuple(-v for v in mm.vector)


def oracle_agrees(n: int, **kwargs) -> tuple[bool, list[MarginalModel]]:
    """Compare the oracle's vertex set with the two generated families."""
    found = enumerate_nd_vertices_oracle(n, **kwargs)
    expected = {m.vector for m in all_vertex_models(n)}
    return {m.vector for m in found} == expected and len(found) == len(expected), found

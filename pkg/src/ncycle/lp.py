"""Exact rational feasibility LP.

Dense Phase-I simplex over ``Fraction`` with Bland's rule.  Every answer carries
a certificate that :func:`verify_certificate` re-checks by substitution: a
solution vector when feasible, a Farkas multiplier vector when infeasible.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

LE, EQ, GE = "<=", "=", ">="
FEASIBLE, INFEASIBLE = "feasible", "infeasible"


class DimensionMismatch(ValueError):
    pass


class CertificateError(RuntimeError):
    """A certificate failed its own re-check (indicates a solver bug)."""


def _frac(x) -> Fraction:
    # floats convert to their exact binary value
    return Fraction(x)


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``A[i] . x  (relations[i])  b[i]`` plus per-variable bounds.

    ``bounds[j]`` is ``(lo, hi)`` with ``None`` meaning unbounded on that side.
    When ``bounds`` is omitted every variable is nonnegative, as in most LP
    libraries.
    """

    A: tuple
    b: tuple
    relations: tuple
    bounds: Optional[tuple] = None

    def __post_init__(self):
        A = tuple(tuple(_frac(v) for v in row) for row in self.A)
        b = tuple(_frac(v) for v in self.b)
        rel = tuple(self.relations)
        if len(A) != len(b) or len(A) != len(rel):
            raise DimensionMismatch(
                f"{len(A)} rows, {len(b)} right-hand sides, {len(rel)} relations")
        widths = {len(row) for row in A}
        if len(widths) > 1:
            raise DimensionMismatch(f"ragged constraint matrix: widths {sorted(widths)}")
        for r in rel:
            if r not in (LE, EQ, GE):
                raise ValueError(f"unknown relation {r!r}")
        d = widths.pop() if widths else (len(self.bounds) if self.bounds else 0)
        bounds = self.bounds
        if bounds is None:
            bounds = ((Fraction(0), None),) * d
        bounds = tuple((None if lo is None else _frac(lo),
                        None if hi is None else _frac(hi)) for lo, hi in bounds)
        if len(bounds) != d:
            raise DimensionMismatch(f"{d} variables but {len(bounds)} bounds")
        for lo, hi in bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty variable range [{lo}, {hi}]")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "relations", rel)
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self) -> int:
        return len(self.bounds)

    @property
    def num_rows(self) -> int:
        return len(self.A)


@dataclass(frozen=True)
class FeasibilityCertificate:
    status: str
    witness: tuple
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


def check_solution(sys: LinearSystem, x: Sequence) -> bool:
    if len(x) != sys.num_vars:
        return False
    for (lo, hi), v in zip(sys.bounds, x):
        if lo is not None and v < lo:
            return False
        if hi is not None and v > hi:
            return False
    for row, rel, rhs in zip(sys.A, sys.relations, sys.b):
        lhs = sum(a * v for a, v in zip(row, x) if a)
        if rel == LE and lhs > rhs:
            return False
        if rel == GE and lhs < rhs:
            return False
        if rel == EQ and lhs != rhs:
            return False
    return True


def check_farkas(sys: LinearSystem, y: Sequence) -> bool:
    """True iff ``y`` proves ``sys`` infeasible.

    Sign convention: y_i <= 0 on ``<=`` rows, y_i >= 0 on ``>=`` rows, free on
    equalities, so every feasible x satisfies (A^T y) . x >= y . b.  The proof
    is complete when the largest value of (A^T y) . x over the variable box is
    finite and strictly below y . b.
    """
    if len(y) != sys.num_rows:
        return False
    for rel, yi in zip(sys.relations, y):
        if rel == LE and yi > 0:
            return False
        if rel == GE and yi < 0:
            return False
    g = [sum((sys.A[i][j] * y[i] for i in range(sys.num_rows) if y[i]),
             Fraction(0)) for j in range(sys.num_vars)]
    sup = Fraction(0)
    for gj, (lo, hi) in zip(g, sys.bounds):
        if gj > 0:
            if hi is None:
                return False
            sup += gj * hi
        elif gj < 0:
            if lo is None:
                return False
            sup += gj * lo
    yb = sum((yi * bi for yi, bi in zip(y, sys.b)), Fraction(0))
    return sup < yb


def verify_certificate(sys: LinearSystem, cert: FeasibilityCertificate) -> bool:
    if cert.feasible:
        return check_solution(sys, cert.witness)
    return check_farkas(sys, cert.witness)


def _standard_form(sys: LinearSystem):
    """Rewrite as  A' z = b',  z >= 0,  b' >= 0.

    Returns (rows, rhs, n_struct, recover, row_sign) where ``recover`` maps
    each original variable to (shift, [(z_col, coeff), ...]) and ``row_sign``
    is the sign used to make each original row's rhs nonnegative.
    """
    recover = []
    ncols = 0
    upper_rows = []  # (z_col, width) for doubly bounded variables
    for lo, hi in sys.bounds:
        if lo is not None:
            recover.append((lo, [(ncols, 1)]))
            if hi is not None:
                upper_rows.append((ncols, hi - lo))
            ncols += 1
        elif hi is not None:
            recover.append((hi, [(ncols, -1)]))
            ncols += 1
        else:
            recover.append((Fraction(0), [(ncols, 1), (ncols + 1, -1)]))
            ncols += 2
    n_struct = ncols

    m = sys.num_rows + len(upper_rows)
    n_slack = sum(1 for r in sys.relations if r != EQ) + len(upper_rows)
    width = n_struct + n_slack
    rows, rhs = [], []
    slack = n_struct
    row_sign = []
    for row, rel, bi in zip(sys.A, sys.relations, sys.b):
        new = [Fraction(0)] * width
        shift = bi
        for j, a in enumerate(row):
            if not a:
                continue
            s0, parts = recover[j]
            shift -= a * s0
            for col, c in parts:
                new[col] += a * c
        if rel == LE:
            new[slack] = Fraction(1)
            slack += 1
        elif rel == GE:
            new[slack] = Fraction(-1)
            slack += 1
        sign = -1 if shift < 0 else 1
        row_sign.append(sign)
        rows.append([sign * v for v in new])
        rhs.append(sign * shift)
    for col, w in upper_rows:
        new = [Fraction(0)] * width
        new[col] = Fraction(1)
        new[slack] = Fraction(1)
        slack += 1
        rows.append(new)
        rhs.append(w)
    assert len(rows) == m
    return rows, rhs, n_struct, recover, row_sign


def solve_feasibility(sys: LinearSystem, max_pivots: int | None = None
                      ) -> FeasibilityCertificate:
    """Decide feasibility of ``sys`` exactly.

    The returned certificate has already been re-verified; a failed re-check
    raises CertificateError rather than returning a wrong answer.
    """
    rows, rhs, n_struct, recover, row_sign = _standard_form(sys)
    m = len(rows)
    width = len(rows[0]) if rows else n_struct
    n_total = width + m  # artificial variable k lives in column width + k

    # tableau rows: [coefficients..., rhs]
    T = []
    for k, (row, r) in enumerate(zip(rows, rhs)):
        art = [Fraction(0)] * m
        art[k] = Fraction(1)
        T.append(row + art + [r])
    basis = [width + k for k in range(m)]
    # reduced costs of the Phase-I objective (minimize sum of artificials)
    cost = [Fraction(0)] * (n_total + 1)
    for j in range(width):
        cost[j] = -sum((T[i][j] for i in range(m)), Fraction(0))
    cost[n_total] = -sum((T[i][n_total] for i in range(m)), Fraction(0))

    pivots = 0
    while True:
        enter = next((j for j in range(n_total) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][n_total] / a
                if (best is None or ratio < best
                        or (ratio == best and basis[i] < basis[leave])):
                    leave, best = i, ratio
        if leave is None:  # cannot happen: Phase I is bounded below by 0
            raise CertificateError("unbounded Phase-I direction")
        _pivot(T, cost, leave, enter)
        basis[leave] = enter
        pivots += 1
        if max_pivots is not None and pivots > max_pivots:
            raise RuntimeError(f"pivot limit {max_pivots} exceeded")

    objective = -cost[n_total]
    if objective == 0:
        z = [Fraction(0)] * width
        for i, var in enumerate(basis):
            if var < width:
                z[var] = T[i][n_total]
        x = []
        for shift, parts in recover:
            x.append(shift + sum((c * z[col] for col, c in parts), Fraction(0)))
        cert = FeasibilityCertificate(FEASIBLE, tuple(x), pivots)
    else:
        # dual of Phase I: y'_k = 1 - (reduced cost of artificial k)
        y_std = [1 - cost[width + k] for k in range(m)]
        y = tuple(row_sign[i] * y_std[i] for i in range(sys.num_rows))
        cert = FeasibilityCertificate(INFEASIBLE, y, pivots)
    if not verify_certificate(sys, cert):
        raise CertificateError(f"{cert.status} certificate failed re-check")
    return cert


def _pivot(T, cost, r, c):
    prow = T[r]
    piv = prow[c]
    if piv != 1:
        inv = 1 / piv
        prow[:] = [v * inv for v in prow]
    nz = [j for j, v in enumerate(prow) if v]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[c]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    f = cost[c]
    if f:
        for j in nz:
            cost[j] -= f * prow[j]


# --- convex hull membership ------------------------------------------------

@dataclass(frozen=True)
class ConvexDecomposition:
    """Result of :func:`convex_decompose`.

    When feasible, ``weights[k]`` multiplies ``vertices[k]``.  Otherwise
    ``normal``/``offset`` describe an affine function h(u) = normal . u + offset
    with h(v) <= 0 for every vertex and h(point) > 0.
    """

    feasible: bool
    weights: Optional[tuple] = None
    normal: Optional[tuple] = None
    offset: Optional[Fraction] = None
    certificate: Optional[FeasibilityCertificate] = field(default=None, repr=False)

    def separation(self, u: Sequence) -> Fraction:
        return sum((a * _frac(v) for a, v in zip(self.normal, u)), self.offset)


def convex_decompose(point: Sequence, vertices: Sequence[Sequence]
                     ) -> ConvexDecomposition:
    """Write ``point`` as a convex combination of ``vertices`` or separate it."""
    if not vertices:
        raise DimensionMismatch("no vertices given")
    d = len(point)
    for v in vertices:
        if len(v) != d:
            raise DimensionMismatch(f"vertex of dimension {len(v)}, point of {d}")
    k = len(vertices)
    A = [[vertices[j][i] for j in range(k)] for i in range(d)]
    A.append([1] * k)
    b = list(point) + [1]
    sys = LinearSystem(A, b, (EQ,) * (d + 1))
    cert = solve_feasibility(sys)
    if cert.feasible:
        return ConvexDecomposition(True, weights=cert.witness, certificate=cert)
    y = cert.witness
    return ConvexDecomposition(False, normal=tuple(y[:d]), offset=y[d],
                               certificate=cert)


# --- exact elimination -----------------------------------------------------

def row_echelon(matrix: Sequence[Sequence]) -> tuple[list, list]:
    """Reduced row echelon form over Fraction; returns (rows, pivot_columns)."""
    M = [[_frac(v) for v in row] for row in matrix]
    if not M:
        return [], []
    ncols = len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [v * inv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(row_echelon(matrix)[1])


def affine_rank(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of ``points``."""
    if not points:
        raise ValueError("affine_rank of an empty point set")
    base = [_frac(v) for v in points[0]]
    diffs = [[_frac(v) - b for v, b in zip(p, base)] for p in points[1:]]
    return rank(diffs) if diffs else 0


def solve_square(A: Sequence[Sequence], b: Sequence) -> Optional[tuple]:
    """Unique solution of the square system A x = b, or None if singular."""
    n = len(A)
    aug = [list(row) + [rhs] for row, rhs in zip(A, b)]
    R, piv = row_echelon(aug)
    if piv != list(range(n)):
        return None
    return tuple(R[i][n] for i in range(n))

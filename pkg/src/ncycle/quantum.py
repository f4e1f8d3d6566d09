"""Explicit quantum realizations reaching the maximal n-cycle violation.

Odd n uses a qutrit with rank-one projectors onto vectors arranged so that
consecutive ones are orthogonal.  Even n uses the two-qubit singlet with
observables alternating between the two tensor factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import MarginalModel, ModelError, is_valid
from .polytope import Inequality, evaluate, inequalities

IDENTITY_TOL = 1e-12
MATRIX_TOL = 1e-10
VALUE_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PRISM, MOBIUS = "prism", "mobius"


class CommutatorViolation(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class QuantumRealization:
    n: int
    state: np.ndarray
    observables: tuple

    @property
    def dim(self) -> int:
        return self.state.shape[0]

    def check(self) -> list[str]:
        """Names of the invariants that fail (empty when all hold)."""
        failed = []
        if abs(np.linalg.norm(self.state) - 1) > IDENTITY_TOL:
            failed.append("state norm")
        eye = np.eye(self.dim)
        for j, X in enumerate(self.observables):
            if np.abs(X - X.conj().T).max() > MATRIX_TOL:
                failed.append(f"X_{j} hermitian")
            if np.abs(X @ X - eye).max() > MATRIX_TOL:
                failed.append(f"X_{j} squares to identity")
        for j in range(self.n):
            if commutator_norm(self, j) > MATRIX_TOL:
                failed.append(f"[X_{j}, X_{(j + 1) % self.n}] = 0")
        return failed

    def to_json(self) -> dict:
        def pairs(a):
            return [[float(z.real), float(z.imag)] for z in a]
        return {
            "n": self.n,
            "dim": self.dim,
            "state": pairs(self.state),
            "observables": [[pairs(row) for row in X] for X in self.observables],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuantumRealization":
        def arr(a):
            return np.array([complex(re, im) for re, im in a])
        state = arr(data["state"])
        obs = tuple(np.array([arr(row) for row in X]) for X in data["observables"])
        return cls(data["n"], state, obs)


def commutator_norm(qr: QuantumRealization, j: int) -> float:
    A = qr.observables[j]
    B = qr.observables[(j + 1) % qr.n]
    return float(np.linalg.norm(A @ B - B @ A, 2))


def odd_angle(n: int) -> float:
    """theta with cos^2(theta) = cos(pi/n) / (1 + cos(pi/n))."""
    c = math.cos(math.pi / n)
    return math.acos(math.sqrt(c / (1 + c)))


def odd_vectors(n: int) -> np.ndarray:
    theta = odd_angle(n)
    phi = np.arange(n) * math.pi * (n - 1) / n
    return np.stack([np.full(n, math.cos(theta)),
                     math.sin(theta) * np.cos(phi),
                     math.sin(theta) * np.sin(phi)], axis=1)


def build_odd(n: int) -> QuantumRealization:
    if n % 2 == 0 or n < 3:
        raise ValueError(f"odd construction needs odd n >= 3, got {n}")
    eye = np.eye(3)
    obs = tuple((2 * np.outer(v, v) - eye).astype(complex) for v in odd_vectors(n))
    state = np.array([1, 0, 0], dtype=complex)
    return QuantumRealization(n, state, obs)


def build_even(n: int) -> QuantumRealization:
    if n % 2 or n < 4:
        raise ValueError(f"even construction needs even n >= 4, got {n}")
    eye = np.eye(2)
    obs = []
    for j in range(n):
        a = j * math.pi / n
        Xt = math.cos(a) * SIGMA_X + math.sin(a) * SIGMA_Z
        obs.append(np.kron(Xt, eye) if j % 2 == 0 else np.kron(eye, Xt))
    state = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
    return QuantumRealization(n, state, tuple(obs))


def build(n: int) -> QuantumRealization:
    """The parity-appropriate construction."""
    return build_odd(n) if n % 2 else build_even(n)


def _expect(psi: np.ndarray, op: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, op @ psi)))


def correlations_of(qr: QuantumRealization, tol: float = MATRIX_TOL) -> MarginalModel:
    for j in range(qr.n):
        norm = commutator_norm(qr, j)
        if norm > tol:
            raise CommutatorViolation(
                f"X_{j} and X_{(j + 1) % qr.n} do not commute (norm {norm:.3g})")
    psi = qr.state
    local = tuple(_expect(psi, X) for X in qr.observables)
    corr = tuple(_expect(psi, qr.observables[j] @ qr.observables[(j + 1) % qr.n])
                 for j in range(qr.n))
    mm = MarginalModel(qr.n, local, corr)
    if not is_valid(mm, VALUE_TOL).valid:
        raise ModelError("quantum model left the no-disturbance polytope")
    return mm


def omega_max(qr: QuantumRealization) -> tuple[Inequality, float]:
    """Best inequality for this realization and its value; ties go to the first."""
    mm = correlations_of(qr)
    best, best_val = None, -math.inf
    for ineq in inequalities(qr.n):
        val = evaluate(ineq, mm)
        if val > best_val + VALUE_TOL:
            best, best_val = ineq, val
    return best, best_val


def tsirelson(n: int) -> float:
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")
    c = math.cos(math.pi / n)
    if n % 2:
        return (3 * n * c - n) / (1 + c)
    return n * c


def lovasz_closed_form(kind: str, n: int) -> float:
    """Lovasz theta of the prism graph Y_n (odd n) or Moebius ladder M_2n (even n)."""
    c = math.cos(math.pi / n)
    if kind == PRISM:
        if n % 2 == 0:
            raise ValueError("prism closed form applies to odd n")
        return 2 * n * c / (1 + c)
    if kind == MOBIUS:
        if n % 2:
            raise ValueError("Moebius ladder closed form applies to even n")
        return n / 2 * (1 + c)
    raise ValueError(f"unknown graph kind {kind!r}")


def graph_kind(n: int) -> str:
    return PRISM if n % 2 else MOBIUS


def expected_gamma(n: int) -> tuple:
    """Sign pattern the maximum is expected on: all -1, except gamma_{n-1}=+1 for even n."""
    if n % 2:
        return (-1,) * n
    return (-1,) * (n - 1) + (1,)

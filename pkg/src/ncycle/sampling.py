"""Seeded random rational models for sweeps and cross-checks."""
from __future__ import annotations

import random
from fractions import Fraction

from .model import EdgeDistribution, MarginalModel, ProbabilityModel
from .polytope import all_vertex_models, contextual_vertices, noncontextual_vertices


def _rand_frac(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 60) -> Fraction:
    """Random rational in [lo, hi] on a grid of step (hi - lo) / den."""
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


def _mix(rng: random.Random, points: list, k: int) -> tuple:
    chosen = rng.sample(points, min(k, len(points)))
    raw = [rng.randint(1, 20) for _ in chosen]
    total = sum(raw)
    d = len(chosen[0])
    return tuple(sum(Fraction(w, total) * p[c] for w, p in zip(raw, chosen))
                 for c in range(d))


def random_probability_model(n: int, rng: random.Random) -> ProbabilityModel:
    """A random no-disturbance model built edge by edge.

    Draws p(X_i = +1) for every i, then a joint p(++) on each edge inside the
    range allowed by the two marginals.
    """
    a = [_rand_frac(rng, Fraction(0), Fraction(1)) for _ in range(n)]
    edges = []
    for i in range(n):
        ai, aj = a[i], a[(i + 1) % n]
        pp = _rand_frac(rng, max(Fraction(0), ai + aj - 1), min(ai, aj))
        edges.append(EdgeDistribution(i, (pp, ai - pp, aj - pp, 1 - ai - aj + pp)))
    return ProbabilityModel(n, tuple(edges))


def random_nd_model(n: int, rng: random.Random) -> MarginalModel:
    """Random convex mixture of no-disturbance vertices (both families)."""
    verts = [m.vector for m in all_vertex_models(n)]
    return MarginalModel.from_vector(_mix(rng, verts, rng.randint(1, 4)))


def random_member(n: int, rng: random.Random) -> MarginalModel:
    """Random convex mixture of noncontextual vertices."""
    verts = [v.model.vector for v in noncontextual_vertices(n)]
    return MarginalModel.from_vector(_mix(rng, verts, rng.randint(1, 2 * n)))


def random_contextual(n: int, rng: random.Random) -> MarginalModel:
    """Mixture putting weight t in [0.85, 1] on one contextual vertex.

    Its inequality then reads at least (2t - 1) n, above n - 2 whenever
    n <= 6; for larger n the result may be noncontextual.
    """
    ctx = rng.choice(contextual_vertices(n)).model.vector
    rest = _mix(rng, [v.model.vector for v in noncontextual_vertices(n)],
                rng.randint(1, n))
    t = Fraction(rng.randint(85, 100), 100)
    return MarginalModel.from_vector(
        tuple(t * c + (1 - t) * r for c, r in zip(ctx, rest)))


def random_box_model(n: int, rng: random.Random) -> MarginalModel:
    """Uniform rational point of [-1, 1]^{2n}; usually outside the polytope."""
    return MarginalModel.from_vector(
        tuple(_rand_frac(rng, Fraction(-1), Fraction(1), 40) for _ in range(2 * n)))


def mixed_models(n: int, count: int, seed: int) -> list[MarginalModel]:
    """Fixed-seed blend of members, contextual points and box points."""
    rng = random.Random(seed)
    gens = (random_member, random_nd_model, random_contextual, random_box_model)
    return [gens[k % len(gens)](n, rng) for k in range(count)]

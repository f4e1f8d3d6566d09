import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncycle.model import (
    OUTCOME_SIGNS,
    OUTCOMES,
    TRANSFORM,
    EdgeDistribution,
    MarginalModel,
    ModelError,
    NegativeProbability,
    NoDisturbanceViolation,
    ProbabilityModel,
    SATURATED,
    is_valid,
    model_from_json,
    model_to_json,
    positivity_values,
    to_expectation,
    to_probability,
)
from ncycle.lp import rank
from ncycle.polytope import contextual_vertices, noncontextual_vertices, positivity_system
from ncycle.sampling import random_probability_model


def uniform_edges(n, probs):
    return ProbabilityModel.from_lists([probs] * n)


def expectations_by_definition(probs):
    """<X_i>, <X_{i+1}>, <X_i X_{i+1}> summed outcome by outcome."""
    a = sum(p * sa for p, (sa, sb) in zip(probs, OUTCOME_SIGNS))
    b = sum(p * sb for p, (sa, sb) in zip(probs, OUTCOME_SIGNS))
    c = sum(p * sa * sb for p, (sa, sb) in zip(probs, OUTCOME_SIGNS))
    return a, b, c


def test_transform_squares_to_four_identity():
    for i in range(4):
        for j in range(4):
            v = sum(TRANSFORM[i][k] * TRANSFORM[k][j] for k in range(4))
            assert v == (4 if i == j else 0)


def test_deterministic_plus_plus():
    mm = to_expectation(uniform_edges(5, [1, 0, 0, 0]))
    assert mm.local == (1,) * 5
    assert mm.correlations == (1,) * 5


def test_uniform_distribution():
    q = F(1, 4)
    mm = to_expectation(uniform_edges(4, [q, q, q, q]))
    assert mm.local == (0,) * 4 and mm.correlations == (0,) * 4


def test_mixed_three_cycle():
    h = F(1, 2)
    edges = [[h, 0, 0, h], [h, 0, 0, h], [0, h, h, 0]]
    mm = to_expectation(ProbabilityModel.from_lists(edges))
    expected_corr = tuple(expectations_by_definition(e)[2] for e in edges)
    assert expected_corr == (1, 1, -1)
    assert mm.local == (0, 0, 0)
    assert mm.correlations == expected_corr


def test_no_disturbance_violation():
    h = F(1, 2)
    edges = [[1, 0, 0, 0], [h, 0, 0, h], [h, 0, 0, h]]
    with pytest.raises(NoDisturbanceViolation) as exc:
        to_expectation(ProbabilityModel.from_lists(edges))
    assert exc.value.vertex in (0, 1)


def test_float_no_disturbance_tolerance():
    eps = 1e-14
    edges = [[0.25 + eps, 0.25, 0.25, 0.25 - eps]] * 3
    mm = to_expectation(ProbabilityModel.from_lists(edges))
    assert abs(mm.correlations[0]) < 1e-12
    bad = [[0.25 + 1e-6, 0.25 - 1e-6, 0.25, 0.25]] + [[0.25] * 4] * 2
    with pytest.raises(NoDisturbanceViolation):
        to_expectation(ProbabilityModel.from_lists(bad))


def test_normalization_required():
    with pytest.raises(ModelError):
        to_expectation(uniform_edges(3, [F(1, 2), 0, 0, 0]))


def test_to_probability_examples():
    pm = to_probability(MarginalModel(4, (1,) * 4, (1,) * 4))
    assert all(e.probs == (1, 0, 0, 0) for e in pm.edges)
    pm = to_probability(MarginalModel(4, (0,) * 4, (1,) * 4))
    assert all(e.probs == (F(1, 2), 0, 0, F(1, 2)) for e in pm.edges)


def test_negative_probability():
    with pytest.raises(NegativeProbability) as exc:
        to_probability(MarginalModel(3, (1, 1, 1), (-1, -1, -1)))
    assert exc.value.value < 0
    assert exc.value.outcome in ("++", "--")


def saturated_rank(mm):
    G, _ = positivity_system(mm.n)
    rows = [G[4 * c.edge + OUTCOMES.index(c.outcome)] for c in is_valid(mm).saturated]
    return rank(rows)


def test_is_valid_vertices_saturation():
    # deterministic edges zero three of four probabilities: 3n tight rows, 2n independent
    for n in (3, 4, 5):
        for v in noncontextual_vertices(n):
            rep = is_valid(v.model)
            assert rep.valid and len(rep.saturated) == 3 * n
            assert saturated_rank(v.model) == 2 * n
        for c in contextual_vertices(n):
            rep = is_valid(c.model)
            assert rep.valid and len(rep.saturated) == 2 * n
            assert saturated_rank(c.model) == 2 * n


def test_is_valid_specific_contextual_vertex():
    rep = is_valid(MarginalModel(4, (0,) * 4, (-1, 1, 1, 1)))
    assert rep.valid
    assert len(rep.conditions) == 16 and len(rep.saturated) == 8


def test_is_valid_out_of_range():
    rep = is_valid(MarginalModel(3, (0,) * 3, (F(3, 2),) * 3))
    assert not rep.valid
    assert rep.out_of_range == (3, 4, 5)
    assert rep.violated


def test_n_below_three_rejected():
    with pytest.raises(ModelError):
        MarginalModel(2, (0, 0), (0, 0))


def test_exact_scalars_reduced():
    mm = MarginalModel(3, ("2/4", 0, 0), (0, 0, F(-6, 8)))
    assert mm.local[0] == F(1, 2) and mm.local[0].denominator == 2
    assert mm.correlations[2].denominator > 0


def test_json_round_trip():
    mm = MarginalModel(3, (F(1, 3), 0, -1), (F(-1, 3), 0, F(1, 7)))
    data = model_to_json(mm)
    assert data["local"][0] == "1/3" and data["representation"] == "expectation"
    assert model_from_json(data) == mm
    pm = to_probability(MarginalModel(3, (0,) * 3, (0,) * 3))
    back = model_from_json(model_to_json(pm))
    assert back == pm
    assert model_from_json({"edges": [["1/4"] * 4] * 3}) == pm
    fl = model_from_json({"n": 3, "representation": "expectation",
                          "local": [0.5, 0, 0], "correlations": [0, 0, 0]})
    assert isinstance(fl.local[0], float)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 7), seed=st.integers(0, 10**6))
def test_round_trip_property(n, seed):
    pm = random_probability_model(n, random.Random(seed))
    assert to_probability(to_expectation(pm)) == pm


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 7), seed=st.integers(0, 10**6))
def test_positivity_values_are_four_times_probabilities(n, seed):
    pm = random_probability_model(n, random.Random(seed))
    mm = to_expectation(pm)
    for i in range(n):
        assert positivity_values(mm, i) == tuple(4 * p for p in pm.edges[i].probs)
    assert is_valid(mm).valid


def test_edge_distribution_rejects_wrong_length():
    with pytest.raises(ModelError):
        EdgeDistribution(0, (1, 0, 0))

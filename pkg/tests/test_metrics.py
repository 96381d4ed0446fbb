# -*- coding: utf-8 -*-
import itertools

import numpy as np
import pytest

from tools.error_handler import ConvergenceError, ValidationError
from tools.metrics import emd, emd_exact, emd_sinkhorn, normalized_performance, round_to_marginals


def _brute_force_emd(p, q):
    best = np.inf
    for perm in itertools.permutations(range(len(q))):
        best = min(best, np.mean(np.linalg.norm(p - q[list(perm)], axis=1)))
    return best


@pytest.mark.unit
def test_exact_emd_matches_brute_force():
    r = np.random.default_rng(0)
    for _ in range(200):
        m = int(r.integers(1, 7))
        p, q = r.uniform(size=(m, 2)), r.uniform(size=(m, 2))
        assert emd_exact(p, q) == pytest.approx(_brute_force_emd(p, q), abs=1e-9)


@pytest.mark.unit
def test_exact_emd_is_a_metric():
    r = np.random.default_rng(1)
    for _ in range(50):
        p, q, s = (r.uniform(size=(8, 2)) for _ in range(3))
        assert emd_exact(p, p) == 0.0
        assert emd_exact(p, q) == pytest.approx(emd_exact(q, p), abs=1e-12)
        assert emd_exact(p, s) <= emd_exact(p, q) + emd_exact(q, s) + 1e-12


@pytest.mark.unit
def test_translation_moves_every_point_by_the_offset():
    cloud = np.random.default_rng(2).uniform(size=(20, 2))
    offset = np.array([0.3, -0.4])
    assert emd_exact(cloud, cloud + offset) == pytest.approx(0.5, abs=1e-9)


@pytest.mark.unit
def test_exact_emd_input_validation():
    with pytest.raises(ValidationError):
        emd_exact(np.zeros((3, 2)), np.zeros((4, 2)))
    with pytest.raises(ValidationError):
        emd_exact(np.zeros((3, 3)), np.zeros((3, 3)))
    with pytest.raises(ValidationError):
        emd_exact(np.zeros((300, 2)), np.zeros((300, 2)))


@pytest.mark.unit
def test_sinkhorn_is_bracketed_by_exact_emd():
    r = np.random.default_rng(3)
    epsilon = 0.02
    for _ in range(20):
        m = int(r.integers(2, 11))
        p, q = r.uniform(size=(m, 2)), r.uniform(size=(m, 2))
        exact = emd_exact(p, q)
        result = emd_sinkhorn(p, q, epsilon=epsilon, max_iters=5000)
        assert result.cost >= exact - 1e-9
        assert result.cost <= exact + epsilon * np.log(m * m) + 1e-9
        np.testing.assert_allclose(result.plan.sum(axis=1), 1.0 / m, atol=1e-9)
        np.testing.assert_allclose(result.plan.sum(axis=0), 1.0 / m, atol=1e-9)


@pytest.mark.unit
def test_unequal_clouds_use_sinkhorn(monkeypatch):
    from tools.metrics import core as metrics_core

    calls = []

    def fake_sinkhorn(p, q):
        calls.append((len(p), len(q)))
        return metrics_core.SinkhornResult(0.125, np.zeros((len(p), len(q))), 1, 0.0)

    monkeypatch.setattr(metrics_core, "emd_sinkhorn", fake_sinkhorn)
    r = np.random.default_rng(4)
    assert emd(r.uniform(size=(6, 2)), r.uniform(size=(9, 2))) == 0.125
    assert emd(r.uniform(size=(6, 2)), r.uniform(size=(6, 2))) > 0
    assert calls == [(6, 9)]


@pytest.mark.unit
def test_sinkhorn_reports_non_convergence():
    r = np.random.default_rng(5)
    with pytest.raises(ConvergenceError) as info:
        emd_sinkhorn(r.uniform(size=(5, 2)), r.uniform(size=(7, 2)), max_iters=1, tolerance=1e-30)
    assert info.value.details["iterations"] == 1
    with pytest.raises(ValidationError):
        emd_sinkhorn(np.zeros((2, 2)), np.ones((2, 2)), epsilon=0.0)


@pytest.mark.unit
def test_round_to_marginals_restores_feasibility():
    r = np.random.default_rng(6)
    plan = r.uniform(size=(4, 5)) / 20.0
    rows, cols = np.full(4, 0.25), np.full(5, 0.2)
    fixed = round_to_marginals(plan, rows, cols)
    np.testing.assert_allclose(fixed.sum(axis=1), rows, atol=1e-12)
    np.testing.assert_allclose(fixed.sum(axis=0), cols, atol=1e-12)
    assert np.all(fixed >= 0)


@pytest.mark.unit
def test_normalized_performance():
    cloud = np.random.default_rng(7).uniform(size=(12, 2))
    goal = cloud + [1.0, 0.0]
    assert normalized_performance(cloud, goal, goal) == pytest.approx(1.0, abs=1e-12)
    assert normalized_performance(cloud, cloud, goal) == 0.0
    assert normalized_performance(cloud, cloud - [1.0, 0.0], goal) == pytest.approx(-1.0, abs=1e-9)
    with pytest.raises(ValidationError):
        normalized_performance(goal, cloud, goal)


@pytest.mark.slow
def test_sinkhorn_small_epsilon_approaches_exact():
    r = np.random.default_rng(8)
    p, q = r.uniform(size=(10, 2)), r.uniform(size=(10, 2))
    exact = emd_exact(p, q)
    result = emd_sinkhorn(p, q, epsilon=0.001, max_iters=200000)
    assert abs(result.cost - exact) <= 0.05 * exact

"""Estimate and covariance propagation under the switched observation model."""

import numpy as np
import pytest

from lqswitch import (
    ERASURE,
    covariance_path,
    predict_cov,
    predict_state,
    update_cov,
    update_state,
)


def test_predict_state_examples(scalar_spec, paper_spec):
    z = np.zeros(1)
    assert np.array_equal(predict_state(z, z, z, scalar_spec), z)
    out = predict_state(np.array([2.0]), np.array([-1.0]), np.array([-1.0]), scalar_spec)
    assert out[0] == 0.0
    out = predict_state(np.array([1.0, 0.0]), np.zeros(2), np.zeros(2), paper_spec)
    assert np.allclose(out, [0.4, -0.8], atol=0)


def test_update_state_branches():
    pred = np.array([1.0, 2.0])
    assert np.array_equal(update_state(pred, 0, ERASURE), pred)
    obs = np.array([3.0, -1.0])
    assert update_state(pred, 1, obs) is obs


def test_update_state_protocol_violations():
    pred = np.zeros(2)
    with pytest.raises(ValueError, match="protocol"):
        update_state(pred, 1, ERASURE)
    with pytest.raises(ValueError, match="protocol"):
        update_state(pred, 0, np.zeros(2))


def test_predict_cov(scalar_spec, paper_spec):
    assert np.array_equal(predict_cov(np.zeros((2, 2)), paper_spec), 0.25 * np.eye(2))
    assert predict_cov(np.array([[2.0]]), scalar_spec)[0, 0] == 3.0
    M = predict_cov(np.array([[1.0, 0.2], [0.2, 2.0]]), paper_spec)
    assert np.array_equal(M, M.T)


def test_update_cov_exact_zero():
    M = np.array([[1.0, 0.5], [0.5, 2.0]])
    closed = update_cov(M, 1)
    assert np.array_equal(closed, np.zeros((2, 2)))
    assert np.array_equal(update_cov(M, 0), M)


def test_cov_chain(scalar_spec):
    M = np.array([[2.0]])
    assert predict_cov(update_cov(M, 0), scalar_spec)[0, 0] == 3.0


def test_covariance_path_scalar(scalar_spec):
    M_pred, M = covariance_path(scalar_spec, [1])
    assert M_pred[0][0, 0] == 2.0       # Sigma0 convention at stage 0
    assert M[0][0, 0] == 0.0            # closure zeroes the filtered covariance
    assert M_pred[1][0, 0] == 1.0       # A*0*A' + S
    assert M[1][0, 0] == 1.0            # no action at the terminal stage


def test_covariance_path_requires_full_schedule(paper_spec):
    with pytest.raises(ValueError, match="length"):
        covariance_path(paper_spec, [0, 1])


def test_error_recursion_in_rollouts(paper_solved):
    # realized estimation error follows e_t = (1 - delta_t)(A e_{t-1} + w_{t-1})
    # up to float rounding, and a closure makes the estimate exact
    from lqswitch import noise_for_run, rollout

    spec, ric, policy = paper_solved.spec, paper_solved.ric, paper_solved.policy
    for run in range(5):
        x0, w = noise_for_run(spec, seed=123, run=run)
        rec = rollout(spec, ric, policy, x0, w)
        err = rec.x - rec.xhat
        for t in range(1, spec.T + 1):
            expected = (1 - rec.delta[t]) * (spec.A @ err[t - 1] + rec.w[t - 1])
            assert np.max(np.abs(err[t] - expected)) <= 1e-10
            if rec.delta[t]:
                assert np.array_equal(rec.xhat[t], rec.x[t])


def test_filtered_cov_matches_schedule(paper_solved):
    # along the replayed schedule the deterministic covariances obey the
    # open/closed pattern stage by stage
    spec = paper_solved.spec
    schedule = paper_solved.policy.replay()
    M_pred, M = covariance_path(spec, schedule)
    for t in range(spec.T):
        if schedule[t]:
            assert np.array_equal(M[t], np.zeros((spec.n, spec.n)))
        else:
            assert np.array_equal(M[t], M_pred[t])

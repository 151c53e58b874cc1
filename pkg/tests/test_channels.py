import math

import numpy as np
import pytest

from capcert.channels import (ChannelModel, ProbeEnsemble, apply_channel_cov, make_rng,
                              nbar_to_squeezing_db, sample_channel_quadrature, squeezing_db_to_nbar,
                              tmsv_cov)
from capcert.gaussmath import bona_fide_check, gaussian_state_entropy, symplectic_eigenvalues

from conftest import random_bona_fide

CHANNELS = [
    ChannelModel.identity(),
    ChannelModel.loss(0.8),
    ChannelModel.loss(0.3, n_th=1.5),
    ChannelModel.loss(0.0, n_th=0.5),
    ChannelModel.amplifier(1.7),
    ChannelModel.amplifier(3.0, n_th=0.4),
    ChannelModel.additive(0.9),
]


def test_validation():
    with pytest.raises(ValueError):
        ChannelModel.loss(1.2)
    with pytest.raises(ValueError):
        ChannelModel.loss(0.5, n_th=-1)
    with pytest.raises(ValueError):
        ChannelModel.amplifier(0.5)
    with pytest.raises(ValueError):
        ChannelModel.additive(-0.1)
    with pytest.raises(ValueError):
        ChannelModel("beamsplitter")


def test_dict_round_trip():
    for ch in CHANNELS:
        assert ChannelModel.from_dict(ch.to_dict()) == ch
    with pytest.raises(ValueError):
        ChannelModel.from_dict({"kind": "loss", "tau": 0.5, "gain": 2})


def test_tmsv_cov():
    np.testing.assert_array_equal(tmsv_cov(0.0), np.eye(4))
    M = tmsv_cov(9.5)
    np.testing.assert_allclose(M[:2, :2], 20 * np.eye(2))
    np.testing.assert_allclose(M[:2, 2:], math.sqrt(399) * np.diag([1, -1]))
    np.testing.assert_allclose(symplectic_eigenvalues(M), [1, 1], atol=1e-9)
    with pytest.raises(ValueError):
        tmsv_cov(-0.1)


def test_apply_loss_on_tmsv():
    out = apply_channel_cov(ChannelModel.loss(0.8), tmsv_cov(9.5), 1)
    np.testing.assert_allclose(out[:2, :2], 20 * np.eye(2))
    np.testing.assert_allclose(out[2:, 2:], 16.2 * np.eye(2), rtol=1e-14)
    np.testing.assert_allclose(out[:2, 2:], math.sqrt(0.8 * 399) * np.diag([1, -1]), rtol=1e-14)


def test_apply_identity_and_vacuum():
    M = tmsv_cov(2.0)
    np.testing.assert_array_equal(apply_channel_cov(ChannelModel.identity(), M, 0), M)
    tau, nth = 0.35, 2.0
    v = tau + (1 - tau) * (2 * nth + 1)
    np.testing.assert_allclose(apply_channel_cov(ChannelModel.loss(tau, nth), np.eye(2), 0), v * np.eye(2))
    with pytest.raises(IndexError):
        apply_channel_cov(ChannelModel.identity(), M, 2)


def test_apply_preserves_bona_fide_and_other_mode(rng):
    for ch in CHANNELS:
        for _ in range(200):
            M, _ = random_bona_fide(rng)
            out = apply_channel_cov(ch, M, 1)
            assert bona_fide_check(out)
            np.testing.assert_array_equal(out[:2, :2], M[:2, :2])


def test_phase_insensitive():
    M = tmsv_cov(3.0)
    M[2:, 2:] += np.array([[0.4, 0.3], [0.3, 1.1]])
    for ch in CHANNELS:
        for theta in [0.3, 1.9]:
            c, s = math.cos(theta), math.sin(theta)
            R = np.eye(4)
            R[2:, 2:] = [[c, s], [-s, c]]
            a = apply_channel_cov(ch, R @ M @ R.T, 1)
            b = R @ apply_channel_cov(ch, M, 1) @ R.T
            np.testing.assert_allclose(a, b, atol=1e-12)


def test_pure_loss_output_entropy_equals_environment():
    # tmsv through pure loss: joint entropy equals output entropy of the complementary loss
    M = apply_channel_cov(ChannelModel.loss(0.7), tmsv_cov(4.0), 1)
    env = apply_channel_cov(ChannelModel.loss(0.3), np.diag([9.0, 9.0]), 0)
    assert gaussian_state_entropy(M) == pytest.approx(gaussian_state_entropy(env), rel=1e-10)


def test_sample_quadrature_examples():
    assert sample_channel_quadrature(ChannelModel.identity(), 1.23) == 1.23
    assert sample_channel_quadrature(ChannelModel.loss(1.0, n_th=3.0), 2.0, rng=make_rng(0)) == 2.0
    with pytest.raises(ValueError):
        sample_channel_quadrature(ChannelModel.loss(0.5), 0.0)


def test_sample_quadrature_variance():
    out = sample_channel_quadrature(ChannelModel.loss(0.5), np.zeros(100_000), rng=make_rng(1))
    se = 0.5 * math.sqrt(2 / out.size)
    assert abs(out.var() - 0.5) < 3 * se


def test_sample_matches_covariance_level():
    ch = ChannelModel.loss(0.6, n_th=0.7)
    r = make_rng(2)
    x = r.normal(0, math.sqrt(5.0), size=100_000)
    y = sample_channel_quadrature(ch, x, rng=r)
    emp = np.cov(np.vstack([x, y]))
    # mode 1 starts as a perfect copy of mode 0
    M = apply_channel_cov(ch, 5.0 * np.kron(np.ones((2, 2)), np.eye(2)), 1)
    expect = np.array([[M[0, 0], M[0, 2]], [M[0, 2], M[2, 2]]])
    se = np.sqrt((expect ** 2 + np.outer(np.diag(expect), np.diag(expect))) / x.size)
    assert np.all(np.abs(emp - expect) < 5 * se)


def test_make_rng_streams():
    a = make_rng(7, 0).normal(size=5)
    np.testing.assert_array_equal(a, make_rng(7, 0).normal(size=5))
    assert not np.allclose(a, make_rng(7, 1).normal(size=5))


def test_probe_ensemble_squeezing_relation():
    p = ProbeEnsemble(count=10, s_db=13.0)
    assert p.n_bar == pytest.approx((10 ** 1.3 - 1) / 2, rel=1e-15)
    assert p.variance == pytest.approx(10 ** 1.3, rel=1e-14)
    q = ProbeEnsemble(count=10, n_bar=9.5)
    assert q.s_db == pytest.approx(nbar_to_squeezing_db(9.5))
    assert squeezing_db_to_nbar(q.s_db) == pytest.approx(9.5, rel=1e-14)
    with pytest.raises(ValueError):
        ProbeEnsemble(count=1)
    with pytest.raises(ValueError):
        ProbeEnsemble(count=1, n_bar=1.0, s_db=3.0)

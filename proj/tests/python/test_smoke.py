import math

import numpy as np
import pytest

import ebl


def random_mask(shape, seed):
    return np.random.default_rng(seed).random(shape) < 0.5


def test_perfect_prediction_has_zero_energy():
    g = ebl.disc_mask(32, 32, 16, 16, 5)
    e, grad = ebl.loss_and_grad(g, g.astype(float), alpha=1.0)
    assert abs(e) <= 1e-10
    assert np.abs(grad).max() == 0.0


def test_spectral_and_direct_agree():
    d = np.random.default_rng(0).uniform(-1, 1, (16, 12))
    es = ebl.energy_spectral(d)
    ed = ebl.energy_direct(d)
    assert es > 0
    assert abs(es - ed) <= 1e-10 * es


def test_impulse_energy_is_kernel_origin():
    d = np.zeros((8, 8))
    d[3, 5] = 1.0
    k = ebl.kernel_table(8, 8)
    assert ebl.energy_spectral(d, prefactor=1.0) == pytest.approx(k[0, 0], rel=1e-12)


def test_gradient_against_central_differences():
    rng = np.random.default_rng(1)
    g = random_mask((8, 8), 2)
    p = rng.uniform(0.02, 0.98, (8, 8))
    p[np.abs(np.abs(p - 0.5) - 0.25) < 1e-3] = 0.5
    _, grad = ebl.loss_and_grad(g, p, alpha=1.0)
    h = 1e-5
    for idx in [(0, 0), (3, 4), (7, 7)]:
        up, down = p.copy(), p.copy()
        up[idx] += h
        down[idx] -= h
        fd = (ebl.loss_and_grad(g, up, alpha=1.0)[0] - ebl.loss_and_grad(g, down, alpha=1.0)[0]) / (2 * h)
        assert grad[idx] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_halfnorm_is_symmetric_and_positive():
    rng = np.random.default_rng(3)
    u, v = rng.normal(size=(2, 10, 14))
    au, av = ebl.apply_halfnorm(u), ebl.apply_halfnorm(v)
    assert np.vdot(au, v) == pytest.approx(np.vdot(u, av), rel=1e-12)
    assert np.vdot(u, au) > 0


def test_evolve_recovers_shifted_disc():
    g = ebl.disc_mask(64, 64, 32, 32, 6)
    p0 = np.where(np.roll(g, 6, axis=1), 0.7, 0.3)
    out = ebl.evolve(g, p0)
    assert out["iou"] >= 0.95
    assert out["steps"] <= 500
    assert np.all(np.diff(out["energies"]) <= 1e-12)


def test_phantom_is_deterministic_and_binary():
    img_a, mask_a = ebl.phantom(seed=3)
    img_b, mask_b = ebl.phantom(seed=3)
    assert np.array_equal(img_a, img_b) and np.array_equal(mask_a, mask_b)
    assert mask_a.dtype == bool and img_a.shape == (64, 64)
    assert 0.01 < mask_a.mean() < 0.4


def test_metrics_hand_example():
    g = np.array([[1] * 10 + [0] * 90], dtype=bool)
    p = np.zeros((1, 100))
    p[0, :8] = 1.0
    p[0, 10:13] = 1.0
    r = ebl.evaluate(p, g)
    assert (r["tp"], r["fn"], r["fp"], r["tn"]) == (8, 2, 3, 87)
    assert r["f1"] == pytest.approx(16 / 21)
    assert ebl.roc_auc(g.astype(float), g) == 1.0


def test_baselines_shapes():
    g = random_mask((6, 6), 4)
    p = np.full((6, 6), 0.5)
    loss, grad = ebl.bce(p, g)
    assert loss == pytest.approx(math.log(2))
    assert grad.shape == (6, 6)
    assert ebl.dice(g.astype(float), g)[0] == pytest.approx(0.0, abs=1e-15)
    assert ebl.distance_transform(g).shape == (6, 6)


def test_toynet_train_and_checkpoint(tmp_path):
    img, mask = ebl.phantom(size=16, seed=1, n_branches=3)
    net = ebl.ToyNet.random(1)
    log = net.train([img], [mask], epochs=5, lr=1e-2)
    assert len(log) == 5 and all(np.isfinite(log))
    path = tmp_path / "net.bin"
    net.save(str(path))
    assert ebl.ToyNet.load(str(path)) == net
    assert ebl.ToyNet.from_bytes(net.to_bytes()) == net
    assert net.to_bytes()[:4] == b"EBL1"
    assert ebl.ToyNet().forward(img).max() == 0.5
    with pytest.raises(RuntimeError):
        ebl.ToyNet.from_bytes(b"NOPE")


def test_invalid_arguments_raise():
    g = ebl.disc_mask(16, 16, 8, 8, 3)
    with pytest.raises(ValueError):
        ebl.loss_and_grad(g, np.zeros((16, 16)), kind="cubic")
    with pytest.raises(ValueError):
        ebl.loss_and_grad(g, np.zeros((8, 16)))

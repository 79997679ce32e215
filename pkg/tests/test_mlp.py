import numpy as np
import pytest

from lrgakit.mlp import (
    MonomialTask,
    TrainConfig,
    TwoLayerMlp,
    count_inversions,
    forward,
    gradients,
    mse,
    sample_complexity_experiment,
    train_monomial,
)


def _kink_free(mlp, x, margin=1e-3):
    return np.abs(x @ mlp.w1 + mlp.b1).min() > margin


def _finite_differences(mlp, x, y, h=1e-5):
    out = []
    for name in ("w1", "b1", "a2"):
        p = getattr(mlp, name)
        g = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up = mse(mlp, x, y)
            p[idx] = old - h
            down = mse(mlp, x, y)
            p[idx] = old
            g[idx] = (up - down) / (2 * h)
        out.append(g)
    return out


def _grad_rel_error(seed):
    rng = np.random.default_rng(seed)
    d, h, m = rng.integers(1, 4), rng.integers(2, 8), rng.integers(3, 10)
    mlp = TwoLayerMlp.init(d, h, seed)
    mlp.b1[:] = rng.normal(size=h) * 0.3
    x, y = rng.normal(size=(m, d)), rng.normal(size=m)
    if not _kink_free(mlp, x):
        return None
    g = gradients(mlp, x, y)
    worst = 0.0
    for analytic, numeric in zip((g.w1, g.b1, g.a2), _finite_differences(mlp, x, y)):
        worst = max(worst, np.abs(analytic - numeric).max() / max(1e-8, np.abs(numeric).max()))
    return worst


@pytest.mark.parametrize("seed", range(10))
def test_gradient_check(seed):
    err = _grad_rel_error(seed)
    if err is not None:
        assert err <= 1e-5


def test_zero_loss_zero_gradient():
    mlp = TwoLayerMlp.init(2, 5, 0)
    x = np.random.default_rng(0).normal(size=(6, 2))
    g = gradients(mlp, x, forward(mlp, x))
    assert max(np.abs(v).max() for v in (g.w1, g.b1, g.a2)) <= 1e-12


def test_duplicated_samples_same_gradient():
    mlp = TwoLayerMlp.init(2, 5, 1)
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(6, 2)), rng.normal(size=6)
    g1, g2 = gradients(mlp, x, y), gradients(mlp, np.vstack([x, x]), np.concatenate([y, y]))
    for a, b in zip((g1.w1, g1.b1, g1.a2), (g2.w1, g2.b1, g2.a2)):
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0)
    with pytest.raises(ValueError):
        TrainConfig(steps=-1)
    with pytest.raises(ValueError):
        MonomialTask((-1,))
    with pytest.raises(ValueError):
        train_monomial(MonomialTask((1,)), 5, 4, TrainConfig())


def test_task_sampling():
    task = MonomialTask((2, 1))
    x, y = task.sample(20, np.random.default_rng(0))
    assert x.shape == (20, 3) and np.all(x[:, 2] == 1)
    np.testing.assert_allclose(y, x[:, 0] ** 2 * x[:, 1])


def test_constant_target_learned():
    res = train_monomial(MonomialTask((0,)), 100, 32, TrainConfig(learning_rate=0.05, steps=1500))
    assert res.test_mse <= 1e-4
    assert not res.diverged


def test_zero_steps_reports_initial_loss():
    res = train_monomial(MonomialTask((2,)), 50, 16, TrainConfig(steps=0))
    assert res.train_mse == res.initial_mse
    assert res.curve == [(0, res.initial_mse)]


def test_training_reproducible():
    cfg = TrainConfig(learning_rate=0.05, steps=50, seed=7)
    a = train_monomial(MonomialTask((2,)), 40, 16, cfg)
    b = train_monomial(MonomialTask((2,)), 40, 16, cfg)
    assert a.test_mse == b.test_mse and a.curve == b.curve


def test_divergence_flagged():
    res = train_monomial(MonomialTask((2,)), 40, 256, TrainConfig(learning_rate=0.5, steps=200))
    assert res.diverged


def test_minibatch_runs():
    res = train_monomial(MonomialTask((1,)), 40, 16, TrainConfig(steps=20, batch_size=8))
    assert "minibatch" in res.metadata["schedule"]


def test_inversions():
    assert count_inversions([3, 2, 1]) == 0
    assert count_inversions([1, 2, 1, 2]) == 2


def test_experiment_table():
    table = sample_complexity_experiment(MonomialTask((1,)), [20, 80], [0, 1], 16, TrainConfig(steps=30))
    assert [r.m for r in table.rows] == [20, 80]
    assert all(len(r.test_mses) == 2 and r.bound > 0 for r in table.rows)
    with pytest.raises(ValueError):
        sample_complexity_experiment(MonomialTask((1,)), [80, 20], [0], 16, TrainConfig(steps=1))

"""One-step network dynamics, disturbance draws, and the two observers."""

import numpy as np
import pytest

from netfeedback import (
    DisturbanceSpec,
    InverseObserver,
    LinearFunction,
    ObservationSpec,
    PlantModel,
    PlantState,
    WeightedDigraph,
    build_canonical,
    observe_direct,
    step,
)


def _model(g, f):
    return PlantModel(graph=g, f=f)


def test_step_two_cycle_oracle():
    # x+ = A f(x) + u + w on the unit 2-cycle with f = 2x
    g = build_canonical("cycle", 2)
    model = _model(g, LinearFunction(2.0))
    state = PlantState(0, np.array([1.0, -1.0]))
    nxt, w = step(model, state, np.zeros(2), w=np.zeros(2))
    assert nxt.t == 1
    np.testing.assert_array_equal(nxt.x, [-2.0, 2.0])
    np.testing.assert_array_equal(w, [0.0, 0.0])


def test_step_applies_control_and_disturbance():
    g = build_canonical("cycle", 2)
    model = _model(g, LinearFunction(1.0))
    state = PlantState(3, np.array([0.5, 0.25]))
    nxt, _ = step(model, state, np.array([1.0, -1.0]), w=np.array([0.1, 0.2]))
    np.testing.assert_allclose(nxt.x, [0.25 + 1.0 + 0.1, 0.5 - 1.0 + 0.2])


def test_step_shape_validation():
    g = build_canonical("cycle", 3)
    model = _model(g, LinearFunction(1.0))
    state = PlantState(0, np.zeros(3))
    with pytest.raises(ValueError):
        step(model, state, np.zeros(2), w=np.zeros(3))
    with pytest.raises(ValueError):
        step(model, state, np.zeros(3), w=np.zeros(4))


def test_step_overflow_is_not_an_error():
    g = build_canonical("single_selfloop", 1, a11=1.0)
    model = _model(g, LinearFunction(1e200))
    state = PlantState(0, np.array([1e200]))
    nxt, _ = step(model, state, np.zeros(1), w=np.zeros(1))
    assert not np.isfinite(nxt.x).all()


# ---- disturbance generators ----

def test_disturbance_validation():
    with pytest.raises(ValueError):
        DisturbanceSpec(w_star=-1.0)
    with pytest.raises(ValueError):
        DisturbanceSpec(w_star=0.0, generator="seeded_uniform")
    with pytest.raises(ValueError):
        DisturbanceSpec(w_star=1.0, generator="white_noise")
    with pytest.raises(ValueError):
        DisturbanceSpec(w_star=1.0, generator="constant_sign", sign=0)


def test_disturbance_draws_bounded_and_seeded():
    spec = DisturbanceSpec(w_star=0.3, generator="seeded_uniform", seed=9)
    a = spec.make_source()
    b = spec.make_source()
    for _ in range(50):
        wa = a.draw(4)
        assert np.all(np.abs(wa) <= 0.3)
        np.testing.assert_array_equal(wa, b.draw(4))


def test_constant_sign_draws():
    spec = DisturbanceSpec(w_star=0.5, generator="constant_sign", seed=2, sign=-1)
    src = spec.make_source()
    w = np.concatenate([src.draw(5) for _ in range(20)])
    assert np.all(w <= 0.0)
    assert np.all(w >= -0.5)
    assert w.min() < -1e-3  # actually draws something nonzero


def test_zero_generator():
    src = DisturbanceSpec().make_source()
    np.testing.assert_array_equal(src.draw(3), np.zeros(3))


# ---- observers ----

def test_observe_direct_exact_when_noiseless():
    f = LinearFunction(0.5, 0.1)
    x = np.array([1.0, -2.0, 0.0])
    np.testing.assert_array_equal(observe_direct(f, x), f(x))


def test_observe_direct_noise_bounded_and_seeded():
    f = LinearFunction(1.0)
    x = np.linspace(-1, 1, 6)
    r1 = np.random.default_rng(4)
    r2 = np.random.default_rng(4)
    z1 = observe_direct(f, x, d0=0.05, rng=r1)
    z2 = observe_direct(f, x, d0=0.05, rng=r2)
    np.testing.assert_array_equal(z1, z2)
    assert np.max(np.abs(z1 - f(x))) <= 0.05


def test_observation_spec_validation():
    with pytest.raises(ValueError):
        ObservationSpec(mode="telepathy")
    with pytest.raises(ValueError):
        ObservationSpec(d0=-0.1)


def test_inverse_observer_recovers_f_up_to_disturbance():
    # Z = A^{-1}(X(t+1) - U) = f(X) + A^{-1} W; permutation A has gain 1
    g = build_canonical("cycle", 3)
    f = LinearFunction(1.3, -0.2)
    obs = InverseObserver(g)
    assert obs.error_gain == pytest.approx(1.0)
    rng = np.random.default_rng(0)
    model = _model(g, f)
    for _ in range(30):
        x = rng.uniform(-5, 5, 3)
        u = rng.uniform(-1, 1, 3)
        w = rng.uniform(-0.2, 0.2, 3)
        nxt, _ = step(model, PlantState(0, x), u, w=w)
        z = obs.observe(nxt.x, u)
        assert np.max(np.abs(z - f(x))) <= obs.error_gain * 0.2 + 1e-12


def test_inverse_observer_exact_without_disturbance():
    g = build_canonical("cycle", 4)
    f = LinearFunction(0.9, 0.4)
    obs = InverseObserver(g)
    x = np.array([2.0, -1.0, 0.5, 3.0])
    u = np.array([0.1, 0.2, 0.3, 0.4])
    nxt, _ = step(_model(g, f), PlantState(0, x), u, w=np.zeros(4))
    np.testing.assert_allclose(obs.observe(nxt.x, u), f(x), atol=1e-12)


def test_inverse_observer_rejects_singular_weights():
    w = np.zeros((2, 2))
    w[0, 1] = 1.0  # row 2 is all zero, A not invertible
    with pytest.raises(ValueError):
        InverseObserver(WeightedDigraph(w))


def test_inverse_observer_condition_limit():
    w = np.array([[1.0, 0.0], [1.0, 1e-13]])
    with pytest.raises(ValueError, match="direct"):
        InverseObserver(WeightedDigraph(w), cond_limit=1e8)

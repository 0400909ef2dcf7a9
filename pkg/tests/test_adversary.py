"""Online adversarial plant construction and divergence certificates."""

import numpy as np
import pytest

from netfeedback import (
    DivergenceCertificate,
    IntervalLedger,
    OnlineAdversary,
    PinnedPiecewiseLinear,
    WeightedDigraph,
    build_canonical,
    build_interval_ledger,
)


# ---- pinned piecewise-linear functions ----

def test_pinned_validation():
    with pytest.raises(ValueError):
        PinnedPiecewiseLinear(4.0, [])
    with pytest.raises(ValueError):
        PinnedPiecewiseLinear(4.0, [(0.0, 0.0), (0.0, 1.0)])  # duplicate x
    with pytest.raises(ValueError):
        PinnedPiecewiseLinear(1.0, [(0.0, 0.0), (1.0, 5.0)])  # slope 5 > 1


def test_pinned_interp_and_tails():
    f = PinnedPiecewiseLinear(4.0, [(0.0, 1.0), (1.0, 5.0)])
    assert f(0.5) == 3.0
    # tails default to the adjacent segment slope
    assert f(-1.0) == -3.0
    assert f(2.0) == 9.0
    assert f.quasi_norm() == 4.0
    assert f.pins == ((0.0, 1.0), (1.0, 5.0))


def test_pinned_explicit_tails():
    f = PinnedPiecewiseLinear(4.0, [(0.0, 2.0)], left_slope=-4.0, right_slope=4.0)
    assert f(-1.0) == 6.0
    assert f(1.0) == 6.0
    assert f.quasi_norm() == 4.0


def test_pinned_vector_evaluation():
    f = PinnedPiecewiseLinear(2.0, [(0.0, 0.0), (2.0, 4.0)])
    np.testing.assert_allclose(f(np.array([-1.0, 1.0, 3.0])), [-2.0, 2.0, 6.0])


# ---- interval ledger ----

def test_interval_ledger_growth_accounting():
    led = IntervalLedger([0.0, 0.5, 1.0])
    assert led.i0_width == 1.0
    assert led.interval(0) == (0.0, 1.0)
    chi = led.update([-5.0, -1.0, -3.0])
    assert chi == 5.0
    assert led.R[-1] == 0.0 and led.L[-1] == 5.0
    assert led.interval(1) == (-5.0, 1.0)
    chi = led.update([11.0, 19.0, 3.0])
    assert chi == 18.0
    assert led.interval(2) == (-5.0, 19.0)


def test_interval_width_is_initial_plus_growth():
    rng = np.random.default_rng(8)
    led = IntervalLedger(rng.normal(size=4))
    for _ in range(30):
        led.update(rng.normal(scale=3.0, size=4))
    lo, hi = led.interval(led.t)
    assert hi - lo == pytest.approx(led.i0_width + sum(led.R) + sum(led.L))


def test_build_interval_ledger_matches_sequential():
    rng = np.random.default_rng(3)
    xs = rng.normal(size=(9, 3))
    led = build_interval_ledger(xs)
    seq = IntervalLedger(xs[0])
    for row in xs[1:]:
        seq.update(row)
    assert led.chi == seq.chi
    assert led.interval(8) == seq.interval(8)


# ---- certificates ----

def test_certificate_energy_series():
    cert = DivergenceCertificate(1.0, (4.0, 11.5))
    np.testing.assert_allclose(cert.E, [0.5, 4.5, 16.0])
    assert cert.verdict  # 16 > 2 * 4.5


def test_certificate_needs_two_growth_steps():
    assert not DivergenceCertificate(1.0, (4.0,)).verdict
    assert not DivergenceCertificate(1.0, ()).verdict


def test_certificate_fails_without_doubling():
    cert = DivergenceCertificate(1.0, (4.0, 3.0))
    np.testing.assert_allclose(cert.E, [0.5, 4.5, 7.5])
    assert not cert.verdict
    d = cert.to_dict()
    assert d["verdict"] == "fail"
    assert d["chi"] == [4.0, 3.0]


# ---- the online protocol, frozen three-node trace ----

def _drive(adv, g, x0, steps):
    """Zero-control closed loop; returns the state history."""
    x = np.asarray(x0, dtype=float)
    hist = [x.copy()]
    zeros = np.zeros(g.n)
    for t in range(steps):
        fvals = adv.step(t, x, zeros, zeros)
        x = g.weights @ fvals
        hist.append(x.copy())
    return np.asarray(hist)


def test_three_cycle_trace():
    g = build_canonical("cycle", 3)
    x0 = [0.0, 0.5, 1.0]
    adv = OnlineAdversary(g, x0)
    assert adv.B == 4.0

    hist = _drive(adv, g, x0, 3)
    np.testing.assert_allclose(hist[1], [-5.0, -1.0, -3.0])
    np.testing.assert_allclose(hist[2], [11.0, 19.0, 3.0])

    assert adv.branches[:2] == ["n", "p"]
    assert adv.theta[:2] == [2, 0]
    assert adv.attacked[:2] == [0, 1]

    cert = adv.certificate()
    assert cert.chi[:2] == (5.0, 18.0)
    np.testing.assert_allclose(cert.E[:3], [0.5, 5.5, 23.5])
    assert cert.verdict


def test_committed_values_never_change():
    g = build_canonical("cycle", 3)
    x0 = [0.0, 0.5, 1.0]
    adv = OnlineAdversary(g, x0)
    hist = _drive(adv, g, x0, 2)
    f = adv.function
    probe = np.array([0.0, 0.5, 1.0, -5.0, -3.0])
    before = f(probe)
    np.testing.assert_allclose(before, [-1.0, -3.0, -5.0, 19.0, 11.0])

    # keep driving; the function may gain pins but agrees on old points
    x = hist[-1]
    zeros = np.zeros(3)
    for t in range(2, 8):
        fvals = adv.step(t, x, zeros, zeros)
        x = g.weights @ fvals
    np.testing.assert_array_equal(adv.function(probe), before)


def test_committed_slopes_within_budget():
    g = build_canonical("cycle", 3)
    adv = OnlineAdversary(g, [0.0, 0.5, 1.0])
    _drive(adv, g, [0.0, 0.5, 1.0], 8)
    pins = np.asarray(adv.function.pins)
    slopes = np.diff(pins[:, 1]) / np.diff(pins[:, 0])
    assert np.all(np.abs(slopes) <= adv.B * (1 + 1e-9))
    assert adv.function.quasi_norm() <= adv.B * (1 + 1e-9)


def test_attacked_node_escapes_every_step():
    g = build_canonical("cycle", 3)
    x0 = [0.2, -0.4, 0.9]
    adv = OnlineAdversary(g, x0)
    hist = _drive(adv, g, x0, 10)
    for t in range(1, 10):
        lo, hi = adv.ledger.interval(t - 1)
        xd = hist[t][adv.attacked[t - 1]]
        assert xd > hi or xd < lo


def test_certified_doubling_on_longer_run():
    g = build_canonical("cycle", 4)
    x0 = [0.0, 0.25, -0.3, 0.1]
    adv = OnlineAdversary(g, x0)
    _drive(adv, g, x0, 12)
    cert = adv.certificate()
    assert len(cert.chi) >= 2
    assert cert.verdict
    # energies at least double each recorded step
    E = cert.E
    assert all(E[t + 1] > 2.0 * E[t] for t in range(1, len(E) - 1))


def test_degenerate_start_single_pin():
    g = build_canonical("single_selfloop", 1, a11=1.0)
    adv = OnlineAdversary(g, [0.3])
    hist = _drive(adv, g, [0.3], 6)
    assert adv.ledger.i0_width == 0.0
    assert np.isfinite(hist).all()
    assert adv.certificate().chi[0] > 0.0


def test_adversary_preconditions():
    with pytest.raises(ValueError):
        OnlineAdversary(WeightedDigraph(np.zeros((2, 2))), [0.0, 0.0])
    mixed = WeightedDigraph([[0.0, -1.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        OnlineAdversary(mixed, [0.0, 0.0])
    path = build_canonical("path_root_selfloop", 3)
    with pytest.raises(ValueError):
        OnlineAdversary(path, [0.0, 0.0, 0.0])
    g = build_canonical("cycle", 3)
    with pytest.raises(ValueError):
        OnlineAdversary(g, [0.0, 0.0])


def test_steps_must_be_sequential():
    g = build_canonical("cycle", 3)
    x0 = np.array([0.0, 0.5, 1.0])
    adv = OnlineAdversary(g, x0)
    zeros = np.zeros(3)
    with pytest.raises(ValueError):
        adv.step(1, x0, zeros, zeros)
    adv.step(0, x0, zeros, zeros)
    with pytest.raises(ValueError):
        adv.step(0, x0, zeros, zeros)


def test_step_shape_validation():
    g = build_canonical("cycle", 3)
    adv = OnlineAdversary(g, [0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        adv.step(0, np.zeros(2), np.zeros(3), np.zeros(3))


def test_function_unavailable_before_first_step():
    g = build_canonical("cycle", 3)
    adv = OnlineAdversary(g, [0.0, 0.5, 1.0])
    with pytest.raises(ValueError):
        adv.function

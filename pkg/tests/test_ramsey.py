import numpy as np
import pytest

from fluxpair.errors import FitFailure, InvalidArgumentError
from fluxpair.ramsey import RamseyTrace, fit_decaying_sinusoid, synthesize_ramsey

GRID = np.linspace(0.0, 200.0, 401)


def test_starts_at_one():
    assert synthesize_ramsey(50.0, 100.0, GRID).signal[0] == 1.0


def test_zero_frequency_is_pure_decay():
    tr = synthesize_ramsey(0.0, 40.0, GRID)
    np.testing.assert_allclose(tr.signal, np.exp(-GRID / 40.0), rtol=1e-15)


def test_zero_crossings_at_odd_multiples_of_five_us():
    t = np.linspace(0.0, 200.0, 8001)
    s = synthesize_ramsey(50.0, 100.0, t).signal
    idx = np.nonzero(np.diff(np.sign(s)))[0]
    crossings = t[idx]
    expected = 5.0 * np.arange(1, 2 * len(crossings), 2)
    np.testing.assert_allclose(crossings, expected, atol=t[1] - t[0])


def test_signal_bounded_by_noise():
    tr = synthesize_ramsey(30.0, 80.0, GRID, noise_amplitude=0.02, seed=3)
    assert np.all(np.abs(tr.signal) <= 1 + 5 * 0.02)


def test_seeded_noise_is_deterministic():
    a = synthesize_ramsey(30.0, 80.0, GRID, 0.05, seed=11).signal
    b = synthesize_ramsey(30.0, 80.0, GRID, 0.05, seed=11).signal
    c = synthesize_ramsey(30.0, 80.0, GRID, 0.05, seed=12).signal
    assert np.array_equal(a, b) and not np.array_equal(a, c)


@pytest.mark.parametrize("freq, decay", [(50.0, 100.0), (7.3, 300.0), (123.4, 60.0), (52.0, 200.0)])
def test_noiseless_round_trip(freq, decay):
    fit = fit_decaying_sinusoid(synthesize_ramsey(freq, decay, GRID))
    assert fit.frequency == pytest.approx(freq, rel=1e-3)
    assert fit.decay == pytest.approx(decay, rel=1e-3)
    assert fit.residual < 1e-6


@pytest.mark.parametrize("seed", range(5))
def test_two_khz_difference_recovered(seed):
    t = np.linspace(0.0, 300.0, 601)
    f0 = fit_decaying_sinusoid(synthesize_ramsey(50.0, 200.0, t, 0.05, seed=seed)).frequency
    f1 = fit_decaying_sinusoid(synthesize_ramsey(52.0, 200.0, t, 0.05, seed=seed + 100)).frequency
    assert f1 - f0 == pytest.approx(2.0, abs=0.1)


def test_offset_and_amplitude_recovered():
    tr = synthesize_ramsey(40.0, 150.0, GRID)
    shifted = RamseyTrace(tr.times, 0.4 * tr.signal + 0.5, tr.true_frequency, tr.decay_time)
    fit = fit_decaying_sinusoid(shifted)
    assert fit.amplitude == pytest.approx(0.4, rel=1e-6)
    assert fit.offset == pytest.approx(0.5, abs=1e-6)


def test_constant_signal_fails():
    with pytest.raises(FitFailure, match="constant"):
        fit_decaying_sinusoid(RamseyTrace(GRID, np.full_like(GRID, 0.3), 0.0, 1.0))


def test_too_few_samples():
    tr = synthesize_ramsey(50.0, 100.0, np.linspace(0, 200, 7))
    with pytest.raises(FitFailure) as err:
        fit_decaying_sinusoid(tr)
    assert err.value.diagnostics["samples"] == 7


def test_less_than_one_period_fails():
    tr = synthesize_ramsey(1.0, 1e4, np.linspace(0, 200, 101))
    with pytest.raises(FitFailure, match="period"):
        fit_decaying_sinusoid(tr)


@pytest.mark.parametrize("decay, noise", [(0.0, 0.0), (-5.0, 0.0), (10.0, -0.1)])
def test_synthesis_validation(decay, noise):
    with pytest.raises(InvalidArgumentError):
        synthesize_ramsey(10.0, decay, GRID, noise)

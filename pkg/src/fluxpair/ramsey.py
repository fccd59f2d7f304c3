"""Synthetic Ramsey fringes and decaying-sinusoid extraction.

Times are in microseconds and frequencies in kHz, so the phase of a fringe
is ``2 pi f t / 1000``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .errors import FitFailure, InvalidArgumentError

__all__ = ["RamseyTrace", "RamseyFit", "synthesize_ramsey", "fit_decaying_sinusoid", "decaying_cosine"]

_KHZ_US = 1e-3


@dataclass(frozen=True)
class RamseyTrace:
    times: np.ndarray
    signal: np.ndarray
    true_frequency: float
    decay_time: float
    noise_amplitude: float = 0.0


@dataclass(frozen=True)
class RamseyFit:
    frequency: float
    decay: float
    amplitude: float
    phase: float
    offset: float
    residual: float
    restarts: int = 0


def decaying_cosine(t, amplitude, frequency, phase, decay, offset):
    return amplitude * np.exp(-t / decay) * np.cos(2 * np.pi * frequency * _KHZ_US * t + phase) + offset


def synthesize_ramsey(frequency: float, decay: float, times: Sequence[float],
                      noise_amplitude: float = 0.0, seed: Optional[int] = 0) -> RamseyTrace:
    """``exp(-t/decay) cos(2 pi f t)`` plus seeded Gaussian noise of standard deviation ``noise_amplitude``."""
    if not decay > 0:
        raise InvalidArgumentError(f"decay must be positive, got {decay!r}")
    if noise_amplitude < 0:
        raise InvalidArgumentError("noise_amplitude must be non-negative")
    t = np.asarray(times, dtype=float)
    signal = decaying_cosine(t, 1.0, frequency, 0.0, decay, 0.0)
    if noise_amplitude:
        signal = signal + noise_amplitude * np.random.default_rng(seed).standard_normal(t.shape)
    return RamseyTrace(t, signal, float(frequency), float(decay), float(noise_amplitude))


def _peak_frequency(t: np.ndarray, y: np.ndarray) -> float:
    """Dominant frequency (kHz) of the mean-subtracted signal on a zero-padded grid."""
    dt = np.median(np.diff(t))
    n = 8 * len(y)
    spec = np.abs(np.fft.rfft((y - y.mean()) * np.hanning(len(y)), n))
    freqs = np.fft.rfftfreq(n, dt) / _KHZ_US
    spec[0] = 0.0
    return float(freqs[int(np.argmax(spec))])


def fit_decaying_sinusoid(trace: RamseyTrace, max_restarts: int = 4) -> RamseyFit:
    """Least-squares fit of amplitude, frequency, phase, decay and offset.

    The starting frequency is the dominant spectral peak. If the fit does not
    converge, it is retried from shifted phases and decay times; after
    ``max_restarts`` failures a ``FitFailure`` is raised.
    """
    t = np.asarray(trace.times, dtype=float)
    y = np.asarray(trace.signal, dtype=float)
    diag = {"samples": int(t.size)}
    if t.size < 8:
        raise FitFailure("need at least 8 samples", diag)
    if np.any(np.diff(t) <= 0):
        raise FitFailure("time grid must be strictly increasing", diag)
    span = float(t[-1] - t[0])
    if np.ptp(y) < 1e-12:
        raise FitFailure("signal is constant; nothing oscillates", diag)
    f0 = _peak_frequency(t, y)
    diag["initial_frequency_khz"] = f0
    if f0 * _KHZ_US * span < 1.0:
        raise FitFailure("trace spans less than one oscillation period", diag)

    amp0 = 0.5 * float(np.ptp(y))
    offset0 = float(y.mean())
    f_max = 0.5 / (np.median(np.diff(t)) * _KHZ_US)
    lower = [0.0, 0.0, -2 * np.pi, span * 1e-3, -np.inf]
    upper = [np.inf, f_max, 2 * np.pi, span * 1e3, np.inf]
    best = None
    errors = []
    for attempt in range(max_restarts + 1):
        phase0 = (0.0, np.pi / 2, -np.pi / 2, np.pi)[attempt % 4]
        p0 = [amp0, f0, phase0, span / 2 * 2.0 ** (-(attempt // 2)), offset0]
        try:
            popt, _ = curve_fit(decaying_cosine, t, y, p0=p0, bounds=(lower, upper), maxfev=20000)
        except (RuntimeError, ValueError) as exc:
            errors.append(str(exc))
            continue
        res = float(np.sqrt(np.mean((decaying_cosine(t, *popt) - y) ** 2)))
        if best is None or res < best[1]:
            best = (popt, res, attempt)
        # Accept once the residual is down at the noise floor.
        if res <= max(3 * trace.noise_amplitude, 1e-6 * amp0):
            break
    if best is None:
        diag["errors"] = errors
        raise FitFailure("decaying-sinusoid fit did not converge", diag)
    popt, res, attempt = best
    return RamseyFit(frequency=float(popt[1]), decay=float(popt[3]), amplitude=float(popt[0]),
                     phase=float(popt[2]), offset=float(popt[4]), residual=res, restarts=attempt)

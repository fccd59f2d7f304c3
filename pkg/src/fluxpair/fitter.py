"""Recover device parameters from spectroscopic line positions.

Each observation is one transition frequency at one flux bias. The model is
the labelled coupled spectrum; the objective is the sum of squared weighted
residuals, minimized with Nelder-Mead in coordinates scaled by the initial
guess.
"""
from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .coupled import Label, LabelLike, SystemParams, format_label, parse_label, solve_coupled
from .errors import InvalidArgumentError, LabelingError, LabelNotFoundError
from .fluxonium import FluxoniumParams

__all__ = [
    "PARAM_NAMES",
    "Observation",
    "FitResult",
    "params_to_vector",
    "vector_to_params",
    "model_frequencies",
    "residuals",
    "synthesize_observations",
    "fit",
]

PARAM_NAMES = ("e_j_a", "e_c_a", "e_l_a", "e_j_b", "e_c_b", "e_l_b",
               "j_c", "j_l", "g_a", "g_b", "f_lc")
_POSITIVE = {"e_j_a", "e_c_a", "e_l_a", "e_j_b", "e_c_b", "e_l_b", "f_lc"}
PENALTY = 1e6


@dataclass(frozen=True)
class Observation:
    phi_ext: float
    start: Label
    end: Label
    frequency: float
    weight: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "start", parse_label(self.start))
        object.__setattr__(self, "end", parse_label(self.end))
        if not self.frequency > 0:
            raise InvalidArgumentError(f"observed frequency must be positive, got {self.frequency!r}")
        if self.weight is None:
            object.__setattr__(self, "weight", 1.0 / self.frequency)
        elif not self.weight > 0:
            raise InvalidArgumentError(f"observation weight must be positive, got {self.weight!r}")


@dataclass
class FitResult:
    params: SystemParams
    residual_rms: float
    residuals: np.ndarray
    iterations: int
    converged: bool
    evaluations: int = 0
    history: List[float] = field(default_factory=list)
    free: Tuple[str, ...] = ()


def params_to_vector(p: SystemParams) -> np.ndarray:
    a, b = p.qubit_a, p.qubit_b
    return np.array([a.E_J, a.E_C, a.E_L, b.E_J, b.E_C, b.E_L,
                     p.J_C, p.J_L, p.g_a, p.g_b, p.f_lc], dtype=float)


def vector_to_params(v: Sequence[float], template: SystemParams) -> SystemParams:
    v = [float(x) for x in v]
    return template.replace(
        qubit_a=FluxoniumParams(v[0], v[1], v[2], label=template.qubit_a.label),
        qubit_b=FluxoniumParams(v[3], v[4], v[5], label=template.qubit_b.label),
        J_C=v[6], J_L=v[7], g_a=v[8], g_b=v[9], f_lc=v[10],
    )


def _group(obs: Sequence[Observation]) -> "OrderedDict[float, List[int]]":
    groups: "OrderedDict[float, List[int]]" = OrderedDict()
    for i, o in enumerate(obs):
        groups.setdefault(float(o.phi_ext), []).append(i)
    return groups


def model_frequencies(params: SystemParams, obs: Sequence[Observation]) -> np.ndarray:
    """Model transition frequency for every observation, one solve per flux point."""
    out = np.empty(len(obs))
    for phi, idx in _group(obs).items():
        spec = solve_coupled(params, phi)
        for i in idx:
            o = obs[i]
            try:
                out[i] = spec.energy(o.end) - spec.energy(o.start)
            except LabelNotFoundError as exc:
                raise LabelingError(
                    f"at phi_ext={phi!r}: cannot resolve {format_label(o.start)}->"
                    f"{format_label(o.end)} ({exc})") from None
    return out


def residuals(params: SystemParams, obs: Sequence[Observation]) -> np.ndarray:
    """Weighted ``(model - observed)`` per observation."""
    obs = list(obs)
    if not obs:
        raise InvalidArgumentError("no observations")
    f = model_frequencies(params, obs)
    return np.array([(f[i] - o.frequency) * o.weight for i, o in enumerate(obs)])


def synthesize_observations(params: SystemParams, phi_values: Iterable[float],
                            transitions: Sequence[Tuple[LabelLike, LabelLike]]) -> List[Observation]:
    """Noise-free observations of the given transitions at each flux point."""
    obs = []
    for phi in phi_values:
        spec = solve_coupled(params, float(phi))
        for a, b in transitions:
            obs.append(Observation(float(phi), a, b, spec.energy(b) - spec.energy(a)))
    return obs


def _rms(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(r))))


def fit(obs: Sequence[Observation], initial: SystemParams,
        bounds: Optional[Mapping[str, Tuple[float, float]]] = None,
        frozen: Iterable[str] = (), restarts: int = 5, seed: int = 0,
        max_evaluations: int = 4000, xtol: float = 1e-9, ftol: float = 1e-22) -> FitResult:
    """Weighted least-squares fit by bounded Nelder-Mead with seeded restarts.

    ``bounds`` maps parameter names (see ``PARAM_NAMES``) to ``(low, high)``;
    ``frozen`` names parameters held at their initial values. Each restart
    launches a fresh simplex around the best point so far, with vertex offsets
    drawn from ``seed``. The run stops once the simplex has collapsed below
    ``xtol`` (relative) or a restart fails to lower the objective.
    """
    obs = list(obs)
    frozen = set(frozen)
    unknown = (frozen | set(bounds or {})) - set(PARAM_NAMES)
    if unknown:
        raise InvalidArgumentError(f"unknown parameter names: {sorted(unknown)}")
    free = [n for n in PARAM_NAMES if n not in frozen]
    if not free:
        raise InvalidArgumentError("every parameter is frozen")
    if len(obs) < len(free):
        raise InvalidArgumentError(f"{len(obs)} observations cannot constrain {len(free)} parameters")

    x0_full = params_to_vector(initial)
    free_idx = np.array([PARAM_NAMES.index(n) for n in free])
    scale = np.where(np.abs(x0_full[free_idx]) > 0, np.abs(x0_full[free_idx]), 1e-3)

    lo = np.full(len(free), -np.inf)
    hi = np.full(len(free), np.inf)
    for k, n in enumerate(free):
        if n in _POSITIVE:
            lo[k] = 1e-9
        if n == "j_l":
            lo[k] = 0.0
        if bounds and n in bounds:
            b_lo, b_hi = bounds[n]
            lo[k], hi[k] = max(lo[k], b_lo), min(hi[k], b_hi)
            if lo[k] > hi[k]:
                raise InvalidArgumentError(f"empty bound interval for {n}")
    start = x0_full[free_idx]
    if np.any(start < lo) or np.any(start > hi):
        raise InvalidArgumentError("initial point lies outside the bounds")
    try:
        residuals(initial, obs)
    except LabelingError as exc:
        raise InvalidArgumentError(f"initial point is infeasible: {exc}") from None

    def unscale(y):
        full = x0_full.copy()
        full[free_idx] = np.clip(y * scale, lo, hi)
        return full

    cache: Dict[bytes, float] = {}
    counter = {"n": 0}

    def objective(y):
        key = np.asarray(y, dtype=float).tobytes()
        if key in cache:
            return cache[key]
        counter["n"] += 1
        try:
            r = residuals(vector_to_params(unscale(y), initial), obs)
            val = float(np.sum(r * r))
        except (LabelingError, InvalidArgumentError, np.linalg.LinAlgError):
            val = PENALTY
        cache[key] = val
        return val

    rng = np.random.default_rng(seed)
    y_best = start / scale
    f_best = objective(y_best)
    history = [f_best]
    iterations = 0
    converged = False
    step = 0.05
    for attempt in range(max(1, restarts)):
        if f_best <= ftol:
            converged = True
            break
        n = len(free)
        offsets = step * (1.0 + 0.5 * rng.random(n)) * rng.choice([-1.0, 1.0], n)
        simplex = np.vstack([y_best] + [y_best + np.eye(n)[k] * offsets[k] for k in range(n)])

        def track(yk):
            v = objective(yk)
            history.append(min(v, history[-1]))

        res = minimize(objective, y_best, method="Nelder-Mead", callback=track,
                       options={"initial_simplex": simplex, "xatol": xtol, "fatol": ftol,
                                "maxfev": max_evaluations, "adaptive": n > 4})
        iterations += int(res.nit)
        improved = res.fun < f_best * (1 - 1e-12)
        if res.fun < f_best:
            y_best, f_best = np.array(res.x), float(res.fun)
            history.append(f_best)
        if res.success and not improved and attempt > 0:
            converged = True
            break
        step = max(step * 0.5, 1e-4)
    else:
        converged = converged or f_best <= ftol

    params = vector_to_params(unscale(y_best), initial)
    r = residuals(params, obs)
    return FitResult(params, _rms(r), r, iterations, bool(converged),
                     evaluations=counter["n"], history=history, free=tuple(free))

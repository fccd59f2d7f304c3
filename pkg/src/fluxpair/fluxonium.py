"""Single fluxonium: Hamiltonian, phase-fixed eigensolution, matrix elements."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import InvalidArgumentError
from .operators import (
    BasisConfig,
    charge_operator,
    cosine_operator,
    is_hermitian,
    oscillator_basis,
    phase_operator,
)

__all__ = [
    "FluxoniumParams",
    "EigenSolution",
    "DEFAULT_BASIS_DIM",
    "build_fluxonium_h",
    "eigensolve",
    "solve_fluxonium",
    "matrix_element",
    "anharmonicity",
]

DEFAULT_BASIS_DIM = 60


@dataclass(frozen=True)
class FluxoniumParams:
    """Energies in GHz. ``allow_harmonic`` admits ``E_J = 0`` for limit checks."""

    E_J: float
    E_C: float
    E_L: float
    label: str = "A"
    allow_harmonic: bool = False

    def __post_init__(self):
        if not (self.E_C > 0 and self.E_L > 0):
            raise InvalidArgumentError(f"qubit {self.label}: E_C and E_L must be positive")
        if self.E_J < 0 or (self.E_J == 0 and not self.allow_harmonic):
            raise InvalidArgumentError(
                f"qubit {self.label}: E_J must be positive (E_J = 0 needs allow_harmonic=True)"
            )

    @property
    def plasma_frequency(self) -> float:
        return float(np.sqrt(8.0 * self.E_C * self.E_L))


@dataclass(frozen=True)
class EigenSolution:
    energies: np.ndarray
    states: np.ndarray
    basis: Optional[BasisConfig] = None
    phi_ext: Optional[float] = None

    def __len__(self):
        return len(self.energies)

    def transition(self, i: int, j: int) -> float:
        return float(self.energies[j] - self.energies[i])

    def operator_in_eigenbasis(self, op: np.ndarray) -> np.ndarray:
        return self.states.conj().T @ op @ self.states


def build_fluxonium_h(params: FluxoniumParams, phi_ext: float, dim: int = DEFAULT_BASIS_DIM):
    """Return ``(H, basis)`` for ``4 E_C n^2 + E_L phi^2/2 - E_J cos(phi - phi_ext)``.

    ``H`` is real symmetric in GHz, written in the oscillator basis of the
    quadratic part. External flux only enters the cosine.
    """
    if dim < 4:
        raise InvalidArgumentError(f"fluxonium basis needs dim >= 4, got {dim}")
    basis = oscillator_basis(params.E_C, params.E_L, dim)
    # n^2 and phi^2 are real on this basis; drop the zero imaginary part.
    n = charge_operator(basis)
    phi = phase_operator(basis)
    h = 4.0 * params.E_C * (n @ n).real + 0.5 * params.E_L * (phi @ phi)
    if params.E_J:
        h = h - params.E_J * cosine_operator(basis, phi_ext)
    return h, basis


def _fix_phases(states: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(states), axis=0)
    lead = states[idx, np.arange(states.shape[1])]
    return states * (np.abs(lead) / lead)


def eigensolve(h: np.ndarray, k: Optional[int] = None, *, basis=None, phi_ext=None,
               atol: float = 1e-10) -> EigenSolution:
    """Lowest ``k`` eigenpairs of a Hermitian matrix, phase fixed.

    Each eigenvector is multiplied by a unit phase so that its largest-magnitude
    component is real and positive. Real input stays real.
    """
    h = np.asarray(h)
    if not is_hermitian(h, atol):
        raise InvalidArgumentError("eigensolve needs a Hermitian matrix")
    n = h.shape[0]
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"k must lie in [1, {n}], got {k}")
    if np.iscomplexobj(h) and np.max(np.abs(h.imag), initial=0.0) < atol:
        h = h.real
    h = 0.5 * (h + h.conj().T)
    energies, states = scipy.linalg.eigh(h, subset_by_index=[0, k - 1])
    return EigenSolution(energies, _fix_phases(states), basis, phi_ext)


def solve_fluxonium(params: FluxoniumParams, phi_ext: float, dim: int = DEFAULT_BASIS_DIM,
                    k: Optional[int] = None) -> EigenSolution:
    h, basis = build_fluxonium_h(params, phi_ext, dim)
    return eigensolve(h, k, basis=basis, phi_ext=phi_ext)


def matrix_element(sol: EigenSolution, op: np.ndarray, i: int, j: int) -> complex:
    """``<i|op|j>`` between solved eigenstates."""
    m = len(sol)
    if not (0 <= i < m and 0 <= j < m):
        raise IndexError(f"state index out of range for {m} solved states: ({i}, {j})")
    return complex(sol.states[:, i].conj() @ op @ sol.states[:, j])


def anharmonicity(sol: EigenSolution) -> float:
    """``(E2 - E1) - (E1 - E0)`` in GHz."""
    if len(sol) < 3:
        raise InvalidArgumentError("anharmonicity needs at least three solved states")
    e = sol.energies
    return float((e[2] - e[1]) - (e[1] - e[0]))

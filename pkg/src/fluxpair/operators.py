"""Truncated harmonic-oscillator representations of the circuit operators.

All matrices are dense ``numpy`` arrays. The phase operator is real symmetric,
the charge operator is purely imaginary and Hermitian, and every operator is
expressed in the eigenbasis of the oscillator defined by an ``(E_C, E_L)`` pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Union

import numpy as np

from .errors import InvalidArgumentError, ResourceLimitError

__all__ = [
    "BasisConfig",
    "MAX_DIM",
    "oscillator_basis",
    "ladder",
    "phase_operator",
    "charge_operator",
    "cosine_operator",
    "tensor",
    "is_hermitian",
]

#: Largest product-space dimension ``tensor`` will build.
MAX_DIM = 8192


@dataclass(frozen=True)
class BasisConfig:
    """Oscillator basis of ``dim`` levels with zero-point amplitudes.

    ``phi_zpf * n_zpf`` must equal 1/2 so that ``[n, phi] = i`` on the
    untruncated space.
    """

    dim: int
    phi_zpf: float
    n_zpf: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidArgumentError(f"basis dim must be an integer >= 2, got {self.dim!r}")
        if self.phi_zpf <= 0 or self.n_zpf <= 0:
            raise InvalidArgumentError("zero-point amplitudes must be positive")
        if abs(self.phi_zpf * self.n_zpf - 0.5) > 1e-12 * 0.5:
            raise InvalidArgumentError(
                f"phi_zpf * n_zpf = {self.phi_zpf * self.n_zpf!r}, expected 0.5"
            )

    @classmethod
    def from_phi_zpf(cls, dim: int, phi_zpf: float) -> "BasisConfig":
        return cls(dim, phi_zpf, 0.5 / phi_zpf)


def oscillator_basis(E_C: float, E_L: float, dim: int) -> BasisConfig:
    """Basis of the oscillator ``4 E_C n^2 + E_L phi^2 / 2``.

    Example:
        >>> b = oscillator_basis(1 / 8, 1.0, 2)
        >>> round(b.phi_zpf ** 2, 12)
        0.5
    """
    if not (E_C > 0 and E_L > 0):
        raise InvalidArgumentError(f"E_C and E_L must be positive, got {E_C!r}, {E_L!r}")
    if int(dim) != dim or dim < 2:
        raise InvalidArgumentError(f"dim must be an integer >= 2, got {dim!r}")
    ratio = 8.0 * E_C / E_L
    return BasisConfig(int(dim), ratio**0.25 / np.sqrt(2.0), ratio**-0.25 / np.sqrt(2.0))


def ladder(dim: int) -> np.ndarray:
    """Annihilation operator with ``a[i-1, i] = sqrt(i)``."""
    if int(dim) != dim or dim < 2:
        raise InvalidArgumentError(f"dim must be an integer >= 2, got {dim!r}")
    return np.diag(np.sqrt(np.arange(1, int(dim), dtype=float)), 1)


def phase_operator(basis: BasisConfig) -> np.ndarray:
    a = ladder(basis.dim)
    return basis.phi_zpf * (a + a.T)


def charge_operator(basis: BasisConfig) -> np.ndarray:
    a = ladder(basis.dim)
    return 1j * basis.n_zpf * (a.T - a)


@lru_cache(maxsize=16)
def _position_eigh(dim: int):
    # Eigenpairs of a + a^dag; phi only rescales the eigenvalues.
    a = ladder(dim)
    w, v = np.linalg.eigh(a + a.T)
    w.flags.writeable = False
    v.flags.writeable = False
    return w, v


def cosine_operator(basis: BasisConfig, phi_ext: float) -> np.ndarray:
    """``cos(phi - phi_ext)`` evaluated on the spectrum of the truncated phase operator."""
    w, v = _position_eigh(basis.dim)
    c = (v * np.cos(basis.phi_zpf * w - phi_ext)) @ v.T
    return 0.5 * (c + c.T)


def tensor(*factors: Union[np.ndarray, int], max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product over ordered slots (qubit A, qubit B, LC mode).

    An integer in place of a matrix stands for the identity of that size, so
    ``tensor(n_a, 8, 6)`` embeds ``n_a`` in the first slot.
    """
    dims = []
    mats = []
    for f in factors:
        if isinstance(f, (int, np.integer)):
            dims.append(int(f))
            mats.append(None)
        else:
            f = np.asarray(f)
            if f.ndim != 2 or f.shape[0] != f.shape[1]:
                raise InvalidArgumentError(f"tensor factors must be square, got shape {f.shape}")
            dims.append(f.shape[0])
            mats.append(f)
    total = prod(dims)
    if total > max_dim:
        raise ResourceLimitError(f"product dimension {total} exceeds cap {max_dim}")
    out = np.ones((1, 1))
    for d, m in zip(dims, mats):
        out = np.kron(out, np.eye(d) if m is None else m)
    return out


def is_hermitian(m: np.ndarray, atol: float = 1e-10) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and float(np.max(np.abs(m - m.conj().T), initial=0.0)) < atol


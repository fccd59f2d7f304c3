"""Two coupled fluxoniums plus a stray LC mode, with adiabatic state labels.

The Hamiltonian (GHz) is

    H = H_A + H_B + J_C n_A n_B + J_L phi_A phi_B
        + f_lc a^dag a - i sum_alpha g_alpha n_alpha (a - a^dag)

built in two stages: each fluxonium is diagonalized in its own oscillator
basis and truncated to its lowest ``fluxonium_keep`` states, then the coupling
terms are added on the product with a truncated Fock space for the LC mode.
Dressed eigenstates are labelled ``(k, l, m)`` by greedy maximum overlap with
the bare product states.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidArgumentError, LabelNotFoundError, ResourceLimitError
from .fluxonium import FluxoniumParams, eigensolve, solve_fluxonium
from .operators import MAX_DIM, charge_operator, ladder, phase_operator, tensor

__all__ = [
    "Label",
    "TruncationConfig",
    "SystemParams",
    "DEVICE_PARAMS",
    "CoupledSystem",
    "LabeledState",
    "LabeledSpectrum",
    "OVERLAP_THRESHOLD",
    "build_coupled_h",
    "label_states",
    "solve_coupled",
    "transition_frequency",
    "two_qubit_matrix_element",
    "parse_label",
    "format_label",
]

Label = Tuple[int, int, int]
LabelLike = Union[Label, Sequence[int], str]

#: Squared overlap below which an adiabatic label is flagged as untrustworthy.
OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class TruncationConfig:
    fluxonium_basis_dim: int = 40
    fluxonium_keep: int = 8
    lc_fock_dim: int = 6
    max_dim: int = MAX_DIM

    def __post_init__(self):
        if min(self.fluxonium_basis_dim, self.fluxonium_keep, self.lc_fock_dim) < 2:
            raise InvalidArgumentError("truncation sizes must all be >= 2")
        if self.fluxonium_keep > self.fluxonium_basis_dim:
            raise InvalidArgumentError("fluxonium_keep cannot exceed fluxonium_basis_dim")

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.fluxonium_keep, self.fluxonium_keep, self.lc_fock_dim)


@dataclass(frozen=True)
class SystemParams:
    """Reduced device Hamiltonian parameters, all in GHz."""

    qubit_a: FluxoniumParams
    qubit_b: FluxoniumParams
    J_C: float
    J_L: float
    g_a: float
    g_b: float
    f_lc: float
    trunc: TruncationConfig = field(default_factory=TruncationConfig)

    def __post_init__(self):
        if not self.f_lc > 0:
            raise InvalidArgumentError(f"f_lc must be positive, got {self.f_lc!r}")
        if self.J_L < 0:
            raise InvalidArgumentError(f"J_L must be non-negative, got {self.J_L!r}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def pure_inductive(self) -> "SystemParams":
        """Same device with the capacitive couplings ``J_C, g_a, g_b`` removed."""
        return self.replace(J_C=0.0, g_a=0.0, g_b=0.0)

    def uncoupled(self) -> "SystemParams":
        return self.replace(J_C=0.0, J_L=0.0, g_a=0.0, g_b=0.0)


DEVICE_PARAMS = SystemParams(
    qubit_a=FluxoniumParams(E_J=5.59, E_C=0.98, E_L=0.76, label="A"),
    qubit_b=FluxoniumParams(E_J=6.27, E_C=0.99, E_L=1.16, label="B"),
    J_C=-0.038,
    J_L=0.004,
    g_a=0.18,
    g_b=-0.21,
    f_lc=3.22,
)


@dataclass(frozen=True)
class CoupledSystem:
    """Coupled Hamiltonian together with the bare product-basis metadata."""

    hamiltonian: np.ndarray
    dims: Tuple[int, int, int]
    bare_energies: np.ndarray
    operators: Dict[str, np.ndarray]
    phi_ext: float

    def bare_label(self, index: int) -> Label:
        return tuple(int(x) for x in np.unravel_index(index, self.dims))

    def bare_index(self, label: Label) -> int:
        return int(np.ravel_multi_index(label, self.dims))


def _qubit_block(q: FluxoniumParams, phi_ext: float, trunc: TruncationConfig):
    sol = solve_fluxonium(q, phi_ext, trunc.fluxonium_basis_dim, trunc.fluxonium_keep)
    n = sol.operator_in_eigenbasis(charge_operator(sol.basis))
    phi = sol.operator_in_eigenbasis(phase_operator(sol.basis))
    return sol.energies, n, phi


def build_coupled_h(params: SystemParams, phi_ext: float) -> CoupledSystem:
    """Assemble the coupled Hamiltonian at a common flux bias for both loops."""
    trunc = params.trunc
    ka, kb, nl = dims = trunc.dims
    if prod(dims) > trunc.max_dim:
        raise ResourceLimitError(f"coupled dimension {prod(dims)} exceeds cap {trunc.max_dim}")
    e_a, n_a, phi_a = _qubit_block(params.qubit_a, phi_ext, trunc)
    e_b, n_b, phi_b = _qubit_block(params.qubit_b, phi_ext, trunc)
    a = ladder(nl)

    bare = (e_a[:, None, None] + e_b[None, :, None]
            + params.f_lc * np.arange(nl)[None, None, :]).ravel()
    ops = {
        "n_a": tensor(n_a, kb, nl),
        "n_b": tensor(ka, n_b, nl),
        "phi_a": tensor(phi_a, kb, nl),
        "phi_b": tensor(ka, phi_b, nl),
    }
    h = np.diag(bare).astype(complex)
    if params.J_C:
        h += params.J_C * tensor(n_a, n_b, nl)
    if params.J_L:
        h += params.J_L * tensor(phi_a, phi_b, nl)
    if params.g_a:
        h += -1j * params.g_a * tensor(n_a, kb, a - a.T)
    if params.g_b:
        h += -1j * params.g_b * tensor(ka, n_b, a - a.T)
    h = 0.5 * (h + h.conj().T)
    return CoupledSystem(h, dims, bare, ops, phi_ext)


@dataclass(frozen=True)
class LabeledState:
    label: Label
    energy: float
    vector: np.ndarray
    overlap: float

    @property
    def flagged(self) -> bool:
        return self.overlap < OVERLAP_THRESHOLD


@dataclass
class LabeledSpectrum:
    entries: List[LabeledState]
    dims: Tuple[int, int, int]
    operators: Dict[str, np.ndarray] = field(default_factory=dict)
    phi_ext: Optional[float] = None

    def __post_init__(self):
        self._by_label = {e.label: e for e in self.entries}
        if len(self._by_label) != len(self.entries):
            raise InvalidArgumentError("labels in a spectrum must be unique")

    def __contains__(self, label) -> bool:
        return parse_label(label) in self._by_label

    def __getitem__(self, label: LabelLike) -> LabeledState:
        key = parse_label(label)
        try:
            return self._by_label[key]
        except KeyError:
            raise LabelNotFoundError(f"label {format_label(key)} not present in spectrum") from None

    def __len__(self):
        return len(self.entries)

    @property
    def labels(self) -> List[Label]:
        return [e.label for e in self.entries]

    @property
    def energies(self) -> np.ndarray:
        return np.array([e.energy for e in self.entries])

    def energy(self, label: LabelLike) -> float:
        return self[label].energy

    def flagged(self) -> List[LabeledState]:
        return [e for e in self.entries if e.flagged]


def parse_label(label: LabelLike) -> Label:
    """Normalize ``"100"``, ``"1.0.0"``, ``"10"`` or ``(1, 0)`` to a triple.

    Two-entry labels refer to the LC vacuum, ``m = 0``.
    """
    if isinstance(label, str):
        s = label.strip().strip("|>⟩")
        parts = [p for p in s.replace("-", ".").replace(",", ".").split(".") if p] if any(
            c in s for c in ".-,") else list(s)
        try:
            vals = [int(p) for p in parts]
        except ValueError:
            raise InvalidArgumentError(f"cannot parse state label {label!r}") from None
    else:
        vals = [int(v) for v in label]
    if len(vals) == 2:
        vals.append(0)
    if len(vals) != 3 or min(vals) < 0:
        raise InvalidArgumentError(f"state label must have 2 or 3 non-negative entries: {label!r}")
    return tuple(vals)


def format_label(label: LabelLike) -> str:
    lab = parse_label(label)
    if max(lab) < 10:
        return "".join(str(v) for v in lab)
    return ".".join(str(v) for v in lab)


def label_states(energies: np.ndarray, vectors: np.ndarray, dims: Sequence[int], *,
                 operators=None, phi_ext=None) -> LabeledSpectrum:
    """Greedy adiabatic labelling.

    Eigenstates are visited in ascending energy; each takes the unclaimed bare
    product state with the largest squared overlap and is rephased so that its
    component on that state is real and positive.
    """
    energies = np.asarray(energies)
    vectors = np.asarray(vectors)
    dims = tuple(int(d) for d in dims)
    order = np.argsort(energies, kind="stable")
    weights = np.abs(vectors) ** 2
    claimed = np.zeros(vectors.shape[0], dtype=bool)
    entries = []
    for k in order:
        w = np.where(claimed, -1.0, weights[:, k])
        idx = int(np.argmax(w))
        claimed[idx] = True
        c = vectors[idx, k]
        vec = vectors[:, k] * (abs(c) / c) if c != 0 else vectors[:, k]
        label = tuple(int(x) for x in np.unravel_index(idx, dims))
        entries.append(LabeledState(label, float(energies[k]), vec, float(weights[idx, k])))
    return LabeledSpectrum(entries, dims, dict(operators or {}), phi_ext)


def solve_coupled(params: SystemParams, phi_ext: float = np.pi,
                  n_states: Optional[int] = None) -> LabeledSpectrum:
    """Build, diagonalize and label; ``n_states`` limits work to the lowest states."""
    system = build_coupled_h(params, phi_ext)
    dim = system.hamiltonian.shape[0]
    k = dim if n_states is None else min(int(n_states), dim)
    sol = eigensolve(system.hamiltonian, k)
    return label_states(sol.energies, sol.states, system.dims,
                        operators=system.operators, phi_ext=phi_ext)


def transition_frequency(spec: LabeledSpectrum, start: LabelLike, end: LabelLike) -> float:
    """Signed ``E(end) - E(start)`` in GHz."""
    return spec.energy(end) - spec.energy(start)


def two_qubit_matrix_element(spec: LabeledSpectrum, which: str, bra: LabelLike,
                             ket: LabelLike, operator: str = "n") -> complex:
    """``<bra| op_which |ket>`` between dressed states.

    ``which`` is ``"A"`` or ``"B"``; ``operator`` is ``"n"`` (charge) or ``"phi"``.
    Two-entry labels address the LC vacuum sector.
    """
    if which not in ("A", "B", "a", "b"):
        raise InvalidArgumentError(f"which must be 'A' or 'B', got {which!r}")
    key = f"{operator}_{which.lower()}"
    if key not in spec.operators:
        raise InvalidArgumentError(f"spectrum carries no operator {key!r}")
    op = spec.operators[key]
    return complex(spec[bra].vector.conj() @ op @ spec[ket].vector)


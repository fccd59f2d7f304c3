"""Lumped-element circuit to reduced two-fluxonium + LC-mode Hamiltonian.

Node fluxes of the six-node network (1, 2, a, b, m, M) are recombined into

    phi_A  = phi_a - phi_1
    phi_B  = phi_2 - phi_b
    phi_LC = phi_a + phi_1 - phi_b - phi_2
    phi_S  = phi_a + phi_1 + phi_b + phi_2

The inductive nodes m, M carry no capacitance and are eliminated by their
stationarity conditions; phi_S is cyclic and its conserved charge is set to
zero. Two independent routes produce the same ``ReducedParams``:

* ``reduce_closed_form`` evaluates explicit rational expressions;
* ``reduce_numeric`` builds the capacitance and inductance matrices from the
  element list, inverts / Schur-complements them numerically.

Units are nH, fF and GHz throughout; ``E2_OVER_H`` and ``FLUX_SQ_OVER_H`` hold
every physical constant the conversions need.
"""
from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse.linalg
from scipy import constants as _sc

from .coupled import SystemParams, TruncationConfig, solve_coupled
from .errors import DegenerateCircuitError, InvalidArgumentError
from .fluxonium import FluxoniumParams
from .operators import cosine_operator, ladder, oscillator_basis

__all__ = [
    "E2_OVER_H",
    "FLUX_SQ_OVER_H",
    "RegimeWarning",
    "CircuitSpec",
    "ReducedParams",
    "DEVICE_CIRCUIT",
    "reduce_closed_form",
    "reduce_numeric",
    "lc_mode_frequency",
    "RoundtripReport",
    "roundtrip_spectrum_check",
    "capacitance_matrix",
    "inductance_matrix",
]

#: e^2 / h expressed in GHz * fF.
E2_OVER_H = _sc.e**2 / _sc.h * 1e15 * 1e-9
#: (hbar / 2e)^2 / h expressed in GHz * nH.
FLUX_SQ_OVER_H = (_sc.hbar / (2 * _sc.e)) ** 2 / _sc.h * 1e9 * 1e-9

CAPACITANCE_FIELDS = ("C_a", "C_b", "C_1", "C_2", "C_3", "C_4", "C_ga", "C_gb")
INDUCTANCE_FIELDS = ("L_A", "L_B", "L_M")

# Node order (1, 2, a, b) -> (A, B, LC, S).
_NODE_FROM_MODE = np.array([
    [-2, 0, 1, 1],
    [0, 2, -1, 1],
    [2, 0, 1, 1],
    [0, -2, -1, 1],
]) / 4.0


class RegimeWarning(UserWarning):
    """The small-mutual-inductance approximation is being used outside its range."""


@dataclass(frozen=True)
class CircuitSpec:
    """Element values: inductances in nH, capacitances in fF, junction energies in GHz."""

    L_A: float
    L_B: float
    L_M: float
    C_a: float
    C_b: float
    C_1: float
    C_2: float
    C_3: float
    C_4: float
    C_ga: float
    C_gb: float
    E_JA: float
    E_JB: float

    def __post_init__(self):
        for name in INDUCTANCE_FIELDS + CAPACITANCE_FIELDS:
            v = getattr(self, name)
            ok = isinstance(v, (int, float, np.floating)) and np.isfinite(v)
            # L_M = 0 is the uncoupled limit: the shared branch becomes a short.
            if not (ok and (v > 0 or (name == "L_M" and v == 0))):
                raise InvalidArgumentError(f"{name} must be a positive number, got {v!r}")
        for name in ("E_JA", "E_JB"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive")

    @property
    def mutual_ratio(self) -> float:
        return self.L_M / min(self.L_A, self.L_B)

    @property
    def in_validity_regime(self) -> bool:
        return self.mutual_ratio <= 0.1

    @property
    def capacitances(self) -> Tuple[float, ...]:
        return tuple(getattr(self, f) for f in CAPACITANCE_FIELDS)

    def replace(self, **changes) -> "CircuitSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitSpec":
        names = [f.name for f in dataclasses.fields(cls)]
        missing = [n for n in names if n not in data]
        extra = [k for k in data if k not in names]
        if missing or extra:
            parts = []
            if missing:
                parts.append("missing field(s): " + ", ".join(missing))
            if extra:
                parts.append("unknown field(s): " + ", ".join(extra))
            raise InvalidArgumentError("; ".join(parts))
        for n in names:
            if isinstance(data[n], bool) or not isinstance(data[n], (int, float)):
                raise InvalidArgumentError(f"field {n}: expected a number, got {data[n]!r}")
        return cls(**{n: float(data[n]) for n in names})

    @classmethod
    def from_json(cls, text: str) -> "CircuitSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"malformed circuit JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidArgumentError("circuit JSON must be an object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class ReducedParams:
    """Reduced circuit quantities.

    ``C_A, C_B, C_LC`` (fF) enter as ``q^2 / 2C``. ``J_C_coeff, g_A_coeff,
    g_B_coeff`` (1/fF) multiply ``q_A q_B``, ``q_A q_LC`` and ``q_B q_LC``.
    ``L_A_eff, L_B_eff, L_LC`` (nH) enter as ``phi^2 / 2L``; ``J_L`` (GHz) is the
    coefficient of the dimensionless ``phi_A phi_B``.
    """

    C_A: float
    C_B: float
    C_LC: float
    J_C_coeff: float
    g_A_coeff: float
    g_B_coeff: float
    L_A_eff: float
    L_B_eff: float
    L_LC: float
    J_L: float
    E_JA: float
    E_JB: float

    @property
    def E_C_a(self) -> float:
        return E2_OVER_H / (2.0 * self.C_A)

    @property
    def E_C_b(self) -> float:
        return E2_OVER_H / (2.0 * self.C_B)

    @property
    def E_L_a(self) -> float:
        return FLUX_SQ_OVER_H / self.L_A_eff

    @property
    def E_L_b(self) -> float:
        return FLUX_SQ_OVER_H / self.L_B_eff

    @property
    def lc_charge_zpf(self) -> float:
        """Zero-point charge of the LC mode in units of 2e."""
        return float(oscillator_basis(E2_OVER_H / (2.0 * self.C_LC), FLUX_SQ_OVER_H / self.L_LC, 2).n_zpf)

    @property
    def J_C(self) -> float:
        return 4.0 * E2_OVER_H * self.J_C_coeff

    @property
    def g_a(self) -> float:
        return 4.0 * E2_OVER_H * self.lc_charge_zpf * self.g_A_coeff

    @property
    def g_b(self) -> float:
        return 4.0 * E2_OVER_H * self.lc_charge_zpf * self.g_B_coeff

    @property
    def f_lc(self) -> float:
        return lc_mode_frequency(self)

    def to_system_params(self, trunc: Optional[TruncationConfig] = None) -> SystemParams:
        return SystemParams(
            qubit_a=FluxoniumParams(self.E_JA, self.E_C_a, self.E_L_a, "A"),
            qubit_b=FluxoniumParams(self.E_JB, self.E_C_b, self.E_L_b, "B"),
            J_C=self.J_C, J_L=self.J_L, g_a=self.g_a, g_b=self.g_b, f_lc=self.f_lc,
            trunc=trunc or TruncationConfig(),
        )

    def to_dict(self, derived: bool = True) -> dict:
        out = dataclasses.asdict(self)
        if derived:
            out.update(E_C_a=self.E_C_a, E_C_b=self.E_C_b, E_L_a=self.E_L_a, E_L_b=self.E_L_b,
                       J_C=self.J_C, g_a=self.g_a, g_b=self.g_b, f_lc=self.f_lc)
        return out

    def fields_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in dataclasses.fields(self)])


def _charging_denominator(C_a, C_b, C_1, C_2, C_3, C_4, C_ga, C_gb):
    # Common quartic denominator shared by J_C, g_B and (times 2) the capacitances.
    return (
        (C_3 * C_4 * C_a + C_2 * C_3 * (C_4 + C_a) + (C_2 + C_3) * C_4 * C_b
         + (C_2 + C_3 + C_4) * C_a * C_b + C_1 * (C_3 + C_a) * (C_4 + C_b)
         + C_1 * C_2 * (C_3 + C_4 + C_a + C_b)) * C_ga
        + (C_3 * C_4 * C_a + C_3 * C_4 * C_b + C_3 * C_a * C_b + C_4 * C_a * C_b
           + C_3 * C_a * C_ga + C_3 * C_b * C_ga + C_a * C_b * C_ga
           + C_2 * (C_3 + C_b) * (C_4 + C_a + C_ga)
           + C_1 * (C_3 + C_a) * (C_4 + C_b + C_ga)
           + C_1 * C_2 * (C_3 + C_4 + C_a + C_b + C_ga)) * C_gb
    )


def _closed_form_capacitive(C_a, C_b, C_1, C_2, C_3, C_4, C_ga, C_gb):
    den = _charging_denominator(C_a, C_b, C_1, C_2, C_3, C_4, C_ga, C_gb)

    J_C = (C_3 * C_ga * C_gb - (C_ga + C_gb) * (C_1 * C_2 - C_3 * C_4)) / den

    g_A = (
        C_1 * C_4 * C_ga + (C_1 - C_3 + C_4) * C_b * C_ga
        + C_b * (-C_3 + C_4 + C_ga) * C_gb + C_1 * (C_4 + C_b + C_ga) * C_gb
        - C_2 * (C_3 + C_b) * (C_ga + C_gb)
    ) / (
        (C_3 * C_4 * C_a + C_4 * C_a * C_b + C_3 * (C_4 + C_a) * C_b
         + C_2 * (C_4 + C_a) * (C_3 + C_b)) * C_ga
        + C_1 * ((C_3 + C_a) * (C_4 + C_b) + C_2 * (C_3 + C_4 + C_a + C_b)) * C_ga
        + C_1 * ((C_3 + C_a) * (C_4 + C_b + C_ga) + C_2 * (C_3 + C_4 + C_a + C_b + C_ga)) * C_gb
        + (C_a * C_b * (C_4 + C_ga) + C_2 * (C_3 + C_b) * (C_4 + C_a + C_ga)
           + C_3 * (C_a * C_b + C_4 * (C_a + C_b) + (C_a + C_b) * C_ga)) * C_gb
    )

    g_B = (
        -((C_2 * C_4 + (C_2 - C_3 + C_4) * C_a) * C_ga)
        - (C_a * (-C_3 + C_4 + C_ga) + C_2 * (C_4 + C_a + C_ga)) * C_gb
        + C_1 * (C_3 + C_a) * (C_ga + C_gb)
    ) / den

    # Each of the three rational expressions below evaluates to 2C; halved on return.
    two_C_A = 2 * den / (
        C_4 * C_b * C_ga + C_3 * (C_4 + C_b) * C_ga + C_1 * (C_2 + C_4 + C_b) * C_ga
        + C_b * (C_4 + C_ga) * C_gb + C_3 * (C_4 + C_b + C_ga) * C_gb
        + C_1 * (C_2 + C_4 + C_b + C_ga) * C_gb + C_2 * (C_3 + C_b) * (C_ga + C_gb)
    )
    two_C_B = 2 * den / (
        (C_2 + C_3) * C_4 * C_ga + (C_2 + C_3 + C_4) * C_a * C_ga
        + C_a * (C_4 + C_ga) * C_gb + C_2 * (C_4 + C_a + C_ga) * C_gb
        + C_3 * (C_4 + C_a + C_ga) * C_gb + C_1 * (C_2 + C_3 + C_a) * (C_ga + C_gb)
    )
    two_C_LC = 2 * den / (
        ((C_3 + C_4) * C_a + (C_3 + C_4 + 4 * C_a) * C_b
         + C_1 * (C_3 + C_4 + C_a + C_b) + C_2 * (C_3 + C_4 + C_a + C_b)) * C_ga
        + (C_3 * C_a + C_4 * C_a + C_3 * C_b + C_4 * C_b + 4 * C_a * C_b + (C_a + C_b) * C_ga
           + C_1 * (C_3 + C_4 + C_a + C_b + C_ga)
           + C_2 * (C_3 + C_4 + C_a + C_b + C_ga)) * C_gb
    )
    return dict(C_A=two_C_A / 2, C_B=two_C_B / 2, C_LC=two_C_LC / 2,
                J_C_coeff=J_C, g_A_coeff=g_A, g_B_coeff=g_B)


def _closed_form_inductive(L_A, L_B, L_M, exact: bool):
    if exact:
        den = 4 * L_A * L_B + 2 * L_A * L_M + 2 * L_B * L_M
        L_A_eff = den / (2 * L_B + L_M)
        L_B_eff = den / (2 * L_A + L_M)
        mutual = L_M / den
    else:
        L_A_eff = 2 * L_A
        L_B_eff = 2 * L_B
        mutual = L_M / ((2 * L_A) * (2 * L_B))
    return dict(L_A_eff=L_A_eff, L_B_eff=L_B_eff, L_LC=2 * (L_A + L_B),
                J_L=FLUX_SQ_OVER_H * mutual)


def reduce_closed_form(circuit: CircuitSpec, exact_inductive: bool = False) -> ReducedParams:
    """Evaluate the explicit reduction formulas.

    By default the inductive sector uses the ``L_M << L_A, L_B`` limit
    (``E_L`` from ``2 L_alpha``, ``J_L`` proportional to ``L_M / (4 L_A L_B)``) and
    warns with ``RegimeWarning`` when ``L_M > 0.1 min(L_A, L_B)``.
    ``exact_inductive=True`` uses the unapproximated elimination of the
    inductive nodes instead.
    """
    if not exact_inductive and not circuit.in_validity_regime:
        warnings.warn(
            f"L_M / min(L_A, L_B) = {circuit.mutual_ratio:.3g} > 0.1; "
            "small-mutual-inductance expressions are inaccurate",
            RegimeWarning, stacklevel=2,
        )
    cap = _closed_form_capacitive(*circuit.capacitances)
    ind = _closed_form_inductive(circuit.L_A, circuit.L_B, circuit.L_M, exact_inductive)
    return ReducedParams(**cap, **ind, E_JA=circuit.E_JA, E_JB=circuit.E_JB)


def capacitance_matrix(circuit: CircuitSpec) -> np.ndarray:
    """Capacitance matrix (fF) in the (A, B, LC, S) coordinates."""
    nodes = {"1": 0, "2": 1, "a": 2, "b": 3}
    c = np.zeros((4, 4))

    def branch(i, j, value):
        i = nodes[i]
        c[i, i] += value
        if j is not None:
            j = nodes[j]
            c[j, j] += value
            c[i, j] -= value
            c[j, i] -= value

    branch("a", "1", circuit.C_a)
    branch("b", "2", circuit.C_b)
    branch("1", "2", circuit.C_1)
    branch("a", "b", circuit.C_2)
    branch("a", "2", circuit.C_3)
    branch("b", "1", circuit.C_4)
    branch("1", None, circuit.C_ga)
    branch("b", None, circuit.C_gb)
    return _NODE_FROM_MODE.T @ c @ _NODE_FROM_MODE


def inductance_matrix(circuit: CircuitSpec) -> np.ndarray:
    """Inverse-inductance matrix (1/nH) in (A, B, LC, S) after eliminating m, M."""
    shorted = circuit.L_M == 0
    nodes = {"1": 0, "2": 1, "a": 2, "b": 3, "m": 4, "M": 4 if shorted else 5}
    size = 5 if shorted else 6
    k = np.zeros((size, size))

    def branch(i, j, ind):
        i, j = nodes[i], nodes[j]
        k[i, i] += 1 / ind
        k[j, j] += 1 / ind
        k[i, j] -= 1 / ind
        k[j, i] -= 1 / ind

    branch("1", "m", circuit.L_A)
    branch("a", "M", circuit.L_A)
    branch("2", "m", circuit.L_B)
    branch("b", "M", circuit.L_B)
    if not shorted:
        branch("m", "M", circuit.L_M)
    t = np.eye(size)
    t[:4, :4] = _NODE_FROM_MODE
    km = t.T @ k @ t
    keep, elim = slice(0, 4), slice(4, size)
    return km[keep, keep] - km[keep, elim] @ np.linalg.solve(km[elim, elim], km[elim, keep])


def reduce_numeric(circuit: CircuitSpec) -> ReducedParams:
    """Independent numerical reduction (no small-``L_M`` approximation)."""
    cmat = capacitance_matrix(circuit)
    scale = np.max(np.abs(cmat))
    if np.linalg.cond(cmat / scale) > 1e13:
        raise DegenerateCircuitError("capacitance matrix is singular")
    # q_S = 0: keep the (A, B, LC) block of the full inverse.
    inv = np.linalg.inv(cmat)[:3, :3]
    kmat = inductance_matrix(circuit)[:3, :3]
    return ReducedParams(
        C_A=1 / inv[0, 0], C_B=1 / inv[1, 1], C_LC=1 / inv[2, 2],
        J_C_coeff=inv[0, 1], g_A_coeff=inv[0, 2], g_B_coeff=inv[1, 2],
        L_A_eff=1 / kmat[0, 0], L_B_eff=1 / kmat[1, 1], L_LC=1 / kmat[2, 2],
        J_L=FLUX_SQ_OVER_H * kmat[0, 1],
        E_JA=circuit.E_JA, E_JB=circuit.E_JB,
    )


def lc_mode_frequency(reduced: ReducedParams) -> float:
    """``1 / (2 pi sqrt(L_LC C_LC))`` in GHz."""
    e_c = E2_OVER_H / (2.0 * reduced.C_LC)
    e_l = FLUX_SQ_OVER_H / reduced.L_LC
    return float(np.sqrt(8.0 * e_c * e_l))


#: Element values reproducing the device parameter set (DEVICE_PARAMS) through
#: ``reduce_closed_form``. Capacitances were solved by least squares; the
#: inductances follow from E_L and J_L.
DEVICE_CIRCUIT = CircuitSpec(
    L_A=107.5405, L_B=70.45755, L_M=0.7416584,
    C_a=12.91256, C_b=12.72994, C_1=6.847959, C_2=7.032796,
    C_3=5.594413, C_4=6.076276, C_ga=19.44710, C_gb=2.309352,
    E_JA=5.59, E_JB=6.27,
)


@dataclass(frozen=True)
class RoundtripReport:
    reduced_transitions: np.ndarray
    direct_transitions: np.ndarray

    @property
    def differences(self) -> np.ndarray:
        return np.abs(self.reduced_transitions - self.direct_transitions)

    @property
    def max_difference(self) -> float:
        return float(self.differences.max())

    @property
    def computational_difference(self) -> float:
        """Largest deviation over the three lowest transitions (|10>, |01>, |11>)."""
        return float(self.differences[:3].max())


def _direct_spectrum(circuit: CircuitSpec, phi_ext: float, dims: Sequence[int], k: int):
    """Lowest ``k`` levels of the unreduced three-mode Hamiltonian.

    Each mode lives in the oscillator basis of its own diagonal quadratic
    terms; the product space is never stored, the Hamiltonian is applied
    slot by slot inside a Lanczos solve.
    """
    dims = tuple(int(d) for d in dims)
    inv = np.linalg.inv(capacitance_matrix(circuit))[:3, :3]
    kmat = inductance_matrix(circuit)[:3, :3]
    charge = 4.0 * E2_OVER_H * inv  # H = n^T charge n / 2
    induct = FLUX_SQ_OVER_H * kmat  # H = phi^T induct phi / 2
    e_j = (circuit.E_JA, circuit.E_JB)

    phis, nrs, terms = [], [], []
    for i, d in enumerate(dims):
        basis = oscillator_basis(charge[i, i] / 8.0, induct[i, i], d)
        a = ladder(d)
        phis.append(basis.phi_zpf * (a + a.T))
        nrs.append(basis.n_zpf * (a.T - a))  # n = i * nr
        local = -0.5 * charge[i, i] * (nrs[i] @ nrs[i]) + 0.5 * induct[i, i] * (phis[i] @ phis[i])
        if i < 2:
            local = local - e_j[i] * cosine_operator(basis, phi_ext)
        terms.append((1.0, [(i, local)]))
    for i in range(3):
        for j in range(i + 1, 3):
            # n_i n_j = -(nr_i nr_j)
            terms.append((-charge[i, j], [(i, nrs[i]), (j, nrs[j])]))
            terms.append((induct[i, j], [(i, phis[i]), (j, phis[j])]))

    def matvec(x):
        x = x.reshape(dims)
        out = np.zeros_like(x)
        for coeff, factors in terms:
            y = x
            for slot, m in factors:
                y = np.moveaxis(np.tensordot(m, y, axes=([1], [slot])), 0, slot)
            out += coeff * y
        return out.ravel()

    n = int(np.prod(dims))
    op = scipy.sparse.linalg.LinearOperator((n, n), matvec=matvec, dtype=float)
    w = scipy.sparse.linalg.eigsh(op, k=k, which="SA", tol=1e-12, v0=np.ones(n),
                                  return_eigenvectors=False)
    return np.sort(w)


def roundtrip_spectrum_check(circuit: CircuitSpec, phi_ext: float = np.pi, *,
                             exact_inductive: bool = False,
                             direct_dims: Sequence[int] = (60, 60, 6),
                             trunc: Optional[TruncationConfig] = None,
                             n_transitions: int = 6) -> RoundtripReport:
    """Compare the reduced model with a direct three-mode diagonalization.

    The reduced side is the coupled fluxonium model built from
    ``reduce_closed_form``; the direct side discretizes the unreduced
    quadratic form plus both junction cosines in a product oscillator basis.
    """
    reduced = reduce_closed_form(circuit, exact_inductive=exact_inductive)
    params = reduced.to_system_params(
        trunc or TruncationConfig(fluxonium_basis_dim=60, fluxonium_keep=12, lc_fock_dim=8))
    spec = solve_coupled(params, phi_ext, n_states=n_transitions + 1)
    e_red = np.sort(spec.energies)[: n_transitions + 1]
    e_dir = _direct_spectrum(circuit, phi_ext, direct_dims, n_transitions + 1)
    return RoundtripReport(e_red[1:] - e_red[0], e_dir[1:] - e_dir[0])

"""Spectroscopy sweeps and computational-subspace figures of merit.

Frequencies are in GHz except ``static_zz`` which reports kHz. All metrics
default to the half-flux-quantum operating point ``phi_ext = pi``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .coupled import (
    LabeledSpectrum,
    LabelLike,
    SystemParams,
    format_label,
    parse_label,
    solve_coupled,
    two_qubit_matrix_element,
)
from .errors import DegenerateDriveError, InvalidArgumentError, LabelingError, LabelNotFoundError
from .fluxonium import anharmonicity, solve_fluxonium

__all__ = [
    "GHZ_TO_KHZ",
    "COMPUTATIONAL_LABELS",
    "TransitionRow",
    "TransitionTable",
    "flux_sweep",
    "static_zz",
    "static_zz_from_spectrum",
    "zz_energy_combination",
    "DriveCoefficients",
    "drive_coefficients",
    "zx_magnitude",
    "CouplingPoint",
    "coupling_sweep",
    "coupling_sweep_csv",
    "device_metrics",
]

GHZ_TO_KHZ = 1e6
COMPUTATIONAL_LABELS = ((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))
CSV_HEADER = ("phi_ext", "from", "to", "freq_ghz", "flag")


@dataclass(frozen=True)
class TransitionRow:
    phi_ext: float
    start: Tuple[int, int, int]
    end: Tuple[int, int, int]
    frequency: float
    flagged: bool = False


@dataclass
class TransitionTable:
    rows: List[TransitionRow] = field(default_factory=list)
    failures: List[Tuple[float, str]] = field(default_factory=list)

    def sort(self) -> "TransitionTable":
        self.rows.sort(key=lambda r: (r.phi_ext, r.frequency))
        return self

    def line(self, start: LabelLike, end: LabelLike) -> Tuple[np.ndarray, np.ndarray]:
        """``(phi_ext, frequency)`` arrays for one transition, in flux order."""
        s, e = parse_label(start), parse_label(end)
        pts = sorted((r.phi_ext, r.frequency) for r in self.rows if r.start == s and r.end == e)
        if not pts:
            return np.empty(0), np.empty(0)
        phi, f = zip(*pts)
        return np.array(phi), np.array(f)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([repr(float(r.phi_ext)), format_label(r.start), format_label(r.end),
                        repr(float(r.frequency)), int(r.flagged)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TransitionTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise InvalidArgumentError(f"expected CSV header {','.join(CSV_HEADER)}")
        rows = [TransitionRow(float(p), parse_label(s), parse_label(e), float(f), bool(int(fl)))
                for p, s, e, f, fl in reader]
        return cls(rows)


def flux_sweep(params: SystemParams, phi_grid: Iterable[float],
               transitions: Sequence[Tuple[LabelLike, LabelLike]],
               n_states: Optional[int] = None) -> TransitionTable:
    """Requested transition frequencies at every flux point.

    A point whose solve or labelling fails is recorded in ``failures`` and the
    sweep carries on.
    """
    phi_grid = [float(p) for p in phi_grid]
    if not phi_grid:
        raise InvalidArgumentError("flux grid is empty")
    if not transitions:
        raise InvalidArgumentError("no transitions requested")
    pairs = [(parse_label(a), parse_label(b)) for a, b in transitions]
    table = TransitionTable()
    for phi in phi_grid:
        try:
            spec = solve_coupled(params, phi, n_states)
            rows = []
            for a, b in pairs:
                sa, sb = spec[a], spec[b]
                rows.append(TransitionRow(phi, a, b, sb.energy - sa.energy,
                                          sa.flagged or sb.flagged))
        except (LabelNotFoundError, np.linalg.LinAlgError, ValueError) as exc:
            table.failures.append((phi, str(exc)))
            continue
        table.rows.extend(rows)
    return table.sort()


def _computational(spec: LabeledSpectrum):
    try:
        return [spec[lab] for lab in COMPUTATIONAL_LABELS]
    except LabelNotFoundError as exc:
        raise LabelingError(f"computational states unresolved: {exc}") from None


def static_zz_from_spectrum(spec: LabeledSpectrum) -> float:
    """``f(00 -> 01) - f(10 -> 11)`` in kHz."""
    s00, s10, s01, s11 = _computational(spec)
    return ((s01.energy - s00.energy) - (s11.energy - s10.energy)) * GHZ_TO_KHZ


def zz_energy_combination(spec: LabeledSpectrum) -> float:
    """``E00 + E11 - E01 - E10`` in kHz; the negative of the conditional-frequency form."""
    s00, s10, s01, s11 = _computational(spec)
    return (s00.energy + s11.energy - s01.energy - s10.energy) * GHZ_TO_KHZ


def static_zz(params: SystemParams, phi_ext: float = np.pi) -> float:
    return static_zz_from_spectrum(solve_coupled(params, phi_ext, n_states=_n_low(params)))


def _n_low(params: SystemParams) -> int:
    # Enough dressed states to cover the computational block and its neighbours.
    return min(24, int(np.prod(params.trunc.dims)))


@dataclass(frozen=True)
class DriveCoefficients:
    """Real XI, XZ, IX, ZX drive coefficients per unit drive amplitude."""

    xi_a_plus: float
    xi_a_minus: float
    xi_b_plus: float
    xi_b_minus: float
    eps_a: float
    eps_b: float

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("xi_a_plus", "xi_a_minus", "xi_b_plus", "xi_b_minus", "eps_a", "eps_b")}


def _drive_element(spec, eps_a, eps_b, bra, ket) -> complex:
    return (eps_a * two_qubit_matrix_element(spec, "A", bra, ket)
            + eps_b * two_qubit_matrix_element(spec, "B", bra, ket))


def drive_coefficients(spec: LabeledSpectrum, eps_a: float, eps_b: float,
                       atol: float = 1e-9) -> DriveCoefficients:
    """Evaluate ``i xi_A^{+-}`` and ``i xi_B^{+-}`` from the dressed charge elements.

    Raises ``LabelingError`` if the factored-out coefficients are not real,
    which happens when the dressed states are not phase-fixed to real vectors.
    """
    _computational(spec)
    d = lambda bra, ket: _drive_element(spec, eps_a, eps_b, bra, ket)  # noqa: E731
    a1, a2 = d("00", "10"), d("01", "11")
    b1, b2 = d("00", "01"), d("10", "11")
    raw = {
        "xi_a_plus": (a1 + a2) / 1j,
        "xi_a_minus": (a1 - a2) / 1j,
        "xi_b_plus": (b1 + b2) / 1j,
        "xi_b_minus": (b1 - b2) / 1j,
    }
    scale = max(abs(eps_a), abs(eps_b), 1.0)
    for k, v in raw.items():
        if abs(v.imag) > atol * scale:
            raise LabelingError(f"{k} has imaginary part {v.imag:.3g}; states are not real")
    return DriveCoefficients(**{k: float(v.real) for k, v in raw.items()},
                             eps_a=float(eps_a), eps_b=float(eps_b))


def zx_magnitude(spec: LabeledSpectrum, rtol: float = 1e-12) -> float:
    """Cross-resonance ZX strength relative to the direct IX drive of qubit B.

    ``|xi_B^-(eps_A=1, eps_B=0) / xi_B^+(eps_A=0, eps_B=1)|``.
    """
    cross = drive_coefficients(spec, 1.0, 0.0).xi_b_minus
    direct = drive_coefficients(spec, 0.0, 1.0).xi_b_plus
    if abs(direct) < rtol:
        raise DegenerateDriveError("direct drive matrix elements cancel; ZX ratio undefined")
    return abs(cross / direct)


@dataclass(frozen=True)
class CouplingPoint:
    J_L: float
    zx: float
    zz_khz: float


def coupling_sweep(base: SystemParams, jl_values: Sequence[float], mode: str = "pure-inductive",
                   phi_ext: float = np.pi) -> List[CouplingPoint]:
    """|ZX| and static ZZ against the inductive coupling.

    ``mode="pure-inductive"`` zeroes ``J_C`` and ``g_a, g_b``;
    ``"full-capacitive"`` keeps them at their ``base`` values.
    """
    if mode not in ("pure-inductive", "full-capacitive"):
        raise InvalidArgumentError(f"unknown coupling-sweep mode {mode!r}")
    jl_values = list(jl_values)
    if not jl_values:
        raise InvalidArgumentError("J_L list is empty")
    params = base.pure_inductive() if mode == "pure-inductive" else base
    out = []
    for jl in jl_values:
        p = params.replace(J_L=float(jl))
        spec = solve_coupled(p, phi_ext, n_states=_n_low(p))
        try:
            zx = zx_magnitude(spec)
        except DegenerateDriveError:
            zx = float("nan")
        out.append(CouplingPoint(float(jl), zx, static_zz_from_spectrum(spec)))
    return out


def coupling_sweep_csv(points: Sequence[CouplingPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("J_L", "zx", "zz_khz"))
    for p in points:
        w.writerow([repr(p.J_L), repr(p.zx), repr(p.zz_khz)])
    return buf.getvalue()


CHARGE_ELEMENTS = (
    ("A", "00", "10"), ("A", "01", "11"), ("A", "00", "01"), ("A", "10", "11"),
    ("B", "00", "10"), ("B", "01", "11"), ("B", "00", "01"), ("B", "10", "11"),
)


def charge_element_table(spec: LabeledSpectrum) -> dict:
    """``-i <bra| n_q |ket>`` for the eight computational charge elements (real)."""
    out = {}
    for q, bra, ket in CHARGE_ELEMENTS:
        v = -1j * two_qubit_matrix_element(spec, q, bra, ket)
        out[f"n_{q.lower()}:{bra}-{ket}"] = float(v.real)
    return out


def device_metrics(params: SystemParams, phi_ext: float = np.pi) -> dict:
    """Single-point summary used by the ``metrics`` command."""
    spec = solve_coupled(params, phi_ext, n_states=min(64, int(np.prod(params.trunc.dims))))
    sol_a = solve_fluxonium(params.qubit_a, phi_ext, params.trunc.fluxonium_basis_dim, 3)
    sol_b = solve_fluxonium(params.qubit_b, phi_ext, params.trunc.fluxonium_basis_dim, 3)
    try:
        zx = zx_magnitude(spec)
    except DegenerateDriveError:
        zx = float("nan")
    return {
        "phi_ext": float(phi_ext),
        "f01_a": spec.energy("100") - spec.energy("000"),
        "f01_b": spec.energy("010") - spec.energy("000"),
        "f12_a": spec.energy("200") - spec.energy("100"),
        "f12_b": spec.energy("020") - spec.energy("010"),
        "anharmonicity_a": anharmonicity(sol_a),
        "anharmonicity_b": anharmonicity(sol_b),
        "f_lc_dressed": spec.energy("001") - spec.energy("000"),
        "static_zz_khz": static_zz_from_spectrum(spec),
        "zx": zx,
        "table2_matrix_elements": charge_element_table(spec),
    }

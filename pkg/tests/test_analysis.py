import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fluxpair.analysis import (
    TransitionTable,
    charge_element_table,
    coupling_sweep,
    coupling_sweep_csv,
    device_metrics,
    drive_coefficients,
    flux_sweep,
    static_zz,
    static_zz_from_spectrum,
    zx_magnitude,
    zz_energy_combination,
)
from fluxpair.coupled import DEVICE_PARAMS, solve_coupled
from fluxpair.errors import DegenerateDriveError, InvalidArgumentError
from fluxpair.fluxonium import solve_fluxonium

REFERENCE_ZX = abs(0.020908 - (-0.020883)) / abs(0.063885 + 0.063873)
JL_GRID = np.array([1e-3, 2e-3, 4e-3, 8e-3])


@pytest.fixture(scope="module")
def pure_sweep():
    return coupling_sweep(DEVICE_PARAMS, JL_GRID, mode="pure-inductive")


@pytest.fixture(scope="module")
def full_sweep():
    return coupling_sweep(DEVICE_PARAMS, JL_GRID, mode="full-capacitive")


# --- flux sweeps ---------------------------------------------------------------

def test_qubit_a_line_minimum_at_half_flux():
    grid = np.pi + np.linspace(-0.3, 0.3, 13)
    table = flux_sweep(DEVICE_PARAMS, grid, [("000", "100")])
    phi, f = table.line("000", "100")
    assert phi[np.argmin(f)] == pytest.approx(np.pi)
    assert f.min() == pytest.approx(0.15, abs=0.01)


def test_lc_line_near_design_value():
    grid = np.pi + np.linspace(-0.7, 0.7, 15)
    table = flux_sweep(DEVICE_PARAMS, grid, [("000", "001")])
    _, f = table.line("000", "001")
    assert np.all(np.abs(f - 3.22) < 0.15)


def test_rows_sorted_and_non_negative():
    grid = [3.3, 2.9, np.pi]
    table = flux_sweep(DEVICE_PARAMS, grid, [("000", "010"), ("000", "100"), ("000", "001")])
    keys = [(r.phi_ext, r.frequency) for r in table.rows]
    assert keys == sorted(keys)
    assert all(r.frequency >= 0 for r in table.rows)
    assert not table.failures


def test_zero_coupling_sweep_is_union_of_single_qubits():
    p = DEVICE_PARAMS.uncoupled()
    grid = [2.8, np.pi, 3.5]
    table = flux_sweep(p, grid, [("000", "100"), ("000", "010"), ("000", "200")])
    for phi in grid:
        ea = solve_fluxonium(p.qubit_a, phi, p.trunc.fluxonium_basis_dim, 3).energies
        eb = solve_fluxonium(p.qubit_b, phi, p.trunc.fluxonium_basis_dim, 3).energies
        got = {(r.start, r.end): r.frequency for r in table.rows if r.phi_ext == phi}
        assert got[(0, 0, 0), (1, 0, 0)] == pytest.approx(ea[1] - ea[0], abs=1e-9)
        assert got[(0, 0, 0), (2, 0, 0)] == pytest.approx(ea[2] - ea[0], abs=1e-9)
        assert got[(0, 0, 0), (0, 1, 0)] == pytest.approx(eb[1] - eb[0], abs=1e-9)


def test_sweep_records_failures_and_continues():
    # |0 0 5> is outside lc_fock_dim and cannot be labelled anywhere.
    table = flux_sweep(DEVICE_PARAMS, [np.pi, 3.0], [("000", "006")])
    assert len(table.failures) == 2 and table.rows == []


@pytest.mark.parametrize("grid, transitions", [([], [("000", "100")]), ([np.pi], [])])
def test_sweep_argument_errors(grid, transitions):
    with pytest.raises(InvalidArgumentError):
        flux_sweep(DEVICE_PARAMS, grid, transitions)


def test_transition_table_csv_round_trip():
    table = flux_sweep(DEVICE_PARAMS, [np.pi, 3.0], [("000", "100"), ("000", "001")])
    text = table.to_csv()
    assert text.splitlines()[0] == "phi_ext,from,to,freq_ghz,flag"
    again = TransitionTable.from_csv(text)
    assert again.rows == table.rows


# --- static ZZ -------------------------------------------------------------------

def test_zz_routes_agree(device_spectrum, pure_spectrum):
    for spec in (device_spectrum, pure_spectrum):
        assert static_zz_from_spectrum(spec) == pytest.approx(-zz_energy_combination(spec), abs=1e-9)


def test_zz_zero_without_coupling(uncoupled_spectrum):
    assert static_zz_from_spectrum(uncoupled_spectrum) == pytest.approx(0.0, abs=1e-6)


def test_full_model_zz_golden(device_spectrum):
    zz = static_zz_from_spectrum(device_spectrum)
    assert zz == pytest.approx(2.6832, abs=5e-4)
    assert 2.0 / 3 <= abs(zz) <= 2.0 * 3


def test_pure_inductive_zz_near_five_khz(pure_spectrum):
    assert abs(static_zz_from_spectrum(pure_spectrum)) == pytest.approx(5.0, rel=0.30)


def test_static_zz_wrapper_matches_full_solve(device_spectrum):
    assert static_zz(DEVICE_PARAMS) == pytest.approx(static_zz_from_spectrum(device_spectrum), abs=1e-6)


def test_capacitive_terms_suppress_zz(device_spectrum, pure_spectrum):
    assert abs(static_zz_from_spectrum(device_spectrum)) <= abs(static_zz_from_spectrum(pure_spectrum))


# --- drive coefficients and ZX ------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_drive_coefficients_linear(device_spectrum, eps_a, eps_b):
    one = drive_coefficients(device_spectrum, eps_a, eps_b)
    ua = drive_coefficients(device_spectrum, 1.0, 0.0)
    ub = drive_coefficients(device_spectrum, 0.0, 1.0)
    for k in ("xi_a_plus", "xi_a_minus", "xi_b_plus", "xi_b_minus"):
        assert getattr(one, k) == pytest.approx(eps_a * getattr(ua, k) + eps_b * getattr(ub, k),
                                                rel=1e-12, abs=1e-14)


def test_drive_coefficients_double_exactly(device_spectrum):
    one = drive_coefficients(device_spectrum, 1.0, 0.0).as_dict()
    two = drive_coefficients(device_spectrum, 2.0, 0.0).as_dict()
    for k in ("xi_a_plus", "xi_a_minus", "xi_b_plus", "xi_b_minus"):
        assert two[k] == 2 * one[k]


@pytest.mark.parametrize("s", [0.5, 2.0, 8.0, 0.25])
def test_zx_ratio_scale_invariant(device_spectrum, s):
    cross = drive_coefficients(device_spectrum, s, 0.0).xi_b_minus
    direct = drive_coefficients(device_spectrum, 0.0, s).xi_b_plus
    ref = drive_coefficients(device_spectrum, 1.0, 0.0).xi_b_minus / \
        drive_coefficients(device_spectrum, 0.0, 1.0).xi_b_plus
    assert cross / direct == ref
    assert abs(ref) == zx_magnitude(device_spectrum)


def test_cross_drive_dominated_by_zx_channel(device_spectrum):
    xi = drive_coefficients(device_spectrum, 1.0, 0.0)
    assert abs(xi.xi_b_minus) == pytest.approx(0.020908 + 0.020883, rel=0.02)
    assert abs(xi.xi_b_plus) < 0.01 * abs(xi.xi_b_minus)


def test_direct_drive_coefficients(device_spectrum):
    xi = drive_coefficients(device_spectrum, 0.0, 1.0)
    assert abs(xi.xi_b_plus) == pytest.approx(0.127758, rel=0.02)
    assert abs(xi.xi_b_minus) < 1e-3 * abs(xi.xi_b_plus)


def test_zero_coupling_cross_terms_vanish(uncoupled_spectrum):
    for eps in ((1.0, 0.0), (0.0, 1.0), (0.3, -0.7)):
        xi = drive_coefficients(uncoupled_spectrum, *eps)
        assert abs(xi.xi_a_minus) < 1e-9 and abs(xi.xi_b_minus) < 1e-9
    assert zx_magnitude(uncoupled_spectrum) == pytest.approx(0.0, abs=1e-9)


def test_zx_golden_and_reference_value(device_spectrum):
    zx = zx_magnitude(device_spectrum)
    assert zx == pytest.approx(0.316505, abs=1e-5)
    assert zx == pytest.approx(REFERENCE_ZX, rel=0.03)


def test_pure_inductive_zx_near_point_four(pure_spectrum):
    assert zx_magnitude(pure_spectrum) == pytest.approx(0.4, rel=0.25)


def test_zx_undefined_without_direct_drive(device_spectrum, monkeypatch):
    import fluxpair.analysis as an

    monkeypatch.setattr(an, "two_qubit_matrix_element", lambda *a, **k: 0j)
    with pytest.raises(DegenerateDriveError):
        zx_magnitude(device_spectrum)


def test_charge_table_keys(device_spectrum):
    table = charge_element_table(device_spectrum)
    assert len(table) == 8 and "n_a:00-10" in table and "n_b:10-11" in table


# --- coupling sweep -------------------------------------------------------------------

def test_zx_strictly_increasing(pure_sweep, full_sweep):
    for pts in (pure_sweep, full_sweep):
        zx = [p.zx for p in pts]
        assert all(b > a for a, b in zip(zx, zx[1:]))


def test_scaling_exponents(pure_sweep):
    jl = np.array([p.J_L for p in pure_sweep])
    zx_slope = np.polyfit(np.log(jl), np.log([p.zx for p in pure_sweep]), 1)[0]
    zz_slope = np.polyfit(np.log(jl), np.log([abs(p.zz_khz) for p in pure_sweep]), 1)[0]
    assert zz_slope == pytest.approx(2.0, abs=0.1)
    assert zx_slope == pytest.approx(1.0, abs=0.05)


def test_capacitive_terms_leave_zx_unchanged(pure_sweep, full_sweep):
    for p, f in zip(pure_sweep, full_sweep):
        assert f.zx == pytest.approx(p.zx, rel=0.01)


def test_zero_jl_pure_mode_metrics_vanish():
    (pt,) = coupling_sweep(DEVICE_PARAMS, [0.0])
    assert pt.zz_khz == pytest.approx(0.0, abs=1e-6)
    assert pt.zx == pytest.approx(0.0, abs=1e-9)


def test_coupling_sweep_errors():
    with pytest.raises(InvalidArgumentError):
        coupling_sweep(DEVICE_PARAMS, [4e-3], mode="mixed")
    with pytest.raises(InvalidArgumentError):
        coupling_sweep(DEVICE_PARAMS, [])


def test_coupling_sweep_csv(pure_sweep):
    lines = coupling_sweep_csv(pure_sweep).splitlines()
    assert lines[0] == "J_L,zx,zz_khz" and len(lines) == 1 + len(pure_sweep)
    assert float(lines[1].split(",")[1]) == pure_sweep[0].zx


# --- metrics summary --------------------------------------------------------------------

def test_device_metrics_summary():
    m = device_metrics(DEVICE_PARAMS)
    assert m["f01_a"] == pytest.approx(0.15, abs=0.01)
    assert m["f01_b"] == pytest.approx(0.23, abs=0.01)
    assert m["f_lc_dressed"] == pytest.approx(3.22, abs=0.05)
    assert m["zx"] == pytest.approx(0.316505, abs=1e-5)
    assert len(m["table2_matrix_elements"]) == 8


def test_device_metrics_zero_couplings():
    m = device_metrics(DEVICE_PARAMS.uncoupled())
    assert m["zx"] == pytest.approx(0.0, abs=1e-9)
    assert m["static_zz_khz"] == pytest.approx(0.0, abs=1e-6)

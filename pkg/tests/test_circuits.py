import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cqed_tongues import circuits
from cqed_tongues.circuits import (
    CapacitanceSpec,
    CircuitParams,
    band_energy_mathieu,
    charge_dispersion,
    charging_energy,
    effective_ej,
    eigensolve,
    hamiltonian_matrix,
    k_index,
    mathieu_order,
    plasma_frequency,
    spectrum_sweep,
    to_mathieu,
)

E = 1.602176634e-19
H = 6.62607015e-34


# --- parameters ------------------------------------------------------------


def test_default_cutoff_and_floor():
    assert CircuitParams(1.0, 1.0).charge_cutoff == 20
    assert CircuitParams(1.0, 1.0, N_g=3.3).charge_cutoff == 33
    with pytest.raises(ValueError):
        CircuitParams(1.0, 1.0, N_g=2.0, charge_cutoff=15)
    with pytest.raises(ValueError):
        CircuitParams(1.0, 1.0, charge_cutoff=9)


@pytest.mark.parametrize("kw", [dict(E_C=0.0), dict(E_J_sigma=-1.0), dict(d=1.5), dict(N_g=math.inf)])
def test_params_validation(kw):
    base = dict(E_C=1.0, E_J_sigma=1.0)
    base.update(kw)
    with pytest.raises(ValueError):
        CircuitParams(**base)


def test_with_grows_cutoff_for_large_gate_charge():
    p = CircuitParams(1.0, 1.0).with_(N_g=4.0)
    assert p.charge_cutoff == 40


# --- effective Josephson energy ---------------------------------------------


def test_effective_ej_examples():
    assert effective_ej(3.0, 0.0, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert effective_ej(3.0, 0.4, 0.0) == 3.0
    assert effective_ej(3.0, 1.0, 2.0) == pytest.approx(3.0, rel=1e-15)
    assert effective_ej(3.0, 0.3, math.pi) == pytest.approx(0.9, rel=1e-15)


@given(st.floats(0, 10), st.floats(-1, 1), st.floats(-10, 10))
def test_effective_ej_bounds(ej, d, delta):
    val = effective_ej(ej, d, delta)
    assert abs(d) * ej * (1 - 1e-12) <= val <= ej * (1 + 1e-12)


@given(st.floats(0.1, 10), st.floats(-1, 1), st.floats(-3, 3).filter(lambda x: abs(abs(x) - math.pi) > 1e-3))
def test_effective_ej_matches_tangent_form(ej, d, delta):
    half = delta / 2
    ref = ej * abs(math.cos(half)) * math.sqrt(1 + d**2 * math.tan(half) ** 2)
    assert effective_ej(ej, d, delta) == pytest.approx(ref, rel=1e-12)


# --- charging energy ---------------------------------------------------------


def test_charging_energy_conventions():
    spec = CapacitanceSpec(10e-18, 1e-15)
    expected = E**2 / (2 * 1.01e-15) / H / 1e9
    assert charging_energy(spec) == pytest.approx(expected, rel=1e-14)
    assert charging_energy(CapacitanceSpec(10e-18, 1e-15, "eq6")) == pytest.approx(2 * expected, rel=1e-14)


@given(st.floats(1e-18, 1e-12), st.floats(1e-18, 1e-12))
def test_charging_energy_scaling(cg, cj):
    one = charging_energy(CapacitanceSpec(cg, cj))
    assert charging_energy(CapacitanceSpec(2 * cg, 2 * cj)) == pytest.approx(one / 2, rel=1e-13)
    assert charging_energy(CapacitanceSpec(cg, cj, "eq6")) == pytest.approx(2 * one, rel=1e-13)


def test_capacitance_validation():
    with pytest.raises(ValueError):
        CapacitanceSpec(0.0, 1e-15)
    with pytest.raises(ValueError):
        CapacitanceSpec(1e-18, 1e-15, "eq2")


def test_plasma_frequency_square_root_form():
    assert plasma_frequency(CircuitParams(0.5, 2.0)) == pytest.approx(math.sqrt(8.0))


# --- Hamiltonian and spectrum ------------------------------------------------


def test_hamiltonian_small_cutoff_structure():
    # cutoff 1 is below the validated floor; the central 3x3 block has the same entries
    p = CircuitParams(2.0, 3.0)
    m = hamiltonian_matrix(p)
    mid = p.charge_cutoff
    block = m[mid - 1 : mid + 2, mid - 1 : mid + 2]
    assert np.array_equal(np.diag(block), [8.0, 0.0, 8.0])
    assert np.array_equal(np.diag(block, 1), [-1.5, -1.5])
    assert np.array_equal(m, m.T)


def test_diagonal_when_ej_zero():
    m = hamiltonian_matrix(CircuitParams(1.0, 0.0, N_g=0.3))
    assert np.count_nonzero(m - np.diag(np.diag(m))) == 0


def test_free_charge_levels():
    ev = eigensolve(CircuitParams(1.5, 0.0)).eigenvalues
    assert np.allclose(ev[:5], [0, 6, 6, 24, 24])
    ev = eigensolve(CircuitParams(1.5, 0.0, N_g=0.5)).eigenvalues
    assert np.allclose(ev[:2], [1.5, 1.5])


def test_small_gap_at_half_gate_charge():
    ev = eigensolve(CircuitParams(1.0, 1e-3, N_g=0.5)).eigenvalues
    assert abs((ev[1] - ev[0]) - 1e-3) < 1e-2 * 1e-3


def test_spectrum_size_and_order():
    sp = eigensolve(CircuitParams(1.0, 7.0, N_g=0.2))
    assert sp.eigenvalues.size == sp.basis_dim == 41
    assert np.all(np.diff(sp.eigenvalues) >= 0)


def test_bisection_path_matches_full_spectrum():
    p = CircuitParams(1.0, 12.0, N_g=0.37)
    assert np.allclose(eigensolve(p, 5).eigenvalues, eigensolve(p).eigenvalues[:5], rtol=1e-13, atol=1e-12)


@given(st.floats(-3, 3), st.floats(0, 20))
def test_periodicity_and_parity(ng, ej):
    base = CircuitParams(1.0, ej, N_g=ng, charge_cutoff=60)
    lo = eigensolve(base, 5).eigenvalues
    shifted = eigensolve(base.with_(N_g=ng + 1), 5).eigenvalues
    mirrored = eigensolve(base.with_(N_g=-ng), 5).eigenvalues
    scale = np.maximum(np.abs(lo), 1.0)
    assert np.all(np.abs(shifted - lo) <= 1e-9 * scale)
    assert np.all(np.abs(mirrored - lo) <= 1e-9 * scale)


@pytest.mark.parametrize("ratio", [0.2, 1, 5, 10, 50])
def test_cutoff_convergence(ratio):
    p = CircuitParams(1.0, ratio, N_g=0.3)
    a = eigensolve(p, 5).eigenvalues
    b = eigensolve(p.with_(charge_cutoff=2 * p.charge_cutoff), 5).eigenvalues
    assert np.all(np.abs(a - b) <= 1e-9 * np.maximum(np.abs(a), 1.0))


def test_flux_nulls_josephson_coupling():
    a = eigensolve(CircuitParams(1.0, 4.0, delta_flux=math.pi, N_g=0.2)).eigenvalues
    b = eigensolve(CircuitParams(1.0, 0.0, N_g=0.2)).eigenvalues
    assert np.allclose(a, b, atol=1e-12)


def test_sweep_order_and_band_symmetry():
    grid = np.linspace(0, 1, 21)
    spectra = spectrum_sweep(CircuitParams(1.0, 2.0), "N_g", grid, levels=4)
    bands = np.array([s.eigenvalues for s in spectra])
    assert [s.params.N_g for s in spectra] == list(grid)
    assert np.allclose(bands, bands[::-1], atol=1e-10)


def test_sweep_same_with_workers():
    grid = np.linspace(0, 1, 9)
    p = CircuitParams(1.0, 2.0)
    one = spectrum_sweep(p, "N_g", grid, levels=3, workers=1)
    two = spectrum_sweep(p, "N_g", grid, levels=3, workers=2)
    assert all(np.array_equal(a.eigenvalues, b.eigenvalues) for a, b in zip(one, two))


def test_sweep_validation():
    with pytest.raises(ValueError):
        spectrum_sweep(CircuitParams(1.0, 1.0), "E_C", [1.0])
    with pytest.raises(ValueError):
        spectrum_sweep(CircuitParams(1.0, 1.0), "N_g", [])


def test_dispersion_grows_as_flux_nulls_coupling():
    p = CircuitParams(1.0, 5.0)
    disp = [charge_dispersion(p.with_(delta_flux=float(x))) for x in np.linspace(0, math.pi, 11)]
    assert all(b > a for a, b in zip(disp, disp[1:]))


def test_dispersion_examples():
    assert charge_dispersion(CircuitParams(1.0, 0.0)) == pytest.approx(1.0, abs=1e-12)
    values = [charge_dispersion(CircuitParams(1.0, r)) for r in (0.2, 1, 5, 10, 50)]
    assert all(v >= 0 for v in values)
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3 * values[1]


def test_dispersion_level_validation():
    with pytest.raises(ValueError):
        charge_dispersion(CircuitParams(1.0, 1.0), m=41)


# --- Mathieu mapping -----------------------------------------------------------


def test_to_mathieu_examples():
    p = to_mathieu(CircuitParams(2.0, 2.0), 0.5)
    assert (p.delta, p.epsilon, p.omega, p.gamma) == (1.0, 1.0, 2.0, 0.0)
    p = to_mathieu(CircuitParams(2.0, 4.0), 2.0)
    assert (p.delta, p.epsilon) == (4.0, 2.0)
    assert to_mathieu(CircuitParams(2.0, 0.0), 1.0).epsilon == 0.0


def test_k_index_examples():
    assert [k_index(m, 0.25) for m in range(5)] == [0, -1, 1, -2, 2]
    assert all(isinstance(k_index(m, g), int) for m in range(6) for g in np.linspace(0, 1, 101))
    with pytest.raises(ValueError):
        k_index(-1, 0.2)


def test_k_index_jump_locations():
    # regression data from a 101-point scan: k only changes where 2 N_g crosses an integer
    grid = np.linspace(0, 1, 101)
    jumps = set()
    for m in range(6):
        ks = [k_index(m, g) for g in grid]
        jumps |= {round(float(grid[i]), 2) for i in range(1, grid.size) if ks[i] != ks[i - 1]}
    assert jumps == {0.01, 0.5, 1.0}


def test_mathieu_order_folds_gate_charge():
    for g in (0.3, 1.3, -0.3, 0.7):
        assert mathieu_order(0, g) == pytest.approx(0.6, abs=1e-15)


def test_bands_without_coupling_are_exact():
    p = CircuitParams(1.3, 0.0)
    for g in (0.1, 0.3, 0.45, 0.8):
        ev = eigensolve(p.with_(N_g=g)).eigenvalues
        for m in range(4):
            assert abs(band_energy_mathieu(m, g, p) - ev[m]) <= 1e-9 * max(ev[m], 1.0)


@pytest.mark.parametrize("ratio", [0.2, 1, 5, 20])
@pytest.mark.parametrize("g", [0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0, -0.35, 2.2])
def test_bands_against_eigensolve(ratio, g):
    p = CircuitParams(1.0, ratio, N_g=g, charge_cutoff=40)
    ev = eigensolve(p, 4).eigenvalues
    for m in range(4):
        assert abs(band_energy_mathieu(m, g, p) - ev[m]) <= 1e-9 * max(abs(ev[m]), 1.0)


def test_mathieu_band_module_boundary():
    # the mapping q = -E_J / (2 E_C) is the only link between the two modules
    assert circuits.band_energy_mathieu(0, 0.2, CircuitParams(2.0, 0.0)) == pytest.approx(2.0 * 0.4**2)

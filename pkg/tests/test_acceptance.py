"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured figures
before asserting, so ``pytest -v`` shows the numbers either way.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from cqed_tongues import cli, constants
from cqed_tongues.blackbox import CqedParams, RlcBranch, RlcNetwork, cqed_spectrum, find_modes
from cqed_tongues.circuits import CircuitParams, band_energy_mathieu, charge_dispersion, eigensolve
from cqed_tongues.dynamics import PendulumParams, chaos_indicator, integrate_pendulum, pendulum_energy, poincare_section
from cqed_tongues.mathieu import MARGINAL, UNSTABLE, IntegratorControls, OscState
from cqed_tongues.stability import SweepSpec, sweep, tongue_boundary

CONFIGS = Path(__file__).resolve().parent.parent / "demos" / "configs"
FULL = dict(delta_range=(0.0, 6.0, 400), epsilon_range=(0.0, 3.0, 200), omega=2.0)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def full_grid():
    start = time.perf_counter()
    grid = sweep(SweepSpec(gamma=0.0, method="floquet", **FULL))
    return grid, time.perf_counter() - start


def test_criterion_1_tongue_tips(report, full_grid):
    grid, elapsed = full_grid
    points = tongue_boundary(grid)
    tips = {}
    for centre in (1.0, 4.0):
        near = [e for d, e in points if abs(d - centre) <= 0.02]
        tips[centre] = min(near) if near else np.inf
    ok = all(v < 0.03 for v in tips.values())
    report(1, ok, f"tip epsilon at delta~1: {tips[1.0]:.4g}, delta~4: {tips[4.0]:.4g} (< 0.03); sweep {elapsed:.1f} s")


def test_criterion_2_damping_suppression(report, full_grid):
    counts = [full_grid[0].count(UNSTABLE)]
    for gamma in (0.05, 0.1, 0.2):
        counts.append(sweep(SweepSpec(gamma=gamma, **FULL)).count(UNSTABLE))
    ok = counts[2] < counts[0] and all(b <= a for a, b in zip(counts, counts[1:]))
    report(2, ok, f"unstable cells at gamma 0/0.05/0.1/0.2: {counts}")


def test_criterion_3_classifier_agreement(report):
    start = time.perf_counter()
    grid = sweep(SweepSpec(method="both", **FULL))
    frac = grid.agreement_fraction()
    marginal = int(np.sum(grid.floquet_labels == MARGINAL))
    report(3, frac >= 0.97, f"agreement {100 * frac:.2f}% of non-marginal cells ({marginal} marginal); {time.perf_counter() - start:.0f} s")


def test_criterion_4_band_oracle(report):
    start = time.perf_counter()
    worst = 0.0
    for ratio in (0.2, 1.0, 5.0):
        for g in (0.1, 0.25, 0.4):
            p = CircuitParams(1.0, ratio, N_g=g)
            ev = eigensolve(p, 3).eigenvalues
            for m in range(3):
                worst = max(worst, abs(band_energy_mathieu(m, g, p) - ev[m]) / abs(ev[m]))
    worst_free = 0.0
    for g in (0.1, 0.25, 0.4):
        p = CircuitParams(1.0, 0.0, N_g=g)
        ev = eigensolve(p, 3).eigenvalues
        for m in range(3):
            worst_free = max(worst_free, abs(band_energy_mathieu(m, g, p) - ev[m]) / abs(ev[m]))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-4 and worst_free < 1e-9 and elapsed < 10
    report(4, ok, f"max rel error {worst:.2e} (< 1e-4), at E_J=0 {worst_free:.2e} (< 1e-9); {elapsed:.2f} s")


def test_criterion_5_dispersion(report):
    ratios = (0.2, 1, 5, 10, 50)
    disp = [charge_dispersion(CircuitParams(1.0, r)) for r in ratios]
    ok = disp[-1] < 1e-3 * disp[1] and all(b <= a for a, b in zip(disp, disp[1:]))
    detail = ", ".join(f"{r}: {d:.3e}" for r, d in zip(ratios, disp))
    report(5, ok, f"ground-band dispersion by E_J/E_C {{{detail}}}")


def test_criterion_6_black_box(report):
    rng = np.random.default_rng(2024)
    worst_z = 0.0
    counts_ok = True
    for _ in range(5):
        n = int(rng.integers(1, 7))
        while True:
            try:
                net = RlcNetwork(
                    [RlcBranch(10 ** rng.uniform(-13.5, -11.5), 10 ** rng.uniform(-9.5, -7.5)) for _ in range(n)]
                )
                break
            except ValueError:
                continue
        modes = find_modes(net)
        counts_ok &= len(modes) == n
        ref = sorted((b.resonance, b.characteristic_impedance) for b in net.branches)
        for m, (_, z) in zip(modes.modes, ref):
            worst_z = max(worst_z, abs(m.z_eff - z) / z)

    p = CqedParams(CircuitParams(1.0, 10.0, N_g=0.2, charge_cutoff=10), 2 * np.pi * 6e9, 400e-15, 0.0, fock_cutoff=6)
    qubit = eigensolve(p.circuit).eigenvalues
    photon = constants.angular_to_ghz(p.omega_r) * np.arange(p.fock_cutoff + 1)
    expected = np.sort((qubit[:, None] + photon[None, :]).ravel())
    worst_sum = float(np.max(np.abs(cqed_spectrum(p) - expected) / np.maximum(np.abs(expected), 1.0)))
    ok = worst_z < 1e-9 and counts_ok and worst_sum < 1e-10
    report(6, ok, f"z_eff rel error {worst_z:.2e} (< 1e-9), mode counts match: {counts_ok}, tensor sum {worst_sum:.2e} (< 1e-10)")


def test_criterion_7_pendulum(report):
    p = PendulumParams(1.0, 0.0)
    times = p.period * np.arange(1001)
    tr = integrate_pendulum(p, OscState(2.0, 0.3), times[-1], IntegratorControls(rtol=1e-12, atol=1e-14), times)
    e = pendulum_energy(p, tr.samples_x, tr.samples_v)
    drift = float(np.max(np.abs(e - e[0])))
    init = OscState(1.0, 2.5)
    regular = chaos_indicator(poincare_section(PendulumParams(1.0, 0.1), init, 2000), 64)
    chaotic = chaos_indicator(poincare_section(PendulumParams(1.0, 2.0), init, 2000), 64)
    ratio = chaotic / regular
    ok = drift < 1e-8 and ratio > 10
    report(7, ok, f"energy drift {drift:.2e} (< 1e-8); occupancy {chaotic:.4f}/{regular:.4f} = {ratio:.1f} (> 10)")


DETERMINISM = {
    "tongue": ["--config", str(CONFIGS / "tongue.ini")],
    "spectrum": ["--config", str(CONFIGS / "transmon.ini")],
    "bands": ["--config", str(CONFIGS / "transmon.ini")],
    "bbq": ["--config", str(CONFIGS / "bbq.ini")],
    "poincare": ["--config", str(CONFIGS / "poincare.ini"), "--seed", "5"],
    "mc": ["--config", str(CONFIGS / "mc.ini"), "--seed", "3"],
    "charvals": [],
}


def test_criterion_8_determinism(report, tmp_path):
    mismatched = []
    for command, args in DETERMINISM.items():
        digests = []
        for workers in (1, 4):
            out = tmp_path / f"{command}-{workers}"
            code = cli.main([command, "--out", str(out), "--workers", str(workers), *args])
            if code != 0:
                mismatched.append(f"{command} exit {code}")
                break
            digests.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        if len(digests) == 2 and (not digests[0] or digests[0] != digests[1]):
            mismatched.append(command)
    ok = not mismatched
    report(8, ok, f"{len(DETERMINISM)} subcommands byte-identical across 1 and 4 workers" if ok else f"differences: {mismatched}")

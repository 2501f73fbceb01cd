"""Command-line front end.

Each subcommand reads an INI-style configuration (``key = value`` lines
grouped in sections), applies ``--set section.key=value`` overrides and the
global flags, runs one computation and writes CSV (and PGM) files into the
output directory.

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures.  Files written by a failed run are removed.
"""

import argparse
import configparser
import math
import sys
import warnings
from pathlib import Path

import numpy as np
from numba.core.errors import NumbaWarning

from . import blackbox, circuits, dynamics, mathieu, stability
from ._parallel import ordered_map
from .io import write_csv
from .tridiag import EigenSolverError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

NUMERICAL_ERRORS = (
    mathieu.IntegrationError,
    mathieu.ConvergenceError,
    EigenSolverError,
    blackbox.ModeFindingError,
    blackbox.SingularityError,
)


class ConfigError(ValueError):
    pass


def _as_int(text):
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _as_float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


# section -> key -> (parser, default); None defaults are filled in by the subcommand
SCHEMA = {
    "tongue": {
        "delta_min": (_as_float, 0.0),
        "delta_max": (_as_float, 6.0),
        "delta_count": (_as_int, 400),
        "epsilon_min": (_as_float, 0.0),
        "epsilon_max": (_as_float, 3.0),
        "epsilon_count": (_as_int, 200),
        "omega": (_as_float, 2.0),
        "gamma": (_as_float, 0.0),
        "method": (str, "floquet"),
        "boundary_tol": (_as_float, 1e-4),
    },
    "classify": {
        "threshold": (_as_float, 1e3),
        "horizon_periods": (_as_float, 200.0),
        "marginal_tol": (_as_float, 1e-6),
        "x0": (_as_float, 1.0),
        "v0": (_as_float, 0.0),
        "rtol": (_as_float, 1e-10),
        "atol": (_as_float, 1e-12),
    },
    "circuit": {
        "e_c": (_as_float, 1.0),
        "e_j_sigma": (_as_float, 1.0),
        "d": (_as_float, 0.0),
        "n_g": (_as_float, 0.0),
        "delta_flux": (_as_float, 0.0),
        "charge_cutoff": (_as_int, None),
    },
    "spectrum": {
        "axis": (str, "N_g"),
        "min": (_as_float, -1.0),
        "max": (_as_float, 1.0),
        "count": (_as_int, 101),
        "levels": (_as_int, 5),
    },
    "bands": {
        "n_g_min": (_as_float, 0.0),
        "n_g_max": (_as_float, 1.0),
        "n_g_count": (_as_int, 101),
        "levels": (_as_int, 3),
    },
    "bbq": {
        "netlist": (str, None),
        "omega_min": (_as_float, None),
        "omega_max": (_as_float, None),
        "omega_count": (_as_int, 2000),
    },
    "poincare": {
        "delta": (_as_float, 1.0),
        "epsilon": (_as_float, 0.5),
        "omega": (_as_float, 2.0),
        "gamma": (_as_float, 0.0),
        "n_periods": (_as_int, 500),
        "n_traj": (_as_int, 16),
        "rtol": (_as_float, 1e-10),
        "atol": (_as_float, 1e-12),
    },
    "mc": {
        "rel_sigma_ej": (_as_float, 0.05),
        "rel_sigma_ec": (_as_float, 0.05),
        "samples": (_as_int, 1000),
        "e_k": (_as_float, 0.25),
        "omega": (_as_float, 2.0),
        "gamma": (_as_float, 0.0),
    },
    "charvals": {
        "q_min": (_as_float, 0.0),
        "q_max": (_as_float, 5.0),
        "q_count": (_as_int, 101),
        "n_max": (_as_int, 4),
    },
}

SECTIONS_FOR = {
    "tongue": ("tongue", "classify"),
    "spectrum": ("circuit", "spectrum"),
    "bands": ("circuit", "bands"),
    "bbq": ("bbq",),
    "poincare": ("poincare",),
    "mc": ("circuit", "mc", "classify"),
    "charvals": ("charvals",),
}


class RunConfig:
    """Validated settings for one subcommand.

    ``values[section][key]`` holds typed values with defaults filled in.
    """

    def __init__(self, command, values, out, workers, seed, base_dir):
        self.command = command
        self.values = values
        self.out = out
        self.workers = workers
        self.seed = seed
        self.base_dir = base_dir

    def __getitem__(self, section):
        return self.values[section]


def load_config(command, path=None, overrides=(), out=".", workers=1, seed=None):
    """Parse and type-check the configuration for ``command``.

    Raises
    ------
    ConfigError
        Naming the offending ``section.key`` for any bad value.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str.lower
    base_dir = Path(".")
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
        base_dir = path.parent
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigError(f"--set expects section.key=value, got {item!r}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, name.strip().lower(), value.strip())

    wanted = SECTIONS_FOR[command]
    values = {}
    for section in wanted:
        schema = SCHEMA[section]
        typed = {}
        present = dict(parser.items(section)) if parser.has_section(section) else {}
        for key in present:
            if key not in schema:
                raise ConfigError(f"{section}.{key}: unknown setting")
        for key, (conv, default) in schema.items():
            if key in present:
                try:
                    typed[key] = conv(present[key])
                except ValueError as exc:
                    raise ConfigError(f"{section}.{key}: {exc}") from None
            else:
                typed[key] = default
        values[section] = typed
    if workers is None or workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {workers}")
    if seed is not None and not 0 <= seed < 2**64:
        raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {seed}")
    return RunConfig(command, values, Path(out), workers, seed, base_dir)


def _invariant(section, fn):
    """Build a domain object, re-raising its validation error against ``section``."""
    try:
        return fn()
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{section}: {exc}") from None


def _criteria(cfg):
    c = cfg["classify"]
    return _invariant(
        "classify",
        lambda: mathieu.ClassifyCriteria(
            threshold=c["threshold"],
            horizon_periods=c["horizon_periods"],
            marginal_tol=c["marginal_tol"],
            x0=c["x0"],
            v0=c["v0"],
            controls=mathieu.IntegratorControls(rtol=c["rtol"], atol=c["atol"]),
        ),
    )


def _circuit(cfg, **extra):
    c = cfg["circuit"]
    return _invariant(
        "circuit",
        lambda: circuits.CircuitParams(
            E_C=c["e_c"],
            E_J_sigma=c["e_j_sigma"],
            d=c["d"],
            N_g=c["n_g"],
            delta_flux=c["delta_flux"],
            charge_cutoff=c["charge_cutoff"],
            **extra,
        ),
    )


def _grid(section, lo, hi, count):
    if count < 1:
        raise ConfigError(f"{section}: point count must be >= 1, got {count}")
    if count == 1:
        if lo != hi:
            raise ConfigError(f"{section}: a single point needs min == max")
        return np.array([lo])
    if not lo < hi:
        raise ConfigError(f"{section}: min must be < max")
    return np.linspace(lo, hi, count)


class _Outputs:
    """Track files written by a run so a failure can remove them."""

    def __init__(self, out_dir):
        self.dir = Path(out_dir)
        self.written = []

    def path(self, name):
        p = self.dir / name
        self.written.append(p)
        return p

    def cleanup(self):
        for p in self.written:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def cmd_tongue(cfg, outputs):
    t = cfg["tongue"]
    spec = _invariant(
        "tongue",
        lambda: stability.SweepSpec(
            delta_range=(t["delta_min"], t["delta_max"], t["delta_count"]),
            epsilon_range=(t["epsilon_min"], t["epsilon_max"], t["epsilon_count"]),
            omega=t["omega"],
            gamma=t["gamma"],
            method=t["method"],
            criteria=_criteria(cfg),
        ),
    )
    if not t["boundary_tol"] > 0:
        raise ConfigError("tongue.boundary_tol: must be > 0")
    grid = stability.sweep(spec, workers=cfg.workers)
    stability.write_grid_csv(grid, outputs.path("tongue.csv"))
    stability.write_grid_pgm(grid, outputs.path("tongue.pgm"))
    points = stability.tongue_boundary(grid, t["boundary_tol"]) if grid.floquet_labels is not None else []
    stability.write_boundary_csv(points, outputs.path("boundary.csv"))


def cmd_spectrum(cfg, outputs):
    s = cfg["spectrum"]
    axis = {"n_g": "N_g", "delta_flux": "delta_flux"}.get(s["axis"].lower())
    if axis is None:
        raise ConfigError(f"spectrum.axis: must be N_g or delta_flux, got {s['axis']!r}")
    grid = _grid("spectrum", s["min"], s["max"], s["count"])
    extent = max(abs(grid[0]), abs(grid[-1])) if axis == "N_g" else 0.0
    params = _circuit(cfg)
    if axis == "N_g":
        # size the charge basis for the largest gate charge on the grid
        params = _invariant("circuit", lambda: params.with_(N_g=float(extent)))
    if not 1 <= s["levels"] <= params.basis_dim:
        raise ConfigError(f"spectrum.levels: must lie in [1, {params.basis_dim}]")
    spectra = circuits.spectrum_sweep(params, axis, grid, levels=s["levels"], workers=cfg.workers)
    rows = []
    for g, sp in zip(grid, spectra):
        for m, e in enumerate(sp.eigenvalues):
            rows.append((float(g), m, float(e)))
    write_csv(outputs.path("spectrum.csv"), ["axis_value", "level_index", "energy_ghz"], rows)


def _bands_row(args):
    params, g, levels = args
    p = params.with_(N_g=float(g))
    exact = circuits.eigensolve(p, levels).eigenvalues
    out = []
    for m in range(levels):
        mm = circuits.band_energy_mathieu(m, float(g), p)
        denom = max(abs(exact[m]), 1e-300)
        out.append((float(g), m, mm, float(exact[m]), abs(mm - exact[m]) / denom))
    return out


def cmd_bands(cfg, outputs):
    b = cfg["bands"]
    grid = _grid("bands", b["n_g_min"], b["n_g_max"], b["n_g_count"])
    params = _circuit(cfg)
    extent = float(max(abs(grid[0]), abs(grid[-1])))
    params = _invariant("circuit", lambda: params.with_(N_g=extent))
    if b["levels"] < 1:
        raise ConfigError("bands.levels: must be >= 1")
    chunks = ordered_map(_bands_row, [(params, g, b["levels"]) for g in grid], cfg.workers)
    rows = [r for chunk in chunks for r in chunk]
    write_csv(outputs.path("bands.csv"), ["n_g", "level", "mathieu", "eigensolve", "rel_error"], rows)


def cmd_bbq(cfg, outputs):
    b = cfg["bbq"]
    if b["netlist"] is None:
        raise ConfigError("bbq.netlist: required")
    path = Path(b["netlist"])
    if not path.is_absolute():
        path = cfg.base_dir / path
    if not path.is_file():
        raise ConfigError(f"bbq.netlist: file {path} does not exist")
    net = _invariant("bbq.netlist", lambda: blackbox.load_netlist(path))
    res = [br.resonance for br in net.branches]
    lo = b["omega_min"] if b["omega_min"] is not None else 0.5 * min(res)
    hi = b["omega_max"] if b["omega_max"] is not None else 1.5 * max(res)
    if not 0 < lo < hi:
        raise ConfigError("bbq: need 0 < omega_min < omega_max")
    if b["omega_count"] < 2:
        raise ConfigError("bbq.omega_count: must be >= 2")
    scan = blackbox.admittance_scan(net, np.linspace(lo, hi, b["omega_count"]))
    write_csv(outputs.path("yscan.csv"), ["omega_rad_s", "re_y_s", "im_y_s"], scan)
    modes = blackbox.find_modes(net)
    rows = [(k, m.omega, m.z_eff) for k, m in enumerate(modes.modes)]
    write_csv(outputs.path("modes.csv"), ["mode_index", "omega_rad_s", "z_eff_ohm"], rows)


def cmd_poincare(cfg, outputs):
    p = cfg["poincare"]
    params = _invariant(
        "poincare", lambda: dynamics.PendulumParams(p["delta"], p["epsilon"], p["omega"], p["gamma"])
    )
    if p["n_periods"] < 0:
        raise ConfigError("poincare.n_periods: must be >= 0")
    if p["n_traj"] < 1:
        raise ConfigError("poincare.n_traj: must be >= 1")
    controls = _invariant("poincare", lambda: mathieu.IntegratorControls(rtol=p["rtol"], atol=p["atol"]))
    inits = dynamics.initial_ensemble(p["n_traj"], seed=cfg.seed)
    sections = dynamics.poincare_ensemble(params, inits, p["n_periods"], controls, cfg.workers)
    dynamics.write_sections_csv(sections, outputs.path("section.csv"))


def cmd_mc(cfg, outputs):
    m = cfg["mc"]
    spec = _invariant(
        "mc",
        lambda: stability.McSpec(
            base=_circuit(cfg),
            rel_sigma_ej=m["rel_sigma_ej"],
            rel_sigma_ec=m["rel_sigma_ec"],
            samples=m["samples"],
            seed=0 if cfg.seed is None else cfg.seed,
            drive=(m["e_k"], m["omega"], m["gamma"]),
            criteria=_criteria(cfg),
        ),
    )
    result = stability.fabrication_scan(spec, workers=cfg.workers)
    stability.write_mc_csv(result, outputs.path("mc.csv"))
    print(f"unstable_fraction={result.unstable_fraction:.17g} rejections={result.rejections}")


def cmd_charvals(cfg, outputs):
    c = cfg["charvals"]
    grid = _grid("charvals", c["q_min"], c["q_max"], c["q_count"])
    if c["n_max"] < 0:
        raise ConfigError("charvals.n_max: must be >= 0")
    n_max = c["n_max"]
    header = ["q"] + [f"a{n}" for n in range(n_max + 1)] + [f"b{n}" for n in range(1, n_max + 1)]
    rows = []
    for q in grid:
        a_vals = []
        b_vals = []
        for n in range(n_max + 1):
            a, b = mathieu.char_pair(n, float(q))
            a_vals.append(a.value)
            if b is not None:
                b_vals.append(b.value)
        rows.append([float(q)] + a_vals + b_vals)
    write_csv(outputs.path("charvals.csv"), header, rows)


COMMANDS = {
    "tongue": cmd_tongue,
    "spectrum": cmd_spectrum,
    "bands": cmd_bands,
    "bbq": cmd_bbq,
    "poincare": cmd_poincare,
    "mc": cmd_mc,
    "charvals": cmd_charvals,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cqed-tongues",
        description="Parametric resonance and circuit spectra: data files for stability charts and spectra.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="computation to run")
    parser.add_argument("--config", help="INI-style configuration file")
    parser.add_argument("--out", default=".", help="output directory (created if missing)")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers")
    parser.add_argument("--seed", type=int, default=None, help="64-bit seed for random streams")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a configuration value (repeatable)",
    )
    return parser


def main(argv=None):
    # the threading-layer probe warns about optional libraries; it does not affect results
    warnings.filterwarnings("ignore", message=".*threading layer", category=NumbaWarning)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = load_config(args.command, args.config, args.overrides, args.out, args.workers, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg.out.mkdir(parents=True, exist_ok=True)
    outputs = _Outputs(cfg.out)
    try:
        COMMANDS[args.command](cfg, outputs)
    except NUMERICAL_ERRORS as exc:
        outputs.cleanup()
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        outputs.cleanup()
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BaseException:
        outputs.cleanup()
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

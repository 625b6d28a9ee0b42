"""Command-line driver: spectra, phase diagrams, sweeps, winding numbers,
Lyapunov exponents, duality checks, time evolution and self-validation.

Output conventions: CSV with a mandatory header row, comma separators,
LF line endings and floats formatted %.12e, so identical invocations are
byte-identical.  JSON reports carry {meta, results} with meta echoing the
fully resolved configuration.  Exit codes: 0 success, 1 numeric failure,
2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from .cocycle import lyapunov_closed_form, lyapunov_numeric
from .errors import PuamoError
from .params import GOLDEN_MEAN, TWO_PI, derived_constants, walk_params
from .spectrum import eigendecompose, spectral_distance
from .svgplot import svg_heatmap, svg_scatter
from .sweep import run_sweep
from .validate import run_validation
from .walk import build_dual_walk, build_walk, delta_state, evolve
from .winding import gap_points, winding_number


class UsageError(Exception):
    """Bad flag combination or malformed value; exits with code 2."""


_DEFAULTS = {
    "l1": 0.5,
    "l2": 0.25,
    "phi": GOLDEN_MEAN,
    "theta": 0.0,
    "eps": 0.0,
    "eta": 0.0,
    "N": None,  # per-command default
    "bc": "periodic",
    "format": "csv",
    "jobs": 1,
    "seed": 0,
    "out": None,
    "svg": None,
    "tol_circle": 1e-6,
}

_CONFIG_KEYS = {
    "l1": float, "l2": float, "phi": float, "theta": float, "eps": float,
    "eta": float, "N": int, "bc": str, "format": str, "jobs": int,
    "seed": int, "grid.eta": str, "grid.eps": str, "out.path": str,
    "out.svg": str, "out.format": str, "tol_circle": float,
}


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{value:.12e}"
    return str(value)


def _write_rows(cfg, header, rows):
    out = io.StringIO()
    if cfg["format"] == "csv":
        out.write(",".join(header) + "\n")
        for row in rows:
            out.write(",".join(_fmt(v) for v in row) + "\n")
    else:
        payload = {
            "meta": _meta(cfg),
            "results": [dict(zip(header, (_json_value(v) for v in row))) for row in rows],
        }
        out.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    _emit(cfg, out.getvalue())


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    return str(v)


def _emit(cfg, text: str):
    if cfg.get("out"):
        with open(cfg["out"], "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(cfg) -> dict:
    return {k: _json_value(v) for k, v in sorted(cfg.items()) if v is not None}


def _parse_range(spec: str) -> list[float]:
    """'start:stop:count' inclusive grid, or comma-separated values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:count, got {spec!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError(f"range count must be >= 1, got {count}")
        return [float(x) for x in np.linspace(start, stop, count)]
    values = [float(x) for x in spec.split(",") if x.strip() != ""]
    if not values:
        raise UsageError(f"empty value list: {spec!r}")
    return values


def _read_config(path: str) -> dict:
    cfg = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in _CONFIG_KEYS:
                    raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
                cfg[key] = _CONFIG_KEYS[key](value)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return cfg


def _resolve(ns, default_n: int) -> dict:
    """defaults < config file < explicit flags."""
    cfg = dict(_DEFAULTS)
    if getattr(ns, "config", None):
        file_cfg = _read_config(ns.config)
        for key, value in file_cfg.items():
            if key == "out.path":
                cfg["out"] = value
            elif key == "out.svg":
                cfg["svg"] = value
            elif key == "out.format":
                cfg["format"] = value
            else:
                cfg[key] = value
    for key in ("l1", "l2", "phi", "theta", "eps", "eta", "N", "bc", "format",
                "jobs", "seed", "out", "svg", "tol_circle"):
        value = getattr(ns, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["N"] is None:
        cfg["N"] = default_n
    if cfg["bc"] not in ("periodic", "open"):
        raise UsageError(f"bc must be periodic or open, got {cfg['bc']!r}")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {cfg['format']!r}")
    if not (0.0 < cfg["phi"] < 1.0):
        raise UsageError(f"phi must lie in (0, 1), got {cfg['phi']}")
    if cfg["N"] < 2:
        raise UsageError(f"N must be >= 2, got {cfg['N']}")
    return cfg


def _ring_params(cfg):
    """Walk parameters with N snapped to a convergent denominator and phi
    snapped to the matching rational approximant p/N."""
    base = walk_params(cfg["l1"], cfg["l2"], phi=cfg["phi"], theta=cfg["theta"],
                       eps=cfg["eps"], eta=cfg["eta"])
    n_req = int(cfg["N"])
    if base.freq.has_denominator(n_req):
        n_use = n_req
    else:
        denoms = [q for q in base.freq.denominators() if q >= 2]
        n_use = min(denoms, key=lambda q: (abs(q - n_req), q))
        warnings.warn(f"snapping N={n_req} to the nearest convergent denominator {n_use}")
    snapped = base.replace(phi=base.freq.approximant(n_use)) if base.phi != base.freq.approximant(n_use) else base
    cfg["N"] = n_use
    cfg["phi_ring"] = snapped.phi
    return snapped, n_use


def cmd_spectrum(ns) -> int:
    cfg = _resolve(ns, default_n=610)
    params, n_cells = _ring_params(cfg)
    spec = eigendecompose(build_walk(params, n_cells, cfg["bc"], warn=False),
                          want_vectors=True, tol_circle=cfg["tol_circle"])
    rows = [
        (z.real, z.imag, abs(z), float(np.angle(z)), g, bool(oc))
        for z, g, oc in zip(spec.eigenvalues, spec.fractal_dims, spec.on_circle)
    ]
    _write_rows(cfg, ["re", "im", "abs", "arg", "fractal_dim", "on_circle"], rows)
    if cfg["svg"]:
        svg_scatter(cfg["svg"], spec.eigenvalues, spec.fractal_dims)
    return 0


def cmd_phase_diagram(ns) -> int:
    cfg = _resolve(ns, default_n=89)
    grid_eta = _parse_range(ns.grid_eta or cfg.get("grid.eta") or "-0.5:0.5:21")
    grid_eps = _parse_range(ns.grid_eps or cfg.get("grid.eps") or "-0.5:0.5:21")
    if len(grid_eta) > 128 or len(grid_eps) > 128:
        raise UsageError("grid axes are limited to 128 points each")
    params, n_cells = _ring_params(cfg)
    grid = run_sweep(params, ("eta", grid_eta), ("eps", grid_eps), n_cells,
                     bc=cfg["bc"], jobs=cfg["jobs"], tol_circle=1e-4)
    rows = []
    for i, eta in enumerate(grid.axis1_values):
        for j, eps in enumerate(grid.axis2_values):
            cell = grid.cell(i, j)
            rows.append((eta, eps, cell.mean_fractal_dim, cell.frac_on_circle,
                         cell.lyap_left, cell.lyap_right))
    _write_rows(cfg, ["eta", "eps", "mean_fractal_dim", "frac_on_circle",
                      "lyap_left", "lyap_right"], rows)
    if cfg["svg"]:
        curves = []
        eps_dense = np.linspace(min(grid_eps), max(grid_eps), 201)
        for sign in (+1.0, -1.0):
            curve = []
            for eps in eps_dense:
                loc = lyapunov_closed_form(params.replace(eps=float(eps), eta=0.0)).overall
                curve.append((float(eps), sign * loc / TWO_PI))
            curves.append(curve)
        svg_heatmap(cfg["svg"], grid.grid_of("mean_fractal_dim"),
                    x_values=grid_eps, y_values=grid_eta, overlays=curves)
    return 0


def cmd_spectrum_sweep(ns) -> int:
    cfg = _resolve(ns, default_n=233)
    if ns.sweep not in ("eps", "eta"):
        raise UsageError(f"--sweep must be eps or eta, got {ns.sweep!r}")
    if not ns.values:
        raise UsageError("--values is required (range start:stop:count or comma list)")
    values = _parse_range(ns.values)
    params, n_cells = _ring_params(cfg)
    dc = derived_constants(params)
    rows = []
    for value in values:
        spec = eigendecompose(
            build_walk(params.replace(**{ns.sweep: float(value)}), n_cells,
                       cfg["bc"], warn=False),
            want_vectors=True, tol_circle=cfg["tol_circle"])
        for z, g in zip(spec.eigenvalues, spec.fractal_dims):
            rows.append((value, z.real, z.imag, abs(z), g,
                         dc.L_sharp / TWO_PI, dc.eps0, dc.eta0))
    _write_rows(cfg, ["sweep_value", "re", "im", "abs", "fractal_dim",
                      "L_sharp_over_2pi", "eps0", "eta0"], rows)
    return 0


def cmd_winding(ns) -> int:
    cfg = _resolve(ns, default_n=89)
    params, n_cells = _ring_params(cfg)
    eps_values = _parse_range(ns.eps_values) if ns.eps_values else [0.05, 0.18, 0.25]
    reference = eigendecompose(build_walk(params.replace(eps=0.0), n_cells, warn=False))
    points = gap_points(reference, ns.gaps)
    if ns.gap_index is not None:
        if not (0 <= ns.gap_index < len(points)):
            raise UsageError(f"--gap-index {ns.gap_index} out of range ({len(points)} gaps)")
        points = points[ns.gap_index:ns.gap_index + 1]
    rows = []
    for z in points:
        for eps in eps_values:
            res = winding_number(complex(z), float(eps), params, n_cells,
                                 m_theta=ns.m_theta)
            rows.append((eps, z.real, z.imag, res.raw, res.value, res.residual))
    _write_rows(cfg, ["eps", "z_re", "z_im", "winding_raw", "winding_int",
                      "residual"], rows)
    return 0


def cmd_lyapunov(ns) -> int:
    cfg = _resolve(ns, default_n=233)
    params, n_cells = _ring_params(cfg)
    dc = derived_constants(params)
    cf = lyapunov_closed_form(params)
    rows = [
        ("lambda0", dc.lambda0), ("L", dc.L), ("L_sharp", dc.L_sharp),
        ("eps0", dc.eps0), ("eta0", dc.eta0),
        ("closed_right", cf.right), ("closed_left", cf.left),
        ("closed_overall", cf.overall),
        ("closed_dual_right", cf.dual_right), ("closed_dual_left", cf.dual_left),
        ("closed_dual_overall", cf.dual_overall),
    ]
    if ns.numeric:
        eigs = np.linalg.eigvals(build_walk(params, n_cells, warn=False).matrix)
        radii = np.abs(eigs)
        z = complex(eigs[int(np.argmin(np.abs(radii - np.median(radii))))])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            right = lyapunov_numeric(z, params, n_steps=ns.n_steps,
                                     n_phases=ns.n_phases, direction="right")
            left = lyapunov_numeric(z, params, n_steps=ns.n_steps,
                                    n_phases=ns.n_phases, direction="left")
        rows += [
            ("z_re", z.real), ("z_im", z.imag),
            ("numeric_right", right.value), ("numeric_right_stderr", right.std_error),
            ("numeric_left", left.value), ("numeric_left_stderr", left.std_error),
        ]
    _write_rows(cfg, ["quantity", "value"], rows)
    return 0


def cmd_duality_check(ns) -> int:
    cfg = _resolve(ns, default_n=21)
    params, n_cells = _ring_params(cfg)
    walk_eigs = np.linalg.eigvals(build_walk(params, n_cells, warn=False).matrix)
    dual_eigs = np.linalg.eigvals(build_dual_walk(params, n_cells).matrix)
    distance = spectral_distance(walk_eigs, dual_eigs)
    threshold = 1e-8
    payload = {
        "meta": _meta(cfg),
        "results": [{
            "name": "duality_spectra",
            "measured": distance,
            "threshold": threshold,
            "passed": bool(distance < threshold),
        }],
    }
    _emit(cfg, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return 0 if distance < threshold else 1


def cmd_evolve(ns) -> int:
    cfg = _resolve(ns, default_n=610)
    params, n_cells = _ring_params(cfg)
    if ns.steps < 0:
        raise UsageError(f"--steps must be >= 0, got {ns.steps}")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        records = evolve(params, delta_state(n_cells), ns.steps, bc=cfg["bc"])
    _write_rows(cfg, ["step", "second_moment", "participation"], records)
    return 0


def cmd_validate(ns) -> int:
    cfg = _resolve(ns, default_n=34)
    results = run_validation(quick=ns.quick, perturb=ns.perturb, seed=cfg["seed"])
    payload = {"meta": {**_meta(cfg), "quick": ns.quick, "perturb": ns.perturb},
               "results": results}
    _emit(cfg, json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return 0 if all(r["passed"] for r in results) else 1


def _add_common(sub):
    sub.add_argument("--l1", type=float, help="shift coupling in (0, 1]")
    sub.add_argument("--l2", type=float, help="coin coupling in (0, 1]")
    sub.add_argument("--phi", type=float, help="spatial frequency in (0, 1)")
    sub.add_argument("--theta", type=float, help="quasiperiodic phase")
    sub.add_argument("--eps", type=float, help="imaginary phase part")
    sub.add_argument("--eta", type=float, help="shift non-reciprocity")
    sub.add_argument("--N", type=int, help="ring size (snapped to a convergent denominator)")
    sub.add_argument("--bc", choices=["periodic", "open"], help="boundary conditions")
    sub.add_argument("--out", help="output file (default stdout)")
    sub.add_argument("--format", choices=["csv", "json"], help="output format")
    sub.add_argument("--svg", help="write an SVG figure to this path")
    sub.add_argument("--jobs", type=int, help="worker processes for sweeps")
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--seed", type=int, help="seed for randomized validation draws")
    sub.add_argument("--tol-circle", dest="tol_circle", type=float,
                     help="on-circle tolerance for ||z|-1|")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="puamo",
        description="Spectral toolbox for the pseudo-unitary almost-Mathieu quantum walk",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("spectrum", help="eigenvalues and fractal dimensions of one ring")
    _add_common(sub)
    sub.set_defaults(func=cmd_spectrum)

    sub = subs.add_parser("phase-diagram", help="(eta, eps) grid of spectral summaries")
    _add_common(sub)
    sub.add_argument("--grid-eta", help="eta grid start:stop:count")
    sub.add_argument("--grid-eps", help="eps grid start:stop:count")
    sub.set_defaults(func=cmd_phase_diagram)

    sub = subs.add_parser("spectrum-sweep", help="spectra along one parameter axis")
    _add_common(sub)
    sub.add_argument("--sweep", required=True, help="eps or eta")
    sub.add_argument("--values", help="range start:stop:count or comma list")
    sub.set_defaults(func=cmd_spectrum_sweep)

    sub = subs.add_parser("winding", help="determinant winding numbers at gap points")
    _add_common(sub)
    sub.add_argument("--eps-values", help="eps range start:stop:count or comma list")
    sub.add_argument("--gaps", type=int, default=1, help="number of widest gaps to probe")
    sub.add_argument("--gap-index", type=int, default=None,
                     help="use only this gap (index into the widest-first list)")
    sub.add_argument("--m-theta", type=int, default=2048, help="theta samples per winding")
    sub.set_defaults(func=cmd_winding)

    sub = subs.add_parser("lyapunov", help="closed-form and numeric Lyapunov exponents")
    _add_common(sub)
    sub.add_argument("--numeric", action="store_true", help="add transfer-matrix estimates")
    sub.add_argument("--n-steps", type=int, default=100_000)
    sub.add_argument("--n-phases", type=int, default=32)
    sub.set_defaults(func=cmd_lyapunov)

    sub = subs.add_parser("duality-check", help="walk vs dual spectra as a pass/fail report")
    _add_common(sub)
    sub.set_defaults(func=cmd_duality_check)

    sub = subs.add_parser("evolve", help="transport diagnostics under repeated steps")
    _add_common(sub)
    sub.add_argument("--steps", type=int, default=200)
    sub.set_defaults(func=cmd_evolve)

    sub = subs.add_parser("validate", help="run the structural invariant suite")
    _add_common(sub)
    sub.add_argument("--quick", action="store_true", help="reduced sizes, < 10 s")
    sub.add_argument("--perturb", type=float, default=0.0,
                     help="noise amplitude injected into similarity checks")
    sub.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (PuamoError, ValueError, OverflowError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

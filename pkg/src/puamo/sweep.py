"""Rectangular parameter sweeps with per-cell spectral summaries.

Cells execute on a process pool and land in pre-indexed slots, so output
ordering (row-major in the two axes) never depends on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cocycle import lyapunov_closed_form
from .params import WalkParams
from .spectrum import eigendecompose
from .walk import build_walk

_SWEEPABLE = ("l1", "l2", "theta", "eps", "eta")


@dataclass
class CellResult:
    mean_fractal_dim: float
    frac_on_circle: float
    lyap_left: float
    lyap_right: float
    n_eigen: int


@dataclass
class SweepGrid:
    """Row-major grid of cell results over two parameter axes."""

    axis1_name: str
    axis1_values: np.ndarray
    axis2_name: str
    axis2_values: np.ndarray
    cells: list

    def cell(self, i: int, j: int) -> CellResult:
        return self.cells[i * len(self.axis2_values) + j]

    def grid_of(self, field: str) -> np.ndarray:
        values = [getattr(c, field) for c in self.cells]
        return np.array(values).reshape(len(self.axis1_values), len(self.axis2_values))


def _cell_job(args) -> CellResult:
    base, a1, v1, a2, v2, n_cells, bc, tol = args
    point = base.replace(**{a1: v1, a2: v2})
    op = build_walk(point, n_cells, bc, warn=False)
    spec = eigendecompose(op, want_vectors=True, tol_circle=tol)
    cf = lyapunov_closed_form(point)
    return CellResult(
        mean_fractal_dim=float(spec.fractal_dims.mean()),
        frac_on_circle=float(spec.on_circle.mean()),
        lyap_left=cf.left,
        lyap_right=cf.right,
        n_eigen=len(spec.eigenvalues),
    )


def run_sweep(base: WalkParams, axis1, axis2, n_cells: int, bc: str = "periodic",
              jobs: int | None = 1, tol_circle: float = 1e-4) -> SweepGrid:
    """Evaluate every (axis1, axis2) cell; row-major result order.

    ``axis1`` and ``axis2`` are (name, values) pairs with names from
    l1, l2, theta, eps, eta.  ``jobs=None`` uses all cores.
    """
    (a1, v1), (a2, v2) = axis1, axis2
    for name in (a1, a2):
        if name not in _SWEEPABLE:
            raise ValueError(f"cannot sweep {name!r}; choose from {_SWEEPABLE}")
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if v1.size == 0 or v2.size == 0:
        raise ValueError("sweep axes must be nonempty")
    payload = [
        (base, a1, float(x1), a2, float(x2), n_cells, bc, tol_circle)
        for x1 in v1 for x2 in v2
    ]
    cells: list = [None] * len(payload)
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(payload) == 1:
        for i, job in enumerate(payload):
            cells[i] = _cell_job(job)
    else:
        chunk = max(1, len(payload) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, result in enumerate(pool.map(_cell_job, payload, chunksize=chunk)):
                cells[i] = result
    return SweepGrid(axis1_name=a1, axis1_values=v1, axis2_name=a2,
                     axis2_values=v2, cells=cells)

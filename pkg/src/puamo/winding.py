"""Spectral winding numbers from determinant phase accumulation.

The winding of theta -> det(W_N(theta + i eps) - z) over one period,
normalized by 2 pi N, is quantized in {-1, 0, 1} for z in a spectral gap
and detects the PT-breaking transition.  Phases are read off LU pivots so
the determinant modulus never overflows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor

from .errors import SpectrumCollisionError, ThetaResolutionError
from .params import WalkParams
from .spectrum import SpectrumResult
from .walk import build_walk

_PIVOT_RTOL = 1e-13
_MAX_REFINE = 4


@dataclass
class WindingResult:
    value: int
    raw: float
    residual: float
    m_theta: int
    n_cells: int
    z: complex
    eps: float

    @property
    def resolved(self) -> bool:
        """Quantization is trusted only when raw sits near an integer."""
        return self.residual < 0.1


def _det_phase(params: WalkParams, n_cells: int, z: complex, theta: float) -> complex:
    """Unit-modulus phase of det(W_N(theta) - z) from LU pivots."""
    w = build_walk(params.replace(theta=theta % 1.0), n_cells, "periodic", warn=False).matrix
    w[np.diag_indices_from(w)] -= z
    lu, piv = lu_factor(w, check_finite=False)
    diag = np.diag(lu)
    mags = np.abs(diag)
    if mags.min() <= _PIVOT_RTOL * mags.max():
        raise SpectrumCollisionError(
            f"z={z:.6f} too close to the spectrum at theta={theta % 1.0:.6f}"
        )
    sign = -1.0 if np.count_nonzero(piv != np.arange(len(piv))) % 2 else 1.0
    return sign * complex(np.prod(diag / mags))


def _arg_increment(phase_fn, a, ua, b, ub, depth: int) -> float:
    delta = float(np.angle(ub * np.conj(ua)))
    if abs(delta) <= math.pi / 2:
        return delta
    if depth >= _MAX_REFINE:
        raise ThetaResolutionError(
            f"insufficient theta resolution near theta={a:.6f} after {_MAX_REFINE} refinements"
        )
    mid = 0.5 * (a + b)
    um = phase_fn(mid)
    return (_arg_increment(phase_fn, a, ua, mid, um, depth + 1)
            + _arg_increment(phase_fn, mid, um, b, ub, depth + 1))


def winding_number(z: complex, eps: float, params: WalkParams, n_cells: int,
                   m_theta: int = 2048) -> WindingResult:
    """Winding of the determinant phase over one theta period.

    Samples ``m_theta`` equispaced phases, accumulates argument increments
    folded to (-pi, pi], and refines any subinterval whose increment
    exceeds pi/2 by local doubling (up to 4 levels).
    """
    if m_theta < 8:
        raise ValueError(f"m_theta must be >= 8, got {m_theta}")
    if z == 0:
        raise ValueError("z must be nonzero")
    at_eps = params.replace(eps=eps)

    def phase_fn(theta: float) -> complex:
        return _det_phase(at_eps, n_cells, z, theta)

    thetas = params.theta + np.arange(m_theta) / m_theta
    units = [phase_fn(t) for t in thetas]
    total = 0.0
    for j in range(m_theta):
        a = thetas[j]
        b = thetas[j + 1] if j + 1 < m_theta else params.theta + 1.0
        ub = units[(j + 1) % m_theta]
        total += _arg_increment(phase_fn, a, units[j], b, ub, 0)
    raw = total / (2.0 * math.pi * n_cells)
    value = int(round(raw))
    return WindingResult(value=value, raw=raw, residual=abs(raw - value),
                         m_theta=m_theta, n_cells=n_cells, z=z, eps=eps)


def gap_points(spec_at_eps0: SpectrumResult, count: int,
               min_width: float = 1e-3) -> np.ndarray:
    """Midpoints of the widest angular gaps of an on-circle reference spectrum.

    Returns unit-modulus points, widest gap first.  Emits a warning and
    returns fewer points when not enough gaps exceed ``min_width``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    on = spec_at_eps0.eigenvalues[spec_at_eps0.on_circle]
    if on.size < 2:
        raise ValueError("reference spectrum has fewer than two on-circle eigenvalues")
    args = np.sort(np.angle(on))
    widths = np.diff(args, append=args[0] + 2.0 * math.pi)
    order = np.argsort(-widths, kind="stable")  # ties resolved by angular order
    order = [int(k) for k in order if widths[k] > min_width]
    if len(order) < count:
        warnings.warn(
            f"only {len(order)} gaps wider than {min_width} rad available "
            f"({count} requested)",
            stacklevel=2,
        )
    chosen = order[:count]
    mids = args[chosen] + 0.5 * widths[chosen]
    return np.exp(1j * mids)


def winding_profile(z: complex, params: WalkParams, n_cells: int, eps_grid,
                    m_theta: int = 2048):
    """Winding numbers along an eps grid plus the detected 0 -> +-1 jump.

    Returns (results, jump) where jump is the midpoint between the last
    eps with winding 0 and the first with |winding| = 1, or None if no
    jump occurs inside the grid.
    """
    eps_values = [float(e) for e in eps_grid]
    results = [winding_number(z, e, params, n_cells, m_theta) for e in eps_values]
    jump = None
    for prev, curr in zip(results, results[1:]):
        if prev.value == 0 and abs(curr.value) == 1:
            jump = 0.5 * (prev.eps + curr.eps)
            break
    return results, jump

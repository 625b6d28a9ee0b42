"""Dense non-hermitian spectral analysis of ring operators.

Eigendecomposition with deterministic ordering, IPR-based fractal
dimensions, unit-circle and pairing classification, symmetry residuals,
Hausdorff spectral distances, and the characteristic-polynomial growth
rate of the open-boundary dual operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor

from .errors import EigensolverError, PairingStructureError, SpectrumCollisionError
from .params import WalkParams, derived_constants
from .walk import RingOperator, build_dual_walk, build_realified_walk, symmetry_operators, timeframe

_MAX_DIM = 4096


@dataclass
class SpectrumResult:
    """Eigendata of one ring operator.

    Eigenvalues are sorted by (argument, modulus); eigenvectors, when
    requested, are unit-norm columns in the same order.  ``fractal_dims``
    holds the IPR-based dimension of each eigenvector.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    fractal_dims: np.ndarray | None
    on_circle: np.ndarray
    params: WalkParams | None
    n_cells: int
    tol_circle: float


def eigendecompose(op: RingOperator, want_vectors: bool = False,
                   tol_circle: float = 1e-6) -> SpectrumResult:
    """Full spectrum of the (generally non-normal) dense operator."""
    if op.dim > _MAX_DIM:
        raise ValueError(f"operator dimension {op.dim} exceeds the dense limit {_MAX_DIM}")
    try:
        if want_vectors:
            w, v = np.linalg.eig(op.matrix)
        else:
            w = np.linalg.eigvals(op.matrix)
            v = None
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"dense eigensolver did not converge: {exc}") from exc
    order = np.lexsort((np.abs(w), np.angle(w)))
    w = w[order]
    dims = None
    if v is not None:
        v = v[:, order]
        v = v / np.linalg.norm(v, axis=0, keepdims=True)
        residual = np.linalg.norm(op.matrix @ v - v * w[None, :], axis=0)
        allowed = 1e-8 * np.linalg.norm(op.matrix)
        if residual.max() > allowed:
            raise EigensolverError(
                f"worst eigenpair residual {residual.max():.3e} exceeds {allowed:.3e}"
            )
        dims = np.array([fractal_dimension(v[:, k]) for k in range(v.shape[1])])
    on_circle = np.abs(np.abs(w) - 1.0) <= tol_circle
    return SpectrumResult(
        eigenvalues=w,
        eigenvectors=v,
        fractal_dims=dims,
        on_circle=on_circle,
        params=op.params,
        n_cells=op.n_cells,
        tol_circle=tol_circle,
    )


def fractal_dimension(eigvec: np.ndarray) -> float:
    """IPR-based spreading dimension in [0, 1].

    With p_k = |v_k|^2 / sum |v|^2 this is -log(sum p_k^2) / log(dim):
    0 for a single-site vector, 1 for a uniform one.
    """
    v = np.asarray(eigvec).ravel()
    total = float(np.sum(np.abs(v) ** 2))
    if total <= 0.0:
        raise ValueError("zero vector has no fractal dimension")
    p = np.abs(v) ** 2 / total
    ipr = float(np.sum(p * p))
    return float(np.clip(-math.log(ipr) / math.log(v.size), 0.0, 1.0))


def classify_circle(spec: SpectrumResult, tol: float):
    """(on_count, off_count, max radial deviation) at tolerance ``tol``."""
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    dev = np.abs(np.abs(spec.eigenvalues) - 1.0)
    on = int(np.count_nonzero(dev <= tol))
    return on, len(dev) - on, float(dev.max())


def pairing_residual(spec: SpectrumResult, mode: str = "pseudo") -> float:
    """Worst match distance of off-circle eigenvalues to their partner images.

    mode 'pseudo' pairs z with 1/conj(z), mode 'chiral' with 1/z.  Greedy
    nearest matching in eigenvalue order; ties resolved by index order.
    """
    if mode not in ("pseudo", "chiral"):
        raise ValueError(f"mode must be 'pseudo' or 'chiral', got {mode!r}")
    w = spec.eigenvalues
    pool = [int(k) for k in np.flatnonzero(~spec.on_circle)]
    if not pool:
        return 0.0
    if len(pool) % 2:
        raise PairingStructureError(
            f"{len(pool)} off-circle eigenvalues cannot pair up (odd count)"
        )
    worst = 0.0
    while pool:
        k = pool.pop(0)
        z = w[k]
        target = 1.0 / np.conj(z) if mode == "pseudo" else 1.0 / z
        dists = np.abs(w[pool] - target)
        j = int(np.argmin(dists))
        worst = max(worst, float(dists[j]))
        pool.pop(j)
    return worst


def _opnorm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x, 2))


def symmetry_residuals(op: RingOperator) -> dict:
    """Operator-norm residuals of pseudo-unitarity and PT-symmetry.

    Both identities live in the theta = 1/4 gauge: pseudo-unitarity
    ``P W^-1 P^-1 = W+`` is checked on the realified walk with the parity
    metric, PT on the timeframe.  For eta != 0 the PT identity holds
    against the eta-flipped inverse, reported as ``pt_eta_flipped``.
    """
    params, n_cells, bc = op.params, op.n_cells, op.bc
    if abs(params.theta - 0.25) > 1e-12:
        raise ValueError("symmetry residuals are defined in the theta = 1/4 gauge")
    wr = op.matrix if op.form == "realified" else build_realified_walk(params, n_cells, bc).matrix
    cond = np.linalg.cond(wr)
    if cond > 1e12:
        raise EigensolverError(f"walk conditioning {cond:.3e} too poor for a trustworthy inverse")
    sym = symmetry_operators(n_cells)
    parity = sym.parity  # involutory
    pseudo = _opnorm(parity @ np.linalg.inv(wr) @ parity - wr.conj().T)
    tf = timeframe(params, n_cells, bc).matrix
    pt_conj = sym.pt_matrix @ tf.conj() @ sym.pt_matrix  # antilinear conjugation of the timeframe
    pt = _opnorm(pt_conj - np.linalg.inv(tf))
    tf_flipped = timeframe(params.replace(eta=-params.eta), n_cells, bc).matrix
    pt_flipped = _opnorm(pt_conj - np.linalg.inv(tf_flipped))
    return {"pseudo_unitarity": pseudo, "pt": pt, "pt_eta_flipped": pt_flipped}


def spectral_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two finite complex sets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("spectral distance needs nonempty sets")
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def char_poly_growth(z: complex, params: WalkParams, n_cells: int) -> float:
    """Per-site log-growth rate of |det(D - z)| for the open-boundary dual D.

    Computed from an LU factorization; raises SpectrumCollisionError when z
    is numerically on the spectrum of the open dual operator.
    """
    if z == 0:
        raise ValueError("z must be nonzero")
    dual = build_dual_walk(params, n_cells, bc="open")
    a = dual.matrix - z * np.eye(2 * n_cells)
    lu, _ = lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    if not np.all(np.isfinite(diag)) or diag.min() <= 1e-250:
        raise SpectrumCollisionError("z sits (numerically) on the spectrum of the open dual operator")
    return float(np.sum(np.log(diag)) / (2 * n_cells))


def char_poly_growth_prediction(z: complex, params: WalkParams) -> float:
    """Thouless-type target for char_poly_growth.

    Uses the on-spectrum dual Lyapunov exponent as a proxy for its value at
    the gap point z, so the target is approximate near wide gaps.
    """
    dc = derived_constants(params)
    return 0.5 * (
        dc.L_sharp
        - math.log(2.0 / (params.l2 * (1.0 + params.l1p)))
        + math.log(abs(z))
    )

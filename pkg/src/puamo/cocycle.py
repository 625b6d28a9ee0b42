"""Transfer-matrix cocycle of the walk eigenequation and Lyapunov exponents.

The eigenequation W psi = z psi propagates (psi+_{n+1}, psi-_n) from
(psi+_n, psi-_{n-1}) through 2x2 transfer matrices.  This module provides
those matrices, the regularized (everywhere-analytic) variant, the dual
transfer matrices of the transposed walk, numerically estimated left/right
Lyapunov exponents with periodic renormalization, the closed forms valid
on the spectrum, the acceleration, and the global-theory regime test.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SingularCoinError
from .params import TWO_PI, WalkParams, coin_entries, derived_constants

# defaults shared by estimator and tests
RENORM_EVERY = 16
PHASE_OFFSET = 1.0 / (2.0 * math.e)  # keeps equispaced phases off the approximant lattice
_CHUNK = 4096


def _coin_guard_scale(params: WalkParams) -> float:
    return 1.0 + params.l2 * math.cosh(TWO_PI * params.eps)


def _bracket(tau, z, params):
    """Inner 2x2 of the transfer matrix, before the exp(2 pi eta)/q22 prefactor.

    Returns (blocks, q11, q22) with blocks of shape tau.shape + (2, 2).
    """
    l1, l1p = params.l1, params.l1p
    q11, q12, q21, q22 = coin_entries(params.coupling2, tau, params.eps)
    gain = math.exp(TWO_PI * params.eta)
    zl = l1p * z
    blocks = np.empty(np.shape(tau) + (2, 2), dtype=complex)
    blocks[..., 0, 0] = 1.0 / (l1 * z) + (l1p / l1) * (q21 - q12) + z * l1p * l1p / l1
    blocks[..., 0, 1] = -gain * (q21 + zl)
    blocks[..., 1, 0] = -(q21 + zl) / gain
    blocks[..., 1, 1] = l1 * z
    return blocks, q11, q22


def transfer_matrix(n: int, z: complex, params: WalkParams) -> np.ndarray:
    """Transfer matrix at cell ``n`` and spectral parameter ``z``."""
    if z == 0:
        raise ValueError("z must be nonzero")
    tau = np.asarray(n * params.phi + params.theta, dtype=float)
    blocks, _, q22 = _bracket(tau, z, params)
    if abs(q22) <= 1e-12 * _coin_guard_scale(params):
        raise SingularCoinError(n, f"|q22| = {abs(q22):.3e}")
    return blocks * (math.exp(TWO_PI * params.eta) / q22)


def regularized_transfer(n: int, z: complex, params: WalkParams) -> np.ndarray:
    """Analyticity-restoring rescaling: the 2 q22 / (1 + l2') prefactor
    cancels the transfer-matrix denominator, so entries stay finite even
    where the coin is off-diagonal."""
    if z == 0:
        raise ValueError("z must be nonzero")
    tau = np.asarray(n * params.phi + params.theta, dtype=float)
    blocks, _, _ = _bracket(tau, z, params)
    return blocks * (2.0 * math.exp(TWO_PI * params.eta) / (1.0 + params.l2p))


def transfer_matrix_dual(n: int, z: complex, params: WalkParams) -> np.ndarray:
    """Transfer matrix of the transposed dual walk.

    Built from the general transposed-walk formula instantiated with the
    dual data: shift coupling l2 with non-reciprocity -eps, coin coupling
    l1 with imaginary phase -eta.  Satisfies
    ``T_dual(l1, l2, n, z; eta, theta + i eps)
      = conj(T(l2, l1, n, 1/conj(z); eps, theta + i eta))``.
    """
    if z == 0:
        raise ValueError("z must be nonzero")
    tau = n * params.phi + params.theta
    q11, q12, q21, q22 = coin_entries(params.coupling1, tau, -params.eta)
    if abs(q11) <= 1e-12 * (1.0 + params.l1 * math.cosh(TWO_PI * params.eta)):
        raise SingularCoinError(n, f"|q11| = {abs(q11):.3e}")
    lam, lam_p = params.l2, params.l2p
    gain = math.exp(-TWO_PI * params.eps)  # exp(2 pi eta_eff) with eta_eff = -eps
    det_q = q11 * q22 - q12 * q21
    m = np.empty((2, 2), dtype=complex)
    m[0, 0] = z / lam + (lam_p / lam) * (q21 - q12) + det_q * lam_p * lam_p / (lam * z)
    m[0, 1] = -(q21 + lam_p * det_q / z) / gain
    m[1, 0] = gain * (q12 - lam_p * det_q / z)
    m[1, 1] = lam * det_q / z
    return m / (gain * q11)


@dataclass
class LyapunovEstimate:
    value: float
    std_error: float
    n_steps: int
    n_phases: int
    direction: str


def _phase_samples(n_phases: int) -> np.ndarray:
    return (np.arange(n_phases) / n_phases + PHASE_OFFSET) % 1.0


def _warn_if_rational(params: WalkParams) -> None:
    for p, q in params.freq.convergents:
        if q <= 100 and abs(params.phi - p / q) < 1e-12:
            warnings.warn(
                f"phi={params.phi} is (numerically) rational with denominator {q}; "
                "Lyapunov averages assume an irrational frequency",
                stacklevel=3,
            )
            return


def _adjugate(blocks: np.ndarray) -> np.ndarray:
    out = np.empty_like(blocks)
    out[..., 0, 0] = blocks[..., 1, 1]
    out[..., 0, 1] = -blocks[..., 0, 1]
    out[..., 1, 0] = -blocks[..., 1, 0]
    out[..., 1, 1] = blocks[..., 0, 0]
    return out


def _two_norm_2x2(m: np.ndarray) -> np.ndarray:
    """Largest singular value of a (..., 2, 2) batch, closed form."""
    g00 = np.abs(m[..., 0, 0]) ** 2 + np.abs(m[..., 1, 0]) ** 2
    g11 = np.abs(m[..., 0, 1]) ** 2 + np.abs(m[..., 1, 1]) ** 2
    g01 = np.conj(m[..., 0, 0]) * m[..., 0, 1] + np.conj(m[..., 1, 0]) * m[..., 1, 1]
    half = 0.5 * (g00 + g11)
    rad = np.sqrt(np.maximum(0.25 * (g00 - g11) ** 2 + np.abs(g01) ** 2, 0.0).real)
    return np.sqrt(np.maximum(half.real + rad, 1e-300))


def lyapunov_numeric(z: complex, params: WalkParams, n_steps: int = 100_000,
                     n_phases: int = 32, direction: str = "right",
                     cocycle: str = "standard") -> LyapunovEstimate:
    """Lyapunov exponent from renormalized transfer-matrix products.

    Multiplies transfer matrices along orbits started at ``n_phases``
    equispaced phases (offset 1/(2e) against approximant lattices), with
    max-entry renormalization every 16 steps.  'left' iterates explicit
    2x2 inverses along the backward orbit.  Phases hitting an off-diagonal
    coin are skipped; more than 1% skipped is an error.
    """
    if z == 0:
        raise ValueError("z must be nonzero")
    if n_steps < 1000:
        raise ValueError(f"n_steps must be >= 1000 for a meaningful estimate, got {n_steps}")
    if n_phases < 1:
        raise ValueError(f"n_phases must be >= 1, got {n_phases}")
    if direction not in ("right", "left"):
        raise ValueError(f"direction must be 'right' or 'left', got {direction!r}")
    if cocycle not in ("standard", "regularized"):
        raise ValueError(f"cocycle must be 'standard' or 'regularized', got {cocycle!r}")
    _warn_if_rational(params)

    thetas = _phase_samples(n_phases)
    orbit_sign = 1.0 if direction == "right" else -1.0
    gain = math.exp(TWO_PI * params.eta)
    guard = 1e-12 * _coin_guard_scale(params)
    acc = np.zeros(n_phases)
    alive = np.ones(n_phases, dtype=bool)
    mats = np.broadcast_to(np.eye(2, dtype=complex), (n_phases, 2, 2)).copy()

    step = 0
    for k0 in range(0, n_steps, _CHUNK):
        ks = np.arange(k0, min(n_steps, k0 + _CHUNK))
        tau = thetas[None, :] + orbit_sign * ks[:, None] * params.phi
        blocks, q11, q22 = _bracket(tau, z, params)
        if direction == "right":
            denom = q22
            if cocycle == "standard":
                factors = blocks * (gain / denom)[..., None, None]
            else:
                factors = blocks * (2.0 * gain / (1.0 + params.l2p))
        else:
            # analytic inverse: adj(bracket) / (bracket determinant)
            denom = q11
            adj = _adjugate(blocks)
            if cocycle == "standard":
                factors = adj * (1.0 / (gain * denom))[..., None, None]
            else:
                # det(regularized) = 4 gain^2 q11 q22 / (1 + l2p)^2
                factors = adj * ((1.0 + params.l2p) / (2.0 * gain * q11 * q22))[..., None, None]
        bad = np.abs(denom) <= guard
        if np.any(bad):
            alive &= ~bad.any(axis=0)
            factors[bad] = np.eye(2)
        for i in range(len(ks)):
            mats = factors[i] @ mats
            step += 1
            if step % RENORM_EVERY == 0:
                scale = np.abs(mats).max(axis=(1, 2))
                scale = np.where(scale > 0.0, scale, 1.0)
                acc += np.log(scale)
                mats /= scale[:, None, None]
    acc += np.log(_two_norm_2x2(mats))

    if np.count_nonzero(~alive) > 0.01 * n_phases:
        raise SingularCoinError(
            int(np.flatnonzero(~alive)[0]),
            f"{np.count_nonzero(~alive)} of {n_phases} phases hit off-diagonal coins",
        )
    vals = acc[alive] / n_steps
    value = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
    return LyapunovEstimate(value=value, std_error=stderr, n_steps=n_steps,
                            n_phases=n_phases, direction=direction)


@dataclass
class ClosedFormLyapunov:
    """On-spectrum closed forms; z-independent there.

    right - left = 4 pi eta; overall = max(0, min(left, right)); the dual
    fields follow from swapping couplings and (eta, eps).
    """

    right: float
    left: float
    overall: float
    dual_right: float
    dual_left: float
    dual_overall: float


def lyapunov_closed_form(params: WalkParams) -> ClosedFormLyapunov:
    dc = derived_constants(params)
    log_l0 = math.log(dc.lambda0)
    eps_a, eta_a = abs(params.eps), abs(params.eta)
    bracket = max(0.0, log_l0 + TWO_PI * (eps_a - max(eps_a - dc.eps0, 0.0)))
    right = TWO_PI * params.eta + bracket
    left = -TWO_PI * params.eta + bracket
    dual_bracket = max(0.0, -log_l0 + TWO_PI * (eta_a - max(eta_a - dc.eta0, 0.0)))
    dual_right = TWO_PI * params.eps + dual_bracket
    dual_left = -TWO_PI * params.eps + dual_bracket
    return ClosedFormLyapunov(
        right=right,
        left=left,
        overall=max(0.0, min(left, right)),
        dual_right=dual_right,
        dual_left=dual_left,
        dual_overall=max(0.0, min(dual_left, dual_right)),
    )


@dataclass
class AccelerationResult:
    value: float
    straddles_turning_point: bool


def acceleration(z: complex, params: WalkParams, delta_eps: float,
                 backend: str = "closed", **numeric_kw) -> AccelerationResult:
    """Quantized slope of eps -> L(eps) in units of 2 pi.

    Finite difference between eps and eps + delta_eps.  The result is
    flagged when the two points straddle a turning point (+-L_sharp/2pi or
    +-eps0), where the slope is meaningless.
    """
    if delta_eps <= 0.0:
        raise ValueError(f"delta_eps must be positive, got {delta_eps}")
    if backend not in ("closed", "numeric"):
        raise ValueError(f"backend must be 'closed' or 'numeric', got {backend!r}")
    dc = derived_constants(params)
    turning = (dc.L_sharp / TWO_PI, -dc.L_sharp / TWO_PI, dc.eps0, -dc.eps0)
    e0, e1 = params.eps, params.eps + delta_eps
    straddles = any((e0 - t) * (e1 - t) < 0.0 for t in turning)

    def overall(eps_value: float) -> float:
        point = params.replace(eps=eps_value)
        if backend == "closed":
            return lyapunov_closed_form(point).overall
        right = lyapunov_numeric(z, point, direction="right", **numeric_kw).value
        left = lyapunov_numeric(z, point, direction="left", **numeric_kw).value
        return max(0.0, min(left, right))

    value = (overall(e1) - overall(e0)) / (TWO_PI * delta_eps)
    return AccelerationResult(value=value, straddles_turning_point=straddles)


def cocycle_regime(z: complex, params: WalkParams, delta_eps: float = 0.01,
                   l_tol: float = 0.02, n_steps: int = 20_000,
                   n_phases: int = 16) -> str:
    """Global-theory classification from (L at eps=0, acceleration at eps=0).

    Defined for the reciprocal cocycle (eta = 0).  Uses the numeric
    estimator so that off-spectrum z (uniformly hyperbolic) classify
    correctly.
    """
    if abs(params.eta) > 1e-12:
        raise ValueError("cocycle classification is defined at eta = 0")
    base = params.replace(eps=0.0)
    l_zero = lyapunov_numeric(z, base, n_steps=n_steps, n_phases=n_phases).value
    l_up = lyapunov_numeric(z, base.replace(eps=delta_eps),
                            n_steps=n_steps, n_phases=n_phases).value
    omega = round((l_up - l_zero) / (TWO_PI * delta_eps))
    if l_zero > l_tol:
        return "supercritical" if omega > 0 else "uniformly_hyperbolic"
    return "critical" if omega > 0 else "subcritical"

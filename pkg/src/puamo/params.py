"""Parameter algebra for the pseudo-unitary almost-Mathieu walk family.

Couplings, quasiperiodic frequency data (continued-fraction approximants),
coin matrices, and the closed-form critical constants.  Everything here is
a pure function of value-semantic inputs and safe to call concurrently.

Conventions used throughout the package:

* a coupling ``lam`` in (0, 1] always comes with the derived complement
  ``lam' = sqrt(1 - lam**2)``; the complement is never independent input,
* the quasiperiodic phase is ``theta + 1j*eps`` and is reconstructed on
  demand; ``theta`` lives on the unit torus [0, 1),
* ``eta`` is the non-reciprocity of the shift (gain/loss ``exp(±2*pi*eta)``
  on right/left hops).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0
TWO_PI = 2.0 * math.pi

# Continued-fraction expansion stops once the fractional residual is below
# this; avoids spurious convergents generated by rounding noise.
_CF_RESIDUAL = 1e-15


def complex_cos(x, y):
    """cos(x + iy) via the explicit split cos(x)cosh(y) - i sin(x)sinh(y).

    Bit-stable across platforms, which keeps golden tests reproducible.
    Accepts scalars or arrays for ``x``; ``y`` is a real scalar or array.
    """
    return np.cos(x) * np.cosh(y) - 1j * np.sin(x) * np.sinh(y)


def complex_sin(x, y):
    """sin(x + iy) via sin(x)cosh(y) + i cos(x)sinh(y)."""
    return np.sin(x) * np.cosh(y) + 1j * np.cos(x) * np.sinh(y)


def convergents(phi: float, q_max: int) -> list[tuple[int, int]]:
    """Continued-fraction convergents p/q of ``phi`` with q <= ``q_max``.

    Returns coprime pairs ``(p, q)`` in order of strictly increasing ``q``.
    A rational ``phi`` yields its exact finite list.  For the golden mean
    the denominators are the Fibonacci numbers.

    The expansion terminates when the floating-point residual drops below
    1e-15 (``phi`` is then exactly rational at double precision) or the
    next denominator would exceed ``q_max``.
    """
    if not (0.0 < phi < 1.0):
        raise ValueError(f"phi must lie strictly inside (0, 1), got {phi}")
    if q_max < 1:
        raise ValueError(f"q_max must be >= 1, got {q_max}")
    out = [(0, 1)]  # zeroth convergent: a0 = 0 for phi in (0, 1)
    p_m2, q_m2 = 1, 0
    p_m1, q_m1 = 0, 1
    frac = phi
    while frac > _CF_RESIDUAL and len(out) < 128:
        x = 1.0 / frac
        a = int(math.floor(x))
        frac = x - a
        if frac > 1.0 - 1e-12:
            # guard against floor(2.999...9) type rounding
            a += 1
            frac = 0.0
        p = a * p_m1 + p_m2
        q = a * q_m1 + q_m2
        if q > q_max:
            break
        if q == out[-1][1]:
            # golden-type expansions start 0/1, 1/1; keep only the later one
            # so denominators stay strictly increasing
            out.pop()
        out.append((p, q))
        p_m2, q_m2 = p_m1, q_m1
        p_m1, q_m1 = p, q
    return out


@dataclass(frozen=True)
class CouplingPair:
    """Coupling strength in (0, 1]; the complement is always recomputed."""

    lam: float

    def __post_init__(self):
        if not (0.0 < self.lam <= 1.0):
            raise ValueError(
                f"coupling must lie in (0, 1] (zero fully decouples the walk), got {self.lam}"
            )

    @property
    def lam_prime(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.lam * self.lam))


@dataclass(frozen=True)
class FrequencySpec:
    """Spatial frequency together with its continued-fraction approximants."""

    phi: float
    convergents: tuple[tuple[int, int], ...]

    @classmethod
    def from_phi(cls, phi: float, q_max: int = 4096) -> "FrequencySpec":
        if phi in (0.0, 1.0):
            # rational boundary: constant coin phase, trivial approximant
            return cls(phi=float(phi), convergents=((int(phi), 1),))
        return cls(phi=phi, convergents=tuple(convergents(phi, q_max)))

    def denominators(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.convergents)

    def has_denominator(self, n: int) -> bool:
        """True if ``n`` is an approximant denominator (or phi is exactly p/n)."""
        if any(q == n for _, q in self.convergents):
            return True
        return abs(self.phi * n - round(self.phi * n)) <= 1e-9

    def approximant(self, n: int) -> float:
        """Best rational approximation p/n with denominator exactly ``n``."""
        for p, q in self.convergents:
            if q == n:
                return p / q
        p = round(self.phi * n)
        if abs(self.phi * n - p) <= 1e-9:
            return p / n
        raise ValueError(f"{n} is not a convergent denominator of phi={self.phi!r}")


@dataclass(frozen=True)
class WalkParams:
    """Full parameter point of the walk.

    ``coupling1`` is the shift strength, ``coupling2`` the coin strength.
    ``theta`` is the real quasiperiodic phase, ``eps`` its imaginary part,
    ``eta`` the non-reciprocity of the shift.
    """

    coupling1: CouplingPair
    coupling2: CouplingPair
    freq: FrequencySpec
    theta: float = 0.0
    eps: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % 1.0)

    # short accessors used throughout the numerics
    @property
    def l1(self) -> float:
        return self.coupling1.lam

    @property
    def l1p(self) -> float:
        return self.coupling1.lam_prime

    @property
    def l2(self) -> float:
        return self.coupling2.lam

    @property
    def l2p(self) -> float:
        return self.coupling2.lam_prime

    @property
    def phi(self) -> float:
        return self.freq.phi

    @property
    def vartheta(self) -> complex:
        """Complexified phase theta + i*eps, built on demand."""
        return self.theta + 1j * self.eps

    def replace(self, **changes) -> "WalkParams":
        """Value-level update accepting l1, l2, phi, theta, eps, eta."""
        c1 = CouplingPair(changes.pop("l1")) if "l1" in changes else self.coupling1
        c2 = CouplingPair(changes.pop("l2")) if "l2" in changes else self.coupling2
        freq = self.freq
        if "phi" in changes:
            freq = FrequencySpec.from_phi(changes.pop("phi"))
        kw = {
            "theta": changes.pop("theta", self.theta),
            "eps": changes.pop("eps", self.eps),
            "eta": changes.pop("eta", self.eta),
        }
        if changes:
            raise TypeError(f"unknown parameter fields: {sorted(changes)}")
        return WalkParams(coupling1=c1, coupling2=c2, freq=freq, **kw)


def walk_params(l1, l2, phi=GOLDEN_MEAN, theta=0.0, eps=0.0, eta=0.0, q_max=4096) -> WalkParams:
    """Convenience constructor from plain numbers."""
    return WalkParams(
        coupling1=CouplingPair(float(l1)),
        coupling2=CouplingPair(float(l2)),
        freq=FrequencySpec.from_phi(float(phi), q_max=q_max),
        theta=float(theta),
        eps=float(eps),
        eta=float(eta),
    )


def dual_params(params: WalkParams) -> WalkParams:
    """Parameter tuple of the Aubry dual: couplings swapped, (eta, eps) -> (-eps, -eta).

    Applying this twice is the identity.
    """
    return WalkParams(
        coupling1=params.coupling2,
        coupling2=params.coupling1,
        freq=params.freq,
        theta=params.theta,
        eps=-params.eta,
        eta=-params.eps,
    )


@dataclass(frozen=True)
class DerivedConstants:
    """Closed-form critical constants of a parameter point.

    ``lambda0``  effective coupling ratio; the walk is subcritical for
                 lambda0 < 1, critical at 1, supercritical above.
    ``L``        inverse localization length max(0, log lambda0).
    ``L_sharp``  same quantity for the dual model, max(0, -log lambda0).
    ``eps0``     second-transition threshold asinh(l2'/l2) / 2 pi; depends
                 only on the coin coupling.
    ``eta0``     dual threshold asinh(l1'/l1) / 2 pi; depends only on the
                 shift coupling.
    """

    lambda0: float
    L: float
    L_sharp: float
    eps0: float
    eta0: float


def derived_constants(params: WalkParams) -> DerivedConstants:
    l1, l1p = params.l1, params.l1p
    l2, l2p = params.l2, params.l2p
    lambda0 = l2 * (1.0 + l1p) / (l1 * (1.0 + l2p))
    log_l0 = math.log(lambda0)
    return DerivedConstants(
        lambda0=lambda0,
        L=max(0.0, log_l0),
        L_sharp=max(0.0, -log_l0),
        eps0=math.asinh(l2p / l2) / TWO_PI,
        eta0=math.asinh(l1p / l1) / TWO_PI,
    )


def coin_entries(coupling: CouplingPair, tau, eps):
    """Coin entries at phases ``tau + 1j*eps``; ``tau`` may be an array.

    Returns ``(q11, q12, q21, q22)`` with the convention

        [[ lam cos(2 pi v) + i lam',  -lam sin(2 pi v) ],
         [ lam sin(2 pi v),            lam cos(2 pi v) - i lam' ]]

    for v = tau + i eps.  The coin is in SU(2) for real phases and has unit
    determinant for all complex phases.
    """
    lam, lam_p = coupling.lam, coupling.lam_prime
    x = TWO_PI * np.asarray(tau, dtype=float)
    y = TWO_PI * eps
    c = lam * complex_cos(x, y)
    s = lam * complex_sin(x, y)
    return c + 1j * lam_p, -s, s, c - 1j * lam_p


def coin_matrix(n: int, params: WalkParams) -> np.ndarray:
    """Quasiperiodic coin at cell ``n`` as a 2x2 complex matrix."""
    q11, q12, q21, q22 = coin_entries(
        params.coupling2, n * params.phi + params.theta, params.eps
    )
    return np.array([[q11, q12], [q21, q22]], dtype=complex)


def realified_entries(coupling: CouplingPair, tau, eps):
    """Realified coin data ``(diagonal, off)`` at phases ``tau + 1j*eps``.

    The realified coin replaces both diagonal entries with the principal
    square root of ``1 - lam**2 cos(2 pi (tau + i eps))**2``.  It arises in
    the theta = 1/4 gauge, wherefore no theta argument appears here.
    """
    lam = coupling.lam
    c = lam * complex_cos(TWO_PI * np.asarray(tau, dtype=float), TWO_PI * eps)
    d = np.sqrt((1.0 - c * c).astype(complex))
    return d, c


def realified_coin(n: int, coupling2: CouplingPair, phi: float, eps: float) -> np.ndarray:
    """Realified coin at cell ``n``: [[d, -c], [c, d]] with unit determinant."""
    d, c = realified_entries(coupling2, n * phi, eps)
    return np.array([[d, -c], [c, d]], dtype=complex)


def regime(params: WalkParams) -> str:
    """Spectral regime at eta = eps = 0 from the coupling ratio alone."""
    if params.l1 > params.l2:
        return "subcritical"
    if params.l1 < params.l2:
        return "supercritical"
    return "critical"

"""Finite-size walk operators on a ring of N two-level cells.

Dense construction of one split-step time step, the O(N) matrix-free
application, the corner-concentrating skin form, the block (CMV-style)
factorization, the transposed Aubry-dual operator, timeframes built from
realified coins, symmetry operators, and transport diagnostics.

Basis layout everywhere: flat index ``2n`` is (cell n, +), ``2n + 1`` is
(cell n, -).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SingularBranchError
from .params import TWO_PI, WalkParams, coin_entries, realified_entries

SIGMA_1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# exp overflows past here; fail loudly instead of returning inf-laden matrices
_SKIN_EXP_LIMIT = 700.0


@dataclass
class RingOperator:
    """Dense 2N x 2N realization of one walk time step.

    ``form`` records which construction produced the matrix ('walk', 'skin',
    'dual', 'realified', 'timeframe').  Instances are treated as immutable
    after construction and may be shared across workers.
    """

    matrix: np.ndarray
    bc: str
    params: WalkParams
    n_cells: int
    form: str = "walk"

    @property
    def dim(self) -> int:
        return 2 * self.n_cells


def _check_ring(params: WalkParams, n_cells: int, bc: str, warn: bool) -> None:
    if n_cells < 2:
        raise ValueError(f"ring needs at least 2 cells, got {n_cells}")
    if bc not in ("periodic", "open"):
        raise ValueError(f"bc must be 'periodic' or 'open', got {bc!r}")
    if warn and not params.freq.has_denominator(n_cells):
        warnings.warn(
            f"N={n_cells} is not a convergent denominator of phi={params.phi:.6f}; "
            "quasiperiodic finite-size results are cleanest at approximant sizes",
            stacklevel=3,
        )


def _walk_coin(params: WalkParams, n_cells: int):
    tau = np.arange(n_cells) * params.phi + params.theta
    return coin_entries(params.coupling2, tau, params.eps)


def _assemble_split_step(params, n_cells, bc, q11, q12, q21, q22,
                         hop_plus=None, hop_minus=None) -> np.ndarray:
    """Shift-times-coin matrix with per-bond hop factors.

    ``hop_plus[n]`` multiplies the bond into (n, +) from cell n-1 mod N,
    ``hop_minus[n]`` the bond into (n, -) from cell n+1 mod N.  Defaults are
    the uniform non-reciprocal factors l1*exp(+-2 pi eta).
    """
    l1, l1p = params.l1, params.l1p
    if hop_plus is None:
        hop_plus = np.full(n_cells, l1 * math.exp(TWO_PI * params.eta))
        hop_minus = np.full(n_cells, l1 * math.exp(-TWO_PI * params.eta))
    w = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    n = np.arange(n_cells)
    src_p = (n - 1) % n_cells
    src_m = (n + 1) % n_cells
    w[2 * n, 2 * src_p] = hop_plus * q11[src_p]
    w[2 * n, 2 * src_p + 1] = hop_plus * q12[src_p]
    w[2 * n, 2 * n] += -l1p * q21[n]
    w[2 * n, 2 * n + 1] += -l1p * q22[n]
    w[2 * n + 1, 2 * src_m] = hop_minus * q21[src_m]
    w[2 * n + 1, 2 * src_m + 1] = hop_minus * q22[src_m]
    w[2 * n + 1, 2 * n] += l1p * q11[n]
    w[2 * n + 1, 2 * n + 1] += l1p * q12[n]
    if bc == "open":
        last = n_cells - 1
        w[0, 2 * last] = 0.0
        w[0, 2 * last + 1] = 0.0
        w[2 * last + 1, 0] = 0.0
        w[2 * last + 1, 1] = 0.0
    return w


def build_walk(params: WalkParams, n_cells: int, bc: str = "periodic",
               warn: bool = True) -> RingOperator:
    """One time step S_{l1,eta} Q_{l2,eps} on a ring of ``n_cells`` cells."""
    _check_ring(params, n_cells, bc, warn)
    q11, q12, q21, q22 = _walk_coin(params, n_cells)
    w = _assemble_split_step(params, n_cells, bc, q11, q12, q21, q22)
    return RingOperator(matrix=w, bc=bc, params=params, n_cells=n_cells, form="walk")


def apply_walk(params: WalkParams, state: np.ndarray, bc: str = "periodic") -> np.ndarray:
    """One walk step applied in O(N) without forming the matrix."""
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1 or state.size % 2 or state.size < 4:
        raise ValueError(f"state must be a flat vector of even length >= 4, got shape {state.shape}")
    if bc not in ("periodic", "open"):
        raise ValueError(f"bc must be 'periodic' or 'open', got {bc!r}")
    n_cells = state.size // 2
    q11, q12, q21, q22 = _walk_coin(params, n_cells)
    psi_p, psi_m = state[0::2], state[1::2]
    a = q11 * psi_p + q12 * psi_m  # coin output, + component
    b = q21 * psi_p + q22 * psi_m
    a_in = np.roll(a, 1)   # a[n-1] seen from cell n
    b_in = np.roll(b, -1)  # b[n+1]
    if bc == "open":
        a_in[0] = 0.0
        b_in[-1] = 0.0
    out = np.empty_like(state)
    out[0::2] = params.l1 * math.exp(TWO_PI * params.eta) * a_in - params.l1p * b
    out[1::2] = params.l1 * math.exp(-TWO_PI * params.eta) * b_in + params.l1p * a
    return out


def skin_conjugate(op: RingOperator, direction: str = "forward") -> RingOperator:
    """Similarity transform concentrating all eta-dependence in the corners.

    forward: walk form -> skin form, in which bulk hops carry no gain/loss
    and the two wrap-around corner blocks carry exp(-+2 pi N eta) (periodic
    boundaries).  With open boundaries the result is exactly the eta = 0
    matrix.  inverse: skin form -> walk form.
    """
    params, n_cells, bc = op.params, op.n_cells, op.bc
    if TWO_PI * n_cells * abs(params.eta) > _SKIN_EXP_LIMIT:
        raise OverflowError(
            f"2 pi N |eta| = {TWO_PI * n_cells * abs(params.eta):.1f} exceeds {_SKIN_EXP_LIMIT}; "
            "corner factors would overflow double precision"
        )
    if direction == "forward":
        if op.form != "walk":
            raise ValueError(f"forward skin conjugation expects a 'walk' operator, got {op.form!r}")
        return _skin_form(params, n_cells, bc)
    if direction == "inverse":
        if op.form != "skin":
            raise ValueError(f"inverse skin conjugation expects a 'skin' operator, got {op.form!r}")
        return build_walk(params, n_cells, bc, warn=False)
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def _skin_form(params, n_cells, bc) -> RingOperator:
    q11, q12, q21, q22 = _walk_coin(params, n_cells)
    hop_plus = np.full(n_cells, params.l1)
    hop_minus = np.full(n_cells, params.l1)
    if bc == "periodic":
        hop_plus[0] = params.l1 * math.exp(TWO_PI * n_cells * params.eta)
        hop_minus[n_cells - 1] = params.l1 * math.exp(-TWO_PI * n_cells * params.eta)
    w = _assemble_split_step(params, n_cells, bc, q11, q12, q21, q22, hop_plus, hop_minus)
    return RingOperator(matrix=w, bc=bc, params=params, n_cells=n_cells, form="skin")


@dataclass
class BlockFactorization:
    """W = L M with L block-diagonal on tilted cells and M on straight cells.

    Tilted cell k is spanned by (|k-1 mod N, ->, |k, +>); M is the coin
    preceded by the cellwise chirality swap.
    """

    l_blocks: np.ndarray  # (N, 2, 2)
    m_blocks: np.ndarray  # (N, 2, 2)
    n_cells: int

    def assemble_l(self) -> np.ndarray:
        n_cells = self.n_cells
        out = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
        for k in range(n_cells):
            idx = [2 * ((k - 1) % n_cells) + 1, 2 * k]
            out[np.ix_(idx, idx)] = self.l_blocks[k]
        return out

    def assemble_m(self) -> np.ndarray:
        n_cells = self.n_cells
        out = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
        for k in range(n_cells):
            out[2 * k:2 * k + 2, 2 * k:2 * k + 2] = self.m_blocks[k]
        return out


def cmv_factorize(params: WalkParams, n_cells: int) -> BlockFactorization:
    """Split W into shift-like and coin-like 2x2 block factors (periodic ring)."""
    if n_cells < 2:
        raise ValueError(f"ring needs at least 2 cells, got {n_cells}")
    q11, q12, q21, q22 = _walk_coin(params, n_cells)
    m_blocks = np.empty((n_cells, 2, 2), dtype=complex)
    m_blocks[:, 0, 0] = q21
    m_blocks[:, 0, 1] = q22
    m_blocks[:, 1, 0] = q11
    m_blocks[:, 1, 1] = q12
    gain = math.exp(TWO_PI * params.eta)
    l_blocks = np.empty((n_cells, 2, 2), dtype=complex)
    l_blocks[:, 0, 0] = params.l1p
    l_blocks[:, 0, 1] = params.l1 / gain
    l_blocks[:, 1, 0] = params.l1 * gain
    l_blocks[:, 1, 1] = -params.l1p
    return BlockFactorization(l_blocks=l_blocks, m_blocks=m_blocks, n_cells=n_cells)


def build_dual_walk(params: WalkParams, n_cells: int, bc: str = "periodic") -> RingOperator:
    """Transposed Aubry-dual operator on the ring.

    Couplings are swapped and (eta, eps) -> (-eps, -eta): the dual coin has
    coupling l1 and imaginary phase -eta, the dual (transposed) shift has
    coupling l2 with hop factors l2*exp(+-2j pi (theta + 1j eps)).  The dual
    phase offset is fixed to zero.  Requires phi rational with denominator
    ``n_cells``; snap phi to the matching convergent first.
    """
    if n_cells < 2:
        raise ValueError(f"ring needs at least 2 cells, got {n_cells}")
    if bc not in ("periodic", "open"):
        raise ValueError(f"bc must be 'periodic' or 'open', got {bc!r}")
    if not params.freq.has_denominator(n_cells):
        raise ValueError(
            f"dual construction needs phi rational with denominator {n_cells}; "
            "use a convergent denominator and snap phi to it"
        )
    phi_n = params.freq.approximant(n_cells)
    tau = np.arange(n_cells) * phi_n
    t11, t12, t21, t22 = coin_entries(params.coupling1, tau, -params.eta)
    l2, l2p = params.l2, params.l2p
    g_up = l2 * math.exp(-TWO_PI * params.eps) * np.exp(2j * math.pi * params.theta)
    g_dn = l2 * math.exp(TWO_PI * params.eps) * np.exp(-2j * math.pi * params.theta)
    n = np.arange(n_cells)
    up = (n + 1) % n_cells
    dn = (n - 1) % n_cells
    w = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    # rows are transposed coin blocks applied after the transposed shift
    w[2 * n, 2 * up] = t11 * g_up
    w[2 * n, 2 * n + 1] = t11 * l2p
    w[2 * n, 2 * dn + 1] = t21 * g_dn
    w[2 * n, 2 * n] = -t21 * l2p
    w[2 * n + 1, 2 * up] = t12 * g_up
    w[2 * n + 1, 2 * n + 1] = t12 * l2p
    w[2 * n + 1, 2 * dn + 1] = t22 * g_dn
    w[2 * n + 1, 2 * n] = -t22 * l2p
    if bc == "open":
        last = n_cells - 1
        w[2 * last, 0] = 0.0
        w[2 * last + 1, 0] = 0.0
        w[0, 2 * last + 1] = 0.0
        w[1, 2 * last + 1] = 0.0
    return RingOperator(matrix=w, bc=bc, params=params, n_cells=n_cells, form="dual")


def duality_unitary(params: WalkParams, n_cells: int) -> np.ndarray:
    """Unitary mapping walk eigenstates to dual eigenstates (phase offset 0).

    Discrete Fourier kernel exp(2j pi m n phi) composed with the cellwise
    rotation [[1, i], [i, 1]]/sqrt(2).
    """
    phi_n = params.freq.approximant(n_cells)
    m = np.arange(n_cells)
    f = np.exp(2j * math.pi * phi_n * np.outer(m, m)) / math.sqrt(n_cells)
    r = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=complex) / math.sqrt(2.0)
    return np.kron(f, r)


def _require_quarter_theta(params: WalkParams, what: str) -> None:
    if abs(params.theta - 0.25) > 1e-12:
        raise ValueError(f"{what} is defined in the theta = 1/4 gauge, got theta={params.theta}")


def build_realified_walk(params: WalkParams, n_cells: int, bc: str = "periodic") -> RingOperator:
    """Walk with realified coins, S_{l1,eta} Q^R; valid in the theta = 1/4 gauge."""
    _require_quarter_theta(params, "the realified walk")
    _check_ring(params, n_cells, bc, warn=False)
    d, c = realified_entries(params.coupling2, np.arange(n_cells) * params.phi, params.eps)
    w = _assemble_split_step(params, n_cells, bc, d, -c, c, d)
    return RingOperator(matrix=w, bc=bc, params=params, n_cells=n_cells, form="realified")


def shift_matrix(params: WalkParams, n_cells: int, bc: str = "periodic") -> np.ndarray:
    """Dense non-reciprocal shift S_{l1,eta} alone."""
    l1, l1p = params.l1, params.l1p
    hp = l1 * math.exp(TWO_PI * params.eta)
    hm = l1 * math.exp(-TWO_PI * params.eta)
    n = np.arange(n_cells)
    s = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    s[2 * n, 2 * ((n - 1) % n_cells)] = hp
    s[2 * n, 2 * n + 1] = -l1p
    s[2 * n + 1, 2 * ((n + 1) % n_cells) + 1] = hm
    s[2 * n + 1, 2 * n] = l1p
    if bc == "open":
        s[0, 2 * (n_cells - 1)] = 0.0
        s[2 * n_cells - 1, 1] = 0.0
    return s


def _principal_sqrt_2x2(block: np.ndarray, cell: int) -> np.ndarray:
    tr = block[0, 0] + block[1, 1]
    det = block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0]
    disc = np.sqrt(complex(tr * tr * 0.25 - det))
    eigs = (0.5 * tr + disc, 0.5 * tr - disc)
    for ev in eigs:
        if ev.real < 0.0 and abs(ev.imag) <= 1e-14 * abs(ev):
            raise SingularBranchError(cell)
    ra, rb = np.sqrt(complex(eigs[0])), np.sqrt(complex(eigs[1]))
    if abs(ra + rb) < 1e-300:
        raise SingularBranchError(cell)
    return (block + ra * rb * np.eye(2)) / (ra + rb)


def timeframe(params: WalkParams, n_cells: int, bc: str = "periodic") -> RingOperator:
    """Time step re-origined to (Q^R)^(1/2) S_{l1,eta} (Q^R)^(1/2).

    Uses principal square roots of the realified coin blocks; a coin block
    with an eigenvalue on the negative real axis raises SingularBranchError
    with the offending cell index.
    """
    _require_quarter_theta(params, "the timeframe")
    _check_ring(params, n_cells, bc, warn=False)
    d, c = realified_entries(params.coupling2, np.arange(n_cells) * params.phi, params.eps)
    root = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    for k in range(n_cells):
        block = np.array([[d[k], -c[k]], [c[k], d[k]]], dtype=complex)
        root[2 * k:2 * k + 2, 2 * k:2 * k + 2] = _principal_sqrt_2x2(block, k)
    w = root @ shift_matrix(params, n_cells, bc) @ root
    return RingOperator(matrix=w, bc=bc, params=params, n_cells=n_cells, form="timeframe")


@dataclass
class SymmetryOperators:
    """Parity, PT (matrix part; conjugate separately) and chiral operators.

    parity: cell n -> -n mod N with sigma_2 blocks.
    pt_matrix: cell n -> -n with sigma_3 blocks; the full PT operation is
    ``psi -> pt_matrix @ conj(psi)`` and squares to the identity.
    chiral: blockwise sigma_1, no cell permutation.
    """

    parity: np.ndarray
    pt_matrix: np.ndarray
    chiral: np.ndarray


def symmetry_operators(n_cells: int) -> SymmetryOperators:
    perm = (-np.arange(n_cells)) % n_cells
    parity = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    pt = np.zeros_like(parity)
    for n in range(n_cells):
        parity[2 * n:2 * n + 2, 2 * perm[n]:2 * perm[n] + 2] = SIGMA_2
        pt[2 * n:2 * n + 2, 2 * perm[n]:2 * perm[n] + 2] = SIGMA_3
    chiral = np.kron(np.eye(n_cells), SIGMA_1).astype(complex)
    return SymmetryOperators(parity=parity, pt_matrix=pt, chiral=chiral)


def delta_state(n_cells: int, cell: int | None = None, chirality: str = "+") -> np.ndarray:
    """Unit amplitude on one (cell, chirality) basis vector."""
    if cell is None:
        cell = n_cells // 2
    state = np.zeros(2 * n_cells, dtype=complex)
    state[2 * cell + (0 if chirality == "+" else 1)] = 1.0
    return state


def cell_probabilities(state: np.ndarray) -> np.ndarray:
    """Per-cell probabilities of a (possibly unnormalized) state."""
    prob = np.abs(state[0::2]) ** 2 + np.abs(state[1::2]) ** 2
    total = prob.sum()
    if total <= 0.0:
        raise ValueError("state has zero norm")
    return prob / total


def evolve(params: WalkParams, initial: np.ndarray, steps: int,
           bc: str = "periodic", record_every: int = 1) -> list[tuple[int, float, float]]:
    """Repeated walk applications with transport diagnostics.

    Returns (step, second moment, inverse participation ratio) triples.  The
    second moment is taken about the initial state's most occupied cell with
    ring positions folded to the symmetric window [-N/2, N/2); the inverse
    participation ratio is sum_n p_n^2 over cells.
    """
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    state = np.asarray(initial, dtype=complex).copy()
    n_cells = state.size // 2
    if params.l1 * steps > n_cells / 2:
        warnings.warn(
            "ballistic wavefront may wrap the ring over this many steps; "
            "second moments will be biased",
            stacklevel=2,
        )
    center = int(np.argmax(cell_probabilities(state)))
    offset = ((np.arange(n_cells) - center + n_cells // 2) % n_cells) - n_cells // 2
    records = []
    for t in range(steps + 1):
        if t % record_every == 0 or t == steps:
            p = cell_probabilities(state)
            records.append((t, float(np.sum(p * offset**2)), float(np.sum(p * p))))
        if t < steps:
            state = apply_walk(params, state, bc)
    return records

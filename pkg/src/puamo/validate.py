"""Self-validation suite: runs the package's structural invariants at
configurable sizes and reports one measured value per check.

Used by the ``validate`` CLI subcommand.  ``perturb`` injects noise into
the operators entering the similarity/pairing checks, which makes those
checks fail and demonstrates their sensitivity.
"""

from __future__ import annotations

import math

import numpy as np

from .cocycle import lyapunov_closed_form, lyapunov_numeric, transfer_matrix, transfer_matrix_dual
from .params import TWO_PI, coin_entries, convergents, derived_constants, walk_params
from .spectrum import eigendecompose, pairing_residual, spectral_distance, symmetry_residuals
from .walk import (apply_walk, build_dual_walk, build_realified_walk, build_walk,
                   cmv_factorize, skin_conjugate, symmetry_operators, timeframe)
from .winding import gap_points, winding_number

_FIB = {8: 5, 13: 8, 21: 13, 34: 21, 55: 34, 89: 55}


def _noise(rng, shape, scale):
    if scale == 0.0:
        return 0.0
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _random_params(rng, phi=None):
    l1, l2 = rng.uniform(0.15, 1.0, 2)
    return walk_params(
        l1, l2,
        phi=rng.uniform(0.05, 0.95) if phi is None else phi,
        theta=rng.uniform(0.0, 1.0),
        eps=rng.uniform(-0.25, 0.25),
        eta=rng.uniform(-0.25, 0.25),
    )


def run_validation(quick: bool = False, perturb: float = 0.0, seed: int = 0) -> list[dict]:
    """Run every invariant check; returns [{name, measured, threshold, passed}]."""
    rng = np.random.default_rng(seed)
    sizes = [8, 13, 21] if quick else [8, 13, 21, 34]
    results: list[dict] = []

    def record(name: str, measured: float, threshold: float):
        results.append({
            "name": name,
            "measured": float(measured),
            "threshold": float(threshold),
            "passed": bool(measured < threshold),
        })

    # coupling/constant identities
    worst = 0.0
    for _ in range(50):
        l1, l2 = rng.uniform(0.05, 1.0, 2)
        a = derived_constants(walk_params(l1, l2)).lambda0
        b = derived_constants(walk_params(l2, l1)).lambda0
        worst = max(worst, abs(a * b - 1.0))
    record("lambda0_duality_product", worst, 1e-12)

    worst = 0.0
    for _ in range(50):
        l2 = rng.uniform(0.05, 1.0)
        p = walk_params(0.5, l2)
        dc = derived_constants(p)
        worst = max(worst, abs(math.sinh(TWO_PI * dc.eps0) * p.l2 - p.l2p))
    record("eps0_sinh_identity", worst, 1e-12)

    worst = 0.0
    for _ in range(20):
        p = _random_params(rng).replace(eps=0.0)
        q = np.array([[0, 0], [0, 0]], dtype=complex)
        n = int(rng.integers(-30, 30))
        from .params import coin_matrix
        q = coin_matrix(n, p)
        worst = max(worst, np.abs(q.conj().T @ q - np.eye(2)).max())
    record("coin_unitarity_real_phase", worst, 1e-13)

    worst = 0.0
    for phi in rng.uniform(0.05, 0.95, 10):
        for p_num, q_den in convergents(float(phi), 500):
            worst = max(worst, q_den * q_den * abs(phi - p_num / q_den) - 1.0)
    record("convergent_quality_q_squared", worst, 0.0 + 1e-12)

    # matrix-free against dense assembly
    worst = 0.0
    for _ in range(25):
        p = _random_params(rng)
        n_cells = int(rng.integers(2, 17))
        for bc in ("periodic", "open"):
            dense = build_walk(p, n_cells, bc, warn=False).matrix
            psi = rng.standard_normal(2 * n_cells) + 1j * rng.standard_normal(2 * n_cells)
            worst = max(worst, np.abs(dense @ psi - apply_walk(p, psi, bc)).max())
    record("matrix_free_dense_agreement", worst, 1e-12)

    worst = 0.0
    for n_cells in sizes:
        p = _random_params(rng).replace(eps=0.0, eta=0.0)
        w = build_walk(p, n_cells, warn=False).matrix
        worst = max(worst, np.abs(w.conj().T @ w - np.eye(2 * n_cells)).max())
    record("unitarity_at_real_parameters", worst, 1e-12)

    worst = 0.0
    for n_cells in sizes:
        p = _random_params(rng).replace(eta=float(rng.uniform(-0.05, 0.05)))
        op = build_walk(p, n_cells, warn=False)
        op.matrix = op.matrix + _noise(rng, op.matrix.shape, perturb)
        skin = skin_conjugate(op)
        worst = max(worst, spectral_distance(np.linalg.eigvals(op.matrix),
                                             np.linalg.eigvals(skin.matrix)))
    record("skin_similarity_spectra", worst, 1e-8)

    worst = 0.0
    for n_cells in sizes:
        p = _random_params(rng)
        op_eta = build_walk(p, n_cells, "open", warn=False)
        op_zero = build_walk(p.replace(eta=0.0), n_cells, "open", warn=False)
        worst = max(worst, spectral_distance(np.linalg.eigvals(op_eta.matrix),
                                             np.linalg.eigvals(op_zero.matrix)))
    record("open_bc_eta_independence", worst, 1e-8)

    worst = 0.0
    for n_cells in sizes:
        p = _random_params(rng, phi=_FIB[n_cells] / n_cells)
        w = build_walk(p, n_cells, warn=False).matrix
        w = w + _noise(rng, w.shape, perturb)
        d = build_dual_walk(p, n_cells).matrix
        worst = max(worst, spectral_distance(np.linalg.eigvals(w), np.linalg.eigvals(d)))
    record("duality_spectra", worst, 1e-8)

    worst = 0.0
    for n_cells in sizes:
        p = _random_params(rng)
        f = cmv_factorize(p, n_cells)
        w = build_walk(p, n_cells, warn=False).matrix
        worst = max(worst, np.abs(f.assemble_l() @ f.assemble_m() - w).max())
    record("cmv_reassembly", worst, 1e-12)

    # pseudo-unitary pairing on the realified walk (exact gauge)
    worst = 0.0
    for n_cells in sizes:
        p = walk_params(0.5, 0.25, phi=_FIB[n_cells] / n_cells, theta=0.25, eps=0.2)
        op = build_realified_walk(p, n_cells)
        op.matrix = op.matrix + _noise(rng, op.matrix.shape, perturb)
        spec = eigendecompose(op, tol_circle=1e-6)
        worst = max(worst, pairing_residual(spec, "pseudo"))
    record("pseudo_pairing_realified", worst, 1e-6)

    worst = 0.0
    for n_cells in sizes:
        p = walk_params(0.5, 0.25, phi=_FIB[n_cells] / n_cells, theta=0.25,
                        eps=0.2, eta=0.03)
        spec = eigendecompose(timeframe(p, n_cells), tol_circle=1e-6)
        worst = max(worst, pairing_residual(spec, "chiral"))
    record("chiral_pairing_timeframe", worst, 1e-6)

    n_cells = sizes[-1]
    p = walk_params(0.6, 0.45, phi=_FIB[n_cells] / n_cells, theta=0.25,
                    eps=0.12, eta=0.04)
    res = symmetry_residuals(build_realified_walk(p, n_cells))
    record("pseudo_unitarity_residual", res["pseudo_unitarity"], 1e-8)
    record("pt_residual_eta_flipped", res["pt_eta_flipped"], 1e-8)
    res0 = symmetry_residuals(build_realified_walk(p.replace(eta=0.0), n_cells))
    record("pt_residual_reciprocal", res0["pt"], 1e-8)

    # transfer-matrix identities
    worst_det = worst_conj = worst_dual = 0.0
    for _ in range(100):
        p = _random_params(rng)
        n = int(rng.integers(-40, 40))
        z = complex((0.5 + rng.uniform(0.0, 1.5)) * np.exp(2j * np.pi * rng.uniform(0, 1)))
        q11, _, _, q22 = coin_entries(p.coupling2, n * p.phi + p.theta, p.eps)
        t = transfer_matrix(n, z, p)
        det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
        target = math.exp(2.0 * TWO_PI * p.eta) * q11 / q22
        worst_det = max(worst_det, abs(det - target) / abs(target))
        t0 = transfer_matrix(n, z, p.replace(eta=0.0))
        conj = np.diag([math.exp(math.pi * p.eta), math.exp(-math.pi * p.eta)])
        target_m = math.exp(TWO_PI * p.eta) * conj @ t0 @ np.diag(np.diag(conj)[::-1])
        worst_conj = max(worst_conj, np.abs(t - target_m).max() / np.abs(t).max())
        dual = transfer_matrix_dual(n, z, p)
        swapped = walk_params(p.l2, p.l1, phi=p.phi, theta=p.theta, eps=p.eta, eta=p.eps)
        mirror = np.conj(transfer_matrix(n, 1.0 / np.conj(z), swapped))
        worst_dual = max(worst_dual, np.abs(dual - mirror).max() / np.abs(dual).max())
    record("transfer_det_identity", worst_det, 1e-12)
    record("transfer_eta_conjugation", worst_conj, 1e-12)
    record("transfer_dual_relation", worst_dual, 1e-12)

    worst = 0.0
    n_cells = sizes[-1]
    p = _random_params(rng, phi=_FIB[n_cells] / n_cells)
    spec = eigendecompose(build_walk(p, n_cells, warn=False), want_vectors=True)
    for k in map(int, rng.integers(0, 2 * n_cells, 4)):
        z, vec = complex(spec.eigenvalues[k]), spec.eigenvectors[:, k]
        for n in range(1, n_cells - 1):
            t = transfer_matrix(n, z, p)
            lhs = np.array([vec[2 * (n + 1)], vec[2 * n + 1]])
            rhs = t @ np.array([vec[2 * n], vec[2 * (n - 1) + 1]])
            worst = max(worst, np.abs(lhs - rhs).max())
    record("eigenstate_recursion", worst, 1e-8)

    if not quick:
        p = walk_params(0.5, 0.25, eps=0.2)
        eigs = np.linalg.eigvals(build_walk(p, 89, warn=False).matrix)
        radii = np.abs(eigs)
        z = complex(eigs[int(np.argmin(np.abs(radii - np.median(radii))))])
        numeric = lyapunov_numeric(z, p, n_steps=20_000, n_phases=8)
        closed = lyapunov_closed_form(p)
        record("lyapunov_numeric_vs_closed", abs(numeric.value - closed.right), 0.02)

        p = walk_params(0.9, 0.5, phi=55 / 89, theta=0.0)
        spec0 = eigendecompose(build_walk(p, 89, warn=False))
        z_gap = complex(gap_points(spec0, 7)[6])
        res18 = winding_number(z_gap, 0.18, p, 89, m_theta=1024)
        record("winding_quantization_residual", res18.residual, 0.05)
        record("winding_value_error", abs(res18.value - (-1)), 0.5)

    return results

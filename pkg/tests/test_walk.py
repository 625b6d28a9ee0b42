import math
import warnings

import numpy as np
import pytest

from conftest import FIB, fib_params, ring_eigenvalues
from puamo import (GOLDEN_MEAN, SingularBranchError, apply_walk,
                   build_dual_walk, build_realified_walk, build_walk,
                   cmv_factorize, delta_state, duality_unitary, evolve,
                   shift_matrix, skin_conjugate, spectral_distance,
                   symmetry_operators, timeframe, walk_params)
from puamo.walk import _principal_sqrt_2x2


def random_point(rng, **overrides):
    kw = dict(
        phi=rng.uniform(0.05, 0.95),
        theta=rng.uniform(0.0, 1.0),
        eps=rng.uniform(-0.25, 0.25),
        eta=rng.uniform(-0.25, 0.25),
    )
    kw.update(overrides)
    return walk_params(rng.uniform(0.15, 1.0), rng.uniform(0.15, 1.0), **kw)


class TestBuildWalk:
    def test_unitary_at_real_parameters(self):
        p = fib_params(0.5, 0.25, 55, theta=0.3)
        w = build_walk(p, 55).matrix
        assert np.abs(w.conj().T @ w - np.eye(110)).max() < 1e-12
        assert np.abs(np.abs(np.linalg.eigvals(w)) - 1.0).max() < 1e-10

    def test_perfect_shift_is_isometry(self, rng):
        p = walk_params(1.0, 1.0, phi=0.0, theta=0.0)
        w = build_walk(p, 16).matrix
        # signed-permutation structure: one unit entry per row
        assert np.all(np.isclose(np.abs(w[np.abs(w) > 1e-14]), 1.0))
        assert (np.abs(w) > 1e-14).sum() == 32
        x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        assert np.linalg.norm(w @ x) == pytest.approx(np.linalg.norm(x), rel=1e-12)

    def test_matrix_free_agreement(self, rng):
        worst = 0.0
        for _ in range(50):
            p = random_point(rng)
            n_cells = int(rng.integers(2, 17))
            for bc in ("periodic", "open"):
                dense = build_walk(p, n_cells, bc, warn=False).matrix
                psi = rng.standard_normal(2 * n_cells) + 1j * rng.standard_normal(2 * n_cells)
                worst = max(worst, np.abs(dense @ psi - apply_walk(p, psi, bc)).max())
        assert worst < 1e-12

    def test_small_ring_rejected(self):
        with pytest.raises(ValueError):
            build_walk(walk_params(0.5, 0.5), 1)

    def test_warns_off_approximant(self):
        with pytest.warns(UserWarning, match="convergent"):
            build_walk(walk_params(0.5, 0.5, phi=GOLDEN_MEAN), 90)


class TestApplyWalk:
    def test_delta_state_shifts(self):
        p = walk_params(1.0, 1.0, phi=0.0, theta=0.0)
        up = delta_state(8, cell=3, chirality="+")
        out = apply_walk(p, up)
        assert abs(out[2 * 4]) == pytest.approx(1.0)
        down = delta_state(8, cell=3, chirality="-")
        out = apply_walk(p, down)
        assert abs(out[2 * 2 + 1]) == pytest.approx(1.0)

    def test_norm_preserved_at_real_parameters(self, rng):
        p = fib_params(0.45, 0.8, 34, theta=0.2)
        psi = rng.standard_normal(68) + 1j * rng.standard_normal(68)
        assert np.linalg.norm(apply_walk(p, psi)) == pytest.approx(
            np.linalg.norm(psi), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_walk(walk_params(0.5, 0.5), np.ones(7))


class TestSkinConjugate:
    def test_periodic_similarity(self):
        p = walk_params(0.6, 0.3, phi=3 / 5, eps=0.1, eta=0.05)
        op = build_walk(p, 5, warn=False)
        skin = skin_conjugate(op)
        assert skin.form == "skin"
        assert spectral_distance(np.linalg.eigvals(op.matrix),
                                 np.linalg.eigvals(skin.matrix)) < 1e-8

    def test_open_bc_gives_reciprocal_matrix_exactly(self):
        p = walk_params(0.6, 0.3, phi=3 / 5, eps=0.1, eta=0.2)
        skin = skin_conjugate(build_walk(p, 5, "open", warn=False))
        reference = build_walk(p.replace(eta=0.0), 5, "open", warn=False)
        assert np.array_equal(skin.matrix, reference.matrix)

    def test_identity_at_zero_eta(self):
        p = walk_params(0.6, 0.3, phi=3 / 5, eps=0.1, eta=0.0)
        op = build_walk(p, 5, warn=False)
        assert np.allclose(skin_conjugate(op).matrix, op.matrix, atol=1e-15)

    def test_roundtrip(self):
        p = walk_params(0.6, 0.3, phi=3 / 5, eta=0.04)
        op = build_walk(p, 5, warn=False)
        back = skin_conjugate(skin_conjugate(op, "forward"), "inverse")
        assert np.allclose(back.matrix, op.matrix, atol=1e-15)

    def test_overflow_guard(self):
        p = walk_params(0.6, 0.3, phi=8 / 13, eta=9.0)
        op = build_walk(p, 13, warn=False)
        with pytest.raises(OverflowError):
            skin_conjugate(op)

    def test_direction_validation(self):
        op = build_walk(walk_params(0.6, 0.3, phi=3 / 5), 5, warn=False)
        with pytest.raises(ValueError):
            skin_conjugate(op, "sideways")
        with pytest.raises(ValueError):
            skin_conjugate(op, "inverse")  # not in skin form


class TestCmvFactorization:
    def test_reassembly(self, rng):
        for _ in range(10):
            p = random_point(rng)
            n_cells = int(rng.integers(2, 13))
            f = cmv_factorize(p, n_cells)
            w = build_walk(p, n_cells, warn=False).matrix
            assert np.abs(f.assemble_l() @ f.assemble_m() - w).max() < 1e-12

    def test_unitary_blocks_at_real_parameters(self):
        f = cmv_factorize(fib_params(0.6, 0.45, 8, theta=0.3), 8)
        for blocks in (f.l_blocks, f.m_blocks):
            for b in blocks:
                assert np.abs(b.conj().T @ b - np.eye(2)).max() < 1e-14

    def test_full_shift_coupling_gives_swap_blocks(self):
        f = cmv_factorize(walk_params(1.0, 0.5, phi=3 / 5), 5)
        for b in f.l_blocks:
            assert np.allclose(b, np.array([[0, 1], [1, 0]]), atol=1e-15)


class TestDuality:
    def test_spectra_match(self, rng):
        for n_cells in (8, 13, 21):
            for _ in range(3):
                p = random_point(rng, phi=FIB[n_cells] / n_cells)
                d = spectral_distance(ring_eigenvalues(p, n_cells),
                                      np.linalg.eigvals(build_dual_walk(p, n_cells).matrix))
                assert d < 1e-8

    def test_unitary_equivalence_is_exact(self, rng):
        p = random_point(rng, phi=8 / 13)
        w = build_walk(p, 13, warn=False).matrix
        u = duality_unitary(p, 13)
        assert np.abs(u.conj().T @ u - np.eye(26)).max() < 1e-12
        assert np.abs(u @ w @ u.conj().T - build_dual_walk(p, 13).matrix).max() < 1e-12

    def test_self_dual_at_criticality(self):
        p = fib_params(0.6, 0.6, 21, theta=0.0)
        w = build_walk(p, 21, warn=False).matrix
        dual = build_dual_walk(p, 21).matrix
        assert spectral_distance(np.linalg.eigvals(w), np.linalg.eigvals(w.T)) < 1e-10
        assert spectral_distance(np.linalg.eigvals(w), np.linalg.eigvals(dual)) < 1e-8

    def test_requires_approximant_denominator(self):
        with pytest.raises(ValueError, match="denominator"):
            build_dual_walk(walk_params(0.5, 0.25, phi=GOLDEN_MEAN), 90)


class TestTimeframe:
    def test_block_roots_multiply_back(self, rng):
        from puamo.params import realified_entries
        p = random_point(rng, theta=0.25, phi=8 / 13)
        d, c = realified_entries(p.coupling2, np.arange(13) * p.phi, p.eps)
        for k in range(13):
            block = np.array([[d[k], -c[k]], [c[k], d[k]]])
            root = _principal_sqrt_2x2(block, k)
            assert np.abs(root @ root - block).max() < 1e-12

    def test_reciprocal_case_unitary_and_similar_to_realified_walk(self):
        p = fib_params(0.5, 0.25, 21, theta=0.25)
        tf = timeframe(p, 21).matrix
        assert np.abs(tf.conj().T @ tf - np.eye(42)).max() < 1e-12
        wr = build_realified_walk(p, 21).matrix
        assert spectral_distance(np.linalg.eigvals(tf), np.linalg.eigvals(wr)) < 1e-8

    def test_full_coin_coupling_reduces_to_rotated_shift(self):
        p = walk_params(0.6, 1.0, phi=0.0, theta=0.25)
        tf = timeframe(p, 8)
        # all coin blocks coincide, so the timeframe is the shift conjugated
        # by one fixed block rotation and shares the spectrum of S * Q^R
        wr = build_realified_walk(p, 8)
        assert spectral_distance(np.linalg.eigvals(tf.matrix),
                                 np.linalg.eigvals(wr.matrix)) < 1e-10

    def test_negative_axis_branch_error(self):
        with pytest.raises(SingularBranchError):
            _principal_sqrt_2x2(np.diag([-1.0 + 0j, 2.0 + 0j]), 4)

    def test_requires_quarter_theta(self):
        with pytest.raises(ValueError, match="1/4"):
            timeframe(walk_params(0.5, 0.25, phi=8 / 13, theta=0.0), 13)
        with pytest.raises(ValueError, match="1/4"):
            build_realified_walk(walk_params(0.5, 0.25, phi=8 / 13, theta=0.0), 13)


class TestSymmetryOperators:
    def test_involutions(self):
        sym = symmetry_operators(12)
        eye = np.eye(24)
        assert np.abs(sym.parity @ sym.parity - eye).max() < 1e-15
        assert np.abs(sym.chiral @ sym.chiral - eye).max() < 1e-15
        # PT is antilinear: applying it twice conjugates the matrix part once
        assert np.abs(sym.pt_matrix @ sym.pt_matrix.conj() - eye).max() < 1e-15

    def test_pseudo_unitarity_degenerate_unitary_case(self):
        p = fib_params(0.5, 0.25, 13, theta=0.25)
        w = build_realified_walk(p, 13).matrix
        parity = symmetry_operators(13).parity
        assert np.linalg.norm(parity @ np.linalg.inv(w) @ parity - w.conj().T, 2) < 1e-10


class TestEvolve:
    def test_zero_steps_zero_moment(self):
        p = walk_params(0.5, 0.25)
        records = evolve(p, delta_state(32), 0)
        assert records == [(0, 0.0, 1.0)]

    def test_perfect_shift_quadratic_moment(self):
        p = walk_params(1.0, 1.0, phi=0.0, theta=0.0)
        records = evolve(p, delta_state(64), 10)
        for t, m2, _ in records:
            assert m2 == pytest.approx(float(t * t), abs=1e-12)

    def test_subcritical_ballistic_exponent(self):
        p = walk_params(0.5, 0.25, phi=GOLDEN_MEAN)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            records = evolve(p, delta_state(1024), 200)
        steps = np.array([r[0] for r in records[20:]], dtype=float)
        moment = np.array([r[1] for r in records[20:]])
        slope = np.polyfit(np.log(steps), np.log(moment), 1)[0]
        assert 1.8 <= slope <= 2.0

    def test_wrap_warning(self):
        p = walk_params(0.9, 0.5, phi=3 / 5)
        with pytest.warns(UserWarning, match="wrap"):
            evolve(p, delta_state(5), 40)

    def test_negative_steps_rejected(self):
        with pytest.raises(ValueError):
            evolve(walk_params(0.5, 0.5), delta_state(8), -1)


class TestShiftMatrix:
    def test_composition_matches_walk(self, rng):
        p = random_point(rng, phi=5 / 8)
        s = shift_matrix(p, 8)
        coin = np.zeros((16, 16), dtype=complex)
        from puamo.params import coin_matrix
        for n in range(8):
            coin[2 * n:2 * n + 2, 2 * n:2 * n + 2] = coin_matrix(n, p)
        assert np.abs(s @ coin - build_walk(p, 8, warn=False).matrix).max() < 1e-13

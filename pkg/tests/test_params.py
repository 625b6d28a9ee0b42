import math

import numpy as np
import pytest

from puamo import (GOLDEN_MEAN, CouplingPair, FrequencySpec, coin_matrix,
                   convergents, derived_constants, dual_params, realified_coin,
                   regime, walk_params)

TWO_PI = 2.0 * math.pi


class TestConvergents:
    def test_golden_mean_fibonacci_tail(self):
        cv = convergents(GOLDEN_MEAN, 610)
        assert [q for _, q in cv[-5:]] == [89, 144, 233, 377, 610]

    def test_exact_rational_terminates(self):
        assert convergents(1.0 / 3.0, 100) == [(0, 1), (1, 3)]

    def test_pi_fraction_classics(self):
        cv = convergents(math.pi - 3.0, 120)
        assert (1, 7) in cv and (16, 113) in cv

    def test_denominators_strictly_increase_and_coprime(self):
        rng = np.random.default_rng(5)
        for phi in rng.uniform(0.02, 0.98, 25):
            cv = convergents(float(phi), 1000)
            qs = [q for _, q in cv]
            assert qs == sorted(set(qs))
            assert all(math.gcd(p, q) == 1 for p, q in cv)

    def test_approximation_quality(self):
        # every convergent satisfies |phi - p/q| < 1/q^2
        rng = np.random.default_rng(6)
        for phi in rng.uniform(0.02, 0.98, 25):
            for p, q in convergents(float(phi), 1000):
                assert abs(phi - p / q) < 1.0 / q**2

    @pytest.mark.parametrize("phi", [-0.1, 0.0, 1.0, 1.7])
    def test_domain_error(self, phi):
        with pytest.raises(ValueError):
            convergents(phi, 100)

    def test_bad_q_max(self):
        with pytest.raises(ValueError):
            convergents(0.5, 0)


class TestCouplingPair:
    def test_complement_identity(self):
        for lam in (1e-6, 0.3, 0.999, 1.0):
            c = CouplingPair(lam)
            assert abs(c.lam**2 + c.lam_prime**2 - 1.0) < 1e-15

    @pytest.mark.parametrize("lam", [0.0, -0.2, 1.0001])
    def test_rejects_out_of_range(self, lam):
        with pytest.raises(ValueError):
            CouplingPair(lam)


class TestDerivedConstants:
    def test_subcritical_reference_point(self):
        dc = derived_constants(walk_params(0.5, 0.25))
        assert round(dc.L_sharp / TWO_PI, 4) == 0.1188
        assert round(dc.eps0, 4) == 0.3284
        assert dc.L == 0.0

    def test_fig4_reference_point(self):
        dc = derived_constants(walk_params(0.9, 0.5))
        assert dc.L_sharp / TWO_PI == pytest.approx(0.1352, abs=1e-4)
        assert dc.eps0 == pytest.approx(0.2096, abs=1e-4)
        # two-decimal values quoted for this coupling pair
        assert round(dc.L_sharp / TWO_PI, 2) == 0.14
        assert round(dc.eps0, 2) == 0.21

    def test_critical_line(self):
        dc = derived_constants(walk_params(0.7, 0.7))
        assert dc.lambda0 == pytest.approx(1.0, abs=1e-15)
        assert dc.L == dc.L_sharp == 0.0

    def test_lambda0_duality_product(self):
        rng = np.random.default_rng(2)
        for l1, l2 in rng.uniform(0.05, 1.0, (40, 2)):
            a = derived_constants(walk_params(l1, l2))
            b = derived_constants(walk_params(l2, l1))
            assert abs(a.lambda0 * b.lambda0 - 1.0) < 1e-12
            assert abs(a.L - b.L_sharp) < 1e-12

    def test_eps0_defining_relation(self):
        rng = np.random.default_rng(3)
        for l2 in rng.uniform(0.05, 1.0, 40):
            p = walk_params(0.5, l2)
            dc = derived_constants(p)
            assert abs(math.sinh(TWO_PI * dc.eps0) * p.l2 - p.l2p) < 1e-14

    def test_thresholds_depend_on_single_coupling(self):
        a = derived_constants(walk_params(0.3, 0.25))
        b = derived_constants(walk_params(0.9, 0.25))
        assert a.eps0 == b.eps0
        c = derived_constants(walk_params(0.5, 0.25))
        d = derived_constants(walk_params(0.5, 0.8))
        assert c.eta0 == d.eta0


class TestCoin:
    def test_trivial_limit_is_identity(self):
        p = walk_params(0.5, 1.0, phi=0.0, theta=0.0)
        assert np.allclose(coin_matrix(0, p), np.eye(2), atol=1e-15)

    def test_su2_at_real_phase(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            p = walk_params(0.5, rng.uniform(0.05, 1.0), phi=rng.uniform(0.05, 0.95),
                            theta=rng.uniform(0, 1))
            q = coin_matrix(int(rng.integers(-50, 50)), p)
            assert np.abs(q.conj().T @ q - np.eye(2)).max() < 1e-14
            det = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
            assert abs(det - 1.0) < 1e-14

    def test_unit_determinant_for_complex_phase(self):
        p = walk_params(0.5, 0.6, theta=0.37, eps=0.21)
        q = coin_matrix(7, p)
        det = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
        assert abs(det - 1.0) < 1e-12

    def test_near_decoupling_at_eps0(self):
        # at the decoupling phase (tau = 1/4) the small diagonal entry of the
        # coin collapses by more than two orders of magnitude at eps0
        dc = derived_constants(walk_params(0.5, 0.25))
        p_ref = walk_params(0.5, 0.25, theta=0.25, eps=0.0)
        p_eps = walk_params(0.5, 0.25, theta=0.25, eps=0.3284)
        ref = min(abs(coin_matrix(0, p_ref)[0, 0]), abs(coin_matrix(0, p_ref)[1, 1]))
        small = min(abs(coin_matrix(0, p_eps)[0, 0]), abs(coin_matrix(0, p_eps)[1, 1]))
        assert 0.3283 < dc.eps0 < 0.3285
        assert small < 1e-2 * ref


class TestRealifiedCoin:
    def test_real_orthogonal_at_real_phase(self):
        q = realified_coin(3, CouplingPair(0.6), GOLDEN_MEAN, 0.0)
        assert np.abs(q.imag).max() < 1e-15
        assert np.abs(q.T @ q - np.eye(2)).max() < 1e-14

    def test_identity_when_cosine_vanishes(self):
        # n*phi = 1/4 makes the off-diagonal cosine vanish
        q = realified_coin(1, CouplingPair(0.8), 0.25, 0.0)
        assert np.allclose(q, np.eye(2), atol=1e-14)

    def test_unit_determinant(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            q = realified_coin(int(rng.integers(-40, 40)), CouplingPair(rng.uniform(0.05, 1.0)),
                               rng.uniform(0.05, 0.95), rng.uniform(-0.4, 0.4))
            det = q[0, 0] * q[1, 1] - q[0, 1] * q[1, 0]
            assert abs(det - 1.0) < 1e-12


class TestRegimeAndParams:
    @pytest.mark.parametrize("l1,l2,expected", [
        (0.5, 0.25, "subcritical"),
        (0.25, 0.5, "supercritical"),
        (0.7, 0.7, "critical"),
    ])
    def test_regime(self, l1, l2, expected):
        assert regime(walk_params(l1, l2)) == expected

    def test_theta_lands_on_torus(self):
        assert walk_params(0.5, 0.5, theta=1.25).theta == pytest.approx(0.25)
        assert walk_params(0.5, 0.5, theta=-0.25).theta == pytest.approx(0.75)

    def test_vartheta_reconstructed(self):
        p = walk_params(0.5, 0.5, theta=0.3, eps=-0.11)
        assert p.vartheta == pytest.approx(0.3 - 0.11j)

    def test_replace(self):
        p = walk_params(0.5, 0.25, eps=0.1)
        q = p.replace(l2=0.5, eta=0.07)
        assert (q.l1, q.l2, q.eps, q.eta) == (0.5, 0.5, 0.1, 0.07)
        with pytest.raises(TypeError):
            p.replace(bogus=1.0)

    def test_dual_params_involution(self):
        p = walk_params(0.5, 0.25, eps=0.1, eta=-0.07)
        d = dual_params(p)
        assert (d.l1, d.l2, d.eta, d.eps) == (0.25, 0.5, -0.1, 0.07)
        dd = dual_params(d)
        assert (dd.l1, dd.l2, dd.eta, dd.eps) == (p.l1, p.l2, p.eta, p.eps)

    def test_frequency_spec_accessors(self):
        f = FrequencySpec.from_phi(GOLDEN_MEAN, q_max=100)
        assert f.has_denominator(89)
        assert f.approximant(89) == 55 / 89
        assert not f.has_denominator(90)
        with pytest.raises(ValueError):
            f.approximant(90)

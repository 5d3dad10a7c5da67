import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qreset.circuit import (CircuitParams, QubitTarget, angular, build_effective_interaction, build_h1,
                            calibrate_drive, coupling_coefficients, drive_ratio_residual, effective_rabi,
                            frame_transform_oracle, mode_frequencies, rotated_ladder, rotated_pauli,
                            rotation_matrix, target_state, verify_target_eigenstate)
from qreset.operators import destroy, embed, identity, pauli
from qreset.rates import eta_lambda, polarization_rate

thetas = st.floats(0.0, np.pi)
phis = st.floats(0.0, 2 * np.pi, exclude_max=True)


class TestCalibration:
    def test_fig3_qubit3(self):
        d = calibrate_drive(QubitTarget(0.0, 0.0), 100.0, 5.7)
        assert d.omega == 0 and np.isclose(d.delta_varpi, 200) and np.isclose(d.f_n, 5.9)

    def test_fig3_qubit1(self):
        d = calibrate_drive(QubitTarget(np.pi / 2, np.pi), 100.0, 5.7)
        assert np.isclose(d.omega, 100) and np.isclose(d.f_n, 5.7)

    def test_fig3_qubit2(self):
        d = calibrate_drive(QubitTarget(np.pi / 2, np.pi / 2), 100.0, 5.7)
        assert np.isclose(d.omega, 100j) and np.isclose(d.f_n, 5.7)

    @given(thetas, phis, st.floats(1.0, 500.0))
    def test_ratio_invariants(self, th, ph, ob):
        tgt = QubitTarget(th, ph)
        d = calibrate_drive(tgt, ob, 5.7)
        assert drive_ratio_residual(d, tgt) < 1e-12
        assert abs(effective_rabi(d) - ob) / ob < 1e-12

    def test_effective_rabi_examples(self):
        from qreset.circuit import DriveSetting
        assert effective_rabi(DriveSetting(100, 0, 0, 5.7, 100)) == 100
        assert effective_rabi(DriveSetting(0, 0, 200, 5.9, 100)) == 100

    def test_invalid_target(self):
        with pytest.raises(ValueError):
            QubitTarget(4.0, 0.0)
        with pytest.raises(ValueError):
            QubitTarget(0.0, 7.0)


class TestRotatedFrame:
    def test_identity_rotation(self):
        for op, ax in zip(rotated_pauli(QubitTarget(0, 0)), "xyz"):
            np.testing.assert_allclose(op.dense(), pauli(ax).dense())

    def test_equator(self):
        np.testing.assert_allclose(rotated_pauli(QubitTarget(np.pi / 2, 0))[2].dense(), -pauli("x").dense(),
                                   atol=1e-15)

    @given(thetas, phis)
    def test_orthogonal_and_pauli_algebra(self, th, ph):
        tgt = QubitTarget(th, ph)
        R = rotation_matrix(tgt)
        assert np.max(np.abs(R @ R.T - np.eye(3))) < 1e-12
        sx, sy, sz = (o.dense() for o in rotated_pauli(tgt))
        for s in (sx, sy, sz):
            assert np.allclose(s, s.conj().T) and np.allclose(s @ s, np.eye(2))
        assert np.allclose(sx @ sy + sy @ sx, 0)
        np.testing.assert_allclose(np.linalg.eigvalsh(sz), [-1, 1], atol=1e-12)
        np.testing.assert_allclose(sx @ sy, 1j * sz, atol=1e-12)

    @given(thetas, phis)
    def test_target_eigenstate(self, th, ph):
        tgt = QubitTarget(th, ph)
        psi, res = verify_target_eigenstate(tgt)
        assert res < 1e-12
        # matches cos(t/2)|0> + e^{i p} sin(t/2)|1> up to phase
        assert abs(abs(np.vdot(target_state(tgt), psi)) - 1) < 1e-12

    def test_eigenstate_examples(self):
        psi, res = verify_target_eigenstate(QubitTarget(0.0, 1.0))
        np.testing.assert_allclose(psi, [1, 0], atol=1e-14)
        assert res < 1e-14
        psi, _ = verify_target_eigenstate(QubitTarget(np.pi / 2, 0))
        np.testing.assert_allclose(psi, np.array([1, 1]) / np.sqrt(2), atol=1e-12)
        psi, _ = verify_target_eigenstate(QubitTarget(np.pi / 2, np.pi / 2))
        # dense eigendecomposition oracle: sigma_y eigenvector with eigenvalue -1
        w, V = np.linalg.eigh(np.array([[0, 1j], [-1j, 0]]))
        v = V[:, 0] * abs(V[0, 0]) / V[0, 0]
        np.testing.assert_allclose(psi, v, atol=1e-12)
        np.testing.assert_allclose(psi, np.array([1, 1j]) / np.sqrt(2), atol=1e-12)

    def test_ladder(self):
        sp_, sm = rotated_ladder(QubitTarget(0, 0))
        np.testing.assert_allclose(sp_.dense(), pauli("plus").dense())
        np.testing.assert_allclose(sm.dense(), pauli("minus").dense())


class TestModes:
    def test_paper_values(self):
        ms = mode_frequencies(CircuitParams())
        assert ms.Delta == 0 and ms[(-1, -1)] == 0
        assert ms[(1, 1)] == 600
        assert ms[(-1, 0)] == ms[(1, -1)] == 200
        assert len(ms.frequencies) == 6

    def test_detuning_property(self):
        p = CircuitParams().with_detuning(7.5)
        assert np.isclose(p.detuning, 7.5)
        assert np.isclose(mode_frequencies(p)[(-1, -1)], 7.5)

    def test_delta_omega(self):
        assert CircuitParams().delta_omega == 300


def pair_mode_oracle(N):
    """Branch coefficients from explicit symmetric/antisymmetric pair modes."""
    M = 2 * N + 2
    out = {}
    for l in (-1, 1):
        P = np.zeros((M, M))
        for k in range(N + 1):
            u = np.zeros(M)
            u[2 * k], u[2 * k + 1] = 1.0, float(l)
            u /= np.linalg.norm(u)
            P += np.outer(u, u)
        A = np.zeros((M, N))
        for n in range(N):
            c = np.zeros(M)
            c[2 * n + 1] = c[2 * n + 2] = 1
            A[:, n] = P @ c
        out[l] = A
    return out


class TestCouplingTable:
    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_matches_pair_oracle(self, N):
        tbl = coupling_coefficients(CircuitParams(N=N), [QubitTarget()] * N)
        oracle = pair_mode_oracle(N)
        for l in (-1, 1):
            np.testing.assert_allclose(tbl.A[l], oracle[l], atol=1e-12)

    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_invariants(self, N):
        tbl = coupling_coefficients(CircuitParams(N=N), [QubitTarget()] * N)
        for n in range(1, N + 1):
            for l in (-1, 1):
                assert tbl.support(l, n) == [2 * n - 1, 2 * n, 2 * n + 1, 2 * n + 2]
                col = tbl.A[l][:, n - 1]
                np.testing.assert_allclose(np.abs(col[col != 0]), 0.5, atol=1e-12)
                assert abs(np.sum(col ** 2) - 1) < 1e-12
            np.testing.assert_allclose(tbl.A[-1][2 * n - 2:2 * n + 2, n - 1], [-0.5, 0.5, 0.5, -0.5], atol=1e-12)

    @settings(max_examples=30)
    @given(thetas, phis, st.floats(-40.0, 40.0))
    def test_rate_consistency(self, th, ph, delta):
        p = CircuitParams()
        tbl = coupling_coefficients(p, [QubitTarget(th, ph)])
        eta, _ = eta_lambda(angular(p.kappa), angular(delta))
        lhs = np.sum(2 * eta * np.abs(angular(tbl.Theta[-1][:, 0])) ** 2)
        rhs = polarization_rate(th, angular(delta), angular(p.g), angular(p.kappa))
        assert abs(lhs - rhs) <= 1e-10 * max(rhs, 1e-300) + 1e-300

    def test_theta_coefficients(self):
        tbl = coupling_coefficients(CircuitParams(), [QubitTarget(np.pi / 3, 0.4)])
        assert np.isclose(tbl.theta_minus[0], np.exp(0.4j) * (np.cos(np.pi / 3) + 1) / 2)
        assert np.isclose(tbl.theta_plus[0], np.exp(0.4j) * (np.cos(np.pi / 3) - 1) / 2)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            coupling_coefficients(CircuitParams(N=2), [QubitTarget()])


class TestH1:
    def test_dimension_hermitian(self):
        p = CircuitParams(N=1, fock_levels=2)
        H = build_h1(p, [calibrate_drive(QubitTarget(0.3, 1.0), p.omega_bar, p.f_L)])
        assert H.dim == 32 and H.hermiticity_residual() < 1e-12

    def test_vacuum_element(self):
        p = CircuitParams(N=1, fock_levels=2)
        d = calibrate_drive(QubitTarget(0.0, 0.0), p.omega_bar, p.f_L)
        H = build_h1(p, [d]).dense()
        assert np.isclose(H[0, 0], -angular(d.delta_varpi) / 2)

    @pytest.mark.parametrize("N", [1, 2])
    def test_hopping_spectrum(self, N):
        p = CircuitParams(N=N, fock_levels=2)
        H = build_h1(p, [calibrate_drive(QubitTarget(), p.omega_bar, p.f_L)] * N).dense()
        spec = p.spec()
        M = p.n_resonators
        idx = []
        for m in range(M):
            levels = [0] * (M + N)
            levels[m] = 1
            idx.append(int(np.ravel_multi_index(levels, spec.dims)))
        block = H[np.ix_(idx, idx)] - H[0, 0] * np.eye(M)
        w = np.sort(np.linalg.eigvalsh(block)) / angular(1.0)
        expect = np.sort([p.delta_omega - p.v] * (N + 1) + [p.delta_omega + p.v] * (N + 1))
        np.testing.assert_allclose(w, expect, atol=1e-9)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            build_h1(CircuitParams(N=2, fock_levels=2), [calibrate_drive(QubitTarget(), 100, 5.7)])


class TestEffectiveInteraction:
    def oracle(self, p, targets):
        """Dense assembly straight from the coupling formula."""
        spec = p.spec()
        a = [embed(destroy(p.fock_levels), f"r{m}", spec).dense() for m in range(1, p.n_resonators + 1)]
        H = np.zeros((spec.dim, spec.dim), complex)
        for n, t in enumerate(targets):
            sx, sy, _ = (o.dense() for o in rotated_pauli(t))
            sm = embed(type(rotated_pauli(t)[0])((sx - 1j * sy) / 2, pauli("z").spec), f"q{n + 1}", spec).dense()
            amp = angular(p.g) * np.exp(1j * t.phi) * (1 + np.cos(t.theta)) / 4
            for k, sign in zip(range(2 * n, 2 * n + 4), (-1, 1, 1, -1)):
                term = sign * amp * a[k].conj().T @ sm
                H += term + term.conj().T
        return H

    def test_matches_oracle(self):
        p = CircuitParams(N=2, fock_levels=2)
        targets = [QubitTarget(0.4, 1.1), QubitTarget(2.0, 5.0)]
        H = build_effective_interaction(p, targets).dense()
        assert np.max(np.abs(H - self.oracle(p, targets))) < 1e-12

    def test_theta_pi_block_vanishes(self):
        p = CircuitParams(N=1, fock_levels=2)
        H = build_effective_interaction(p, [QubitTarget(np.pi, 0.0)])
        assert H.matrix.count_nonzero() == 0 or np.max(np.abs(H.matrix.data)) < 1e-14

    def test_theta_zero_magnitude(self):
        p = CircuitParams(N=1, fock_levels=2)
        H = build_effective_interaction(p, [QubitTarget()]).dense()
        mags = np.unique(np.round(np.abs(H[np.abs(H) > 1e-12]), 10))
        np.testing.assert_allclose(mags, [angular(p.g) / 2])

    def test_detuned_adds_number(self):
        p = CircuitParams(N=1, fock_levels=2)
        t = [QubitTarget()]
        diff = (build_effective_interaction(p, t, Delta=3.0) - build_effective_interaction(p, t)).dense()
        n_tot = sum(embed(destroy(2).dag() @ destroy(2), f"r{m}", p.spec()).dense() for m in range(1, 5))
        np.testing.assert_allclose(diff, angular(3.0) * n_tot, atol=1e-12)


class TestFrameOracle:
    def test_t_zero(self):
        res = frame_transform_oracle(100, 100, 300, 0.0)
        assert max(res.values()) < 1e-14

    def test_examples(self):
        ob = 100.0
        t = np.pi / 4 / angular(ob)
        assert frame_transform_oracle(ob, 100, 300, t)["sigma_x"] < 1e-10
        t = np.pi / 3 / angular(100)
        res = frame_transform_oracle(100, 100, 300, t)
        assert res["a_p_dag"] < 1e-10 and res["a_q_dag"] < 1e-10

    def test_random_draws(self):
        rng = np.random.default_rng(20)
        for _ in range(20):
            ob, v, dw = rng.uniform(10, 300, size=3)
            t = rng.uniform(0, 0.05)
            tgt = QubitTarget(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            assert max(frame_transform_oracle(ob, v, dw, t, tgt).values()) < 1e-10


class TestParams:
    @pytest.mark.parametrize("kw", [{"N": 0}, {"fock_levels": 1}, {"g": -1.0}, {"T_c": -0.1},
                                    {"temp_convention": "x"}, {"kappa": float("nan")}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            CircuitParams(**kw)

    def test_spec(self):
        assert CircuitParams(N=3, fock_levels=2).spec().dim == 2048

"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict; the lines are printed in the
pytest terminal summary (see conftest.py) and when this file is run directly.
"""

import math
import time

import numpy as np
import pytest

from qreset.circuit import (CircuitParams, QubitTarget, angular, calibrate_drive, coupling_coefficients,
                            drive_ratio_residual, frame_transform_oracle, verify_target_eigenstate)
from qreset.experiment import config_from_dict, parse_config, run_config, run_scenario
from qreset.rates import (eta_lambda, fit_exponential, polarization_rate, polarization_time, steady_state_sz,
                          tcl2_numeric_rate)

RESULTS = []

G2, K20 = angular(2.0), angular(20.0)


def report(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def n1_config(theta, fock_levels=3, delta_over_kappa=0.0, t_final=None, n_samples=121, solver="master",
              phi=None, extra=""):
    phi = (math.pi if theta > 0 else 0.0) if phi is None else phi
    T = polarization_time(theta, delta_over_kappa * K20, G2, K20)
    t_final = 3 * T if t_final is None else t_final
    text = (f"circuit: {{N: 1, fock_levels: {fock_levels}, g: 2.0, kappa: 20.0, T_c: 0.0, "
            f"delta_over_kappa: {delta_over_kappa}}}\n"
            f"targets: [{{theta: {theta!r}, phi: {phi!r}}}]\n"
            f"initial_state: {{preset: maximally_mixed_rotated}}\n"
            f"sim: {{t_final: {t_final!r}, n_samples: {n_samples}}}\n"
            f"solver: {solver}\n" + extra)
    return parse_config(text), T


def fitted_time(cfg, T_guess):
    table = run_config(cfg)
    t, y = table.series("q1", "sz")
    T, rms, poor = fit_exponential((t, y), T_guess=T_guess)
    return T, rms, table


@pytest.fixture(scope="module")
def theta0_run():
    cfg, Tg = n1_config(0.0, t_final=3.2, n_samples=321)
    t0 = time.perf_counter()
    T, rms, table = fitted_time(cfg, Tg)
    return {"T": T, "rms": rms, "table": table, "elapsed": time.perf_counter() - t0, "T_guess": Tg}


class TestAcceptance:
    def test_c01_rate_formula(self):
        gamma = polarization_rate(0.0, 0.0, G2, K20)
        exact = 4 * G2 ** 2 / K20
        gt = gamma * 3.2
        ok = math.isclose(gamma, exact, rel_tol=1e-12) and abs(gamma - 5.03) < 0.01 and abs(gt - 16) / 16 <= 0.01
        assert report(1, ok, f"Gamma={gamma:.4f}/us (4g^2/kappa={exact:.4f}), Gamma*3.2us={gt:.3f} vs 16 +-1%")

    def test_c02_temperature_ladder(self):
        expected = {0.0: -1.000, 0.3: -0.995, 0.4: -0.979, 0.5: -0.948}
        got = {T: steady_state_sz(6.0, T, "paper") for T in expected}
        ok = all(abs(got[T] - expected[T]) <= 1e-3 for T in expected)
        detail = ", ".join(f"{T:g}K: {got[T]:.4f} (want {expected[T]:.3f})" for T in expected)
        assert report(2, ok, detail)

    def test_c03_master_vs_rate(self, theta0_run):
        T = theta0_run["T"]
        err = abs(T - 0.199) / 0.199
        ok = err <= 0.15 and theta0_run["elapsed"] <= 120
        assert report(3, ok, f"fitted T={T:.4f}us vs 0.199us ({100 * err:.1f}% off, limit 15%), "
                             f"runtime {theta0_run['elapsed']:.1f}s (limit 120s)")

    @pytest.mark.slow
    def test_c04_theta_ratio(self, theta0_run):
        cfg, Tg = n1_config(math.pi / 2, n_samples=121)
        t0 = time.perf_counter()
        T90, _, _ = fitted_time(cfg, Tg)
        elapsed = time.perf_counter() - t0
        ratio = T90 / theta0_run["T"]
        ok = abs(ratio / 4 - 1) <= 0.10
        assert report(4, ok, f"T(pi/2)={T90:.4f}us, T(0)={theta0_run['T']:.4f}us, rate ratio {ratio:.3f} "
                             f"vs 4 +-10% (theta=pi/2 run {elapsed:.0f}s)")

    def test_c05_detuning_lorentzian(self, theta0_run):
        ratios = {}
        for dk in (0.5, 1.0):
            cfg, Tg = n1_config(0.0, delta_over_kappa=dk)
            assert math.isclose(cfg.circuit.detuning, dk * 20.0)
            T, _, _ = fitted_time(cfg, Tg)
            ratios[dk] = theta0_run["T"] / T
        want = {0.5: 0.5, 1.0: 0.2}
        ok = all(abs(ratios[d] / want[d] - 1) <= 0.15 for d in want)
        assert report(5, ok, ", ".join(f"Gamma({d:g}kappa)/Gamma(0)={ratios[d]:.3f} (want {want[d]})"
                                       for d in want))

    def _fig3(self, name, n, bounds):
        t0 = time.perf_counter()
        table = run_scenario(name)
        elapsed = time.perf_counter() - t0
        finals = [table.final(f"q{k}", "sz") for k in (1, 2, 3)]
        t_end = table.series("q1", "sz")[0][-1]
        ok = all(f <= b for f, b in zip(finals, bounds)) and elapsed <= 1800 and table.meta["n_traj"] >= 200
        labels = ("<sx1>", "<sy2>", "<sz3>")
        detail = ", ".join(f"{l}={f:.4f} (<= {b})" for l, f, b in zip(labels, finals, bounds))
        return report(n, ok, f"t={t_end:.2f}us: {detail}; {table.meta['n_traj']} traj, "
                             f"runtime {elapsed:.0f}s (limit 1800s)")

    @pytest.mark.slow
    def test_c06_fig3a(self):
        assert self._fig3("fig3a", 6, (-0.95, -0.95, -0.99))

    @pytest.mark.slow
    def test_c07_fig3c(self):
        assert self._fig3("fig3c", 7, (-0.97, -0.97, -0.99))

    def test_c08_tcl2_oracle(self):
        worst = 0.0
        for th in np.linspace(0.0, 0.9 * math.pi, 5):
            for d in (0.0, K20 / 2, K20):
                r = tcl2_numeric_rate(th, d, G2, K20) / polarization_rate(th, d, G2, K20)
                worst = max(worst, abs(r - 1))
        assert report(8, worst <= 5e-3, f"max |tcl2/closed - 1| = {worst:.2e} on 5x3 (theta, Delta) grid "
                                        f"(limit 5e-3)")

    @pytest.mark.slow
    def test_c09_structural(self):
        checks = {}
        rng = np.random.default_rng(99)
        frame = 0.0
        for _ in range(20):
            ob, v, dw = rng.uniform(10, 300, size=3)
            tgt = QubitTarget(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
            frame = max(frame, max(frame_transform_oracle(ob, v, dw, rng.uniform(0, 0.05), tgt).values()))
        checks["frame"] = (frame < 1e-10, f"BCH {frame:.1e}")

        p = CircuitParams(N=3)
        tbl = coupling_coefficients(p, [QubitTarget(a, b) for a, b in rng.uniform(0, 3.1, size=(3, 2))])
        support_ok, coeff_err, e11 = True, 0.0, 0.0
        for n in range(1, 4):
            for l in (-1, 1):
                support_ok &= tbl.support(l, n) == [2 * n - 1, 2 * n, 2 * n + 1, 2 * n + 2]
                col = tbl.A[l][:, n - 1]
                coeff_err = max(coeff_err, np.max(np.abs(np.abs(col[col != 0]) - 0.5)), abs(np.sum(col ** 2) - 1))
        for th in np.linspace(0, math.pi, 7):
            for dk in (0.0, 0.5, 1.0):
                t1 = coupling_coefficients(CircuitParams(), [QubitTarget(th, 1.0)])
                eta, _ = eta_lambda(K20, dk * K20)
                lhs = np.sum(2 * eta * np.abs(angular(t1.Theta[-1][:, 0])) ** 2)
                rhs = polarization_rate(th, dk * K20, G2, K20)
                e11 = max(e11, abs(lhs - rhs) / max(rhs, 1e-300) if rhs > 0 else lhs)
        checks["coupling"] = (support_ok and coeff_err < 1e-12 and e11 < 1e-10,
                              f"coupling |A|,sum err {coeff_err:.1e}, E11 rel {e11:.1e}")

        calib = eig = 0.0
        for th in np.linspace(0, math.pi, 9):
            for ph in np.linspace(0, 2 * math.pi, 9, endpoint=False):
                tgt = QubitTarget(th, ph)
                calib = max(calib, drive_ratio_residual(calibrate_drive(tgt, 100.0, 5.7), tgt))
                eig = max(eig, verify_target_eigenstate(tgt)[1])
        checks["calibration"] = (calib < 1e-12, f"calibration {calib:.1e}")
        checks["eigenstate"] = (eig < 1e-12, f"eigenstate {eig:.1e}")

        # trajectories vs master on the N=1 validation scenario (states validated at every sample)
        cfg_m, _ = n1_config(math.pi / 2, fock_levels=2, t_final=1.6, n_samples=41)
        master = run_config(cfg_m)
        cfg_t, _ = n1_config(math.pi / 2, fock_levels=2, t_final=1.6, n_samples=41, solver="trajectories")
        raw = cfg_t.to_dict()
        raw["sim"].update(n_traj=1000, seed=2024)
        cfg_t = config_from_dict(raw)
        traj = run_config(cfg_t)
        m = np.array([r[3] for r in master.rows])
        tv = np.array([r[3] for r in traj.rows])
        se = np.array([r[4] for r in traj.rows])
        within = float(np.mean(np.abs(tv - m) <= 3 * se))
        checks["traj_vs_master"] = (within >= 0.95, f"traj within 3SE of master at {100 * within:.0f}% of samples")

        rerun = run_config(cfg_t)
        checks["rerun"] = (rerun.to_csv() == traj.to_csv(), "byte-identical rerun")
        ok = all(v[0] for v in checks.values())
        detail = "; ".join(f"{v[1]} [{'ok' if v[0] else 'FAIL'}]" for v in checks.values())
        assert report(9, ok, detail)

    def test_c10_cutoff_doubling(self, theta0_run):
        cfg, Tg = n1_config(0.0, fock_levels=6, t_final=3.2, n_samples=321)
        table = run_config(cfg)
        a = theta0_run["table"].final("q1", "sz")
        b = table.final("q1", "sz")
        ok = abs(a - b) < 5e-3
        assert report(10, ok, f"final <sz> d=3: {a:.6f}, d=6: {b:.6f}, |diff|={abs(a - b):.1e} (limit 5e-3)")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))

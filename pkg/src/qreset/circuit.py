"""Network parameters, drive calibration and Hamiltonians.

Frequencies are given as f = omega / 2pi (GHz for carriers, MHz for
couplings and rates) and converted to angular units (rad/us) by
:func:`angular`.  Because 1 MHz = 1 / us, the conversion is a factor 2pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .operators import (
    HilbertSpec,
    Operator,
    destroy,
    embed,
    identity,
    matrix_exp_small,
    pauli,
    tensor,
    zero,
)

TWO_PI = 2.0 * np.pi
TEMP_CONVENTIONS = ("physical", "paper")


def angular(f_mhz: float) -> float:
    """MHz (as omega/2pi) to rad/us."""
    return TWO_PI * f_mhz


@dataclass(frozen=True)
class CircuitParams:
    """Constants of the N-qubit, (2N+2)-resonator network.

    ``f_c`` and ``f_L`` are in GHz; ``v``, ``g``, ``kappa`` and ``omega_bar``
    in MHz; ``T_c`` in kelvin.
    """

    N: int = 1
    f_c: float = 6.0
    f_L: float = 5.7
    v: float = 100.0
    g: float = 2.0
    kappa: float = 20.0
    T_c: float = 0.0
    fock_levels: int = 3
    temp_convention: str = "physical"
    omega_bar: float = 100.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if int(self.fock_levels) != self.fock_levels or self.fock_levels < 2:
            raise ValueError(f"fock_levels must be an integer >= 2, got {self.fock_levels!r}")
        for name in ("f_c", "f_L", "v", "g", "kappa", "omega_bar"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be positive and finite, got {val!r}")
        if not np.isfinite(self.T_c) or self.T_c < 0:
            raise ValueError(f"T_c must be non-negative, got {self.T_c!r}")
        if self.temp_convention not in TEMP_CONVENTIONS:
            raise ValueError(f"temp_convention must be one of {TEMP_CONVENTIONS}, got {self.temp_convention!r}")

    @property
    def n_resonators(self) -> int:
        return 2 * self.N + 2

    @property
    def delta_omega(self) -> float:
        """Resonator detuning from the drive frame, MHz."""
        return self.f_c * 1e3 - self.f_L * 1e3

    @property
    def detuning(self) -> float:
        """Delta = delta_omega - v - 2 omega_bar, MHz."""
        return self.delta_omega - self.v - 2.0 * self.omega_bar

    def with_detuning(self, delta_mhz: float) -> "CircuitParams":
        """Copy with omega_bar chosen so that the cooling mode sits at ``delta_mhz``."""
        from dataclasses import replace
        return replace(self, omega_bar=0.5 * (self.delta_omega - self.v - delta_mhz))

    def spec(self) -> HilbertSpec:
        return HilbertSpec.network(self.N, self.fock_levels)


@dataclass(frozen=True)
class QubitTarget:
    """Bloch-sphere target (theta, phi) of the reset."""

    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi + 1e-12):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not (0.0 <= self.phi < TWO_PI):
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi!r}")

    @property
    def bloch_vector(self) -> np.ndarray:
        """Lab-frame Bloch vector of the target state."""
        st, ct = np.sin(self.theta), np.cos(self.theta)
        return np.array([st * np.cos(self.phi), -st * np.sin(self.phi), -ct])


@dataclass(frozen=True)
class DriveSetting:
    omega_re: float
    omega_im: float
    delta_varpi: float
    f_n: float
    omega_bar: float

    @property
    def omega(self) -> complex:
        return complex(self.omega_re, self.omega_im)


@dataclass(frozen=True)
class ModeSpectrum:
    frequencies: dict
    Delta: float

    def __getitem__(self, lk):
        return self.frequencies[lk]


@dataclass(frozen=True)
class CouplingTable:
    """Branch-resolved qubit-resonator coefficients.

    ``A[l]`` has shape (n_resonators, N); ``Theta[l] = g * A[l] * theta_minus``
    in MHz.
    """

    A: dict
    theta_minus: np.ndarray
    theta_plus: np.ndarray
    Theta: dict = field(default_factory=dict)

    def support(self, l: int, n: int) -> list[int]:
        """1-based resonator indices coupled to 1-based qubit ``n`` on branch ``l``."""
        return [m + 1 for m in np.flatnonzero(self.A[l][:, n - 1])]


def calibrate_drive(target: QubitTarget, omega_bar: float, f_L: float) -> DriveSetting:
    """Drive (Rabi frequency, detuning, qubit frequency) realizing ``target``."""
    if omega_bar <= 0:
        raise ValueError("omega_bar must be positive")
    st, ct = np.sin(target.theta), np.cos(target.theta)
    om = omega_bar * st * np.exp(1j * (np.pi - target.phi))
    dvarpi = 2.0 * omega_bar * ct
    return DriveSetting(float(om.real), float(om.imag), float(dvarpi),
                        float(f_L + dvarpi * 1e-3), float(omega_bar))


def effective_rabi(d: DriveSetting) -> float:
    return float(np.sqrt(abs(d.omega) ** 2 + d.delta_varpi ** 2 / 4.0))


def drive_ratio_residual(d: DriveSetting, target: QubitTarget) -> float:
    """Largest relative mismatch in the drive-ratio identities.

    Each ratio ``x / c = omega_bar`` is checked in the cross-multiplied form
    ``|x - omega_bar c| / omega_bar``, which stays well conditioned when the
    denominator ``c`` is small.
    """
    st, ct = np.sin(target.theta), np.cos(target.theta)
    cp, spp = np.cos(target.phi), np.sin(target.phi)
    ob = d.omega_bar
    res = [abs(-d.omega_re - ob * st * cp) / ob,
           abs(d.omega_im - ob * st * spp) / ob,
           abs(d.delta_varpi - 2 * ob * ct) / ob,
           abs(effective_rabi(d) ** 2 - ob ** 2) / ob ** 2]
    return float(max(res))


def rotation_matrix(target: QubitTarget) -> np.ndarray:
    """Rows give (sigma_x, sigma_y, sigma_z) of the rotated frame in lab components."""
    st, ct = np.sin(target.theta), np.cos(target.theta)
    sp_, cp = np.sin(target.phi), np.cos(target.phi)
    return np.array([
        [ct * cp, -ct * sp_, st],
        [sp_, cp, 0.0],
        [-st * cp, st * sp_, ct],
    ])


def rotated_pauli(target: QubitTarget) -> tuple[Operator, Operator, Operator]:
    R = rotation_matrix(target)
    lab = [pauli("x").dense(), pauli("y").dense(), pauli("z").dense()]
    return tuple(Operator(sum(R[i, j] * lab[j] for j in range(3)), pauli("z").spec) for i in range(3))


def rotated_ladder(target: QubitTarget) -> tuple[Operator, Operator]:
    """(sigma_+, sigma_-) of the rotated frame."""
    sx, sy, _ = rotated_pauli(target)
    return (sx + 1j * sy) * 0.5, (sx - 1j * sy) * 0.5


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    k = int(np.flatnonzero(np.abs(vec) > 1e-12)[0])
    return vec * (abs(vec[k]) / vec[k])


def verify_target_eigenstate(target: QubitTarget) -> tuple[np.ndarray, float]:
    """Eigenvector of the rotated sigma_z with eigenvalue -1 and its residual."""
    sz = rotated_pauli(target)[2].dense()
    w, V = np.linalg.eigh(sz)
    psi = _fix_phase(V[:, int(np.argmin(w))])
    return psi, float(np.linalg.norm(sz @ psi + psi))


def target_state(target: QubitTarget) -> np.ndarray:
    """cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([np.cos(target.theta / 2), np.exp(1j * target.phi) * np.sin(target.theta / 2)])


@lru_cache(maxsize=8)
def network_operators(N: int, fock_levels: int):
    """Embedded a_m (m = 1..2N+2) and lab sigma operators for qubits 1..N."""
    spec = HilbertSpec.network(N, fock_levels)
    a = destroy(fock_levels)
    res = [embed(a, f"r{m}", spec) for m in range(1, 2 * N + 3)]
    qubits = {
        axis: [embed(pauli(axis), f"q{n}", spec) for n in range(1, N + 1)]
        for axis in ("x", "y", "z", "plus", "minus")
    }
    return spec, res, qubits


def embed_qubit(op: Operator, n: int, params: CircuitParams) -> Operator:
    return embed(op, f"q{n}", params.spec())


def build_h1(params: CircuitParams, drives: list[DriveSetting]) -> Operator:
    """Rotating-frame network Hamiltonian in rad/us."""
    if len(drives) != params.N:
        raise ValueError(f"expected {params.N} drive settings, got {len(drives)}")
    spec, a, q = network_operators(params.N, params.fock_levels)
    dw, v, g = angular(params.delta_omega), angular(params.v), angular(params.g)
    H = zero(spec).matrix
    for am in a:
        H = H + dw * (am.matrix.conj().T @ am.matrix)
    for k in range(1, params.N + 2):
        a1, a2 = a[2 * k - 2].matrix, a[2 * k - 1].matrix
        hop = a1 @ a2.conj().T
        H = H + v * (hop + hop.conj().T)
    for n, d in enumerate(drives):
        H = H + angular(d.omega_re) * q["x"][n].matrix + angular(d.omega_im) * q["y"][n].matrix
        H = H + 0.5 * angular(d.delta_varpi) * q["z"][n].matrix
        # a_{2n}, a_{2n+1} with 1-based n -> list positions 2n-1, 2n for 0-based n
        adag = (a[2 * n + 1].matrix + a[2 * n + 2].matrix).conj().T
        term = g * (adag @ q["minus"][n].matrix)
        H = H + term + term.conj().T
    return Operator(H, spec)


def mode_frequencies(params: CircuitParams, omega_bar: float | None = None) -> ModeSpectrum:
    """The six sideband frequencies delta_omega + l v + 2 k omega_bar (MHz)."""
    ob = params.omega_bar if omega_bar is None else omega_bar
    freqs = {(l, k): params.delta_omega + l * params.v + 2 * k * ob
             for l in (-1, 1) for k in (-1, 0, 1)}
    return ModeSpectrum(freqs, freqs[(-1, -1)])


def hopping_matrix(params: CircuitParams) -> np.ndarray:
    """Single-excitation resonator block (MHz): delta_omega on the diagonal, v within pairs."""
    M = params.n_resonators
    h = np.eye(M) * params.delta_omega
    for k in range(params.N + 1):
        h[2 * k, 2 * k + 1] = h[2 * k + 1, 2 * k] = params.v
    return h


def coupling_coefficients(params: CircuitParams, targets: list[QubitTarget]) -> CouplingTable:
    """Project each qubit's coupling g(a_2n + a_2n+1) onto the delta_omega +/- v normal modes."""
    if len(targets) != params.N:
        raise ValueError(f"expected {params.N} targets, got {len(targets)}")
    h = hopping_matrix(params)
    w, V = np.linalg.eigh(h)
    M = params.n_resonators
    A = {}
    for l in (-1, 1):
        cols = np.abs(w - (params.delta_omega + l * params.v)) < 1e-9 * max(1.0, params.delta_omega)
        P = V[:, cols] @ V[:, cols].T
        coeff = np.zeros((M, params.N))
        for n in range(params.N):
            c = np.zeros(M)
            c[2 * n + 1] = c[2 * n + 2] = 1.0
            coeff[:, n] = P @ c
        coeff[np.abs(coeff) < 1e-12] = 0.0
        A[l] = coeff
    th = np.array([t.theta for t in targets])
    ph = np.array([t.phi for t in targets])
    tminus = np.exp(1j * ph) * (np.cos(th) + 1) / 2
    tplus = np.exp(1j * ph) * (np.cos(th) - 1) / 2
    Theta = {l: params.g * A[l] * tminus[None, :] for l in (-1, 1)}
    return CouplingTable(A, tminus, tplus, Theta)


def build_effective_interaction(params: CircuitParams, targets: list[QubitTarget],
                                Delta: float = 0.0, branch: int = -1) -> Operator:
    """Resonant-mode interaction, rad/us.

    At ``Delta = 0`` this is the static coupling of each qubit's rotated
    lowering operator to its four resonators.  A non-zero ``Delta`` (MHz) is
    represented in the frame co-rotating with the qubit, adding
    ``Delta * sum_m a_m^+ a_m``.
    """
    spec, a, _ = network_operators(params.N, params.fock_levels)
    table = coupling_coefficients(params, targets)
    H = zero(spec).matrix
    for n, tgt in enumerate(targets):
        _, sminus = rotated_ladder(tgt)
        sm = embed(sminus, f"q{n + 1}", spec).matrix
        for m in np.flatnonzero(table.A[branch][:, n]):
            term = angular(table.Theta[branch][m, n]) * (a[m].matrix.conj().T @ sm)
            H = H + term + term.conj().T
    if Delta:
        for am in a:
            H = H + angular(Delta) * (am.matrix.conj().T @ am.matrix)
    return Operator(H, spec)


def frame_transform_oracle(omega_bar: float, v: float, delta_omega: float, t: float,
                           target: QubitTarget = QubitTarget(np.pi / 3, np.pi / 5)) -> dict:
    """Compare matrix-exponential frame transforms with their closed forms.

    Works on one hopping pair (three Fock levels per mode) and one qubit;
    frequencies in MHz, ``t`` in us.  Resonator residuals are measured on
    columns with at most one excitation, where the truncation is exact.
    """
    ob, vv, dw = angular(omega_bar), angular(v), angular(delta_omega)
    d = 3
    a = destroy(d)
    one = identity(a.spec)
    one_q = identity(pauli("z").spec)
    a1 = tensor(a, one, one_q)
    a2 = tensor(one, a, one_q)
    sx, sy, sz = rotated_pauli(target)
    spl, smi = rotated_ladder(target)
    lift = lambda op: tensor(one, one, op)
    R = (a1.dag() @ a1 + a2.dag() @ a2) * dw + (a1 @ a2.dag() + a1.dag() @ a2) * vv + lift(sz) * ob
    U = matrix_exp_small(R, 1j * t)
    Ud = U.dag()

    def frame(X):
        return (U @ X @ Ud).dense()

    ep, em = np.exp(2j * ob * t), np.exp(-2j * ob * t)
    closed = {
        "sigma_x": (lift(spl) * ep + lift(smi) * em).dense(),
        "sigma_y": (1j * (lift(smi) * em - lift(spl) * ep)).dense(),
    }
    fp, fm = np.exp(1j * (dw + vv) * t), np.exp(1j * (dw - vv) * t)
    closed["a_p_dag"] = (0.5 * (fp * (a1.dag() + a2.dag()) + fm * (a1.dag() - a2.dag()))).dense()
    closed["a_q_dag"] = (0.5 * (fp * (a1.dag() + a2.dag()) - fm * (a1.dag() - a2.dag()))).dense()
    numeric = {
        "sigma_x": frame(lift(sx)),
        "sigma_y": frame(lift(sy)),
        "a_p_dag": frame(a1.dag()),
        "a_q_dag": frame(a2.dag()),
    }
    n_exc = np.add.outer(np.add.outer(np.arange(d), np.arange(d)), np.zeros(2)).ravel()
    low = n_exc <= 1
    res = {}
    for key in numeric:
        diff = numeric[key] - closed[key]
        if key.startswith("a_"):
            diff = diff[:, low]
        res[key] = float(np.max(np.abs(diff)))
    return res

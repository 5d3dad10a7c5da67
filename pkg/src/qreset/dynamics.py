"""Lindblad dynamics: dissipation channels, master-equation integration and
quantum-jump trajectories.

Channel rates follow the convention ``rate/2 * D[c]`` with
``D[c]rho = 2 c rho c^+ - {c^+ c, rho}``, i.e. a standard Lindblad jump
operator ``sqrt(rate) * c``.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.constants as const
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import expm_multiply

from .circuit import CircuitParams, QubitTarget, angular, mode_frequencies, rotated_ladder, rotated_pauli
from .operators import HilbertSpec, Operator, SpecMismatchError, State, embed, pauli, partial_trace

log = logging.getLogger(__name__)

MASTER_DIM_LIMIT = 4096
DENSE_PROPAGATOR_LIMIT = 4096
TRAJ_CHUNK = 50
MAX_SAMPLES = 1_000_000


class NumericalError(RuntimeError):
    """Integration or normalization failure."""


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class CollapseChannel:
    op: Operator
    rate: float
    label: str = ""

    def __post_init__(self):
        if not np.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"channel rate must be >= 0, got {self.rate!r}")


@dataclass(frozen=True)
class DissipationParams:
    """Intrinsic qubit decay/dephasing times in us."""

    t_theta: float = 20.0
    t_phi: float = 10.0
    enabled: bool = False
    basis: str = "rotated"

    def __post_init__(self):
        if self.basis not in ("rotated", "lab"):
            raise ValueError(f"basis must be 'rotated' or 'lab', got {self.basis!r}")
        if self.enabled:
            for name in ("t_theta", "t_phi"):
                val = getattr(self, name)
                if not np.isfinite(val) or val <= 0:
                    raise ValueError(f"{name} must be positive when dissipation is enabled, got {val!r}")


@dataclass
class SimOptions:
    t_final: float = 1.0
    dt_max: float | None = None
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    n_traj: int = 200
    seed: int = 0
    sample_times: Sequence[float] | None = None
    n_samples: int = 101
    workers: int | None = None

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError(f"t_final must be positive, got {self.t_final!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.n_traj) != self.n_traj or self.n_traj < 1:
            raise ValueError(f"n_traj must be a positive integer, got {self.n_traj!r}")
        if self.dt_max is not None and not self.dt_max > 0:
            raise ValueError(f"dt_max must be positive, got {self.dt_max!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if int(self.n_samples) != self.n_samples or not 2 <= self.n_samples <= MAX_SAMPLES:
            raise ValueError(f"n_samples must be an integer in [2, {MAX_SAMPLES}], got {self.n_samples!r}")

    def times(self) -> np.ndarray:
        if self.sample_times is not None:
            t = np.asarray(self.sample_times, dtype=float)
        else:
            t = np.linspace(0.0, self.t_final, self.n_samples)
        if t.ndim != 1 or t.size < 1 or np.any(np.diff(t) <= 0) or t[0] < 0:
            raise ValueError("sample times must be non-negative and strictly increasing")
        return t


@dataclass
class TimeSeries:
    """Observable time traces; ``stderr`` is ``None`` for deterministic solvers."""

    times: np.ndarray
    labels: list[str]
    values: np.ndarray
    stderr: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __getitem__(self, label: str) -> np.ndarray:
        return self.values[self.labels.index(label)]

    def err(self, label: str) -> np.ndarray:
        if self.stderr is None:
            return np.zeros_like(self.times)
        return self.stderr[self.labels.index(label)]

    def rows(self):
        for j, t in enumerate(self.times):
            for i, lab in enumerate(self.labels):
                se = float(self.stderr[i, j]) if self.stderr is not None else 0.0
                yield float(t), lab, float(self.values[i, j]), se


# --------------------------------------------------------------------------
# thermal bath and channels


def thermal_occupancy(f_c: float, T_c: float, convention: str = "physical") -> float:
    """Bose-Einstein occupation of a resonator at ``f_c`` GHz and ``T_c`` K.

    ``convention="paper"`` multiplies the Boltzmann exponent by an extra
    2pi, which reproduces the quoted equilibrium polarizations.
    """
    if T_c < 0:
        raise ValueError(f"negative temperature {T_c!r}")
    if convention not in ("physical", "paper"):
        raise ValueError(f"unknown temperature convention {convention!r}")
    if T_c == 0:
        return 0.0
    x = const.hbar * 2 * np.pi * f_c * 1e9 / const.k
    if convention == "paper":
        x *= 2 * np.pi
    with np.errstate(over="ignore"):
        x = x / T_c
    if x > 700:
        return float(np.exp(-x))  # 1/(e^x - 1) to double precision; may underflow to 0
    return float(1.0 / np.expm1(x))


def collapse_channels(params: CircuitParams, targets: Sequence[QubitTarget],
                      diss: DissipationParams | None = None) -> list[CollapseChannel]:
    spec = params.spec()
    nbar = thermal_occupancy(params.f_c, params.T_c, params.temp_convention)
    kappa = angular(params.kappa)
    from .circuit import network_operators
    _, a, _ = network_operators(params.N, params.fock_levels)
    chans = [CollapseChannel(am, kappa * (1 + nbar), f"loss_r{m + 1}") for m, am in enumerate(a)]
    if nbar > 0:
        chans += [CollapseChannel(am.dag(), kappa * nbar, f"heat_r{m + 1}") for m, am in enumerate(a)]
    if diss is not None and diss.enabled:
        if len(targets) != params.N:
            raise ValueError(f"expected {params.N} targets, got {len(targets)}")
        for n, tgt in enumerate(targets):
            if diss.basis == "rotated":
                sm, sz = rotated_ladder(tgt)[1], rotated_pauli(tgt)[2]
            else:
                sm, sz = pauli("minus"), pauli("z")
            slot = f"q{n + 1}"
            chans.append(CollapseChannel(embed(sm, slot, spec), 2.0 / diss.t_theta, f"decay_q{n + 1}"))
            chans.append(CollapseChannel(embed(sz, slot, spec), 1.0 / diss.t_phi, f"dephase_q{n + 1}"))
    return chans


def default_dt_max(params: CircuitParams) -> float:
    """1 / (20 * highest sideband frequency), us."""
    top = max(abs(f) for f in mode_frequencies(params).frequencies.values())
    return 1.0 / (20.0 * top)


# --------------------------------------------------------------------------
# generator


def _check_specs(H: Operator, channels: Sequence[CollapseChannel], spec: HilbertSpec):
    if H.spec != spec:
        raise SpecMismatchError(f"Hamiltonian on {H.spec.labels}, state on {spec.labels}")
    for c in channels:
        if c.op.spec != spec:
            raise SpecMismatchError(f"channel {c.label or c.op} lives on {c.op.spec.labels}")


def _heff(H: sp.spmatrix, ops: Sequence[sp.spmatrix], rates: Sequence[float]) -> sp.csr_matrix:
    K = sp.csr_matrix(H.shape, dtype=complex)
    for c, g in zip(ops, rates):
        K = K + g * (c.conj().T @ c)
    return sp.csr_matrix(H - 0.5j * K)


def _rhs_factory(H: sp.spmatrix, ops: Sequence[sp.spmatrix], rates: Sequence[float]):
    Heff = _heff(H, ops, rates)
    jumps = [(sp.csr_matrix(c), g) for c, g in zip(ops, rates) if g > 0]
    dim = H.shape[0]

    def rhs(rho: np.ndarray) -> np.ndarray:
        rho_h = rho.conj().T
        out = -1j * (Heff @ rho - (Heff @ rho_h).conj().T)
        for c, g in jumps:
            # c rho c^+ = c (c rho^+)^+
            out += g * (c @ (c @ rho_h).conj().T)
        return out

    return rhs, dim


def lindblad_rhs(H: Operator, channels: Sequence[CollapseChannel], rho: State) -> State:
    """-i[H, rho] + sum rate/2 (2 c rho c^+ - {c^+ c, rho})."""
    if rho.is_pure:
        raise ValueError("lindblad_rhs needs a density matrix")
    _check_specs(H, channels, rho.spec)
    rhs, _ = _rhs_factory(H.matrix, [c.op.matrix for c in channels], [c.rate for c in channels])
    return State(rhs(rho.data), rho.spec)


def reachable_subspace(ops: Sequence[sp.spmatrix], seeds: np.ndarray) -> np.ndarray:
    """Basis indices reachable from ``seeds`` through the nonzero pattern of ``ops``.

    The span of the returned basis states is invariant under every operator
    in ``ops``, so dynamics generated by them can be restricted to it exactly.
    """
    dim = ops[0].shape[0]
    pattern = sp.csr_matrix((dim, dim), dtype=bool)
    for op in ops:
        m = sp.csr_matrix(op)
        m.eliminate_zeros()
        pattern = pattern + (m != 0)
    pattern = sp.csr_matrix(pattern.T)  # row j lists the targets of column j
    seen = np.zeros(dim, dtype=bool)
    frontier = np.unique(np.asarray(seeds, dtype=np.int64))
    seen[frontier] = True
    while frontier.size:
        nxt = np.unique(pattern[frontier].indices)
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return np.flatnonzero(seen)


def _restrict(m: sp.spmatrix, idx: np.ndarray) -> sp.csr_matrix:
    return sp.csr_matrix(sp.csr_matrix(m)[idx][:, idx])


def _generator_ops(H: Operator, channels: Sequence[CollapseChannel]) -> list[sp.spmatrix]:
    ops = [H.matrix]
    for c in channels:
        ops.append(c.op.matrix)
        ops.append(c.op.matrix.conj().T @ c.op.matrix)
    return ops


def _validate_dm(rho: np.ndarray, t: float, check_eigs: bool) -> None:
    tr = np.trace(rho).real
    if abs(tr - 1) > 1e-9:
        raise NumericalError(f"trace drifted to {tr:.12f} at t={t:.6g} us")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > 1e-9:
        raise NumericalError(f"Hermiticity residual {herm:.2e} at t={t:.6g} us")
    if check_eigs:
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        if lo < -1e-8:
            raise NumericalError(f"negative eigenvalue {lo:.2e} at t={t:.6g} us")


def evolve_master(H: Operator, channels: Sequence[CollapseChannel], rho0: State,
                  options: SimOptions, observables: Mapping[str, Operator],
                  dim_limit: int = MASTER_DIM_LIMIT, restrict: bool = True) -> TimeSeries:
    """Integrate the master equation with an adaptive Dormand-Prince 4(5) pair.

    The problem is first restricted to the basis states reachable from the
    initial support; the dimension guard applies to that subspace.
    """
    spec = rho0.spec
    _check_specs(H, channels, spec)
    for lab, O in observables.items():
        if O.spec != spec:
            raise SpecMismatchError(f"observable {lab!r} lives on {O.spec.labels}")
    rho_full = rho0.density_matrix()
    if restrict:
        seeds = np.flatnonzero(np.abs(np.diag(rho_full)) > 0)
        idx = reachable_subspace(_generator_ops(H, channels), seeds)
    else:
        idx = np.arange(spec.dim)
    d = idx.size
    if d > dim_limit:
        raise ValueError(
            f"density-matrix dimension {d} exceeds the limit {dim_limit}; use evolve_trajectories")
    Hr = _restrict(H.matrix, idx)
    ops = [_restrict(c.op.matrix, idx) for c in channels]
    rates = [c.rate for c in channels]
    obs = {k: _restrict(O.matrix, idx) for k, O in observables.items()}
    rho = np.ascontiguousarray(rho_full[np.ix_(idx, idx)])
    leak = abs(np.trace(rho_full).real - np.trace(rho).real)
    if leak > 1e-12:
        raise ValueError("initial state has weight outside its diagonal support")

    rhs, _ = _rhs_factory(Hr, ops, rates)
    times = options.times()
    dt_max = options.dt_max if options.dt_max is not None else np.inf

    def f(t, y):
        return rhs(y.reshape(d, d)).ravel()

    t_span = (0.0, float(times[-1]))
    if times[-1] == 0.0:
        ys = rho.ravel()[:, None]
    else:
        sol = solve_ivp(f, t_span, rho.ravel(), method="RK45", t_eval=times,
                        rtol=options.rel_tol, atol=options.abs_tol, max_step=dt_max)
        if sol.status != 0:
            raise NumericalError(f"integration failed: {sol.message}")
        ys = sol.y
    labels = list(obs)
    vals = np.empty((len(labels), times.size))
    check_eigs = d <= 1024
    for j in range(times.size):
        r = ys[:, j].reshape(d, d)
        _validate_dm(r, times[j], check_eigs)
        for i, lab in enumerate(labels):
            O = obs[lab].tocoo()
            vals[i, j] = np.sum(O.data * r[O.col, O.row]).real
    log.debug("master run: reduced dim %d of %d, %d samples", d, spec.dim, times.size)
    return TimeSeries(times, labels, vals, None, {"solver": "master", "dim": d})


# --------------------------------------------------------------------------
# trajectories


class Propagator:
    """exp(-i H_eff tau) for a constant non-Hermitian ``H_eff``.

    A dense table holds exp(A h / 2^k) for k = 0..levels, where ``h`` is the
    base step; arbitrary durations are composed from it with a Taylor tail.
    Above the dense size limit, sparse ``expm_multiply`` is used instead.
    """

    def __init__(self, Heff: sp.spmatrix, h: float, dense_limit: int = DENSE_PROPAGATOR_LIMIT):
        self.A = sp.csr_matrix(-1j * Heff)
        self.h = float(h)
        self.norm1 = float(abs(self.A).sum(axis=0).max()) if self.A.nnz else 0.0
        self.table = None
        self.levels = 0
        if self.A.shape[0] <= dense_limit and self.h > 0:
            levels = 0
            while self.norm1 * self.h / 2 ** levels > 1.0 and levels < 14:
                levels += 1
            Ad = self.A.toarray()
            fine = scipy.linalg.expm(Ad * (self.h / 2 ** levels))
            table = [fine]
            for _ in range(levels):
                table.append(table[-1] @ table[-1])
            self.table = table[::-1]  # table[k] = exp(A h / 2^k)
            self.levels = levels

    def _taylor(self, psi: np.ndarray, tau: float) -> np.ndarray:
        if tau <= 0:
            return psi
        nsub = max(1, int(np.ceil(self.norm1 * tau / 1.0)))
        dt = tau / nsub
        out = psi
        for _ in range(nsub):
            term = out
            acc = out.copy()
            scale = np.linalg.norm(out) or 1.0
            for k in range(1, 40):
                term = (self.A @ term) * (dt / k)
                acc += term
                if np.linalg.norm(term) < 1e-17 * scale:
                    break
            out = acc
        return out

    def step(self, Psi: np.ndarray) -> np.ndarray:
        """Advance by exactly one base step."""
        if self.table is not None:
            return self.table[0] @ Psi
        return expm_multiply(self.A * self.h, Psi)

    def advance(self, psi: np.ndarray, tau: float) -> np.ndarray:
        if tau <= 0:
            return psi
        if self.table is None:
            return expm_multiply(self.A * tau, psi)
        out = psi
        whole = int(tau // self.h)
        for _ in range(whole):
            out = self.table[0] @ out
        rem = tau - whole * self.h
        for k in range(1, self.levels + 1):
            piece = self.h / 2 ** k
            if rem >= piece:
                out = self.table[k] @ out
                rem -= piece
        return self._taylor(out, rem)

    def level_step(self, psi: np.ndarray, k: int) -> np.ndarray:
        """exp(A h / 2^k) psi."""
        if self.table is not None and k <= self.levels:
            return self.table[k] @ psi
        return self.advance(psi, self.h / 2 ** k) if self.table is None else self._taylor(psi, self.h / 2 ** k)


@dataclass
class InitialEnsemble:
    """Pure states with probabilities; each trajectory draws one member."""

    states: list[State]
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.states) != self.weights.size or len(self.states) == 0:
            raise ValueError("need one weight per state")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError("weights must be a probability vector")
        spec = self.states[0].spec
        if any(s.spec != spec or not s.is_pure for s in self.states):
            raise ValueError("ensemble members must be pure states on one Hilbert space")

    @property
    def spec(self) -> HilbertSpec:
        return self.states[0].spec

    def density_matrix(self) -> State:
        rho = sum(w * s.density_matrix() for s, w in zip(self.states, self.weights))
        return State(rho, self.spec)


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for trajectory ``index``; independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),)))


def _worker_count(requested: int | None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("QRESET_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer QRESET_THREADS=%r", env)
    return os.cpu_count() or 1


class _TrajectoryRunner:
    def __init__(self, prop: Propagator, jumps, obs, times, members, weights, seed):
        self.prop = prop
        self.jumps = jumps
        self.obs = obs
        self.times = times
        self.members = members
        self.weights = weights
        self.seed = seed

    def _observe(self, Psi: np.ndarray) -> np.ndarray:
        n2 = np.einsum("ij,ij->j", Psi.conj(), Psi).real
        out = np.empty((len(self.obs), Psi.shape[1]))
        for i, O in enumerate(self.obs):
            out[i] = np.einsum("ij,ij->j", Psi.conj(), O @ Psi).real / n2
        return out

    def _jump(self, psi: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        probs = np.array([g * np.vdot(c @ psi, c @ psi).real for c, g in self.jumps])
        total = probs.sum()
        if not total > 0 or not np.isfinite(total):
            raise NumericalError("no jump channel has non-zero weight at a threshold crossing")
        k = int(np.searchsorted(np.cumsum(probs) / total, rng.random(), side="right"))
        k = min(k, len(self.jumps) - 1)
        new = self.jumps[k][0] @ psi
        nrm = np.linalg.norm(new)
        if not nrm > 0:
            raise NumericalError("state collapsed to zero norm after a jump")
        return new / nrm

    def _interval(self, psi: np.ndarray, width: float, r: float, rng) -> tuple[np.ndarray, float, int]:
        """Propagate one sample interval, handling every jump inside it."""
        prop = self.prop
        t = 0.0
        njump = 0
        end = prop.advance(psi, width)
        while np.vdot(end, end).real < r:
            lo_psi, lo_t, hi_t = psi, t, width
            # whole base steps first, then dyadic bisection on the norm^2 threshold
            while hi_t - lo_t > prop.h:
                trial = prop.step(lo_psi)
                if np.vdot(trial, trial).real < r:
                    hi_t = lo_t + prop.h
                    break
                lo_psi, lo_t = trial, lo_t + prop.h
            k = 0
            while True:
                k += 1
                step = prop.h / 2 ** k
                if step < 1e-15:
                    break
                if lo_t + step >= hi_t:
                    continue
                trial = prop.level_step(lo_psi, k)
                n2 = np.vdot(trial, trial).real
                if n2 >= r:
                    lo_psi, lo_t = trial, lo_t + step
                    if n2 - r < 1e-10:
                        break
                else:
                    hi_t = lo_t + step
            psi = self._jump(lo_psi, rng)
            njump += 1
            r = rng.random()
            t = lo_t
            end = prop.advance(psi, width - t)
        return end, r, njump

    def run_chunk(self, indices: range) -> tuple[np.ndarray, int]:
        rngs = [trajectory_rng(self.seed, i) for i in indices]
        cols = []
        for rng in rngs:
            k = int(rng.choice(len(self.members), p=self.weights)) if len(self.members) > 1 else 0
            cols.append(self.members[k])
        Psi = np.array(cols, dtype=complex).T.copy()
        thresholds = np.array([rng.random() for rng in rngs])
        res = np.empty((len(self.obs), self.times.size, len(indices)))
        res[:, 0, :] = self._observe(Psi)
        t_prev = self.times[0]
        njumps = 0
        for j in range(1, self.times.size):
            width = self.times[j] - t_prev
            if abs(width - self.prop.h) <= 1e-12 * self.prop.h:
                new = self.prop.step(Psi)
            else:
                new = np.column_stack([self.prop.advance(Psi[:, b], width) for b in range(Psi.shape[1])])
            n2 = np.einsum("ij,ij->j", new.conj(), new).real
            for b in np.flatnonzero(n2 < thresholds):
                new[:, b], thresholds[b], nj = self._interval(Psi[:, b], width, thresholds[b], rngs[b])
                njumps += nj
            Psi = new
            res[:, j, :] = self._observe(Psi)
            t_prev = self.times[j]
        return res, njumps


def evolve_trajectories(H: Operator, channels: Sequence[CollapseChannel],
                        psi0: State | InitialEnsemble, options: SimOptions,
                        observables: Mapping[str, Operator], restrict: bool = True,
                        return_samples: bool = False) -> TimeSeries:
    """Monte Carlo wave-function unraveling of the master equation.

    Trajectory ``i`` draws all its random numbers from a generator seeded by
    ``(options.seed, i)``; trajectories are advanced in fixed-size chunks, so
    the result does not depend on the number of workers.
    """
    if isinstance(psi0, State):
        if not psi0.is_pure:
            raise ValueError("trajectories need a pure initial state or an InitialEnsemble")
        members, weights = [psi0], np.ones(1)
    else:
        members, weights = list(psi0.states), psi0.weights
    spec = members[0].spec
    _check_specs(H, channels, spec)
    for lab, O in observables.items():
        if O.spec != spec:
            raise SpecMismatchError(f"observable {lab!r} lives on {O.spec.labels}")
    vecs = []
    for s in members:
        nrm = np.linalg.norm(s.data)
        if not nrm > 0:
            raise NumericalError("initial state has zero norm")
        vecs.append(s.data / nrm)
    if restrict:
        seeds = np.flatnonzero(np.any(np.abs(np.array(vecs)) > 0, axis=0))
        idx = reachable_subspace(_generator_ops(H, channels), seeds)
    else:
        idx = np.arange(spec.dim)
    Hr = _restrict(H.matrix, idx)
    ops = [_restrict(c.op.matrix, idx) for c in channels]
    rates = [c.rate for c in channels]
    jumps = [(c, g) for c, g in zip(ops, rates) if g > 0]
    obs = [_restrict(O.matrix, idx) for O in observables.values()]
    times = options.times()
    steps = np.diff(times)
    h = float(np.median(steps)) if steps.size else options.t_final
    prop = Propagator(_heff(Hr, ops, rates), h)
    runner = _TrajectoryRunner(prop, jumps, obs, times, [v[idx] for v in vecs], weights, options.seed)

    chunks = [range(s, min(s + TRAJ_CHUNK, options.n_traj)) for s in range(0, options.n_traj, TRAJ_CHUNK)]
    workers = min(_worker_count(options.workers), len(chunks))
    if workers == 1:
        results = [runner.run_chunk(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(runner.run_chunk, chunks))
    samples = np.concatenate([r[0] for r in results], axis=2)
    njumps = sum(r[1] for r in results)
    mean = samples.mean(axis=2)
    n = samples.shape[2]
    se = samples.std(axis=2, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    meta = {"solver": "trajectories", "dim": idx.size, "n_traj": n, "jumps": njumps}
    if return_samples:
        meta["samples"] = samples
    return TimeSeries(times, list(observables), mean, se, meta)


# --------------------------------------------------------------------------
# qubit observables


def rotated_observables(params: CircuitParams, targets: Sequence[QubitTarget],
                        which: Sequence[str] = ("sx", "sy", "sz")) -> dict[str, Operator]:
    """Embedded rotated-frame Pauli operators labelled e.g. ``q1:sz``."""
    spec = params.spec()
    out = {}
    for n, tgt in enumerate(targets):
        ops = dict(zip(("sx", "sy", "sz"), rotated_pauli(tgt)))
        for key in which:
            out[f"q{n + 1}:{key}"] = embed(ops[key], f"q{n + 1}", spec)
    return out


def reduced_qubit_bloch(state: State, n: int, target: QubitTarget) -> tuple[float, float, float]:
    """Rotated-frame Bloch components of qubit ``n`` (1-based)."""
    label = f"q{n}"
    if label not in state.spec.labels:
        raise IndexError(f"qubit {n} not in {state.spec.labels}")
    rho = partial_trace(state, [label]).data
    return tuple(float(np.trace(op.dense() @ rho).real) for op in rotated_pauli(target))

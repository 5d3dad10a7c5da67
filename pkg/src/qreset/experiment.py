"""Experiment configuration, figure scenarios, parameter sweeps and output
emission (CSV and SVG).

Config files are YAML with sections ``circuit``, ``targets``,
``initial_state``, ``dissipation``, ``sim``, ``solver`` and ``outputs``.
Frequencies given as f = omega/2pi: ``f_c``/``f_L`` in GHz, ``v``, ``g``,
``kappa``, ``omega_bar`` in MHz; times in us; ``T_c`` in K; angles in rad.
"""

from __future__ import annotations

import copy
import itertools
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any

import numpy as np
import yaml

from .circuit import CircuitParams, QubitTarget, angular, build_h1, calibrate_drive, target_state
from .dynamics import (DissipationParams, InitialEnsemble, SimOptions, TimeSeries, collapse_channels,
                       default_dt_max, evolve_master, evolve_trajectories, rotated_observables,
                       thermal_occupancy)
from .operators import State, product_state
from .rates import PopulationVector, fit_exponential, polarization_rate, polarization_time, sz_trace

CSV_HEADER = "t_us,qubit,observable,value,stderr,solver"
SOLVERS = ("master", "trajectories", "rate")
PRESETS = ("ground", "maximally_mixed_rotated", "bloch_point")
RESONATOR_STATES = ("vacuum", "thermal")
SCENARIOS = ("fig2", "fig2_inset", "fig3a", "fig3b", "fig3c")
FIG2_TEMPERATURES = (0.0, 0.3, 0.4, 0.5)


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


# --------------------------------------------------------------------------
# config types


@dataclass
class InitialStateSpec:
    preset: str = "maximally_mixed_rotated"
    points: list[tuple[float, float]] | None = None
    resonators: str = "vacuum"

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigError(f"initial_state.preset must be one of {PRESETS}, got {self.preset!r}")
        if self.resonators not in RESONATOR_STATES:
            raise ConfigError(f"initial_state.resonators must be one of {RESONATOR_STATES}, "
                              f"got {self.resonators!r}")
        if self.preset == "bloch_point":
            if not self.points:
                raise ConfigError("initial_state.points is required for preset bloch_point")
            self.points = [tuple(float(x) for x in p) for p in self.points]
            for p in self.points:
                if len(p) != 2 or not all(math.isfinite(x) for x in p):
                    raise ConfigError(f"initial_state.points entries must be [theta, phi], got {p!r}")
        elif self.points is not None:
            raise ConfigError("initial_state.points only applies to preset bloch_point")


@dataclass
class OutputSpec:
    directory: str = "."
    stem: str = "result"
    formats: list[str] = field(default_factory=lambda: ["csv"])

    def __post_init__(self):
        self.formats = list(self.formats)
        bad = [f for f in self.formats if f not in ("csv", "svg")]
        if bad:
            raise ConfigError(f"outputs.formats: unknown format(s) {bad}; valid: csv, svg")
        if "csv" not in self.formats:
            self.formats.insert(0, "csv")


@dataclass
class ExperimentConfig:
    circuit: CircuitParams
    targets: list[QubitTarget]
    initial_state: InitialStateSpec = field(default_factory=InitialStateSpec)
    dissipation: DissipationParams = field(default_factory=DissipationParams)
    sim: SimOptions = field(default_factory=SimOptions)
    solver: str = "master"
    outputs: OutputSpec = field(default_factory=OutputSpec)

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if len(self.targets) != self.circuit.N:
            raise ConfigError(f"targets: expected {self.circuit.N} entries (circuit.N), got {len(self.targets)}")
        pts = self.initial_state.points
        if pts is not None and len(pts) != self.circuit.N:
            raise ConfigError(f"initial_state.points: expected {self.circuit.N} entries, got {len(pts)}")

    def to_dict(self) -> dict:
        sim = asdict(self.sim)
        if sim["sample_times"] is not None:
            sim["sample_times"] = [float(t) for t in sim["sample_times"]]
        init = asdict(self.initial_state)
        if init["points"] is not None:
            init["points"] = [list(p) for p in init["points"]]
        return {
            "circuit": asdict(self.circuit),
            "targets": [{"theta": t.theta, "phi": t.phi} for t in self.targets],
            "initial_state": init,
            "dissipation": asdict(self.dissipation),
            "sim": sim,
            "solver": self.solver,
            "outputs": asdict(self.outputs),
        }


_SECTION_TYPES = {
    "circuit": CircuitParams,
    "dissipation": DissipationParams,
    "sim": SimOptions,
    "initial_state": InitialStateSpec,
    "outputs": OutputSpec,
}
_CIRCUIT_EXTRA = ("delta_over_kappa",)
_TOP_KEYS = ("circuit", "targets", "initial_state", "dissipation", "sim", "solver", "outputs")
_INT_FIELDS = {"N", "fock_levels", "n_traj", "seed", "n_samples", "workers"}


def _valid_keys(section: str) -> list[str]:
    keys = [f.name for f in fields(_SECTION_TYPES[section])]
    return keys + list(_CIRCUIT_EXTRA) if section == "circuit" else keys


def _coerce(section: str, key: str, val):
    """Type-check scalar fields; rejects bools and strings in numeric slots."""
    cls = _SECTION_TYPES[section]
    ftype = {f.name: f.type for f in fields(cls)}.get(key, "float")
    if val is None:
        if "None" in str(ftype):
            return None
        raise ConfigError(f"{section}.{key} must not be null")
    if key in _INT_FIELDS:
        if (isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val)
                or float(val) != int(val)):
            raise ConfigError(f"{section}.{key} must be an integer, got {val!r}")
        return int(val)
    if str(ftype).startswith("float") or key in _CIRCUIT_EXTRA:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"{section}.{key} must be a number, got {val!r}")
        if not math.isfinite(val):
            raise ConfigError(f"{section}.{key} must be finite, got {val!r}")
        return float(val)
    if str(ftype) == "bool":
        if not isinstance(val, bool):
            raise ConfigError(f"{section}.{key} must be true or false, got {val!r}")
        return val
    if str(ftype) == "str":
        if not isinstance(val, str):
            raise ConfigError(f"{section}.{key} must be a string, got {val!r}")
        return val
    return val


def _section(raw: dict, name: str) -> dict:
    sec = raw.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name} must be a mapping")
    unknown = sorted(set(map(str, sec)) - set(_valid_keys(name)))
    if unknown:
        raise ConfigError(f"{name}: unknown key(s) {unknown}; valid keys: {_valid_keys(name)}")
    return {k: _coerce(name, k, v) for k, v in sec.items()}


def _build(cls, name: str, kwargs: dict):
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError, OverflowError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def config_from_dict(raw: Any) -> ExperimentConfig:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of sections")
    unknown = sorted(set(map(str, raw)) - set(_TOP_KEYS))
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}; valid keys: {list(_TOP_KEYS)}")

    circ = _section(raw, "circuit")
    dok = circ.pop("delta_over_kappa", None)
    circuit = _build(CircuitParams, "circuit", circ)
    if dok is not None:
        circuit = _build(CircuitParams, "circuit",
                         asdict(circuit) | {"omega_bar": 0.5 * (circuit.delta_omega - circuit.v
                                                                - dok * circuit.kappa)})

    traw = raw.get("targets")
    if traw is None:
        traw = [{"theta": 0.0, "phi": 0.0}] * circuit.N
    if not isinstance(traw, list):
        raise ConfigError("targets must be a list of {theta, phi} mappings")
    targets = []
    for i, t in enumerate(traw):
        if not isinstance(t, dict):
            raise ConfigError(f"targets[{i}] must be a mapping with keys theta, phi")
        extra = sorted(set(map(str, t)) - {"theta", "phi"})
        if extra:
            raise ConfigError(f"targets[{i}]: unknown key(s) {extra}; valid keys: ['theta', 'phi']")
        vals = {}
        for k in ("theta", "phi"):
            v = t.get(k, 0.0)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"targets[{i}].{k} must be a finite number, got {v!r}")
            vals[k] = float(v)
        targets.append(_build(QubitTarget, f"targets[{i}]", vals))

    init = raw.get("initial_state", {}) or {}
    if not isinstance(init, dict):
        raise ConfigError("initial_state must be a mapping")
    bad = sorted(set(map(str, init)) - set(_valid_keys("initial_state")))
    if bad:
        raise ConfigError(f"initial_state: unknown key(s) {bad}; valid keys: {_valid_keys('initial_state')}")
    for k in ("preset", "resonators"):
        if k in init and not isinstance(init[k], str):
            raise ConfigError(f"initial_state.{k} must be a string")
    pts = init.get("points")
    if pts is not None and (not isinstance(pts, list) or not all(
            isinstance(p, (list, tuple)) and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                 for x in p) for p in pts)):
        raise ConfigError("initial_state.points must be a list of [theta, phi] pairs")
    initial = _build(InitialStateSpec, "initial_state", dict(init))

    diss = _build(DissipationParams, "dissipation", _section(raw, "dissipation"))
    sim_kw = _section(raw, "sim")
    st = sim_kw.get("sample_times")
    if st is not None:
        if not isinstance(st, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                               for x in st):
            raise ConfigError("sim.sample_times must be a list of numbers")
        sim_kw["sample_times"] = [float(x) for x in st]
    sim = _build(SimOptions, "sim", sim_kw)
    try:
        if sim.sample_times is not None:
            sim.times()
    except ValueError as exc:
        raise ConfigError(f"sim.sample_times: {exc}") from exc
    out_kw = _section(raw, "outputs")
    if "formats" in out_kw:
        fm = out_kw["formats"]
        if isinstance(fm, str):
            fm = [s.strip() for s in fm.split(",") if s.strip()]
        if not isinstance(fm, list) or not all(isinstance(x, str) for x in fm):
            raise ConfigError("outputs.formats must be a list of strings")
        out_kw["formats"] = fm
    outputs = _build(OutputSpec, "outputs", out_kw)
    solver = raw.get("solver", "master")
    if not isinstance(solver, str):
        raise ConfigError("solver must be a string")
    return _build(ExperimentConfig, "config",
                  dict(circuit=circuit, targets=targets, initial_state=initial, dissipation=diss,
                       sim=sim, solver=solver, outputs=outputs))


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return config_from_dict(raw)


def serialize_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# --------------------------------------------------------------------------
# initial states


def _resonator_factors(cfg: ExperimentConfig) -> list[np.ndarray]:
    """Diagonal Fock populations for each resonator."""
    d = cfg.circuit.fock_levels
    p = np.zeros(d)
    if cfg.initial_state.resonators == "thermal":
        nbar = thermal_occupancy(cfg.circuit.f_c, cfg.circuit.T_c, cfg.circuit.temp_convention)
        if nbar > 0:
            q = nbar / (1 + nbar)
            p = (1 - q) * q ** np.arange(d)
            p /= p.sum()
        else:
            p[0] = 1.0
    else:
        p[0] = 1.0
    return [p] * cfg.circuit.n_resonators


def _qubit_members(cfg: ExperimentConfig) -> list[list[tuple[float, np.ndarray]]]:
    """Per qubit, a list of (weight, ket) whose mixture is the initial qubit state."""
    out = []
    for n, tgt in enumerate(cfg.targets):
        preset = cfg.initial_state.preset
        if preset == "ground":
            out.append([(1.0, np.array([1.0, 0.0], complex))])
        elif preset == "bloch_point":
            th, ph = cfg.initial_state.points[n]
            out.append([(1.0, _bloch_ket(th, ph))])
        else:
            minus = target_state(tgt)
            plus = np.array([-np.conj(minus[1]), np.conj(minus[0])])
            out.append([(0.5, minus), (0.5, plus)])
    return out


def _bloch_ket(theta: float, phi: float) -> np.ndarray:
    """Ket with Bloch vector (sin t cos p, -sin t sin p, -cos t)."""
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)], complex)


def initial_density_matrix(cfg: ExperimentConfig) -> State:
    spec = cfg.circuit.spec()
    res = [np.diag(p).astype(complex) for p in _resonator_factors(cfg)]
    qub = [sum(w * np.outer(k, k.conj()) for w, k in members) for members in _qubit_members(cfg)]
    return product_state(res + qub, spec)


def initial_ensemble(cfg: ExperimentConfig) -> InitialEnsemble:
    spec = cfg.circuit.spec()
    d = cfg.circuit.fock_levels
    res_opts = []
    for p in _resonator_factors(cfg):
        res_opts.append([(float(p[k]), np.eye(d, dtype=complex)[k]) for k in range(d) if p[k] > 1e-12])
    choices = res_opts + _qubit_members(cfg)
    states, weights = [], []
    for combo in itertools.product(*choices):
        weights.append(math.prod(w for w, _ in combo))
        states.append(product_state([k for _, k in combo], spec))
    w = np.array(weights)
    return InitialEnsemble(states, w / w.sum())


# --------------------------------------------------------------------------
# result tables


@dataclass
class ResultTable:
    rows: list[tuple[float, str, str, float, float, str]] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def extend_series(self, ts: TimeSeries, solver: str, suffix: str = ""):
        for t, lab, val, se in ts.rows():
            qubit, obs = lab.split(":", 1) if ":" in lab else ("", lab)
            self.rows.append((t, qubit, obs + suffix, val, se, solver))

    def series(self, qubit: str, observable: str) -> tuple[np.ndarray, np.ndarray]:
        sel = [(r[0], r[3]) for r in self.rows if r[1] == qubit and r[2] == observable]
        if not sel:
            return np.empty(0), np.empty(0)
        t, v = zip(*sel)
        return np.array(t), np.array(v)

    def keys(self) -> list[tuple[str, str]]:
        seen = {}
        for r in self.rows:
            seen.setdefault((r[1], r[2]), None)
        return list(seen)

    def final(self, qubit: str, observable: str) -> float:
        return float(self.series(qubit, observable)[1][-1])

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for t, q, o, v, se, s in self.rows:
            if not (math.isfinite(v) and math.isfinite(se)):
                raise ValueError(f"non-finite value in row t={t} {q} {o}")
            lines.append(f"{t:.10g},{q},{o},{v:.12g},{se:.6g},{s}")
        return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# running


def _observables(cfg: ExperimentConfig):
    return rotated_observables(cfg.circuit, cfg.targets, ("sz",))


def _sim_with_dt(cfg: ExperimentConfig) -> SimOptions:
    if cfg.sim.dt_max is None:
        return replace(cfg.sim, dt_max=default_dt_max(cfg.circuit))
    return cfg.sim


def run_config(cfg: ExperimentConfig, suffix: str = "") -> ResultTable:
    """Evolve one configuration with its selected solver."""
    p = cfg.circuit
    table = ResultTable()
    if cfg.solver == "rate":
        times = cfg.sim.times()
        nbar = thermal_occupancy(p.f_c, p.T_c, p.temp_convention)
        labels, vals = [], []
        for n, (members, tgt) in enumerate(zip(_qubit_members(cfg), cfg.targets)):
            minus = target_state(tgt)
            p_minus = sum(w * abs(np.vdot(minus, k)) ** 2 for w, k in members)
            p0 = PopulationVector(float(np.clip(p_minus, 0, 1)), float(np.clip(1 - p_minus, 0, 1)))
            gamma = polarization_rate(tgt.theta, angular(p.detuning), angular(p.g), angular(p.kappa))
            labels.append(f"q{n + 1}:sz")
            vals.append(sz_trace(p0, gamma, nbar, times))
        table.extend_series(TimeSeries(times, labels, np.array(vals)), "rate", suffix)
        return table
    drives = [calibrate_drive(t, p.omega_bar, p.f_L) for t in cfg.targets]
    H = build_h1(p, drives)
    chans = collapse_channels(p, cfg.targets, cfg.dissipation)
    obs = _observables(cfg)
    sim = _sim_with_dt(cfg)
    if cfg.solver == "master":
        ts = evolve_master(H, chans, initial_density_matrix(cfg), sim, obs)
    else:
        ts = evolve_trajectories(H, chans, initial_ensemble(cfg), sim, obs)
    table.extend_series(ts, cfg.solver, suffix)
    table.meta.update({k: v for k, v in ts.meta.items() if k != "samples"})
    return table


def _set_path(d: dict, path: str, value):
    keys = path.split(".")
    node = d
    for k in keys[:-1]:
        if isinstance(node, list):
            k = int(k)
        node = node[k]
    last = keys[-1]
    node[int(last) if isinstance(node, list) else last] = value


def _get_path(d: dict, path: str):
    node = d
    for k in path.split("."):
        node = node[int(k)] if isinstance(node, list) else node[k]
    return node


def run_sweep(cfg: ExperimentConfig, axis: str, values) -> ResultTable:
    """Rerun ``cfg`` for each value of the dotted config path ``axis``.

    Point ``i`` uses seed ``sim.seed + i``. ``circuit.delta_over_kappa``
    sets the detuning of the cooling mode through omega_bar.
    """
    base = cfg.to_dict()
    if axis == "circuit.delta_over_kappa":
        base["circuit"].pop("omega_bar")
        current = 0.0
    else:
        try:
            current = _get_path(base, axis)
        except (KeyError, IndexError, ValueError, TypeError) as exc:
            raise ConfigError(f"sweep axis {axis!r} is not a config field") from exc
    if isinstance(current, bool) or not isinstance(current, (int, float)):
        raise ConfigError(f"sweep axis {axis!r} is not numeric")
    table = ResultTable(meta={"axis": axis, "values": [], "points": []})
    for i, val in enumerate(values):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"sweep value {val!r} is not numeric")
        raw = copy.deepcopy(base)
        _set_path(raw, axis, int(val) if isinstance(current, int) and float(val) == int(val) else val)
        raw["sim"]["seed"] = int(cfg.sim.seed) + i
        point = config_from_dict(raw)
        tag = f"[{axis.split('.')[-1]}={val:g}]"
        sub = run_config(point, tag)
        table.rows.extend(sub.rows)
        table.meta["values"].append(val)
        table.meta["points"].append(point)
    return table


def fitted_times(table: ResultTable, cfg_points=None) -> dict[tuple[str, str], float]:
    """Exponential polarization time for every (qubit, observable) block."""
    out = {}
    for key in table.keys():
        t, v = table.series(*key)
        T, _, _ = fit_exponential((t, v))
        out[key] = T
    return out


def fit_block(table: ResultTable, qubit: str, observable: str, cfg: ExperimentConfig, n: int = 0):
    """Fit one block on the window [0, 3 T_guess] set by the analytic time."""
    p, tgt = cfg.circuit, cfg.targets[n]
    Tg = polarization_time(tgt.theta, angular(p.detuning), angular(p.g), angular(p.kappa))
    return fit_exponential(table.series(qubit, observable), T_guess=Tg)


# --------------------------------------------------------------------------
# scenarios

FIG3_NOTE = ("fig3 runs use 200 trajectories and two Fock levels by default; "
             "four-digit endpoint precision needs more trajectories and a larger cutoff")


def _fig3_config(name: str, overrides: dict) -> ExperimentConfig:
    strong = name in ("fig3b", "fig3c")
    raw = {
        "circuit": {"N": 3, "g": 15.0 if strong else 2.0, "kappa": 10.0 if strong else 20.0,
                    "fock_levels": 2, "T_c": 0.0, "temp_convention": "paper"},
        "targets": [{"theta": math.pi / 2, "phi": math.pi},
                    {"theta": math.pi / 2, "phi": math.pi / 2},
                    {"theta": 0.0, "phi": 0.0}],
        "initial_state": {"preset": "bloch_point",
                          "points": [[math.pi / 2, 3 * math.pi / 2], [math.pi, 0.0], [math.pi / 2, 0.0]]},
        "dissipation": {"enabled": name == "fig3c", "t_theta": 20.0, "t_phi": 10.0},
        "sim": {"t_final": 0.32 if strong else 3.2, "n_traj": 200, "n_samples": 81},
        "solver": "trajectories",
    }
    return config_from_dict(_merge(raw, overrides))


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def fig3_observable_map() -> dict[str, str]:
    """Lab-frame component reported by each fig3 qubit; all equal the rotated sz."""
    return {"q1": "sx", "q2": "sy", "q3": "sz"}


def run_scenario(name: str, overrides: dict | None = None) -> ResultTable:
    overrides = overrides or {}
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; valid: {list(SCENARIOS)}")
    if name == "fig2":
        base = _merge({"circuit": {"N": 1, "temp_convention": "paper"},
                       "sim": {"n_samples": 161}, "solver": "rate"}, overrides)
        cfg = config_from_dict(base)
        p = cfg.circuit
        gamma = polarization_rate(cfg.targets[0].theta, angular(p.detuning), angular(p.g), angular(p.kappa))
        times = np.linspace(0.0, 16.0 / gamma, cfg.sim.n_samples)
        table = ResultTable(meta={"scenario": name, "gamma": gamma})
        for T in FIG2_TEMPERATURES:
            raw = cfg.to_dict()
            raw["circuit"]["T_c"] = T
            raw["sim"]["sample_times"] = times.tolist()
            raw["solver"] = "rate"
            table.rows.extend(run_config(config_from_dict(raw), f"[T_c={T:g}K]").rows)
        return table
    if name == "fig2_inset":
        base = _merge({"circuit": {"N": 1}}, overrides)
        cfg = config_from_dict(base)
        p = cfg.circuit
        table = ResultTable(meta={"scenario": name})
        g, k = angular(p.g), angular(p.kappa)
        for th in np.linspace(0.0, math.pi, 13):
            for dk in np.linspace(-2.0, 2.0, 41):
                gam = polarization_rate(th, dk * k, g, k)
                table.rows.append((float(dk), "", f"gamma[theta={th:.6g}]", gam, 0.0, "rate"))
        return table
    cfg = _fig3_config(name, overrides)
    table = run_config(cfg)
    table.meta.update({"scenario": name, "note": FIG3_NOTE})
    return table


# --------------------------------------------------------------------------
# output


def emit_outputs(table: ResultTable, directory: str, stem: str = "result",
                 formats=("csv",), title: str = "") -> list[str]:
    """Write ``<stem>.csv`` (always) and optionally ``<stem>.svg``."""
    written = []
    try:
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, f"{stem}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table.to_csv())
        written.append(path)
        if "svg" in formats:
            path = os.path.join(directory, f"{stem}.svg")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(render_svg(table, title))
            written.append(path)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write output: {exc.strerror}", exc.filename) from exc
    return written


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def render_svg(table: ResultTable, title: str = "", width: int = 640, height: int = 400) -> str:
    """Static line plot, one polyline per (qubit, observable)."""
    keys = table.keys()
    ml, mr, mt, mb = 70, 160, 30, 50
    pw, ph = width - ml - mr, height - mt - mb
    allt = np.array([r[0] for r in table.rows]) if table.rows else np.array([0.0, 1.0])
    allv = np.array([r[3] for r in table.rows]) if table.rows else np.array([0.0, 1.0])
    t0, t1 = float(allt.min()), float(allt.max())
    v0, v1 = float(allv.min()), float(allv.max())
    if t1 <= t0:
        t1 = t0 + 1.0
    if v1 <= v0:
        v0, v1 = v0 - 0.5, v1 + 0.5
    sx = lambda t: ml + (t - t0) / (t1 - t0) * pw
    sy = lambda v: mt + (v1 - v) / (v1 - v0) * ph
    xlabel = "t (us)" if table.meta.get("scenario") != "fig2_inset" else "Delta/kappa"
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
           f'<text x="{ml + pw / 2}" y="{height - 12}" text-anchor="middle" font-size="13">{xlabel}</text>',
           f'<text x="16" y="{mt + ph / 2}" text-anchor="middle" font-size="13" '
           f'transform="rotate(-90 16 {mt + ph / 2})">expectation value</text>']
    if title:
        out.append(f'<text x="{ml + pw / 2}" y="18" text-anchor="middle" font-size="14">{title}</text>')
    for frac in (0.0, 0.5, 1.0):
        tv, vv = t0 + frac * (t1 - t0), v0 + frac * (v1 - v0)
        out.append(f'<text x="{sx(tv):.1f}" y="{mt + ph + 16}" text-anchor="middle" font-size="11">{tv:.3g}</text>')
        out.append(f'<text x="{ml - 6}" y="{sy(vv) + 4:.1f}" text-anchor="end" font-size="11">{vv:.3g}</text>')
    for i, key in enumerate(keys):
        t, v = table.series(*key)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, v))
        color = _COLORS[i % len(_COLORS)]
        label = ":".join(k for k in key if k).replace("&", "&amp;").replace("<", "&lt;")
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}">'
                   f'<title>{label}</title></polyline>')
        out.append(f'<text x="{ml + pw + 8}" y="{mt + 14 + 16 * i}" font-size="11" fill="{color}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

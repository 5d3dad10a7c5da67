"""Analytic rate layer: polarization rates, the two-level rate equation,
thermal steady states, exponential fitting and a quadrature check of the
second-order kernel.

All rates take angular quantities (rad/us) and return 1/us.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import curve_fit

from .circuit import CircuitParams, QubitTarget, coupling_coefficients
from .dynamics import TimeSeries, thermal_occupancy

POOR_FIT_RMS = 0.02


class DegenerateFitError(ValueError):
    """Raised when a series carries no decay to fit."""


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class RateParams:
    gamma_n: float
    n_bar: float
    eta: float
    lam: float
    branch: int = -1

    def __post_init__(self):
        if not self.gamma_n >= 0:
            raise ValueError(f"gamma_n must be >= 0, got {self.gamma_n!r}")
        if not self.n_bar >= 0:
            raise ValueError(f"n_bar must be >= 0, got {self.n_bar!r}")
        if self.branch not in (-1, 1):
            raise ValueError(f"branch must be -1 or +1, got {self.branch!r}")


@dataclass(frozen=True)
class PopulationVector:
    """Populations of the rotated-basis eigenstates (-1, +1)."""

    p_minus: float
    p_plus: float

    def __post_init__(self):
        for name in ("p_minus", "p_plus"):
            p = getattr(self, name)
            if not (-1e-12 <= p <= 1 + 1e-12):
                raise ValueError(f"{name}={p!r} outside [0, 1]")
        if abs(self.p_minus + self.p_plus - 1) > 1e-12:
            raise ValueError("populations must sum to 1")

    @property
    def sz(self) -> float:
        return self.p_plus - self.p_minus

    def as_array(self) -> np.ndarray:
        return np.array([self.p_minus, self.p_plus])


def eta_lambda(kappa: float, Delta: float) -> tuple[float, float]:
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    den = kappa**2 + 4 * Delta**2
    return 2 * kappa / den, 4 * Delta / den


def polarization_rate(theta: float, Delta: float, g: float, kappa: float) -> float:
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return (1 + math.cos(theta)) ** 2 / (1 + 4 * (Delta / kappa) ** 2) * g**2 / kappa


def polarization_time(theta: float, Delta: float, g: float, kappa: float) -> float:
    """Inverse polarization rate; ``inf`` where the rate vanishes (theta = pi)."""
    gamma = polarization_rate(theta, Delta, g, kappa)
    if gamma <= 1e-15 * g**2 / kappa:
        return math.inf
    return 1.0 / gamma


def rate_params(theta: float, Delta: float, g: float, kappa: float, n_bar: float = 0.0,
                branch: int = -1) -> RateParams:
    eta, lam = eta_lambda(kappa, Delta)
    return RateParams(polarization_rate(theta, Delta, g, kappa), n_bar, eta, lam, branch)


def rate_matrix(n_bar: float) -> np.ndarray:
    if not n_bar >= 0:
        raise ValueError("n_bar must be >= 0")
    return np.array([[-n_bar, n_bar + 1.0], [n_bar, -(n_bar + 1.0)]])


def evolve_rate(p0: PopulationVector, gamma: float, n_bar: float, t: float) -> PopulationVector:
    """Closed-form solution of dP/dt = gamma M P."""
    if t < 0:
        raise ValueError("t must be >= 0")
    stat_plus = n_bar / (2 * n_bar + 1)
    decay = math.exp(-gamma * (2 * n_bar + 1) * t)
    p_plus = stat_plus + (p0.p_plus - stat_plus) * decay
    p_plus = min(max(p_plus, 0.0), 1.0)
    return PopulationVector(1.0 - p_plus, p_plus)


def sz_trace(p0: PopulationVector, gamma: float, n_bar: float, times) -> np.ndarray:
    return np.array([evolve_rate(p0, gamma, n_bar, float(t)).sz for t in np.atleast_1d(times)])


def steady_state_sz(f_c: float, T_c: float, convention: str = "physical") -> float:
    n_bar = thermal_occupancy(f_c, T_c, convention)
    return -1.0 / (2 * n_bar + 1)


def fit_exponential(series, T_guess: float | None = None, label: str | None = None,
                    poor_rms: float = POOR_FIT_RMS):
    """Least-squares fit of ``A exp(-t/T) - 1``.

    ``series`` is a TimeSeries (``label`` picks the trace, default the
    first) or a ``(times, values)`` pair. Only samples with
    ``t <= 3 T_guess`` are used when ``T_guess`` is given.
    Returns ``(T, rms, poor)``.
    """
    if isinstance(series, TimeSeries):
        t = np.asarray(series.times, float)
        y = np.asarray(series[label] if label else series.values[0], float)
    else:
        t, y = (np.asarray(a, float) for a in series)
    if T_guess is not None and np.isfinite(T_guess):
        keep = t <= 3 * T_guess * (1 + 1e-9)
        t, y = t[keep], y[keep]
    if t.size < 5:
        raise ValueError(f"need at least 5 samples, got {t.size}")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite values in series")
    if np.ptp(y) < 1e-9:
        raise DegenerateFitError("constant series: nothing to fit")
    span = t[-1] - t[0]
    T0 = T_guess if T_guess and np.isfinite(T_guess) else span / 3
    A0 = max(y[0] + 1, 1e-3)
    f = lambda tt, A, T: A * np.exp(-tt / T) - 1.0
    try:
        popt, _ = curve_fit(f, t, y, p0=[A0, T0], bounds=([0, 1e-9 * span], [np.inf, np.inf]))
    except RuntimeError as exc:
        raise DegenerateFitError(f"fit did not converge: {exc}") from exc
    rms = float(np.sqrt(np.mean((f(t, *popt) - y) ** 2)))
    return float(popt[1]), rms, rms > poor_rms


def tcl2_numeric_rate(theta: float, Delta: float, g: float, kappa: float,
                      branch: int = -1, phi: float = 0.0, upper: float | None = None,
                      epsabs: float = 1e-13, epsrel: float = 1e-11) -> float:
    """Population-decay rate from direct quadrature of the bath kernel.

    The coupling weight is summed over resonators from the projected
    coupling table of a single-qubit network.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    params = CircuitParams(N=1, g=g / (2 * np.pi), kappa=kappa / (2 * np.pi))
    table = coupling_coefficients(params, [QubitTarget(theta, phi)])
    weight = float(np.sum(np.abs(2 * np.pi * table.Theta[branch][:, 0]) ** 2))
    if weight == 0.0:
        return 0.0
    upper = 40.0 / kappa if upper is None else upper
    re, err_re = quad(lambda s: math.exp(-kappa * s / 2) * math.cos(Delta * s), 0, upper,
                      epsabs=epsabs, epsrel=epsrel, limit=500)
    tail = 2.0 / kappa * math.exp(-kappa * upper / 2)
    if not np.isfinite(re) or err_re > 1e-6 * abs(re) + epsabs:
        raise QuadratureError(f"kernel quadrature did not converge (err {err_re:.3g})")
    if tail > 1e-3 * abs(re):
        raise QuadratureError(f"truncation tail {tail:.3g} too large; raise the upper limit")
    return 2.0 * weight * re


def kernel_tail_bound(kappa: float, upper: float | None = None) -> float:
    upper = 40.0 / kappa if upper is None else upper
    return 2.0 / kappa * math.exp(-kappa * upper / 2)

"""Scalar model problem d_t u + nu u = v with an analytic Gaussian source.

The tempered solution is u^nu(t, x) = int_{-inf}^t exp(-nu (t - s)) v(s, x) ds.
For v = A exp(-T^2) exp(-((x - x0)/ell)^2), T = (s - t0)/tau, completing the
square gives

    u^nu = A tau (sqrt(pi)/2) exp(-T^2) erfcx(nu tau/2 - T) g(x),

which stays finite for all t (erfcx avoids the exp(+)*erfc(-) cancellation).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, erfcx

from .errors import InvalidParameterError, TruncationWarning
from .kinetics import SpaceTimeGrid
from .quadrature import gauss_kronrod


@dataclass(frozen=True)
class ScalarSource:
    """v(t, x) = A exp(-((t - t0)/tau)^2) exp(-((x - x0)/ell)^2)."""

    amplitude: float = 1.0
    t0: float = 0.0
    tau: float = 1.0
    x0: float = 0.0
    ell: float = 1.0

    def __post_init__(self):
        if not (self.tau > 0 and self.ell > 0):
            raise InvalidParameterError("source widths tau and ell must be positive")

    def g_t(self, t):
        return np.exp(-((np.asarray(t, dtype=float) - self.t0) / self.tau) ** 2)

    def g_x(self, x):
        return np.exp(-((np.asarray(x, dtype=float) - self.x0) / self.ell) ** 2)

    def __call__(self, t, x):
        return self.amplitude * self.g_t(t) * self.g_x(x)

    def time_primitive(self, t):
        """int_{-inf}^t g_t(s) ds."""
        T = (np.asarray(t, dtype=float) - self.t0) / self.tau
        return self.tau * 0.5 * math.sqrt(math.pi) * erfc(-T)

    def time_support(self, cut=1e-17):
        r = self.tau * math.sqrt(math.log(1.0 / cut))
        return self.t0 - r, self.t0 + r


def _damped_time_integral(src, nu, t):
    T = (np.asarray(t, dtype=float) - src.t0) / src.tau
    a = 0.5 * nu * src.tau
    z = a - T
    with np.errstate(over="ignore", under="ignore"):
        pos = src.tau * 0.5 * math.sqrt(math.pi) * np.exp(-T * T) * erfcx(np.maximum(z, 0.0))
        neg = src.tau * 0.5 * math.sqrt(math.pi) * np.exp(a * a - 2 * a * T) * erfc(np.minimum(z, 0.0))
    return np.where(z >= 0, pos, neg)


def causal_u(src: ScalarSource, nu, t, x, *, method="closed-form", abs_tol=1e-14, rel_tol=1e-12):
    """u^nu(t, x); nu = 0 gives the causal solution int_{-inf}^t v ds."""
    if nu < 0:
        raise InvalidParameterError(f"damping nu must be >= 0, got {nu}")
    if method == "closed-form":
        out = src.amplitude * _damped_time_integral(src, nu, t) * src.g_x(x)
        return out if np.ndim(out) else float(out)
    if method != "quadrature":
        raise InvalidParameterError(f"unknown method {method!r}")
    if np.ndim(t) or np.ndim(x):
        f = np.vectorize(lambda tt, xx: causal_u(src, nu, tt, xx, method="quadrature",
                                                 abs_tol=abs_tol, rel_tol=rel_tol))
        return f(t, x)
    lo, hi = src.time_support()
    if t <= lo:
        return 0.0
    upper = min(t, hi)
    centers = [src.t0] if lo < src.t0 < upper else []
    val, _ = gauss_kronrod(lambda s: np.exp(-nu * (upper - s)) * src.g_t(s), lo, upper,
                           abs_tol=abs_tol, rel_tol=rel_tol, breakpoints=centers)
    val *= math.exp(-nu * (t - upper))
    return float(src.amplitude * val * src.g_x(x))


@dataclass
class FourierCheck:
    deviation: float
    deviation_per_mode: float
    leakage: float
    n_modes: int


def fourier_identity_check(src: ScalarSource, nu, grid: SpaceTimeGrid, *, floor=1e-8,
                           leakage_tol=1e-10):
    """Compare DFT(u^nu) with i DFT(v)/(omega + i nu) mode by mode.

    ``deviation`` is the max modal difference over max|u_hat|;
    ``deviation_per_mode`` divides by |u_hat| on modes where |v_hat| exceeds
    ``floor`` times its peak.
    """
    if not nu > 0:
        raise InvalidParameterError("the Fourier identity check needs nu > 0")
    T, X = grid.mesh()
    u = causal_u(src, nu, T, X)
    v = src(T, X)
    peak = float(np.max(np.abs(u)))
    leakage = 0.0
    if peak > 0:
        leakage = float(max(np.max(np.abs(u[0])), np.max(np.abs(u[-1])),
                            np.max(np.abs(u[:, 0])), np.max(np.abs(u[:, -1])))) / peak
        if leakage > leakage_tol:
            warnings.warn(f"solution not negligible at the window edge ({leakage:.2e})",
                          TruncationWarning, stacklevel=2)
    sp = grid.spectral()
    W, _ = sp.mesh()
    u_hat = sp.forward(u)
    pred = 1j * sp.forward(v) / (W + 1j * nu)
    diff = np.abs(u_hat - pred)
    scale = float(np.max(np.abs(u_hat)))
    if scale == 0:
        return FourierCheck(0.0, 0.0, leakage, 0)
    v_abs = np.abs(sp.forward(v))
    mask = v_abs > floor * v_abs.max()
    per_mode = float(np.max(diff[mask] / np.abs(u_hat[mask])))
    return FourierCheck(float(diff.max() / scale), per_mode, leakage, int(mask.sum()))


@dataclass
class UniquenessReport:
    nu: float
    delta: float
    horizon: float
    times: np.ndarray = field(repr=False)
    difference: np.ndarray = field(repr=False)
    growth_factor: float = 0.0
    expected: float = 0.0
    tempered_drift: float = 0.0

    @property
    def relative_error(self):
        if self.expected == 0:
            return abs(self.growth_factor)
        return abs(self.growth_factor - self.expected) / self.expected


def uniqueness_probe(src: ScalarSource, nu, delta, horizon, *, x=0.0, n_times=11):
    """Evolve the Cauchy problems from u^nu(0) and u^nu(0) + delta backward to t = -horizon.

    Both evolutions use Duhamel's formula with the source integral done by
    quadrature; their difference is delta exp(-nu t), so the growth factor at
    t = -horizon is exp(nu horizon). ``tempered_drift`` is the largest gap
    between the unperturbed evolution and the closed-form u^nu, relative to
    max|u^nu| on the probe times.
    """
    if not nu > 0:
        raise InvalidParameterError("the uniqueness probe needs nu > 0")
    if not horizon > 0:
        raise InvalidParameterError("horizon must be positive")
    base0 = causal_u(src, nu, 0.0, x)
    times = np.linspace(-horizon, 0.0, n_times)
    diff = np.empty(n_times)
    drift = np.empty(n_times)
    for i, t in enumerate(times):
        if t == 0:
            forced = 0.0
        else:
            # u(t) = e^{-nu t} u(0) - int_t^0 e^{-nu (t - s)} v(s, x) ds
            val, _ = gauss_kronrod(lambda s: np.exp(-nu * (t - s)) * src(s, x), t, 0.0,
                                   abs_tol=1e-300, rel_tol=1e-14)
            forced = float(val)
        decay = math.exp(-nu * t)
        base = decay * base0 - forced
        diff[i] = (decay * (base0 + delta) - forced) - base
        drift[i] = base - causal_u(src, nu, t, x)
    ref = np.max(np.abs(causal_u(src, nu, times, x)))
    growth = abs(diff[0]) / abs(delta) if delta else 0.0
    expected = math.exp(nu * horizon) if delta else 0.0
    tempered = float(np.max(np.abs(drift)) / ref) if ref > 0 else float(np.max(np.abs(drift)))
    return UniquenessReport(nu, delta, horizon, times, diff, growth, expected, tempered)


@dataclass
class ModelSweepReport:
    nus: list
    max_errors: list
    monotone: bool
    causal_violation: float
    bound_violation: float


def model_nu_sweep(src: ScalarSource, nus, t_values, x_values):
    """|u^nu - u| over a probe lattice for a decreasing nu sweep, plus the
    causality and boundedness properties of u."""
    T, X = np.meshgrid(np.asarray(t_values, float), np.asarray(x_values, float), indexing="ij")
    ref = causal_u(src, 0.0, T, X)
    errs = [float(np.max(np.abs(causal_u(src, nu, T, X) - ref))) for nu in nus]
    mono = all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
    lo, _ = src.time_support(1e-30)
    early = causal_u(src, 0.5, np.full(5, lo), np.linspace(-2, 2, 5))
    bound = abs(src.amplitude) * src.tau * math.sqrt(math.pi) * src.g_x(X)
    over = float(np.max(np.abs(ref) - bound))
    return ModelSweepReport(list(nus), errs, mono, float(np.max(np.abs(early))), max(over, 0.0))

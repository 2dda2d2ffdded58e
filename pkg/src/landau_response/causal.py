"""Causal and damped solutions of the linearized 1D Vlasov equation.

The damped problem

    d_t f + nu f + v d_x f = -(q/m) E(t, x) F'(v)

has exactly one tempered solution, obtained by integrating backward along the
characteristics X(s) = x - v (t - s):

    f_nu(t, x, v) = -(q/m) F'(v) int_{-inf}^t exp(-nu (t-s)) E(s, X(s)) ds.

nu = 0 gives the causal limit f. Both cases share the code below.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, QuadratureError
from .kinetics import (EquilibriumDistribution, FieldPerturbation, characteristic_integral,
                       eval_field, velocity_window)
from .quadrature import QuadratureSpec, gauss_kronrod

S_METHODS = ("adaptive", "closed-form")


@dataclass(frozen=True)
class CausalSolution:
    """Damped (nu > 0) or causal (nu = 0) response to a prescribed field.

    ``s_integral`` selects how the integral along each characteristic is done:
    adaptive Gauss-Kronrod (default) or the packet closed form, which is used
    for large batches of points.
    """

    nu: float
    equilibrium: EquilibriumDistribution
    field: FieldPerturbation
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    s_integral: str = "adaptive"

    def __post_init__(self):
        if not self.nu >= 0:
            raise InvalidParameterError(f"damping nu must be >= 0, got {self.nu}")
        if self.s_integral not in S_METHODS:
            raise InvalidParameterError(f"unknown s_integral method {self.s_integral!r}")

    def with_nu(self, nu):
        return CausalSolution(nu, self.equilibrium, self.field, self.quadrature, self.s_integral)


def _characteristic_integral(sol, t, x, v):
    """int_{-inf}^t exp(-nu (t-s)) E(s, x - v (t-s)) ds for each entry of v."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if sol.s_integral == "closed-form":
        return characteristic_integral(sol.field, sol.nu, t, x, v)
    spec = sol.quadrature
    lo, hi = sol.field.time_support(spec.tail_cut)
    if not lo < t:
        return np.zeros(v.shape)
    upper = min(t, hi)
    centers = [p.t0 for p in sol.field.packets() if lo < p.t0 < upper]
    nu, E = sol.nu, sol.field

    def integrand(s):
        lag = t - s
        return np.exp(-nu * lag)[:, None] * eval_field(E, s[:, None], x - v[None, :] * lag[:, None])

    val, _ = gauss_kronrod(integrand, lo, upper, abs_tol=spec.abs_tol, rel_tol=spec.rel_tol,
                           max_subdivisions=spec.max_subdivisions, breakpoints=centers)
    return val


def causal_f(sol: CausalSolution, t, x, v):
    """f_nu(t, x, v); ``v`` may be an array, (t, x) are scalars."""
    eq = sol.equilibrium
    scalar = np.ndim(v) == 0
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    out = -eq.species.charge_to_mass * eq.dF(vv) * _characteristic_integral(sol, t, x, vv)
    return float(out[0]) if scalar else out


def initial_condition_f0(sol: CausalSolution, x, v):
    """The unique Cauchy datum at t = 0 whose evolution stays tempered."""
    if not sol.nu > 0:
        raise InvalidParameterError("the Cauchy datum is defined for the damped problem, nu > 0")
    return causal_f(sol, 0.0, x, v)


def residual_Lnu(sol: CausalSolution, t, x, v, h_t, h_x):
    """Centered-difference residual of the damped Vlasov equation at (t, x, v)."""
    if not (h_t > 0 and h_x > 0):
        raise InvalidParameterError("finite-difference steps must be positive")
    f = causal_f(sol, t, x, v)
    dt = (causal_f(sol, t + h_t, x, v) - causal_f(sol, t - h_t, x, v)) / (2 * h_t)
    dx = (causal_f(sol, t, x + h_x, v) - causal_f(sol, t, x - h_x, v)) / (2 * h_x)
    eq = sol.equilibrium
    source = eq.species.charge_to_mass * eval_field(sol.field, t, x) * eq.dF(v)
    return dt + sol.nu * f + v * dx + source


def _trapezoid_doubling(values_at, v_max, n0, rel_tol, abs_tol, n_max):
    """Trapezoid rule on [-v_max, v_max] refined by doubling until two levels agree.

    ``values_at(v)`` returns integrand samples (last axis over v). Returns the
    finest estimate and the node count used.
    """
    n = n0
    v = np.linspace(-v_max, v_max, n + 1)
    vals = values_at(v)
    h = v[1] - v[0]
    acc = vals.sum(axis=-1) - 0.5 * (vals[..., 0] + vals[..., -1])
    est = h * acc
    while True:
        mids = v[:-1] + 0.5 * h
        acc = acc + values_at(mids).sum(axis=-1)
        h *= 0.5
        n *= 2
        new = h * acc
        v = np.linspace(-v_max, v_max, n + 1)
        diff = np.max(np.abs(new - est))
        if diff <= max(abs_tol, rel_tol * np.max(np.abs(new))):
            return new, n
        if n >= n_max:
            raise QuadratureError("velocity trapezoid did not converge", float(diff), new)
        est = new


def current_j(sol: CausalSolution, t, x, *, n_v=256, v_rel_tol=1e-9, v_abs_tol=1e-13,
              n_v_max=1 << 15):
    """Induced current q int v f(t, x, v) dv on the truncated velocity window."""
    eq = sol.equilibrium
    V = velocity_window(eq.species)
    q = eq.species.q

    def values_at(v):
        return q * v * causal_f(sol, t, x, v)

    val, _ = _trapezoid_doubling(values_at, V, n_v, v_rel_tol, v_abs_tol, n_v_max)
    return float(val)


def current_j_points(sol: CausalSolution, t, x, *, n_v=256, v_rel_tol=1e-9, v_abs_tol=1e-13,
                     n_v_max=1 << 15, chunk=256, threads=1):
    """Current at many points (broadcast t, x). Closed-form characteristics are
    vectorized over chunks of points; adaptive ones are evaluated point by point."""
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    shape = t.shape
    tf, xf = t.ravel(), x.ravel()
    eq = sol.equilibrium
    V = velocity_window(eq.species)
    pref = -eq.species.q * eq.species.charge_to_mass

    if sol.s_integral == "closed-form":
        def block(i):
            tb, xb = tf[i:i + chunk, None], xf[i:i + chunk, None]

            def values_at(v):
                return pref * v * eq.dF(v) * characteristic_integral(sol.field, sol.nu, tb, xb,
                                                                     v[None, :])
            return _trapezoid_doubling(values_at, V, n_v, v_rel_tol, v_abs_tol, n_v_max)[0]
        starts = range(0, tf.size, chunk)
    else:
        def block(i):
            return np.array([current_j(sol, tf[i], xf[i], n_v=n_v, v_rel_tol=v_rel_tol,
                                       v_abs_tol=v_abs_tol, n_v_max=n_v_max)])
        starts = range(tf.size)

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(i) for i in starts]
    out = np.concatenate(parts) if parts else np.zeros(0)
    return out.reshape(shape)


def current_j_profile(sol: CausalSolution, n0, t, x, *, n_v=256, v_rel_tol=1e-9,
                      v_abs_tol=1e-13, n_v_max=1 << 15):
    """Current for a non-uniform background n0(x) F(v)/n.

    The density profile is evaluated at the foot of each characteristic, next
    to the field.
    """
    eq = sol.equilibrium
    sp = eq.species
    V = velocity_window(sp)
    spec = sol.quadrature
    lo, hi = sol.field.time_support(spec.tail_cut)
    if not lo < t:
        return 0.0
    upper = min(t, hi)
    centers = [p.t0 for p in sol.field.packets() if lo < p.t0 < upper]
    nu, E = sol.nu, sol.field

    def values_at(v):
        def integrand(s):
            lag = t - s
            X = x - v[None, :] * lag[:, None]
            return np.exp(-nu * lag)[:, None] * n0(X) * eval_field(E, s[:, None], X)
        s_int, _ = gauss_kronrod(integrand, lo, upper, abs_tol=spec.abs_tol, rel_tol=spec.rel_tol,
                                 max_subdivisions=spec.max_subdivisions, breakpoints=centers)
        return -sp.q * sp.charge_to_mass * v * eq.dF(v) / sp.n * s_int

    val, _ = _trapezoid_doubling(values_at, V, n_v, v_rel_tol, v_abs_tol, n_v_max)
    return float(val)


@dataclass
class ConvergenceReport:
    """Outcome of a damping sweep nu -> 0+ against the nu = 0 reference."""

    nus: list
    max_errors: list
    max_reference: float
    rows: list = field(default_factory=list)
    monotone: bool = True
    final_ok: bool = True
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return self.monotone and self.final_ok

    def final_relative(self):
        return self.max_errors[-1] / self.max_reference if self.max_reference else 0.0


def _check_sweep(nus):
    nus = [float(n) for n in nus]
    if not nus:
        raise InvalidParameterError("nu sweep is empty")
    if any(n < 0 for n in nus):
        raise InvalidParameterError("damping values must be non-negative")
    if nus[-1] == 0:
        nus = nus[:-1]
    if any(not n > 0 for n in nus) or any(b >= a for a, b in zip(nus, nus[1:])):
        raise InvalidParameterError("nu sweep must be strictly decreasing towards 0")
    return nus


def nu_sweep_f(sol: CausalSolution, nus, probes, *, rel_threshold=1e-3, mono_tol=1e-9,
               threads=1):
    """Max over probes of |f_nu - f| for each nu in a decreasing sweep.

    ``probes`` is an iterable of (t, x, v). Non-monotone behaviour or a final
    error above ``rel_threshold * max|f|`` is flagged, not raised.
    """
    nus = _check_sweep(nus)
    probes = [tuple(map(float, p)) for p in probes]
    ref = sol.with_nu(0.0)

    def at(args):
        s, (t, x, v) = args
        return causal_f(s, t, x, v)

    def evaluate(s):
        jobs = [(s, p) for p in probes]
        if threads and threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                return np.array(list(pool.map(at, jobs)))
        return np.array([at(j) for j in jobs])

    f_lim = evaluate(ref)
    max_ref = float(np.max(np.abs(f_lim))) if f_lim.size else 0.0
    report = ConvergenceReport(nus=nus, max_errors=[], max_reference=max_ref)
    for nu in nus:
        f_nu = evaluate(sol.with_nu(nu))
        err = np.abs(f_nu - f_lim)
        report.max_errors.append(float(err.max()) if err.size else 0.0)
        for (t, x, v), a, b, e in zip(probes, f_nu, f_lim, err):
            report.rows.append((nu, t, x, v, float(a), float(b), float(e)))
    for i in range(1, len(nus)):
        if report.max_errors[i] > report.max_errors[i - 1] + mono_tol:
            report.monotone = False
            report.violations.append(
                f"error grew from {report.max_errors[i - 1]:.3e} at nu={nus[i - 1]:g} "
                f"to {report.max_errors[i]:.3e} at nu={nus[i]:g}")
    if report.max_errors[-1] > rel_threshold * max_ref:
        report.final_ok = False
        report.violations.append(
            f"final error {report.max_errors[-1]:.3e} exceeds {rel_threshold:g} * max|f|")
    return report


def probe_lattice(t_range, x_range, v_range, n=5):
    """n x n x n lattice of (t, x, v) probes spanning the given closed ranges."""
    ts = np.linspace(*t_range, n)
    xs = np.linspace(*x_range, n)
    vs = np.linspace(*v_range, n)
    return [(t, x, v) for t in ts for x in xs for v in vs]

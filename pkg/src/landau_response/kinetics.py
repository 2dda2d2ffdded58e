"""Equilibria, prescribed field perturbations and space-time grids.

All quantities are in nondimensional c.g.s.-style units where, by default,
q = m = n = v_t = 1, so the squared plasma frequency is exactly 4*pi.

Fourier transforms follow the space-time convention

    E_hat(omega, k) = int int E(t, x) exp(i*omega*t - i*k*x) dt dx,

i.e. the time frequency carries the opposite sign to the spatial one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import wofz

from .errors import InvalidParameterError, UnsupportedSpectrumError

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class PlasmaSpecies:
    q: float = 1.0
    m: float = 1.0
    n: float = 1.0
    v_t: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise InvalidParameterError(f"mass must be positive, got {self.m}")
        if not self.n > 0:
            raise InvalidParameterError(f"density must be positive, got {self.n}")
        if not self.v_t > 0:
            raise InvalidParameterError(f"thermal speed must be positive, got {self.v_t}")

    @property
    def omega_p2(self):
        """Squared plasma frequency 4 pi q^2 n / m."""
        return 4.0 * math.pi * self.q ** 2 * self.n / self.m

    @property
    def charge_to_mass(self):
        return self.q / self.m


@dataclass(frozen=True)
class EquilibriumDistribution:
    """Background distribution F(v) with its derivative and G(v) = v F'(v) / n."""

    species: PlasmaSpecies
    F: Callable
    dF: Callable
    G: Callable
    name: str = "custom"

    def density(self, n_nodes=4001):
        v = np.linspace(-velocity_window(self.species), velocity_window(self.species), n_nodes)
        return float(np.trapezoid(self.F(v), v))


def make_maxwellian(species: PlasmaSpecies) -> EquilibriumDistribution:
    """Maxwellian F(v) = n exp(-v^2/v_t^2) / (sqrt(pi) v_t) with analytic derivative."""
    if not isinstance(species, PlasmaSpecies):
        raise InvalidParameterError("species must be a PlasmaSpecies")
    n, vt = species.n, species.v_t
    norm = n / (SQRT_PI * vt)

    def _y(v):
        # |v/v_t| beyond 1e100 only feeds exp(-y^2) = 0; clip to avoid overflow in y^2
        return np.clip(np.asarray(v, dtype=float) / vt, -1e100, 1e100)

    def F(v):
        return norm * np.exp(-_y(v) ** 2)

    def dF(v):
        y = _y(v)
        return -2.0 * y / vt * norm * np.exp(-y * y)

    def G(v):
        y = _y(v)
        return -2.0 * y * y * np.exp(-y * y) / (SQRT_PI * vt)

    return EquilibriumDistribution(species, F, dF, G, name="maxwellian")


def velocity_window(species, omega_max=0.0, k_min=None):
    """Half-width of the truncated velocity domain.

    |v| <= v_t * max(8, omega_max/k_min + 4 v_t); the second branch keeps the
    resonance v = omega/k well inside the window.
    """
    vt = species.v_t
    ratio = 0.0
    if k_min is not None and k_min > 0:
        ratio = abs(omega_max) / k_min + 4.0 * vt
    return vt * max(8.0, ratio)


FIELD_KINDS = ("gaussian-packet", "modulated-packet", "superposition")


@dataclass(frozen=True)
class FieldPerturbation:
    """Analytic Schwartz-class field E(t, x).

    Packets are ``A exp(-(t-t0)^2/tau^2 - (x-x0)^2/ell^2) cos(k0 x - omega0 t)``
    (the gaussian packet has no carrier). A superposition sums its components.
    """

    kind: str
    amplitude: float = 1.0
    t0: float = 0.0
    x0: float = 0.0
    tau: float = 1.0
    ell: float = 1.0
    omega0: float = 0.0
    k0: float = 0.0
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise InvalidParameterError(f"unknown field kind {self.kind!r}")
        if self.kind == "superposition":
            if not all(isinstance(c, FieldPerturbation) for c in self.components):
                raise InvalidParameterError("superposition components must be fields")
        elif not (self.tau > 0 and self.ell > 0):
            raise InvalidParameterError("packet widths tau and ell must be positive")

    def packets(self):
        """Flat list of (non-superposition) packets making up this field."""
        if self.kind != "superposition":
            return [self]
        out = []
        for c in self.components:
            out.extend(c.packets())
        return out

    @property
    def carrier(self):
        return (self.omega0, self.k0) if self.kind == "modulated-packet" else (0.0, 0.0)

    def __call__(self, t, x):
        return eval_field(self, t, x)

    def scaled(self, alpha):
        if self.kind == "superposition":
            return superpose(*(c.scaled(alpha) for c in self.components))
        return _replace(self, amplitude=self.amplitude * alpha)

    def time_support(self, cut):
        """Interval outside which every packet's time envelope is below ``cut``."""
        lo, hi = math.inf, -math.inf
        for p in self.packets():
            if p.amplitude == 0:
                continue
            r = p.tau * math.sqrt(max(math.log(abs(p.amplitude) / cut), 0.0))
            lo, hi = min(lo, p.t0 - r), max(hi, p.t0 + r)
        return lo, hi

    def space_support(self, cut):
        lo, hi = math.inf, -math.inf
        for p in self.packets():
            if p.amplitude == 0:
                continue
            r = p.ell * math.sqrt(max(math.log(abs(p.amplitude) / cut), 0.0))
            lo, hi = min(lo, p.x0 - r), max(hi, p.x0 + r)
        return lo, hi


def _replace(f, **kw):
    d = dict(kind=f.kind, amplitude=f.amplitude, t0=f.t0, x0=f.x0, tau=f.tau, ell=f.ell,
             omega0=f.omega0, k0=f.k0, components=f.components)
    d.update(kw)
    return FieldPerturbation(**d)


def gaussian_packet(amplitude=1.0, t0=0.0, x0=0.0, tau=1.0, ell=1.0):
    return FieldPerturbation("gaussian-packet", amplitude, t0, x0, tau, ell)


def modulated_packet(amplitude=1.0, t0=0.0, x0=0.0, tau=1.0, ell=1.0, omega0=0.0, k0=0.0):
    return FieldPerturbation("modulated-packet", amplitude, t0, x0, tau, ell, omega0, k0)


def superpose(*fields):
    return FieldPerturbation("superposition", components=tuple(fields))


def eval_field(E: FieldPerturbation, t, x):
    """Pointwise value of E(t, x); broadcasts over array arguments."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros(np.broadcast(t, x).shape)
    for p in E.packets():
        if p.amplitude == 0:
            continue
        env = np.exp(-((t - p.t0) / p.tau) ** 2 - ((x - p.x0) / p.ell) ** 2)
        w0, k0 = p.carrier
        if w0 or k0:
            env = env * np.cos(k0 * x - w0 * t)
        out = out + p.amplitude * env
    return out if out.ndim else float(out)


def _gauss_hat(p, omega, k):
    return (math.pi * p.tau * p.ell
            * np.exp(-(omega * p.tau) ** 2 / 4 - (k * p.ell) ** 2 / 4)
            * np.exp(1j * (omega * p.t0 - k * p.x0)))


def spectrum_field(E: FieldPerturbation, omega, k):
    """Closed-form E_hat(omega, k) under the exp(i omega t - i k x) convention."""
    omega = np.asarray(omega, dtype=float)
    k = np.asarray(k, dtype=float)
    out = np.zeros(np.broadcast(omega, k).shape, dtype=complex)
    for p in E.packets():
        if p.kind == "gaussian-packet":
            out = out + p.amplitude * _gauss_hat(p, omega, k)
        elif p.kind == "modulated-packet":
            # cos(k0 x - w0 t) shifts the envelope spectrum to (w0, k0) and (-w0, -k0)
            out = out + 0.5 * p.amplitude * (_gauss_hat(p, omega - p.omega0, k - p.k0)
                                             + _gauss_hat(p, omega + p.omega0, k + p.k0))
        else:
            raise UnsupportedSpectrumError(f"no closed-form spectrum for {p.kind!r}")
    return out if out.ndim else complex(out)


def characteristic_integral(E: FieldPerturbation, nu, t, x, v):
    """Closed form of int_{-inf}^t exp(-nu (t-s)) E(s, x - v (t-s)) ds.

    Each packet gives a Gaussian-in-s exponent, so the half-line integral is an
    erfc of complex argument, evaluated through the Faddeeva function in the
    branch that cannot overflow. Broadcasts over (t, x, v).
    """
    t, x, v = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (t, x, v)))
    out = np.zeros(t.shape)
    for p in E.packets():
        if p.amplitude == 0:
            continue
        w0, k0 = p.carrier
        a_t, a_x = 1.0 / p.tau ** 2, 1.0 / p.ell ** 2
        pp = x - v * t - p.x0
        alpha = a_t + v ** 2 * a_x
        beta = 2 * p.t0 * a_t - 2 * pp * v * a_x + nu + 1j * (k0 * v - w0)
        gamma = -p.t0 ** 2 * a_t - pp ** 2 * a_x + 1j * k0 * (pp + p.x0) - nu * t
        sa = np.sqrt(alpha)
        z = beta / (2 * sa) - sa * t
        phi_t = gamma + beta * t - alpha * t ** 2
        pref = SQRT_PI / (2 * sa)
        early = z.real >= 0
        val = np.empty(t.shape, dtype=complex)
        val[early] = pref[early] * np.exp(phi_t[early]) * wofz(1j * z[early])
        late = ~early
        full = np.exp(gamma[late] + beta[late] ** 2 / (4 * alpha[late]))
        val[late] = pref[late] * (2 * full - np.exp(phi_t[late]) * wofz(-1j * z[late]))
        out = out + p.amplitude * val.real
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform periodic sampling of [t_min, t_max) x [x_min, x_max)."""

    t_min: float
    t_max: float
    n_t: int
    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if not (self.t_max > self.t_min and self.x_max > self.x_min):
            raise InvalidParameterError("grid bounds must be strictly increasing")
        for name in ("n_t", "n_x"):
            n = getattr(self, name)
            if n < 2 or n & (n - 1):
                raise InvalidParameterError(f"{name} must be a power of two, got {n}")

    @property
    def dt(self):
        return (self.t_max - self.t_min) / self.n_t

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_x

    @property
    def t(self):
        return self.t_min + self.dt * np.arange(self.n_t)

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n_x)

    def mesh(self):
        return np.meshgrid(self.t, self.x, indexing="ij")

    def spectral(self):
        return SpectralGrid.from_grid(self)


@dataclass(frozen=True)
class SpectralGrid:
    """Dual (omega, k) nodes of a SpaceTimeGrid, in numpy FFT order.

    ``omega`` already carries the physical sign: a numpy bin with angular
    frequency W along the time axis corresponds to omega = -W.
    """

    grid: SpaceTimeGrid
    omega: np.ndarray
    k: np.ndarray

    @classmethod
    def from_grid(cls, grid):
        W = 2 * np.pi * np.fft.fftfreq(grid.n_t, grid.dt)
        k = 2 * np.pi * np.fft.fftfreq(grid.n_x, grid.dx)
        return cls(grid, -W, k)

    def mesh(self):
        return np.meshgrid(self.omega, self.k, indexing="ij")

    def forward(self, samples):
        """Approximate E_hat on the dual nodes from samples on the grid."""
        g = self.grid
        phase = np.exp(1j * self.omega[:, None] * g.t_min - 1j * self.k[None, :] * g.x_min)
        return g.dt * g.dx * phase * np.fft.fft2(samples)

    def inverse(self, values):
        """Inverse of :meth:`forward`; returns complex samples on the grid."""
        g = self.grid
        phase = np.exp(1j * self.omega[:, None] * g.t_min - 1j * self.k[None, :] * g.x_min)
        return np.fft.ifft2(values / phase) / (g.dt * g.dx)

"""Hilbert transform on the real line and the Dawson function.

    H(phi)(x) = (1/pi) p.v. int phi(y) / (x - y) dy
              = (1/pi) int_0^inf [phi(x - u) - phi(x + u)] / u du.

The symmetric-difference form has a removable singularity at u = 0, so plain
composite quadrature works. We integrate on a grid u = u_max * s^2 with s
uniform, which is dense near u = 0 and gives the node at u = 0 zero weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, TruncationWarning


@dataclass(frozen=True)
class PvIntegrandSpec:
    """Discretization of the symmetric-difference integral.

    ``u_max`` must exceed |x| plus the effective support radius of phi for
    every evaluation point x.
    """

    u_max: float = 60.0
    n_u: int = 8192
    singular_floor: float = 1e-9

    def __post_init__(self):
        if not self.u_max > 0:
            raise InvalidParameterError("u_max must be positive")
        if self.n_u < 2 or self.n_u % 2:
            raise InvalidParameterError("n_u must be a positive even integer")
        spacing = self.u_max / self.n_u ** 2
        if not 0 < self.singular_floor < spacing:
            raise InvalidParameterError(
                f"singular_floor must lie in (0, {spacing:.3e}) for this grid")


@dataclass
class HilbertInfo:
    truncated: bool
    edge_ratio: float


def _simpson_weights(n):
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * n)


def hilbert(phi, x, spec: PvIntegrandSpec = PvIntegrandSpec(), *, full_output=False,
            edge_tol=1e-10, chunk=64):
    """Hilbert transform of ``phi`` at the point(s) ``x``.

    ``phi`` must accept numpy arrays; complex-valued phi is transformed
    component-wise. With ``full_output`` a :class:`HilbertInfo` reporting
    non-decay of phi at the ends of the window is returned as well.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    s = np.linspace(0.0, 1.0, spec.n_u + 1)[1:]
    u = spec.u_max * s ** 2
    w = (_simpson_weights(spec.n_u)[1:] * 2.0 * spec.u_max * s)
    small = u < spec.singular_floor
    out = None
    peak, edge = 0.0, 0.0
    for i in range(0, xa.size, chunk):
        xb = xa[i:i + chunk, None]
        left = phi(xb - u[None, :])
        right = phi(xb + u[None, :])
        g = (left - right) / u[None, :]
        if small.any():
            # even in u: fit g(u) = g0 + g2 u^2 from the two nodes at the floor and twice it
            u1 = spec.singular_floor
            g1 = (phi(xb - u1) - phi(xb + u1)) / u1
            g2 = (phi(xb - 2 * u1) - phi(xb + 2 * u1)) / (2 * u1)
            c2 = (g2 - g1) / (3 * u1 ** 2)
            g[:, small] = (g1 - c2 * u1 ** 2) + c2 * u[None, small] ** 2
        val = (g * w[None, :]).sum(axis=1) / math.pi
        out = val if out is None else np.concatenate([out, val])
        peak = max(peak, float(np.max(np.abs(left))), float(np.max(np.abs(right))))
        edge = max(edge, float(np.max(np.abs(left[:, -1]))), float(np.max(np.abs(right[:, -1]))))
    ratio = edge / peak if peak > 0 else 0.0
    info = HilbertInfo(truncated=ratio > edge_tol, edge_ratio=ratio)
    if info.truncated:
        warnings.warn(f"phi has not decayed at the integration edge (ratio {ratio:.2e}); "
                      "increase u_max", TruncationWarning, stacklevel=2)
    res = out if np.ndim(x) else out[0]
    if not np.ndim(x):
        res = complex(res) if np.iscomplexobj(res) else float(res)
    return (res, info) if full_output else res


class HilbertTable:
    """H(phi) tabulated on a uniform grid and cubic-spline interpolated.

    One transform serves many lookups (e.g. H(G)(omega/k) over a spectral
    grid). Points outside the table fall back to direct evaluation.
    """

    def __init__(self, phi, half_width, n=4097, spec=None, support=12.0):
        from scipy.interpolate import CubicSpline

        self.phi = phi
        self.half_width = float(half_width)
        self.spec = spec or PvIntegrandSpec(u_max=self.half_width + support)
        self.nodes = np.linspace(-self.half_width, self.half_width, n)
        self.values = hilbert(phi, self.nodes, self.spec)
        self._spline = CubicSpline(self.nodes, self.values)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        inside = np.abs(x) <= self.half_width
        out[inside] = self._spline(x[inside])
        if (~inside).any():
            xo = x[~inside]
            spec = PvIntegrandSpec(u_max=float(np.max(np.abs(xo))) + self.spec.u_max
                                   - self.half_width, n_u=self.spec.n_u)
            out[~inside] = hilbert(self.phi, xo, spec)
        return out if out.ndim else float(out)


def dawson(x):
    """Dawson integral D(x) = exp(-x^2) int_0^x exp(s^2) ds.

    Maclaurin series for |x| <= 3, continued fraction beyond. Accepts arrays.
    """
    xa = np.asarray(x, dtype=float)
    out = np.vectorize(_dawson_scalar, otypes=[float])(xa)
    return out if out.ndim else float(out)


def _dawson_scalar(x):
    ax = abs(x)
    if ax <= 3.0:
        # D(x) = sum_n (-1)^n 2^n x^(2n+1) / (2n+1)!!
        term = ax
        total = ax
        n = 0
        while abs(term) > 1e-17 * abs(total) or n < 4:
            n += 1
            term *= -2.0 * ax * ax / (2 * n + 1)
            total += term
            if n > 400:
                break
        val = total
    else:
        # D(x) = x / (1 + 2x^2 - 4x^2 / (3 + 2x^2 - 8x^2 / (5 + 2x^2 - ...)))
        x2 = ax * ax
        depth = 60 + int(40 / ax)
        frac = 0.0
        for n in range(depth, 0, -1):
            frac = 4.0 * n * x2 / ((2 * n + 1) + 2 * x2 - frac)
        val = ax / (1.0 + 2 * x2 - frac)
    return math.copysign(val, x)


@dataclass
class SymbolCheck:
    """Spectral comparison of H(phi) with -i sign(xi) phi_hat."""

    deviation: float
    xi: np.ndarray
    phi_hat: np.ndarray
    hilbert_hat: np.ndarray
    truncated: bool


# Reference tails whose Fourier transforms are known in closed form; their
# large-|x| expansions start at 1/x, 1/x^2, 1/x^3 and 1/x^4 respectively.
def _tail_basis(x):
    d = 1.0 + x * x
    return [x / (math.pi * d), 1.0 / (math.pi * d), x / (math.pi * d * d), 1.0 / (math.pi * d * d)]


def _tail_basis_hat(xi):
    a = np.abs(xi)
    e = np.exp(-a)
    return [-1j * np.sign(xi) * e, e, -0.5j * xi * e, 0.5 * (1 + a) * e]


def _moments(phi_vals, x, dx, order=4):
    return [dx * np.sum(x ** n * phi_vals) for n in range(order)]


def _tail_coefficients(m):
    # match (1/pi) sum m_n / x^(n+1) through order x^-4 with the basis expansions
    c0, c1 = m[0], m[1]
    return [c0, c1, m[2] + c0, m[3] + c1]


def hilbert_symbol_check(phi, x_min, x_max, n, spec: PvIntegrandSpec | None = None, *,
                         boundary_tol=1e-10):
    """Max over nonzero frequencies of |FT(H phi) + i sign(xi) phi_hat| / max|phi_hat|.

    H phi is evaluated at the n grid nodes of [x_min, x_max). It decays only
    like 1/x, so its far field is removed first with reference functions
    matched to the moments of phi; their transforms are added back exactly.
    """
    dx = (x_max - x_min) / n
    x = x_min + dx * np.arange(n)
    vals = phi(x)
    peak = np.max(np.abs(vals))
    if peak == 0:
        zero = np.zeros(n)
        return SymbolCheck(0.0, 2 * np.pi * np.fft.fftfreq(n, dx), zero, zero, False)
    truncated = max(abs(vals[0]), abs(vals[-1])) > boundary_tol * peak
    if truncated:
        warnings.warn("phi is not negligible at the grid boundary", TruncationWarning,
                      stacklevel=2)
    if spec is None:
        spec = PvIntegrandSpec(u_max=max(abs(x_min), abs(x_max)) * 2 + 20.0, n_u=8192)
    h = hilbert(phi, x, spec)
    coeffs = _tail_coefficients(_moments(vals, x, dx))
    basis = _tail_basis(x)
    resid = h - sum(c * b for c, b in zip(coeffs, basis))
    xi = 2 * np.pi * np.fft.fftfreq(n, dx)
    phase = dx * np.exp(-1j * xi * x_min)
    phi_hat = phase * np.fft.fft(vals)
    h_hat = phase * np.fft.fft(resid) + sum(c * b for c, b in zip(coeffs, _tail_basis_hat(xi)))
    nz = xi != 0
    dev = np.max(np.abs(h_hat[nz] + 1j * np.sign(xi[nz]) * phi_hat[nz])) / np.max(np.abs(phi_hat))
    return SymbolCheck(float(dev), xi, phi_hat, h_hat, truncated)


def hilbert_l2_ratio(phi, x_min, x_max, n, spec: PvIntegrandSpec | None = None):
    """||H phi||_2 / ||phi||_2 from grid samples.

    The part of ||H phi||^2 outside the window is completed with the
    moment expansion of the far field, integrated exactly.
    """
    dx = (x_max - x_min) / n
    x = x_min + dx * np.arange(n)
    vals = phi(x)
    if spec is None:
        spec = PvIntegrandSpec(u_max=max(abs(x_min), abs(x_max)) * 2 + 20.0, n_u=8192)
    h = hilbert(phi, x, spec)
    inside = dx * np.sum(np.abs(h) ** 2)
    m = _moments(vals, x, dx)
    # far field (1/pi) sum m_n x^-(n+1); with y = 1/|x| the tail is a polynomial integral
    right_edge, left_edge = x_max - 0.5 * dx, -(x_min - 0.5 * dx)
    tail = 0.0
    for edge, sgn in ((right_edge, 1.0), (left_edge, -1.0)):
        coef = np.array([m[k] * sgn ** (k + 1) for k in range(len(m))]) / math.pi
        poly = np.polynomial.Polynomial(coef)
        sq = poly * poly.copy()
        if np.iscomplexobj(coef):
            sq = poly * np.polynomial.Polynomial(np.conj(coef))
        integral = sq.integ()
        tail += float(np.real(integral(1.0 / edge) - integral(0.0)))
    norm_h = math.sqrt(inside + tail)
    norm_phi = math.sqrt(dx * np.sum(np.abs(vals) ** 2))
    return norm_h / norm_phi

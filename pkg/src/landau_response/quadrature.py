"""Adaptive Gauss-Kronrod quadrature for vector-valued integrands.

The integrand is called with a 1-D array of nodes and must return an array
whose first axis runs over those nodes; any trailing axes are integrated
component-wise. Error control uses the max-norm over components, so a single
call can integrate a whole family of integrals (e.g. one per velocity node)
on a shared adaptive partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, QuadratureError

# 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at odd positions of the full 21-point node list.
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG
GAUSS_WEIGHTS[11:20:2] = _WG[::-1]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for the adaptive integrals along characteristics.

    ``tail_cut`` is the field-envelope magnitude below which a half-line is
    truncated; it must not exceed ``abs_tol``.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 4000
    tail_cut: float = 1e-16

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidParameterError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise InvalidParameterError("max_subdivisions must be >= 1")
        if not (0 < self.tail_cut <= self.abs_tol):
            raise InvalidParameterError("tail_cut must satisfy 0 < tail_cut <= abs_tol")


def _norm(a):
    a = np.abs(a)
    return float(a.max()) if a.size else 0.0


def _apply_rule(f, lo, hi):
    """Kronrod value and Gauss-Kronrod error for each interval [lo_i, hi_i]."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    fx = fx.reshape((lo.size, NODES.size) + fx.shape[1:])
    wk = KRONROD_WEIGHTS.reshape((1, -1) + (1,) * (fx.ndim - 2))
    wg = GAUSS_WEIGHTS.reshape(wk.shape)
    scale = half.reshape((-1,) + (1,) * (fx.ndim - 2))
    kron = scale * np.sum(wk * fx, axis=1)
    gauss = scale * np.sum(wg * fx, axis=1)
    err = np.abs(kron - gauss)
    err = err.reshape(lo.size, -1).max(axis=1)
    return kron, err


def gauss_kronrod(f, a, b, *, abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=4000,
                  breakpoints=()):
    """Integrate ``f`` over [a, b] by globally adaptive bisection.

    Returns ``(value, error_estimate)``. Raises :class:`QuadratureError` when the
    subdivision budget is exhausted before the tolerance is met.
    """
    if a == b:
        probe = np.asarray(f(np.array([a])))
        return np.zeros(probe.shape[1:], dtype=probe.dtype), 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    pts = [a] + sorted(p for p in set(breakpoints) if a < p < b) + [b]
    lo = np.array(pts[:-1], dtype=float)
    hi = np.array(pts[1:], dtype=float)
    vals, errs = _apply_rule(f, lo, hi)

    while True:
        total = vals.sum(axis=0)
        total_err = float(errs.sum())
        tol = max(abs_tol, rel_tol * _norm(total))
        if total_err <= tol:
            return sign * total, total_err
        if lo.size >= max_subdivisions:
            raise QuadratureError("adaptive quadrature did not converge", total_err,
                                  sign * total)
        # refine every interval carrying more than its share of the budget
        refine = errs > tol / lo.size
        refine[np.argmax(errs)] = True
        budget = max_subdivisions - lo.size
        idx = np.flatnonzero(refine)
        if idx.size > budget:
            idx = idx[np.argsort(errs[idx])[::-1][:budget]]
            refine[:] = False
            refine[idx] = True
        mid = 0.5 * (lo[refine] + hi[refine])
        new_lo = np.concatenate([lo[refine], mid])
        new_hi = np.concatenate([mid, hi[refine]])
        if np.any(new_hi - new_lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(new_lo))):
            raise QuadratureError("interval width underflow", total_err, sign * total)
        nv, ne = _apply_rule(f, new_lo, new_hi)
        keep = ~refine
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])


def gauss_legendre_panels(edges, order):
    """Composite Gauss-Legendre nodes and weights over consecutive ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()

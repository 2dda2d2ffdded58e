"""Conductivity symbols, the cutoff decomposition and multiplier application.

Regularized symbol (nu > 0):

    sigma_nu(omega, k) = -i (q^2/m) int v F'(v) / (omega - k v + i nu) dv

Limiting symbol (k != 0), with G = v F'/n and u = omega/k:

    sigma_ph(omega, k) = -i (w_p^2 / 4 pi) [ (pi/k) H(G)(u) - i (pi/|k|) G(u) ]

The resonant term carries 1/|k|: the delta function from
1/(x + i0) = p.v. 1/x - i pi delta(x) contributes G(omega/k)/|k| for either
sign of k. ``convention="printed"`` evaluates the 1/k variant, kept only so the
two can be told apart numerically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidParameterError, TruncationWarning
from .hilbert import HilbertTable, PvIntegrandSpec, hilbert
from .kinetics import EquilibriumDistribution, SpaceTimeGrid, eval_field, spectrum_field, velocity_window
from .quadrature import gauss_kronrod, gauss_legendre_panels


def symbol_sigma_nu(eq: EquilibriumDistribution, omega, k, nu, *, abs_tol=1e-13, rel_tol=1e-12,
                    max_subdivisions=4000):
    """Regularized conductivity symbol by adaptive quadrature over v.

    Near the resonance v = omega/k the partition is seeded with intervals of the
    Lorentzian width nu/|k| and then grows geometrically outward.
    """
    if not nu > 0:
        raise InvalidParameterError(f"the regularized symbol needs nu > 0, got {nu}")
    sp = eq.species
    V = velocity_window(sp, omega, abs(k) if k else None)
    breaks = []
    if k != 0:
        vr = omega / k
        width = nu / abs(k)
        if -V < vr < V:
            breaks.extend(vr + width * np.arange(-10, 11))
            step = 10 * width
            while step < 2 * V:
                step *= 2
                breaks.extend((vr - step, vr + step))

    def integrand(v):
        return v * eq.dF(v) / (omega - k * v + 1j * nu)

    val, _ = gauss_kronrod(integrand, -V, V, abs_tol=abs_tol, rel_tol=rel_tol,
                           max_subdivisions=max_subdivisions, breakpoints=breaks)
    return complex(-1j * sp.q ** 2 / sp.m * val)


def symbol_sigma_ph(eq: EquilibriumDistribution, omega, k, *, table=None, spec=None,
                    convention="abs"):
    """Limiting conductivity symbol; broadcasts over (omega, k), requires k != 0."""
    omega, k = np.broadcast_arrays(np.asarray(omega, dtype=float), np.asarray(k, dtype=float))
    if np.any(k == 0):
        raise DomainError("the limiting conductivity symbol is undefined at k = 0")
    if convention not in ("abs", "printed"):
        raise InvalidParameterError(f"unknown convention {convention!r}")
    sp = eq.species
    u = omega / k
    if table is not None:
        hg = table(u)
    else:
        if spec is None:
            spec = PvIntegrandSpec(u_max=float(np.max(np.abs(u), initial=0.0))
                                   + 2 * velocity_window(sp))
        hg = hilbert(eq.G, u.ravel(), spec).reshape(u.shape)
    kd = np.abs(k) if convention == "abs" else k
    out = -1j * sp.omega_p2 / (4 * math.pi) * (math.pi / k * hg - 1j * math.pi / kd * eq.G(u))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class ConductivitySymbol:
    """sigma(omega, k) as a callable: regularized (nu > 0) or limiting."""

    kind: str
    equilibrium: EquilibriumDistribution
    nu: float = 0.0
    table: HilbertTable | None = field(default=None, compare=False)
    convention: str = "abs"

    def __post_init__(self):
        if self.kind not in ("regularized", "limiting"):
            raise InvalidParameterError(f"unknown symbol kind {self.kind!r}")
        if self.kind == "regularized" and not self.nu > 0:
            raise InvalidParameterError("regularized symbol needs nu > 0")

    def __call__(self, omega, k):
        if self.kind == "limiting":
            return symbol_sigma_ph(self.equilibrium, omega, k, table=self.table,
                                   convention=self.convention)
        f = np.vectorize(lambda w, kk: symbol_sigma_nu(self.equilibrium, w, kk, self.nu),
                         otypes=[complex])
        out = f(omega, k)
        return out if np.ndim(out) else complex(out)

    def with_table(self, half_width, n=None):
        """Copy whose H(G) lookups come from a table covering |omega/k| <= half_width."""
        if n is None:
            n = int(min(max(2 * half_width / 0.02, 2048), 20000)) | 1
        tab = HilbertTable(self.equilibrium.G, half_width, n=n,
                           support=2 * velocity_window(self.equilibrium.species))
        return ConductivitySymbol(self.kind, self.equilibrium, self.nu, tab, self.convention)


def regularized_symbol(eq, nu):
    return ConductivitySymbol("regularized", eq, nu)


def limiting_symbol(eq, *, half_width=None, convention="abs"):
    sym = ConductivitySymbol("limiting", eq, convention=convention)
    return sym.with_table(half_width) if half_width else sym


def _smooth_step(y):
    """0 for y <= 0, 1 for y >= 1, C-infinity in between (exp(-1/y) construction)."""
    y = np.asarray(y, dtype=float)
    a = np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
    b = np.where(y < 1, np.exp(-1.0 / np.where(y < 1, 1.0 - y, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True)
class CutoffFunction:
    """chi(z) = 1 on |z| <= 1/2, 0 on |z| >= 1, smooth and monotone in between."""

    lam: float

    def chi(self, z):
        z = np.asarray(z, dtype=float)
        out = 1.0 - _smooth_step(2.0 * np.abs(z) - 1.0)
        return out if out.ndim else float(out)

    def weight(self, k):
        """chi(k * lambda), the low-wavenumber weight."""
        return self.chi(np.asarray(k, dtype=float) * self.lam)


def make_cutoff(lam) -> CutoffFunction:
    if not lam > 0:
        raise InvalidParameterError(f"cutoff scale lambda must be positive, got {lam}")
    return CutoffFunction(float(lam))


@dataclass
class MultiplierResult:
    j: np.ndarray
    imag_residual: float
    leakage: float
    symbol_values: np.ndarray = field(repr=False)


def apply_multiplier(E, symbol: ConductivitySymbol, cutoff: CutoffFunction | None,
                     grid: SpaceTimeGrid, *, leakage_tol=1e-10):
    """j = inverse DFT of (1 - chi(k lambda)) sigma(omega, k) E_hat(omega, k) on the grid.

    The k = 0 column always gets weight 0 from the cutoff, so the limiting symbol
    is never evaluated there.
    """
    T, X = grid.mesh()
    samples = eval_field(E, T, X)
    peak = np.max(np.abs(samples))
    leakage = 0.0
    if peak > 0:
        edges = np.concatenate([samples[0], samples[-1], samples[:, 0], samples[:, -1]])
        leakage = float(np.max(np.abs(edges)) / peak)
        if leakage > leakage_tol:
            warnings.warn(f"field not negligible at the window edge ({leakage:.2e})",
                          TruncationWarning, stacklevel=2)
    spectral = grid.spectral()
    e_hat = spectral.forward(samples)
    W, K = spectral.mesh()
    weight = np.ones(K.shape) if cutoff is None else 1.0 - cutoff.weight(K)
    active = weight > 0
    if symbol.kind == "limiting":
        active &= K != 0
        if symbol.table is None and active.any():
            u_max = float(np.max(np.abs(W[active] / K[active])))
            symbol = symbol.with_table(u_max * 1.01 + 1.0)
    sig = np.zeros(K.shape, dtype=complex)
    if active.any():
        sig[active] = symbol(W[active], K[active])
    j_hat = weight * sig * e_hat
    j = spectral.inverse(j_hat)
    scale = np.max(np.abs(j.real))
    imag = float(np.max(np.abs(j.imag)) / scale) if scale > 0 else 0.0
    return MultiplierResult(j.real, imag, leakage, sig)


def _k_edges(lam, k_max, sub=4):
    """Panel edges over [-k_max, -1/(2 lam)] U [1/(2 lam), k_max] aligned with the cutoff ramp."""
    a, b = 0.5 / lam, 1.0 / lam
    ramp = np.linspace(a, b, sub + 1)
    tail = np.linspace(b, k_max, max(int(math.ceil((k_max - b) / 0.5)), 1) + 1)[1:] if k_max > b else []
    right = np.concatenate([ramp, tail])
    return -right[::-1], right


def multiplier_pairing(eq, E, psi, cutoff: CutoffFunction, *, omega_max=16.0, k_max=16.0,
                       order=16, symbol=None):
    """<sigma_{lambda,1-chi} E, psi_hat> = int int (1 - chi(k lambda)) sigma_ph E_hat psi."""
    w_edges = np.linspace(-omega_max, omega_max, int(2 * omega_max / 0.5) + 1)
    wn, ww = gauss_legendre_panels(w_edges, order)
    left, right = _k_edges(cutoff.lam, k_max)
    kl, kwl = gauss_legendre_panels(left, order)
    kr, kwr = gauss_legendre_panels(right, order)
    kn, kw = np.concatenate([kl, kr]), np.concatenate([kwl, kwr])
    if symbol is None:
        symbol = limiting_symbol(eq, half_width=omega_max * 2 * cutoff.lam * 1.01 + 1.0)
    Wm, Km = np.meshgrid(wn, kn, indexing="ij")
    vals = (1.0 - cutoff.weight(Km)) * symbol(Wm, Km) * spectrum_field(E, Wm, Km) * psi(Wm, Km)
    return complex(np.sum(ww[:, None] * kw[None, :] * vals))


def remainder_pairing(eq, E, psi, cutoff: CutoffFunction | None, *, k_max=8.0,
                      omega_support=20.0, order=8, v_panels=16, n_u=2048, printed_sign=False):
    """<sigma_{lambda,chi} E, psi_hat>, the part of the pairing concentrated near k = 0.

        -i (w_p^2/4 pi) int int chi(k lambda) G(v) [-pi H(Phi_k)(k v) - i pi Phi_k(k v)] dk dv

    with Phi_k = E_hat(., k) psi(., k) and H acting in omega. The minus sign on
    the Hilbert term follows from p.v. int Phi(w)/(w - a) dw = -pi H(Phi)(a);
    ``printed_sign=True`` flips it for comparison. ``cutoff=None`` integrates
    over all k (the lambda -> infinity form).
    """
    sp = eq.species
    V = velocity_window(sp)
    if cutoff is None:
        k_edges = np.linspace(-k_max, k_max, int(2 * k_max / 0.5) + 1)
    else:
        a, b = 0.5 / cutoff.lam, 1.0 / cutoff.lam
        k_edges = np.concatenate([np.linspace(-b, -a, 5), np.linspace(-a, a, 5)[1:-1],
                                  np.linspace(a, b, 5)])
    kn, kw = gauss_legendre_panels(k_edges, order)
    vn, vw = gauss_legendre_panels(np.linspace(-V, V, v_panels + 1), 8)
    gv = eq.G(vn)
    h_sign = 1.0 if printed_sign else -1.0
    total = 0.0 + 0.0j
    for k, wk in zip(kn, kw):
        chi = 1.0 if cutoff is None else cutoff.weight(k)
        if chi == 0:
            continue

        def phi(w, k=k):
            return spectrum_field(E, w, k) * psi(w, k)

        pts = k * vn
        spec = PvIntegrandSpec(u_max=float(np.max(np.abs(pts))) + omega_support, n_u=n_u)
        h = hilbert(phi, pts, spec)
        inner = np.sum(vw * gv * (h_sign * math.pi * h - 1j * math.pi * phi(pts)))
        total += wk * chi * inner
    return complex(-1j * sp.omega_p2 / (4 * math.pi) * total)


def total_pairing(eq, E, psi, cutoff, **kw):
    """Multiplier part plus remainder; independent of the cutoff scale."""
    mkw = {k: v for k, v in kw.items() if k in ("omega_max", "k_max", "order", "symbol")}
    rkw = {k: v for k, v in kw.items() if k in ("k_max", "omega_support", "order", "v_panels",
                                                "n_u", "printed_sign")}
    m = multiplier_pairing(eq, E, psi, cutoff, **mkw)
    r = remainder_pairing(eq, E, psi, cutoff, **rkw)
    return m, r


@dataclass
class SymbolSweepReport:
    """|sigma_nu - sigma_ph| over probes and a decreasing nu sweep."""

    probes: list
    nus: list
    rows: list = field(default_factory=list)
    final_relative: list = field(default_factory=list)
    sign_check: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def symbol_convergence_sweep(eq, probes, nus, *, rel_threshold=5e-3, discrimination=10.0):
    """Compare sigma_nu with sigma_ph at each probe for every nu in the sweep.

    For probes with k < 0, the smallest-nu symbol is also compared with the
    printed 1/k variant; the |k| form must win by ``discrimination``.
    """
    nus = [float(n) for n in nus]
    if any(not n > 0 for n in nus) or any(b >= a for a, b in zip(nus, nus[1:])):
        raise InvalidParameterError("nu sweep must be positive and strictly decreasing")
    report = SymbolSweepReport(probes=[tuple(map(float, p)) for p in probes], nus=nus)
    neg_abs, neg_printed, neg_scale = [], [], []
    for w, k in report.probes:
        ph = symbol_sigma_ph(eq, w, k)
        last = None
        for nu in nus:
            s = symbol_sigma_nu(eq, w, k, nu)
            err = abs(s - ph)
            report.rows.append((w, k, nu, s, ph, err))
            last = s
        rel = abs(last - ph) / abs(ph) if abs(ph) > 0 else abs(last - ph)
        report.final_relative.append(rel)
        if rel > rel_threshold:
            report.violations.append(f"probe ({w:g}, {k:g}): relative error {rel:.3e} at "
                                     f"nu={nus[-1]:g} exceeds {rel_threshold:g}")
        if k < 0:
            printed = symbol_sigma_ph(eq, w, k, convention="printed")
            neg_abs.append(abs(last - ph))
            neg_printed.append(abs(last - printed))
            neg_scale.append(abs(ph))
    if neg_abs:
        worst_abs = max(a / s for a, s in zip(neg_abs, neg_scale))
        worst_printed = max(p / s for p, s in zip(neg_printed, neg_scale))
        ratio = worst_printed / worst_abs if worst_abs > 0 else math.inf
        report.sign_check = {"abs_k_rel_error": worst_abs, "printed_k_rel_error": worst_printed,
                             "ratio": ratio}
        if not (worst_abs < rel_threshold and worst_printed > discrimination * rel_threshold
                and ratio > discrimination):
            report.violations.append(f"sign-of-k discrimination failed: {report.sign_check}")
    return report

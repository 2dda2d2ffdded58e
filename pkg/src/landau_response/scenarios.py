"""Scenario runners: config -> computations -> CSV artifacts + report.json."""

from __future__ import annotations

import csv
import json
import math
import os
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .causal import CausalSolution, current_j_points, nu_sweep_f, probe_lattice, residual_Lnu
from .conductivity import (apply_multiplier, limiting_symbol, make_cutoff, multiplier_pairing,
                           remainder_pairing, symbol_convergence_sweep, symbol_sigma_nu,
                           symbol_sigma_ph)
from .config import ScenarioConfig
from .errors import TruncationWarning
from .hilbert import PvIntegrandSpec, dawson, hilbert, hilbert_l2_ratio, hilbert_symbol_check
from .kinetics import (FieldPerturbation, PlasmaSpecies, SpaceTimeGrid, eval_field,
                       gaussian_packet, make_maxwellian, modulated_packet, superpose)
from .model_problem import (ScalarSource, causal_u, fourier_identity_check, model_nu_sweep,
                            uniqueness_probe)

STATUS_ORDER = {"pass": 0, "warn": 1, "fail": 2}


@dataclass
class RunReport:
    scenario: str
    config_hash: str
    checks: list = field(default_factory=list)
    summaries: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    error: str | None = None

    def check(self, name, value, threshold, passed, detail=""):
        self.checks.append({"name": name, "status": "pass" if passed else "fail",
                            "value": _jsonable(value), "threshold": _jsonable(threshold),
                            "detail": detail})

    def warn(self, name, detail):
        self.checks.append({"name": name, "status": "warn", "value": None, "threshold": None,
                            "detail": detail})

    @property
    def status(self):
        if self.error is not None:
            return "fail"
        worst = max((STATUS_ORDER[c["status"]] for c in self.checks), default=0)
        return {v: k for k, v in STATUS_ORDER.items()}[worst]

    def to_dict(self):
        return {"scenario": self.scenario, "status": self.status, "config_hash": self.config_hash,
                "version": __version__, "checks": self.checks, "summaries": self.summaries,
                "timings": self.timings, "artifacts": self.artifacts, "error": self.error}


def _jsonable(x):
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    x = float(x)
    return x if math.isfinite(x) else repr(x)


@contextmanager
def stage(report, name):
    start = time.perf_counter()
    try:
        yield
    finally:
        report.timings[name] = time.perf_counter() - start


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(out_dir, name, header, rows, report):
    """CSV with a fixed header and round-trip float formatting."""
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    report.artifacts.append(name)
    return path


def build_species(d):
    d = d or {}
    return PlasmaSpecies(**{k: float(v) for k, v in d.items()})


def build_field(d) -> FieldPerturbation:
    kind = d["kind"]
    if kind == "superposition":
        return superpose(*(build_field(c) for c in d["components"]))
    kw = {k: float(v) for k, v in d.items() if k != "kind"}
    if kind == "gaussian-packet":
        return gaussian_packet(**kw)
    return modulated_packet(**kw)


def build_grid(d):
    return SpaceTimeGrid(float(d["t_min"]), float(d["t_max"]), int(d["n_t"]),
                         float(d["x_min"]), float(d["x_max"]), int(d["n_x"]))


def _max_abs_field(E, n=201):
    lo, hi = E.time_support(1e-8)
    xlo, xhi = E.space_support(1e-8)
    if not lo < hi:
        return 0.0
    T, X = np.meshgrid(np.linspace(lo, hi, n), np.linspace(xlo, xhi, n), indexing="ij")
    return float(np.max(np.abs(eval_field(E, T, X))))


def _rel(diff, scale):
    return diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)


# ---------------------------------------------------------------- scenarios

def run_causal_solution(cfg, report, out_dir, threads):
    tol = cfg.tolerances()
    eq = make_maxwellian(build_species(cfg.data.get("species")))
    E = build_field(cfg.data["field"])
    nu = float(cfg.data["nu"])
    h = float(cfg.data.get("h", 1e-3))
    p = cfg.data.get("probes", {})
    probes = probe_lattice(p.get("t_range", [-1.0, 1.0]), p.get("x_range", [-1.0, 1.0]),
                           p.get("v_range", [-2.0, 2.0]), p.get("n", 5))
    sol = CausalSolution(nu, eq, E)
    rows = []
    with stage(report, "residual"):
        for t, x, v in probes:
            r1 = residual_Lnu(sol, t, x, v, h, h)
            r2 = residual_Lnu(sol, t, x, v, h / 2, h / 2)
            rows.append((t, x, v, r1, r2))
    write_csv(out_dir, "residuals.csv", ["t", "x", "v", "residual_h", "residual_h2"], rows, report)
    vgrid = np.linspace(-8 * eq.species.v_t, 8 * eq.species.v_t, 4001)
    scale = abs(eq.species.charge_to_mass) * _max_abs_field(E) * float(np.max(np.abs(eq.dF(vgrid))))
    m1 = max(abs(r[3]) for r in rows)
    m2 = max(abs(r[4]) for r in rows)
    rel = _rel(m1, scale)
    report.summaries.update({"max_residual": m1, "max_residual_half_h": m2, "source_scale": scale})
    report.check("pde_residual", rel, tol["residual_rel"], rel < tol["residual_rel"],
                 f"max|L f + (q/m) E F'| / max|(q/m) E F'| at h={h:g}")
    if m1 > 0 and m2 > 0:
        order = math.log2(m1 / m2)
        report.check("fd_order", order, tol["fd_order_min"], order >= tol["fd_order_min"],
                     "observed order of the centered differences under h-halving")
    else:
        report.check("fd_order", None, tol["fd_order_min"], scale == 0,
                     "residual identically zero (zero field)")


def run_limiting_absorption(cfg, report, out_dir, threads):
    tol = cfg.tolerances()
    eq = make_maxwellian(build_species(cfg.data.get("species")))
    E = build_field(cfg.data["field"])
    p = cfg.data.get("probes", {})
    probes = probe_lattice(p.get("t_range", [-1.0, 2.0]), p.get("x_range", [-1.0, 1.0]),
                           p.get("v_range", [-2.0, 2.0]), p.get("n", 5))
    sol = CausalSolution(0.0, eq, E)
    with stage(report, "nu_sweep"):
        rep = nu_sweep_f(sol, cfg.data["nu_sweep"], probes, rel_threshold=tol["final_rel"],
                         mono_tol=tol["mono_tol"], threads=threads)
    write_csv(out_dir, "sweep.csv", ["nu", "t", "x", "v", "f_nu", "f", "abs_err"], rep.rows, report)
    write_csv(out_dir, "sweep_summary.csv", ["nu", "max_abs_err"],
              list(zip(rep.nus, rep.max_errors)), report)
    report.summaries.update({"max_abs_f": rep.max_reference,
                             "max_errors": dict(zip(map(repr, rep.nus), rep.max_errors))})
    report.check("monotone_decrease", None, tol["mono_tol"], rep.monotone,
                 "; ".join(v for v in rep.violations if "grew" in v))
    rel = rep.final_relative() if rep.max_reference else 0.0
    report.check("final_error", rel, tol["final_rel"], rep.final_ok,
                 f"max|f_nu - f| / max|f| at nu={rep.nus[-1]:g}")


def _hilbert_suite(report, tol):
    sqpi = math.sqrt(math.pi)
    with warnings.catch_warnings():
        # the Lorentzian decays only like 1/y^2; its tail error is bounded by u_max
        warnings.simplefilter("ignore", TruncationWarning)
        lor = hilbert(lambda y: 1.0 / (1.0 + y * y), 1.0, PvIntegrandSpec(u_max=400.0, n_u=1 << 15))
    err = abs(lor - 0.5)
    report.check("hilbert_lorentzian", err, tol["hilbert_pair"], err < tol["hilbert_pair"],
                 "H(1/(1+y^2))(1) vs 1/2")
    gau = hilbert(lambda y: np.exp(-y * y), 1.0)
    err = abs(gau - 2 * dawson(1.0) / sqpi)
    report.check("hilbert_gaussian", err, tol["hilbert_pair"], err < tol["hilbert_pair"],
                 "H(exp(-y^2))(1) vs 2 D(1)/sqrt(pi)")
    for name, phi in (("gaussian", lambda y: np.exp(-y * y)),
                      ("gaussian_derivative", lambda y: -2 * y * np.exp(-y * y))):
        chk = hilbert_symbol_check(phi, -20.0, 20.0, 1024)
        report.check(f"hilbert_symbol_{name}", chk.deviation, tol["hilbert_symbol"],
                     chk.deviation < tol["hilbert_symbol"], "FT(H phi) vs -i sign(xi) phi_hat")
    ratio = hilbert_l2_ratio(lambda y: np.exp(-y * y), -20.0, 20.0, 1024)
    report.check("hilbert_l2", abs(ratio - 1), tol["hilbert_l2"], abs(ratio - 1) < tol["hilbert_l2"],
                 "||H phi|| / ||phi|| - 1")


def run_conductivity_sweep(cfg, report, out_dir, threads):
    tol = cfg.tolerances()
    eq = make_maxwellian(build_species(cfg.data.get("species")))
    p = cfg.data.get("probes", {"omega": [1.0, -1.0, 2.0, -2.0],
                                "k": [0.5, -0.5, 1.0, -1.0, 2.0, -2.0]})
    probes = [(w, k) for w in p["omega"] for k in p["k"]]
    with stage(report, "symbol_sweep"):
        rep = symbol_convergence_sweep(eq, probes, cfg.data["nu_sweep"],
                                       rel_threshold=tol["symbol_rel"],
                                       discrimination=tol["discrimination"])
    rows = [(w, k, nu, s.real, s.imag) for w, k, nu, s, _, _ in rep.rows]
    for w, k in rep.probes:
        s = symbol_sigma_ph(eq, w, k)
        rows.append((w, k, 0.0, s.real, s.imag))
    write_csv(out_dir, "symbols.csv", ["omega", "k", "nu", "re_sigma", "im_sigma"], rows, report)
    worst = max(rep.final_relative)
    report.check("symbol_limit", worst, tol["symbol_rel"], worst < tol["symbol_rel"],
                 f"max |sigma_nu - sigma_ph| / |sigma_ph| at nu={rep.nus[-1]:g}")
    if rep.sign_check:
        sc = rep.sign_check
        ok = not any("sign-of-k" in v for v in rep.violations)
        report.check("abs_k_convention", sc["ratio"], tol["discrimination"], ok,
                     f"k<0 probes: |k| form rel error {sc['abs_k_rel_error']:.3e}, "
                     f"1/k form rel error {sc['printed_k_rel_error']:.3e}")
    report.summaries["sign_check"] = rep.sign_check

    with stage(report, "physical_sanity"):
        u = float(cfg.data.get("cold_plasma_u", 8.0))
        s = symbol_sigma_ph(eq, u, 1.0)
        cold = abs(4j * math.pi * u * s / eq.species.omega_p2 - 1.0)
        report.check("cold_plasma", cold, tol["cold_plasma"], cold < tol["cold_plasma"],
                     f"|4 pi i omega sigma_ph / w_p^2 - 1| at omega/k={u:g}")
        rng = np.random.default_rng(cfg.data.get("seed", 0))
        n_rand = int(cfg.data.get("n_random", 64))
        ws = rng.uniform(-4, 4, n_rand)
        ks = rng.uniform(0.2, 3, n_rand) * rng.choice([-1.0, 1.0], n_rand)
        allw = np.concatenate([ws, [w for w, _ in probes]])
        allk = np.concatenate([ks, [k for _, k in probes]])
        s_pos = symbol_sigma_ph(eq, allw, allk)
        s_neg = symbol_sigma_ph(eq, -allw, -allk)
        min_re = float(np.min(s_pos.real))
        report.check("dissipation", min_re, -tol["dissipation"], min_re >= -tol["dissipation"],
                     "min Re sigma_ph over probes and random samples")
        scale = np.maximum(np.abs(s_pos), 1e-300)
        real_ph = float(np.max(np.abs(s_neg - np.conj(s_pos)) / scale))
        real_nu = 0.0
        for w, k in zip(ws[:8], ks[:8]):
            a = symbol_sigma_nu(eq, w, k, 0.1)
            b = symbol_sigma_nu(eq, -w, -k, 0.1)
            real_nu = max(real_nu, abs(b - a.conjugate()) / abs(a))
        reality = max(real_ph, real_nu)
        report.check("reality", reality, tol["reality"], reality < tol["reality"],
                     "|sigma(-omega,-k) - conj sigma(omega,k)| / |sigma| (limiting and nu=0.1)")
    with stage(report, "hilbert_suite"):
        _hilbert_suite(report, tol)


def run_multiplier_equivalence(cfg, report, out_dir, threads):
    tol = cfg.tolerances()
    eq = make_maxwellian(build_species(cfg.data.get("species")))
    E = build_field(cfg.data["field"])
    grid = build_grid(cfg.data["grid"])
    cutoff = make_cutoff(float(cfg.data["lambda"]))
    with stage(report, "multiplier"), warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        res = apply_multiplier(E, limiting_symbol(eq), cutoff, grid)
    for w in caught:
        report.warn("multiplier_leakage", str(w.message))
    T, X = grid.mesh()
    it = slice(grid.n_t // 4, 3 * grid.n_t // 4)
    ix = slice(grid.n_x // 4, 3 * grid.n_x // 4)
    sol = CausalSolution(0.0, eq, E, s_integral="closed-form")
    with stage(report, "characteristics"):
        jc = current_j_points(sol, T[it, ix], X[it, ix], threads=threads)
    jm = res.j[it, ix]
    diff = float(np.max(np.abs(jm - jc)))
    scale = float(np.max(np.abs(jc)))
    rel = _rel(diff, scale)
    write_csv(out_dir, "j_multiplier.csv", ["t", "x", "j"],
              zip(T.ravel(), X.ravel(), res.j.ravel()), report)
    write_csv(out_dir, "two_route.csv", ["t", "x", "j_multiplier", "j_characteristics"],
              zip(T[it, ix].ravel(), X[it, ix].ravel(), jm.ravel(), jc.ravel()), report)
    report.summaries.update({"max_abs_j": scale, "max_abs_diff": diff, "leakage": res.leakage})
    report.check("two_route_ohm", rel, tol["two_route_rel"], rel < tol["two_route_rel"],
                 "max|j_multiplier - j_characteristics| / max|j| on the interior half-grid")
    report.check("imag_residual", res.imag_residual, tol["imag_residual"],
                 res.imag_residual < tol["imag_residual"], "max|Im j| / max|Re j| after inverse DFT")


def _gaussian_psi(d):
    d = d or {}
    wc, kc, width = d.get("omega_c", 0.5), d.get("k_c", 0.3), d.get("width", 1.0)

    def psi(w, k):
        return np.exp(-((w - wc) ** 2 + (k - kc) ** 2) / width ** 2)
    return psi


def run_remainder_decomposition(cfg, report, out_dir, threads):
    tol = cfg.tolerances()
    eq = make_maxwellian(build_species(cfg.data.get("species")))
    E = build_field(cfg.data["field"])
    psi = _gaussian_psi(cfg.data.get("psi"))
    rows, totals, printed = [], [], []
    for lam in (float(cfg.data["lambda"]), float(cfg.data["lambda_alt"])):
        cut = make_cutoff(lam)
        with stage(report, f"lambda={lam:g}"):
            m = multiplier_pairing(eq, E, psi, cut)
            r = remainder_pairing(eq, E, psi, cut)
            rp = remainder_pairing(eq, E, psi, cut, printed_sign=True)
        totals.append(m + r)
        printed.append(m + rp)
        rows.append((lam, m.real, m.imag, r.real, r.imag, (m + r).real, (m + r).imag))
    with stage(report, "all_k"):
        g = remainder_pairing(eq, E, psi, None)
    rows.append(("inf", 0.0, 0.0, g.real, g.imag, g.real, g.imag))
    write_csv(out_dir, "pairing.csv", ["lambda", "re_multiplier", "im_multiplier", "re_remainder",
                                       "im_remainder", "re_total", "im_total"], rows, report)
    scale = max(abs(totals[0]), abs(totals[1]))
    rel = _rel(abs(totals[0] - totals[1]), scale)
    rel_g = _rel(abs(totals[0] - g), max(scale, abs(g)))
    rel_p = _rel(abs(printed[0] - printed[1]), max(abs(printed[0]), abs(printed[1])))
    report.summaries.update({"total": [totals[0].real, totals[0].imag],
                             "printed_sign_lambda_drift": rel_p})
    report.check("lambda_independence", rel, tol["lambda_rel"], rel < tol["lambda_rel"],
                 "|T(lambda) - T(lambda_alt)| / |T|")
    report.check("all_k_remainder", rel_g, tol["lambda_rel"], rel_g < tol["lambda_rel"],
                 "total vs the remainder integral over all k (lambda -> infinity)")


def run_model_problem(cfg, report, out_dir, threads):
    tol = cfg.tolerances()
    src = ScalarSource(**{k: float(v) for k, v in cfg.data["source"].items()})
    nu = float(cfg.data["nu"])
    grid = build_grid(cfg.data["grid"])
    with stage(report, "fourier"), warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        chk = fourier_identity_check(src, nu, grid)
    for w in caught:
        report.warn("fourier_leakage", str(w.message))
    report.summaries.update({"fourier_per_mode": chk.deviation_per_mode, "leakage": chk.leakage})
    report.check("fourier_identity", chk.deviation, tol["fourier"], chk.deviation < tol["fourier"],
                 "max|DFT(u) - i DFT(v)/(omega + i nu)| / max|DFT(u)|")
    with stage(report, "closed_form"):
        ts = src.t0 + src.tau * np.linspace(-3, 6, 10)
        xs = src.x0 + src.ell * np.linspace(-1, 1, 3)
        T, X = np.meshgrid(ts, xs, indexing="ij")
        a = causal_u(src, nu, T, X)
        b = causal_u(src, nu, T, X, method="quadrature")
        err = float(np.max(np.abs(a - b)))
    report.check("erf_closed_form", err, tol["erf_match"], err < tol["erf_match"],
                 "erfc closed form vs adaptive quadrature of the Duhamel integral")
    u = cfg.data.get("uniqueness", {})
    with stage(report, "uniqueness"):
        rep = uniqueness_probe(src, nu, float(u.get("delta", 1.0)), float(u.get("horizon", 10.0)))
    write_csv(out_dir, "uniqueness.csv", ["t", "difference"], zip(rep.times, rep.difference), report)
    report.summaries.update({"growth_factor": rep.growth_factor, "expected_growth": rep.expected})
    report.check("uniqueness_growth", rep.relative_error, tol["growth_rel"],
                 rep.relative_error < tol["growth_rel"], "growth factor vs exp(nu T)")
    nus = cfg.data.get("nu_sweep", [1e-1, 1e-2, 1e-3, 1e-4])
    with stage(report, "nu_sweep"):
        sw = model_nu_sweep(src, nus, src.t0 + src.tau * np.linspace(-2, 3, 5),
                            src.x0 + src.ell * np.linspace(-1, 1, 5))
    write_csv(out_dir, "nu_sweep.csv", ["nu", "max_abs_err"], zip(sw.nus, sw.max_errors), report)
    report.check("limiting_absorption", None, None, sw.monotone, "u^nu -> u monotonically")
    report.check("causality", sw.causal_violation, 1e-12, sw.causal_violation < 1e-12,
                 "u^nu before the source support")


RUNNERS = {
    "causal-solution": run_causal_solution,
    "limiting-absorption": run_limiting_absorption,
    "conductivity-sweep": run_conductivity_sweep,
    "multiplier-equivalence": run_multiplier_equivalence,
    "remainder-decomposition": run_remainder_decomposition,
    "model-problem": run_model_problem,
}


def run(cfg: ScenarioConfig, out_dir, *, threads=1) -> RunReport:
    """Run a validated scenario; the report is written even when checks fail."""
    os.makedirs(out_dir, exist_ok=True)
    report = RunReport(cfg.scenario, cfg.config_hash())
    start = time.perf_counter()
    try:
        RUNNERS[cfg.scenario](cfg, report, out_dir, threads)
    except Exception as exc:  # report computation failures instead of losing them
        report.error = f"{type(exc).__name__}: {exc}"
    report.timings["total"] = time.perf_counter() - start
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
